# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import Any, Mapping, TextIO

from ensemble_cluster.hilbert.snapshot import to_snapshot
from ensemble_cluster.protocol.trace import ProtocolTrace, StepKind
from ensemble_cluster.util.version import get_version

TRACE_SCHEMA = "ensemble-cluster/trace"
TRACE_SCHEMA_VERSION = 1


def trace_payload(
    trace: ProtocolTrace,
    *,
    config_fingerprint: str,
    embed_state: bool = True,
    extra: Mapping[str, Any] | None = None,
    created: datetime | None = None,
) -> dict[str, Any]:
    created = created or datetime.now(timezone.utc)
    outcomes = [
        {"label": s.outcome, "probability": s.probability}
        for s in trace.steps
        if s.kind is StepKind.MEASURE and s.outcome is not None
    ]
    payload: dict[str, Any] = {
        "schema": TRACE_SCHEMA,
        "schema_version": TRACE_SCHEMA_VERSION,
        "tool_version": get_version(),
        "config_fingerprint": config_fingerprint,
        "created_utc": created.isoformat(),
        "kind": trace.protocol,
        "steps": [s.to_dict() for s in trace.steps],
        "outcomes": outcomes,
        "leakage": list(trace.leakage),
        "vacuum_residuals": list(trace.vacuum_residuals),
        "fidelities": dict(trace.fidelities),
        "diagnostics": dict(trace.diagnostics),
        "success": trace.success,
        "final_state": to_snapshot(trace.final_state) if embed_state and trace.final_state is not None else None,
    }
    if extra:
        payload.update(extra)
    return payload


def emit_json(payload: Mapping[str, Any], out: TextIO) -> None:
    json.dump(payload, out, indent=2)
    out.write("\n")

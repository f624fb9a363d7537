# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone

import pytest

from ensemble_cluster.dynamics.params import params_for_ratio
from ensemble_cluster.hilbert.snapshot import from_snapshot
from ensemble_cluster.hilbert.state import fidelity
from ensemble_cluster.protocol.chain import run_chain
from ensemble_cluster.protocol.trace import ProtocolStep, ProtocolTrace, StepKind
from ensemble_cluster.report.csv_report import SWEEP_COLUMNS, emit_sweep_csv, emit_sweep_json
from ensemble_cluster.report.json_report import TRACE_SCHEMA, emit_json, trace_payload
from ensemble_cluster.verify.approximation import ApproximationReport

FIXED = datetime(2024, 1, 1, tzinfo=timezone.utc)


def _reports() -> list[ApproximationReport]:
    return [
        ApproximationReport(10, 40.0, 2, 0.999, 1e-4, 0.2, 0.0),
        ApproximationReport(5, 20.0, 2, 0.99, 1e-3, 0.4, 0.0),
        ApproximationReport(10, 10.0, 2, 0.95, 1e-2, 0.2, 0.0, (0.1, 0.2)),
    ]


def test_trace_payload_for_chain() -> None:
    trace = run_chain(2, params_for_ratio(100, 20.0))
    payload = trace_payload(trace, config_fingerprint="abc", created=FIXED, extra={"seed": 5})
    assert payload["schema"] == TRACE_SCHEMA
    assert payload["kind"] == "chain"
    assert payload["created_utc"] == "2024-01-01T00:00:00+00:00"
    assert payload["config_fingerprint"] == "abc"
    assert payload["seed"] == 5
    assert [s["label"] for s in payload["steps"]] == ["C1", "PulseA", "PulseB", "PulseE", "C2"]
    assert payload["outcomes"] == []
    assert len(payload["leakage"]) == 2
    assert payload["success"] is True
    assert trace.final_state is not None
    restored = from_snapshot(payload["final_state"])
    assert fidelity(restored, trace.final_state) == pytest.approx(1.0, abs=1e-12)


def test_trace_payload_lists_measurements() -> None:
    trace = ProtocolTrace("fusion")
    trace.record(ProtocolStep(StepKind.MEASURE, "stage1", outcome="+", probability=0.5))
    trace.record(ProtocolStep(StepKind.MEASURE, "stage2", outcome="-", probability=0.5))
    payload = trace_payload(trace, config_fingerprint="x", embed_state=False, created=FIXED)
    assert payload["outcomes"] == [{"label": "+", "probability": 0.5}, {"label": "-", "probability": 0.5}]
    assert payload["final_state"] is None


def test_emit_json_is_stable() -> None:
    trace = ProtocolTrace("chain")
    first, second = io.StringIO(), io.StringIO()
    emit_json(trace_payload(trace, config_fingerprint="x", created=FIXED), first)
    emit_json(trace_payload(trace, config_fingerprint="x", created=FIXED), second)
    assert first.getvalue() == second.getvalue()
    assert first.getvalue().endswith("}\n")
    json.loads(first.getvalue())


def test_sweep_csv_is_sorted() -> None:
    out = io.StringIO()
    emit_sweep_csv(_reports(), out)
    rows = list(csv.reader(io.StringIO(out.getvalue())))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert [(r[0], r[1]) for r in rows[1:]] == [("5", "20.0"), ("10", "10.0"), ("10", "40.0")]
    assert float(rows[2][3]) == 0.95


def test_sweep_json_carries_extras() -> None:
    out = io.StringIO()
    emit_sweep_json(_reports(), out, extra={"tool_version": "0.1.0"})
    payload = json.loads(out.getvalue())
    assert payload["tool_version"] == "0.1.0"
    assert [r["N"] for r in payload["reports"]] == [5, 10, 10]
    assert payload["reports"][1]["phases"] == [0.1, 0.2]

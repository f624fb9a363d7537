# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import csv
import json
from typing import Iterable, TextIO

from ensemble_cluster.verify.approximation import ApproximationReport

SWEEP_COLUMNS = ("N", "ratio", "K", "fidelity", "cavity_residual", "commutator_gap", "commutator_defect")


def _sorted(reports: Iterable[ApproximationReport]) -> list[ApproximationReport]:
    return sorted(reports, key=lambda r: (r.atoms, r.ratio, r.ensembles))


def emit_sweep_csv(reports: Iterable[ApproximationReport], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in _sorted(reports):
        row = r.to_dict()
        writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in SWEEP_COLUMNS])


def emit_sweep_json(reports: Iterable[ApproximationReport], out: TextIO, extra: dict | None = None) -> None:
    payload = {"reports": [r.to_dict() for r in _sorted(reports)]}
    if extra:
        payload.update(extra)
    json.dump(payload, out, indent=2)
    out.write("\n")

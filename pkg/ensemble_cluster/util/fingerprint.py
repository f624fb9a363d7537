# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import hashlib
import json
from typing import Any, Mapping


def canonical_json(payload: Mapping[str, Any]) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def compute_fingerprint(payload: Mapping[str, Any]) -> str:
    """Stable sha256 of a JSON-serialisable mapping (key order ignored)."""
    return hashlib.sha256(canonical_json(payload)).hexdigest()

# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import os
from pathlib import Path


def ensure_dir(path: str | os.PathLike[str]) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def output_path(out_dir: str | os.PathLike[str] | None, name: str) -> Path | None:
    if out_dir is None:
        return None
    return ensure_dir(out_dir) / name

# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from ensemble_cluster.cli import main


if __name__ == "__main__":
    raise SystemExit(main())

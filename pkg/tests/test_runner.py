# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

import math
import unittest
from multiprocessing import cpu_count

from ensemble_cluster.engine.runner import resolve_workers, run_ordered


class RunnerTests(unittest.TestCase):
    def test_resolve_workers(self) -> None:
        self.assertEqual(resolve_workers(3), 3)
        self.assertEqual(resolve_workers(None), cpu_count())
        self.assertEqual(resolve_workers(0), cpu_count())

    def test_serial_keeps_order(self) -> None:
        self.assertEqual(run_ordered(abs, [-3, 1, -2]), [3, 1, 2])

    def test_pool_matches_serial(self) -> None:
        items = [float(i) for i in range(12)]
        serial = run_ordered(math.sqrt, items, workers=1)
        pooled = run_ordered(math.sqrt, items, workers=3)
        self.assertEqual(serial, pooled)

    def test_empty_batch(self) -> None:
        self.assertEqual(run_ordered(abs, [], workers=4), [])


if __name__ == "__main__":
    unittest.main()

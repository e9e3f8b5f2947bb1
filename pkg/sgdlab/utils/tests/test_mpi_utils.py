import unittest

import numpy as np
import pytest

try:
    from sgdlab.utils.mpi_utils import MPIInterface, MPIAllocationMap, MPISyncError, synchronize_errors
    mpi_available = True
except ImportError:
    mpi_available = False


@unittest.skipIf(not mpi_available, 'mpi4py is not available')
class TestAllocation(unittest.TestCase):
    @pytest.mark.parallel
    @pytest.mark.all_proc
    def test_blocks_cover_paths_in_order(self):
        mpi = MPIInterface()
        alloc = MPIAllocationMap(mpi, 11)
        local = alloc.local_allocation_map()
        counts = mpi.comm.allgather(len(local))
        self.assertEqual(sum(counts), 11)
        self.assertLessEqual(max(counts) - min(counts), 1)
        rows = np.array([[i, 2.0 * i] for i in local], dtype=float).reshape(-1, 2)
        gathered = alloc.global_rows_float64(rows)
        np.testing.assert_array_equal(gathered[:, 0], np.arange(11))
        np.testing.assert_array_equal(gathered[:, 1], 2.0 * np.arange(11))

    @pytest.mark.parallel
    @pytest.mark.all_proc
    def test_errors_reach_every_rank(self):
        mpi = MPIInterface()
        synchronize_errors(mpi, None)
        err = ValueError('bad block') if mpi.rank == 0 else None
        with self.assertRaises(MPISyncError):
            synchronize_errors(mpi, err)


if __name__ == '__main__':
    unittest.main()

from mpi4py import MPI
import numpy as np
import traceback


class MPISyncError(Exception):
    pass


class MPIInterface:
    def __init__(self):
        self._comm = MPI.COMM_WORLD
        self._size = self._comm.Get_size()
        self._rank = self._comm.Get_rank()

    @property
    def comm(self):
        return self._comm

    @property
    def rank(self):
        return self._rank

    @property
    def size(self):
        return self._size


class MPIAllocationMap:
    """
    Split global_N sample paths into contiguous, index-ordered blocks, one per
    rank. Gathering concatenates the blocks in rank order, which is path
    order, so the assembled arrays do not depend on the number of ranks.
    """
    def __init__(self, mpi_interface, global_N):
        self._mpi_interface = mpi_interface
        self._global_N = global_N

        size = self._mpi_interface.size
        self._counts = [global_N // size + (1 if r < global_N % size else 0) for r in range(size)]
        start = sum(self._counts[:self._mpi_interface.rank])
        end = start + self._counts[self._mpi_interface.rank]
        self._local_map = list(range(start, end))

    def local_allocation_map(self):
        return list(self._local_map)

    def global_rows_float64(self, local_rows):
        local_rows = np.ascontiguousarray(local_rows, dtype='d')
        if local_rows.ndim == 1:
            local_rows = local_rows.reshape(-1, 1)
        assert(local_rows.shape[0] == len(self._local_map))
        width = local_rows.shape[1]
        counts = [c * width for c in self._counts]
        displs = np.concatenate([[0], np.cumsum(counts)[:-1]]).tolist()
        global_rows = np.full((self._global_N, width), np.nan, dtype='d')
        comm = self._mpi_interface.comm
        comm.Allgatherv([local_rows, MPI.DOUBLE],
                        [global_rows, counts, displs, MPI.DOUBLE])
        return global_rows


def synchronize_errors(mpi_interface, err):
    """Raise MPISyncError on every rank if any rank recorded an error."""
    msg = None if err is None else ''.join(traceback.format_exception(type(err), err, err.__traceback__))
    messages = mpi_interface.comm.allgather(msg)
    failed = [(r, m) for r, m in enumerate(messages) if m is not None]
    if failed:
        rank, text = failed[0]
        raise MPISyncError('error on rank {0}:\n{1}'.format(rank, text))

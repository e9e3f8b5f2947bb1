import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed, index=0):
    """
    Counter-based generator for the pair (seed, index).

    The pair is used directly as the 128-bit Philox key, so every
    (seed, index) owns a distinct stream and the draws of one index never
    depend on how many other streams exist or in which order they are used.

    Parameters
    ----------
    seed: int
        64-bit experiment seed
    index: int
        stream label, e.g. a path index

    Returns
    -------
    numpy.random.Generator
    """
    key = np.array([int(seed) & _MASK64, int(index) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def path_streams(seed, indices):
    return [stream(seed, i) for i in indices]

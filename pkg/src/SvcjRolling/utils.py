from pathlib import Path

import numpy as np

_MASK64 = (1 << 64) - 1


def window_seed(base_seed, t):
    """
    Mix a base seed and a window index into a 64-bit seed.

    The mix depends only on (base_seed, t), so the seed of a window never
    depends on which worker runs it or when.

    Args:
        base_seed (int): Run seed, any integer (negative values are wrapped)
        t (int): 1-based index of the estimation date

    Returns:
        int: Seed in [0, 2**64)
    """
    sequence = np.random.SeedSequence([int(base_seed) & _MASK64, int(t)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def ensure_output_dir(directory):
    """
    Create the output directory (and parents) if needed.

    Args:
        directory (str | Path): Directory to create

    Returns:
        Path: The directory

    Raises:
        NotADirectoryError: If the path exists and is not a directory
    """
    directory = Path(directory)

    if directory.exists() and not directory.is_dir():
        raise NotADirectoryError(f"'{directory}' exists and is not a directory.")

    directory.mkdir(parents=True, exist_ok=True)
    return directory


def distinct_rows(points):
    """Number of distinct rows of a 2-D array."""
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        return 0
    return len(np.unique(points, axis=0))


def spawn_streams(seed, n):
    """`n` independent child seed sequences of `seed` (wrapped to 64 bits)."""
    return np.random.SeedSequence(int(seed) & _MASK64).spawn(n)

import numpy as np


def parabolic_distance_matrix(
    xa: np.ndarray,
    ta: np.ndarray,
    xb: np.ndarray,
    tb: np.ndarray,
) -> np.ndarray:
    """Calculate the parabolic distance matrix between two node sets.

    Returns a matrix where matrix[i][j] is max(|xa_i - xb_j|_inf, sqrt|ta_i - tb_j|),
    i.e. the metric with the maximum norm on space.
    """
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    space = np.zeros((xa.shape[0], xb.shape[0]))
    for axis in range(xa.shape[1]):
        np.maximum(space, np.abs(xa[:, axis, None] - xb[None, :, axis]), out=space)
    time = np.sqrt(np.abs(np.asarray(ta, dtype=float)[:, None] - np.asarray(tb, dtype=float)[None, :]))
    return np.maximum(space, time)


def euclidean_distance_matrix(
    xa: np.ndarray,
    ta: np.ndarray,
    xb: np.ndarray,
    tb: np.ndarray,
) -> np.ndarray:
    """Calculate the Euclidean distance matrix in R^{n+1} (space and time on equal footing)."""
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    squared = (np.asarray(ta, dtype=float)[:, None] - np.asarray(tb, dtype=float)[None, :]) ** 2
    for axis in range(xa.shape[1]):
        squared = squared + (xa[:, axis, None] - xb[None, :, axis]) ** 2
    return np.sqrt(squared)


def max_abs_difference_matrix(fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
    """Max-norm of the difference between vector-valued samples.

    fa has shape (Na, m) and fb has shape (Nb, m); the result is (Na, Nb).
    """
    out = np.zeros((fa.shape[0], fb.shape[0]))
    for comp in range(fa.shape[1]):
        np.maximum(out, np.abs(fa[:, comp, None] - fb[None, :, comp]), out=out)
    return out

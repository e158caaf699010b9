"""Dense Gaussian elimination with partial pivoting."""

import numpy as np

from .errors import SingularSystem


def gauss_solve(A, b, pivot_tol=1e-13):
    """Solve ``A x = b`` for square ``A``; ``b`` may hold several columns.

    Rows are swapped to put the largest remaining entry of each column on
    the diagonal. Raises SingularSystem if a pivot falls below
    ``pivot_tol * max|A|``.
    """
    a = np.array(A, dtype=float)
    x = np.array(b, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix must be square, got {a.shape}")
    if x.shape[0] != n:
        raise ValueError(f"right-hand side has {x.shape[0]} rows, expected {n}")
    vec = x.ndim == 1
    if vec:
        x = x[:, None]
    scale = np.abs(a).max() if n else 0.0
    thresh = pivot_tol * max(scale, 1.0)

    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= thresh:
            raise SingularSystem(f"pivot {a[p, k]:.3e} in column {k} is numerically zero")
        if p != k:
            a[[k, p]] = a[[p, k]]
            x[[k, p]] = x[[p, k]]
        if k + 1 < n:
            lam = a[k + 1:, k] / a[k, k]
            a[k + 1:, k:] -= np.outer(lam, a[k, k:])
            x[k + 1:] -= np.outer(lam, x[k])

    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x[:, 0] if vec else x

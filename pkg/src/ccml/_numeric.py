"""Small shared numerical helpers."""

from __future__ import annotations

import numpy as np


def softmax_rows(exponents: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stabilized by subtracting each row's maximum.

    Invariant under adding a constant to a whole row; rows of the result are
    finite and sum to 1 for any finite input.
    """
    e = np.asarray(exponents, dtype=np.float64)
    shifted = e - e.max(axis=1, keepdims=True)
    p = np.exp(shifted)
    p /= p.sum(axis=1, keepdims=True)
    return p

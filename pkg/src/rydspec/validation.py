"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import numbers

import numpy as np

from .errors import ParameterError, ValidationError

HERMITIAN_ATOL = 1e-12


def check_positions(X, *, min_atoms: int = 1) -> np.ndarray:
    """Return ``X`` as a float ``(N, 3)`` array of finite coordinates.

    Two-column input is accepted and padded with ``z = 0``.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1 and arr.size == 3:
        arr = arr.reshape(1, 3)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ParameterError(f"positions must have shape (N, 2) or (N, 3), got {arr.shape}")
    if arr.shape[1] == 2:
        arr = np.column_stack([arr, np.zeros(len(arr))])
    if len(arr) < min_atoms:
        raise ParameterError(f"need at least {min_atoms} atoms, got {len(arr)}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("positions contain NaN or inf")
    return arr


def check_scalar(x, name: str, *, min_val=None, max_val=None, include_min=True, include_max=True) -> float:
    if isinstance(x, bool) or not isinstance(x, numbers.Real):
        raise ParameterError(f"{name} must be a real number, got {type(x).__name__}")
    x = float(x)
    if not np.isfinite(x):
        raise ParameterError(f"{name} must be finite, got {x}")
    if min_val is not None:
        if (x < min_val) or (not include_min and x == min_val):
            op = ">=" if include_min else ">"
            raise ParameterError(f"{name} must be {op} {min_val}, got {x}")
    if max_val is not None:
        if (x > max_val) or (not include_max and x == max_val):
            op = "<=" if include_max else "<"
            raise ParameterError(f"{name} must be {op} {max_val}, got {x}")
    return x


def check_probability(p, name: str) -> float:
    return check_scalar(p, name, min_val=0.0, max_val=1.0)


def check_hermitian(H, *, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Return ``H`` as a square complex array, raising if it is not Hermitian."""
    M = np.asarray(H)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix contains NaN or inf")
    dev = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if dev > atol:
        raise ValidationError(f"matrix is not Hermitian: max |H - H^dagger| = {dev:.3e}")
    return M.astype(complex, copy=False)


def frozen(a: np.ndarray) -> np.ndarray:
    """Return a read-only copy of ``a``."""
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out

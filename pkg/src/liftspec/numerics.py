"""Dense matrix kernels behind a backend-agnostic contract.

Every routine validates its input, raises the typed errors from
``liftspec.errors`` and reports tolerances relative to the matrix scale
(Frobenius norm) with an absolute floor of 1e-14.  LAPACK, reached
through numpy, supplies the actual factorizations; nothing else in the
package calls the backend directly for these operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLarge, NotHermitian, SingularMatrix

ABS_FLOOR = 1e-14
DENSE_EIG_CAP = 4096


def as_matrix(m, *, square: bool = False) -> np.ndarray:
    """Coerce input to a finite float64/complex128 matrix.

    Rejects NaN/Inf entries and, when ``square`` is set, non-square
    shapes.  Real input stays real so symmetric problems can use the
    faster real LAPACK paths.
    """
    a = np.asarray(m)
    if a.dtype.kind in "iub":
        a = a.astype(np.float64)
    elif a.dtype.kind == "f":
        a = a.astype(np.float64, copy=False)
    elif a.dtype.kind == "c":
        a = a.astype(np.complex128, copy=False)
    else:
        raise ValueError(f"unsupported dtype {a.dtype}")
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def frob(m) -> float:
    return float(np.linalg.norm(m))


@dataclass(frozen=True)
class HermitianEigResult:
    """Ascending real eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def min_singular_value(m) -> float:
    """Smallest singular value of a (possibly rectangular) matrix."""
    a = as_matrix(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def inv(m) -> np.ndarray:
    """Inverse of a square matrix, guarded against near-singularity.

    Raises SingularMatrix when the smallest singular value is at or
    below 1e-12 times the largest (plus the absolute floor).
    """
    a = as_matrix(m, square=True)
    if a.shape[0] == 0:
        return a.copy()
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= 1e-12 * s[0] + ABS_FLOOR:
        raise SingularMatrix(
            f"matrix is numerically singular (s_min={s[-1]:.3e}, s_max={s[0]:.3e})")
    return np.linalg.inv(a)


def hermitian_eig(m) -> HermitianEigResult:
    """Full eigendecomposition of a Hermitian matrix.

    The input must satisfy ||M - M*||_F <= 1e-10 * ||M||_F (absolute
    floor 1e-14); otherwise NotHermitian is raised.
    """
    a = as_matrix(m, square=True)
    scale = frob(a)
    dev = frob(a - a.conj().T)
    if dev > 1e-10 * scale + ABS_FLOOR:
        raise NotHermitian(
            f"matrix deviates from Hermitian by {dev:.3e} (scale {scale:.3e})")
    vals, vecs = np.linalg.eigh(a)
    return HermitianEigResult(eigenvalues=vals, eigenvectors=vecs)


def general_eig_dense(m) -> np.ndarray:
    """All eigenvalues of a general square matrix, dense path only.

    Capped at dimension 4096; results are sorted by (real, imag) so
    repeated runs give identical output.
    """
    a = as_matrix(m, square=True)
    if a.shape[0] > DENSE_EIG_CAP:
        raise DimensionTooLarge(
            f"dense eigensolver capped at {DENSE_EIG_CAP}, got {a.shape[0]}")
    vals = np.linalg.eigvals(a)
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]

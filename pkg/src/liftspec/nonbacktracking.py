"""Non-backtracking operator of a weighted lift and its quadratic pencil.

The operator acts on C^r (x) l2([n]) (x) C^d by
    (B v)(x, i) = sum_{j != star(i)} a_j v(sigma_i(x), j),
with flat index ((x*d) + i)*r + block.  It does not involve a_0.

Membership of lambda in the spectrum of B is equivalent to 0 lying in
the spectrum of the lift of the pencil weights at lambda, provided each
shift lambda^2 - a_{star(i)} a_i is invertible.
"""

from __future__ import annotations

import math

import numpy as np

from . import numerics
from .errors import DimensionMismatch, DimensionTooLarge, SingularShift
from .lift import DENSE_CAP, LiftOperator, _check_compatible
from .model import PermutationFamily, WeightSystem


class NBOperator:
    """Matrix-free non-backtracking action of a weighted lift."""

    def __init__(self, ws: WeightSystem, pf: PermutationFamily):
        _check_compatible(ws, pf)
        self.ws = ws
        self.pf = pf
        self.r = ws.r
        self.n = pf.n
        self.d = ws.d
        self.dim = pf.n * ws.d * ws.r
        self.subdim = (pf.n - 1) * ws.d * ws.r
        self._wT = np.ascontiguousarray(ws.weights.transpose(0, 2, 1))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected vector of length {self.dim}, got {v.shape}")
        n, d, r = self.n, self.d, self.r
        vb = v.reshape(n, d, r)
        # full color sum at every site, banned color subtracted per edge
        s = np.tensordot(vb, self._wT, axes=([1, 2], [0, 1]))
        out = np.empty((n, d, r), dtype=s.dtype)
        for i in range(d):
            y = self.pf.perms[i]
            k = self.ws.star[i]
            out[:, i, :] = s[y] - vb[y, k] @ self._wT[k]
        return out.reshape(self.dim)

    def project(self, v: np.ndarray) -> np.ndarray:
        """Projection onto vectors with zero mean over sites per (color, block)."""
        vb = np.asarray(v).reshape(self.n, self.d, self.r)
        return (vb - vb.mean(axis=0, keepdims=True)).reshape(self.dim)

    def dense(self) -> np.ndarray:
        if self.dim > DENSE_CAP:
            raise DimensionTooLarge(f"dense assembly capped at {DENSE_CAP}")
        n, d, r = self.n, self.d, self.r
        out = np.zeros((n, d, r, n, d, r), dtype=np.complex128)
        rows = np.arange(n)
        for i in range(d):
            y = self.pf.perms[i]
            for j in range(d):
                if j == self.ws.star[i]:
                    continue
                out[rows, i, :, y, j, :] = self.ws.weights[j]
        out = out.reshape(self.dim, self.dim)
        if np.abs(out.imag).max(initial=0.0) == 0.0:
            out = out.real.copy()
        return out

    def spectrum(self) -> np.ndarray:
        """All eigenvalues of the dense form, deterministically sorted."""
        return numerics.general_eig_dense(self.dense())


def pencil_weights(ws: WeightSystem, lam: complex) -> WeightSystem:
    """Weight system of the quadratic pencil evaluated at lam.

    The color weights become lam * a_i (lam^2 - a_{star(i)} a_i)^{-1} and
    the identity coefficient becomes
    -1 - sum_i a_i (lam^2 - a_{star(i)} a_i)^{-1} a_{star(i)}.
    lam lies in the spectrum of the non-backtracking operator exactly
    when the lift of this system is singular.
    """
    lam = complex(lam)
    r, d = ws.r, ws.d
    eye = np.eye(r)
    new_w = np.zeros((d, r, r), dtype=np.complex128)
    a0 = -eye.astype(np.complex128)
    for i in range(d):
        k = ws.star[i]
        shift = lam * lam * eye - ws.weights[k] @ ws.weights[i]
        sv = np.linalg.svd(shift, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0] + numerics.ABS_FLOOR:
            raise SingularShift(i, f"shift at color {i + 1} is singular")
        inv = np.linalg.inv(shift)
        new_w[i] = lam * ws.weights[i] @ inv
        a0 -= ws.weights[i] @ inv @ ws.weights[k]
    return WeightSystem(r=r, d=d, star=ws.star, a0=a0, weights=new_w)


def ihara_bass_residual(ws: WeightSystem, pf: PermutationFamily,
                        lam: complex) -> float:
    """Smallest singular value of the pencil lift at lam.

    Near zero exactly when lam is an eigenvalue of the non-backtracking
    operator of (ws, pf).
    """
    pw = pencil_weights(ws, lam)
    op = LiftOperator(pw, pf)
    return numerics.min_singular_value(op.dense())


def shifted_weight_system(ws: WeightSystem, branch: np.ndarray) -> WeightSystem:
    """Weights a_i g_i from per-color branch resolvent matrices.

    The non-backtracking operator of the result detects membership of
    the shift in the lift spectrum: the shift avoids the spectrum
    exactly when 1 avoids the spectrum of the shifted operator.
    """
    branch = np.asarray(branch, dtype=np.complex128)
    if branch.shape != (ws.d, ws.r, ws.r):
        raise DimensionMismatch(
            f"expected branch array of shape {(ws.d, ws.r, ws.r)}, got {branch.shape}")
    new_w = np.einsum("irs,ist->irt", ws.weights, branch)
    a0 = np.zeros((ws.r, ws.r), dtype=np.complex128)
    return WeightSystem(r=ws.r, d=ws.d, star=ws.star, a0=a0, weights=new_w)


def nb_radius_estimate(op: NBOperator, length: int = 40, trials: int = 8,
                       seed: int = 0) -> float:
    """Power-method growth rate of B on the zero-mean subspace.

    Runs a few independently seeded trials and keeps the largest
    per-step geometric mean of the norm growth.
    """
    if length < 1:
        raise ValueError("length must be positive")
    best = 0.0
    for t in range(trials):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([seed, t])))
        g = rng.standard_normal(op.dim)
        g = op.project(g)
        nrm = np.linalg.norm(g)
        if nrm == 0.0:
            continue
        g = g / nrm
        logsum = 0.0
        dead = False
        for _ in range(length):
            g = op.project(op.matvec(g))
            nrm = np.linalg.norm(g)
            if nrm <= 0.0:
                dead = True
                break
            logsum += math.log(nrm)
            g = g / nrm
        if not dead:
            best = max(best, math.exp(logsum / length))
    return best

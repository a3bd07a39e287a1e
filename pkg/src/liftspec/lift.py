"""Finite lift operators, their nontrivial spectra and spectral sets.

The lift operator acts on C^r (x) l2([n]) by
    (A v)(x) = a_0 v(x) + sum_i a_i v(sigma_i(x)).
Vectors are stored x-major with the block coordinate fastest, i.e. flat
index x*r + b.  The subspace spanned by constant vectors (block-wise) is
invariant; its orthogonal complement carries the nontrivial spectrum and
is what the eigensolvers here restrict to.

The tensored operator acts on C^r (x) l2([n]^2) through
sigma_i x sigma_i; there the invariant subspace is spanned block-wise by
the indicator of the diagonal and the indicator of its complement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import (DimensionMismatch, DimensionTooLarge, EmptySet,
                     NoConvergence, NotSelfAdjoint, ParseError)
from .model import PermutationFamily, WeightSystem, canonical_star

DENSE_CAP = 4096


def _check_compatible(ws: WeightSystem, pf: PermutationFamily) -> None:
    if ws.d != pf.d:
        raise DimensionMismatch(
            f"weight system has d={ws.d} colors, family has {pf.d}")
    if ws.star != canonical_star(pf.q, pf.d):
        raise DimensionMismatch(
            "weight-system involution does not match the family's canonical layout")


def _as_real_if_possible(m: np.ndarray) -> np.ndarray:
    if np.abs(m.imag).max(initial=0.0) == 0.0:
        return m.real.copy()
    return m


def helmert_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the complement of the constant vector in R^n.

    Column k (0-based) has k+1 leading entries 1/sqrt((k+1)(k+2)) and a
    single entry -(k+1)/sqrt((k+1)(k+2)) on the diagonal.
    """
    u = np.zeros((n, n - 1))
    for k in range(1, n):
        s = 1.0 / math.sqrt(k * (k + 1))
        u[:k, k - 1] = s
        u[k, k - 1] = -k * s
    return u


class LiftOperator:
    """Matrix-free action of a weight system through a sampled family."""

    def __init__(self, ws: WeightSystem, pf: PermutationFamily):
        _check_compatible(ws, pf)
        self.ws = ws
        self.pf = pf
        self.r = ws.r
        self.n = pf.n
        self.dim = ws.r * pf.n
        self.subdim = ws.r * (pf.n - 1)
        self._wT = np.ascontiguousarray(ws.weights.transpose(0, 2, 1))
        self._a0T = np.ascontiguousarray(ws.a0.T)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected vector of length {self.dim}, got {v.shape}")
        vb = v.reshape(self.n, self.r)
        out = vb @ self._a0T
        for i in range(self.ws.d):
            out += vb[self.pf.perms[i]] @ self._wT[i]
        return out.reshape(self.dim)

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection killing the block-wise constant part."""
        vb = np.asarray(v).reshape(self.n, self.r)
        return (vb - vb.mean(axis=0)).reshape(self.dim)

    def dense(self) -> np.ndarray:
        if self.dim > DENSE_CAP:
            raise DimensionTooLarge(f"dense assembly capped at {DENSE_CAP}")
        out = np.kron(np.eye(self.n), self.ws.a0)
        for i in range(self.ws.d):
            s = np.zeros((self.n, self.n))
            s[np.arange(self.n), self.pf.perms[i]] = 1.0
            out = out + np.kron(s, self.ws.weights[i])
        return _as_real_if_possible(out)

    def reduced_dense(self) -> np.ndarray:
        """The operator compressed to the nontrivial subspace.

        Uses the Helmert basis of the complement of the constant vector;
        the result is (r(n-1)) x (r(n-1)) and Hermitian for symmetric
        weights.
        """
        if self.dim > DENSE_CAP:
            raise DimensionTooLarge(
                f"dense spectrum capped at r*n <= {DENSE_CAP}, got {self.dim}")
        n, r = self.n, self.r
        u = helmert_basis(n)
        real = np.abs(self.ws.weights.imag).max(initial=0.0) == 0.0 and \
            np.abs(self.ws.a0.imag).max(initial=0.0) == 0.0
        dtype = np.float64 if real else np.complex128
        buf = np.zeros((n - 1, r, n - 1, r), dtype=dtype)
        eye_nm1 = np.eye(n - 1)
        a0 = self.ws.a0.real if real else self.ws.a0
        buf += eye_nm1[:, None, :, None] * a0[None, :, None, :]
        for i in range(self.ws.d):
            t = u.T @ u[self.pf.perms[i]]
            w = self.ws.weights[i].real if real else self.ws.weights[i]
            buf += t[:, None, :, None] * w[None, :, None, :]
        return buf.reshape((n - 1) * r, (n - 1) * r)


class TensorLiftOperator:
    """Action of the same weights through sigma_i x sigma_i on [n]^2."""

    def __init__(self, ws: WeightSystem, pf: PermutationFamily):
        _check_compatible(ws, pf)
        self.ws = ws
        self.pf = pf
        self.r = ws.r
        self.n = pf.n
        self.dim = ws.r * pf.n * pf.n
        self.subdim = ws.r * (pf.n * pf.n - 2)
        self._wT = np.ascontiguousarray(ws.weights.transpose(0, 2, 1))
        self._a0T = np.ascontiguousarray(ws.a0.T)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected vector of length {self.dim}, got {v.shape}")
        n, r = self.n, self.r
        vb = v.reshape(n, n, r)
        out = vb @ self._a0T
        for i in range(self.ws.d):
            p = self.pf.perms[i]
            out += vb[np.ix_(p, p)] @ self._wT[i]
        return out.reshape(self.dim)

    def project(self, v: np.ndarray) -> np.ndarray:
        """Remove the block-wise span of the diagonal and off-diagonal indicators."""
        n, r = self.n, self.r
        vb = np.asarray(v).reshape(n, n, r).copy()
        idx = np.arange(n)
        diag = vb[idx, idx, :]
        diag_mean = diag.mean(axis=0)
        total = vb.sum(axis=(0, 1))
        if n > 1:
            off_mean = (total - diag.sum(axis=0)) / (n * n - n)
        else:
            off_mean = np.zeros(r, dtype=vb.dtype)
        vb -= off_mean
        vb[idx, idx, :] += off_mean - diag_mean
        return vb.reshape(self.dim)

    def dense(self) -> np.ndarray:
        if self.dim > DENSE_CAP:
            raise DimensionTooLarge(f"dense assembly capped at {DENSE_CAP}")
        n = self.n
        out = np.kron(np.eye(n * n), self.ws.a0)
        for i in range(self.ws.d):
            s = np.zeros((n, n))
            s[np.arange(n), self.pf.perms[i]] = 1.0
            out = out + np.kron(np.kron(s, s), self.ws.weights[i])
        return _as_real_if_possible(out)


@dataclass(frozen=True)
class ExtremeEigs:
    """Certified extreme eigenvalues of a self-adjoint restricted operator."""

    largest: np.ndarray
    smallest: np.ndarray
    largest_residuals: np.ndarray
    smallest_residuals: np.ndarray
    iterations: int


def extreme_eigs(op, k: int = 1, tol: float = 1e-8, seed: int = 0,
                 max_iter: int | None = None) -> ExtremeEigs:
    """Lanczos with projection for the k extreme nontrivial eigenvalues.

    The start vector and every Krylov vector are projected back into the
    nontrivial subspace, with full reorthogonalization against the basis
    built so far.  Each returned eigenvalue carries a residual
    certificate ||A v - lambda v|| <= tol for its Ritz vector.
    """
    if not op.ws.is_symmetric:
        raise NotSelfAdjoint("extreme eigenvalues need a symmetric weight system")
    subdim = op.subdim
    if subdim < 1:
        raise EmptySet("operator has no nontrivial subspace")
    k = min(k, subdim)
    if max_iter is None:
        max_iter = min(subdim, max(400, int(20 * k * math.log(max(op.dim, 3)))))
    else:
        max_iter = min(max_iter, subdim)
    rng = np.random.Generator(np.random.PCG64(seed))

    def fresh_vector(basis):
        for _ in range(8):
            w = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
            w = op.project(w)
            for b in basis:
                w -= b * np.vdot(b, w)
            nrm = np.linalg.norm(w)
            if nrm > 1e-8:
                return w / nrm
        raise NoConvergence("could not draw a vector in the nontrivial subspace")

    basis: list[np.ndarray] = []
    alphas: list[float] = []
    betas: list[float] = []
    v = fresh_vector(basis)
    scale = 0.0
    from scipy.linalg import eigh_tridiagonal

    def ritz(alphas, betas):
        return eigh_tridiagonal(np.asarray(alphas), np.asarray(betas))

    it = 0
    while True:
        basis.append(v)
        w = op.project(op.matvec(v))
        alpha = float(np.vdot(v, w).real)
        w -= alpha * v
        if betas and betas[-1] != 0.0:
            w -= betas[-1] * basis[-2]
        bm = np.stack(basis)
        w -= bm.T @ (bm.conj() @ w)
        alphas.append(alpha)
        scale = max(scale, abs(alpha), betas[-1] if betas else 0.0)
        beta = float(np.linalg.norm(w))
        it += 1
        exhausted = len(basis) >= subdim
        check = exhausted or it >= max_iter or \
            (it >= 2 * k and beta <= max(scale, 1.0) * 1e-13) or \
            (it >= 2 * k and it % max(8, k) == 0)
        if check:
            theta, y = ritz(alphas, betas)
            lo = min(k, len(theta))
            sel = list(range(lo)) + list(range(len(theta) - lo, len(theta)))
            bound = beta * np.abs(y[-1, sel])
            if exhausted or it >= max_iter or bound.max() <= 0.5 * tol or \
                    beta <= max(scale, 1.0) * 1e-13:
                vecs = np.stack(basis, axis=1) @ y[:, sel]
                res = np.empty(len(sel))
                for j in range(vecs.shape[1]):
                    x = vecs[:, j]
                    x /= np.linalg.norm(x)
                    res[j] = np.linalg.norm(op.matvec(x) - theta[sel[j]] * x)
                if res.max() <= tol or exhausted:
                    low = theta[:lo]
                    high = theta[len(theta) - lo:]
                    return ExtremeEigs(
                        largest=high[::-1].copy(),
                        smallest=low.copy(),
                        largest_residuals=res[lo:][::-1].copy(),
                        smallest_residuals=res[:lo].copy(),
                        iterations=it)
                if it >= max_iter:
                    raise NoConvergence(
                        f"Lanczos residual {res.max():.3e} above {tol:.3e}",
                        iterations=it, residual=float(res.max()))
        if beta <= max(scale, 1.0) * 1e-13:
            v = fresh_vector(basis)
            betas.append(0.0)
        else:
            v = w / beta
            betas.append(beta)


def dense_spectrum(op: LiftOperator) -> "SpectralSet":
    """Every nontrivial eigenvalue, as a finite multiset."""
    if not op.ws.is_symmetric:
        raise NotSelfAdjoint("dense spectrum needs a symmetric weight system")
    m = op.reduced_dense()
    vals = numerics.hermitian_eig(m).eigenvalues
    return SpectralSet.from_points(vals)


@dataclass(frozen=True)
class SpectralSet:
    """Closed subset of R: disjoint intervals plus isolated points.

    A finite multiset is represented with no intervals and repeated
    points allowed; isolated points never lie inside an interval.
    """

    intervals: tuple[tuple[float, float], ...] = ()
    points: tuple[float, ...] = ()

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        pts = tuple(sorted(float(p) for p in self.points))
        for a, b in ivs:
            if not (math.isfinite(a) and math.isfinite(b) and a <= b):
                raise ValueError(f"bad interval ({a}, {b})")
        for a, b in zip(ivs, ivs[1:]):
            if a[1] >= b[0]:
                raise ValueError("intervals must be disjoint and sorted")
        for p in pts:
            if not math.isfinite(p):
                raise ValueError("points must be finite")
            for a, b in ivs:
                if a < p < b:
                    raise ValueError(f"point {p} lies inside interval ({a}, {b})")
        object.__setattr__(self, "intervals", ivs)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, pts) -> "SpectralSet":
        return cls(intervals=(), points=tuple(float(p) for p in pts))

    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.points

    def bounds(self) -> tuple[float, float]:
        if self.is_empty:
            raise EmptySet("empty spectral set has no bounds")
        lo = math.inf
        hi = -math.inf
        for a, b in self.intervals:
            lo, hi = min(lo, a), max(hi, b)
        for p in self.points:
            lo, hi = min(lo, p), max(hi, p)
        return lo, hi

    def distance(self, x: float) -> float:
        """Distance from the point x to the set."""
        if self.is_empty:
            raise EmptySet("empty spectral set")
        best = math.inf
        for a, b in self.intervals:
            if x < a:
                best = min(best, a - x)
            elif x > b:
                best = min(best, x - b)
            else:
                return 0.0
        for p in self.points:
            best = min(best, abs(x - p))
        return best

    def to_json(self) -> dict:
        return {"intervals": [[a, b] for a, b in self.intervals],
                "points": list(self.points)}

    @classmethod
    def from_json(cls, doc) -> "SpectralSet":
        if not isinstance(doc, dict):
            raise ParseError("spectral set document must be an object")
        try:
            return cls(intervals=tuple((float(a), float(b))
                                       for a, b in doc.get("intervals", [])),
                       points=tuple(float(p) for p in doc.get("points", [])))
        except (TypeError, ValueError) as e:
            raise ParseError(f"malformed spectral set: {e}") from None

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SpectralSet":
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None
        return cls.from_json(doc)


def _breakpoints(s: SpectralSet) -> list[float]:
    out = []
    for a, b in s.intervals:
        out.extend((a, b))
    out.extend(s.points)
    return sorted(set(out))


def _directed_hausdorff(s: SpectralSet, t: SpectralSet) -> float:
    # sup over s of dist(s, t): the distance function is piecewise linear,
    # so it peaks at endpoints of s or at midpoints of t-gaps inside an
    # s-interval.
    cands = list(_breakpoints(s))
    bks = _breakpoints(t)
    for u, v in zip(bks, bks[1:]):
        mid = 0.5 * (u + v)
        for a, b in s.intervals:
            if a <= mid <= b:
                cands.append(mid)
                break
    return max(t.distance(c) for c in cands)


def hausdorff(s: SpectralSet, t: SpectralSet) -> float:
    """Exact Hausdorff distance between two spectral sets."""
    if s.is_empty or t.is_empty:
        raise EmptySet("Hausdorff distance needs non-empty sets")
    return max(_directed_hausdorff(s, t), _directed_hausdorff(t, s))

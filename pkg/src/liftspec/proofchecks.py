"""Exact-arithmetic side checks.

Two small verifiers live here: a closed-form mean of a signed falling
product over a binomial draw, whose magnitude bound only holds in an
explicitly flagged parameter regime, and a positivity check that the
leading eigenvector of a completely positive block map is a positive
state.  The first runs in exact rational arithmetic whenever sqrt(q)
is rational, so a violation cannot hide behind roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .freelimit import CPBlockMap


def _exact_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def _as_fraction(x) -> Fraction | None:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return None


def signed_product_mean(p, q, z, k: int):
    """Mean of (-1)^T prod_{n=0}^{2T-1} (q^{-1/2} - z n), T ~ Binomial(k, p).

    Exact Fraction arithmetic is used when p, q, z are Fractions or
    ints and sqrt(q) is rational; otherwise the sum is evaluated in
    floats with compensated summation and an overflow guard.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not 0 <= float(p) <= 1:
        raise ValueError("p must lie in [0, 1]")
    if float(q) <= 0:
        raise ValueError("q must be positive")
    pf, qf, zf = _as_fraction(p), _as_fraction(q), _as_fraction(z)
    if pf is not None and qf is not None and zf is not None:
        s = _exact_sqrt(1 / qf)
        if s is not None:
            total = Fraction(0)
            prod = Fraction(1)
            for t in range(k + 1):
                total += (math.comb(k, t) * pf ** t * (1 - pf) ** (k - t)
                          * (-1) ** t * prod)
                prod *= (s - zf * (2 * t)) * (s - zf * (2 * t + 1))
            return total
    p, q, z = float(p), float(q), float(z)
    s = 1.0 / math.sqrt(q)
    worst = sum(math.log(max(abs(s - z * n), 1.0)) for n in range(2 * k))
    if worst + k * math.log(max(2.0 * k, 2.0)) > math.log(1e300):
        raise OverflowError("signed product exceeds float range; use Fractions")
    terms = []
    prod = 1.0
    for t in range(k + 1):
        terms.append(math.comb(k, t) * p ** t * (1.0 - p) ** (k - t)
                     * (-1.0) ** t * prod)
        prod *= (s - z * (2 * t)) * (s - z * (2 * t + 1))
    return math.fsum(terms)


def signed_product_small_regime(p, q, z, k: int) -> bool:
    """Flag for the parameter regime where the magnitude bound is asserted.

    Requires 4 L^4 <= z^2 k^4 q and 16 z^2 k^4 q <= 1 with
    L = 1 - p - p/q, evaluated exactly for rational inputs.
    """
    if k < 1:
        return False
    pf, qf, zf = _as_fraction(p), _as_fraction(q), _as_fraction(z)
    if pf is None or qf is None or zf is None:
        pf, qf, zf = Fraction(float(p)), Fraction(float(q)), Fraction(float(z))
    big_l = 1 - pf - pf / qf
    lhs = 4 * big_l ** 4
    mid = zf ** 2 * k ** 4 * qf
    return lhs <= mid and 16 * mid <= 1


def signed_product_bound_sq(q, z, k: int):
    """Square of the asserted magnitude bound, 64 (18 z k^2 sqrt(q))^k.

    Exact when sqrt(q) is rational.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    qf, zf = _as_fraction(q), _as_fraction(z)
    if qf is not None and zf is not None:
        s = _exact_sqrt(qf)
        if s is not None:
            return 64 * (18 * zf * k ** 2 * s) ** k
    return 64.0 * (18.0 * float(z) * k ** 2 * math.sqrt(float(q))) ** k


def signed_product_bound(q, z, k: int) -> float:
    """Float form of the magnitude bound, 8 (3 sqrt(2 z) k q^(1/4))^k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return 8.0 * (3.0 * math.sqrt(2.0 * float(z)) * k * float(q) ** 0.25) ** k


@dataclass(frozen=True)
class SignedProductCheck:
    """Outcome of one signed-product bound evaluation."""

    flagged: bool
    mean: object
    bound_sq: object
    holds: bool | None


def signed_product_check(p, q, z, k: int) -> SignedProductCheck:
    """Evaluate the mean and, in the flagged regime, the bound mean^2 <= bound_sq."""
    flagged = signed_product_small_regime(p, q, z, k)
    mean = signed_product_mean(p, q, z, k)
    bound_sq = signed_product_bound_sq(q, z, k)
    holds = None
    if flagged:
        holds = bool(mean * mean <= bound_sq)
    return SignedProductCheck(flagged=flagged, mean=mean,
                              bound_sq=bound_sq, holds=holds)


@dataclass(frozen=True)
class ConeCheck:
    """Leading spectral data of a completely positive block map."""

    radius: float
    min_eigenvalue: float
    hermiticity_defect: float


def krein_rutman_check(bmap: CPBlockMap) -> ConeCheck:
    """Verify the leading eigenvector of the map is a positive block state.

    Diagonalizes the dense matricization, takes an eigenvector of
    maximal eigenvalue magnitude, removes the free global phase via its
    total trace, and reports the most negative eigenvalue over the
    hermitized blocks together with the hermiticity defect.  Both are
    zero up to roundoff when the cone structure holds.
    """
    m = bmap.matricize()
    vals, vecs = np.linalg.eig(m)
    pick = int(np.argmax(np.abs(vals)))
    radius = float(np.abs(vals[pick]))
    blocks = vecs[:, pick].reshape(bmap.d, bmap.r, bmap.r)
    nrm = np.linalg.norm(blocks)
    if nrm > 0:
        blocks = blocks / nrm
    tr = complex(np.trace(blocks, axis1=1, axis2=2).sum())
    if abs(tr) > 1e-12:
        blocks = blocks * (tr.conjugate() / abs(tr))
    herm = blocks.conj().transpose(0, 2, 1)
    defect = float(np.linalg.norm(blocks - herm, axis=(1, 2)).max())
    sym = 0.5 * (blocks + herm)
    min_eig = float(min(np.linalg.eigvalsh(sym[i]).min()
                        for i in range(bmap.d)))
    return ConeCheck(radius=radius, min_eigenvalue=min_eig,
                     hermiticity_defect=defect)

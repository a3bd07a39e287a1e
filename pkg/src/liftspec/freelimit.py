"""Limiting spectrum of a weight system on its infinite symmetric cover.

Everything here is built from two coupled objects evaluated at a shift
z with positive imaginary part:

* per-color branch resolvents g_i solving
      g_i = (z - a_0 - sum_{j != star(i)} a_j g_j a_{star(j)})^{-1},
  selected by the Herglotz condition Im(-g_i) >= 0;
* the root resolvent obtained by the same formula with the full color
  sum, whose normalized imaginary trace gives the local density.

Membership of a real shift mu in the limiting spectrum is decided by a
completely positive map assembled from the shifted weights a_i g_i: mu
belongs to the spectrum exactly when that map has spectral radius at
least one.  Isolated atoms carry no growth in the map when no color
survives, so a mass diagnostic eta * (-Im tr root)/r is kept alongside.

The continuation solver tracks the fixed point from Im z = 1 down to
the requested height, halving the height each stage and warm-starting
from the previous solution.  Plain damped iteration stalls when the
linearized map has an eigenvalue near the unit circle, which happens
inside the bulk at small heights, so every few steps the solver fits
the dominant error mode from three consecutive iterates and jumps to
the extrapolated limit when that strictly reduces the residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DepthTooLarge, DimensionMismatch, EmptySet,
                     NoConvergence)
from .lift import SpectralSet
from .model import WeightSystem

ETA_DEFAULT = 1e-5
RHO_TOL_DEFAULT = 1e-3
ATOM_TOL_DEFAULT = 1e-2
MOMENT_WORD_CAP = 2_000_000


@dataclass(frozen=True)
class TreeResolvent:
    """Branch and root resolvents of a weight system at one shift."""

    z: complex
    branch: np.ndarray
    root: np.ndarray
    residual: float
    iterations: int
    converged: bool


def _eta_schedule(eta: float, eta_start: float = 1.0) -> list[float]:
    if eta >= eta_start:
        return [eta]
    out = []
    e = eta_start
    while e > eta * (1.0 + 1e-12):
        out.append(e)
        e *= 0.5
    out.append(eta)
    return out


def _apply_fixed_point(w, wstar, star_idx, a0, eye, z, gam):
    # w, wstar: (d,r,r); z: (N,); gam: (N,d,r,r)
    t = (w[None] @ gam) @ wstar[None]
    s = t.sum(axis=1)
    denom = z[:, None, None, None] * eye - a0 - s[:, None] + t[:, star_idx]
    if w.shape[1] == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / denom, t
    return np.linalg.inv(denom), t


def _residual(gam, f):
    if gam.shape[1] == 0:
        return np.zeros(gam.shape[0])
    diff = f - gam
    q = (diff.real * diff.real + diff.imag * diff.imag).sum(axis=(2, 3))
    return np.sqrt(q.max(axis=1))


def _stage_iterate(w, wstar, star_idx, a0, eye, z, gam, tol, max_iter):
    """Damped fixed-point pass at one height for a batch of shifts.

    Converged points are frozen and removed from the working set.  The
    extrapolation cycle fits gam_{k+1} - gam_k = m (gam_k - gam_{k-1})
    per point and is only accepted where it strictly lowers the
    residual.
    """
    n_all = z.shape[0]
    gam_out = gam.copy()
    res_out = np.zeros(n_all)
    iters_out = np.zeros(n_all, dtype=np.int64)
    if n_all == 0 or gam.shape[1] == 0:
        return gam_out, res_out, iters_out
    idx = np.arange(n_all)
    g = gam.copy()
    zz = z.copy()
    alpha = np.full(n_all, 1.0)
    prev_res = np.full(n_all, np.inf)
    gm1 = None
    gm2 = None
    for k in range(max_iter):
        f, _ = _apply_fixed_point(w, wstar, star_idx, a0, eye, zz, g)
        res = _residual(g, f)
        iters_out[idx] += 1
        bad = ~np.isfinite(res)
        res = np.where(bad, np.inf, res)
        done = res <= tol
        if done.any():
            gam_out[idx[done]] = f[done]
            res_out[idx[done]] = res[done]
            keep = ~done
            if not keep.any():
                return gam_out, res_out, iters_out
            idx, zz, g, f, res = idx[keep], zz[keep], g[keep], f[keep], res[keep]
            alpha, prev_res = alpha[keep], prev_res[keep]
            if gm1 is not None:
                gm1 = gm1[keep]
            if gm2 is not None:
                gm2 = gm2[keep]
        worse = res > prev_res * (1.0 + 1e-12)
        alpha[worse] = np.maximum(alpha[worse] * 0.5, 0.05)
        prev_res = res
        g_new = g + alpha[:, None, None, None] * (f - g)
        if k % 6 == 5 and gm2 is not None:
            d1 = (gm1 - gm2).reshape(len(idx), -1)
            d2 = (g - gm1).reshape(len(idx), -1)
            num = (d2 * d1.conj()).sum(axis=1)
            den = (d1 * d1.conj()).sum(axis=1).real
            with np.errstate(divide="ignore", invalid="ignore"):
                m = np.where(den > 0, num / den, 0.0)
            usable = np.isfinite(m) & (np.abs(m) < 1.0 - 1e-9) \
                & (np.abs(1.0 - m) > 1e-9)
            if usable.any():
                shape = (len(idx),) + (1,) * (g.ndim - 1)
                fac = np.where(usable, m / (1.0 - m), 0.0).reshape(shape)
                cand = g + (g - gm1) * fac
                try:
                    fc, _ = _apply_fixed_point(w, wstar, star_idx, a0, eye, zz, cand)
                    resc = _residual(cand, fc)
                    better = usable & np.isfinite(resc) & (resc < res * 0.9)
                    if better.any():
                        g_new[better] = fc[better]
                        prev_res[better] = resc[better]
                except np.linalg.LinAlgError:
                    pass
        gm2 = gm1
        gm1 = g
        g = g_new
    res_out[idx] = prev_res
    gam_out[idx] = g
    return gam_out, res_out, iters_out


def _solve_batch(ws: WeightSystem, mus: np.ndarray, eta: float,
                 tol: float, max_iter: int, eta_start: float = 1.0):
    """Continuation solve at mu + i*eta for every mu; returns
    (branch, root, residual, iterations, converged)."""
    mus = np.asarray(mus, dtype=np.float64)
    n = mus.shape[0]
    d, r = ws.d, ws.r
    eye = np.eye(r, dtype=np.complex128)
    a0 = ws.a0
    w = ws.weights
    star_idx = np.asarray(ws.star, dtype=np.intp)
    wstar = w[star_idx] if d else w
    sched = _eta_schedule(eta, eta_start)
    z = mus + 1j * sched[0]
    gam = np.broadcast_to(eye, (n, d, r, r)) / z[:, None, None, None] \
        if d else np.zeros((n, 0, r, r), dtype=np.complex128)
    gam = np.ascontiguousarray(gam)
    iters = np.zeros(n, dtype=np.int64)
    res = np.zeros(n)
    for si, et in enumerate(sched):
        z = mus + 1j * et
        stage_tol = tol if si == len(sched) - 1 else max(tol, 1e-2 * sched[si + 1])
        gam, res, its = _stage_iterate(w, wstar, star_idx, a0, eye, z, gam,
                                       stage_tol, max_iter)
        iters += its
    converged = res <= tol
    if d:
        t = (w[None] @ gam) @ wstar[None]
        denom = z[:, None, None] * eye - a0 - t.sum(axis=1)
    else:
        denom = z[:, None, None] * eye - a0
    root = np.linalg.inv(denom)
    return gam, root, res, iters, converged


def solve_resolvent(ws: WeightSystem, z: complex, tol: float = 1e-9,
                    max_iter: int = 2000, eta_start: float = 1.0) -> TreeResolvent:
    """Branch and root resolvents at a single shift with Im z > 0.

    Shifts below the starting height are reached by geometric
    continuation in the imaginary part; max_iter caps each stage.  The
    converged flag reports whether the final-stage residual met tol.
    """
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("shift must have positive imaginary part")
    gam, root, res, iters, conv = _solve_batch(
        ws, np.array([z.real]), z.imag, tol, max_iter, eta_start=eta_start)
    return TreeResolvent(z=z, branch=gam[0], root=root[0],
                         residual=float(res[0]), iterations=int(iters[0]),
                         converged=bool(conv[0]))


def herglotz_margin(res: TreeResolvent) -> float:
    """Smallest eigenvalue of Im(-M) over branch and root matrices.

    Nonnegative (up to roundoff) for the physically selected solution.
    """
    mats = [res.branch[i] for i in range(res.branch.shape[0])] + [res.root]
    worst = math.inf
    for m in mats:
        h = (m - m.conj().T) * (0.5j)
        worst = min(worst, float(np.linalg.eigvalsh(h).min()))
    return worst


def branch_root_identity_residual(ws: WeightSystem, res: TreeResolvent) -> float:
    """Mismatch of a_i root = (a_i g_i)(1 - a_{star(i)} g_{star(i)} a_i g_i)^{-1}.

    A closed-form consequence of the fixed point; useful as an
    independent consistency check of a solved resolvent.
    """
    worst = 0.0
    eye = np.eye(ws.r)
    shifted = ws.weights @ res.branch
    for i in range(ws.d):
        k = ws.star[i]
        lhs = ws.weights[i] @ res.root
        rhs = shifted[i] @ np.linalg.inv(eye - shifted[k] @ shifted[i])
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


class CPBlockMap:
    """Completely positive map on per-color blocks.

    Acts on a stack x of d matrices of size r by
        (L x)_i = sum_{j != star(i)} b_j x_j b_j^*.
    Its spectral radius squares to the growth rate of non-backtracking
    weighted walks with the given step matrices.
    """

    def __init__(self, blocks: np.ndarray, star: tuple[int, ...]):
        blocks = np.asarray(blocks, dtype=np.complex128)
        if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
            raise DimensionMismatch(
                f"expected (d, r, r) block stack, got {blocks.shape}")
        if len(star) != blocks.shape[0]:
            raise DimensionMismatch("involution length does not match blocks")
        for i, k in enumerate(star):
            if not 0 <= k < len(star) or star[k] != i:
                raise DimensionMismatch("star map must be an involution")
        self.blocks = blocks
        self.star = tuple(int(i) for i in star)
        self.d = blocks.shape[0]
        self.r = blocks.shape[1]
        self._star_idx = np.asarray(self.star, dtype=np.intp)
        self._bh = np.ascontiguousarray(blocks.conj().transpose(0, 2, 1))

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.d, self.r, self.r):
            raise DimensionMismatch(
                f"expected state of shape {(self.d, self.r, self.r)}, got {x.shape}")
        return self.apply_batch(x[None])[0]

    def apply_batch(self, x: np.ndarray) -> np.ndarray:
        t = (self.blocks[None] @ x) @ self._bh[None]
        return t.sum(axis=1)[:, None] - t[:, self._star_idx]

    def matricize(self) -> np.ndarray:
        """Dense matrix of the map on stacked row-major vectorized blocks."""
        d, r = self.d, self.r
        out = np.zeros((d * r * r, d * r * r), dtype=np.complex128)
        kr = [np.kron(self.blocks[j], self.blocks[j].conj()) for j in range(d)]
        for i in range(d):
            for j in range(d):
                if j == self.star[i]:
                    continue
                out[i * r * r:(i + 1) * r * r, j * r * r:(j + 1) * r * r] = kr[j]
        return out


def _identity_state(n: int, d: int, r: int) -> np.ndarray:
    x = np.zeros((n, d, r, r), dtype=np.complex128)
    x[:, :, np.arange(r), np.arange(r)] = 1.0
    nrm = math.sqrt(d * r) if d else 1.0
    return x / nrm


def _aitken_scalar(r0, r1, r2):
    d1, d2 = r1 - r0, r2 - r1
    den = d2 - d1
    with np.errstate(divide="ignore", invalid="ignore"):
        cand = r2 - d2 * d2 / den
    good = np.isfinite(cand) & (np.abs(den) > 1e-30)
    return np.where(good, cand, r2)


_DENSE_RESCUE_CAP = 2048


def _dense_cp_radius(blocks: np.ndarray, star: tuple[int, ...]) -> float:
    m = CPBlockMap(np.asarray(blocks, dtype=np.complex128), star).matricize()
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def _cp_radius_batch(blocks: np.ndarray, star: tuple[int, ...],
                     tol: float = 1e-7, max_iter: int = 2000,
                     state_tol: float = 1e-5):
    """Power-method spectral radii for a batch of block stacks.

    Ratios are combined pairwise by geometric mean so that sign-paired
    peripheral spectra (which make the raw ratio oscillate with period
    two) still settle.  Returns (rho, ok); ok marks points whose
    iterate drifted less than state_tol over two steps, so the value is
    backed by an approximate eigenstate of the doubled map.  Points
    that never certify keep their last extrapolated estimate and should
    be recomputed by a dense route.
    """
    blocks = np.asarray(blocks, dtype=np.complex128)
    n, d, r, _ = blocks.shape
    rho = np.zeros(n)
    ok = np.zeros(n, dtype=bool)
    if n == 0:
        return rho, ok
    if d == 0:
        ok[:] = True
        return rho, ok
    star_idx = np.asarray(star, dtype=np.intp)
    idx = np.arange(n)
    bb = blocks
    bh = np.ascontiguousarray(blocks.conj().transpose(0, 1, 3, 2))
    x = _identity_state(n, d, r)
    xm2 = x
    xm1 = x
    prev_nrm = np.zeros(n)
    est = np.zeros((3, n))
    k = 0
    while idx.size and k < max_iter:
        t = (bb @ x) @ bh
        y = t.sum(axis=1)[:, None] - t[:, star_idx]
        nrm = np.sqrt((y.real * y.real + y.imag * y.imag).sum(axis=(1, 2, 3)))
        zero = nrm <= 1e-300
        safe = np.where(zero, 1.0, nrm)
        xk = y / safe[:, None, None, None]
        gm = np.sqrt(nrm * prev_nrm)
        diff = xk - xm2
        drift = np.sqrt((diff.real * diff.real +
                         diff.imag * diff.imag).sum(axis=(1, 2, 3)))
        flat = ((np.abs(gm - est[2]) <= tol * np.maximum(gm, 1.0)) &
                (np.abs(gm - est[1]) <= 10.0 * tol * np.maximum(gm, 1.0)))
        settled = zero | ((k >= 12) & flat & (drift <= state_tol))
        k += 1
        if settled.any():
            val = np.where(zero, 0.0, _aitken_scalar(est[1], est[2], gm))
            rho[idx[settled]] = np.maximum(val[settled], 0.0)
            ok[idx[settled]] = True
            keep = ~settled
            if not keep.any():
                return rho, ok
            idx = idx[keep]
            bb, bh = bb[keep], bh[keep]
            xk, xm1 = xk[keep], xm1[keep]
            nrm, gm = nrm[keep], gm[keep]
            est = est[:, keep]
        prev_nrm = nrm
        est[0] = est[1]
        est[1] = est[2]
        est[2] = gm
        xm2 = xm1
        xm1 = xk
        x = xk
    if idx.size:
        rho[idx] = np.maximum(_aitken_scalar(est[0], est[1], est[2]), 0.0)
    return rho, ok


def cp_radius(bmap: CPBlockMap, tol: float = 1e-10,
              max_iter: int = 20000) -> float:
    """Spectral radius of the map, from the normalized identity state.

    Power iteration with pairwise-geometric-mean ratio estimates; when
    the iterate fails to certify (rotating peripheral spectrum, severe
    transients near resolvent poles) the radius is recomputed from the
    dense matricization instead, provided its dimension stays within
    the rescue cap.
    """
    rho, ok = _cp_radius_batch(bmap.blocks[None], bmap.star, tol=tol,
                               max_iter=max_iter)
    if ok[0]:
        return float(rho[0])
    dim = bmap.blocks.shape[0] * bmap.blocks.shape[1] ** 2
    if dim > _DENSE_RESCUE_CAP:
        raise NoConvergence("power iteration did not certify a radius",
                            iterations=max_iter, residual=float("nan"))
    return _dense_cp_radius(bmap.blocks, bmap.star)


def shifted_blocks(ws: WeightSystem, branch: np.ndarray) -> np.ndarray:
    """Per-color products a_i g_i feeding the membership map."""
    branch = np.asarray(branch, dtype=np.complex128)
    if branch.shape != ws.weights.shape:
        raise DimensionMismatch(
            f"expected branch of shape {ws.weights.shape}, got {branch.shape}")
    return ws.weights @ branch


def limit_nb_radius(ws: WeightSystem, mu: float, eta: float = ETA_DEFAULT,
                    tol: float = 1e-8, max_iter: int = 2000,
                    cp_tol: float = 1e-10, cp_max_iter: int = 20000) -> float:
    """Spectral radius of the shifted non-backtracking family at mu + i*eta.

    Values at least one signal membership of mu in the limiting
    spectrum; the quantity decays strictly below one away from it.
    """
    res = solve_resolvent(ws, mu + 1j * eta, tol=tol, max_iter=max_iter)
    if not res.converged:
        raise NoConvergence(
            f"resolvent continuation stalled at residual {res.residual:.3e}",
            iterations=res.iterations, residual=res.residual)
    if ws.d == 0:
        return 0.0
    rho = cp_radius(CPBlockMap(shifted_blocks(ws, res.branch), ws.star),
                    tol=cp_tol, max_iter=cp_max_iter)
    return math.sqrt(max(rho, 0.0))


def nb_radius_sequence(ws: WeightSystem, count: int = 12) -> np.ndarray:
    """Normalized trace growth estimates of the free walk radius.

    Entry m (1-based) is (tr L^m(identity state) / (d r))^(1/(2m)) for
    the completely positive map built from the raw weights; the
    sequence converges to the limiting non-backtracking radius from
    above for nonnegative structures and is exact for regular unit
    weights.
    """
    if count < 1:
        raise ValueError("count must be positive")
    d, r = ws.d, ws.r
    out = np.zeros(count)
    if d == 0:
        return out
    bmap = CPBlockMap(ws.weights, ws.star)
    x = np.zeros((d, r, r), dtype=np.complex128)
    x[:, np.arange(r), np.arange(r)] = 1.0
    logtr = 0.0
    for m in range(1, count + 1):
        x = bmap.apply(x)
        t = float(np.trace(x, axis1=1, axis2=2).sum().real)
        if t <= 0.0:
            return out
        logtr += math.log(t / (d * r))
        out[m - 1] = math.exp(logtr / (2 * m))
        x = x / (t / (d * r))
    return out


@dataclass(frozen=True)
class MembershipBatch:
    """Per-shift diagnostics from a batched membership evaluation."""

    mu: np.ndarray
    member: np.ndarray
    rho: np.ndarray
    im_tr_root: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    converged: np.ndarray


def membership_batch(ws: WeightSystem, mus, eta: float = ETA_DEFAULT,
                     rho_tol: float = RHO_TOL_DEFAULT,
                     atom_tol: float = ATOM_TOL_DEFAULT,
                     tol: float = 1e-7, max_iter: int = 1500,
                     cp_tol: float = 1e-7, cp_max_iter: int = 2000) -> MembershipBatch:
    """Evaluate spectrum membership at many real shifts at once.

    A shift is a member when the shifted walk radius reaches 1 - rho_tol
    or the mass diagnostic eta*(-Im tr root)/r reaches atom_tol.  Shifts
    where the continuation failed to converge fall back to the root
    diagnostics alone (mass, or a visible local density); their
    converged flag is reported False.
    """
    mus = np.asarray(mus, dtype=np.float64)
    gam, root, res, iters, conv = _solve_batch(ws, mus, eta, tol, max_iter)
    im_tr = -np.trace(root, axis1=1, axis2=2).imag
    if ws.d:
        sb = ws.weights[None] @ gam
        rho_raw, ok = _cp_radius_batch(sb, ws.star, tol=cp_tol,
                                       max_iter=cp_max_iter)
        if not ok.all() and ws.d * ws.r * ws.r <= _DENSE_RESCUE_CAP:
            for i in np.flatnonzero(~ok):
                rho_raw[i] = _dense_cp_radius(sb[i], ws.star)
        rho = np.sqrt(np.maximum(rho_raw, 0.0))
    else:
        rho = np.zeros(len(mus))
    atom = eta * im_tr / ws.r >= atom_tol
    density = im_tr / (math.pi * ws.r) >= 1e-2
    member = np.where(conv, (rho >= 1.0 - rho_tol) | atom, atom | density)
    return MembershipBatch(mu=mus, member=member, rho=rho, im_tr_root=im_tr,
                           iterations=iters, residual=res, converged=conv)


def is_in_limit_spectrum(ws: WeightSystem, mu: float, eta: float = ETA_DEFAULT,
                         rho_tol: float = RHO_TOL_DEFAULT,
                         atom_tol: float = ATOM_TOL_DEFAULT,
                         tol: float = 1e-7, max_iter: int = 1500) -> bool:
    """Decide membership of a single real shift in the limiting spectrum."""
    out = membership_batch(ws, np.array([float(mu)]), eta=eta, rho_tol=rho_tol,
                           atom_tol=atom_tol, tol=tol, max_iter=max_iter)
    return bool(out.member[0])


@dataclass(frozen=True)
class ScanResult:
    """Scan outcome: the reconstructed set plus per-grid-point data."""

    limit: SpectralSet
    grid: MembershipBatch


def _find_runs(member: np.ndarray) -> list[tuple[int, int]]:
    runs = []
    i = 0
    n = len(member)
    while i < n:
        if member[i]:
            j = i
            while j + 1 < n and member[j + 1]:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    return runs


def _refine_boundaries(ws, brackets, refine_tol, member_kwargs):
    """Bisect (outside, inside) brackets in parallel batches."""
    if not brackets:
        return np.zeros(0)
    out = np.array([b[0] for b in brackets], dtype=np.float64)
    inn = np.array([b[1] for b in brackets], dtype=np.float64)
    while True:
        width = np.abs(inn - out)
        act = width > refine_tol
        if not act.any():
            break
        mids = 0.5 * (out[act] + inn[act])
        mem = membership_batch(ws, mids, **member_kwargs).member
        inn[act] = np.where(mem, mids, inn[act])
        out[act] = np.where(mem, out[act], mids)
    return 0.5 * (out + inn)


def limit_spectrum_scan(ws: WeightSystem, grid_step: float = 1e-2,
                        refine_tol: float = 1e-3, eta: float = ETA_DEFAULT,
                        rho_tol: float = RHO_TOL_DEFAULT,
                        atom_tol: float = ATOM_TOL_DEFAULT,
                        tol: float = 1e-7, max_iter: int = 1500,
                        chunk: int = 1024) -> ScanResult:
    """Reconstruct the limiting spectrum as intervals and isolated points.

    Membership is sampled on a uniform grid over the guaranteed
    spectral bound, consecutive members are merged into runs, and run
    boundaries are sharpened by bisection down to refine_tol.  A run
    spanning at most two grid steps whose refined width is at most four
    times refine_tol is reported as an isolated point at its midpoint.
    """
    if grid_step <= 0 or refine_tol <= 0:
        raise ValueError("grid_step and refine_tol must be positive")
    bound = ws.norm_bound()
    if bound == 0.0:
        count = 1
        grid = np.zeros(1)
    else:
        count = int(round(2.0 * bound / grid_step)) + 1
        grid = np.linspace(-bound, bound, count)
    member_kwargs = dict(eta=eta, rho_tol=rho_tol, atom_tol=atom_tol,
                         tol=tol, max_iter=max_iter)
    parts = []
    for lo in range(0, count, chunk):
        parts.append(membership_batch(ws, grid[lo:lo + chunk], **member_kwargs))
    batch = MembershipBatch(
        mu=np.concatenate([p.mu for p in parts]),
        member=np.concatenate([p.member for p in parts]),
        rho=np.concatenate([p.rho for p in parts]),
        im_tr_root=np.concatenate([p.im_tr_root for p in parts]),
        iterations=np.concatenate([p.iterations for p in parts]),
        residual=np.concatenate([p.residual for p in parts]),
        converged=np.concatenate([p.converged for p in parts]))
    runs = _find_runs(batch.member)
    brackets = []
    slots = []
    for ridx, (s, e) in enumerate(runs):
        if s > 0:
            brackets.append((grid[s - 1], grid[s]))
            slots.append((ridx, 0, len(brackets) - 1))
        if e < count - 1:
            brackets.append((grid[e + 1], grid[e]))
            slots.append((ridx, 1, len(brackets) - 1))
    refined = _refine_boundaries(ws, brackets, refine_tol, member_kwargs)
    intervals = []
    points = []
    for ridx, (s, e) in enumerate(runs):
        lo, hi = grid[s], grid[e]
        for rr, side, bi in slots:
            if rr != ridx:
                continue
            if side == 0:
                lo = refined[bi]
            else:
                hi = refined[bi]
        if e - s <= 2 and hi - lo <= 4.0 * refine_tol:
            points.append(0.5 * (lo + hi))
        else:
            intervals.append((float(lo), float(hi)))
    return ScanResult(limit=SpectralSet(intervals=tuple(intervals),
                                        points=tuple(points)),
                      grid=batch)


def spectral_edge(ws: WeightSystem, grid_step: float = 1e-2,
                  refine_tol: float = 2e-4, eta: float = ETA_DEFAULT,
                  rho_tol: float = RHO_TOL_DEFAULT,
                  atom_tol: float = ATOM_TOL_DEFAULT,
                  tol: float = 1e-7, max_iter: int = 1500,
                  chunk: int = 512) -> float:
    """Largest magnitude point of the limiting spectrum.

    Scans downward from the norm bound on both signs simultaneously and
    bisects the first member bracket found.
    """
    bound = ws.norm_bound()
    if bound == 0.0:
        return 0.0
    member_kwargs = dict(eta=eta, rho_tol=rho_tol, atom_tol=atom_tol,
                         tol=tol, max_iter=max_iter)
    count = int(round(bound / grid_step)) + 1
    mags = np.linspace(bound, 0.0, count)
    top = None
    prev_best = bound + grid_step
    for lo in range(0, count, chunk):
        part = mags[lo:lo + chunk]
        mus = np.concatenate([part, -part])
        mem = membership_batch(ws, mus, **member_kwargs).member
        hit = np.abs(mus[mem])
        if hit.size:
            top = float(hit.max())
            above = mags[lo:lo + chunk][mags[lo:lo + chunk] > top]
            prev_best = float(above.min()) if above.size else prev_best
            break
        prev_best = float(part.min())
    if top is None:
        raise EmptySet("no spectrum found on the magnitude grid")
    both = _refine_boundaries(
        ws, [(prev_best, top), (-prev_best, -top)], refine_tol, member_kwargs)
    return float(np.abs(both).max())


def _leftmult(color: int, word: tuple[int, ...], star: tuple[int, ...]) -> tuple[int, ...]:
    if word and word[0] == star[color]:
        return word[1:]
    return (color,) + word


def free_moment(ws: WeightSystem, k: int) -> float:
    """k-th normalized trace moment of the weight system on its free cover.

    Walks the ball of reduced words of depth ceil(k/2) around the root,
    which is exact because depth-k contributions to the return block
    vanish beyond that radius.
    """
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if k == 0:
        return 1.0
    if k > 16:
        raise DepthTooLarge(f"moment order capped at 16, got {k}")
    d, r = ws.d, ws.r
    h = (k + 1) // 2
    if d >= 2:
        words = 1 + d * sum((d - 1) ** m for m in range(h))
        if words * r * r > MOMENT_WORD_CAP:
            raise DepthTooLarge(
                f"word ball of size {words} exceeds the moment budget")
    state = {(): np.eye(r, dtype=np.complex128)}
    use_a0 = bool(ws.a0.any())
    for step in range(k):
        depth_left = k - step - 1
        new: dict[tuple[int, ...], np.ndarray] = {}
        for word, mat in state.items():
            if use_a0 and len(word) <= depth_left:
                contrib = ws.a0 @ mat
                cur = new.get(word)
                new[word] = contrib if cur is None else cur + contrib
            for i in range(d):
                nxt = _leftmult(ws.star[i], word, ws.star)
                if len(nxt) > depth_left:
                    continue
                contrib = ws.weights[i] @ mat
                cur = new.get(nxt)
                new[nxt] = contrib if cur is None else cur + contrib
        state = new
    mat = state.get(())
    if mat is None:
        return 0.0
    return float(np.trace(mat).real) / r

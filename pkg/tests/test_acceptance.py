"""End-to-end acceptance checks with pinned tolerances and budgets.

Every test prints exactly one PASS/FAIL line (shown in the -rP
summary).  Wall-clock budgets are generous single-core bounds; the
numerical tolerances are the contract and are never loosened at
runtime.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from liftspec import cli
from liftspec.errors import SingularShift
from liftspec.freelimit import (CPBlockMap, _cp_radius_batch, cp_radius,
                                free_moment, nb_radius_sequence,
                                spectral_edge)
from liftspec.graphs import ball_excess, build_colored_graph, is_tangle_free, \
    local_moment
from liftspec.lift import (LiftOperator, SpectralSet, TensorLiftOperator,
                           dense_spectrum, extreme_eigs, hausdorff)
from liftspec.model import canonical_star, sample_symmetric
from liftspec.nonbacktracking import NBOperator, ihara_bass_residual
from liftspec.presets import figure1_weight_system, regular_weight_system
from liftspec.proofchecks import krein_rutman_check, signed_product_check

from test_lift import random_symmetric_system

EDGE4 = 2.0 * math.sqrt(3.0)


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


@pytest.fixture(scope="session")
def figure1_limit(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance") / "limit.json"
    t0 = time.perf_counter()
    rc = cli.main(["limit", "--preset", "figure1", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    assert rc == 0
    return SpectralSet.load(str(out)), elapsed


@pytest.fixture(scope="session")
def regular4_tops():
    ws = regular_weight_system(4)
    tops = []
    t0 = time.perf_counter()
    for seed in range(10):
        pf = sample_symmetric(2000, ws.num_free_pairs, ws.d, seed)
        ex = extreme_eigs(LiftOperator(ws, pf), k=1, seed=seed)
        tops.append(float(ex.largest[-1]))
    return tops, time.perf_counter() - t0


def test_limit_scan_two_bands_and_isolated_point(figure1_limit):
    s, elapsed = figure1_limit
    ok = len(s.intervals) == 2 and len(s.points) == 1
    detail = f"set={s.intervals} + {s.points}, {elapsed:.1f}s (budget 60s)"
    if ok:
        (nlo, nhi), (plo, phi) = s.intervals
        a, b = phi, plo
        sym = max(abs(nlo + a), abs(nhi + b))
        ok = (abs(a - 2.866) <= 5e-3 and abs(b - 0.283) <= 5e-3
              and sym <= 5e-3 and abs(s.points[0]) <= 5e-3
              and elapsed <= 60.0)
        detail = (f"a={a:.6f} (2.866+-0.005), b={b:.6f} (0.283+-0.005), "
                  f"mirror gap {sym:.1e}, point {s.points[0]}, "
                  f"{elapsed:.1f}s (budget 60s)")
    report("limit scan bands and point", ok, detail)
    assert ok, detail


def test_sampled_spectra_track_limit(figure1_limit):
    limit, _ = figure1_limit
    ws = figure1_weight_system()
    dists = []
    upper = []
    t0 = time.perf_counter()
    for seed in range(10):
        pf = sample_symmetric(500, ws.num_free_pairs, ws.d, seed)
        spec = dense_spectrum(LiftOperator(ws, pf))
        dists.append(hausdorff(spec, limit))
        upper.append(max(limit.distance(x) for x in spec.points))
    elapsed = time.perf_counter() - t0
    close = sum(1 for h in dists if h <= 0.15)
    ok = (close >= 9 and max(upper) <= 0.15 and elapsed <= 300.0)
    detail = (f"hausdorff<=0.15 in {close}/10 (max {max(dists):.3f}), "
              f"worst eigenvalue distance {max(upper):.3f} (<=0.15), "
              f"{elapsed:.0f}s (budget 300s)")
    report("sampled spectra track limit", ok, detail)
    assert ok, detail


def test_second_eigenvalue_gap_regular4(regular4_tops):
    tops, elapsed = regular4_tops
    good = sum(1 for t in tops if t <= EDGE4 + 0.10)
    ok = good >= 9 and elapsed <= 180.0
    detail = (f"top H0 eigenvalue <= 2*sqrt(3)+0.10 in {good}/10 "
              f"(max {max(tops):.4f}), {elapsed:.0f}s (budget 180s)")
    report("second eigenvalue gap at n=2000", ok, detail)
    assert ok, detail


def test_lower_edge_floor_regular4(regular4_tops):
    tops, _ = regular4_tops
    good = sum(1 for t in tops if t >= EDGE4 - 0.15)
    ok = good == 10
    detail = (f"top H0 eigenvalue >= 2*sqrt(3)-0.15 in {good}/10 "
              f"(min {min(tops):.4f})")
    report("lower edge floor at n=2000", ok, detail)
    assert ok, detail


def test_pencil_singularity_characterizes_nb_spectrum():
    rng = np.random.default_rng(2026)
    shapes = [(r, q, extra) for r in (1, 2) for q in (0, 1, 2)
              for extra in (0, 1, 2) if 1 <= 2 * q + extra <= 4]
    on_fail = 0
    off_fail = 0
    checked = 0
    skipped = 0
    off_checked = 0
    t0 = time.perf_counter()
    for idx in range(50):
        r, q, extra = shapes[idx % len(shapes)]
        d = 2 * q + extra
        n = (4, 6, 8)[idx % 3]
        ws = random_symmetric_system(rng, r, q, extra)
        pf = sample_symmetric(n, q, d, 1000 + idx)
        vals = NBOperator(ws, pf).spectrum()
        seen = set()
        for lam in vals:
            key = (round(lam.real, 6), round(lam.imag, 6))
            if key in seen:
                continue
            seen.add(key)
            try:
                res = ihara_bass_residual(ws, pf, complex(lam))
            except SingularShift:
                skipped += 1
                continue
            checked += 1
            if res >= 1e-6:
                on_fail += 1
        if off_checked < 20:
            box = float(np.max(np.abs(vals))) + 1.0
            while True:
                z = complex(rng.uniform(-box, box), rng.uniform(-box, box))
                if np.min(np.abs(vals - z)) >= 0.3:
                    break
            off_checked += 1
            if ihara_bass_residual(ws, pf, z) <= 1e-4:
                off_fail += 1
    elapsed = time.perf_counter() - t0
    ok = (on_fail == 0 and off_fail == 0 and checked > 500
          and off_checked == 20 and elapsed <= 120.0)
    detail = (f"{checked} eigenvalue shifts singular (<1e-6), {skipped} "
              f"invalid shifts skipped, {off_checked} off-spectrum points "
              f"regular (>1e-4), failures {on_fail}+{off_fail}, "
              f"{elapsed:.0f}s (budget 120s)")
    report("pencil singularity vs nb spectrum", ok, detail)
    assert ok, detail


def test_block_map_radius_and_positive_state():
    rng = np.random.default_rng(7)
    worst_gap = 0.0
    worst_eig = 0.0
    uncertified = 0
    for idx in range(100):
        r = (1, 2, 3)[idx % 3]
        d_hi = min(8, 144 // (r * r))
        q = int(rng.integers(0, d_hi // 2 + 1))
        extra = int(rng.integers(0 if q else 1, d_hi - 2 * q + 1))
        ws = random_symmetric_system(rng, r, q, extra)
        blocks = ws.weights / math.sqrt(ws.d * r)
        star = canonical_star(q, ws.d)
        rho, cert = _cp_radius_batch(blocks[None], star, tol=1e-10,
                                     max_iter=50000)
        if not cert[0]:
            uncertified += 1
            continue
        chk = krein_rutman_check(CPBlockMap(blocks, star))
        worst_gap = max(worst_gap, abs(float(rho[0]) - chk.radius))
        worst_eig = min(worst_eig, chk.min_eigenvalue)
    ok = uncertified == 0 and worst_gap <= 1e-8 and worst_eig >= -1e-9
    detail = (f"100 systems, max |power - dense| = {worst_gap:.1e} (<=1e-8), "
              f"min state eigenvalue {worst_eig:.1e} (>=-1e-9), "
              f"{uncertified} uncertified")
    report("block map radius and positive state", ok, detail)
    assert ok, detail


def test_norm_growth_sequence_matches_radius():
    rels = {}
    for name, ws in (("figure1", figure1_weight_system()),
                     ("regular:4", regular_weight_system(4))):
        seq = nb_radius_sequence(ws, count=12)
        target = math.sqrt(cp_radius(CPBlockMap(ws.weights, ws.star)))
        rels[name] = abs(float(seq[-1]) - target) / target
    ok = all(v <= 0.10 for v in rels.values())
    detail = ", ".join(f"{k}: rel err {v:.3f} (<=0.10)"
                       for k, v in rels.items())
    report("norm growth sequence vs radius", ok, detail)
    assert ok, detail


def test_scalar_edge_closed_form():
    errs = {}
    for d in (4, 6, 8):
        ws = regular_weight_system(d)
        errs[d] = abs(spectral_edge(ws) - 2.0 * math.sqrt(d - 1.0))
    ok = all(e <= 1e-3 for e in errs.values())
    detail = ", ".join(f"d={d}: |err|={e:.1e} (<=1e-3)"
                       for d, e in errs.items())
    report("scalar spectral edge closed form", ok, detail)
    assert ok, detail


def test_local_moments_match_tree_moments():
    ws = regular_weight_system(4)
    free_vals = [free_moment(ws, k) for k in range(1, 7)]
    failures = 0
    sites = 0
    worst = 0.0
    t0 = time.perf_counter()
    for seed in range(20):
        pf = sample_symmetric(200, ws.num_free_pairs, ws.d, seed)
        g = build_colored_graph(pf)
        for x in range(pf.n):
            if ball_excess(g, x, 3) != 0:
                continue
            sites += 1
            for k in range(1, 7):
                dev = abs(local_moment(ws, pf, x, k) - free_vals[k - 1])
                worst = max(worst, dev)
                if dev > 1e-9:
                    failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and sites > 0
    detail = (f"{sites} acyclic-ball sites over 20 samples, max deviation "
              f"{worst:.1e} (<=1e-9), {failures} failures, {elapsed:.0f}s")
    report("local moments match tree moments", ok, detail)
    assert ok, detail


def test_tensor_top_eigenvalue_gap():
    ws = regular_weight_system(4)
    tops = []
    t0 = time.perf_counter()
    for seed in range(10):
        pf = sample_symmetric(100, ws.num_free_pairs, ws.d, seed)
        ex = extreme_eigs(TensorLiftOperator(ws, pf), k=1, seed=seed)
        tops.append(float(ex.largest[-1]))
    elapsed = time.perf_counter() - t0
    good = sum(1 for t in tops if t <= EDGE4 + 0.25)
    ok = good >= 8 and elapsed <= 180.0
    detail = (f"tensor top <= 2*sqrt(3)+0.25 in {good}/10 "
              f"(max {max(tops):.4f}), {elapsed:.0f}s (budget 180s)")
    report("tensor lift top eigenvalue gap", ok, detail)
    assert ok, detail


def test_signed_product_bound_grid():
    flagged = 0
    violations = 0
    for z in (1, 2):
        for k in range(1, 9):
            for pe in range(2, 11):
                for qe in range(4, 21):
                    chk = signed_product_check(Fraction(1, 2 ** pe),
                                               Fraction(1, 2 ** qe), z, k)
                    if chk.flagged:
                        flagged += 1
                        if not chk.holds:
                            violations += 1
    ok = flagged == 16 and violations == 0
    detail = (f"{flagged} flagged grid points (expected 16), "
              f"{violations} bound violations (expected 0)")
    report("signed product bound on exhaustive grid", ok, detail)
    assert ok, detail


def test_tangle_fraction_non_increasing():
    fracs = {}
    t0 = time.perf_counter()
    for n in (200, 2000):
        tangled = 0
        for seed in range(100):
            pf = sample_symmetric(n, 2, 4, seed)
            if not is_tangle_free(build_colored_graph(pf), 2):
                tangled += 1
        fracs[n] = tangled / 100.0
    elapsed = time.perf_counter() - t0
    ok = fracs[200] >= fracs[2000]
    detail = (f"tangled fraction {fracs[200]:.2f} at n=200 vs "
              f"{fracs[2000]:.2f} at n=2000, {elapsed:.0f}s")
    report("tangle fraction non-increasing in n", ok, detail)
    assert ok, detail

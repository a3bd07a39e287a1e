import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liftspec.errors import EmptySet, NotSelfAdjoint
from liftspec.lift import (LiftOperator, TensorLiftOperator, SpectralSet,
                           helmert_basis, extreme_eigs, dense_spectrum,
                           hausdorff)
from liftspec.model import WeightSystem, canonical_star, sample_symmetric
from liftspec.presets import regular_weight_system


def random_symmetric_system(rng, r, q, extra):
    d = 2 * q + extra
    star = canonical_star(q, d)
    blocks = []
    for _ in range(q):
        blocks.append(rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r)))
    for b in list(blocks):
        blocks.append(b.conj().T)
    for _ in range(extra):
        m = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
        blocks.append((m + m.conj().T) / 2)
    a0 = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
    a0 = (a0 + a0.conj().T) / 2
    w = np.stack(blocks) if blocks else np.zeros((0, r, r))
    return WeightSystem(r=r, d=d, star=star, a0=a0, weights=w)


@pytest.mark.parametrize("r,q,extra,n", [(1, 2, 0, 10), (2, 1, 1, 8), (3, 0, 2, 6)])
def test_matvec_matches_dense(r, q, extra, n):
    rng = np.random.default_rng(10 * r + q)
    ws = random_symmetric_system(rng, r, q, extra)
    pf = sample_symmetric(n, q, ws.d, seed=3)
    op = LiftOperator(ws, pf)
    m = op.dense()
    for t in range(4):
        v = rng.standard_normal(n * r) + 1j * rng.standard_normal(n * r)
        assert np.linalg.norm(op.matvec(v) - m @ v) <= 1e-12 * np.linalg.norm(m @ v) + 1e-12


def test_dense_is_selfadjoint_for_symmetric_weights():
    rng = np.random.default_rng(7)
    ws = random_symmetric_system(rng, 2, 2, 1)
    pf = sample_symmetric(8, 2, 5, seed=9)
    m = LiftOperator(ws, pf).dense()
    assert np.linalg.norm(m - m.conj().T) <= 1e-12 * np.linalg.norm(m)


def test_projection_commutes_with_operator():
    rng = np.random.default_rng(11)
    ws = random_symmetric_system(rng, 2, 1, 2)
    pf = sample_symmetric(10, 1, 4, seed=2)
    op = LiftOperator(ws, pf)
    scale = np.linalg.norm(op.dense(), 2)
    for t in range(4):
        v = rng.standard_normal(op.dim) + 1j * rng.standard_normal(op.dim)
        lhs = op.project(op.matvec(v))
        rhs = op.matvec(op.project(v))
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * scale * np.linalg.norm(v)


def test_projection_kills_blockwise_constants():
    ws = regular_weight_system(4)
    pf = sample_symmetric(12, 2, 4, seed=0)
    op = LiftOperator(ws, pf)
    v = np.tile(np.array([2.5]), 12)
    assert np.allclose(op.project(v), 0.0)


def test_helmert_basis_is_orthonormal_complement():
    u = helmert_basis(7)
    assert u.shape == (7, 6)
    assert np.allclose(u.T @ u, np.eye(6))
    assert np.allclose(np.ones(7) @ u, 0.0)


def test_reduced_dense_spectrum_matches_projected_full():
    # eigenvalues of the compressed operator equal the nontrivial ones
    rng = np.random.default_rng(21)
    ws = random_symmetric_system(rng, 2, 1, 1)
    pf = sample_symmetric(10, 1, 3, seed=4)
    op = LiftOperator(ws, pf)
    red = op.reduced_dense()
    m = op.dense()
    p = np.zeros((op.dim, op.dim), dtype=complex)
    for t in range(op.dim):
        e = np.zeros(op.dim)
        e[t] = 1.0
        p[:, t] = op.project(e)
    proj_vals = np.linalg.eigvalsh(p @ m @ p)
    red_vals = np.linalg.eigvalsh(red)
    # projected full operator has r extra zeros from the trivial block
    merged = np.sort(np.concatenate([red_vals, np.zeros(ws.r)]))
    assert np.allclose(np.sort(proj_vals), merged, atol=1e-9)


def test_trivial_plus_nontrivial_equals_full_spectrum():
    rng = np.random.default_rng(31)
    ws = random_symmetric_system(rng, 2, 2, 0)
    pf = sample_symmetric(8, 2, 4, seed=6)
    op = LiftOperator(ws, pf)
    full = np.linalg.eigvalsh(op.dense())
    reduced = np.linalg.eigvalsh(op.reduced_dense())
    trivial = np.linalg.eigvalsh(ws.a0 + ws.weights.sum(axis=0))
    merged = np.sort(np.concatenate([reduced, trivial]))
    assert np.allclose(full, merged, atol=1e-9)


def test_lanczos_matches_dense_extremes():
    ws = regular_weight_system(4)
    pf = sample_symmetric(80, 2, 4, seed=12)
    op = LiftOperator(ws, pf)
    vals = np.linalg.eigvalsh(op.reduced_dense())
    out = extreme_eigs(op, k=2, seed=1)
    assert np.allclose(out.largest, vals[-2:][::-1], atol=1e-7)
    assert np.allclose(out.smallest, vals[:2], atol=1e-7)
    assert out.largest_residuals.max() <= 1e-8
    m = op.dense()


def test_extreme_eigs_requires_symmetry():
    star = canonical_star(1, 2)
    w = np.stack([np.array([[2.0]]), np.array([[5.0]])])  # not star-symmetric
    ws = WeightSystem(r=1, d=2, star=star, a0=np.zeros((1, 1)), weights=w)
    pf = sample_symmetric(6, 1, 2, seed=0)
    with pytest.raises(NotSelfAdjoint):
        extreme_eigs(LiftOperator(ws, pf), k=1)


def test_tensor_matvec_matches_dense_assembly():
    rng = np.random.default_rng(41)
    ws = random_symmetric_system(rng, 1, 1, 1)
    pf = sample_symmetric(6, 1, 3, seed=8)
    top = TensorLiftOperator(ws, pf)
    n, r = 6, 1
    dim = n * n * r
    m = np.zeros((dim, dim), dtype=complex)
    eye_n = np.eye(n)
    for i in range(ws.d):
        s = eye_n[pf.perms[i]]  # (S v)(x) = v(sigma(x))
        m += np.kron(np.kron(s, s), ws.weights[i])
    m += np.kron(np.eye(n * n), ws.a0)
    for t in range(4):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        assert np.linalg.norm(top.matvec(v) - m @ v) <= 1e-11 * (1 + np.linalg.norm(m @ v))


def test_tensor_fixes_invariant_vectors():
    # the diagonal indicator and the all-ones vector are fixed by S (x) S
    ws = regular_weight_system(4)
    pf = sample_symmetric(10, 2, 4, seed=3)
    top = TensorLiftOperator(ws, pf)
    n = 10
    ii = np.eye(n).reshape(-1)
    jj = np.ones(n * n)
    perms = pf.perms
    for i in range(ws.d):
        p = perms[i]
        shuffled = ii.reshape(n, n)[np.ix_(p, p)].reshape(-1)
        assert np.array_equal(shuffled, ii)
        assert np.array_equal(jj.reshape(n, n)[np.ix_(p, p)].reshape(-1), jj)
    assert np.allclose(top.project(ii), 0.0)
    assert np.allclose(top.project(jj), 0.0)


def test_tensor_diagonal_restriction_reproduces_plain_lift():
    rng = np.random.default_rng(51)
    ws = random_symmetric_system(rng, 2, 1, 0)
    pf = sample_symmetric(7, 1, 2, seed=5)
    lift_op = LiftOperator(ws, pf)
    tensor_op = TensorLiftOperator(ws, pf)
    n, r = 7, 2
    v = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    embedded = np.zeros((n, n, r), dtype=complex)
    for x in range(n):
        embedded[x, x] = v[x]
    got = tensor_op.matvec(embedded.reshape(-1)).reshape(n, n, r)
    want = lift_op.matvec(v.reshape(-1)).reshape(n, r)
    for x in range(n):
        assert np.allclose(got[x, x], want[x], atol=1e-12)
    offdiag = got.copy()
    for x in range(n):
        offdiag[x, x] = 0.0
    assert np.allclose(offdiag, 0.0)


# ---- SpectralSet ----

def test_spectral_set_validates_ordering():
    with pytest.raises(ValueError):
        SpectralSet(intervals=((1.0, 0.5),), points=())
    with pytest.raises(ValueError):
        SpectralSet(intervals=((0.0, 1.0), (0.5, 2.0)), points=())
    with pytest.raises(ValueError):
        SpectralSet(intervals=((0.0, 1.0),), points=(0.5,))
    s = SpectralSet(intervals=((-2.0, -1.0), (1.0, 2.0)), points=(0.0,))
    assert s.bounds() == (-2.0, 2.0)


def test_spectral_set_distance_and_json_round_trip(tmp_path):
    s = SpectralSet(intervals=((-1.0, 1.0),), points=(3.0,))
    assert s.distance(0.5) == 0.0
    assert s.distance(2.0) == pytest.approx(1.0)
    assert s.distance(3.0) == 0.0
    assert s.distance(5.0) == pytest.approx(2.0)
    path = tmp_path / "s.json"
    s.save(path)
    back = SpectralSet.load(path)
    assert back == s


def test_hausdorff_identical_sets_is_zero():
    s = SpectralSet(intervals=((-1.0, 2.0),), points=(4.0,))
    assert hausdorff(s, s) == 0.0


def test_hausdorff_point_vs_interval():
    s = SpectralSet(intervals=(), points=(0.0,))
    t = SpectralSet(intervals=((1.0, 2.0),), points=())
    assert hausdorff(s, t) == pytest.approx(2.0)  # directed t->s attains 2 at 2
    assert hausdorff(t, s) == pytest.approx(2.0)


def test_hausdorff_three_points_vs_interval():
    # directed t->s attains 1.5 at the gap midpoint -1.5 inside [-2,2]
    s = SpectralSet(intervals=(), points=(-3.0, 0.0, 3.0))
    t = SpectralSet(intervals=((-2.0, 2.0),), points=())
    assert hausdorff(s, t) == pytest.approx(1.5)


def test_hausdorff_empty_raises():
    s = SpectralSet(intervals=(), points=())
    t = SpectralSet(intervals=((0.0, 1.0),), points=())
    with pytest.raises(EmptySet):
        hausdorff(s, t)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=6),
       st.lists(st.floats(-10, 10), min_size=1, max_size=6))
@settings(max_examples=60, deadline=None)
def test_hausdorff_agrees_with_brute_force_on_point_sets(xs, ys):
    s = SpectralSet(intervals=(), points=tuple(sorted(set(xs))))
    t = SpectralSet(intervals=(), points=tuple(sorted(set(ys))))
    a = np.array(sorted(set(xs)))
    b = np.array(sorted(set(ys)))
    d1 = max(np.min(np.abs(b - x)) for x in a)
    d2 = max(np.min(np.abs(a - y)) for y in b)
    assert hausdorff(s, t) == pytest.approx(max(d1, d2), abs=1e-12)


def test_hausdorff_brute_force_grid_oracle_with_intervals():
    s = SpectralSet(intervals=((-2.0, -0.5), (0.25, 1.75)), points=(2.5,))
    t = SpectralSet(intervals=((-1.5, 1.0),), points=(-3.0, 2.0))
    grid = np.linspace(-4.0, 4.0, 160001)
    ds = np.array([s.distance(float(x)) for x in grid])
    dt = np.array([t.distance(float(x)) for x in grid])
    d1 = ds[dt <= 2.6e-5].max()
    d2 = dt[ds <= 2.6e-5].max()
    brute = max(d1, d2)
    assert hausdorff(s, t) == pytest.approx(brute, abs=1e-3)


def test_dense_spectrum_returns_sorted_multiset():
    ws = regular_weight_system(4)
    pf = sample_symmetric(20, 2, 4, seed=2)
    op = LiftOperator(ws, pf)
    spec = dense_spectrum(op)
    vals = np.linalg.eigvalsh(op.reduced_dense())
    assert len(spec.points) == len(vals)
    assert np.allclose(np.array(spec.points), vals, atol=1e-10)
    assert spec.intervals == ()

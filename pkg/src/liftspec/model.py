"""Weight systems, symmetric permutation families and their file format.

A weight system holds the block data (a_0, a_1, ..., a_d) of the
operator  A = a_0 (x) 1 + sum_i a_i (x) S_i acting on C^r (x) l2(X),
together with the color involution ``star``.  The system is symmetric
when a_0 is Hermitian and a_i^* = a_{star(i)} for every color, which
makes A self-adjoint once the permutations satisfy
sigma_{star(i)} = sigma_i^{-1}.

Colors follow the canonical layout: the first q colors are free, color
i + q is the inverse of color i, and every color past 2q is its own
inverse (a matching).  Matchings require an even ground set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, OddGroundSet, ParseError

SYMMETRY_TOL = 1e-12
WS_FORMAT_VERSION = "liftspec-ws-1"


def canonical_star(q: int, d: int) -> tuple[int, ...]:
    """Color involution for q free pairs followed by d - 2q matchings."""
    if not 0 <= 2 * q <= d:
        raise ValueError(f"need 0 <= 2q <= d, got q={q}, d={d}")
    star = list(range(d))
    for i in range(q):
        star[i] = i + q
        star[i + q] = i
    return tuple(star)


@dataclass(frozen=True, eq=False)
class WeightSystem:
    """Matrix weights (a_0; a_1..a_d) with a color involution.

    ``star`` is 0-based here; the JSON format stores it 1-based.
    Construction enforces shapes and finiteness.  Use :meth:`validate`
    for the involution and symmetry checks, which are reported as data
    rather than raised.
    """

    r: int
    d: int
    star: tuple[int, ...]
    a0: np.ndarray
    weights: np.ndarray  # (d, r, r)

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be positive")
        if self.d < 0:
            raise ValueError("d must be non-negative")
        a0 = np.asarray(self.a0, dtype=np.complex128)
        w = np.asarray(self.weights, dtype=np.complex128)
        if w.size == 0:
            w = w.reshape(0, self.r, self.r)
        if a0.shape != (self.r, self.r):
            raise ValueError(f"a0 must be {self.r}x{self.r}, got {a0.shape}")
        if w.shape != (self.d, self.r, self.r):
            raise ValueError(
                f"weights must have shape ({self.d},{self.r},{self.r}), got {w.shape}")
        if not (np.isfinite(a0).all() and np.isfinite(w).all()):
            raise ValueError("weight entries must be finite")
        if len(self.star) != self.d:
            raise ValueError("star must list one image per color")
        if any(not 0 <= s < self.d for s in self.star):
            raise ValueError("star images must be valid color indices")
        object.__setattr__(self, "star", tuple(int(s) for s in self.star))
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "weights", w)

    @property
    def num_free_pairs(self) -> int:
        return sum(1 for i, s in enumerate(self.star) if s != i) // 2

    def validate(self) -> list[str]:
        """All invariant violations, as human-readable strings.

        Empty list iff star is an involution and the symmetry relations
        a_0^* = a_0, a_i^* = a_{star(i)} hold to 1e-12 (relative to the
        weight scale).
        """
        out: list[str] = []
        for i, s in enumerate(self.star):
            if self.star[s] != i:
                out.append(f"star is not an involution at color {i + 1}")
        scale = max(1.0, float(np.abs(self.weights).max(initial=0.0)),
                    float(np.abs(self.a0).max(initial=0.0)))
        if np.abs(self.a0 - self.a0.conj().T).max(initial=0.0) > SYMMETRY_TOL * scale:
            out.append("a0 is not Hermitian")
        for i, s in enumerate(self.star):
            if i > s:
                continue
            dev = np.abs(self.weights[i].conj().T - self.weights[s]).max()
            if dev > SYMMETRY_TOL * scale:
                out.append(
                    f"symmetry violation on pair ({i + 1},{s + 1}): "
                    f"max deviation {dev:.3e}")
        return out

    @property
    def is_symmetric(self) -> bool:
        return not self.validate()

    def norm_bound(self) -> float:
        """||a_0|| + sum_i ||a_i|| in operator norm; bounds the spectrum."""
        total = float(np.linalg.norm(self.a0, 2)) if self.r else 0.0
        for i in range(self.d):
            total += float(np.linalg.norm(self.weights[i], 2))
        return total


@dataclass(frozen=True, eq=False)
class PermutationFamily:
    """d permutations of [n] compatible with the canonical involution.

    perms[i + q] must be the inverse of perms[i] for i < q, and each
    perms[i] with i >= 2q must be a fixed-point-free involution.
    """

    n: int
    q: int
    perms: np.ndarray  # (d, n) int64

    def __post_init__(self):
        p = np.asarray(self.perms, dtype=np.int64)
        if p.ndim != 2 or p.shape[1] != self.n:
            raise ValueError(f"perms must be (d, n), got {p.shape}")
        if not 0 <= 2 * self.q <= p.shape[0]:
            raise ValueError("need 0 <= 2q <= d")
        object.__setattr__(self, "perms", p)

    @property
    def d(self) -> int:
        return int(self.perms.shape[0])

    def validate(self) -> list[str]:
        out: list[str] = []
        idx = np.arange(self.n)
        for i in range(self.d):
            p = self.perms[i]
            if p.min(initial=0) < 0 or p.max(initial=-1) >= self.n or \
                    len(np.unique(p)) != self.n:
                out.append(f"color {i + 1} is not a permutation of the ground set")
                continue
            if i < self.q:
                if not np.array_equal(p[self.perms[i + self.q]], idx):
                    out.append(f"colors {i + 1} and {i + self.q + 1} are not inverse")
            elif i >= 2 * self.q:
                if not np.array_equal(p[p], idx):
                    out.append(f"matching color {i + 1} is not an involution")
                elif (p == idx).any():
                    out.append(f"matching color {i + 1} has a fixed point")
        if self.d > 2 * self.q and self.n % 2:
            out.append("matching colors require an even ground set")
        return out


@dataclass(frozen=True)
class BaseGraphSpec:
    """Half-edge list of a base multigraph on r vertices (1-based)."""

    r: int
    edges: tuple[tuple[int, int], ...] = field(default_factory=tuple)


def from_base_graph(spec: BaseGraphSpec) -> WeightSystem:
    """Weight system of the adjacency lift of a base multigraph.

    Each base edge (u, v) becomes a free color with weight E_{uv} and a
    starred partner with weight E_{vu}; a_0 is zero.  The result is
    symmetric by construction.
    """
    m = len(spec.edges)
    d = 2 * m
    w = np.zeros((d, spec.r, spec.r), dtype=np.complex128)
    for k, (u, v) in enumerate(spec.edges):
        if not (1 <= u <= spec.r and 1 <= v <= spec.r):
            raise IndexOutOfRange(
                f"edge ({u},{v}) outside vertex range 1..{spec.r}")
        w[k, u - 1, v - 1] = 1.0
        w[k + m, v - 1, u - 1] = 1.0
    return WeightSystem(r=spec.r, d=d, star=canonical_star(m, d),
                        a0=np.zeros((spec.r, spec.r), dtype=np.complex128),
                        weights=w)


def base_adjacency(ws: WeightSystem) -> np.ndarray:
    """a_0 + sum_i a_i, the operator restricted to constant vectors."""
    return ws.a0 + ws.weights.sum(axis=0)


def sample_symmetric(n: int, q: int, d: int, seed: int) -> PermutationFamily:
    """Draw a symmetric family: q uniform free pairs, d - 2q matchings.

    Free colors are uniform permutations (Fisher-Yates shuffle driven by
    the PCG64 generator, so a fixed seed gives the same family on every
    platform); color i + q is the exact inverse of color i.  Matching
    colors are uniform fixed-point-free involutions, drawn by shuffling
    the ground set and pairing consecutive elements.  Pure function of
    (n, q, d, seed).
    """
    if n < 1:
        raise ValueError("ground set must be non-empty")
    if not 0 <= 2 * q <= d:
        raise ValueError(f"need 0 <= 2q <= d, got q={q}, d={d}")
    if d > 2 * q and n % 2:
        raise OddGroundSet(
            f"matching colors need an even ground set, got n={n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    perms = np.empty((d, n), dtype=np.int64)
    for i in range(q):
        p = rng.permutation(n)
        perms[i] = p
        perms[i + q] = np.argsort(p)
    for i in range(2 * q, d):
        order = rng.permutation(n)
        inv = np.empty(n, dtype=np.int64)
        inv[order[0::2]] = order[1::2]
        inv[order[1::2]] = order[0::2]
        perms[i] = inv
    return PermutationFamily(n=n, q=q, perms=perms)


def _matrix_to_json(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _matrix_from_json(obj, r: int, field_name: str) -> np.ndarray:
    try:
        a = np.asarray(obj, dtype=np.float64)
    except (TypeError, ValueError):
        raise ParseError("matrix entries must be [re, im] pairs", field=field_name)
    if a.shape != (r, r, 2):
        raise ParseError(
            f"matrix must be {r}x{r} with [re, im] entries, got shape {a.shape}",
            field=field_name)
    return a[..., 0] + 1j * a[..., 1]


def save_weight_system(ws: WeightSystem, path) -> None:
    doc = {
        "version": WS_FORMAT_VERSION,
        "r": ws.r,
        "d": ws.d,
        "star": [s + 1 for s in ws.star],
        "a0": _matrix_to_json(ws.a0),
        "weights": [_matrix_to_json(ws.weights[i]) for i in range(ws.d)],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_weight_system(path) -> WeightSystem:
    """Parse a weight-system file, round-tripping floats bit-exactly."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top-level document must be an object")
    version = doc.get("version")
    if version != WS_FORMAT_VERSION:
        raise ParseError(f"unsupported version {version!r}", field="version")
    for key in ("r", "d", "star", "a0", "weights"):
        if key not in doc:
            raise ParseError("missing required field", field=key)
    r, d = doc["r"], doc["d"]
    if not (isinstance(r, int) and r >= 1):
        raise ParseError("r must be a positive integer", field="r")
    if not (isinstance(d, int) and d >= 0):
        raise ParseError("d must be a non-negative integer", field="d")
    star_raw = doc["star"]
    if not (isinstance(star_raw, list) and len(star_raw) == d):
        raise ParseError(f"star must list {d} colors", field="star")
    star = []
    for k, s in enumerate(star_raw):
        if not (isinstance(s, int) and 1 <= s <= d):
            raise ParseError(f"entry {k + 1} must be a color in 1..{d}",
                             field="star")
        star.append(s - 1)
    for k, s in enumerate(star):
        if star[s] != k:
            raise ParseError(f"star is not an involution at color {k + 1}",
                             field="star")
    a0 = _matrix_from_json(doc["a0"], r, "a0")
    wraw = doc["weights"]
    if not (isinstance(wraw, list) and len(wraw) == d):
        raise ParseError(f"weights must list {d} matrices", field="weights")
    weights = np.zeros((d, r, r), dtype=np.complex128)
    for i in range(d):
        weights[i] = _matrix_from_json(wraw[i], r, f"weights[{i + 1}]")
    return WeightSystem(r=r, d=d, star=tuple(star), a0=a0, weights=weights)

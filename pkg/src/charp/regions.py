"""Constancy-region analytics for mixed test ideals.

Rasterized tau-class grids, characteristic functions chi_a^N, the
self-similarity operators T_{q|b} (raster and symbolic forms), the staircase
boundary generator for the three-lines example, boundary length, exact
max-norm Hausdorff distance, and the p-fractal span rank.

Regions are always compared as finite cell sets at a declared mesh: a cell
grid at mesh exponent k has lattice points m/p^k, 0 <= m <= T*p^k, per axis.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .cartier import CartierAlgebraSpec, MixedPair, tau_mixed
from .ideals import Ideal, colon, frob_power
from .rings import pow_poly


@dataclass(frozen=True)
class TOperator:
    """The reindexing operator Phi(t) -> Phi((t + b)/q), q = p^c."""

    q: int
    offset: tuple

    def __post_init__(self):
        for b in self.offset:
            if not 0 <= b <= self.q:
                raise ValueError(f"offset {b} outside [0, {self.q}]")

    def level(self, p: int) -> int:
        c = 0
        q = self.q
        while q > 1:
            if q % p:
                raise ValueError(f"q = {self.q} is not a power of p = {p}")
            q //= p
            c += 1
        return c


class RasterGrid:
    """Per-cell tau-class ids on [0, T]^n at mesh p^-k.

    ``classes`` maps integer lattice tuples to the content hash of the
    reduced tau basis; ``ideals`` keeps one representative Ideal per class.
    """

    __slots__ = ("p", "T", "k", "n", "classes", "ideals")

    def __init__(self, p, T, k, n, classes, ideals):
        self.p = p
        self.T = Fraction(T)
        self.k = k
        self.n = n
        self.classes = classes
        self.ideals = ideals

    @property
    def side(self) -> int:
        """Lattice points per axis minus one (the top index)."""
        M = self.T * self.p ** self.k
        if M.denominator != 1:
            raise ValueError("T*p^k must be an integer")
        return int(M)

    def coord(self, idx):
        return tuple(Fraction(i, self.p ** self.k) for i in idx)

    def class_at(self, idx):
        return self.classes[tuple(idx)]

    def class_count(self) -> int:
        return len(set(self.classes.values()))

    def cells_of_class(self, hash_id) -> set:
        return {idx for idx, h in self.classes.items() if h == hash_id}


class RegionFunction:
    """Rational-valued function on a raster grid, with an optional ideal label
    marking it as the characteristic function chi_a^N."""

    __slots__ = ("p", "T", "k", "n", "values", "label")

    def __init__(self, p, T, k, n, values, label=None):
        self.p = p
        self.T = Fraction(T)
        self.k = k
        self.n = n
        self.values = values
        self.label = label
        if label is not None and any(v not in (0, 1) for v in values.values()):
            raise ValueError("chi-labeled functions take values in {0, 1}")

    @property
    def side(self) -> int:
        return int(self.T * self.p ** self.k)

    def at(self, idx):
        return self.values.get(tuple(idx), Fraction(0))


def _tau_at_cell(ideals, exponents, C, conf):
    pair = MixedPair(tuple(ideals), tuple(exponents))
    return tau_mixed(pair, C, conf=conf)


def _raster_rows(args):
    ideals, C, conf, p, k, side, n, rows = args
    out = []
    for i0 in rows:
        for rest in iproduct(range(side + 1), repeat=n - 1):
            idx = (i0,) + rest
            exps = tuple(Fraction(i, p ** k) for i in idx)
            tau = _tau_at_cell(ideals, exps, C, conf)
            out.append((idx, tau.content_hash(), tau.basis_strings()))
    return out


def constancy_raster(ideals, T, k, C=None, conf: int = 2, jobs: int = 1) -> RasterGrid:
    """Evaluate tau at every lattice point of [0, T]^n at mesh p^-k.

    ``ideals`` lists the mixed family a_1..a_n; cell coordinates are the
    exponent vectors.  Evaluation is data-parallel over rows when jobs > 1
    (requires a picklable algebra spec).
    """
    ideals = tuple(ideals)
    ring = ideals[0].ring
    if C is None:
        C = CartierAlgebraSpec.full_algebra(ring)
    p = ring.p
    n = len(ideals)
    M = Fraction(T) * p ** k
    if M.denominator != 1:
        raise ValueError("T*p^k must be an integer")
    side = int(M)
    classes, reps = {}, {}
    rows = list(range(side + 1))
    if jobs > 1:
        chunk = max(1, len(rows) // (4 * jobs))
        batches = [rows[i:i + chunk] for i in range(0, len(rows), chunk)]
        payload = [(ideals, C, conf, p, k, side, n, batch) for batch in batches]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_raster_rows, payload)
        for batch_out in results:
            for idx, h, basis in batch_out:
                classes[idx] = h
                if h not in reps:
                    reps[h] = Ideal(ring, [ring.poly(s) for s in basis])
    else:
        for batch_out in map(_raster_rows,
                             [(ideals, C, conf, p, k, side, n, rows)]):
            for idx, h, basis in batch_out:
                classes[idx] = h
                if h not in reps:
                    reps[h] = Ideal(ring, [ring.poly(s) for s in basis])
    return RasterGrid(p, Fraction(T), k, n, classes, reps)


def chi_function(raster: RasterGrid, N: Ideal) -> RegionFunction:
    """chi_a^N: cell value 1 iff tau at the cell is not contained in N."""
    escapes = {}
    for h, tau in raster.ideals.items():
        escapes[h] = 0 if N.contains_ideal(tau) else 1
    values = {idx: Fraction(escapes[h]) for idx, h in raster.classes.items()}
    return RegionFunction(raster.p, raster.T, raster.k, raster.n, values, label=N)


def rho_function(raster: RasterGrid, at_idx) -> RegionFunction:
    """rho_c: the indicator of the constancy region of the cell ``at_idx``."""
    target = raster.class_at(at_idx)
    values = {idx: Fraction(1 if h == target else 0)
              for idx, h in raster.classes.items()}
    return RegionFunction(raster.p, raster.T, raster.k, raster.n, values)


def apply_T(phi: RegionFunction, op: TOperator) -> RegionFunction:
    """Pointwise reindexing t -> (t + b)/q with extension by zero outside the
    source box.  The result lives at mesh k - c."""
    c = op.level(phi.p)
    if phi.k < c:
        raise ValueError(f"mesh exponent {phi.k} too coarse for q = {op.q}")
    if len(op.offset) != phi.n:
        raise ValueError("offset arity mismatch")
    k_t = phi.k - c
    p = phi.p
    side_t = int(phi.T * p ** k_t)
    side_s = phi.side
    values = {}
    for idx in iproduct(range(side_t + 1), repeat=phi.n):
        # (m/p^k_t + b)/q = (m + b p^k_t)/p^(k_t + c) on the source lattice
        j = tuple(m + b * p ** k_t for m, b in zip(idx, op.offset))
        if all(0 <= x <= side_s for x in j):
            values[idx] = phi.values.get(j, Fraction(0))
        else:
            values[idx] = Fraction(0)
    return RegionFunction(p, phi.T, k_t, phi.n, values, label=phi.label)


def compose_T(first: TOperator, then: TOperator, p: int) -> TOperator:
    """The single operator equal to ``then`` applied after ``first``:
    T_{q'|b'} (T_{q|b} Phi) = T_{q q' | b' + q' b} Phi."""
    q, b = first.q, first.offset
    qp, bp = then.q, then.offset
    return TOperator(q * qp, tuple(x + qp * y for x, y in zip(bp, b)))


def transform_chi_symbolic(N: Ideal, offsets, ideals) -> Ideal:
    """Symbolic form of T_{p|b} chi_a^N for principal a_i = (f_i) under the
    full algebra: returns N' = (N^[p] : prod f_i^b_i) with the guarantee
    T_{p|b} chi_a^N = chi_a^N'."""
    ring = N.ring
    p = ring.p
    fs = []
    for a in ideals:
        if len(a.gens) != 1:
            raise ValueError("transform requires principal ideals")
        fs.append(a.gens[0])
    if len(offsets) != len(fs):
        raise ValueError("offset arity mismatch")
    for b in offsets:
        if not 0 <= b <= p:
            raise ValueError(f"offset {b} outside [0, {p}]")
    mult = ring.one()
    for f, b in zip(fs, offsets):
        mult = mult * pow_poly(f, b)
    return colon(frob_power(N, 1), Ideal(ring, [mult]))


# --- the three-lines staircase ----------------------------------------------------


def three_lines_staircase(p: int, depth: int):
    """Exact boundary polyline of the first constancy region for the pair
    (x+y, xy) down to lattice p^-depth.

    Flats sit at t2 = 1 - (b+1)/(2 p^j) over t1 in [b/p^j, (b+1)/p^j] for b odd
    with all leading base-p digits even; elsewhere the boundary follows the
    diagonal t2 = 1 - t1/2 at this resolution.
    """
    if p < 3:
        raise ValueError("staircase requires an odd prime")

    def build(k):
        if k == 0:
            return [(Fraction(0), Fraction(1)), (Fraction(1), Fraction(1, 2))]
        sub = build(k - 1)
        verts = []
        for a in range(p):
            if a % 2 == 1:
                top = (Fraction(a, p), 1 - Fraction(a, 2 * p))
                bottom = (Fraction(a, p), 1 - Fraction(a + 1, 2 * p))
                end = (Fraction(a + 1, p), 1 - Fraction(a + 1, 2 * p))
                verts.extend([top, bottom, end])
            else:
                l = a // 2
                for (s, y) in sub:
                    verts.append((Fraction(s + a, p), Fraction(y + p - l - 1, p)))
        out = []
        for v in verts:
            if not out or out[-1] != v:
                out.append(v)
        return out

    return build(depth)


@dataclass(frozen=True)
class BoundaryLength:
    """Arc length split by exactness: axis-aligned parts are exact rationals,
    diagonal parts are double precision."""

    axis: Fraction
    diagonal: float

    @property
    def total(self) -> float:
        return float(self.axis) + self.diagonal


def boundary_length(polyline) -> BoundaryLength:
    axis = Fraction(0)
    diag = 0.0
    for (x0, y0), (x1, y1) in zip(polyline, polyline[1:]):
        dx, dy = x1 - x0, y1 - y0
        if dx == 0 or dy == 0:
            axis += abs(dx) + abs(dy)
        else:
            diag += float(dx * dx + dy * dy) ** 0.5
    return BoundaryLength(axis, diag)


def staircase_partial_sum(p: int, K: int) -> Fraction:
    """Partial sum of the staircase length series:
    sum_{k=1..K} (3/2) p^-k ((p+1)/2)^(k-1) (p-1)/2; the full series sums
    to 3/2."""
    total = Fraction(0)
    for k in range(1, K + 1):
        total += (Fraction(3, 2) * Fraction(1, p ** k)
                  * Fraction(p + 1, 2) ** (k - 1) * Fraction(p - 1, 2))
    return total


# --- Hausdorff distance -----------------------------------------------------------


def hausdorff_distance(A, B) -> Fraction:
    """Exact max-norm Hausdorff distance between two finite point sets whose
    coordinates are rationals.  Uses a chessboard distance transform when both
    sets live on a common 2D lattice and are large; otherwise brute force."""
    A, B = list(A), list(B)
    if not A or not B:
        raise ValueError("Hausdorff distance needs nonempty sets")
    denoms = {c.denominator for pt in A + B for c in map(Fraction, pt)}
    L = 1
    for d in denoms:
        L = L * d // _gcd(L, d)
    Ai = [tuple(int(Fraction(c) * L) for c in pt) for pt in A]
    Bi = [tuple(int(Fraction(c) * L) for c in pt) for pt in B]
    n = len(Ai[0])
    if n == 2 and len(Ai) * len(Bi) > 4_000_000:
        d = max(_directed_chamfer(Ai, Bi), _directed_chamfer(Bi, Ai))
    else:
        d = max(_directed_brute(Ai, Bi), _directed_brute(Bi, Ai))
    return Fraction(d, L)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _directed_brute(A, B) -> int:
    worst = 0
    for a in A:
        best = None
        for b in B:
            d = max(abs(x - y) for x, y in zip(a, b))
            if best is None or d < best:
                best = d
                if best <= worst:
                    break
        if best > worst:
            worst = best
    return worst


def _directed_chamfer(A, B) -> int:
    """sup_{a in A} min_{b in B} Chebyshev(a, b) on a 2D integer lattice,
    by an exact two-pass chessboard distance transform."""
    pts = A + B
    x0 = min(p[0] for p in pts)
    x1 = max(p[0] for p in pts)
    y0 = min(p[1] for p in pts)
    y1 = max(p[1] for p in pts)
    W, H = x1 - x0 + 1, y1 - y0 + 1
    INF = W + H + 1
    dist = [[INF] * W for _ in range(H)]
    for (x, y) in B:
        dist[y - y0][x - x0] = 0
    for r in range(H):
        row = dist[r]
        up = dist[r - 1] if r > 0 else None
        for c in range(W):
            d = row[c]
            if c > 0 and row[c - 1] + 1 < d:
                d = row[c - 1] + 1
            if up is not None:
                if up[c] + 1 < d:
                    d = up[c] + 1
                if c > 0 and up[c - 1] + 1 < d:
                    d = up[c - 1] + 1
                if c < W - 1 and up[c + 1] + 1 < d:
                    d = up[c + 1] + 1
            row[c] = d
    for r in range(H - 1, -1, -1):
        row = dist[r]
        down = dist[r + 1] if r < H - 1 else None
        for c in range(W - 1, -1, -1):
            d = row[c]
            if c < W - 1 and row[c + 1] + 1 < d:
                d = row[c + 1] + 1
            if down is not None:
                if down[c] + 1 < d:
                    d = down[c] + 1
                if c > 0 and down[c - 1] + 1 < d:
                    d = down[c - 1] + 1
                if c < W - 1 and down[c + 1] + 1 < d:
                    d = down[c + 1] + 1
            row[c] = d
    return max(dist[y - y0][x - x0] for (x, y) in A)


# --- p-fractal span rank ----------------------------------------------------------


def pfractal_span_rank(phi: RegionFunction, c_max: int,
                       out_mesh: int | None = None) -> int:
    """Rank over Q of the span of all T_{q|b} phi_0 with q = p^c, c <= c_max,
    rasterized on a common mesh (default: the coarsest supported, k - c_max).

    Passing the same ``out_mesh`` for several values of c_max compares nested
    row families, making the rank non-decreasing in c_max."""
    if phi.k < c_max:
        raise ValueError("grid mesh does not support all requested operators")
    p = phi.p
    k_t = phi.k - c_max if out_mesh is None else out_mesh
    if k_t < 0 or k_t > phi.k - c_max:
        raise ValueError("out_mesh incompatible with the source mesh")
    side_t = int(phi.T * p ** k_t)
    cols = list(iproduct(range(side_t + 1), repeat=phi.n))
    rows = set()
    for c in range(c_max + 1):
        q = p ** c
        for offset in iproduct(range(q + 1), repeat=phi.n):
            row = []
            for idx in cols:
                j = tuple((m + b * p ** k_t) * p ** (phi.k - k_t - c)
                          for m, b in zip(idx, offset))
                if all(0 <= x <= phi.side for x in j):
                    row.append(phi.values.get(j, Fraction(0)))
                else:
                    row.append(Fraction(0))
            rows.add(tuple(row))
    return _rank_over_q([list(r) for r in rows])


def _rank_over_q(rows) -> int:
    pivots = []
    for row in rows:
        row = list(row)
        for pcol, prow in pivots:
            f = row[pcol]
            if f:
                row = [a - f * b for a, b in zip(row, prow)]
        lead = next((i for i, v in enumerate(row) if v), None)
        if lead is not None:
            lv = row[lead]
            pivots.append((lead, [v / lv for v in row]))
    return len(pivots)

"""Change of p-basis machinery: jacobians, Frobenius jacobians, the dual
generator ratio xi with its det^(p-1) identity, the xi operator on matrices,
and the combinatorial identity behind the same result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations, product as iproduct
from random import Random

from .frobenius import decompose
from .ideals import BudgetExceeded, exact_div
from .rings import Polynomial, RingCtx, frob, partial_derivative, poly_str, pow_poly

FROBJAC_SIZE_BUDGET = 81


class PolyMatrix:
    """Square matrix over a polynomial ring."""

    __slots__ = ("ring", "rows")

    def __init__(self, ring: RingCtx, rows):
        self.ring = ring
        self.rows = tuple(tuple(r) for r in rows)
        n = len(self.rows)
        if n < 1 or any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square and nonempty")

    @property
    def size(self):
        return len(self.rows)

    def det(self) -> Polynomial:
        return det_poly(self.ring, [list(r) for r in self.rows])

    def __repr__(self):
        body = "; ".join(", ".join(poly_str(x) for x in r) for r in self.rows)
        return f"PolyMatrix[{body}]"


def det_poly(ring: RingCtx, rows) -> Polynomial:
    """Fraction-free (Bareiss) determinant with column pivoting."""
    n = len(rows)
    m = [row[:] for row in rows]
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot = next((i for i in range(k + 1, n) if not m[i][k].is_zero()),
                         None)
            if pivot is None:
                return ring.zero()
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = ring.zero() if num.is_zero() else exact_div(num, prev)
            m[i][k] = ring.zero()
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d.scale(sign % ring.p) if sign != 1 else d


def jacobian(new_basis, ring: RingCtx) -> PolyMatrix:
    """J with dy_i = sum_j J_ij dx_j, derivatives along the fiber variables."""
    fiber = list(ring.fiber_indices)
    if len(new_basis) != len(fiber):
        raise ValueError("candidate basis size must match the fiber arity")
    rows = [[partial_derivative(y, j) for j in fiber] for y in new_basis]
    return PolyMatrix(ring, rows)


class FrobJacobian:
    """The q^n x q^n change-of-basis matrix between Frobenius monomial bases.

    Column j holds the decomposition of y^j over the x-monomial basis; entries
    are recorded as multiplication operators on F^e_* S, i.e. as
    sum_j frob(s_j, e) * r_j (which is frob(component, e) on absolute charts).
    """

    __slots__ = ("ring", "e", "indices", "entries")

    def __init__(self, ring, e, indices, entries):
        self.ring = ring
        self.e = e
        self.indices = indices
        self.entries = entries

    @property
    def size(self):
        return len(self.indices)

    def matrix(self) -> PolyMatrix:
        return PolyMatrix(self.ring, self.entries)


def _operator_poly(dec, idx) -> Polynomial:
    ring = dec.ring
    comp = dec.component(idx)
    if dec.mode == "absolute":
        return frob(comp, dec.e) if comp and not comp.is_zero() else ring.zero()
    out = ring.zero()
    for s, r in comp:
        out = out + frob(s, dec.e) * r
    return out


def frobenius_jacobian(new_basis, ring: RingCtx, e: int = 1) -> FrobJacobian:
    """Decompose each monomial y^j of the candidate basis over the chart's own
    fiber monomials; the recomposition identity is enforced."""
    q = ring.p ** e
    nf = len(ring.fiber_indices)
    size = q ** nf
    if size > FROBJAC_SIZE_BUDGET:
        raise BudgetExceeded(f"Frobenius jacobian of size {size} exceeds "
                             f"the budget {FROBJAC_SIZE_BUDGET}")
    mode = "absolute" if ring.n_base == 0 else "relative"
    indices = list(iproduct(range(q), repeat=nf))
    columns = {}
    nb = ring.n_base
    for j in indices:
        yj = ring.one()
        for y, power in zip(new_basis, j):
            yj = yj * pow_poly(y, power)
        dec = decompose(yj, e, mode)
        col = {i: _operator_poly(dec, i) for i in indices}
        recomposed = ring.zero()
        for i in indices:
            recomposed = recomposed + col[i].mul_monomial((0,) * nb + i)
        if recomposed != yj:
            raise ArithmeticError("Frobenius jacobian recomposition failed; "
                                  "this is an internal error")
        columns[j] = col
    entries = [[columns[j][i] for j in indices] for i in indices]
    return FrobJacobian(ring, e, indices, entries)


def _is_unit_operator(det: Polynomial, ring: RingCtx, q: int) -> bool:
    """Is an operator-form determinant a unit of S (x) F^e_* R?"""
    if det.is_zero():
        return False
    if not ring.laurent:
        return det.is_constant()
    if len(det.terms) != 1:
        return False
    (m, _), = det.terms.items()
    return all(m[i] % q == 0 for i in ring.fiber_indices)


def validate_basis(candidate, ring: RingCtx, e: int = 1):
    """(is_d_basis, is_p_basis) for a candidate fiber basis.

    d-basis: det of the jacobian is a unit.  p-basis: the Frobenius jacobian
    is invertible over S (x) F^e_* R.  The two answers must agree (they are
    equivalent for regular charts); disagreement is a fatal internal error.
    """
    J = jacobian(candidate, ring)
    is_d = J.det().is_unit()
    q = ring.p ** e
    Xi = frobenius_jacobian(candidate, ring, e)
    is_p = _is_unit_operator(Xi.matrix().det(), ring, q)
    if is_d != is_p:
        raise ArithmeticError(
            f"d-basis/p-basis disagreement for {[poly_str(c) for c in candidate]}: "
            f"d={is_d}, p={is_p}; this is an internal error")
    return is_d, is_p


def dual_generator_ratio(new_basis, ring: RingCtx, e: int = 1) -> Polynomial:
    """The unit xi with (F_* x^(q-1))^dual = (F_* y^(q-1))^dual . F_* xi.

    Extracted from the top row of the base-change relation at e = 1; larger e
    reuses the e = 1 machinery through the cocycle
    xi_{e+1} = xi_1 * frob(xi_e, 1).  The identity xi = det(J)^(q-1) is
    asserted before returning.
    """
    if ring.n_base != 0:
        raise ValueError("dual generator ratio is defined on absolute charts")
    is_d, is_p = validate_basis(new_basis, ring, 1)
    if not (is_d and is_p):
        raise ValueError("candidate is not a p-basis")
    xi = _dual_ratio_level_one(new_basis, ring)
    for _ in range(e - 1):
        xi = _dual_ratio_level_one(new_basis, ring) * frob(xi, 1)
    det = jacobian(new_basis, ring).det()
    expected = pow_poly(det, ring.p ** e - 1)
    if xi != expected:
        raise ArithmeticError("xi != det(J)^(q-1); this is an internal error")
    return xi


def _dual_ratio_level_one(new_basis, ring: RingCtx) -> Polynomial:
    p = ring.p
    n = ring.nvars
    top = (p - 1,) * n
    xi = ring.zero()
    for j in iproduct(range(p), repeat=n):
        yj = ring.one()
        for y, power in zip(new_basis, j):
            yj = yj * pow_poly(y, power)
        comp = decompose(yj, 1, "absolute").component(top)
        if comp.is_zero():
            continue
        rest = ring.one()
        for y, power in zip(new_basis, j):
            rest = rest * pow_poly(y, p - 1 - power)
        xi = xi + frob(comp, 1) * rest
    return xi


def dual_ratio_direct(new_basis, ring: RingCtx, e: int) -> Polynomial:
    """Level-e extraction done in one shot; independent cross-check of the
    cocycle route used by dual_generator_ratio."""
    q = ring.p ** e
    n = ring.nvars
    top = (q - 1,) * n
    xi = ring.zero()
    for j in iproduct(range(q), repeat=n):
        yj = ring.one()
        for y, power in zip(new_basis, j):
            yj = yj * pow_poly(y, power)
        comp = decompose(yj, e, "absolute").component(top)
        if comp.is_zero():
            continue
        rest = ring.one()
        for y, power in zip(new_basis, j):
            rest = rest * pow_poly(y, q - 1 - power)
        xi = xi + frob(comp, e) * rest
    return xi


# --- the xi operator on scalar matrices -------------------------------------------


def admissible_matrices(p: int, n: int):
    """All n x n matrices with entries in [0, p-1] whose rows and columns each
    sum to p-1."""
    target = p - 1

    def rows(remaining_cols, depth):
        if depth == 0:
            if all(c == 0 for c in remaining_cols):
                yield ()
            return
        for row in _compositions(target, n, remaining_cols):
            rest = tuple(c - r for c, r in zip(remaining_cols, row))
            for tail in rows(rest, depth - 1):
                yield (row,) + tail

    yield from rows((target,) * n, n)


def _compositions(total, parts, caps):
    if parts == 1:
        if 0 <= total <= caps[0]:
            yield (total,)
        return
    for head in range(min(total, caps[0]) + 1):
        for tail in _compositions(total - head, parts - 1, caps[1:]):
            yield (head,) + tail


def _xi_terms(p: int, n: int):
    """Precomputed (matrix, multinomial coefficient mod p) pairs."""
    key = (p, n)
    cached = _XI_TERMS_CACHE.get(key)
    if cached is None:
        terms = []
        fact = math.factorial
        for a in admissible_matrices(p, n):
            coeff = 1
            for k in range(n):
                col = fact(p - 1)
                for l in range(n):
                    col //= fact(a[l][k])
                coeff = coeff * col % p
            terms.append((a, coeff))
        cached = _XI_TERMS_CACHE[key] = terms
    return cached


_XI_TERMS_CACHE: dict = {}


def xi_operator(mu, p: int) -> int:
    """Exact evaluation mod p of the sum over arithmetic doubly stochastic
    matrices a of (p-1)!^n / prod a_lk! * prod mu_lk^a_lk."""
    n = len(mu)
    total = 0
    for a, coeff in _xi_terms(p, n):
        prod = coeff
        for l in range(n):
            for k in range(n):
                e = a[l][k]
                if e:
                    prod = prod * pow(mu[l][k], e, p) % p
                    if not prod:
                        break
            if not prod:
                break
        total = (total + prod) % p
    return total


def xi_operator_poly(mu_rows, p: int) -> Polynomial:
    """Same sum with polynomial entries; the ring-level identity oracle."""
    ring = mu_rows[0][0].ring
    n = len(mu_rows)
    total = ring.zero()
    for a, coeff in _xi_terms(p, n):
        prod = ring.const(coeff)
        for l in range(n):
            for k in range(n):
                e = a[l][k]
                if e:
                    prod = prod * pow_poly(mu_rows[l][k], e)
        total = total + prod
    return total


def det_mod_p(mu, p: int) -> int:
    """Determinant of an integer matrix mod p by Gaussian elimination."""
    n = len(mu)
    m = [[x % p for x in row] for row in mu]
    det = 1
    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][k]), None)
        if pivot is None:
            return 0
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            det = -det % p
        det = det * m[k][k] % p
        inv = pow(m[k][k], p - 2, p)
        for i in range(k + 1, n):
            f = m[i][k] * inv % p
            if f:
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[k])]
    return det % p


@dataclass
class IdentityReport:
    p: int
    n: int
    mode: str
    checked: int = 0
    pairs_checked: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def verify_det_identity(p: int, n: int, mode: str = "exhaustive",
                        count: int = 1000, seed: int = 0) -> IdentityReport:
    """Check xi(mu) = det(mu)^(p-1) and multiplicativity xi(mu nu) =
    xi(mu) xi(nu) over GL_n(F_p), exhaustively or on seeded random samples."""
    report = IdentityReport(p, n, mode)

    def check_one(mu):
        report.checked += 1
        lhs = xi_operator(mu, p)
        rhs = pow(det_mod_p(mu, p), p - 1, p)
        if lhs != rhs:
            report.counterexamples.append(("identity", mu, lhs, rhs))

    def check_pair(mu, nu):
        report.pairs_checked += 1
        prod = _mat_mul(mu, nu, p)
        lhs = xi_operator(prod, p)
        rhs = xi_operator(mu, p) * xi_operator(nu, p) % p
        if lhs != rhs:
            report.counterexamples.append(("multiplicativity", (mu, nu), lhs, rhs))

    if mode == "exhaustive":
        if p ** (n * n) > 1_000_000:
            raise BudgetExceeded("exhaustive sweep too large")
        group = [mu for mu in _all_matrices(p, n) if det_mod_p(mu, p)]
        for mu in group:
            check_one(mu)
        for mu in group:
            for nu in group:
                check_pair(mu, nu)
    elif mode == "random":
        rng = Random(seed)
        sample = [_random_invertible(rng, p, n) for _ in range(count)]
        for mu in sample:
            check_one(mu)
        for mu, nu in zip(sample, sample[1:]):
            check_pair(mu, nu)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return report


def _all_matrices(p, n):
    for flat in iproduct(range(p), repeat=n * n):
        yield tuple(flat[i * n:(i + 1) * n] for i in range(n))


def _random_invertible(rng, p, n):
    while True:
        mu = tuple(tuple(rng.randrange(p) for _ in range(n)) for _ in range(n))
        if det_mod_p(mu, p):
            return mu


def _mat_mul(a, b, p):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) % p
                       for j in range(n)) for i in range(n))


# --- the combinatorial identity ----------------------------------------------------


def _sgn(sigma) -> int:
    inv = sum(1 for i in range(len(sigma)) for j in range(i + 1, len(sigma))
              if sigma[i] > sigma[j])
    return -1 if inv % 2 else 1


def combinatorial_identity_check(p: int, n: int, a):
    """For an admissible matrix a, compare the multinomial side with the
    signed sum over b: S_n -> [0, p-1] with sum b = p-1 and
    sum_sigma b_sigma P_sigma = a.  Returns (lhs, rhs, equal) mod p."""
    a = tuple(tuple(row) for row in a)
    if any(not 0 <= x <= p - 1 for row in a for x in row):
        raise ValueError("entries must lie in [0, p-1]")
    if any(sum(row) != p - 1 for row in a) or \
       any(sum(a[l][k] for l in range(n)) != p - 1 for k in range(n)):
        raise ValueError("rows and columns must each sum to p-1")
    fact = math.factorial
    lhs = 1
    for k in range(n):
        col = fact(p - 1)
        for l in range(n):
            col //= fact(a[l][k])
        lhs = lhs * col % p
    perms = list(permutations(range(n)))
    signs = [_sgn(s) for s in perms]
    rhs = 0
    for b in _compositions(p - 1, len(perms), (p - 1,) * len(perms)):
        built = [[0] * n for _ in range(n)]
        for b_s, sigma in zip(b, perms):
            for k in range(n):
                built[k][sigma[k]] += b_s
        if tuple(tuple(r) for r in built) != a:
            continue
        coeff = fact(p - 1)
        for x in b:
            coeff //= fact(x)
        sign = 1
        for b_s, s in zip(b, signs):
            if s < 0 and b_s % 2:
                sign = -sign
        rhs = (rhs + sign * coeff) % p
    return lhs % p, rhs % p, lhs % p == rhs % p


def falling_factorial_sums(p: int):
    """sum_{j=i}^{p-1} prod_{k<i} (j-k) mod p for i = 1..p-1; the claim is
    0 for i <= p-2 and -1 for i = p-1."""
    sums = [0] * p  # index i
    for j in range(p):
        ff = 1
        for i in range(1, j + 1):
            ff = ff * (j - i + 1) % p
            sums[i] = (sums[i] + ff) % p
    return {i: sums[i] for i in range(1, p)}


def falling_factorial_claim_holds(p: int) -> bool:
    sums = falling_factorial_sums(p)
    return all(v == 0 for i, v in sums.items() if i <= p - 2) and \
        sums[p - 1] == (p - 1) % p

"""Canonical ideal arithmetic over F_p[x_1..x_n] via reduced Groebner bases.

Equality, membership, colon, sums, products, and Frobenius powers are all
decided through the unique reduced Groebner basis for the ring's fixed term
order.  Ideals of a Laurent ring are represented canonically by the
saturation (with respect to the product of all variables) of the ideal
obtained by clearing denominators; monomials are units there, so this loses
nothing.
"""

from __future__ import annotations

import hashlib

from .rings import (Polynomial, RingCtx, frob, order_key, poly_str, pow_poly)

S_PAIR_BUDGET = 200_000


class BudgetExceeded(RuntimeError):
    pass


# --- polynomial division --------------------------------------------------------


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def normal_form(f: Polynomial, basis) -> Polynomial:
    """Fully reduced remainder of f modulo the list of divisors."""
    ring = f.ring
    key = order_key(ring)
    inv = ring.modulus.inv
    data = [(g.lead(), g) for g in basis if g]
    rem = {}
    work = dict(f.terms)
    p = ring.p
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        for (gm, gc), g in data:
            if _divides(gm, m):
                shift = tuple(x - y for x, y in zip(m, gm))
                factor = (c * inv(gc)) % p
                for tm, tc in g.terms.items():
                    if tm == gm:
                        continue
                    t = tuple(x + y for x, y in zip(tm, shift))
                    v = (work.get(t, 0) - factor * tc) % p
                    if v:
                        work[t] = v
                    else:
                        work.pop(t, None)
                break
        else:
            rem[m] = c
    return Polynomial(ring, rem)


def exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    """Quotient f/g when g divides f exactly; raises otherwise."""
    ring = f.ring
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    key = order_key(ring)
    inv = ring.modulus.inv
    gm, gc = g.lead()
    p = ring.p
    quot = {}
    work = dict(f.terms)
    while work:
        m = max(work, key=key)
        shift = tuple(x - y for x, y in zip(m, gm))
        if not ring.laurent and any(x < 0 for x in shift):
            raise ValueError("not an exact multiple")
        factor = (work[m] * inv(gc)) % p
        quot[shift] = factor
        for tm, tc in g.terms.items():
            t = tuple(x + y for x, y in zip(tm, shift))
            v = (work.get(t, 0) - factor * tc) % p
            if v:
                work[t] = v
            else:
                work.pop(t, None)
    return Polynomial(ring, quot)


# --- Buchberger ------------------------------------------------------------------


def _spoly(f, g):
    ring = f.ring
    fm, fc = f.lead()
    gm, gc = g.lead()
    lcm = tuple(max(a, b) for a, b in zip(fm, gm))
    inv = ring.modulus.inv
    a = f.mul_monomial(tuple(x - y for x, y in zip(lcm, fm)), inv(fc))
    b = g.mul_monomial(tuple(x - y for x, y in zip(lcm, gm)), inv(gc))
    return a - b


def buchberger(gens, budget=S_PAIR_BUDGET):
    """Groebner basis of the span of gens (non-Laurent ring)."""
    G = [g for g in gens if g]
    if not G:
        return []
    ring = G[0].ring
    # units shortcut and monomial pre-filtering keep the common cases cheap
    for g in G:
        if g.is_constant():
            return [ring.one()]
    G = _prune_monomial_multiples(list(dict.fromkeys(G)))
    if all(g.is_monomial() for g in G):
        return G
    pairs = [(i, j) for i in range(len(G)) for j in range(i)]
    count = 0
    while pairs:
        count += 1
        if count > budget:
            raise BudgetExceeded(f"Buchberger S-pair budget {budget} exceeded")
        i, j = pairs.pop()
        fm = G[i].lead()[0]
        gm = G[j].lead()[0]
        if all(min(a, b) == 0 for a, b in zip(fm, gm)):  # product criterion
            continue
        r = normal_form(_spoly(G[i], G[j]), G)
        if r:
            if r.is_constant():
                return [ring.one()]
            G.append(r)
            pairs.extend((len(G) - 1, k) for k in range(len(G) - 1))
    return G


def _prune_monomial_multiples(G):
    """Drop monomial generators that are multiples of other monomial
    generators; safe on arbitrary (non-GB) input."""
    monos = [(i, g.lead()[0]) for i, g in enumerate(G) if g.is_monomial()]
    drop = set()
    for i, mi in monos:
        for j, mj in monos:
            if i != j and j not in drop and _divides(mj, mi) and mi != mj:
                drop.add(i)
                break
    return [g for i, g in enumerate(G) if i not in drop]


def _prune_redundant(G):
    """Drop GB elements whose lead monomial is a multiple of another's;
    valid only when G is already a Groebner basis."""
    out = []
    leads = [g.lead()[0] for g in G]
    for i, g in enumerate(G):
        mi = leads[i]
        dominated = False
        for j, mj in enumerate(leads):
            if i == j:
                continue
            if _divides(mj, mi) and not (mj == mi and j > i):
                dominated = True
                break
        if not dominated:
            out.append(g)
    return out


def reduce_basis(G):
    """Unique reduced Groebner basis: minimal, monic, tails fully reduced."""
    if not G:
        return ()
    ring = G[0].ring
    key = order_key(ring)
    minimal = _prune_redundant(sorted(G, key=lambda g: key(g.lead()[0])))
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        r = normal_form(g, others)
        if r:
            reduced.append(r.scale(ring.modulus.inv(r.lead()[1])))
    reduced.sort(key=lambda g: key(g.lead()[0]), reverse=True)
    return tuple(reduced)


# --- ring plumbing for elimination and Laurent normalization ---------------------


def _twin_poly_ring(ring: RingCtx) -> RingCtx:
    return RingCtx(ring.names, ring.modulus, laurent=False,
                   n_base=ring.n_base, order=ring.order)


def _ext_ring(ring: RingCtx, k: int = 1) -> RingCtx:
    aux = tuple(f"@e{i}" for i in range(k))
    return RingCtx(aux + ring.names, ring.modulus, laurent=False,
                   order=("elim", k))


def _lift(f: Polynomial, ext: RingCtx, k: int) -> Polynomial:
    return Polynomial(ext, {(0,) * k + m: c for m, c in f.terms.items()})


def _drop(f: Polynomial, ring: RingCtx, k: int) -> Polynomial:
    return Polynomial(ring, {m[k:]: c for m, c in f.terms.items()})


def _strip_to_poly(f: Polynomial, twin: RingCtx) -> Polynomial:
    """Clear negative exponents and strip the monomial content of f."""
    if not f.terms:
        return Polynomial(twin, {})
    mins = [min(m[i] for m in f.terms) for i in range(len(next(iter(f.terms))))]
    return Polynomial(twin, {tuple(x - lo for x, lo in zip(m, mins)): c
                             for m, c in f.terms.items()})


def _saturate_gens(gens, ring: RingCtx):
    """Generators of (gens) : (x_1*...*x_n)^infinity, by the Rabinowitsch trick."""
    if not gens:
        return []
    ext = _ext_ring(ring, 1)
    m_all = ext.monomial((0,) + (1,) * ring.nvars)
    sys = [_lift(g, ext, 1) for g in gens]
    sys.append(ext.one() - ext.var("@e0") * m_all)
    gb = buchberger(sys)
    return [_drop(g, ring, 1) for g in reduce_basis(gb)
            if all(m[0] == 0 for m in g.terms)]


# --- the Ideal type ---------------------------------------------------------------


class Ideal:
    """Generator list plus the lazily cached reduced Groebner basis."""

    __slots__ = ("ring", "gens", "_gb", "_key")

    def __init__(self, ring: RingCtx, gens):
        self.ring = ring
        self.gens = tuple(g for g in gens if g and not g.is_zero())
        for g in self.gens:
            if g.ring != ring:
                raise ValueError("generator from a different ring")
        self._gb = None
        self._key = None

    @classmethod
    def from_strings(cls, ring: RingCtx, exprs):
        return cls(ring, [ring.poly(s) for s in exprs])

    def cache_key(self):
        if self._key is None:
            key = order_key(self.ring)
            self._key = (self.ring,
                         tuple(sorted(self.gens, key=lambda g: key(g.lead()[0]))))
        return self._key

    def groebner(self):
        """The unique reduced Groebner basis (tuple of Polynomials).

        For Laurent rings this is the reduced basis of the saturated
        polynomial representative; its elements generate the same Laurent
        ideal.
        """
        if self._gb is None:
            if not self.gens:
                self._gb = ()
            elif self.ring.laurent:
                twin = _twin_poly_ring(self.ring)
                stripped = [_strip_to_poly(g, twin) for g in self.gens]
                if any(g.is_unit() for g in stripped):
                    sat = [twin.one()]
                else:
                    sat = _saturate_gens(stripped, twin)
                back = [Polynomial(self.ring, dict(g.terms)) for g in sat]
                self._gb = reduce_basis(back) if back else ()
            else:
                self._gb = reduce_basis(buchberger(list(self.gens)))
        return self._gb

    # --- predicates ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.groebner()

    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_one()

    def contains(self, f: Polynomial) -> bool:
        if f.ring != self.ring:
            raise ValueError("ring mismatch")
        if f.is_zero():
            return True
        if self.ring.laurent:
            twin = _twin_poly_ring(self.ring)
            f = Polynomial(self.ring, dict(_strip_to_poly(f, twin).terms))
        return normal_form(f, list(self.groebner())).is_zero()

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.gens)

    def basis_strings(self):
        return tuple(poly_str(g) for g in self.groebner())

    def canonical_str(self) -> str:
        return "{" + ", ".join(self.basis_strings()) + "}"

    def content_hash(self) -> str:
        """Stable 64-bit hash of the printed reduced basis."""
        h = hashlib.blake2b(self.canonical_str().encode(), digest_size=8)
        return h.hexdigest()

    def __repr__(self):
        gens = ", ".join(poly_str(g) for g in self.gens)
        return f"Ideal({gens})"


def ideal_eq(a: Ideal, b: Ideal) -> bool:
    if a.ring != b.ring:
        raise ValueError("ring mismatch")
    return a.groebner() == b.groebner()


def sum_ideal(a: Ideal, b: Ideal) -> Ideal:
    if a.ring != b.ring:
        raise ValueError("ring mismatch")
    return Ideal(a.ring, a.gens + b.gens)


def product(a: Ideal, b: Ideal) -> Ideal:
    if a.ring != b.ring:
        raise ValueError("ring mismatch")
    if not a.gens or not b.gens:
        return Ideal(a.ring, [])
    return Ideal(a.ring, [f * g for f in a.gens for g in b.gens])


def power(I: Ideal, m: int) -> Ideal:
    """I^m, exactly.  Principal ideals use base-p splitting of the generator;
    monomial ideals enumerate exponent sums; the general case multiplies out
    with Groebner trimming between steps."""
    if m < 0:
        raise ValueError("negative ideal power")
    if m == 0:
        return Ideal(I.ring, [I.ring.one()])
    gens = I.gens
    if len(gens) <= 1:
        return Ideal(I.ring, [pow_poly(g, m) for g in gens])
    if all(g.is_monomial() for g in gens):
        vecs = [next(iter(g.terms.items())) for g in gens]
        if len(vecs) * m > 2_000_000:
            raise BudgetExceeded("monomial ideal power too large")
        sums = {(0,) * I.ring.nvars: 1}
        for _ in range(m):
            nxt = {}
            for base, c0 in sums.items():
                for vec, c in vecs:
                    key = tuple(x + y for x, y in zip(base, vec))
                    nxt[key] = (c0 * c) % I.ring.p
            sums = nxt
            if len(sums) > 2_000_000:
                raise BudgetExceeded("monomial ideal power too large")
        return Ideal(I.ring, [I.ring.monomial(k, c) for k, c in sums.items()])
    acc = Ideal(I.ring, [I.ring.one()])
    for _ in range(m):
        acc = Ideal(I.ring, list(product(acc, I).groebner()))
    return acc


def frob_power(I: Ideal, e: int) -> Ideal:
    """The Frobenius power I^[p^e], generated by p^e-th powers of generators."""
    return Ideal(I.ring, [frob(g, e) for g in I.gens])


def intersect(a: Ideal, b: Ideal) -> Ideal:
    if a.ring != b.ring:
        raise ValueError("ring mismatch")
    ring = a.ring
    if ring.laurent:
        # work with the saturated polynomial representatives
        a = Ideal(ring, list(a.groebner()))
        b = Ideal(ring, list(b.groebner()))
    work = _twin_poly_ring(ring) if ring.laurent else ring
    ext = _ext_ring(work, 1)
    t = ext.var("@e0")
    one = ext.one()
    sys = [t * _lift(Polynomial(work, dict(g.terms)), ext, 1) for g in a.gens]
    sys += [(one - t) * _lift(Polynomial(work, dict(g.terms)), ext, 1)
            for g in b.gens]
    gb = reduce_basis(buchberger(sys))
    gens = [_drop(g, work, 1) for g in gb if all(m[0] == 0 for m in g.terms)]
    return Ideal(ring, [Polynomial(ring, dict(g.terms)) for g in gens])


def colon(I: Ideal, J: Ideal) -> Ideal:
    """The ideal quotient (I : J) = {f : f*J within I}, exact."""
    if I.ring != J.ring:
        raise ValueError("ring mismatch")
    if J.is_zero():
        raise ValueError("colon by the zero ideal")
    result = None
    for g in J.gens:
        part = _colon_single(I, g)
        result = part if result is None else intersect(result, part)
    return result


def _colon_single(I: Ideal, g: Polynomial) -> Ideal:
    if g.is_zero():
        raise ValueError("colon by zero generator")
    ring = I.ring
    if ring.laurent:
        twin = _twin_poly_ring(ring)
        g = Polynomial(ring, dict(_strip_to_poly(g, twin).terms))
    if g.is_unit():
        return Ideal(ring, list(I.groebner()))
    meet = intersect(I, Ideal(ring, [g]))
    return Ideal(ring, [exact_div(f, g) for f in meet.gens])

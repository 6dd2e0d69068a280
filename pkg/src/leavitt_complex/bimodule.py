"""The right action of B = L_k(Q^op) on the projective Leavitt complex.

The action is defined on the generators e_j, a^op and (a^op)* and extended
along normal terms; it never goes through multiplication in B, so that the
relation checks below test something.
"""
from __future__ import annotations

import random

from .certificates import Certificate, window_dict
from .complex import BasisVector, ComplexWindow, apply_linear, component_basis
from .linalg import QQ_FIELD, Field, add_into
from .lpa import LeavittAlgebra, LpaElement, NormalTerm
from .quiver import Path, Quiver, t_set


class Bimodule:
    """P as a right B-module.

    ``flip_special`` negates the special-arrow branch of the a^op action; it
    exists only to provide a broken action for negative controls.
    """

    def __init__(self, quiver: Quiver, field: Field = QQ_FIELD,
                 algebra: LeavittAlgebra | None = None, flip_special: bool = False):
        self.quiver = quiver
        self.field = field
        self.algebra = algebra or LeavittAlgebra(quiver, field)
        self.flip_special = flip_special
        self._cache: dict = {}

    # -- generators on basis vectors ----------------------------------------------

    def vertex_on(self, b: BasisVector, j: str) -> dict:
        return {b: 1} if b.q.target == j else {}

    def arrow_on(self, b: BasisVector, a: str) -> dict:
        """b . a^op."""
        Q = self.quiver
        p, q = b.p, b.q
        if q.is_trivial and not p.is_trivial and p.first == a and Q.is_associated(a):
            pt = p.tilde()
            sign = -1 if self.flip_special else 1
            out = {b.with_pair(pt, Path.trivial(Q.t(a))): sign}
            for beta in t_set(Q, a):
                bp = Q.arrow_path(beta)
                out[b.with_pair(bp.then(pt), bp)] = -sign
            return out
        if Q.s(a) != q.target:
            return {}
        return {b.with_pair(p, Q.extend(q, a)): 1}

    def ghost_on(self, b: BasisVector, a: str) -> dict:
        """b . (a^op)*."""
        Q = self.quiver
        p, q = b.p, b.q
        if not q.is_trivial:
            return {b.with_pair(p, q.hat()): 1} if q.last == a else {}
        if p.source != Q.t(a):
            return {}
        ap = Q.arrow_path(a)
        return {b.with_pair(ap.then(p), Path.trivial(Q.s(a))): 1}

    def term_on(self, b: BasisVector, t: NormalTerm) -> dict:
        """b . g* r: ghosts along g in order of traversal, then arrows of r from its start."""
        key = (b, t)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if t.ghost.is_trivial and t.real.is_trivial:
            out = self.vertex_on(b, t.ghost.source)
        else:
            out = {b: 1}
            for a in t.ghost.arrows:
                out = apply_linear(lambda v: self.ghost_on(v, a), out)
            for a in reversed(t.real.arrows):
                out = apply_linear(lambda v: self.arrow_on(v, a), out)
        self._cache[key] = out
        return out

    # -- elements -----------------------------------------------------------------

    def act_vertex(self, m: dict, j: str) -> dict:
        return apply_linear(lambda b: self.vertex_on(b, j), m)

    def act_arrow(self, m: dict, a: str) -> dict:
        return apply_linear(lambda b: self.arrow_on(b, a), m)

    def act_ghost(self, m: dict, a: str) -> dict:
        return apply_linear(lambda b: self.ghost_on(b, a), m)

    def act(self, m: dict, x: LpaElement) -> dict:
        out: dict = {}
        for b, c in m.items():
            for t, d in x.terms.items():
                for k, e in self.term_on(b, t).items():
                    add_into(out, k, c * d * e)
        return out

    def phi(self, x: LpaElement) -> dict:
        """(p^op)* q^op -> e_{t(p)} z(p,q)."""
        out: dict = {}
        for t, c in x.terms.items():
            p, q = self.algebra.chi_inv(t)
            add_into(out, BasisVector(p.target, None, p, q), c)
        return out

    def phi_beta(self, beta: str, x: LpaElement) -> dict:
        """(p^op)* q^op -> beta z(p,q) if s(beta) = t(p), else 0."""
        s = self.quiver.s(beta)
        out: dict = {}
        for t, c in x.terms.items():
            p, q = self.algebra.chi_inv(t)
            if p.target == s:
                add_into(out, BasisVector(s, beta, p, q), c)
        return out

    def unit_section(self) -> dict:
        """phi(1) = sum_i e_i z(e_i, e_i)."""
        return self.phi(self.algebra.one())


# -- verification ------------------------------------------------------------------

def _window_vectors(quiver: Quiver, lmin: int, lmax: int, N: int) -> list:
    return [b for l in range(lmin, lmax + 1) for b in component_basis(quiver, l, N)]


def _random_module_element(rng: random.Random, vectors: list, fld: Field, size: int = 3) -> dict:
    out: dict = {}
    degs = sorted({b.degree for b in vectors})
    if not degs:
        return out
    l = rng.choice(degs)
    pool = [b for b in vectors if b.degree == l]
    for b in rng.sample(pool, min(size, len(pool))):
        add_into(out, b, fld.random_nonzero(rng))
    return out


def verify_relations(M: Bimodule, lmin: int = -2, lmax: int = 2, N: int = 4,
                     samples: int = 20, seed: int = 0) -> Certificate:
    """Every defining relation of B acts identically on basis vectors and random elements."""
    Q, B, fld = M.quiver, M.algebra, M.field
    cert = Certificate("action-relations", Q.name, window_dict(lmin, lmax, N), True,
                       "the generator action respects the defining relations of B")
    vectors = _window_vectors(Q, lmin, lmax, N)
    rng = random.Random(seed)
    elements = [{b: fld.one} for b in vectors]
    elements += [_random_module_element(rng, vectors, fld) for _ in range(samples)]
    V = Q.vertices
    arrows = [a.id for a in Q.arrows]
    ev = M.act_vertex
    ea, eg = M.act_arrow, M.act_ghost

    def diff(a: dict, b: dict) -> bool:
        return a != b

    counts = dict.fromkeys(["0", "1", "2", "3", "4"], 0)
    for m in elements:
        for i in V:
            for j in V:
                lhs = ev(ev(m, i), j)
                rhs = ev(m, i) if i == j else {}
                counts["0"] += 1
                if diff(lhs, rhs):
                    return cert.fail({"relation": "0", "element": _fmt(m), "vertices": [i, j]})
        for a in arrows:
            # in Q^op the arrow a runs from t(a) to s(a)
            x = ea(m, a)
            counts["1"] += 1
            if diff(ea(ev(m, Q.s(a)), a), x) or diff(ev(x, Q.t(a)), x):
                return cert.fail({"relation": "1", "element": _fmt(m), "arrow": a})
            y = eg(m, a)
            counts["2"] += 1
            if diff(eg(ev(m, Q.t(a)), a), y) or diff(ev(y, Q.s(a)), y):
                return cert.fail({"relation": "2", "element": _fmt(m), "arrow": a})
            for b in arrows:
                lhs = eg(ea(m, a), b)
                rhs = ev(m, Q.s(a)) if a == b else {}
                counts["3"] += 1
                if diff(lhs, rhs):
                    return cert.fail({"relation": "3", "element": _fmt(m), "arrows": [a, b]})
        for i in V:
            acc: dict = {}
            for a in Q.incoming[i]:
                for k, c in ea(eg(m, a), a).items():
                    add_into(acc, k, c)
            counts["4"] += 1
            if diff(acc, ev(m, i)):
                return cert.fail({"relation": "4", "element": _fmt(m), "vertex": i})
    cert.dimensions = {"elements": len(elements), "checks": counts}
    return cert


def verify_well_defined(M: Bimodule, lmin: int = -2, lmax: int = 2, N: int = 4,
                        samples: int = 50, seed: int = 0) -> Certificate:
    """m . (xy) = (m . x) . y for random m, x, y."""
    Q, B = M.quiver, M.algebra
    cert = Certificate("action-associativity", Q.name, window_dict(lmin, lmax, N), True,
                       "the action of B is associative")
    vectors = _window_vectors(Q, lmin, lmax, N)
    rng = random.Random(seed)
    for k in range(samples):
        m = _random_module_element(rng, vectors, M.field)
        x = B.random_element(rng.randrange(10**9), (-2, 2), 3, 3)
        y = B.random_element(rng.randrange(10**9), (-2, 2), 3, 3)
        if M.act(m, B.multiply(x, y)) != M.act(M.act(m, x), y):
            return cert.fail({"sample": k, "m": _fmt(m), "x": B.format(x), "y": B.format(y)})
    cert.dimensions = {"samples": samples}
    return cert


def verify_dg_compat(w: ComplexWindow, M: Bimodule) -> Certificate:
    """delta(m . g) = delta(m) . g for interior m and every generator g."""
    Q = w.quiver
    cert = w.certificate("dg-compatibility", "the differential is a map of right B-modules")
    gens = [("vertex", v) for v in Q.vertices] + [("arrow", a.id) for a in Q.arrows] \
        + [("ghost", a.id) for a in Q.arrows]
    act = {"vertex": M.act_vertex, "arrow": M.act_arrow, "ghost": M.act_ghost}
    count = 0
    for l in w.degrees:
        for b in w.basis(l):
            if not w.interior(b):
                continue
            m = {b: w.field.one}
            for kind, g in gens:
                count += 1
                if w.apply(act[kind](m, g)) != act[kind](w.apply(m), g):
                    return cert.fail({"vector": str(b), "generator": [kind, g]})
    cert.dimensions["checks"] = count
    return cert


def windowed_terms(B: LeavittAlgebra, n: int, N: int) -> list[NormalTerm]:
    """Normal terms of degree n and length <= N, via the associated-pair sets."""
    from .quiver import enumerate_lambda
    out = [B.chi(p, q) for i in B.quiver.vertices for p, q in enumerate_lambda(B.quiver, i, n, N)]
    return sorted(out, key=B.term_key)


def verify_delta_phi(w: ComplexWindow, M: Bimodule, samples: int = 10, seed: int = 0) -> Certificate:
    """delta(phi(b)) = sum_a phi_a(a^op b) on every windowed term and random combinations."""
    Q, B = w.quiver, M.algebra
    cert = w.certificate("delta-phi", "the differential of phi(b) is sum_a phi_a(a^op b)")
    rng = random.Random(seed)

    def both(x: LpaElement) -> tuple[dict, dict]:
        lhs = w.apply(M.phi(x))
        rhs: dict = {}
        for a in Q.arrows:
            for k, c in M.phi_beta(a.id, B.multiply(B.arrow(a.id), x)).items():
                add_into(rhs, k, c)
        return lhs, rhs

    count = 0
    for l in w.degrees:
        terms = windowed_terms(B, l, w.N)
        for t in terms:
            lhs, rhs = both(B.term(t))
            count += 1
            if lhs != rhs:
                return cert.fail({"term": B.format_term(t)})
        for _ in range(samples if terms else 0):
            chosen = rng.sample(terms, min(3, len(terms)))
            x = B.element({t: M.field.random_nonzero(rng) for t in chosen})
            lhs, rhs = both(x)
            count += 1
            if lhs != rhs:
                return cert.fail({"element": B.format(x)})
    cert.dimensions["checks"] = count
    return cert


def verify_unit_section(w: ComplexWindow, M: Bimodule) -> Certificate:
    """phi(1) . chi(p,q) = e_{t(p)} z(p,q) and beta z(e,e) . chi(p,q) = [s(beta)=t(p)] beta z(p,q)."""
    Q, B = w.quiver, M.algebra
    cert = w.certificate("unit-section", "acting on the unit section recovers the basis")
    unit = M.unit_section()
    count = 0
    for l in w.degrees:
        for t in windowed_terms(B, l, w.N):
            x = B.term(t)
            p, q = B.chi_inv(t)
            count += 1
            if M.act(unit, x) != {BasisVector(p.target, None, p, q): 1}:
                return cert.fail({"term": B.format_term(t), "case": "vertex"})
            for a in Q.arrows:
                s = Path.trivial(a.source)
                got = M.act({BasisVector(a.source, a.id, s, s): 1}, x)
                want = {BasisVector(a.source, a.id, p, q): 1} if a.source == p.target else {}
                if got != want:
                    return cert.fail({"term": B.format_term(t), "case": "arrow", "arrow": a.id})
    cert.dimensions["terms"] = count
    return cert


def verify_phi_module_map(w: ComplexWindow, M: Bimodule, samples: int = 30, seed: int = 0) -> Certificate:
    """phi(bc) = phi(b) . c and phi_beta(bc) = phi_beta(b) . c."""
    Q, B = w.quiver, M.algebra
    cert = w.certificate("phi-module-map", "phi and phi_beta are right B-module maps")
    rng = random.Random(seed)
    for k in range(samples):
        b = B.random_element(rng.randrange(10**9), (w.lmin, w.lmax), w.N, 3)
        c = B.random_element(rng.randrange(10**9), (-1, 1), 2, 2)
        bc = B.multiply(b, c)
        if M.phi(bc) != M.act(M.phi(b), c):
            return cert.fail({"sample": k, "b": B.format(b), "c": B.format(c)})
        for a in Q.arrows:
            if M.phi_beta(a.id, bc) != M.act(M.phi_beta(a.id, b), c):
                return cert.fail({"sample": k, "arrow": a.id, "b": B.format(b), "c": B.format(c)})
    cert.dimensions["samples"] = samples
    return cert


def _fmt(m: dict) -> str:
    return " + ".join(f"{c}*{b}" for b, c in m.items()) or "0"

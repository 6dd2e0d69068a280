"""The Leavitt path algebra B = L_k(Q^op) in normal form.

A basis term is ``g* r`` with ``g`` (ghost) and ``r`` (real) paths of the
opposite quiver E = Q^op ending at the same vertex. Composition is right to
left, so the term is read as: walk along ``r``, then back along ``g``.
The term is in normal form unless both paths end with the same special arrow.

Derivation of the product of two terms (only relations (0)-(3) are needed):

    (g1* r1)(g2* r2) = g1* (r1 g2*) r2.

Writing r1 = a_m...a_1 and g2 = b_k...b_1 in E, the middle factor is
a_m...a_1 b_1*...b_k*; relation (3) cancels a_1 b_1*, then a_2 b_2*, and so on,
and kills the product at the first mismatch. So the product is nonzero iff the
shorter of r1, g2 is an initial segment of the longer (they start at the same
vertex by (0)-(2)), leaving either the rest of r1 on the real side or the rest
of g2 on the ghost side. The spliced term may have a special junction
gamma* gamma, which relation (4) rewrites as e - sum_{beta != gamma} beta* beta.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .linalg import QQ_FIELD, Field, add_into, format_scalar
from .quiver import Path, Quiver, enumerate_paths, is_associated_pair, opposite


@dataclass(frozen=True, slots=True)
class NormalTerm:
    ghost: Path
    real: Path

    @property
    def degree(self) -> int:
        return self.real.length - self.ghost.length

    @property
    def length(self) -> int:
        return self.real.length + self.ghost.length

    @property
    def left_vertex(self) -> str:
        """e_j with e_j * term = term."""
        return self.ghost.source

    @property
    def right_vertex(self) -> str:
        """e_j with term * e_j = term."""
        return self.real.source


class LpaElement:
    """Finite combination of normal terms. Zero is the empty map."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: "LeavittAlgebra", terms: dict | None = None):
        self.algebra = algebra
        self.terms = {t: c for t, c in (terms or {}).items() if c != 0}

    def __add__(self, other: "LpaElement") -> "LpaElement":
        out = dict(self.terms)
        for t, c in other.terms.items():
            add_into(out, t, c)
        return LpaElement(self.algebra, out)

    def __neg__(self) -> "LpaElement":
        return LpaElement(self.algebra, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other: "LpaElement") -> "LpaElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LpaElement):
            return self.algebra.multiply(self, other)
        return self.algebra.scale(self, other)

    def __rmul__(self, c):
        return self.algebra.scale(self, c)

    def __eq__(self, other) -> bool:
        if isinstance(other, LpaElement):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"LpaElement({self.algebra.format(self)})"

    def degree(self) -> int:
        degs = {t.degree for t in self.terms}
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop() if degs else 0

    def homogeneous_parts(self) -> dict[int, "LpaElement"]:
        parts: dict = {}
        for t, c in self.terms.items():
            parts.setdefault(t.degree, {})[t] = c
        return {n: LpaElement(self.algebra, d) for n, d in sorted(parts.items())}


class LeavittAlgebra:
    """L_k(Q^op) for a quiver Q without sources; special arrows are the associated ones."""

    def __init__(self, quiver: Quiver, field: Field = QQ_FIELD):
        self.quiver = quiver
        self.E = opposite(quiver)
        self.field = field
        self._products: dict = {}
        self._reduced: dict = {}

    # -- terms --------------------------------------------------------------

    def is_normal(self, t: NormalTerm) -> bool:
        g, r = t.ghost, t.real
        if g.target != r.target:
            return False
        if g.is_trivial or r.is_trivial:
            return True
        return g.last != r.last or not self.E.is_special(g.last)

    def term_key(self, t: NormalTerm) -> tuple:
        return (t.length, self.E.path_key(t.ghost), self.E.path_key(t.real))

    def chi(self, p: Path, q: Path) -> NormalTerm:
        """(p, q) -> (p^op)* q^op."""
        if not is_associated_pair(p, q, self.quiver):
            raise ValueError(f"({p}, {q}) is not an associated pair")
        return NormalTerm(p.op(), q.op())

    def chi_inv(self, t: NormalTerm) -> tuple[Path, Path]:
        return t.ghost.op(), t.real.op()

    def element(self, terms: dict | Iterable[tuple[NormalTerm, object]]) -> LpaElement:
        if not isinstance(terms, dict):
            out: dict = {}
            for t, c in terms:
                add_into(out, t, c)
            terms = out
        for t in terms:
            if not self.is_normal(t):
                raise ValueError(f"term {self.format_term(t)} is not in normal form")
        return LpaElement(self, {t: self.field(c) if isinstance(c, int) else c
                                 for t, c in terms.items()})

    def term(self, t: NormalTerm, c=1) -> LpaElement:
        return self.element({t: c})

    def zero(self) -> LpaElement:
        return LpaElement(self, {})

    def one(self) -> LpaElement:
        return self.element({self.vertex_term(v): 1 for v in self.E.vertices})

    def vertex_term(self, v: str) -> NormalTerm:
        e = Path.trivial(v)
        return NormalTerm(e, e)

    def generator(self, kind: str, ident: str) -> LpaElement:
        """``vertex``, ``arrow`` (a^op) or ``ghost`` ((a^op)*); ids as in Q."""
        E = self.E
        if kind == "vertex":
            if ident not in E.vertex_index:
                raise KeyError(f"unknown vertex {ident!r}")
            return self.term(self.vertex_term(ident))
        if ident not in E.arrow:
            raise KeyError(f"unknown arrow {ident!r}")
        a = E.arrow_path(ident)
        e = Path.trivial(a.target)
        if kind == "arrow":
            return self.term(NormalTerm(e, a))
        if kind == "ghost":
            return self.term(NormalTerm(a, e))
        raise ValueError(f"unknown generator kind {kind!r}")

    def arrow(self, a: str) -> LpaElement:
        return self.generator("arrow", a)

    def ghost(self, a: str) -> LpaElement:
        return self.generator("ghost", a)

    def vertex(self, v: str) -> LpaElement:
        return self.generator("vertex", v)

    # -- multiplication -----------------------------------------------------

    def _reduce(self, g: Path, r: Path) -> tuple:
        """Normal form of g* r as a tuple of (term, +-1)."""
        key = (g, r)
        hit = self._reduced.get(key)
        if hit is not None:
            return hit
        E = self.E
        if g.is_trivial or r.is_trivial or g.last != r.last or not E.is_special(g.last):
            out = ((NormalTerm(g, r), 1),)
        else:
            gamma = g.last
            gh, rh = g.hat(), r.hat()
            acc: dict = {}
            for t, c in self._reduce(gh, rh):
                add_into(acc, t, c)
            for beta in E.outgoing[E.s(gamma)]:
                if beta != gamma:
                    b = E.arrow_path(beta)
                    add_into(acc, NormalTerm(gh.then(b), rh.then(b)), -1)
            out = tuple(acc.items())
        self._reduced[key] = out
        return out

    def multiply_terms(self, t1: NormalTerm, t2: NormalTerm) -> tuple:
        key = (t1, t2)
        hit = self._products.get(key)
        if hit is not None:
            return hit
        # (g1* r1)(g2* r2): everything happens at the junction r1 g2*.
        # Writing r1 = a_k...a_1 and g2* = b_1*...b_m*, the inner pair a_1 b_1*
        # is e if a_1 = b_1 and 0 otherwise (a b* = delta e). Peeling repeats
        # until one side runs out, so the product is nonzero only when one of
        # r1, g2 is a prefix of the other (read from the common source):
        #   r1 = g2 then s   gives  g1* (r2 then s)
        #   g2 = r1 then s   gives  (g1 then s)* r2
        # A vertex pair forces r1.source == g2.source. The result may still
        # have a special junction; _reduce removes it with sum b* b = e.
        g1, r1, g2, r2 = t1.ghost, t1.real, t2.ghost, t2.real
        out: tuple = ()
        if r1.source == g2.source:
            n = min(r1.length, g2.length)
            if r1.arrows[:n] == g2.arrows[:n]:
                if r1.length >= g2.length:
                    out = self._reduce(g1, r2.then(r1.suffix(n)))
                else:
                    out = self._reduce(g1.then(g2.suffix(n)), r2)
        self._products[key] = out
        return out

    def multiply(self, x: LpaElement, y: LpaElement) -> LpaElement:
        out: dict = {}
        for t1, c1 in x.terms.items():
            for t2, c2 in y.terms.items():
                for t, s in self.multiply_terms(t1, t2):
                    add_into(out, t, c1 * c2 * s)
        return LpaElement(self, out)

    def add(self, x: LpaElement, y: LpaElement) -> LpaElement:
        return x + y

    def scale(self, x: LpaElement, c) -> LpaElement:
        return LpaElement(self, {t: v * c for t, v in x.terms.items()})

    def degree(self, x: LpaElement) -> int:
        return x.degree()

    def equals(self, x: LpaElement, y: LpaElement) -> bool:
        return x.terms == y.terms

    # -- enumeration ----------------------------------------------------------

    def normal_terms(self, degree: int, bound: int) -> list[NormalTerm]:
        """All normal terms of a degree with l(ghost)+l(real) <= bound.

        Enumerated directly in E, independently of the associated-pair sets.
        """
        out = []
        m = max(0, -degree)
        while 2 * m + degree <= bound:
            for g in enumerate_paths(self.E, m):
                for r in enumerate_paths(self.E, m + degree, end_at=g.target):
                    t = NormalTerm(g, r)
                    if self.is_normal(t):
                        out.append(t)
            m += 1
        return sorted(out, key=self.term_key)

    def random_element(self, seed: int, degrees: int | tuple[int, int], bound: int,
                       count: int) -> LpaElement:
        rng = random.Random(seed)
        lo, hi = (degrees, degrees) if isinstance(degrees, int) else degrees
        pool = [t for n in range(lo, hi + 1) for t in self.normal_terms(n, bound)]
        chosen = rng.sample(pool, min(count, len(pool)))
        return LpaElement(self, {t: self.field.random_nonzero(rng) for t in chosen})

    # -- literals ---------------------------------------------------------------

    def format_term(self, t: NormalTerm) -> str:
        if t.ghost.is_trivial and t.real.is_trivial:
            return f"e({t.ghost.source})"
        g = "" if t.ghost.is_trivial else t.ghost.written()
        r = "" if t.real.is_trivial else t.real.written()
        return f'g"{g}" r"{r}"'

    def format(self, x: LpaElement) -> str:
        if not x.terms:
            return "0"
        parts = []
        for k, t in enumerate(sorted(x.terms, key=self.term_key)):
            parts.append(_signed(x.terms[t], self.format_term(t), first=(k == 0)))
        return "".join(parts)

    def parse_term(self, text: str) -> NormalTerm:
        text = text.strip()
        if m := re.fullmatch(r"e\(\s*([^()\s]+)\s*\)", text):
            v = m.group(1)
            if v not in self.E.vertex_index:
                raise ValueError(f"unknown vertex {v!r}")
            return self.vertex_term(v)
        m = re.fullmatch(r'g"([^"]*)"\s*r"([^"]*)"', text)
        if not m:
            raise ValueError(f"cannot parse term {text!r}")
        gs, rs = m.group(1).strip(), m.group(2).strip()
        if not gs and not rs:
            raise ValueError('empty term; write e(i) for a vertex')
        if gs and rs:
            g, r = self.E.parse_path(gs), self.E.parse_path(rs)
        elif gs:
            g = self.E.parse_path(gs)
            r = Path.trivial(g.target)
        else:
            r = self.E.parse_path(rs)
            g = Path.trivial(r.target)
        t = NormalTerm(g, r)
        if g.target != r.target:
            raise ValueError(f"ghost and real parts of {text!r} end at different vertices")
        return t

    def parse(self, text: str) -> LpaElement:
        """Parse a sum such as ``e(1) - 2 g"a2" r"a2" + 1/2 g"" r"a1"``."""
        out: dict = {}
        for coef, body in split_signed_terms(text):
            t = self.parse_term(body)
            for nt, s in self._reduce(t.ghost, t.real):
                add_into(out, nt, self.field(coef) * s)
        return LpaElement(self, out)


def split_signed_terms(text: str) -> list[tuple[Fraction, str]]:
    """Split ``c1 T1 +- c2 T2 ...`` into (coefficient, term text) pairs.

    Terms are ``e(...)``, ``g"..." r"..."`` or, for module literals,
    ``name[...]``; a missing coefficient means 1.
    """
    text = text.strip()
    if text == "0":
        return []
    body = re.compile(r'e\([^()]*\)(?:\[[^\]]*\])?|g"[^"]*"\s*r"[^"]*"|[^\s\[\]+]+\[[^\]]*\]')
    out = []
    pos = 0
    while pos < len(text):
        m = re.compile(r'\s*([+-])?\s*(\d+(?:/\d+)?)?\s*').match(text, pos)
        sign, num = m.group(1), m.group(2)
        if out and sign is None:
            raise ValueError(f"expected + or - at position {m.end()} in {text!r}")
        b = body.match(text, m.end())
        if not b:
            raise ValueError(f"cannot parse term at position {m.end()} in {text!r}")
        c = Fraction(num) if num else Fraction(1)
        out.append((-c if sign == "-" else c, b.group(0)))
        pos = b.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def _signed(c, body: str, first: bool) -> str:
    if isinstance(c, (int, Fraction)):
        if first:
            return body if c == 1 else f"{c} {body}"
        return f" - {-c} {body}" if c < 0 else f" + {c} {body}"
    s = format_scalar(c)
    if first:
        return body if s == "1" else f"{s} {body}"
    return f" + {s} {body}"


# -- checks ---------------------------------------------------------------------

def check_relations(B: LeavittAlgebra) -> "Certificate":
    """The defining relations of L_k(Q^op) hold after normalization."""
    from .certificates import Certificate
    E = B.E
    cert = Certificate("lpa-relations", B.quiver.name, {}, True,
                       "defining relations of the Leavitt path algebra")
    V = E.vertices
    A = [a.id for a in E.arrows]
    e = {v: B.vertex(v) for v in V}
    for i in V:
        for j in V:
            if e[i] * e[j] != (e[i] if i == j else B.zero()):
                return cert.fail({"relation": "0", "vertices": [i, j]})
    for a in A:
        x, g = B.arrow(a), B.ghost(a)
        if not (e[E.t(a)] * x == x == x * e[E.s(a)]):
            return cert.fail({"relation": "1", "arrow": a})
        if not (e[E.s(a)] * g == g == g * e[E.t(a)]):
            return cert.fail({"relation": "2", "arrow": a})
        for b in A:
            if x * B.ghost(b) != (e[E.t(a)] if a == b else B.zero()):
                return cert.fail({"relation": "3", "arrows": [a, b]})
    for i in V:
        total = B.zero()
        for a in E.outgoing[i]:
            total = total + B.ghost(a) * B.arrow(a)
        if total != e[i]:
            return cert.fail({"relation": "4", "vertex": i})
    cert.dimensions = {"vertices": len(V), "arrows": len(A)}
    return cert


def check_associativity(B: LeavittAlgebra, samples: int = 200, seed: int = 0,
                        degrees: tuple[int, int] = (-2, 2), bound: int = 3) -> "Certificate":
    """(xy)z = x(yz) on random triples, and every product is in normal form."""
    from .certificates import Certificate
    cert = Certificate("lpa-associativity", B.quiver.name, {}, True, "multiplication is associative")
    rng = random.Random(seed)
    for k in range(samples):
        x, y, z = (B.random_element(rng.randrange(10**9), degrees, bound, 3) for _ in range(3))
        lhs, rhs = (x * y) * z, x * (y * z)
        if lhs != rhs:
            return cert.fail({"sample": k, "x": B.format(x), "y": B.format(y), "z": B.format(z)})
        if not all(B.is_normal(t) for t in lhs.terms):
            return cert.fail({"sample": k, "reason": "product left normal form"})
    cert.dimensions = {"samples": samples}
    return cert


def check_chi_bijection(B: LeavittAlgebra, degrees: range, N: int) -> "Certificate":
    """chi maps the windowed associated pairs onto the windowed normal terms."""
    from .certificates import Certificate
    from .quiver import enumerate_lambda
    cert = Certificate("chi-bijection", B.quiver.name, {"lmin": min(degrees), "lmax": max(degrees), "N": N},
                       True, "associated pairs correspond to normal terms")
    for n in degrees:
        pairs = [pq for i in B.quiver.vertices for pq in enumerate_lambda(B.quiver, i, n, N)]
        images = [B.chi(p, q) for p, q in pairs]
        direct = B.normal_terms(n, N)
        if sorted(images, key=B.term_key) != direct or len(set(images)) != len(images):
            return cert.fail({"degree": n, "pairs": len(pairs), "terms": len(direct)})
        if any(t.degree != n or B.chi_inv(t) != pq for t, pq in zip(images, pairs)):
            return cert.fail({"degree": n, "reason": "degree or inverse mismatch"})
        cert.dimensions[str(n)] = len(direct)
    return cert

"""The dg algebra End_A(P)^opp, the map rho : B -> End_A(P)^opp, and the
constructive certificate that every cocycle is rho(x) up to a coboundary.

Graded maps P -> P are left A-linear, so they are determined by their values
on the vertex generators e_i z(p,q); the value on a z(p,q) is a . (value on
e_i z(p,q)). All maps below are evaluated lazily on demand, which keeps every
identity exact: a finitely supported h gives a genuine coboundary D(h) of the
untruncated complex.

Sign conventions: D(f) = delta o f - (-1)^{|f|} f o delta, and
rho(b)(v) = (-1)^{|b||v|} v . b.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .bimodule import Bimodule, windowed_terms
from .certificates import Certificate, window_dict
from .complex import (BasisVector, ComplexWindow, apply_linear, build_window, differential,
                      format_element)
from .linalg import (QQ_FIELD, Field, SparseLinearMap, add_into, kernel_basis, rank)
from .lpa import LpaElement, NormalTerm
from .quiver import Path, Quiver, enumerate_lambda


class CocycleError(ValueError):
    """A supposed cocycle violates one of the recursions it must satisfy."""

    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


def left_arrow(quiver: Quiver, a: str, v: dict) -> dict:
    """a . v for v in the span of vertex generators (arrow-type terms are killed)."""
    s = quiver.s(a)
    out: dict = {}
    for b, c in v.items():
        if b.arrow is None and b.vertex == s:
            add_into(out, BasisVector(s, a, b.p, b.q), c)
    return out


class HomMap:
    """A left A-linear graded map P -> P of a fixed degree."""

    def __init__(self, quiver: Quiver, degree: int):
        self.quiver = quiver
        self.degree = degree
        self._memo: dict = {}

    def on_generator(self, b: BasisVector) -> dict:
        raise NotImplementedError

    def __call__(self, b: BasisVector) -> dict:
        hit = self._memo.get(b)
        if hit is not None:
            return hit
        if b.arrow is None:
            out = self.on_generator(b)
        else:
            out = left_arrow(self.quiver, b.arrow, self(BasisVector(b.vertex, None, b.p, b.q)))
        self._memo[b] = out
        return out

    def apply(self, v: dict) -> dict:
        return apply_linear(self, v)

    def __add__(self, other: "HomMap") -> "HomMap":
        return LinearCombination(self.quiver, self.degree, [(self, 1), (other, 1)])

    def __sub__(self, other: "HomMap") -> "HomMap":
        return LinearCombination(self.quiver, self.degree, [(self, 1), (other, -1)])

    def scaled(self, c) -> "HomMap":
        return LinearCombination(self.quiver, self.degree, [(self, c)])


class FiniteHom(HomMap):
    """Given by a finite table on vertex generators; zero elsewhere."""

    def __init__(self, quiver: Quiver, degree: int, table: dict):
        super().__init__(quiver, degree)
        self.table = {b: dict(v) for b, v in table.items() if v}
        for b, v in self.table.items():
            if b.arrow is not None:
                raise ValueError("a table entry must be a vertex generator")
            for k in v:
                if k.degree != b.degree + degree:
                    raise ValueError(f"entry {b} -> {k} has the wrong degree")

    def on_generator(self, b: BasisVector) -> dict:
        return dict(self.table.get(b, {}))


class LinearCombination(HomMap):
    def __init__(self, quiver: Quiver, degree: int, parts: list):
        super().__init__(quiver, degree)
        for h, _ in parts:
            if h.degree != degree:
                raise ValueError("adding maps of different degrees")
        self.parts = parts

    def on_generator(self, b: BasisVector) -> dict:
        out: dict = {}
        for h, c in self.parts:
            for k, d in h(b).items():
                add_into(out, k, c * d)
        return out


class RhoMap(HomMap):
    """rho(x): v -> (-1)^{|x||v|} v . x for homogeneous x."""

    def __init__(self, module: Bimodule, x: LpaElement):
        super().__init__(module.quiver, x.degree())
        self.module = module
        self.x = x

    def on_generator(self, b: BasisVector) -> dict:
        img = self.module.act({b: 1}, self.x)
        if (self.degree * b.degree) % 2:
            img = {k: -c for k, c in img.items()}
        return img


class Coboundary(HomMap):
    """D(h) = delta o h - (-1)^{|h|} h o delta."""

    def __init__(self, h: HomMap, one=1):
        super().__init__(h.quiver, h.degree + 1)
        self.h = h
        self.one = one

    def on_generator(self, b: BasisVector) -> dict:
        Q = self.quiver
        out = apply_linear(lambda v: differential(Q, v, self.one), self.h(b))
        sign = -1 if self.h.degree % 2 == 0 else 1
        for k, c in self.h.apply(differential(Q, b, self.one)).items():
            add_into(out, k, sign * c)
        return out


class PhiHom(HomMap):
    """e_i z(p,q) -> phi(theta(p,q)) for a rule theta on pairs."""

    def __init__(self, module: Bimodule, degree: int, theta):
        super().__init__(module.quiver, degree)
        self.module = module
        self.theta = theta

    def on_generator(self, b: BasisVector) -> dict:
        return self.module.phi(self.theta(b.p, b.q))


def rho(module: Bimodule, x: LpaElement) -> HomMap:
    return RhoMap(module, x)


def coboundary(h: HomMap, one=1) -> HomMap:
    return Coboundary(h, one)


def generators(w: ComplexWindow, interior: bool = True) -> list[BasisVector]:
    return [b for l in w.degrees for b in w.basis(l)
            if b.arrow is None and (not interior or w.interior(b))]


def interior_vectors(w: ComplexWindow) -> list[BasisVector]:
    return [b for l in w.degrees for b in w.basis(l) if w.interior(b)]


def maps_agree(f: HomMap, g: HomMap, vectors: list) -> BasisVector | None:
    for v in vectors:
        if f(v) != g(v):
            return v
    return None


# -- windowed Hom spaces ---------------------------------------------------------------

@dataclass
class HomWindow:
    """Finite family of elementary graded maps of degree n on a window.

    An elementary map sends one vertex generator e_i z(x) to either e_i z(y)
    (a "lambda" map) or beta z(y) with t(beta) = i (a "mu" map); every A-linear
    map between the windowed components is a combination of these.
    """

    window: ComplexWindow
    n: int
    sources: list = field(default_factory=list)

    def __post_init__(self):
        if not self.sources:
            w = self.window
            self.sources = [b for l in range(w.lmin, w.lmax + 2) for b in w.basis(l) if b.arrow is None]

    def targets(self, src: BasisVector) -> list[BasisVector]:
        w, Q = self.window, self.window.quiver
        l = src.degree + self.n
        i = src.vertex
        out = [BasisVector(i, None, p, q) for p, q in enumerate_lambda(Q, i, l, w.N)]
        for beta in Q.incoming[i]:
            s = Q.s(beta)
            out += [BasisVector(s, beta, p, q) for p, q in enumerate_lambda(Q, s, l, w.N)]
        return out

    def basis(self) -> list[tuple]:
        return [(src, tgt) for src in self.sources for tgt in self.targets(src)]

    def element(self, coeffs: dict) -> FiniteHom:
        table: dict = {}
        for (src, tgt), c in coeffs.items():
            add_into(table.setdefault(src, {}), tgt, c)
        return FiniteHom(self.window.quiver, self.n, table)

    def random_element(self, rng: random.Random, sources: int = 4, entries: int = 2) -> FiniteHom:
        fld = self.window.field
        coeffs: dict = {}
        for src in rng.sample(self.sources, min(sources, len(self.sources))):
            tg = self.targets(src)
            for tgt in rng.sample(tg, min(entries, len(tg))):
                coeffs[(src, tgt)] = fld.random_nonzero(rng)
        return self.element(coeffs)

    def differential_matrix(self, vectors: list) -> SparseLinearMap:
        """D : Hom^n -> Hom^{n+1}, with a map recorded by its values on ``vectors``."""
        one = self.window.field.one

        def column(e):
            d = Coboundary(self.element({e: one}), one)
            return {(v, k): c for v in vectors for k, c in d(v).items()}
        return SparseLinearMap.from_function(self.basis(), [], column, self.window.field)


# -- cocycle normalization --------------------------------------------------------------

def decompose_cocycle(y: HomMap, module: Bimodule, b: BasisVector) -> tuple[LpaElement, dict]:
    """y(e_i z(p,q)) = phi(y_pq) + sum_gamma phi_gamma(mu^gamma_pq); returns (y_pq, {gamma: mu})."""
    Q, B = module.quiver, module.algebra
    if b.arrow is not None:
        raise ValueError("decomposition is read off vertex generators")
    ypq: dict = {}
    mu: dict = {}
    for k, c in y(b).items():
        if k.arrow is None:
            if k.vertex != b.vertex:
                raise CocycleError("map is not A-linear of the expected shape", {"vector": str(b)})
            add_into(ypq, B.chi(k.p, k.q), c)
        else:
            if Q.t(k.arrow) != b.vertex:
                raise CocycleError("map is not A-linear of the expected shape", {"vector": str(b)})
            add_into(mu.setdefault(k.arrow, {}), B.chi(k.p, k.q), c)
    return B.element(ypq), {g: B.element(m) for g, m in mu.items() if m}


class Normalizer:
    """Components y_pq and mu^gamma_pq of a degree-n map, computed on demand."""

    def __init__(self, y: HomMap, module: Bimodule):
        self.y = y
        self.module = module
        self.n = y.degree
        self._cache: dict = {}

    def parts(self, p: Path, q: Path) -> tuple[LpaElement, dict]:
        key = (p, q)
        if key not in self._cache:
            self._cache[key] = decompose_cocycle(self.y, self.module, BasisVector(p.target, None, p, q))
        return self._cache[key]

    def ypq(self, p: Path, q: Path) -> LpaElement:
        return self.parts(p, q)[0]

    def mu(self, gamma: str, p: Path, q: Path) -> LpaElement:
        return self.parts(p, q)[1].get(gamma, self.module.algebra.zero())


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def extract_x(y: HomMap, w: ComplexWindow, module: Bimodule, check: bool = True) -> LpaElement:
    """x = sum_j y_(e_j, e_j), after checking the recursions y must satisfy on interior pairs."""
    Q, B = module.quiver, module.algebra
    nz = Normalizer(y, module)
    n = y.degree
    x = B.zero()
    for j in Q.vertices:
        e = Path.trivial(j)
        x = x + nz.ypq(e, e)
    if not check:
        return x
    sn = _sign(n)
    for b in generators(w):
        p, q = b.p, b.q
        l = b.degree
        ypq = nz.ypq(p, q)
        if p.is_trivial:
            for g in Q.incoming[b.vertex]:
                gp = Q.arrow_path(g)
                lhs = nz.ypq(Path.trivial(gp.source), gp.then(q))
                if lhs != B.arrow(g) * ypq * sn:
                    raise CocycleError("arrow recursion fails", {"pair": [str(p), str(q)], "arrow": g})
        else:
            a = p.last
            if ypq != B.ghost(a) * nz.ypq(p.hat(), q) * sn:
                raise CocycleError("ghost recursion fails", {"pair": [str(p), str(q)]})
        closed = B.term(B.chi(p, q)) * x * _sign(n * l)
        if ypq != closed:
            raise CocycleError("closed form fails", {"pair": [str(p), str(q)]})
    return x


@dataclass
class CocycleCertificate:
    degree: int
    x: LpaElement
    h: HomMap | None
    checked: int = 0
    passed: bool = True
    witness: dict | None = None
    arrow_checked: int = 0

    def to_certificate(self, w: ComplexWindow) -> Certificate:
        B = self.x.algebra
        cert = Certificate(f"cocycle-normalization-{self.degree}", w.quiver.name, w.window,
                           self.passed, "every cocycle is rho(x) plus an explicit coboundary",
                           dimensions={"checked_generators": self.checked,
                                       "checked_arrow_vectors": self.arrow_checked},
                           witness=self.witness)
        cert.extra["x"] = B.format(self.x)
        if self.h is not None:
            cert.extra["h"] = {str(b): format_element(w.quiver, v) for b, v in self.h._memo.items() if v}
        return cert


def theta_rule(nz: Normalizer):
    """theta(p,q) by the double recursion: on l(q) for trivial p, then on l(p)."""
    module = nz.module
    Q, B = module.quiver, module.algebra
    n = nz.n
    s1 = _sign(n - 1)
    memo: dict = {}

    def theta(p: Path, q: Path) -> LpaElement:
        key = (p, q)
        if key in memo:
            return memo[key]
        if p.is_trivial and q.is_trivial:
            i = p.source
            out = B.zero()
            for g in Q.outgoing[i]:
                gp = Q.arrow_path(g)
                out = out + nz.mu(g, gp, Path.trivial(gp.source))
        elif p.is_trivial:
            g = q.first
            qt = q.tilde()
            e = Path.trivial(qt.source)
            out = (B.arrow(g) * theta(e, qt) - nz.mu(g, e, qt)) * s1
        else:
            beta = p.last
            out = B.ghost(beta) * theta(p.hat(), q) * s1
            for g in Q.incoming[p.target]:
                out = out + B.ghost(g) * nz.mu(g, p, q)
        memo[key] = out
        return out

    return theta


def build_homotopy(y: HomMap, x: LpaElement, w: ComplexWindow, module: Bimodule) -> CocycleCertificate:
    """Construct h from y and check (y - rho(x)) = D(h) on every interior vector."""
    n = y.degree
    nz = Normalizer(y, module)
    h = PhiHom(module, n - 1, theta_rule(nz))
    one = w.field.one
    residual = y - RhoMap(module, x) - Coboundary(h, one) if x else y - Coboundary(h, one)
    cert = CocycleCertificate(n, x, h)
    r0 = y - RhoMap(module, x) if x else y
    for v in interior_vectors(w):
        if residual(v):
            cert.passed = False
            cert.witness = {"vector": str(v), "residual": format_element(w.quiver, residual(v))}
            return cert
        if v.arrow is None:
            cert.checked += 1
        else:
            cert.arrow_checked += 1
            if r0(v):
                cert.passed = False
                cert.witness = {"vector": str(v), "reason": "y - rho(x) nonzero on arrow-type vector"}
                return cert
    return cert


def certify_cocycle(y: HomMap, w: ComplexWindow, module: Bimodule) -> CocycleCertificate:
    """extract_x followed by build_homotopy; recursion failures become failed certificates."""
    try:
        x = extract_x(y, w, module)
    except CocycleError as err:
        return CocycleCertificate(y.degree, module.algebra.zero(), None, passed=False,
                                  witness={"reason": str(err), **err.witness})
    return build_homotopy(y, x, w, module)


# -- checks ---------------------------------------------------------------------------------

def verify_rho_cocycle(w: ComplexWindow, module: Bimodule, x: LpaElement) -> bool:
    """D(rho(x)) vanishes on interior vectors."""
    d = Coboundary(RhoMap(module, x), w.field.one)
    return all(not d(v) for v in interior_vectors(w))


def verify_coboundary_lemma(w: ComplexWindow, module: Bimodule, n: int, samples: int = 20,
                            seed: int = 0) -> Certificate:
    """Every coboundary D(h) maps interior vectors into the kernel of delta."""
    cert = w.certificate(f"coboundary-kernel-{n}", "coboundaries take values in the kernel of delta")
    rng = random.Random(seed)
    hw = HomWindow(w, n - 1)
    vecs = interior_vectors(w)
    one = w.field.one
    for k in range(samples):
        h = hw.random_element(rng)
        d = Coboundary(h, one)
        for v in vecs:
            img = d(v)
            if not img:
                continue
            # membership in Ker delta, via a kernel basis on the support
            support = sorted(img, key=str)
            f = SparseLinearMap.from_function(support, [], lambda b: differential(w.quiver, b, one), w.field)
            ker = kernel_basis(f)
            if rank(ker + [img], w.field) != rank(ker, w.field):
                return cert.fail({"sample": k, "vector": str(v)})
    cert.dimensions["samples"] = samples
    return cert


def verify_embedding(w: ComplexWindow, module: Bimodule, degrees: range | None = None) -> Certificate:
    """rho(e_i) is not a coboundary, and rho is injective on each windowed B^n."""
    Q, B = w.quiver, module.algebra
    one = w.field.one
    cert = w.certificate("rho-embedding", "H(rho) is injective")
    for i in Q.vertices:
        e = Path.trivial(i)
        u = BasisVector(i, None, e, e)
        r = RhoMap(module, B.vertex(i))
        if r(u) != {u: one}:
            return cert.fail({"vertex": i, "reason": "rho(e_i) does not fix e_i z(e_i,e_i)"})
        if not differential(Q, u, one):
            return cert.fail({"vertex": i, "reason": "e_i z(e_i,e_i) is a cycle"})
    vecs = generators(w)
    for n in degrees if degrees is not None else w.degrees:
        terms = windowed_terms(B, n, w.N)
        cols = []
        for t in terms:
            r = RhoMap(module, B.term(t))
            cols.append({(v, k): c for v in vecs for k, c in r(v).items()})
        rk = rank(cols, w.field)
        cert.dimensions[f"B^{n}"] = len(terms)
        if rk != len(terms):
            return cert.fail({"degree": n, "rank": rk, "terms": len(terms)})
    return cert


def verify_roundtrip(w: ComplexWindow, module: Bimodule, n: int) -> Certificate:
    """extract_x(rho(t)) = t for every windowed normal term t of degree n."""
    B = module.algebra
    cert = w.certificate(f"rho-roundtrip-{n}", "x is recovered from rho(x)")
    terms = windowed_terms(B, n, w.N)
    for t in terms:
        x = B.term(t)
        try:
            got = extract_x(RhoMap(module, x), w, module)
        except CocycleError as err:
            return cert.fail({"term": B.format_term(t), "reason": str(err), **err.witness})
        if got != x:
            return cert.fail({"term": B.format_term(t), "got": B.format(got)})
    cert.dimensions["terms"] = len(terms)
    return cert


def sample_cocycle(w: ComplexWindow, module: Bimodule, n: int, rng: random.Random) -> tuple:
    """y = rho(x0) + D(h0) with x0 in the windowed B^n and h0 a finite map of degree n-1."""
    B = module.algebra
    terms = windowed_terms(B, n, w.N)
    chosen = rng.sample(terms, min(len(terms), rng.randint(1, 3)))
    x0 = B.element({t: w.field.random_nonzero(rng) for t in chosen})
    h0 = HomWindow(w, n - 1).random_element(rng, sources=rng.randint(0, 4))
    y = RhoMap(module, x0) + Coboundary(h0, w.field.one)
    return y, x0, h0


def quasi_balanced_report(quiver: Quiver, degrees: range, w: ComplexWindow | None = None,
                          samples: int = 10, seed: int = 0, module: Bimodule | None = None,
                          fld: Field = QQ_FIELD) -> Certificate:
    """Per degree: injectivity of rho, round trip, and certified random cocycles."""
    w = w or build_window(quiver, min(degrees), max(degrees), 4, fld)
    module = module or Bimodule(quiver, w.field)
    rng = random.Random(seed)
    top = Certificate("quasi-balanced", quiver.name, w.window, True,
                      "rho : B -> End(P)^opp is a quasi-isomorphism")
    top.absorb(verify_embedding(w, module, degrees))
    for n in degrees:
        deg = Certificate(f"degree-{n}", quiver.name, w.window, True,
                          "surjectivity of H(rho) in one degree")
        deg.absorb(verify_roundtrip(w, module, n))
        for k in range(samples):
            y, x0, h0 = sample_cocycle(w, module, n, rng)
            c = certify_cocycle(y, w, module).to_certificate(w)
            c.check = f"cocycle-{n}-{k}"
            deg.absorb(c)
            if not c.passed:
                break
        top.absorb(deg)
    return top

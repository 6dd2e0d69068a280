"""Exact scalars and sparse linear algebra.

Vectors are plain dicts mapping hashable keys to nonzero coefficients.
Rank, kernel and image computations are delegated to sympy's sparse
``DomainMatrix`` over QQ or GF(p), so no floating point is involved.
"""
from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

from sympy import GF, QQ, isprime
from sympy.polys.matrices import DomainMatrix

Vector = dict


@dataclass(frozen=True)
class Field:
    """The coefficient field: the rationals (characteristic 0) or F_p."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and not isprime(p):
            raise ValueError(f"F_p requires a prime, got {p}")

    @property
    def name(self) -> str:
        return "Q" if self.characteristic == 0 else f"Fp:{self.characteristic}"

    @property
    def domain(self):
        return QQ if self.characteristic == 0 else GF(self.characteristic)

    def __call__(self, x):
        if self.characteristic == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            return self.domain(x.numerator) / self.domain(x.denominator)
        return self.domain(int(x))

    @property
    def one(self):
        return self(1)

    def random_nonzero(self, rng: random.Random, size: int = 5):
        if self.characteristic == 0:
            num = rng.choice([n for n in range(-size, size + 1) if n])
            return Fraction(num, rng.randint(1, 3))
        return self(rng.randint(1, self.characteristic - 1))

    def to_domain(self, c):
        if self.characteristic == 0:
            c = Fraction(c)
            return QQ(c.numerator, c.denominator)
        return self.domain.convert(c)

    def from_domain(self, c):
        if self.characteristic == 0:
            return Fraction(int(c.numerator), int(c.denominator))
        return c


QQ_FIELD = Field(0)


def field_from_string(text: str | None) -> Field:
    """Parse ``Q`` or ``Fp:<prime>``; ``None`` falls back to ``$LEAVITT_FIELD``."""
    if text is None:
        text = os.environ.get("LEAVITT_FIELD", "Q")
    text = text.strip()
    if text in ("Q", "QQ"):
        return QQ_FIELD
    if text.startswith("Fp:"):
        return Field(int(text[3:]))
    raise ValueError(f"unknown field {text!r}; expected Q or Fp:<prime>")


def format_scalar(c) -> str:
    if isinstance(c, (int, Fraction)):
        return str(c)
    # sympy GF elements carry their modulus
    mod = c.mod
    return str(int(c) % mod)


# -- dict vectors -----------------------------------------------------------

def add_into(dst: dict, key, c) -> None:
    """dst[key] += c, dropping the entry if it cancels."""
    v = dst.get(key)
    v = c if v is None else v + c
    if v == 0:
        dst.pop(key, None)
    else:
        dst[key] = v


def combine(pairs: Iterable[tuple[dict, object]]) -> dict:
    """Sum of scaled dict vectors."""
    out: dict = {}
    for vec, s in pairs:
        for k, c in vec.items():
            add_into(out, k, c * s)
    return out


def _guess_field(vectors: Iterable[dict]) -> Field:
    for vec in vectors:
        for c in vec.values():
            if isinstance(c, (int, Fraction)):
                return QQ_FIELD
            return Field(c.mod)
    return QQ_FIELD


def _to_matrix(columns: Sequence[dict], fld: Field, rows: Sequence[Hashable] | None = None):
    if rows is None:
        index: dict = {}
        for col in columns:
            for k in col:
                if k not in index:
                    index[k] = len(index)
        rows = list(index)
    else:
        index = {k: i for i, k in enumerate(rows)}
    data: dict = {}
    for j, col in enumerate(columns):
        for k, c in col.items():
            data.setdefault(index[k], {})[j] = fld.to_domain(c)
    dm = DomainMatrix(data, (len(rows), len(columns)), fld.domain)
    return dm, list(rows)


def rank(columns: Sequence[dict], fld: Field | None = None) -> int:
    """Rank of the span of the given dict vectors."""
    columns = [c for c in columns]
    if not columns:
        return 0
    fld = fld or _guess_field(columns)
    dm, rows = _to_matrix(columns, fld)
    if not rows:
        return 0
    return dm.rank()


def in_span(columns: Sequence[dict], v: dict, fld: Field | None = None) -> bool:
    if not v:
        return True
    fld = fld or _guess_field(list(columns) + [v])
    return rank(list(columns) + [v], fld) == rank(columns, fld)


@dataclass
class SparseLinearMap:
    """Matrix of a linear map between two ordered bases.

    ``columns[j]`` holds the image of ``domain[j]`` as ``{row: coeff}``;
    image components on keys outside ``codomain`` are kept in ``overflow[j]``.
    """

    domain: list
    codomain: list
    columns: list = field(default_factory=list)
    overflow: list = field(default_factory=list)
    field: Field = QQ_FIELD

    @classmethod
    def from_function(cls, domain: Sequence, codomain: Sequence,
                      f: Callable[[object], dict], fld: Field = QQ_FIELD) -> "SparseLinearMap":
        domain, codomain = list(domain), list(codomain)
        pos = {b: i for i, b in enumerate(codomain)}
        cols, over = [], []
        for b in domain:
            col, extra = {}, {}
            for k, c in f(b).items():
                if k in pos:
                    col[pos[k]] = c
                else:
                    extra[k] = c
            cols.append(col)
            over.append(extra)
        return cls(domain, codomain, cols, over, fld)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.codomain), len(self.domain)

    def image_of(self, j: int) -> dict:
        """Full image of domain[j], keyed by codomain elements (overflow included)."""
        out = {self.codomain[r]: c for r, c in self.columns[j].items()}
        out.update(self.overflow[j])
        return out

    def apply(self, v: dict) -> dict:
        pos = {b: j for j, b in enumerate(self.domain)}
        return combine((self.image_of(pos[k]), c) for k, c in v.items())

    def entries(self) -> dict:
        return {(r, j): c for j, col in enumerate(self.columns) for r, c in col.items()}

    def with_entry(self, r: int, j: int, c) -> "SparseLinearMap":
        cols = [dict(col) for col in self.columns]
        if c == 0:
            cols[j].pop(r, None)
        else:
            cols[j][r] = c
        return SparseLinearMap(self.domain, self.codomain, cols,
                               [dict(o) for o in self.overflow], self.field)

    def restrict(self, keep: Callable[[object], bool]) -> "SparseLinearMap":
        idx = [j for j, b in enumerate(self.domain) if keep(b)]
        return SparseLinearMap([self.domain[j] for j in idx], self.codomain,
                               [self.columns[j] for j in idx],
                               [self.overflow[j] for j in idx], self.field)

    def to_domain_matrix(self) -> DomainMatrix:
        dm, _ = _to_matrix([{r: c for r, c in col.items()} for col in self.columns],
                           self.field, rows=range(len(self.codomain)))
        return dm


def _full_columns(f: SparseLinearMap) -> list[dict]:
    return [f.image_of(j) for j in range(len(f.domain))]


def map_rank(f: SparseLinearMap) -> int:
    return rank(_full_columns(f), f.field)


def kernel_basis(f: SparseLinearMap) -> list[dict]:
    """Basis of ker f as dicts over domain elements (overflow rows included)."""
    if not f.domain:
        return []
    cols = _full_columns(f)
    dm, rows = _to_matrix(cols, f.field)
    if not rows:
        return [{b: f.field.one} for b in f.domain]
    ns = dm.nullspace().to_sdm()
    basis = []
    for _, row in sorted(ns.items()):
        basis.append({f.domain[j]: f.field.from_domain(c) for j, c in row.items()})
    return basis


def image_basis(f: SparseLinearMap) -> list[dict]:
    """Images of the pivot columns; a basis of im f."""
    cols = _full_columns(f)
    if not cols:
        return []
    dm, rows = _to_matrix(cols, f.field)
    if not rows:
        return []
    _, pivots = dm.rref()
    return [cols[j] for j in pivots]

"""Finite quivers, paths, associated pairs and the index sets of the complex.

Paths store their arrows in traversal order: for the path written
``a_m ... a_2 a_1`` (composition right to left) ``arrows[0]`` is ``a_1``.
Vertices are kept alongside so trivial paths and truncations need no quiver.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Mapping


class QuiverError(ValueError):
    """Malformed quiver description."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class QuiverValidationError(QuiverError):
    """Well-formed description violating a structural requirement (e.g. a source)."""


@dataclass(frozen=True, slots=True)
class Arrow:
    id: str
    source: str
    target: str


@dataclass(frozen=True, slots=True)
class Path:
    vertices: tuple
    arrows: tuple = ()

    @staticmethod
    def trivial(v: str) -> "Path":
        return Path((v,), ())

    @property
    def length(self) -> int:
        return len(self.arrows)

    @property
    def source(self) -> str:
        return self.vertices[0]

    @property
    def target(self) -> str:
        return self.vertices[-1]

    @property
    def is_trivial(self) -> bool:
        return not self.arrows

    @property
    def first(self) -> str:
        """The arrow traversed first (``a_1``)."""
        return self.arrows[0]

    @property
    def last(self) -> str:
        """The arrow traversed last (``a_m``)."""
        return self.arrows[-1]

    def hat(self) -> "Path":
        """Drop the last arrow: ``a_{m-1}...a_1``; an arrow gives ``e_{s(a)}``."""
        if self.is_trivial:
            raise ValueError("trivial path has no truncation")
        return Path(self.vertices[:-1], self.arrows[:-1])

    def tilde(self) -> "Path":
        """Drop the first arrow: ``a_m...a_2``; an arrow gives ``e_{t(a)}``."""
        if self.is_trivial:
            raise ValueError("trivial path has no truncation")
        return Path(self.vertices[1:], self.arrows[1:])

    def then(self, other: "Path") -> "Path":
        """Traverse self, then other (written ``other * self``)."""
        if self.target != other.source:
            raise ValueError(f"paths not composable: {self} then {other}")
        return Path(self.vertices + other.vertices[1:], self.arrows + other.arrows)

    def suffix(self, n: int) -> "Path":
        """The part after the first n arrows."""
        return Path(self.vertices[n:], self.arrows[n:])

    def op(self) -> "Path":
        """The reversed path in the opposite quiver."""
        return Path(self.vertices[::-1], self.arrows[::-1])

    def written(self) -> str:
        if self.is_trivial:
            return f"e({self.source})"
        return ".".join(reversed(self.arrows))

    def __str__(self) -> str:
        return self.written()


def truncations(p: Path) -> tuple[Path, Path]:
    """The pair (hat, tilde) of a nontrivial path."""
    return p.hat(), p.tilde()


class Quiver:
    """A finite quiver with a choice of associated arrows.

    ``associated[i]`` is an arrow terminating at ``i``. Opposite quivers carry
    instead ``special[i]``, an arrow starting at ``i``.
    Instances are immutable by convention and hashed by identity.
    """

    def __init__(self, vertices: Iterable[str], arrows: Iterable[Arrow],
                 associated: Mapping[str, str] | None = None, name: str = "Q",
                 special: Mapping[str, str] | None = None,
                 defaulted: Iterable[str] = ()):
        self.name = name
        self.vertices = tuple(vertices)
        self.arrows = tuple(arrows)
        self.associated = dict(associated or {})
        self.special = dict(special or {})
        self.defaulted = frozenset(defaulted)
        self.arrow = {a.id: a for a in self.arrows}
        self.vertex_index = {v: k for k, v in enumerate(self.vertices)}
        self.arrow_index = {a.id: k for k, a in enumerate(self.arrows)}
        self.incoming = {v: tuple(a.id for a in self.arrows if a.target == v) for v in self.vertices}
        self.outgoing = {v: tuple(a.id for a in self.arrows if a.source == v) for v in self.vertices}

    def __repr__(self) -> str:
        return f"Quiver({self.name!r}, {len(self.vertices)} vertices, {len(self.arrows)} arrows)"

    def s(self, a: str) -> str:
        return self.arrow[a].source

    def t(self, a: str) -> str:
        return self.arrow[a].target

    def is_associated(self, a: str) -> bool:
        return self.associated.get(self.t(a)) == a

    def is_special(self, a: str) -> bool:
        return self.special.get(self.s(a)) == a

    def arrow_path(self, a: str) -> Path:
        return Path((self.s(a), self.t(a)), (a,))

    def path(self, arrows: Iterable[str], start: str | None = None) -> Path:
        """Path from arrows in traversal order; ``start`` is needed only if empty."""
        arrows = tuple(arrows)
        if not arrows:
            if start is None:
                raise ValueError("trivial path needs its vertex")
            return Path.trivial(start)
        verts = [self.s(arrows[0])]
        for a in arrows:
            if self.s(a) != verts[-1]:
                raise ValueError(f"arrows {arrows} are not composable")
            verts.append(self.t(a))
        return Path(tuple(verts), arrows)

    def parse_path(self, text: str, vertex: str | None = None) -> Path:
        """Path from its written form ``a3.a2.a1``; ``e(i)`` or empty text (with vertex) is trivial."""
        text = text.strip()
        if m := re.fullmatch(r"e\(\s*([^()\s]+)\s*\)", text):
            if m.group(1) not in self.vertex_index:
                raise KeyError(f"unknown vertex {m.group(1)!r}")
            return Path.trivial(m.group(1))
        if not text:
            return self.path((), vertex)
        ids = [t.strip() for t in text.split(".")]
        for a in ids:
            if a not in self.arrow:
                raise KeyError(f"unknown arrow {a!r}")
        return self.path(reversed(ids))

    def extend(self, p: Path, a: str) -> Path:
        """p followed by the arrow a."""
        return p.then(self.arrow_path(a))

    def path_key(self, p: Path) -> tuple:
        """Canonical order: length, then written arrow sequence, then vertex."""
        ai = self.arrow_index
        return (p.length, tuple(ai[a] for a in reversed(p.arrows)), self.vertex_index[p.source])

    def pair_key(self, pair: tuple[Path, Path]) -> tuple:
        return (self.path_key(pair[0]), self.path_key(pair[1]))

    @cached_property
    def adjacency(self) -> list[list[int]]:
        n = len(self.vertices)
        m = [[0] * n for _ in range(n)]
        for a in self.arrows:
            m[self.vertex_index[a.target]][self.vertex_index[a.source]] += 1
        return m

    def to_text(self) -> str:
        lines = [f"quiver {self.name}"]
        lines += [f"vertex {v}" for v in self.vertices]
        for a in self.arrows:
            mark = " associated" if self.associated.get(a.target) == a.id else ""
            lines.append(f"arrow {a.id} : {a.source} -> {a.target}{mark}")
        return "\n".join(lines) + "\n"


# -- parsing and validation ---------------------------------------------------

_TOKEN = r"[^\s:#]+"
_LINE_QUIVER = re.compile(rf"^quiver\s+({_TOKEN})$")
_LINE_VERTEX = re.compile(rf"^vertex\s+({_TOKEN})$")
_LINE_ARROW = re.compile(rf"^arrow\s+({_TOKEN})\s*:\s*({_TOKEN})\s*->\s*({_TOKEN})(\s+associated)?$")


def parse_quiver(text: str, validate_structure: bool = True) -> Quiver:
    """Read the line-based quiver format.

    Vertices without an ``associated`` marker get the lowest declared arrow
    terminating at them. With ``validate_structure`` a quiver failing
    :func:`validate` raises :class:`QuiverValidationError`.
    """
    name = "Q"
    vertices: list[str] = []
    arrows: list[Arrow] = []
    marked: dict[str, str] = {}
    marked_line: dict[str, int] = {}
    pending: list[tuple[Arrow, int, bool]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _LINE_QUIVER.match(line):
            name = m.group(1)
        elif m := _LINE_VERTEX.match(line):
            v = m.group(1)
            if v in vertices:
                raise QuiverError(f"duplicate vertex {v!r}", lineno)
            vertices.append(v)
        elif m := _LINE_ARROW.match(line):
            a = Arrow(m.group(1), m.group(2), m.group(3))
            if any(b.id == a.id for b in arrows):
                raise QuiverError(f"duplicate arrow id {a.id!r}", lineno)
            arrows.append(a)
            pending.append((a, lineno, bool(m.group(4))))
        else:
            raise QuiverError(f"syntax error: {raw.strip()!r}", lineno)
    for a, lineno, assoc in pending:
        for end in (a.source, a.target):
            if end not in vertices:
                raise QuiverError(f"arrow {a.id!r} endpoint {end!r} is not a declared vertex", lineno)
        if assoc:
            if a.target in marked:
                raise QuiverError(
                    f"vertex {a.target!r} has two associated arrows "
                    f"({marked[a.target]!r} on line {marked_line[a.target]}, {a.id!r})", lineno)
            marked[a.target] = a.id
            marked_line[a.target] = lineno
    associated = dict(marked)
    defaulted = []
    for v in vertices:
        if v not in associated:
            inc = [a.id for a in arrows if a.target == v]
            if inc:
                associated[v] = inc[0]
                defaulted.append(v)
    q = Quiver(vertices, arrows, associated, name=name, defaulted=defaulted)
    if validate_structure:
        diag = validate(q)
        if not diag.ok:
            kinds = {name for name, passed, _ in diag.checks if not passed}
            prefix = "source vertex: " if "no-sources" in kinds else ""
            raise QuiverValidationError(prefix + "; ".join(diag.failures))
    return q


def declare_associated(q: Quiver, vertex: str, arrow: str) -> Quiver:
    """Copy of q with a different associated arrow at one vertex."""
    if q.t(arrow) != vertex:
        raise QuiverError(f"arrow {arrow!r} does not terminate at {vertex!r}")
    assoc = dict(q.associated)
    assoc[vertex] = arrow
    return Quiver(q.vertices, q.arrows, assoc, name=q.name,
                  defaulted=q.defaulted - {vertex})


@dataclass
class Diagnostics:
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    @property
    def failures(self) -> list[str]:
        return [msg for _, passed, msg in self.checks if not passed]

    def to_dict(self) -> dict:
        return {
            "status": "pass" if self.ok else "fail",
            "checks": [{"check": n, "status": "pass" if ok else "fail", "message": m}
                       for n, ok, m in self.checks],
            "notes": list(self.notes),
        }


def validate(q: Quiver) -> Diagnostics:
    """Finiteness, absence of sources, and a well-formed associated-arrow map."""
    d = Diagnostics()
    finite = bool(q.vertices) and bool(q.arrows)
    d.checks.append(("finite", finite,
                     "nonempty finite vertex and arrow sets" if finite else "quiver has no vertices or no arrows"))
    sources = [v for v in q.vertices if not q.incoming[v]]
    for v in sources:
        d.checks.append(("no-sources", False, f"vertex {v} is a source"))
    if not sources:
        d.checks.append(("no-sources", True, "every vertex has an incoming arrow"))
    bad = []
    for v in q.vertices:
        a = q.associated.get(v)
        if a is None:
            if q.incoming[v]:
                bad.append(f"vertex {v} has no associated arrow")
        elif a not in q.arrow or q.t(a) != v:
            bad.append(f"associated arrow {a} does not terminate at vertex {v}")
    for msg in bad:
        d.checks.append(("associated", False, msg))
    if not bad:
        d.checks.append(("associated", True, "associated map total and well-formed"))
    for v in q.vertices:
        if v in q.defaulted:
            d.notes.append(f"default associated arrow {q.associated[v]} chosen at vertex {v}")
    return d


def opposite(q: Quiver) -> Quiver:
    """Reverse every arrow; the special arrow at i is the reverse of associated(i)."""
    arrows = [Arrow(a.id, a.target, a.source) for a in q.arrows]
    return Quiver(q.vertices, arrows, name=f"{q.name}^op", special=q.associated)


# -- enumeration ----------------------------------------------------------------

@lru_cache(maxsize=None)
def _paths_by_length(q: Quiver, length: int) -> tuple[Path, ...]:
    if length == 0:
        return tuple(Path.trivial(v) for v in q.vertices)
    out = []
    for p in _paths_by_length(q, length - 1):
        for a in q.outgoing[p.target]:
            out.append(q.extend(p, a))
    return tuple(sorted(out, key=q.path_key))


def enumerate_paths(q: Quiver, length: int, end_at: str | None = None,
                    start_at: str | None = None) -> list[Path]:
    """All paths of a given length in canonical order, optionally pinned at an end."""
    return [p for p in _paths_by_length(q, length)
            if (end_at is None or p.target == end_at)
            and (start_at is None or p.source == start_at)]


def is_associated_pair(p: Path, q: Path, quiver: Quiver) -> bool:
    if p.source != q.source:
        return False
    if p.is_trivial or q.is_trivial:
        return True
    return p.first != q.first or not quiver.is_associated(p.first)


@lru_cache(maxsize=None)
def _lambda(quiver: Quiver, i: str, l: int, N: int) -> tuple:
    pairs = []
    m = max(0, -l)
    while 2 * m + l <= N:
        for p in enumerate_paths(quiver, m, end_at=i):
            for q in enumerate_paths(quiver, m + l, start_at=p.source):
                if is_associated_pair(p, q, quiver):
                    pairs.append((p, q))
        m += 1
    pairs.sort(key=quiver.pair_key)
    return tuple(pairs)


def enumerate_lambda(quiver: Quiver, i: str, l: int, N: int) -> list[tuple[Path, Path]]:
    """Associated pairs (p, q) with t(p)=i, l(q)-l(p)=l and l(p)+l(q) <= N."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    return list(_lambda(quiver, i, l, N))


def t_set(quiver: Quiver, a: str) -> tuple[str, ...]:
    """The other arrows sharing the target of the associated arrow a."""
    if not quiver.is_associated(a):
        raise ValueError(f"arrow {a!r} is not associated")
    return tuple(b for b in quiver.incoming[quiver.t(a)] if b != a)


def random_quiver(seed: int, max_vertices: int = 4, max_arrows: int = 6) -> Quiver:
    """Seeded random quiver without sources and with a random associated choice."""
    rng = random.Random(seed)
    n = rng.randint(1, max_vertices)
    vertices = [str(k + 1) for k in range(n)]
    arrows = []
    for v in vertices:
        arrows.append(Arrow(f"a{len(arrows) + 1}", rng.choice(vertices), v))
    for _ in range(rng.randint(0, max_arrows - n)):
        arrows.append(Arrow(f"a{len(arrows) + 1}", rng.choice(vertices), rng.choice(vertices)))
    associated = {v: rng.choice([a.id for a in arrows if a.target == v]) for v in vertices}
    return Quiver(vertices, arrows, associated, name=f"random{seed}")

"""Quivers, their doubles, paths, and the exact path algebra.

The path algebra here is the tensor algebra of the arrow bimodule over
B = k^I (one copy of the ground field per vertex), with arbitrary-precision
rational coefficients.  Its basis consists of the composable arrow words
together with one empty path e(i) per vertex i, the vertex idempotents.

Composition convention: paths act like functions and compose right to left.
A word is written left to right as ``c_1 c_2 ... c_L`` and the *rightmost*
arrow acts first, so consecutive letters must satisfy
``head(c_{k+1}) == tail(c_k)``.  The head of the word is ``head(c_1)`` and
its tail is ``tail(c_L)``.  Under this convention a representation that
sends each arrow to a matrix is multiplicative on words without any order
reversal.

All values are immutable after construction; the algebra operations are
pure functions and safe to share between threads.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    CompositionError,
    DuplicateArrowNameError,
    MismatchedQuiversError,
    ReservedNameError,
    UnknownArrowError,
    UnknownVertexError,
    ValidationError,
)

STAR = "*"

Vertex = Union[str, int]
Rational = Union[int, Fraction]


class Quiver:
    """A finite oriented graph: ordered vertices plus named arrows.

    The orderings of vertices and arrows are part of the data; they fix the
    total order on paths that all canonical normal forms use downstream.
    """

    __slots__ = ("vertices", "arrows", "_vertex_index")

    def __init__(self, vertices: Sequence[Vertex], arrows: Sequence[tuple]):
        vertices = tuple(vertices)
        if len(set(vertices)) != len(vertices):
            raise ValidationError(f"duplicate vertices in {vertices!r}")
        self.vertices = vertices
        self._vertex_index = {v: i for i, v in enumerate(vertices)}
        seen = set()
        normalized = []
        for name, tail, head in arrows:
            if not isinstance(name, str) or not name:
                raise ValidationError(f"arrow name must be a nonempty string, got {name!r}")
            if STAR in name:
                raise ReservedNameError(
                    f"arrow name {name!r} uses the reserved star suffix {STAR!r}"
                )
            if name in seen:
                raise DuplicateArrowNameError(f"duplicate arrow name {name!r}")
            seen.add(name)
            if tail not in self._vertex_index:
                raise UnknownVertexError(f"arrow {name!r} has unknown tail {tail!r}")
            if head not in self._vertex_index:
                raise UnknownVertexError(f"arrow {name!r} has unknown head {head!r}")
            normalized.append((name, tail, head))
        self.arrows = tuple(normalized)

    def vertex_index(self, v: Vertex) -> int:
        try:
            return self._vertex_index[v]
        except KeyError:
            raise UnknownVertexError(f"unknown vertex {v!r}") from None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Quiver)
            and self.vertices == other.vertices
            and self.arrows == other.arrows
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.arrows))

    def __repr__(self) -> str:
        return f"Quiver(vertices={list(self.vertices)!r}, arrows={list(self.arrows)!r})"

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"name": n, "tail": t, "head": h} for n, t, h in self.arrows],
        }

    @classmethod
    def from_json(cls, data: Union[str, dict]) -> "Quiver":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            vertices = data["vertices"]
            arrows = [(a["name"], a["tail"], a["head"]) for a in data["arrows"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed quiver JSON: {exc}") from exc
        return cls(vertices, arrows)


class Arrow:
    """One arrow of a doubled quiver, addressed by its index."""

    __slots__ = ("name", "tail", "head", "index", "star_index", "is_base")

    def __init__(self, name, tail, head, index, star_index, is_base):
        self.name = name
        self.tail = tail
        self.head = head
        self.index = index
        self.star_index = star_index
        self.is_base = is_base

    def __repr__(self) -> str:
        return f"Arrow({self.name!r}: {self.tail!r} -> {self.head!r})"


class DoubledQuiver:
    """The double of a quiver: every base arrow a gets a reverse arrow a*.

    Arrows are indexed 0..m-1 (base, in the base quiver's order) and
    m..2m-1 (their stars, in the same order), so ``star`` is the involution
    ``i <-> i + m (mod 2m)`` and has no fixed points.
    """

    __slots__ = ("base", "arrows", "_by_name")

    def __init__(self, base: Quiver):
        self.base = base
        m = len(base.arrows)
        arrows = []
        for i, (name, tail, head) in enumerate(base.arrows):
            arrows.append(Arrow(name, tail, head, i, i + m, True))
        for i, (name, tail, head) in enumerate(base.arrows):
            arrows.append(Arrow(name + STAR, head, tail, i + m, i, False))
        self.arrows = tuple(arrows)
        self._by_name = {a.name: a for a in arrows}

    @property
    def vertices(self) -> tuple:
        return self.base.vertices

    @property
    def num_base(self) -> int:
        return len(self.base.arrows)

    def arrow(self, index: int) -> Arrow:
        return self.arrows[index]

    def star(self, index: int) -> int:
        return self.arrows[index].star_index

    def arrow_by_name(self, name: str) -> Arrow:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownArrowError(f"unknown arrow {name!r}") from None

    def vertex_index(self, v: Vertex) -> int:
        return self.base.vertex_index(v)

    def __eq__(self, other) -> bool:
        return isinstance(other, DoubledQuiver) and self.base == other.base

    def __hash__(self) -> int:
        return hash(self.base)

    def __repr__(self) -> str:
        return f"DoubledQuiver({self.base!r})"


def double_quiver(q: Quiver) -> DoubledQuiver:
    """Return the double of ``q``; base arrows keep their names, reverse
    arrows get the star suffix."""
    return DoubledQuiver(q)


def one_loop_quiver() -> DoubledQuiver:
    """The doubled one-loop quiver: one vertex, loops x and x*."""
    return double_quiver(Quiver(["v"], [("x", "v", "v")]))


def _check_same_quiver(a: "Path | PathAlgebraElement", b) -> None:
    if a.quiver != b.quiver:
        raise MismatchedQuiversError("operands live over different doubled quivers")


class Path:
    """A composable word of doubled-quiver arrows, or the empty path e(i).

    ``arrows`` holds arrow indices left to right; the empty path carries the
    vertex it sits at.  Paths order by (length, arrow indices, base vertex),
    the total order all canonical forms below rely on.
    """

    __slots__ = ("quiver", "arrows", "base_vertex", "_key", "_hash")

    def __init__(self, quiver: DoubledQuiver, arrows: Iterable[int] = (), base_vertex=None):
        arrows = tuple(arrows)
        self.quiver = quiver
        self.arrows = arrows
        if arrows:
            arrs = quiver.arrows
            for k in range(len(arrows) - 1):
                left, right = arrs[arrows[k]], arrs[arrows[k + 1]]
                if left.tail != right.head:
                    raise CompositionError(
                        f"arrows {left.name!r} and {right.name!r} do not compose: "
                        f"tail({left.name}) = {left.tail!r} != head({right.name}) = {right.head!r}"
                    )
            self.base_vertex = None
            vkey = -1
        else:
            if base_vertex is None:
                raise ValidationError("an empty path needs a base vertex")
            quiver.vertex_index(base_vertex)
            self.base_vertex = base_vertex
            vkey = quiver.vertex_index(base_vertex)
        self._key = (len(arrows), arrows, vkey)
        self._hash = hash(self._key)

    @property
    def degree(self) -> int:
        return len(self.arrows)

    @property
    def head(self) -> Vertex:
        if not self.arrows:
            return self.base_vertex
        return self.quiver.arrows[self.arrows[0]].head

    @property
    def tail(self) -> Vertex:
        if not self.arrows:
            return self.base_vertex
        return self.quiver.arrows[self.arrows[-1]].tail

    @property
    def is_closed(self) -> bool:
        return self.head == self.tail

    def key(self) -> tuple:
        return self._key

    def rotations(self) -> Iterator["Path"]:
        """All cyclic rotations (valid only for closed paths)."""
        arrs = self.arrows
        for k in range(len(arrs)):
            yield Path(self.quiver, arrs[k:] + arrs[:k])

    def concat(self, other: "Path") -> "Path | None":
        """The product self . other (other acts first); None if it does not
        compose, including mismatched idempotents."""
        _check_same_quiver(self, other)
        if self.tail != other.head:
            return None
        if not self.arrows and not other.arrows:
            return other
        return Path(self.quiver, self.arrows + other.arrows)

    def __eq__(self, other) -> bool:
        return isinstance(other, Path) and self.quiver == other.quiver and self._key == other._key

    def __lt__(self, other: "Path") -> bool:
        return self._key < other._key

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        if not self.arrows:
            return f"e({self.base_vertex})"
        return " ".join(self.quiver.arrows[i].name for i in self.arrows)

    def __repr__(self) -> str:
        return f"Path({self})"


class PathAlgebraElement:
    """A finite rational linear combination of paths (an element of T_B E).

    Stored as a mapping path -> nonzero Fraction; all arithmetic is exact.
    The grading by word length is preserved by multiplication.
    """

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: DoubledQuiver, terms: Mapping[Path, Rational] | None = None):
        self.quiver = quiver
        clean: dict[Path, Fraction] = {}
        if terms:
            for path, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff:
                    clean[path] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, quiver: DoubledQuiver) -> "PathAlgebraElement":
        return cls(quiver)

    @classmethod
    def from_path(cls, path: Path, coeff: Rational = 1) -> "PathAlgebraElement":
        return cls(path.quiver, {path: Fraction(coeff)})

    @classmethod
    def idempotent(cls, quiver: DoubledQuiver, vertex: Vertex) -> "PathAlgebraElement":
        return cls.from_path(Path(quiver, (), vertex))

    @classmethod
    def unit(cls, quiver: DoubledQuiver) -> "PathAlgebraElement":
        """The unit of the algebra: the sum of all vertex idempotents."""
        return cls(quiver, {Path(quiver, (), v): Fraction(1) for v in quiver.vertices})

    @classmethod
    def generator(cls, quiver: DoubledQuiver, name: str) -> "PathAlgebraElement":
        return cls.from_path(Path(quiver, (quiver.arrow_by_name(name).index,)))

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def max_degree(self) -> int:
        return max((p.degree for p in self.terms), default=0)

    def homogeneous_part(self, degree: int) -> "PathAlgebraElement":
        return PathAlgebraElement(
            self.quiver, {p: c for p, c in self.terms.items() if p.degree == degree}
        )

    def truncated(self, max_degree: int) -> "PathAlgebraElement":
        return PathAlgebraElement(
            self.quiver, {p: c for p, c in self.terms.items() if p.degree <= max_degree}
        )

    def sorted_terms(self) -> list[tuple[Path, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: item[0].key())

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "PathAlgebraElement") -> "PathAlgebraElement":
        _check_same_quiver(self, other)
        out = dict(self.terms)
        for path, coeff in other.terms.items():
            out[path] = out.get(path, Fraction(0)) + coeff
        return PathAlgebraElement(self.quiver, out)

    def __sub__(self, other: "PathAlgebraElement") -> "PathAlgebraElement":
        return self + (-other)

    def __neg__(self) -> "PathAlgebraElement":
        return PathAlgebraElement(self.quiver, {p: -c for p, c in self.terms.items()})

    def scale(self, scalar: Rational) -> "PathAlgebraElement":
        scalar = Fraction(scalar)
        if not scalar:
            return PathAlgebraElement.zero(self.quiver)
        return PathAlgebraElement(self.quiver, {p: c * scalar for p, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        _check_same_quiver(self, other)
        out: dict[Path, Fraction] = {}
        for p, cp in self.terms.items():
            for q, cq in other.terms.items():
                prod = p.concat(q)
                if prod is None:
                    continue
                out[prod] = out.get(prod, Fraction(0)) + cp * cq
        return PathAlgebraElement(self.quiver, out)

    def __rmul__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            return self.scale(scalar)
        return NotImplemented

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PathAlgebraElement)
            and self.quiver == other.quiver
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.quiver, frozenset(self.terms.items())))

    def __str__(self) -> str:
        return format_terms((str(p), c) for p, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"PathAlgebraElement({self})"


def format_terms(pairs: Iterable[tuple[str, Fraction]]) -> str:
    """Render (payload, coefficient) pairs as a signed sum in DSL syntax."""
    pieces = []
    for payload, coeff in pairs:
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        body = payload if mag == 1 and payload else (f"{mag} {payload}".strip() or str(mag))
        pieces.append((sign, body))
    if not pieces:
        return "0"
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def compose_paths(p: Path, q: Path) -> PathAlgebraElement:
    """The product p . q in the path algebra: the single concatenated word
    when head(q) == tail(p), the zero element otherwise."""
    prod = p.concat(q)
    if prod is None:
        return PathAlgebraElement.zero(p.quiver)
    return PathAlgebraElement.from_path(prod)


def algebra_combine(op: str, f: PathAlgebraElement, g) -> PathAlgebraElement:
    """Named entry point for the three algebra operations.

    op is one of "add", "scale", "multiply"; for "scale" the second operand
    is a rational.
    """
    if op == "add":
        return f + g
    if op == "multiply":
        return f * g
    if op == "scale":
        return f.scale(g)
    raise ValidationError(f"unknown operation {op!r}; expected add/scale/multiply")

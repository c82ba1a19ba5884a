"""Cyclic words (necklaces), cyclic derivatives, and the necklace bracket.

The degree-zero part of the noncommutative de Rham complex of a doubled
quiver's path algebra A is A/[A,A]: closed paths up to rotation, plus one
copy of the ground field per vertex (the image of B).  A Necklace stores
each cycle class by its canonical rotation, the minimal rotation under the
global path order.

The bracket of two necklaces is

    {f, g} = sum over base arrows a of  df/da . dg/da* - df/da* . dg/da,

projected back to cyclic words, where df/da is the cyclic derivative.  An
independent oracle computes the same bracket by the double sum over letter
pairs weighted by the symplectic pairing of generators, with the two
rotated remainders concatenated; the two implementations are compared
term-for-term in the test suite.

Sign conventions are pinned so that the Hamiltonian derivation t_f of a
necklace f satisfies, exactly and for all g,

    L_{t_f} g = {f, g}     and     [t_f, t_g] = t_{{f,g}},

which forces t_f(a) = -df/da* and t_f(a*) = +df/da on generators
(equivalently i_{t_f} of the 2-form  sum_a da*.da  equals df).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import MismatchedQuiversError, UnknownArrowError, ValidationError
from .quiver import (
    DoubledQuiver,
    Path,
    PathAlgebraElement,
    Rational,
    Vertex,
    format_terms,
)


def canonical_rotation(path: Path) -> Path:
    """The minimal rotation of a closed path under the path total order."""
    best = path
    arrs = path.arrows
    for k in range(1, len(arrs)):
        cand = Path(path.quiver, arrs[k:] + arrs[:k])
        if cand.key() < best.key():
            best = cand
    return best


class Necklace:
    """An element of A/[A,A]: cycle classes plus a per-vertex degree-0 part."""

    __slots__ = ("quiver", "cycles", "vertex_part")

    def __init__(
        self,
        quiver: DoubledQuiver,
        cycles: Mapping[Path, Rational] | None = None,
        vertex_part: Mapping[Vertex, Rational] | None = None,
    ):
        self.quiver = quiver
        clean: dict[Path, Fraction] = {}
        if cycles:
            for path, coeff in cycles.items():
                coeff = Fraction(coeff)
                if not coeff:
                    continue
                if path.degree == 0:
                    raise ValidationError("degree-0 terms belong in vertex_part")
                if not path.is_closed:
                    raise ValidationError(f"cycle term {path} is not a closed path")
                canon = canonical_rotation(path)
                clean[canon] = clean.get(canon, Fraction(0)) + coeff
        clean = {p: c for p, c in clean.items() if c}
        vclean: dict[Vertex, Fraction] = {}
        if vertex_part:
            for v, coeff in vertex_part.items():
                quiver.vertex_index(v)
                coeff = Fraction(coeff)
                if coeff:
                    vclean[v] = coeff
        self.cycles = clean
        self.vertex_part = vclean

    @classmethod
    def zero(cls, quiver: DoubledQuiver) -> "Necklace":
        return cls(quiver)

    def is_zero(self) -> bool:
        return not self.cycles and not self.vertex_part

    def max_degree(self) -> int:
        return max((p.degree for p in self.cycles), default=0)

    def homogeneous_part(self, degree: int) -> "Necklace":
        if degree == 0:
            return Necklace(self.quiver, None, self.vertex_part)
        return Necklace(
            self.quiver, {p: c for p, c in self.cycles.items() if p.degree == degree}
        )

    def positive_part(self) -> "Necklace":
        return Necklace(self.quiver, self.cycles)

    def truncated(self, max_degree: int) -> "Necklace":
        return Necklace(
            self.quiver,
            {p: c for p, c in self.cycles.items() if p.degree <= max_degree},
            self.vertex_part,
        )

    def lift(self) -> PathAlgebraElement:
        """The canonical representative in A (one path per cycle class)."""
        elem = PathAlgebraElement(self.quiver, dict(self.cycles))
        for v, c in self.vertex_part.items():
            elem = elem + PathAlgebraElement.idempotent(self.quiver, v).scale(c)
        return elem

    def __add__(self, other: "Necklace") -> "Necklace":
        if self.quiver != other.quiver:
            raise MismatchedQuiversError("necklaces over different quivers")
        cycles = dict(self.cycles)
        for p, c in other.cycles.items():
            cycles[p] = cycles.get(p, Fraction(0)) + c
        vertex = dict(self.vertex_part)
        for v, c in other.vertex_part.items():
            vertex[v] = vertex.get(v, Fraction(0)) + c
        return Necklace(self.quiver, cycles, vertex)

    def __sub__(self, other: "Necklace") -> "Necklace":
        return self + (-other)

    def __neg__(self) -> "Necklace":
        return self.scale(-1)

    def scale(self, scalar: Rational) -> "Necklace":
        scalar = Fraction(scalar)
        return Necklace(
            self.quiver,
            {p: c * scalar for p, c in self.cycles.items()},
            {v: c * scalar for v, c in self.vertex_part.items()},
        )

    def __rmul__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            return self.scale(scalar)
        return NotImplemented

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Necklace)
            and self.quiver == other.quiver
            and self.cycles == other.cycles
            and self.vertex_part == other.vertex_part
        )

    def __hash__(self) -> int:
        return hash(
            (
                self.quiver,
                frozenset(self.cycles.items()),
                frozenset(self.vertex_part.items()),
            )
        )

    def sorted_terms(self):
        vs = sorted(self.vertex_part.items(), key=lambda item: self.quiver.vertex_index(item[0]))
        cs = sorted(self.cycles.items(), key=lambda item: item[0].key())
        return vs, cs

    def __str__(self) -> str:
        vs, cs = self.sorted_terms()
        pairs = [(f"e({v})", c) for v, c in vs]
        pairs += [(f"cyc({p})", c) for p, c in cs]
        return format_terms(pairs)

    def __repr__(self) -> str:
        return f"Necklace({self})"

    def to_json(self) -> dict:
        vs, cs = self.sorted_terms()
        return {
            "cycles": [[str(p), str(c)] for p, c in cs],
            "vertex_part": {str(v): str(c) for v, c in vs},
        }


def project_to_necklace(f: PathAlgebraElement) -> Necklace:
    """Project an algebra element to A/[A,A].

    Closed paths map to their canonical rotation, open paths die (they are
    commutators with idempotents), degree-0 terms land in the vertex part.
    """
    cycles: dict[Path, Fraction] = {}
    vertex: dict[Vertex, Fraction] = {}
    for path, coeff in f.terms.items():
        if path.degree == 0:
            vertex[path.base_vertex] = vertex.get(path.base_vertex, Fraction(0)) + coeff
        elif path.is_closed:
            cycles[path] = cycles.get(path, Fraction(0)) + coeff
    return Necklace(f.quiver, cycles, vertex)


def cyclic_derivative(f: Necklace, arrow: Union[int, str]) -> PathAlgebraElement:
    """The cyclic derivative df/da.

    For every occurrence of the arrow in a cycle, emit the word that starts
    with the letter right after the occurrence and wraps around to the
    letter right before it.  The result lies in 1_{tail(a)} . A . 1_{head(a)}.
    """
    quiver = f.quiver
    if isinstance(arrow, str):
        idx = quiver.arrow_by_name(arrow).index
    else:
        if not 0 <= arrow < len(quiver.arrows):
            raise UnknownArrowError(f"arrow index {arrow} out of range")
        idx = arrow
    out: dict[Path, Fraction] = {}
    for path, coeff in f.cycles.items():
        arrs = path.arrows
        for i, a in enumerate(arrs):
            if a != idx:
                continue
            rest = arrs[i + 1 :] + arrs[:i]
            if rest:
                word = Path(quiver, rest)
            else:
                word = Path(quiver, (), quiver.arrows[idx].tail)
            out[word] = out.get(word, Fraction(0)) + coeff
    return PathAlgebraElement(quiver, out)


class SymplecticData:
    """The standard symplectic pairing on the arrow span of a doubled quiver:
    w(a, a*) = +1 and w(a*, a) = -1 for every base arrow a, zero otherwise."""

    __slots__ = ("quiver",)

    def __init__(self, quiver: DoubledQuiver):
        self.quiver = quiver

    def pairing(self, i: int, j: int) -> Fraction:
        arrow = self.quiver.arrows[i]
        if arrow.star_index != j:
            return Fraction(0)
        return Fraction(1) if arrow.is_base else Fraction(-1)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymplecticData) and self.quiver == other.quiver

    def __hash__(self) -> int:
        return hash(("SymplecticData", self.quiver))


class Derivation:
    """A B-linear derivation of the path algebra, given by arrow images.

    The image of each arrow must share that arrow's endpoints; idempotents
    are killed, so the derivation is determined by Leibniz on words.
    """

    __slots__ = ("quiver", "images")

    def __init__(self, quiver: DoubledQuiver, images: Mapping[int, PathAlgebraElement]):
        self.quiver = quiver
        clean: dict[int, PathAlgebraElement] = {}
        for idx, elem in images.items():
            arrow = quiver.arrows[idx]
            if elem.quiver != quiver:
                raise MismatchedQuiversError("derivation image over a different quiver")
            for path in elem.terms:
                if path.head != arrow.head or path.tail != arrow.tail:
                    raise ValidationError(
                        f"image term {path} of {arrow.name!r} violates endpoint "
                        f"compatibility ({arrow.head!r} <- {arrow.tail!r})"
                    )
            if not elem.is_zero():
                clean[idx] = elem
        self.images = clean

    @classmethod
    def zero(cls, quiver: DoubledQuiver) -> "Derivation":
        return cls(quiver, {})

    @classmethod
    def from_names(cls, quiver: DoubledQuiver, images: Mapping[str, PathAlgebraElement]):
        return cls(quiver, {quiver.arrow_by_name(n).index: e for n, e in images.items()})

    def image(self, idx: int) -> PathAlgebraElement:
        return self.images.get(idx, PathAlgebraElement.zero(self.quiver))

    def is_zero(self) -> bool:
        return not self.images

    def apply_to_path(self, path: Path) -> PathAlgebraElement:
        """Leibniz: replace each letter in turn by its image."""
        out = PathAlgebraElement.zero(self.quiver)
        if not path.arrows:
            return out
        for i, a in enumerate(path.arrows):
            img = self.images.get(a)
            if img is None:
                continue
            if i:
                prefix = PathAlgebraElement.from_path(Path(self.quiver, path.arrows[:i]))
            else:
                prefix = PathAlgebraElement.idempotent(self.quiver, self.quiver.arrows[a].head)
            suffix_arrows = path.arrows[i + 1 :]
            if suffix_arrows:
                suffix = PathAlgebraElement.from_path(Path(self.quiver, suffix_arrows))
            else:
                suffix = PathAlgebraElement.idempotent(self.quiver, self.quiver.arrows[a].tail)
            out = out + prefix * img * suffix
        return out

    def apply(self, elem: PathAlgebraElement) -> PathAlgebraElement:
        out = PathAlgebraElement.zero(self.quiver)
        for path, coeff in elem.terms.items():
            out = out + self.apply_to_path(path).scale(coeff)
        return out

    def commutator(self, other: "Derivation") -> "Derivation":
        """[self, other], again a derivation of the path algebra."""
        if self.quiver != other.quiver:
            raise MismatchedQuiversError("derivations over different quivers")
        images = {}
        for idx in range(len(self.quiver.arrows)):
            gen = PathAlgebraElement.from_path(Path(self.quiver, (idx,)))
            img = self.apply(other.apply(gen)) - other.apply(self.apply(gen))
            if not img.is_zero():
                images[idx] = img
        return Derivation(self.quiver, images)

    def scale(self, scalar: Rational) -> "Derivation":
        return Derivation(self.quiver, {i: e.scale(scalar) for i, e in self.images.items()})

    def __add__(self, other: "Derivation") -> "Derivation":
        if self.quiver != other.quiver:
            raise MismatchedQuiversError("derivations over different quivers")
        images = dict(self.images)
        for idx, elem in other.images.items():
            images[idx] = images.get(idx, PathAlgebraElement.zero(self.quiver)) + elem
        return Derivation(self.quiver, images)

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Derivation)
            and self.quiver == other.quiver
            and self.images == other.images
        )

    def __str__(self) -> str:
        body = ", ".join(
            f"{self.quiver.arrows[i].name} -> {e}" for i, e in sorted(self.images.items())
        )
        return "theta{" + body + "}"

    def __repr__(self) -> str:
        return f"Derivation({self})"


def necklace_bracket(f: Necklace, g: Necklace, sym: SymplecticData) -> Necklace:
    """The necklace Lie bracket via cyclic derivatives (coordinate formula)."""
    quiver = sym.quiver
    if f.quiver != quiver or g.quiver != quiver:
        raise MismatchedQuiversError("bracket operands over different quivers")
    total = PathAlgebraElement.zero(quiver)
    for a in range(quiver.num_base):
        astar = quiver.star(a)
        total = total + cyclic_derivative(f, a) * cyclic_derivative(g, astar)
        total = total - cyclic_derivative(f, astar) * cyclic_derivative(g, a)
    return project_to_necklace(total)


def bracket_tensor_oracle(f: Necklace, g: Necklace, sym: SymplecticData) -> Necklace:
    """Independent oracle for the bracket: the double sum over letter pairs.

    For cycle words u = u_1...u_p and v = v_1...v_q the bracket collects
    w(u_i, v_j) times the concatenation of the two rotated remainders
    u_{i+1}..u_p u_1..u_{i-1} and v_{j+1}..v_q v_1..v_{j-1}, then projects.
    """
    quiver = sym.quiver
    if f.quiver != quiver or g.quiver != quiver:
        raise MismatchedQuiversError("bracket operands over different quivers")
    out = PathAlgebraElement.zero(quiver)
    for u, cu in f.cycles.items():
        for v, cv in g.cycles.items():
            coeff = cu * cv
            uarr, varr = u.arrows, v.arrows
            for i, ui in enumerate(uarr):
                for j, vj in enumerate(varr):
                    w = sym.pairing(ui, vj)
                    if not w:
                        continue
                    arrows = uarr[i + 1 :] + uarr[:i] + varr[j + 1 :] + varr[:j]
                    if arrows:
                        word = Path(quiver, arrows)
                    else:
                        word = Path(quiver, (), quiver.arrows[ui].tail)
                    out = out + PathAlgebraElement.from_path(word, w * coeff)
    return project_to_necklace(out)


def hamiltonian_derivation(f: Necklace, sym: SymplecticData) -> Derivation:
    """The derivation t_f with L_{t_f} g = {f, g} for every necklace g.

    On generators: t_f(a) = -df/da* and t_f(a*) = +df/da for base arrows a.
    Degree-0 necklaces map to the zero derivation, and f -> t_f intertwines
    the bracket with the derivation commutator.
    """
    quiver = sym.quiver
    if f.quiver != quiver:
        raise MismatchedQuiversError("necklace over a different quiver")
    images: dict[int, PathAlgebraElement] = {}
    for a in range(quiver.num_base):
        astar = quiver.star(a)
        img_a = -cyclic_derivative(f, astar)
        img_astar = cyclic_derivative(f, a)
        if not img_a.is_zero():
            images[a] = img_a
        if not img_astar.is_zero():
            images[astar] = img_astar
    return Derivation(quiver, images)

"""Noncommutative de Rham forms in degrees 0, 1, 2 over a doubled quiver.

Degree 0 is the necklace space A/[A,A].  A degree-1 class is a sum of
terms ``p.da`` with the d-slot rotated rightmost; such a term survives the
commutator quotient exactly when p.da closes up into a cycle, i.e.
tail(p) = head(a) and head(p) = tail(a).  A degree-2 class is a sum of
terms ``u.da.v.db``; the only relation in degree 2 is the super-commutator
swap  u.da.v.db = -v.db.u.da, and the canonical representative of a class
is the one with the smaller (slot, path, slot, path) key, the sign being
absorbed into the stored coefficient.  Higher form degrees are not stored.

The module also carries "raw" (unreduced) forms: linear combinations of
alternating path/d-slot words before passing to the commutator quotient.
They exist so that products of forms, Leibniz expansions of d, and
pullbacks under substitutions can be computed termwise and projected once
at the end; the expression DSL evaluates into them as well.

Operators: ``d`` (degree +1), the contraction ``i_theta`` (degree -1,
a super-derivation with i(da) = theta(a)), and the Lie derivative
``L_theta`` (degree 0, Leibniz on letters with L(da) = d(theta(a))).
They satisfy the Cartan relations on classes, and the Euler derivation
eu(a) = a turns the homotopy formula  L_eu = d i_eu + i_eu d  into an
explicit primitive-finder for closed forms of positive weight.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

from .errors import (
    MismatchedQuiversError,
    NotClosedError,
    ValidationError,
    WeightZeroError,
)
from .necklace import Derivation, Necklace, SymplecticData, project_to_necklace
from .quiver import DoubledQuiver, Path, PathAlgebraElement, Rational, format_terms

FormLike = Union[Necklace, "OneForm", "TwoForm"]


class OneForm:
    """A degree-1 de Rham class: terms (p, a) -> coeff meaning p.da."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: DoubledQuiver, terms: Mapping[tuple, Rational] | None = None):
        self.quiver = quiver
        clean: dict[tuple, Fraction] = {}
        if terms:
            for (path, slot), coeff in terms.items():
                coeff = Fraction(coeff)
                if not coeff:
                    continue
                arrow = quiver.arrows[slot]
                if path.tail != arrow.head or path.head != arrow.tail:
                    raise ValidationError(
                        f"term {path}.d({arrow.name}) does not close up into a cycle"
                    )
                key = (path, slot)
                clean[key] = clean.get(key, Fraction(0)) + coeff
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def zero(cls, quiver: DoubledQuiver) -> "OneForm":
        return cls(quiver)

    def is_zero(self) -> bool:
        return not self.terms

    def weight(self, key: tuple) -> int:
        return key[0].degree + 1

    def max_weight(self) -> int:
        return max((self.weight(k) for k in self.terms), default=0)

    def weight_part(self, w: int) -> "OneForm":
        return OneForm(self.quiver, {k: c for k, c in self.terms.items() if self.weight(k) == w})

    def truncated(self, max_weight: int) -> "OneForm":
        return OneForm(
            self.quiver, {k: c for k, c in self.terms.items() if self.weight(k) <= max_weight}
        )

    def slot_element(self, slot: int) -> PathAlgebraElement:
        """The coefficient of d(arrow) as a path-algebra element."""
        return PathAlgebraElement(
            self.quiver, {p: c for (p, s), c in self.terms.items() if s == slot}
        )

    def __add__(self, other: "OneForm") -> "OneForm":
        if self.quiver != other.quiver:
            raise MismatchedQuiversError("one-forms over different quivers")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return OneForm(self.quiver, out)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return self + other.scale(-1)

    def __neg__(self) -> "OneForm":
        return self.scale(-1)

    def scale(self, scalar: Rational) -> "OneForm":
        return OneForm(self.quiver, {k: c * Fraction(scalar) for k, c in self.terms.items()})

    def __rmul__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            return self.scale(scalar)
        return NotImplemented

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OneForm)
            and self.quiver == other.quiver
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.quiver, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: (item[0][1], item[0][0].key()))

    def __str__(self) -> str:
        def render(key):
            path, slot = key
            name = self.quiver.arrows[slot].name
            return f"d({name})" if path.degree == 0 else f"{path} d({name})"

        return format_terms((render(k), c) for k, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"OneForm({self})"


def _two_key(u: Path, a: int, v: Path, b: int):
    return (a, u.key(), b, v.key())


class TwoForm:
    """A degree-2 de Rham class: terms (u, a, v, b) -> coeff meaning u.da.v.db,
    stored swap-canonically (u.da.v.db = -v.db.u.da)."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: DoubledQuiver, terms: Mapping[tuple, Rational] | None = None):
        self.quiver = quiver
        clean: dict[tuple, Fraction] = {}
        if terms:
            for (u, a, v, b), coeff in terms.items():
                coeff = Fraction(coeff)
                if not coeff:
                    continue
                arrows = quiver.arrows
                if (
                    u.tail != arrows[a].head
                    or arrows[a].tail != v.head
                    or v.tail != arrows[b].head
                    or arrows[b].tail != u.head
                ):
                    raise ValidationError(
                        f"term {u}.d({arrows[a].name}).{v}.d({arrows[b].name}) "
                        "does not close up into a cycle"
                    )
                ka = _two_key(u, a, v, b)
                kb = _two_key(v, b, u, a)
                if ka == kb:
                    continue  # self-paired term is its own negative
                if ka < kb:
                    key, signed = (u, a, v, b), coeff
                else:
                    key, signed = (v, b, u, a), -coeff
                clean[key] = clean.get(key, Fraction(0)) + signed
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def zero(cls, quiver: DoubledQuiver) -> "TwoForm":
        return cls(quiver)

    def is_zero(self) -> bool:
        return not self.terms

    def weight(self, key: tuple) -> int:
        u, _a, v, _b = key
        return u.degree + v.degree + 2

    def max_weight(self) -> int:
        return max((self.weight(k) for k in self.terms), default=0)

    def weight_part(self, w: int) -> "TwoForm":
        return TwoForm(self.quiver, {k: c for k, c in self.terms.items() if self.weight(k) == w})

    def truncated(self, max_weight: int) -> "TwoForm":
        return TwoForm(
            self.quiver, {k: c for k, c in self.terms.items() if self.weight(k) <= max_weight}
        )

    def __add__(self, other: "TwoForm") -> "TwoForm":
        if self.quiver != other.quiver:
            raise MismatchedQuiversError("two-forms over different quivers")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return TwoForm(self.quiver, out)

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return self + other.scale(-1)

    def __neg__(self) -> "TwoForm":
        return self.scale(-1)

    def scale(self, scalar: Rational) -> "TwoForm":
        return TwoForm(self.quiver, {k: c * Fraction(scalar) for k, c in self.terms.items()})

    def __rmul__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            return self.scale(scalar)
        return NotImplemented

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TwoForm)
            and self.quiver == other.quiver
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.quiver, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: _two_key(*item[0]))

    def __str__(self) -> str:
        def render(key):
            u, a, v, b = key
            names = self.quiver.arrows
            parts = []
            if u.degree:
                parts.append(str(u))
            parts.append(f"d({names[a].name})")
            if v.degree:
                parts.append(str(v))
            parts.append(f"d({names[b].name})")
            return " ".join(parts)

        return format_terms((render(k), c) for k, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"TwoForm({self})"


# ---------------------------------------------------------------------------
# Raw (unreduced) forms: used to multiply, differentiate, and substitute
# before projecting to the de Rham quotient.
# ---------------------------------------------------------------------------


class RawForm:
    """A linear combination of alternating words  p0 . da1 . p1 ... in form
    degree 0, 1 or 2.  Term keys are tuples (p0,), (p0, a1, p1) or
    (p0, a1, p1, a2, p2); adjacent segments must compose."""

    __slots__ = ("quiver", "degree", "terms")

    def __init__(self, quiver: DoubledQuiver, degree: int, terms: Mapping[tuple, Rational] | None = None):
        if degree not in (0, 1, 2):
            raise ValidationError("raw forms exist only in degrees 0..2")
        self.quiver = quiver
        self.degree = degree
        clean: dict[tuple, Fraction] = {}
        if terms:
            for key, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff:
                    clean[key] = clean.get(key, Fraction(0)) + coeff
        self.terms = {k: c for k, c in clean.items() if c}

    @classmethod
    def from_element(cls, elem: PathAlgebraElement) -> "RawForm":
        return cls(elem.quiver, 0, {(p,): c for p, c in elem.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def scale(self, scalar: Rational) -> "RawForm":
        return RawForm(
            self.quiver, self.degree, {k: c * Fraction(scalar) for k, c in self.terms.items()}
        )

    def __add__(self, other: "RawForm") -> "RawForm":
        if self.quiver != other.quiver:
            raise MismatchedQuiversError("raw forms over different quivers")
        if self.degree != other.degree:
            raise ValidationError("cannot add raw forms of different degrees")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return RawForm(self.quiver, self.degree, out)

    def __sub__(self, other: "RawForm") -> "RawForm":
        return self + other.scale(-1)

    def __mul__(self, other: "RawForm") -> "RawForm":
        """Concatenation product; the joint degree must stay <= 2."""
        if self.quiver != other.quiver:
            raise MismatchedQuiversError("raw forms over different quivers")
        degree = self.degree + other.degree
        if degree > 2:
            raise ValidationError("form degrees above 2 are not supported")
        out: dict[tuple, Fraction] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                glue = k1[-1].concat(k2[0])
                if glue is None:
                    continue
                key = k1[:-1] + (glue,) + k2[1:]
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return RawForm(self.quiver, degree, out)

    def d(self) -> "RawForm":
        """Super-differential by Leibniz; the sign of a d-slot created to the
        right of k existing ones is (-1)^k."""
        if self.degree >= 2:
            raise ValidationError("d of a raw 2-form needs degree 3, not supported")
        out: dict[tuple, Fraction] = {}

        def emit(key, coeff):
            out[key] = out.get(key, Fraction(0)) + coeff

        for key, coeff in self.terms.items():
            segments = key[0::2]
            slots = key[1::2]
            for seg_pos, seg in enumerate(segments):
                sign = Fraction(-1) ** seg_pos
                for i, letter in enumerate(seg.arrows):
                    arrow = self.quiver.arrows[letter]
                    if i:
                        left: Path | None = Path(self.quiver, seg.arrows[:i])
                    else:
                        left = Path(self.quiver, (), arrow.head)
                    if i + 1 < len(seg.arrows):
                        right: Path | None = Path(self.quiver, seg.arrows[i + 1 :])
                    else:
                        right = Path(self.quiver, (), arrow.tail)
                    new_segments = (
                        segments[:seg_pos] + (left, right) + segments[seg_pos + 1 :]
                    )
                    new_slots = slots[:seg_pos] + (letter,) + slots[seg_pos:]
                    new_key = [new_segments[0]]
                    for s, p in zip(new_slots, new_segments[1:]):
                        new_key.extend([s, p])
                    emit(tuple(new_key), sign * coeff)
        return RawForm(self.quiver, self.degree + 1, out)

    def project(self):
        """Project to the de Rham quotient: Necklace, OneForm or TwoForm."""
        if self.degree == 0:
            return project_to_necklace(
                PathAlgebraElement(self.quiver, {k[0]: c for k, c in self.terms.items()})
            )
        if self.degree == 1:
            out: dict[tuple, Fraction] = {}
            for (p, a, q), coeff in self.terms.items():
                word = q.concat(p)  # rotate the trailing segment to the front
                if word is None:
                    continue
                arrow = self.quiver.arrows[a]
                if word.tail != arrow.head or word.head != arrow.tail:
                    continue
                out[(word, a)] = out.get((word, a), Fraction(0)) + coeff
            return OneForm(self.quiver, out)
        out2: dict[tuple, Fraction] = {}
        for (p, a, q, b, r), coeff in self.terms.items():
            u = r.concat(p)
            if u is None:
                continue
            arrows = self.quiver.arrows
            if (
                u.tail != arrows[a].head
                or arrows[a].tail != q.head
                or q.tail != arrows[b].head
                or arrows[b].tail != u.head
            ):
                continue
            key = (u, a, q, b)
            out2[key] = out2.get(key, Fraction(0)) + coeff
        return TwoForm(self.quiver, out2)


def raw_d_of_element(elem: PathAlgebraElement) -> RawForm:
    return RawForm.from_element(elem).d()


# ---------------------------------------------------------------------------
# The calculus on classes.
# ---------------------------------------------------------------------------


def d0(f: Necklace) -> OneForm:
    """The differential DR0 -> DR1:  df = sum_a (df/da).da."""
    quiver = f.quiver
    out: dict[tuple, Fraction] = {}
    for path, coeff in f.cycles.items():
        arrs = path.arrows
        for i, a in enumerate(arrs):
            rest = arrs[i + 1 :] + arrs[:i]
            word = Path(quiver, rest) if rest else Path(quiver, (), quiver.arrows[a].tail)
            key = (word, a)
            out[key] = out.get(key, Fraction(0)) + coeff
    return OneForm(quiver, out)


def d1(alpha: OneForm) -> TwoForm:
    """The differential DR1 -> DR2 by Leibniz on the path part."""
    quiver = alpha.quiver
    out: dict[tuple, Fraction] = {}
    for (p, a), coeff in alpha.terms.items():
        arrs = p.arrows
        for k, letter in enumerate(arrs):
            arrow = quiver.arrows[letter]
            u = Path(quiver, arrs[:k]) if k else Path(quiver, (), arrow.head)
            v = Path(quiver, arrs[k + 1 :]) if k + 1 < len(arrs) else Path(quiver, (), arrow.tail)
            term = TwoForm(quiver, {(u, letter, v, a): coeff})
            for key, c in term.terms.items():
                out[key] = out.get(key, Fraction(0)) + c
    return TwoForm(quiver, out)


def d(form: FormLike):
    if isinstance(form, Necklace):
        return d0(form)
    if isinstance(form, OneForm):
        return d1(form)
    raise ValidationError("d of a 2-form would be a 3-form, which is not stored")


def _check_theta(theta: Derivation, form) -> None:
    if theta.quiver != form.quiver:
        raise MismatchedQuiversError("derivation and form over different quivers")


def contract(theta: Derivation, form: FormLike):
    """Contraction i_theta: kills degree 0, sends p.da to the class of
    p.theta(a), and acts on u.da.v.db as a super-derivation."""
    _check_theta(theta, form)
    quiver = form.quiver
    if isinstance(form, Necklace):
        return Necklace.zero(quiver)
    if isinstance(form, OneForm):
        out = PathAlgebraElement.zero(quiver)
        for (p, a), coeff in form.terms.items():
            img = theta.images.get(a)
            if img is None:
                continue
            out = out + (PathAlgebraElement.from_path(p) * img).scale(coeff)
        return project_to_necklace(out)
    if isinstance(form, TwoForm):
        out: dict[tuple, Fraction] = {}

        def emit(path_elem: PathAlgebraElement, slot: int, sign: Fraction):
            for w, c in path_elem.terms.items():
                term = OneForm(quiver, {(w, slot): sign * c})
                for key, cc in term.terms.items():
                    out[key] = out.get(key, Fraction(0)) + cc

        for (u, a, v, b), coeff in form.terms.items():
            img_a = theta.images.get(a)
            if img_a is not None:
                emit(
                    PathAlgebraElement.from_path(u) * img_a * PathAlgebraElement.from_path(v),
                    b,
                    coeff,
                )
            img_b = theta.images.get(b)
            if img_b is not None:
                emit(
                    PathAlgebraElement.from_path(v) * img_b * PathAlgebraElement.from_path(u),
                    a,
                    -coeff,
                )
        return OneForm(quiver, out)
    raise ValidationError(f"cannot contract a {type(form).__name__}")


def lie_derivative(theta: Derivation, form: FormLike):
    """Lie derivative by Leibniz on letters, with L(da) = d(theta(a))."""
    _check_theta(theta, form)
    quiver = form.quiver
    if isinstance(form, Necklace):
        out = PathAlgebraElement.zero(quiver)
        for path, coeff in form.cycles.items():
            out = out + theta.apply_to_path(path).scale(coeff)
        return project_to_necklace(out)
    if isinstance(form, OneForm):
        result = OneForm.zero(quiver)
        for (p, a), coeff in form.terms.items():
            # letters of the path part
            acc: dict[tuple, Fraction] = {}
            for w, c in theta.apply_to_path(p).terms.items():
                key = (w, a)
                acc[key] = acc.get(key, Fraction(0)) + c * coeff
            result = result + OneForm(quiver, acc)
            # the d-slot: p . d(theta(a))
            img = theta.images.get(a)
            if img is not None:
                raw = RawForm.from_element(
                    PathAlgebraElement.from_path(p, coeff)
                ) * raw_d_of_element(img)
                result = result + raw.project()
        return result
    if isinstance(form, TwoForm):
        result = TwoForm.zero(quiver)
        for (u, a, v, b), coeff in form.terms.items():
            u_elem = PathAlgebraElement.from_path(u)
            v_elem = PathAlgebraElement.from_path(v)
            da = RawForm(quiver, 1, {(Path(quiver, (), quiver.arrows[a].head), a,
                                      Path(quiver, (), quiver.arrows[a].tail)): Fraction(1)})
            db = RawForm(quiver, 1, {(Path(quiver, (), quiver.arrows[b].head), b,
                                      Path(quiver, (), quiver.arrows[b].tail)): Fraction(1)})
            pieces = [
                RawForm.from_element(theta.apply(u_elem)) * da * RawForm.from_element(v_elem) * db,
                RawForm.from_element(u_elem) * da * RawForm.from_element(theta.apply(v_elem)) * db,
            ]
            img_a = theta.images.get(a)
            if img_a is not None:
                pieces.append(
                    RawForm.from_element(u_elem)
                    * raw_d_of_element(img_a)
                    * RawForm.from_element(v_elem)
                    * db
                )
            img_b = theta.images.get(b)
            if img_b is not None:
                pieces.append(
                    RawForm.from_element(u_elem) * da * RawForm.from_element(v_elem)
                    * raw_d_of_element(img_b)
                )
            for piece in pieces:
                result = result + piece.project().scale(coeff)
        return result
    raise ValidationError(f"cannot take a Lie derivative of a {type(form).__name__}")


def euler_derivation(quiver: DoubledQuiver) -> Derivation:
    """The grading derivation eu(a) = a for every doubled arrow."""
    return Derivation(
        quiver,
        {
            i: PathAlgebraElement.from_path(Path(quiver, (i,)))
            for i in range(len(quiver.arrows))
        },
    )


def euler_homotopy(form: Union[OneForm, TwoForm]):
    """A primitive for a d-closed form of positive weight.

    Returns h with d(h) == form, where h sums (1/w) i_eu over the weight-w
    components.  Raises NotClosedError (with the residual d(h) - form) when
    the input is not closed, and WeightZeroError on weight-0 components.
    """
    if not isinstance(form, (OneForm, TwoForm)):
        raise ValidationError("euler_homotopy expects a 1- or 2-form")
    quiver = form.quiver
    eu = euler_derivation(quiver)
    if form.is_zero():
        return Necklace.zero(quiver) if isinstance(form, OneForm) else OneForm.zero(quiver)
    weights = sorted({form.weight(k) for k in form.terms})
    if any(w <= 0 for w in weights):
        raise WeightZeroError("input has a weight-0 component")
    result = None
    for w in weights:
        piece = contract(eu, form.weight_part(w)).scale(Fraction(1, w))
        result = piece if result is None else result + piece
    residual = d(result) - form
    if not residual.is_zero():
        raise NotClosedError(
            f"input form is not d-closed; homotopy residual {residual}", residual
        )
    return result


def symplectic_two_form(sym: SymplecticData) -> TwoForm:
    """The canonical constant symplectic class: the sum of da.da* over base
    arrows a."""
    quiver = sym.quiver
    out: dict[tuple, Fraction] = {}
    for a in range(quiver.num_base):
        arrow = quiver.arrows[a]
        star = quiver.arrows[arrow.star_index]
        u = Path(quiver, (), arrow.head)
        v = Path(quiver, (), arrow.tail)
        term = TwoForm(quiver, {(u, a, v, star.index): Fraction(1)})
        for key, c in term.terms.items():
            out[key] = out.get(key, Fraction(0)) + c
    return TwoForm(quiver, out)


def derivation_from_oneform(alpha: OneForm, sym: SymplecticData) -> Derivation:
    """Invert theta -> i_theta(omega) for the constant form omega = sum da.da*.

    Reading off slots: i_theta(omega) = sum theta(a).da* - theta(a*).da, so
    theta(a) is the da* coefficient of alpha and theta(a*) is minus the da
    coefficient.
    """
    quiver = sym.quiver
    if alpha.quiver != quiver:
        raise MismatchedQuiversError("one-form over a different quiver")
    images: dict[int, PathAlgebraElement] = {}
    for a in range(quiver.num_base):
        astar = quiver.star(a)
        img_a = alpha.slot_element(astar)
        img_astar = -alpha.slot_element(a)
        if not img_a.is_zero():
            images[a] = img_a
        if not img_astar.is_zero():
            images[astar] = img_astar
    return Derivation(quiver, images)

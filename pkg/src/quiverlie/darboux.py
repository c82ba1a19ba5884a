"""Formal Darboux normalization over a one-vertex doubled quiver.

A closed 2-form with nondegenerate constant part w0 can be pulled back to
w0 by a formal automorphism with identity linear part.  The construction
follows the homotopy method: write w = w0 + w', pick the primitive
alpha = -h(w') furnished by the Euler homotopy (so that d(alpha) = -w'),
solve  i_{theta_t} (w0 + t w') = alpha  degree by degree in t, and
integrate the substitution flow  dPhi(t)/dt = Phi(t) o theta_t  as a
t-polynomial, evaluating at t = 1.  Everything is truncated at a caller
chosen word degree N and the certificate  pullback(Phi, w, N) == w0  is
re-checked exactly before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from . import linalg
from .errors import DegenerateFormError, ValidationError
from .forms import OneForm, RawForm, TwoForm, contract, euler_homotopy, raw_d_of_element
from .necklace import Derivation, Necklace
from .quiver import DoubledQuiver, Path, PathAlgebraElement


class FormalAutomorphism:
    """A substitution automorphism of the completed path algebra, truncated.

    Determined by generator images  a -> a + (higher order), all stored up
    to word degree N; the identity linear part is enforced.
    """

    __slots__ = ("quiver", "images", "truncation")

    def __init__(
        self,
        quiver: DoubledQuiver,
        images: Mapping[int, PathAlgebraElement],
        truncation: int,
    ):
        if truncation < 1:
            raise ValidationError("truncation degree must be at least 1")
        self.quiver = quiver
        self.truncation = truncation
        clean: dict[int, PathAlgebraElement] = {}
        for idx in range(len(quiver.arrows)):
            arrow = quiver.arrows[idx]
            gen = PathAlgebraElement.from_path(Path(quiver, (idx,)))
            img = images.get(idx, gen).truncated(truncation)
            linear = img.homogeneous_part(1)
            if linear != gen:
                raise ValidationError(
                    f"image of {arrow.name!r} must have linear part {arrow.name!r}"
                )
            if not img.homogeneous_part(0).is_zero():
                raise ValidationError(f"image of {arrow.name!r} carries a degree-0 part")
            for path in img.terms:
                if path.head != arrow.head or path.tail != arrow.tail:
                    raise ValidationError(
                        f"image term {path} of {arrow.name!r} breaks endpoint compatibility"
                    )
            clean[idx] = img
        self.images = clean

    @classmethod
    def identity(cls, quiver: DoubledQuiver, truncation: int) -> "FormalAutomorphism":
        return cls(quiver, {}, truncation)

    def is_identity(self) -> bool:
        return all(
            img == PathAlgebraElement.from_path(Path(self.quiver, (idx,)))
            for idx, img in self.images.items()
        )

    def apply(self, elem: PathAlgebraElement, max_degree: int | None = None) -> PathAlgebraElement:
        """Substitute generator images into an algebra element."""
        bound = self.truncation if max_degree is None else min(max_degree, self.truncation)
        out = PathAlgebraElement.zero(self.quiver)
        for path, coeff in elem.terms.items():
            if not path.arrows:
                out = out + PathAlgebraElement.from_path(path, coeff)
                continue
            acc = PathAlgebraElement.idempotent(self.quiver, path.head)
            for a in path.arrows:
                acc = (acc * self.images[a]).truncated(bound)
                if acc.is_zero():
                    break
            out = out + acc.scale(coeff)
        return out.truncated(bound)

    def compose(self, other: "FormalAutomorphism") -> "FormalAutomorphism":
        """self after other: generators map through other, then self."""
        if self.quiver != other.quiver:
            raise ValidationError("automorphisms over different quivers")
        n = min(self.truncation, other.truncation)
        images = {idx: self.apply(img, n) for idx, img in other.images.items()}
        return FormalAutomorphism(self.quiver, images, n)

    def inverse(self) -> "FormalAutomorphism":
        """Compositional inverse to the truncation degree, found by degree-
        by-degree correction (the linear part is the identity)."""
        inv = FormalAutomorphism.identity(self.quiver, self.truncation)
        for _ in range(self.truncation):
            images = {}
            converged = True
            for idx in range(len(self.quiver.arrows)):
                gen = PathAlgebraElement.from_path(Path(self.quiver, (idx,)))
                residual = self.apply(inv.images[idx]) - gen
                if not residual.is_zero():
                    converged = False
                images[idx] = inv.images[idx] - residual
            inv = FormalAutomorphism(self.quiver, images, self.truncation)
            if converged:
                break
        return inv

    def pullback(self, form, max_degree: int | None = None):
        """Substitute into a Necklace / OneForm / TwoForm: each letter a
        becomes Phi(a) and each da becomes d(Phi(a)), expanded by Leibniz."""
        bound = self.truncation if max_degree is None else min(max_degree, self.truncation)
        quiver = self.quiver
        if isinstance(form, Necklace):
            total = PathAlgebraElement.zero(quiver)
            for path, coeff in form.cycles.items():
                total = total + self.apply(PathAlgebraElement.from_path(path, coeff), bound)
            from .necklace import project_to_necklace

            result = project_to_necklace(total).truncated(bound)
            for v, c in form.vertex_part.items():
                result = result + Necklace(quiver, None, {v: c})
            return result
        if isinstance(form, OneForm):
            result = OneForm.zero(quiver)
            for (p, a), coeff in form.terms.items():
                raw = self._product([self._raw_path(p, bound), self._raw_d_slot(a, bound)], bound)
                result = result + raw.project().scale(coeff)
            return result.truncated(bound)
        if isinstance(form, TwoForm):
            result = TwoForm.zero(quiver)
            for (u, a, v, b), coeff in form.terms.items():
                raw = self._product(
                    [
                        self._raw_path(u, bound),
                        self._raw_d_slot(a, bound),
                        self._raw_path(v, bound),
                        self._raw_d_slot(b, bound),
                    ],
                    bound,
                )
                result = result + raw.project().scale(coeff)
            return result.truncated(bound)
        raise ValidationError(f"cannot pull back a {type(form).__name__}")

    def _raw_path(self, path: Path, bound: int) -> RawForm:
        return RawForm.from_element(self.apply(PathAlgebraElement.from_path(path), bound))

    def _raw_d_slot(self, a: int, bound: int) -> RawForm:
        return _truncate_raw(raw_d_of_element(self.images[a].truncated(bound)), bound)

    @staticmethod
    def _product(factors: list[RawForm], bound: int) -> RawForm:
        """Product of raw forms, truncating by total weight after each step
        (weights only grow, so early dropping is sound)."""
        acc = factors[0]
        for factor in factors[1:]:
            acc = _truncate_raw(acc * factor, bound)
        return acc

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FormalAutomorphism)
            and self.quiver == other.quiver
            and self.truncation == other.truncation
            and self.images == other.images
        )

    def __str__(self) -> str:
        body = ", ".join(
            f"{self.quiver.arrows[i].name} -> {img}" for i, img in sorted(self.images.items())
        )
        return "Phi{" + body + "}"

    def __repr__(self) -> str:
        return f"FormalAutomorphism({self}, N={self.truncation})"


def _raw_weight(key: tuple) -> int:
    segments = key[0::2]
    return sum(p.degree for p in segments) + (len(key) - 1) // 2


def _truncate_raw(raw: RawForm, bound: int) -> RawForm:
    return RawForm(
        raw.quiver,
        raw.degree,
        {key: c for key, c in raw.terms.items() if _raw_weight(key) <= bound},
    )


def pullback(phi: FormalAutomorphism, form, max_degree: int | None = None):
    """Free-function form of FormalAutomorphism.pullback."""
    return phi.pullback(form, max_degree)


@dataclass(frozen=True)
class TSeries:
    """A polynomial in the homotopy parameter t with symbolic coefficients
    (derivations here); only finitely many t-powers act in each word degree,
    so truncation keeps everything finite."""

    coefficients: dict

    def coefficient(self, power: int):
        return self.coefficients.get(power)

    def powers(self):
        return sorted(self.coefficients)


def _generator_matrix(omega0: TwoForm) -> linalg.Matrix:
    """The pairing matrix K with (i_theta w0) slot-c coefficient equal to
    sum_e K[c][e] theta(e), for a constant 2-form w0 on a one-vertex quiver."""
    quiver = omega0.quiver
    n = len(quiver.arrows)
    m = linalg.zeros(n, n)
    for (u, a, v, b), coeff in omega0.terms.items():
        if u.degree or v.degree:
            raise ValidationError("constant part must have no path letters")
        # term  da.db: contributes theta(a).db - theta(b).da
        m[b][a] += coeff
        m[a][b] -= coeff
    return m


def _solve_constant(alpha: OneForm, kinv: linalg.Matrix) -> Derivation:
    """theta with i_theta(w0) = alpha, given the inverse pairing matrix."""
    quiver = alpha.quiver
    n = len(quiver.arrows)
    slot_elems = [alpha.slot_element(c) for c in range(n)]
    images: dict[int, PathAlgebraElement] = {}
    for e in range(n):
        img = PathAlgebraElement.zero(quiver)
        for c in range(n):
            if kinv[e][c]:
                img = img + slot_elems[c].scale(kinv[e][c])
        if not img.is_zero():
            images[e] = img
    return Derivation(quiver, images)


def darboux_normalize(omega: TwoForm, truncation: int) -> FormalAutomorphism:
    """Normalize a closed 2-form to its constant part, up to word degree N.

    Requires a one-vertex quiver and a nondegenerate constant part; raises
    NotClosedError (via the homotopy) when the perturbation is not closed
    and DegenerateFormError when the constant pairing is singular.  The
    returned automorphism satisfies pullback(Phi, omega, N) == omega_0,
    which is re-verified exactly before returning.
    """
    quiver = omega.quiver
    if len(quiver.vertices) != 1:
        raise ValidationError("normalization is implemented for one-vertex quivers only")
    n_gen = len(quiver.arrows)
    omega = omega.truncated(truncation)
    omega0 = omega.weight_part(2)
    omega_prime = omega - omega0

    k = _generator_matrix(omega0)
    try:
        kinv = linalg.inverse(k)
    except linalg.SingularMatrixError:
        raise DegenerateFormError(
            "the constant part of the 2-form is degenerate on generators; "
            "a nondegenerate constant skew pairing is required"
        ) from None

    if omega_prime.is_zero():
        return FormalAutomorphism.identity(quiver, truncation)

    alpha = euler_homotopy(omega_prime).scale(-1)  # d(alpha) = -omega'

    # theta_t = sum_k t^k theta_k  with  i_{theta_0} w0 = alpha  and
    # i_{theta_k} w0 = -i_{theta_{k-1}} w'.
    thetas = [_solve_constant(alpha.truncated(truncation + 1), kinv)]
    for _ in range(truncation):
        prev = thetas[-1]
        if prev.is_zero():
            break
        beta = contract(prev, omega_prime)
        beta = beta.truncated(truncation + 1)
        nxt = _solve_constant(beta, kinv).scale(-1)
        nxt = Derivation(quiver, {i: e.truncated(truncation) for i, e in nxt.images.items()})
        if nxt.is_zero():
            break
        thetas.append(nxt)
    theta_series = TSeries({k: th for k, th in enumerate(thetas) if not th.is_zero()})

    # Integrate dPhi/dt = Phi o theta_t as a t-polynomial of generator images.
    # phi_m[c] is the t^m coefficient of Phi(t)(c).
    phi: list[dict[int, PathAlgebraElement]] = [
        {c: PathAlgebraElement.from_path(Path(quiver, (c,))) for c in range(n_gen)}
    ]

    def apply_series(word_elem: PathAlgebraElement, t_power: int) -> PathAlgebraElement:
        """[t^t_power] of Phi(t) applied to an algebra element."""
        total = PathAlgebraElement.zero(quiver)
        for path, coeff in word_elem.terms.items():
            # polynomial-in-t accumulator over the letters of the path
            acc: dict[int, PathAlgebraElement] = {
                0: PathAlgebraElement.idempotent(quiver, path.head)
            }
            for letter in path.arrows:
                nxt_acc: dict[int, PathAlgebraElement] = {}
                for m1, elem in acc.items():
                    for m2 in range(0, t_power - m1 + 1):
                        if m2 >= len(phi):
                            break
                        img = phi[m2].get(letter)
                        if img is None:
                            continue
                        prod = (elem * img).truncated(truncation)
                        if prod.is_zero():
                            continue
                        key = m1 + m2
                        nxt_acc[key] = nxt_acc.get(key, PathAlgebraElement.zero(quiver)) + prod
                acc = nxt_acc
                if not acc:
                    break
            piece = acc.get(t_power)
            if piece is not None:
                total = total + piece.scale(coeff)
        return total

    for m in range(truncation):
        target: dict[int, PathAlgebraElement] = {}
        for c in range(n_gen):
            img = PathAlgebraElement.zero(quiver)
            for k, theta_k in enumerate(thetas):
                if k > m:
                    break
                img = img + apply_series(theta_k.image(c), m - k)
            img = img.truncated(truncation)
            if not img.is_zero():
                target[c] = img.scale(Fraction(1, m + 1))
        if not target:
            break
        phi.append(target)

    images: dict[int, PathAlgebraElement] = {}
    for c in range(n_gen):
        img = PathAlgebraElement.zero(quiver)
        for level in phi:
            piece = level.get(c)
            if piece is not None:
                img = img + piece
        images[c] = img.truncated(truncation)
    result = FormalAutomorphism(quiver, images, truncation)

    residual = result.pullback(omega, truncation) - omega0
    if not residual.is_zero():
        raise AssertionError(
            f"normalization certificate failed; residual {residual} "
            f"(theta series powers {theta_series.powers()})"
        )
    return result

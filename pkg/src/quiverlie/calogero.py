"""Calogero-Moser matrix pairs and the coadjoint evaluation pairing.

A CM point of size n is a pair (X, Y) of rational n x n matrices such that
[X, Y] + Id has rank one and trace n; a rank-one matrix with nonzero trace
is semisimple, so this certifies membership in the rank-one orbit fiber
without any eigenvalue computation.  The classical parametrization
X = diag(x_1..x_n), Y_ii = p_i, Y_ij = 1/(x_i - x_j) produces such pairs
for any distinct x_i.

Evaluation of a necklace f over the doubled one-loop quiver at a CM point
is tr f(X, Y); it is invariant under simultaneous conjugation and kills
commutators, so it descends to the quotient space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import ShapeMismatchError, ValidationError
from .necklace import Necklace
from .quiver import DoubledQuiver
from .reps import DimensionVector, RepPoint, trace_evaluate


@dataclass(frozen=True)
class CMPoint:
    """A Calogero-Moser point: matrices X, Y with [X,Y] + Id rank one of
    trace n."""

    n: int
    x_mat: tuple
    y_mat: tuple

    @property
    def X(self) -> linalg.Matrix:
        return [list(row) for row in self.x_mat]

    @property
    def Y(self) -> linalg.Matrix:
        return [list(row) for row in self.y_mat]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "X": [[str(v) for v in row] for row in self.x_mat],
            "Y": [[str(v) for v in row] for row in self.y_mat],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CMPoint":
        x = linalg.as_matrix(data["X"])
        y = linalg.as_matrix(data["Y"])
        return make_cm_point(x, y)


def _shifted_commutator(x: linalg.Matrix, y: linalg.Matrix) -> linalg.Matrix:
    n = len(x)
    return linalg.mat_add(linalg.commutator(x, y), linalg.identity(n))


def cm_membership(x: linalg.Matrix, y: linalg.Matrix) -> bool:
    """True iff [X,Y] + Id has rank one and trace n."""
    x = linalg.as_matrix(x)
    y = linalg.as_matrix(y)
    n = len(x)
    if any(len(r) != n for r in x) or len(y) != n or any(len(r) != n for r in y):
        raise ShapeMismatchError("X and Y must be square matrices of equal size")
    s = _shifted_commutator(x, y)
    return linalg.rank(s) == 1 and linalg.trace(s) == n


def make_cm_point(x: linalg.Matrix, y: linalg.Matrix) -> CMPoint:
    x = linalg.as_matrix(x)
    y = linalg.as_matrix(y)
    if not cm_membership(x, y):
        raise ValidationError("matrices fail the rank-one / trace-n membership test")
    return CMPoint(len(x), tuple(tuple(r) for r in x), tuple(tuple(r) for r in y))


def cm_point(positions: Sequence, momenta: Sequence) -> CMPoint:
    """The classical CM pair for distinct positions x_i and momenta p_i:
    X = diag(x), Y_ii = p_i, Y_ij = 1/(x_i - x_j)."""
    xs = [Fraction(v) for v in positions]
    ps = [Fraction(v) for v in momenta]
    n = len(xs)
    if len(ps) != n:
        raise ValidationError("positions and momenta must have equal length")
    if n == 0:
        raise ValidationError("a CM point needs size at least 1")
    if len(set(xs)) != n:
        raise ValidationError("positions must be pairwise distinct")
    x = linalg.zeros(n, n)
    y = linalg.zeros(n, n)
    for i in range(n):
        x[i][i] = xs[i]
        y[i][i] = ps[i]
        for j in range(n):
            if i != j:
                y[i][j] = 1 / (xs[i] - xs[j])
    return make_cm_point(x, y)


def cm_rep_point(quiver: DoubledQuiver, pt: CMPoint) -> RepPoint:
    """The representation point over a doubled one-loop quiver sending the
    base loop to X and its star to Y."""
    if len(quiver.vertices) != 1 or quiver.num_base != 1:
        raise ValidationError("CM evaluation needs the doubled one-loop quiver")
    vertex = quiver.vertices[0]
    dims = DimensionVector(quiver, {vertex: pt.n})
    base = quiver.arrows[0]
    return RepPoint(dims, {base.index: pt.X, base.star_index: pt.Y})


def coadjoint_eval(f: Necklace, pt: CMPoint) -> Fraction:
    """The pairing of the evaluation functional at pt with a necklace."""
    return trace_evaluate(f, cm_rep_point(f.quiver, pt))

"""The representation functor: trace polynomials, the moment map, and the
commutative Poisson oracle on the cotangent space of quiver representations.

A representation point assigns to every doubled arrow a an exact rational
matrix of shape n_head(a) x n_tail(a); a necklace then evaluates to the
trace of the matrix product along each cycle (rightmost arrow acting
first, matching the path composition convention), plus sum_i c_i n_i for
its degree-0 part.  Read symbolically, the same recipe yields the trace
polynomial in one commuting indeterminate per matrix entry.

The Poisson oracle is the canonical cotangent bracket in those entry
coordinates: {entry(a)_ij, entry(a*)_kl} = delta_il delta_jk for base
arrows a, zero on all pairs not matched by the star involution, extended
as a biderivation.  Its sign is pinned so that the trace map intertwines
it with the necklace bracket.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from . import linalg
from .errors import (
    MismatchedQuiversError,
    NonHomogeneousError,
    ShapeMismatchError,
    ValidationError,
)
from .necklace import Necklace, SymplecticData, necklace_bracket, project_to_necklace
from .quiver import DoubledQuiver, Path, PathAlgebraElement, Quiver, Vertex, double_quiver
from .poly import Poly, Var


class DimensionVector:
    """One nonnegative integer per vertex, at least one of them positive."""

    __slots__ = ("quiver", "dims")

    def __init__(self, quiver: DoubledQuiver, dims: Mapping[Vertex, int]):
        self.quiver = quiver
        clean = {}
        for v in quiver.vertices:
            n = int(dims.get(v, 0))
            if n < 0:
                raise ValidationError(f"negative dimension at vertex {v!r}")
            clean[v] = n
        if all(n == 0 for n in clean.values()):
            raise ValidationError("at least one vertex dimension must be positive")
        extra = set(dims) - set(quiver.vertices)
        if extra:
            raise ValidationError(f"dimensions given for unknown vertices {sorted(map(str, extra))}")
        self.dims = clean

    def n(self, vertex: Vertex) -> int:
        return self.dims[vertex]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DimensionVector)
            and self.quiver == other.quiver
            and self.dims == other.dims
        )

    def __repr__(self) -> str:
        return f"DimensionVector({self.dims})"


class RepPoint:
    """A point of the representation space: one matrix per doubled arrow."""

    __slots__ = ("dims", "mats")

    def __init__(self, dims: DimensionVector, mats: Mapping[Union[int, str], Sequence]):
        self.dims = dims
        quiver = dims.quiver
        clean: dict[int, linalg.Matrix] = {}
        by_index: dict[int, Sequence] = {}
        for key, rows in mats.items():
            idx = quiver.arrow_by_name(key).index if isinstance(key, str) else key
            by_index[idx] = rows
        for arrow in quiver.arrows:
            rows = by_index.get(arrow.index)
            nh, nt = dims.n(arrow.head), dims.n(arrow.tail)
            if rows is None:
                mat = linalg.zeros(nh, nt)
            else:
                mat = linalg.as_matrix(rows)
                if len(mat) != nh or any(len(r) != nt for r in mat):
                    raise ShapeMismatchError(
                        f"matrix for {arrow.name!r} must be {nh}x{nt} "
                        f"(head {arrow.head!r} x tail {arrow.tail!r})"
                    )
            clean[arrow.index] = mat
        self.mats = clean

    @property
    def quiver(self) -> DoubledQuiver:
        return self.dims.quiver

    def mat(self, arrow: Union[int, str]) -> linalg.Matrix:
        idx = self.quiver.arrow_by_name(arrow).index if isinstance(arrow, str) else arrow
        return self.mats[idx]

    def to_json(self) -> dict:
        quiver = self.quiver
        return {
            "dims": {str(v): n for v, n in self.dims.dims.items()},
            "mats": {
                quiver.arrows[i].name: [[str(x) for x in row] for row in m]
                for i, m in self.mats.items()
            },
        }

    @classmethod
    def from_json(cls, quiver: DoubledQuiver, data: dict) -> "RepPoint":
        dims_raw = data.get("dims", {})
        dims = {}
        for v in quiver.vertices:
            for key in (v, str(v)):
                if key in dims_raw:
                    dims[v] = int(dims_raw[key])
        dv = DimensionVector(quiver, dims)
        mats = {
            name: [[Fraction(x) for x in row] for row in rows]
            for name, rows in data.get("mats", {}).items()
        }
        return cls(dv, mats)


class MomentValue:
    """The moment map value: one square matrix per vertex, trace-sum zero."""

    __slots__ = ("dims", "components")

    def __init__(self, dims: DimensionVector, components: Mapping[Vertex, linalg.Matrix]):
        self.dims = dims
        self.components = dict(components)
        total = sum((linalg.trace(m) for m in self.components.values()), Fraction(0))
        if total != 0:
            raise ValidationError(f"moment value has nonzero total trace {total}")

    def component(self, vertex: Vertex) -> linalg.Matrix:
        return self.components[vertex]

    def to_json(self) -> dict:
        return {str(v): [[str(x) for x in row] for row in m] for v, m in self.components.items()}


def _path_matrix(rho: RepPoint, path: Path) -> linalg.Matrix:
    quiver = rho.quiver
    if not path.arrows:
        return linalg.identity(rho.dims.n(path.base_vertex))
    mat = rho.mats[path.arrows[0]]
    for idx in path.arrows[1:]:
        mat = linalg.mat_mul(mat, rho.mats[idx])
    return mat


def trace_evaluate(f: Union[Necklace, PathAlgebraElement], rho: RepPoint) -> Fraction:
    """Evaluate tr f at a representation point.

    Also accepts a raw algebra element with closed-path terms (its open
    paths would have zero trace only on one-vertex quivers, so they are
    rejected elsewhere); cycles through a zero-dimensional vertex
    contribute the trace of an empty product, which is zero.
    """
    if isinstance(f, PathAlgebraElement):
        f_neck = f
        if f.quiver != rho.quiver:
            raise MismatchedQuiversError("element and representation over different quivers")
        total = Fraction(0)
        for path, coeff in f_neck.terms.items():
            if not path.is_closed:
                raise ValidationError(f"cannot trace the open path {path}")
            total += coeff * linalg.trace(_path_matrix(rho, path))
        return total
    if f.quiver != rho.quiver:
        raise MismatchedQuiversError("necklace and representation over different quivers")
    total = Fraction(0)
    for v, coeff in f.vertex_part.items():
        total += coeff * rho.dims.n(v)
    for path, coeff in f.cycles.items():
        total += coeff * linalg.trace(_path_matrix(rho, path))
    return total


def entry_var(arrow_name: str, i: int, j: int) -> Var:
    return ("m", arrow_name, i, j)


def _symbolic_matrix(quiver: DoubledQuiver, dims: DimensionVector, idx: int) -> list[list[Poly]]:
    arrow = quiver.arrows[idx]
    nh, nt = dims.n(arrow.head), dims.n(arrow.tail)
    return [[Poly.var(entry_var(arrow.name, i, j)) for j in range(nt)] for i in range(nh)]


def _poly_mat_mul(a: list[list[Poly]], b: list[list[Poly]]) -> list[list[Poly]]:
    n, k = len(a), len(b)
    m = len(b[0]) if b and b[0] is not None else 0
    if a and len(a[0]) != k:
        raise ShapeMismatchError("symbolic matrix shapes do not compose")
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = Poly.zero()
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def trace_polynomial(f: Necklace, dims: DimensionVector) -> Poly:
    """tr f as an exact polynomial in the matrix-entry indeterminates."""
    quiver = dims.quiver
    if f.quiver != quiver:
        raise MismatchedQuiversError("necklace and dimensions over different quivers")
    total = Poly.zero()
    for v, coeff in f.vertex_part.items():
        total = total + Poly.const(coeff * dims.n(v))
    for path, coeff in f.cycles.items():
        if any(dims.n(quiver.arrows[i].head) == 0 for i in path.arrows):
            continue  # the cycle passes through a zero-dimensional vertex
        mat = _symbolic_matrix(quiver, dims, path.arrows[0])
        for idx in path.arrows[1:]:
            mat = _poly_mat_mul(mat, _symbolic_matrix(quiver, dims, idx))
        tr = Poly.zero()
        for i in range(len(mat)):
            tr = tr + mat[i][i]
        total = total + tr.scale(coeff)
    return total


def moment_map(rho: RepPoint) -> MomentValue:
    """The quiver moment map, vertexwise
    sum_{head(a)=i} rho(a) rho(a*) - sum_{tail(a)=i} rho(a*) rho(a)
    over base arrows a."""
    quiver = rho.quiver
    comps = {v: linalg.zeros(rho.dims.n(v), rho.dims.n(v)) for v in quiver.vertices}
    for a in range(quiver.num_base):
        arrow = quiver.arrows[a]
        ra = rho.mats[a]
        rs = rho.mats[arrow.star_index]
        comps[arrow.head] = linalg.mat_add(comps[arrow.head], linalg.mat_mul(ra, rs))
        comps[arrow.tail] = linalg.mat_sub(comps[arrow.tail], linalg.mat_mul(rs, ra))
    return MomentValue(rho.dims, comps)


def moment_polynomial(quiver: DoubledQuiver, dims: DimensionVector) -> dict[Vertex, list[list[Poly]]]:
    """The moment map with symbolic entries, one polynomial matrix per vertex."""
    comps = {
        v: [[Poly.zero() for _ in range(dims.n(v))] for _ in range(dims.n(v))]
        for v in quiver.vertices
    }

    def add(dst, mat, sign):
        for i in range(len(mat)):
            for j in range(len(mat)):
                dst[i][j] = dst[i][j] + mat[i][j].scale(sign)

    for a in range(quiver.num_base):
        arrow = quiver.arrows[a]
        sa = _symbolic_matrix(quiver, dims, a)
        ss = _symbolic_matrix(quiver, dims, arrow.star_index)
        if dims.n(arrow.head):
            add(comps[arrow.head], _poly_mat_mul(sa, ss), 1)
        if dims.n(arrow.tail):
            add(comps[arrow.tail], _poly_mat_mul(ss, sa), -1)
    return comps


def poisson_oracle(f: Poly, g: Poly, quiver: DoubledQuiver, dims: DimensionVector) -> Poly:
    """The canonical cotangent Poisson bracket of two entry polynomials."""
    out = Poly.zero()
    for a in range(quiver.num_base):
        arrow = quiver.arrows[a]
        star = quiver.arrows[arrow.star_index]
        nh, nt = dims.n(arrow.head), dims.n(arrow.tail)
        for i in range(nh):
            for j in range(nt):
                va = entry_var(arrow.name, i, j)
                vs = entry_var(star.name, j, i)
                dfa = f.diff(va)
                dgs = g.diff(vs)
                if not dfa.is_zero() and not dgs.is_zero():
                    out = out + dfa * dgs
                dfs = f.diff(vs)
                dga = g.diff(va)
                if not dfs.is_zero() and not dga.is_zero():
                    out = out - dfs * dga
    return out


def verify_homomorphism(
    f: Necklace, g: Necklace, dims: DimensionVector, sym: SymplecticData
) -> tuple[bool, Poly]:
    """Compare {tr f, tr g} computed by the commutative oracle with
    tr {f, g} computed by the necklace bracket; returns (equal, difference)."""
    quiver = dims.quiver
    lhs = poisson_oracle(trace_polynomial(f, dims), trace_polynomial(g, dims), quiver, dims)
    rhs = trace_polynomial(necklace_bracket(f, g, sym), dims)
    diff = lhs - rhs
    return diff.is_zero(), diff


# ---------------------------------------------------------------------------
# Polarization and the desk-scale trace-kernel probe.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polarization:
    """The multilinearization of a homogeneous necklace.

    ``necklace`` lives over ``quiver`` (a fresh doubled quiver with one base
    arrow per variable copy); ``copy_of`` maps each copy's base-arrow name
    back to the original doubled-arrow name.
    """

    necklace: Necklace
    quiver: DoubledQuiver
    copy_of: dict


def polarize(f: Necklace, multiplicities: Mapping[Union[int, str], int]) -> Polarization:
    """Split every arrow occurrence into independent copies.

    multiplicities gives, per doubled arrow of f's quiver, the number of
    occurrences in every cycle term of f (f must be homogeneous in this
    multidegree; the degree-0 part must vanish).  Re-identifying all copies
    recovers (prod m_c!) times f.
    """
    quiver = f.quiver
    mult: dict[int, int] = {}
    for key, m in multiplicities.items():
        idx = quiver.arrow_by_name(key).index if isinstance(key, str) else key
        m = int(m)
        if m < 0:
            raise ValidationError("multiplicities must be nonnegative")
        if m:
            mult[idx] = m
    if f.vertex_part:
        raise NonHomogeneousError("a polarizable necklace cannot have a degree-0 part")
    for path, _ in f.cycles.items():
        counts: dict[int, int] = {}
        for a in path.arrows:
            counts[a] = counts.get(a, 0) + 1
        if counts != mult:
            raise NonHomogeneousError(
                f"cycle {path} does not have the stated arrow multiplicities"
            )

    copy_of: dict[str, str] = {}
    split_arrows = []
    for idx in sorted(mult):
        arrow = quiver.arrows[idx]
        for k in range(1, mult[idx] + 1):
            base = arrow.name.rstrip("*")
            suffix = "s" if not arrow.is_base else ""
            copy_name = f"{base}{suffix}_{k}"
            copy_of[copy_name] = arrow.name
            split_arrows.append((copy_name, arrow.tail, arrow.head))
    if len({n for n, _, _ in split_arrows}) != len(split_arrows):
        raise ValidationError("copy names collide; rename the original arrows")
    split = double_quiver(Quiver(quiver.vertices, split_arrows))
    name_to_idx = {name: split.arrow_by_name(name).index for name, _, _ in split_arrows}

    copies = {
        idx: [name_to_idx[n] for n, orig in copy_of.items() if orig == quiver.arrows[idx].name]
        for idx in mult
    }
    cycles: dict[Path, Fraction] = {}
    for path, coeff in f.cycles.items():
        positions: dict[int, list[int]] = {}
        for pos, a in enumerate(path.arrows):
            positions.setdefault(a, []).append(pos)
        assignment_sets = []
        order = sorted(positions)
        for a in order:
            assignment_sets.append(list(itertools.permutations(copies[a])))
        for combo in itertools.product(*assignment_sets):
            word = list(path.arrows)
            for a, perm in zip(order, combo):
                for pos, copy_idx in zip(positions[a], perm):
                    word[pos] = copy_idx
            new_path = Path(split, tuple(word))
            neck = Necklace(split, {new_path: coeff})
            for p, c in neck.cycles.items():
                cycles[p] = cycles.get(p, Fraction(0)) + c
    return Polarization(Necklace(split, cycles), split, copy_of)


def identify_copies(pol: Polarization, original: DoubledQuiver) -> Necklace:
    """Send every copy back to its original arrow; with the polarization of
    a homogeneous f this returns (prod of multiplicity factorials) * f."""
    cycles: dict[Path, Fraction] = {}
    for path, coeff in pol.necklace.cycles.items():
        arrows = tuple(
            original.arrow_by_name(pol.copy_of[pol.quiver.arrows[a].name]).index
            for a in path.arrows
        )
        new_path = Path(original, arrows)
        neck = Necklace(original, {new_path: coeff})
        for p, c in neck.cycles.items():
            cycles[p] = cycles.get(p, Fraction(0)) + c
    return Necklace(original, cycles)


@dataclass(frozen=True)
class ProbeResult:
    verdict: str  # "KERNEL", "WITNESS" or "INCONCLUSIVE"
    n: int | None = None
    rep: RepPoint | None = None
    value: Fraction | None = None
    samples: int = 0


def trace_vanishing_probe(
    f: Union[Necklace, PathAlgebraElement],
    max_n: int,
    trials: int,
    seed: int,
    box: int = 3,
) -> ProbeResult:
    """Probe whether tr f vanishes identically (desk-scale kernel test).

    Only defined over one-vertex quivers.  If f projects to zero it is a
    sum of commutators: the probe asserts the trace vanishes on every
    sample and reports KERNEL.  Otherwise random integer matrices of sizes
    n = 1..max_n are tried; a nonzero trace is a WITNESS, exhaustion is
    INCONCLUSIVE.
    """
    from .randomgen import rng_for, random_rep_point

    quiver = f.quiver
    if len(quiver.vertices) != 1:
        raise ValidationError("the trace probe works over one-vertex quivers")
    vertex = quiver.vertices[0]
    if isinstance(f, PathAlgebraElement):
        neck = project_to_necklace(f)
        raw: PathAlgebraElement | None = f
    else:
        neck = f
        raw = None
    samples = 0
    if neck.is_zero():
        for n in range(1, max_n + 1):
            dims = DimensionVector(quiver, {vertex: n})
            for t in range(trials):
                rng = rng_for(seed, f"kernel-n{n}", t)
                rho = random_rep_point(rng, quiver, dims, box)
                samples += 1
                target = raw if raw is not None else neck
                value = trace_evaluate(target, rho)
                if value != 0:
                    raise AssertionError(
                        "a commutator element produced a nonzero trace; "
                        "this contradicts trace cyclicity"
                    )
        return ProbeResult("KERNEL", samples=samples)
    for n in range(1, max_n + 1):
        dims = DimensionVector(quiver, {vertex: n})
        for t in range(trials):
            rng = rng_for(seed, f"witness-n{n}", t)
            rho = random_rep_point(rng, quiver, dims, box)
            samples += 1
            value = trace_evaluate(neck, rho)
            if value != 0:
                return ProbeResult("WITNESS", n=n, rep=rho, value=value, samples=samples)
    return ProbeResult("INCONCLUSIVE", samples=samples)

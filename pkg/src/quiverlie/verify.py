"""Reproducible verification harness driving every structural identity.

Each check draws its randomness from the configured 64-bit seed through
sha256(seed:label:trial), runs a stated number of trials, and reports a
machine-readable record: name, pass/fail, trial count, and the first
counterexample payload on failure.  Reports are JSON lines sorted by check
name, so identical (command, seed) pairs produce byte-identical report
files; wall-clock timings are kept out of the records and printed on
stderr by the CLI instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from . import linalg
from .calogero import cm_membership, cm_point
from .darboux import darboux_normalize, pullback
from .errors import DegenerateFormError, QuiverLieError
from .forms import OneForm, TwoForm, contract, d0, d1, euler_homotopy, lie_derivative, symplectic_two_form
from .necklace import (
    Derivation,
    Necklace,
    SymplecticData,
    bracket_tensor_oracle,
    canonical_rotation,
    hamiltonian_derivation,
    necklace_bracket,
    project_to_necklace,
)
from .poly import Poly
from .quiver import DoubledQuiver, Path, PathAlgebraElement, Quiver, double_quiver, one_loop_quiver
from .randomgen import (
    nonzero_rational,
    random_closed_oneform,
    random_closed_twoform,
    random_derivation,
    random_invertible,
    random_necklace,
    random_oneform,
    random_rep_point,
    random_twoform,
    rng_for,
)
from .reps import (
    DimensionVector,
    entry_var,
    moment_map,
    moment_polynomial,
    poisson_oracle,
    trace_evaluate,
    trace_polynomial,
    trace_vanishing_probe,
    verify_homomorphism,
)


def two_vertex_quiver() -> DoubledQuiver:
    """The second standard test quiver: vertices 1, 2 with arrows a: 1->2
    and b: 2->1 (so its double has four arrows)."""
    return double_quiver(Quiver(["1", "2"], [("a", "1", "2"), ("b", "2", "1")]))


@dataclass
class VerifyConfig:
    seed: int = 42
    trials: int | None = None  # per-check default when None
    degree: int | None = None
    dims: tuple | None = None
    darboux_degree: int = 5
    checks: tuple = ()  # empty means all


@dataclass
class CheckResult:
    name: str
    passed: bool
    trials: int
    seed: int
    details: dict = field(default_factory=dict)
    counterexample: dict | None = None

    def to_json(self) -> dict:
        record = {
            "check": self.name,
            "status": "pass" if self.passed else "fail",
            "trials": self.trials,
            "seed": self.seed,
            "details": self.details,
        }
        if self.counterexample is not None:
            record["counterexample"] = self.counterexample
        return record


def _quiver_label(quiver: DoubledQuiver) -> str:
    return "one-loop" if len(quiver.vertices) == 1 else "two-vertex"


def check_antisymmetry(cfg: VerifyConfig) -> CheckResult:
    trials = cfg.trials or 200
    degree = cfg.degree or 6
    done = 0
    for quiver in (one_loop_quiver(), two_vertex_quiver()):
        sym = SymplecticData(quiver)
        label = f"antisym-{_quiver_label(quiver)}"
        for t in range(trials):
            rng = rng_for(cfg.seed, label, t)
            f = random_necklace(rng, quiver, degree, with_vertex_part=(t % 5 == 0))
            g = random_necklace(rng, quiver, degree)
            done += 1
            if necklace_bracket(f, g, sym) != necklace_bracket(g, f, sym).scale(-1):
                return CheckResult(
                    "antisymmetry", False, done, cfg.seed,
                    counterexample={"quiver": _quiver_label(quiver), "f": str(f), "g": str(g)},
                )
    return CheckResult("antisymmetry", True, done, cfg.seed, {"degree": degree})


def check_jacobi(cfg: VerifyConfig) -> CheckResult:
    trials = cfg.trials or 200
    degree = cfg.degree or 6
    done = 0
    for quiver in (one_loop_quiver(), two_vertex_quiver()):
        sym = SymplecticData(quiver)
        label = f"jacobi-{_quiver_label(quiver)}"
        for t in range(trials):
            rng = rng_for(cfg.seed, label, t)
            f = random_necklace(rng, quiver, degree)
            g = random_necklace(rng, quiver, degree)
            h = random_necklace(rng, quiver, degree)
            done += 1
            total = (
                necklace_bracket(f, necklace_bracket(g, h, sym), sym)
                + necklace_bracket(g, necklace_bracket(h, f, sym), sym)
                + necklace_bracket(h, necklace_bracket(f, g, sym), sym)
            )
            if not total.is_zero():
                return CheckResult(
                    "jacobi", False, done, cfg.seed,
                    counterexample={
                        "quiver": _quiver_label(quiver),
                        "f": str(f), "g": str(g), "h": str(h),
                        "cyclic_sum": str(total),
                    },
                )
    return CheckResult("jacobi", True, done, cfg.seed, {"degree": degree})


def check_oracle_equivalence(cfg: VerifyConfig) -> CheckResult:
    trials = cfg.trials or 200
    degree = cfg.degree or 6
    done = 0
    for quiver in (one_loop_quiver(), two_vertex_quiver()):
        sym = SymplecticData(quiver)
        label = f"oracle-{_quiver_label(quiver)}"
        for t in range(trials):
            rng = rng_for(cfg.seed, label, t)
            f = random_necklace(rng, quiver, degree)
            g = random_necklace(rng, quiver, degree)
            done += 1
            lhs = necklace_bracket(f, g, sym)
            rhs = bracket_tensor_oracle(f, g, sym)
            if lhs != rhs:
                return CheckResult(
                    "oracle-equivalence", False, done, cfg.seed,
                    counterexample={
                        "quiver": _quiver_label(quiver),
                        "f": str(f), "g": str(g),
                        "coordinate_formula": str(lhs), "tensor_formula": str(rhs),
                    },
                )
    return CheckResult("oracle-equivalence", True, done, cfg.seed, {"degree": degree})


def check_cartan(cfg: VerifyConfig) -> CheckResult:
    trials = cfg.trials or 100
    degree = cfg.degree or 5
    done = 0
    for quiver in (one_loop_quiver(), two_vertex_quiver()):
        sym_label = _quiver_label(quiver)
        for t in range(trials):
            rng = rng_for(cfg.seed, f"cartan-{sym_label}", t)
            theta = random_derivation(rng, quiver, max(1, degree - 2))
            gamma = random_derivation(rng, quiver, max(1, degree - 2))
            f = random_necklace(rng, quiver, degree, with_vertex_part=(t % 4 == 0))
            alpha = random_oneform(rng, quiver, degree)
            omega = d1(random_oneform(rng, quiver, degree))  # closed, so i.d + d.i is computable
            commutator = theta.commutator(gamma)
            done += 1

            def fail(relation, payload):
                return CheckResult(
                    "cartan", False, done, cfg.seed,
                    counterexample={"quiver": sym_label, "relation": relation, **payload},
                )

            if lie_derivative(theta, f) != contract(theta, d0(f)):
                return fail("homotopy-dr0", {"theta": str(theta), "f": str(f)})
            if lie_derivative(theta, alpha) != contract(theta, d1(alpha)) + d0(contract(theta, alpha)):
                return fail("homotopy-dr1", {"theta": str(theta), "alpha": str(alpha)})
            if lie_derivative(theta, omega) != d1(contract(theta, omega)):
                return fail("homotopy-dr2-closed", {"theta": str(theta), "omega": str(omega)})
            lhs = lie_derivative(theta, contract(gamma, alpha)) - contract(gamma, lie_derivative(theta, alpha))
            if lhs != contract(commutator, alpha):
                return fail("mixed-dr1", {"theta": str(theta), "gamma": str(gamma), "alpha": str(alpha)})
            tw = random_twoform(rng, quiver, degree)
            lhs2 = lie_derivative(theta, contract(gamma, tw)) - contract(gamma, lie_derivative(theta, tw))
            if lhs2 != contract(commutator, tw):
                return fail("mixed-dr2", {"theta": str(theta), "gamma": str(gamma), "omega": str(tw)})
            for form in (f, alpha, tw):
                lhs3 = lie_derivative(theta, lie_derivative(gamma, form))
                lhs3 = lhs3 - lie_derivative(gamma, lie_derivative(theta, form))
                if lhs3 != lie_derivative(commutator, form):
                    return fail("lie-lie", {"theta": str(theta), "gamma": str(gamma),
                                            "form": str(form)})
            if contract(theta, contract(gamma, tw)) != contract(gamma, contract(theta, tw)).scale(-1):
                return fail("contraction-anticommute", {"theta": str(theta), "gamma": str(gamma),
                                                        "omega": str(tw)})
    return CheckResult("cartan", True, done, cfg.seed, {"degree": degree})


def check_poincare(cfg: VerifyConfig) -> CheckResult:
    trials = cfg.trials or 100
    degree = cfg.degree or 6
    done = 0
    for quiver in (one_loop_quiver(), two_vertex_quiver()):
        label = _quiver_label(quiver)
        for t in range(trials):
            rng = rng_for(cfg.seed, f"poincare-{label}", t)
            alpha = random_closed_oneform(rng, quiver, degree)
            omega = random_closed_twoform(rng, quiver, degree)
            nk = random_necklace(rng, quiver, degree)
            done += 1
            if not alpha.is_zero() and d0(euler_homotopy(alpha)) != alpha:
                return CheckResult("poincare", False, done, cfg.seed,
                                   counterexample={"quiver": label, "alpha": str(alpha)})
            if not omega.is_zero() and d1(euler_homotopy(omega)) != omega:
                return CheckResult("poincare", False, done, cfg.seed,
                                   counterexample={"quiver": label, "omega": str(omega)})
            exact = d0(nk)
            if not exact.is_zero() and euler_homotopy(exact) != nk.positive_part():
                return CheckResult("poincare", False, done, cfg.seed,
                                   counterexample={"quiver": label, "necklace": str(nk)})
    return CheckResult("poincare", True, done, cfg.seed, {"degree": degree})


def _closed_paths(quiver: DoubledQuiver, length: int) -> Iterable[Path]:
    """All closed words of a given positive length."""
    out_arrows: dict = {}
    for arrow in quiver.arrows:
        out_arrows.setdefault(arrow.head, []).append(arrow.index)

    def extend(word, vertex, remaining):
        if remaining == 0:
            if vertex == start:
                yield Path(quiver, tuple(word))
            return
        for idx in out_arrows.get(vertex, ()):
            word.append(idx)
            yield from extend(word, quiver.arrows[idx].tail, remaining - 1)
            word.pop()

    for start in quiver.vertices:
        yield from extend([], start, length)


def necklace_basis(quiver: DoubledQuiver, degree: int) -> list[Path]:
    """Canonical representatives of all cycle classes of a given degree."""
    seen = {}
    for path in _closed_paths(quiver, degree):
        canon = canonical_rotation(path)
        seen[canon.key()] = canon
    return [seen[k] for k in sorted(seen)]


def check_central_extension(cfg: VerifyConfig) -> CheckResult:
    """Kernel of f -> theta_f is exactly B on graded pieces, and the map is
    a Lie algebra homomorphism."""
    max_degree = cfg.degree or 6
    trials = cfg.trials or 100
    done = 0
    for quiver in (one_loop_quiver(), two_vertex_quiver()):
        label = _quiver_label(quiver)
        sym = SymplecticData(quiver)
        # exact kernel on graded pieces
        for deg in range(0, max_degree + 1):
            if deg == 0:
                continue  # the whole degree-0 part B maps to zero by definition
            basis = necklace_basis(quiver, deg)
            if not basis:
                continue
            columns = []
            coords: dict = {}
            for path in basis:
                theta = hamiltonian_derivation(Necklace(quiver, {path: Fraction(1)}), sym)
                vec: dict = {}
                for arrow_idx, elem in theta.images.items():
                    for word, coeff in elem.terms.items():
                        key = (arrow_idx, word.key())
                        coords.setdefault(key, len(coords))
                        vec[key] = coeff
                columns.append(vec)
            done += 1
            matrix = [[col.get(key, Fraction(0)) for col in columns] for key in coords]
            if not coords:
                matrix = [[Fraction(0)] * len(columns)]
            kernel = linalg.nullspace(matrix)
            if kernel:
                vec = kernel[0]
                combo = Necklace(
                    quiver, {p: c for p, c in zip(basis, vec)}
                )
                return CheckResult(
                    "central-extension", False, done, cfg.seed,
                    counterexample={
                        "quiver": label, "degree": deg,
                        "kernel_dim": len(kernel),
                        "positive-degree kernel element": str(combo),
                    },
                )
        # theta is a homomorphism
        for t in range(trials):
            rng = rng_for(cfg.seed, f"central-{label}", t)
            f = random_necklace(rng, quiver, max_degree)
            g = random_necklace(rng, quiver, max_degree)
            done += 1
            lhs = hamiltonian_derivation(f, sym).commutator(hamiltonian_derivation(g, sym))
            rhs = hamiltonian_derivation(necklace_bracket(f, g, sym), sym)
            if lhs != rhs:
                return CheckResult(
                    "central-extension", False, done, cfg.seed,
                    counterexample={"quiver": label, "f": str(f), "g": str(g)},
                )
    return CheckResult("central-extension", True, done, cfg.seed, {"max_degree": max_degree})


def _dims_settings(cfg: VerifyConfig):
    one = one_loop_quiver()
    two = two_vertex_quiver()
    if cfg.dims:
        if len(cfg.dims) == 1:
            return [(one, DimensionVector(one, {"v": cfg.dims[0]}))]
        return [(two, DimensionVector(two, {"1": cfg.dims[0], "2": cfg.dims[1]}))]
    settings = [(one, DimensionVector(one, {"v": n})) for n in (1, 2, 3)]
    settings.append((two, DimensionVector(two, {"1": 2, "2": 2})))
    return settings


def check_trace_homomorphism(cfg: VerifyConfig, oracle_sign: int = 1) -> CheckResult:
    """{tr f, tr g} == tr {f, g} as exact polynomials.

    oracle_sign = -1 deliberately flips the commutative oracle; it exists
    as a negative control and must make the check fail with a concrete
    counterexample.
    """
    trials = cfg.trials or 100
    degree = cfg.degree or 5
    done = 0
    for quiver, dims in _dims_settings(cfg):
        sym = SymplecticData(quiver)
        label = f"hom-{_quiver_label(quiver)}-{sorted(dims.dims.values())}"
        for t in range(trials):
            rng = rng_for(cfg.seed, label, t)
            f = random_necklace(rng, quiver, degree, num_terms=1 + t % 2)
            g = random_necklace(rng, quiver, degree, num_terms=1 + (t + 1) % 2)
            done += 1
            lhs = poisson_oracle(
                trace_polynomial(f, dims), trace_polynomial(g, dims), quiver, dims
            ).scale(oracle_sign)
            rhs = trace_polynomial(necklace_bracket(f, g, sym), dims)
            if lhs != rhs:
                return CheckResult(
                    "trace-homomorphism", False, done, cfg.seed,
                    counterexample={
                        "quiver": _quiver_label(quiver),
                        "dims": {str(v): n for v, n in dims.dims.items()},
                        "f": str(f), "g": str(g),
                        "difference": str(lhs - rhs),
                    },
                )
    return CheckResult("trace-homomorphism", True, done, cfg.seed, {"degree": degree})


def check_moment_hamiltonian(cfg: VerifyConfig) -> CheckResult:
    """tr(xi . mu) generates the conjugation action: for every entry
    variable,  {entry, tr(xi mu)}  equals the linearized action of xi."""
    trials = cfg.trials or 20
    done = 0
    settings = _dims_settings(cfg)
    for quiver, dims in settings:
        mu = moment_polynomial(quiver, dims)
        label = f"moment-{_quiver_label(quiver)}-{sorted(dims.dims.values())}"
        for t in range(max(1, trials // len(settings))):
            rng = rng_for(cfg.seed, label, t)
            xi = {
                v: [[Fraction(rng.randint(-3, 3)) for _ in range(dims.n(v))]
                    for _ in range(dims.n(v))]
                for v in quiver.vertices
            }
            ham = Poly.zero()
            for v in quiver.vertices:
                n = dims.n(v)
                for i in range(n):
                    for j in range(n):
                        ham = ham + mu[v][j][i].scale(xi[v][i][j])
            done += 1
            for arrow in quiver.arrows:
                nh, nt = dims.n(arrow.head), dims.n(arrow.tail)
                for i in range(nh):
                    for j in range(nt):
                        entry = Poly.var(entry_var(arrow.name, i, j))
                        got = poisson_oracle(entry, ham, quiver, dims)
                        want = Poly.zero()
                        for k in range(nh):
                            want = want + Poly.var(entry_var(arrow.name, k, j)).scale(
                                xi[arrow.head][i][k]
                            )
                        for k in range(nt):
                            want = want - Poly.var(entry_var(arrow.name, i, k)).scale(
                                xi[arrow.tail][k][j]
                            )
                        if got != want:
                            return CheckResult(
                                "moment-hamiltonian", False, done, cfg.seed,
                                counterexample={
                                    "quiver": _quiver_label(quiver),
                                    "dims": {str(v): n for v, n in dims.dims.items()},
                                    "arrow": arrow.name, "entry": [i, j],
                                    "difference": str(got - want),
                                },
                            )
    return CheckResult("moment-hamiltonian", True, done, cfg.seed, {})


def check_darboux(cfg: VerifyConfig) -> CheckResult:
    trials = cfg.trials or 20
    truncation = cfg.darboux_degree
    quiver = one_loop_quiver()
    sym = SymplecticData(quiver)
    omega0 = symplectic_two_form(sym)
    done = 0
    for t in range(trials):
        rng = rng_for(cfg.seed, "darboux", t)
        beta = random_oneform(rng, quiver, 4, num_terms=2)
        beta = OneForm(quiver, {k: c for k, c in beta.terms.items() if beta.weight(k) >= 3})
        omega = omega0 + d1(beta)
        done += 1
        try:
            phi = darboux_normalize(omega, truncation)
        except QuiverLieError as exc:
            return CheckResult(
                "darboux", False, done, cfg.seed,
                counterexample={"beta": str(beta), "error": str(exc)},
            )
        residual = pullback(phi, omega, truncation) - omega0
        if not residual.is_zero():
            return CheckResult(
                "darboux", False, done, cfg.seed,
                counterexample={"beta": str(beta), "residual": str(residual)},
            )
        inverse = phi.inverse()
        if not phi.compose(inverse).is_identity() or not inverse.compose(phi).is_identity():
            return CheckResult(
                "darboux", False, done, cfg.seed,
                counterexample={"beta": str(beta), "error": "truncated inverse failed"},
            )
    # degenerate leading terms must be rejected
    try:
        darboux_normalize(d1(random_oneform(rng_for(cfg.seed, "darboux-deg", 0), quiver, 3)),
                          truncation)
        return CheckResult(
            "darboux", False, done, cfg.seed,
            counterexample={"error": "a degenerate constant part was accepted"},
        )
    except DegenerateFormError:
        pass
    return CheckResult("darboux", True, done, cfg.seed, {"truncation": truncation})


def check_calogero(cfg: VerifyConfig) -> CheckResult:
    trials = cfg.trials or 50
    done = 0
    for t in range(trials):
        rng = rng_for(cfg.seed, "cm", t)
        n = rng.randint(1, 5)
        xs = rng.sample(range(-30, 30), n)
        ps = [Fraction(rng.randint(-6, 6), rng.choice([1, 1, 2])) for _ in range(n)]
        done += 1
        try:
            pt = cm_point(xs, ps)
        except QuiverLieError as exc:
            return CheckResult("calogero", False, done, cfg.seed,
                               counterexample={"x": [str(v) for v in xs], "error": str(exc)})
        shifted = linalg.mat_add(linalg.commutator(pt.X, pt.Y), linalg.identity(n))
        if not cm_membership(pt.X, pt.Y) or linalg.rank(shifted) != 1 \
                or linalg.trace(shifted) != n:
            return CheckResult("calogero", False, done, cfg.seed,
                               counterexample={"x": [str(v) for v in xs],
                                               "p": [str(v) for v in ps]})
    return CheckResult("calogero", True, done, cfg.seed, {"max_n": 5})


def check_trace_kernel(cfg: VerifyConfig) -> CheckResult:
    """Commutators evaluate to zero everywhere; random nonzero necklaces get
    a witness at some n at most their degree (a small INCONCLUSIVE rate is
    tolerated, the search is probabilistic)."""
    trials = cfg.trials or 50
    degree = cfg.degree or 6
    quiver = one_loop_quiver()
    x = PathAlgebraElement.generator(quiver, "x")
    y = PathAlgebraElement.generator(quiver, "x*")
    done = 0
    inconclusive = 0
    # commutators are in the kernel
    for t in range(10):
        rng = rng_for(cfg.seed, "kernel-comm", t)
        a = random_necklace(rng, quiver, 3).lift()
        b = random_necklace(rng, quiver, 3).lift()
        comm = a * b - b * a
        done += 1
        result = trace_vanishing_probe(comm, 3, 4, cfg.seed + t)
        if result.verdict != "KERNEL":
            return CheckResult("trace-kernel", False, done, cfg.seed,
                               counterexample={"element": str(comm), "verdict": result.verdict})
    for t in range(trials):
        rng = rng_for(cfg.seed, "kernel-witness", t)
        f = random_necklace(rng, quiver, degree)
        if f.is_zero():
            continue
        done += 1
        result = trace_vanishing_probe(f, max(1, f.max_degree()), 20, cfg.seed + 1000 + t)
        if result.verdict == "INCONCLUSIVE":
            inconclusive += 1
        elif result.verdict != "WITNESS":
            return CheckResult("trace-kernel", False, done, cfg.seed,
                               counterexample={"necklace": str(f), "verdict": result.verdict})
    if inconclusive > max(1, trials // 100):
        return CheckResult(
            "trace-kernel", False, done, cfg.seed,
            counterexample={"inconclusive": inconclusive, "allowed": max(1, trials // 100)},
        )
    return CheckResult("trace-kernel", True, done, cfg.seed,
                       {"inconclusive": inconclusive, "degree": degree})


CHECKS: dict[str, Callable[[VerifyConfig], CheckResult]] = {
    "antisymmetry": check_antisymmetry,
    "jacobi": check_jacobi,
    "oracle-equivalence": check_oracle_equivalence,
    "cartan": check_cartan,
    "poincare": check_poincare,
    "central-extension": check_central_extension,
    "trace-homomorphism": check_trace_homomorphism,
    "moment-hamiltonian": check_moment_hamiltonian,
    "darboux": check_darboux,
    "calogero": check_calogero,
    "trace-kernel": check_trace_kernel,
}

ALIASES = {
    "hom": "trace-homomorphism",
    "moment": "moment-hamiltonian",
    "cm": "calogero",
    "oracle": "oracle-equivalence",
    "kernel": "trace-kernel",
}


def run_verification_suite(cfg: VerifyConfig) -> list[CheckResult]:
    names = list(cfg.checks) or list(CHECKS)
    names = [ALIASES.get(n, n) for n in names]
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {unknown}; available: {sorted(CHECKS)}")
    results = [CHECKS[name](cfg) for name in names]
    results.sort(key=lambda r: r.name)
    return results


def report_lines(results: list[CheckResult]) -> str:
    return "\n".join(json.dumps(r.to_json(), sort_keys=True) for r in results) + "\n"

"""Seeded random generators for necklaces, derivations, forms and rep points.

All randomness in the package flows from a single 64-bit seed.  A trial's
generator is random.Random over the first 8 bytes of
sha256("<seed>:<label>:<trial>"), so counterexamples reproduce across
platforms and process boundaries.
"""

from __future__ import annotations

import hashlib
import random
from fractions import Fraction

from .forms import OneForm, TwoForm, d0, d1
from .necklace import Derivation, Necklace
from .quiver import DoubledQuiver, Path, PathAlgebraElement
from .reps import DimensionVector, RepPoint
from . import linalg


def rng_for(seed: int, label: str, trial: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{label}:{trial}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def nonzero_rational(rng: random.Random, box: int = 3) -> Fraction:
    value = 0
    while value == 0:
        value = rng.randint(-box, box)
    return Fraction(value)


def random_closed_path(rng: random.Random, quiver: DoubledQuiver, length: int) -> Path | None:
    """A uniform-ish random closed word of the given length (None when the
    random walk fails to close up; callers retry)."""
    out_arrows: dict = {}
    for arrow in quiver.arrows:
        out_arrows.setdefault(arrow.head, []).append(arrow.index)
    start = rng.choice(quiver.vertices)
    word = []
    vertex = start
    for _ in range(length):
        options = out_arrows.get(vertex)
        if not options:
            return None
        idx = rng.choice(options)
        word.append(idx)
        vertex = quiver.arrows[idx].tail
    if vertex != start:
        return None
    return Path(quiver, tuple(word))


def random_necklace(
    rng: random.Random,
    quiver: DoubledQuiver,
    max_degree: int,
    num_terms: int = 2,
    box: int = 3,
    with_vertex_part: bool = False,
    min_degree: int = 1,
) -> Necklace:
    cycles = {}
    attempts = 0
    placed = 0
    while placed < num_terms and attempts < 200:
        attempts += 1
        degree = rng.randint(min_degree, max_degree)
        path = random_closed_path(rng, quiver, degree)
        if path is None:
            continue
        cycles[path] = cycles.get(path, Fraction(0)) + nonzero_rational(rng, box)
        placed += 1
    vertex_part = {}
    if with_vertex_part:
        vertex_part = {rng.choice(quiver.vertices): nonzero_rational(rng, box)}
    return Necklace(quiver, cycles, vertex_part)


def random_element(
    rng: random.Random,
    quiver: DoubledQuiver,
    head,  # target head vertex
    tail,  # target tail vertex
    max_degree: int,
    num_terms: int = 2,
    box: int = 3,
) -> PathAlgebraElement:
    """A random element of 1_head . A . 1_tail (possibly zero)."""
    in_arrows: dict = {}
    for arrow in quiver.arrows:
        in_arrows.setdefault(arrow.head, []).append(arrow.index)
    terms: dict = {}
    for _ in range(num_terms * 6):
        if len(terms) >= num_terms:
            break
        degree = rng.randint(0, max_degree)
        if degree == 0:
            if head == tail:
                p = Path(quiver, (), head)
                terms[p] = terms.get(p, Fraction(0)) + nonzero_rational(rng, box)
            continue
        word = []
        vertex = head
        ok = True
        for _ in range(degree):
            options = in_arrows.get(vertex)
            if not options:
                ok = False
                break
            idx = rng.choice(options)
            word.append(idx)
            vertex = quiver.arrows[idx].tail
        if ok and vertex == tail:
            p = Path(quiver, tuple(word))
            terms[p] = terms.get(p, Fraction(0)) + nonzero_rational(rng, box)
    return PathAlgebraElement(quiver, terms)


def random_derivation(
    rng: random.Random, quiver: DoubledQuiver, max_degree: int, box: int = 3
) -> Derivation:
    images = {}
    for arrow in quiver.arrows:
        elem = random_element(rng, quiver, arrow.head, arrow.tail, max_degree, 1, box)
        if not elem.is_zero():
            images[arrow.index] = elem
    return Derivation(quiver, images)


def random_oneform(
    rng: random.Random, quiver: DoubledQuiver, max_weight: int, num_terms: int = 2, box: int = 3
) -> OneForm:
    """A random 1-form (not closed in general)."""
    terms = {}
    for _ in range(num_terms * 6):
        if len(terms) >= num_terms:
            break
        weight = rng.randint(1, max_weight)
        cycle = random_closed_path(rng, quiver, weight)
        if cycle is None:
            continue
        arrs = cycle.arrows
        slot = arrs[-1]
        prefix = arrs[:-1]
        if prefix:
            p = Path(quiver, prefix)
        else:
            p = Path(quiver, (), quiver.arrows[slot].tail)
        key = (p, slot)
        terms[key] = terms.get(key, Fraction(0)) + nonzero_rational(rng, box)
    return OneForm(quiver, terms)


def random_twoform(
    rng: random.Random, quiver: DoubledQuiver, max_weight: int, num_terms: int = 2, box: int = 3
) -> TwoForm:
    """A random 2-form (not closed in general)."""
    result = TwoForm.zero(quiver)
    placed = 0
    for _ in range(num_terms * 8):
        if placed >= num_terms:
            break
        weight = rng.randint(2, max(2, max_weight))
        cycle = random_closed_path(rng, quiver, weight)
        if cycle is None:
            continue
        arrs = cycle.arrows
        positions = sorted(rng.sample(range(len(arrs)), 2)) if len(arrs) >= 2 else None
        if positions is None:
            continue
        i, j = positions
        mid = arrs[i + 1 : j]
        outer = arrs[j + 1 :] + arrs[:i]
        u = Path(quiver, outer) if outer else Path(quiver, (), quiver.arrows[arrs[i]].head)
        v = Path(quiver, mid) if mid else Path(quiver, (), quiver.arrows[arrs[j]].head)
        term = TwoForm(quiver, {(u, arrs[i], v, arrs[j]): nonzero_rational(rng, box)})
        if term.is_zero():
            continue
        result = result + term
        placed += 1
    return result


def random_closed_oneform(rng: random.Random, quiver: DoubledQuiver, max_weight: int,
                          num_terms: int = 2, box: int = 3) -> OneForm:
    """d of a random necklace: closed (in fact exact, which is everything)."""
    return d0(random_necklace(rng, quiver, max_degree=max_weight, num_terms=num_terms, box=box))


def random_closed_twoform(rng: random.Random, quiver: DoubledQuiver, max_weight: int,
                          num_terms: int = 2, box: int = 3) -> TwoForm:
    return d1(random_oneform(rng, quiver, max_weight - 1, num_terms, box))


def random_rep_point(
    rng: random.Random, quiver: DoubledQuiver, dims: DimensionVector, box: int = 3
) -> RepPoint:
    mats = {}
    for arrow in quiver.arrows:
        nh, nt = dims.n(arrow.head), dims.n(arrow.tail)
        mats[arrow.index] = [
            [Fraction(rng.randint(-box, box)) for _ in range(nt)] for _ in range(nh)
        ]
    return RepPoint(dims, mats)


def random_invertible(rng: random.Random, n: int, box: int = 3) -> linalg.Matrix:
    while True:
        mat = [[Fraction(rng.randint(-box, box)) for _ in range(n)] for _ in range(n)]
        if linalg.rank(mat) == n:
            return mat

"""Seeded random rational forms for property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .exterior_poly import FormSpace, PolyForm
from .linalg import Subspace


def coefficient(rng: random.Random) -> Fraction:
    """Integer in [-9, 9] over a denominator in [1, 4]."""
    return Fraction(rng.randint(-9, 9), rng.randint(1, 4))


def random_form(rng: random.Random, space: FormSpace, density: float = 1.0) -> PolyForm:
    vec = {}
    for i in range(space.dim):
        if density >= 1.0 or rng.random() < density:
            c = coefficient(rng)
            if c:
                vec[i] = c
    return PolyForm.from_vector(space, vec)


def random_element(rng: random.Random, sub: Subspace) -> PolyForm:
    """A random rational combination of the basis of ``sub`` (must be a form space)."""
    acc: dict[int, Fraction] = {}
    for vec in sub.basis:
        c = coefficient(rng)
        if not c:
            continue
        for i, x in vec:
            acc[i] = acc.get(i, 0) + c * x
    return PolyForm.from_vector(sub.ambient, acc)


def seeded(seed: int, *parts) -> random.Random:
    """A generator that depends only on ``seed`` and the labels in ``parts``."""
    return random.Random(":".join(str(p) for p in (seed, *parts)))

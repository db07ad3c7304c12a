"""Seeded random generators for formulas, hypersequents, and models.

Everything takes a random.Random instance so corpora are reproducible
from a single seed. Formula generation budgets node count, modal depth,
and box count separately: the box budget keeps block growth in proof
search within reach of the size bounds the test suite asserts.
"""

from __future__ import annotations

import random

from .formula import And, Atom, BOTTOM, Box, Formula, Imp, Or, TOP
from .hypersequent import Block, Hypersequent, Sequent
from .models import BiModel, StandardModel


def random_formula(
    rng: random.Random,
    max_nodes: int = 25,
    max_modal_depth: int = 3,
    max_boxes: int = 5,
    atoms: tuple[str, ...] = ("p", "q", "r"),
) -> Formula:
    budget = {"nodes": max_nodes, "boxes": max_boxes}

    def leaf() -> Formula:
        r = rng.random()
        if r < 0.8:
            return Atom(rng.choice(atoms))
        return TOP if r < 0.9 else BOTTOM

    def gen(modal_depth: int) -> Formula:
        budget["nodes"] -= 1
        if budget["nodes"] <= 1 or rng.random() < 0.25:
            return leaf()
        choices = ["and", "or", "imp"]
        if modal_depth > 0 and budget["boxes"] > 0:
            choices += ["box", "box"]
        kind = rng.choice(choices)
        if kind == "box":
            budget["boxes"] -= 1
            return Box(gen(modal_depth - 1))
        a = gen(modal_depth)
        b = gen(modal_depth)
        return {"and": And, "or": Or, "imp": Imp}[kind](a, b)

    return gen(max_modal_depth)


def random_hypersequent(
    rng: random.Random,
    max_components: int = 3,
    max_side: int = 2,
    max_blocks: int = 2,
    **formula_kwargs,
) -> Hypersequent:
    def small():
        return random_formula(rng, **{"max_nodes": 8, "max_boxes": 2, **formula_kwargs})

    sequents = []
    for _ in range(rng.randint(1, max_components)):
        left = [small() for _ in range(rng.randint(0, max_side))]
        right = [small() for _ in range(rng.randint(0, max_side))]
        blocks = [
            Block.of([small() for _ in range(rng.randint(1, 2))])
            for _ in range(rng.randint(0, max_blocks))
        ]
        sequents.append(Sequent.of(left, blocks, right))
    return Hypersequent.of(sequents)


def _random_subset(rng: random.Random, pool, p: float = 0.5) -> frozenset:
    return frozenset(w for w in pool if rng.random() < p)


def random_bi_model(
    rng: random.Random,
    max_worlds: int = 6,
    max_pairs: int = 4,
    atoms: tuple[str, ...] = ("p", "q", "r"),
) -> BiModel:
    worlds = frozenset(range(1, rng.randint(1, max_worlds) + 1))
    valuation = {a: _random_subset(rng, sorted(worlds)) for a in atoms}
    nbhd = {}
    for w in sorted(worlds):
        pairs = set()
        for _ in range(rng.randint(0, max_pairs)):
            alpha = _random_subset(rng, sorted(worlds))
            beta = _random_subset(rng, sorted(worlds), p=0.3)
            pairs.add((alpha, beta))
        nbhd[w] = frozenset(pairs)
    return BiModel.make(worlds, valuation, nbhd)


def random_standard_model(
    rng: random.Random,
    max_worlds: int = 6,
    max_sets: int = 4,
    atoms: tuple[str, ...] = ("p", "q", "r"),
) -> StandardModel:
    worlds = frozenset(range(1, rng.randint(1, max_worlds) + 1))
    valuation = {a: _random_subset(rng, sorted(worlds)) for a in atoms}
    nbhd = {
        w: frozenset(
            _random_subset(rng, sorted(worlds)) for _ in range(rng.randint(0, max_sets))
        )
        for w in sorted(worlds)
    }
    return StandardModel.make(worlds, valuation, nbhd)

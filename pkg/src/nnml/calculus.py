"""Backward rule application with local loop checking, and saturation.

Every rule is cumulative: principal formulas and blocks are copied into
the premisses, which makes all rules invertible. Applicability is
filtered by a local loop check: an instance is blocked when one of its
premisses adds nothing new, where "nothing new" means the changed
component is absorbed set-wise (``subsumes``) by its origin component
for rules that extend a component in place, or by any existing component
for rules that create a component. A hypersequent where no instance
survives the check and no initial pattern applies is saturated, and
saturation is exactly the countermodel condition the models module
consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .formula import And, Bottom, Box, Formula, Imp, Or, TOP, sort_key
from .hypersequent import (
    Block,
    Hypersequent,
    Sequent,
    block_sets,
    left_set,
    right_set,
)
from .logic import (
    AND_L,
    AND_R,
    BOT_L,
    BOX_L,
    BOX_R,
    BOX_RM,
    IMP_L,
    IMP_R,
    INIT,
    LogicSpec,
    OR_L,
    OR_R,
    RULE_C,
    RULE_D1,
    RULE_D2,
    RULE_N,
    RULE_P,
    RULE_T,
    RuleId,
    TOP_R,
    dn_plus,
    rule_set,
)

_TOP_BLOCK_SET = frozenset({TOP})


class InvalidInstance(ValueError):
    """Raised when principal data does not match the target hypersequent."""


@dataclass(frozen=True, slots=True)
class RuleInstance:
    rule: RuleId
    cid: int
    principal: tuple
    premisses: tuple[Hypersequent, ...]


def initial_evidence(h: Hypersequent) -> tuple[RuleId, int, Formula | None] | None:
    """First initial pattern in component order: falsum on the left, verum
    on the right, or a formula shared by both sides."""
    for c in h.components:
        ls = left_set(c.seq)
        rs = right_set(c.seq)
        if Bottom() in ls:
            return (BOT_L, c.cid, None)
        if TOP in rs:
            return (TOP_R, c.cid, None)
        shared = ls & rs
        if shared:
            return (INIT, c.cid, min(shared, key=sort_key))
    return None


def is_initial(h: Hypersequent) -> bool:
    return initial_evidence(h) is not None


def _distinct_sorted(formulas) -> list[Formula]:
    seen = set()
    out = []
    for f in formulas:
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


def _distinct_blocks(blocks) -> list[Block]:
    seen = set()
    out = []
    for b in blocks:
        if b not in seen:
            seen.add(b)
            out.append(b)
    return out


def build_premisses(h: Hypersequent, rule: RuleId, cid: int, principal: tuple) -> tuple[Hypersequent, ...]:
    """Construct the premisses of one rule instance.

    This is the single source of truth for rule schemas; the searcher and
    the derivation checker both call it. Principal data that does not
    occur in the target component raises InvalidInstance.
    """
    s = h.component(cid)

    def need_left(f):
        if f not in left_set(s):
            raise InvalidInstance(f"{rule.render()}: principal not in antecedent")

    def need_right(f):
        if f not in right_set(s):
            raise InvalidInstance(f"{rule.render()}: principal not in succedent")

    def need_blocks(blocks):
        have = list(s.blocks)
        for b in blocks:
            if b in have:
                have.remove(b)
            else:
                raise InvalidInstance(f"{rule.render()}: principal block missing")

    name = rule.name
    if name == "AndL":
        (f,) = principal
        if not isinstance(f, And):
            raise InvalidInstance("AndL needs a conjunction")
        need_left(f)
        return (h.replace(cid, s.adding(left=(f.left, f.right))),)
    if name == "OrL":
        (f,) = principal
        if not isinstance(f, Or):
            raise InvalidInstance("OrL needs a disjunction")
        need_left(f)
        return (
            h.replace(cid, s.adding(left=(f.left,))),
            h.replace(cid, s.adding(left=(f.right,))),
        )
    if name == "ImpR":
        (f,) = principal
        if not isinstance(f, Imp):
            raise InvalidInstance("ImpR needs an implication")
        need_right(f)
        return (h.replace(cid, s.adding(left=(f.left,), right=(f.right,))),)
    if name == "AndR":
        (f,) = principal
        if not isinstance(f, And):
            raise InvalidInstance("AndR needs a conjunction")
        need_right(f)
        return (
            h.replace(cid, s.adding(right=(f.left,))),
            h.replace(cid, s.adding(right=(f.right,))),
        )
    if name == "OrR":
        (f,) = principal
        if not isinstance(f, Or):
            raise InvalidInstance("OrR needs a disjunction")
        need_right(f)
        return (h.replace(cid, s.adding(right=(f.left, f.right))),)
    if name == "ImpL":
        (f,) = principal
        if not isinstance(f, Imp):
            raise InvalidInstance("ImpL needs an implication")
        need_left(f)
        return (
            h.replace(cid, s.adding(right=(f.left,))),
            h.replace(cid, s.adding(left=(f.right,))),
        )
    if name == "BoxL":
        (f,) = principal
        if not isinstance(f, Box):
            raise InvalidInstance("BoxL needs a boxed formula")
        need_left(f)
        return (h.replace(cid, s.adding(blocks=(Block.of((f.body,)),))),)
    if name == "T":
        (b,) = principal
        need_blocks((b,))
        return (h.replace(cid, s.adding(left=b.members)),)
    if name == "C":
        b1, b2 = principal
        need_blocks((b1, b2))
        return (h.replace(cid, s.adding(blocks=(b1.merged(b2),))),)
    if name == "N":
        if principal != ():
            raise InvalidInstance("N has no principal")
        return (h.replace(cid, s.adding(blocks=(Block.of((TOP,)),))),)
    if name in ("BoxR", "BoxRm"):
        b, f = principal
        if not isinstance(f, Box):
            raise InvalidInstance(f"{name} needs a boxed succedent formula")
        need_blocks((b,))
        need_right(f)
        branch = h.replace(cid, s)
        out = []
        if name == "BoxR":
            for a in sorted(b.member_set(), key=sort_key):
                out.append(branch.with_new_component(Sequent.of((f.body,), (), (a,))))
        out.append(branch.with_new_component(Sequent.of(b.members, (), (f.body,))))
        return tuple(out)
    if name == "P":
        (b,) = principal
        need_blocks((b,))
        return (h.with_new_component(Sequent.of(b.members, (), ())),)
    if name == "D1":
        (b,) = principal
        need_blocks((b,))
        out = [h.with_new_component(Sequent.of(b.members, (), ()))]
        for a in sorted(b.member_set(), key=sort_key):
            out.append(h.with_new_component(Sequent.of((), (), (a,))))
        return tuple(out)
    if name == "D2":
        b1, b2 = principal
        need_blocks((b1, b2))
        out = [h.with_new_component(Sequent.of(b1.members + b2.members, (), ()))]
        for a in sorted(b1.member_set(), key=sort_key):
            for c in sorted(b2.member_set(), key=sort_key):
                out.append(h.with_new_component(Sequent.of((), (), (a, c))))
        return tuple(out)
    if name == "DnPlus":
        blocks = principal
        if len(blocks) != rule.arity:
            raise InvalidInstance("graded rule arity mismatch")
        need_blocks(blocks)
        members: tuple[Formula, ...] = ()
        for b in blocks:
            members = members + b.members
        return (h.with_new_component(Sequent.of(members, (), ())),)
    raise InvalidInstance(f"unknown rule {rule!r}")


def _box_right_blocked(h: Hypersequent, bs: frozenset, body: Formula, monotonic: bool) -> bool:
    for c in h.components:
        if bs <= left_set(c.seq) and body in right_set(c.seq):
            return True
    if monotonic:
        return False
    for c in h.components:
        if body in left_set(c.seq) and bs & right_set(c.seq):
            return True
    return False


def _left_superset_exists(h: Hypersequent, needed: frozenset) -> bool:
    return any(needed <= left_set(c.seq) for c in h.components)


def _right_hits(h: Hypersequent, candidates: frozenset) -> bool:
    return any(candidates & right_set(c.seq) for c in h.components)


def _right_pair_exists(h: Hypersequent, s1: frozenset, s2: frozenset) -> bool:
    # a pair (A, B) with A and B in the same succedent set; A = B is allowed
    return any(s1 & right_set(c.seq) and s2 & right_set(c.seq) for c in h.components)


def iter_instances(h: Hypersequent, l: LogicSpec) -> Iterator[RuleInstance]:
    """Applicable instances in the fixed strategy order.

    Order: invertible single-premiss propositional rules, branching
    propositional rules, then block creation and block bookkeeping, then
    the modal right rule, then the deontic rules. Within one rule,
    component order first, canonical principal order second.
    """
    rules = rule_set(l)

    def make(rule, cid, principal):
        return RuleInstance(rule, cid, principal, build_premisses(h, rule, cid, principal))

    for group in (_group_one, _group_two):
        for inst in group(h, make):
            yield inst
    for c in h.components:
        bsets = block_sets(c.seq)
        for f in _distinct_sorted(c.seq.left):
            if isinstance(f, Box) and frozenset({f.body}) not in bsets:
                yield make(BOX_L, c.cid, (f,))
    if RULE_T in rules:
        for c in h.components:
            ls = left_set(c.seq)
            for b in _distinct_blocks(c.seq.blocks):
                if not b.member_set() <= ls:
                    yield make(RULE_T, c.cid, (b,))
    if RULE_C in rules:
        for c in h.components:
            blocks = c.seq.blocks
            bsets = block_sets(c.seq)
            seen = set()
            for i in range(len(blocks)):
                for j in range(i + 1, len(blocks)):
                    pair = (blocks[i], blocks[j])
                    if pair in seen:
                        continue
                    seen.add(pair)
                    if blocks[i].member_set() | blocks[j].member_set() not in bsets:
                        yield make(RULE_C, c.cid, pair)
    if RULE_N in rules:
        for c in h.components:
            if _TOP_BLOCK_SET not in block_sets(c.seq):
                yield make(RULE_N, c.cid, ())
    box_right = BOX_RM if l.monotonic else BOX_R
    if box_right in rules:
        for c in h.components:
            boxes = [f for f in _distinct_sorted(c.seq.right) if isinstance(f, Box)]
            if not boxes:
                continue
            for b in _distinct_blocks(c.seq.blocks):
                bs = b.member_set()
                for f in boxes:
                    if not _box_right_blocked(h, bs, f.body, l.monotonic):
                        yield make(box_right, c.cid, (b, f))
    if RULE_P in rules:
        for c in h.components:
            for b in _distinct_blocks(c.seq.blocks):
                if not _left_superset_exists(h, b.member_set()):
                    yield make(RULE_P, c.cid, (b,))
    if RULE_D1 in rules:
        for c in h.components:
            for b in _distinct_blocks(c.seq.blocks):
                bs = b.member_set()
                if not (_left_superset_exists(h, bs) or _right_hits(h, bs)):
                    yield make(RULE_D1, c.cid, (b,))
    if RULE_D2 in rules:
        for c in h.components:
            blocks = c.seq.blocks
            seen = set()
            for i in range(len(blocks)):
                for j in range(i + 1, len(blocks)):
                    pair = (blocks[i], blocks[j])
                    if pair in seen:
                        continue
                    seen.add(pair)
                    s1 = blocks[i].member_set()
                    s2 = blocks[j].member_set()
                    if not (_left_superset_exists(h, s1 | s2) or _right_pair_exists(h, s1, s2)):
                        yield make(RULE_D2, c.cid, pair)
    arities = sorted(r.arity for r in rules if r.name == "DnPlus")
    for arity in arities:
        for c in h.components:
            blocks = c.seq.blocks
            if len(blocks) < arity:
                continue
            seen = set()
            for idxs in combinations(range(len(blocks)), arity):
                chosen = tuple(blocks[i] for i in idxs)
                if chosen in seen:
                    continue
                seen.add(chosen)
                union: frozenset = frozenset()
                for b in chosen:
                    union = union | b.member_set()
                if not _left_superset_exists(h, union):
                    yield make(dn_plus(arity), c.cid, chosen)


def _group_one(h: Hypersequent, make) -> Iterator[RuleInstance]:
    for c in h.components:
        ls = left_set(c.seq)
        rs = right_set(c.seq)
        for f in _distinct_sorted(c.seq.left):
            if isinstance(f, And) and not (f.left in ls and f.right in ls):
                yield make(AND_L, c.cid, (f,))
        for f in _distinct_sorted(c.seq.left):
            if isinstance(f, Or) and not (f.left in ls or f.right in ls):
                yield make(OR_L, c.cid, (f,))
        for f in _distinct_sorted(c.seq.right):
            if isinstance(f, Imp) and not (f.left in ls and f.right in rs):
                yield make(IMP_R, c.cid, (f,))


def _group_two(h: Hypersequent, make) -> Iterator[RuleInstance]:
    for c in h.components:
        ls = left_set(c.seq)
        rs = right_set(c.seq)
        for f in _distinct_sorted(c.seq.right):
            if isinstance(f, And) and not (f.left in rs or f.right in rs):
                yield make(AND_R, c.cid, (f,))
        for f in _distinct_sorted(c.seq.right):
            if isinstance(f, Or) and not (f.left in rs and f.right in rs):
                yield make(OR_R, c.cid, (f,))
        for f in _distinct_sorted(c.seq.left):
            if isinstance(f, Imp) and not (f.left in rs or f.right in ls):
                yield make(IMP_L, c.cid, (f,))


def first_instance(h: Hypersequent, l: LogicSpec) -> RuleInstance | None:
    return next(iter_instances(h, l), None)


def applicable_instances(h: Hypersequent, l: LogicSpec) -> list[RuleInstance]:
    return list(iter_instances(h, l))


def is_saturated(h: Hypersequent, l: LogicSpec) -> bool:
    """Clause-by-clause saturation test, one clause per rule in the logic.

    Deliberately implemented against the component contents rather than by
    asking for instances; the test suite cross-checks the two paths.
    """
    rules = rule_set(l)
    comps = [c.seq for c in h.components]
    all_left = [left_set(s) for s in comps]
    all_right = [right_set(s) for s in comps]
    for s, ls, rs in zip(comps, all_left, all_right):
        if Bottom() in ls or TOP in rs or ls & rs:
            return False
        for f in ls:
            match f:
                case And(a, b):
                    if not (a in ls and b in ls):
                        return False
                case Or(a, b):
                    if not (a in ls or b in ls):
                        return False
                case Imp(a, b):
                    if not (a in rs or b in ls):
                        return False
                case Box(a):
                    if frozenset({a}) not in block_sets(s):
                        return False
        for f in rs:
            match f:
                case And(a, b):
                    if not (a in rs or b in rs):
                        return False
                case Or(a, b):
                    if not (a in rs and b in rs):
                        return False
                case Imp(a, b):
                    if not (a in ls and b in rs):
                        return False
        bsets = block_sets(s)
        if RULE_T in rules and any(not bs <= ls for bs in bsets):
            return False
        if RULE_C in rules:
            for i in range(len(bsets)):
                for j in range(i + 1, len(bsets)):
                    if bsets[i] | bsets[j] not in bsets:
                        return False
        if RULE_N in rules and _TOP_BLOCK_SET not in bsets:
            return False
        boxes = [f for f in rs if isinstance(f, Box)]
        if boxes and s.blocks:
            monotonic = BOX_RM in rules
            for bs in bsets:
                for f in boxes:
                    if _box_right_blocked(h, bs, f.body, monotonic):
                        continue
                    return False
        if RULE_P in rules:
            for bs in bsets:
                if not _left_superset_exists(h, bs):
                    return False
        if RULE_D1 in rules:
            for bs in bsets:
                if not (_left_superset_exists(h, bs) or _right_hits(h, bs)):
                    return False
        if RULE_D2 in rules:
            for i in range(len(bsets)):
                for j in range(i + 1, len(bsets)):
                    if not (
                        _left_superset_exists(h, bsets[i] | bsets[j])
                        or _right_pair_exists(h, bsets[i], bsets[j])
                    ):
                        return False
        for rule in sorted((r for r in rules if r.name == "DnPlus"), key=lambda r: r.arity):
            for idxs in combinations(range(len(bsets)), rule.arity):
                union: frozenset = frozenset()
                for i in idxs:
                    union = union | bsets[i]
                if not _left_superset_exists(h, union):
                    return False
    return True

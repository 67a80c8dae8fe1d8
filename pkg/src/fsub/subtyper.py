"""Subtyping: derivation trees, checkers, and bounded deciders.

Two rule systems share the `Derivation` shape.  The explicit system (lowercase
tags) carries well-scopedness obligations at its leaves: `top` and `var` nodes
demand an ok environment and closed types.  The implicit system (capitalized
tags) has the same tree structure with those obligations dropped; `to_explicit`
and `to_implicit` translate between the two.

A quantifier node stores one witness name for its body comparison.  The choice
is irrelevant: renaming the witness to any other name satisfying the freshness
conditions preserves validity (`replace_witness`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Union

from .errors import InternalCheckError, PreconditionError
from .judgments import Env, closed, fresh_for_env, gfresh, lookup, ok
from .parser import parse_env, parse_type, print_env, print_judgment, print_type
from .syntax import (
    Arrow,
    Forall,
    FreeVar,
    Top,
    Ty,
    VarName,
    fresh,
    fv,
    is_locally_closed,
    open_ty,
    subst_var,
)


class Rule(str, Enum):
    """Rule tags: explicit system, implicit system, and declarative-search markers."""

    TOP = "top"
    VAR = "var"
    TRS = "trs"
    ARR = "arr"
    ALL = "all"
    I_TOP = "Top"
    I_REFL = "Refl"
    I_TRANS = "Trans"
    I_ARR = "Arr"
    I_ALL = "All"
    D_HYP = "D-Hyp"
    D_REFL = "D-Refl"
    D_TRANS = "D-Trans"


EXPLICIT_RULES = frozenset((Rule.TOP, Rule.VAR, Rule.TRS, Rule.ARR, Rule.ALL))
IMPLICIT_RULES = frozenset((Rule.I_TOP, Rule.I_REFL, Rule.I_TRANS, Rule.I_ARR, Rule.I_ALL))

ARITY = {
    Rule.TOP: 0,
    Rule.VAR: 0,
    Rule.TRS: 1,
    Rule.ARR: 2,
    Rule.ALL: 2,
    Rule.I_TOP: 0,
    Rule.I_REFL: 0,
    Rule.I_TRANS: 1,
    Rule.I_ARR: 2,
    Rule.I_ALL: 2,
}

_TO_IMPLICIT = {
    Rule.TOP: Rule.I_TOP,
    Rule.VAR: Rule.I_REFL,
    Rule.TRS: Rule.I_TRANS,
    Rule.ARR: Rule.I_ARR,
    Rule.ALL: Rule.I_ALL,
}
_TO_EXPLICIT = {v: k for k, v in _TO_IMPLICIT.items()}


@dataclass(frozen=True, slots=True)
class Derivation:
    """One node of a derivation tree concluding `env |- lhs <: rhs`.

    `witness` is the name used to compare quantifier bodies and is present
    exactly at `all`/`All` nodes.  Construction is unchecked; validity is the
    checker's business, so malformed trees can be built for negative tests.
    """

    rule: Rule
    env: Env
    lhs: Ty
    rhs: Ty
    premises: tuple["Derivation", ...] = ()
    witness: Optional[VarName] = None

    @property
    def concl(self) -> tuple[Env, Ty, Ty]:
        return (self.env, self.lhs, self.rhs)


Goal = tuple[Env, Ty, Ty]


@dataclass(frozen=True, slots=True)
class Yes:
    """Subtyping holds, with a checkable derivation."""

    derivation: Derivation


@dataclass(frozen=True, slots=True)
class No:
    """Subtyping fails; `trace` is the goal path from the query down to the
    first goal no rule applies to."""

    trace: tuple[Goal, ...]
    reason: Optional[str] = None


@dataclass(frozen=True, slots=True)
class Unknown:
    """Fuel ran out before the search finished."""

    fuel_spent: int


SubResult = Union[Yes, No, Unknown]

DEFAULT_FUEL = 10000


def derivation_height(d: Derivation) -> int:
    """Longest node path from this node to a leaf, counting nodes."""
    return 1 + max((derivation_height(p) for p in d.premises), default=0)


def iter_nodes(d: Derivation) -> Iterator[tuple[tuple[int, ...], Derivation]]:
    """All nodes with their child-index paths, preorder."""
    stack = [((), d)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for i in reversed(range(len(node.premises))):
            stack.append((path + (i,), node.premises[i]))


def names_in_derivation(d: Derivation) -> frozenset[VarName]:
    """Every name visible anywhere in the tree: declared, free, or witness."""
    names: set[VarName] = set()
    for _, node in iter_nodes(d):
        for name, bound in node.env.bindings:
            names.add(name)
            names |= fv(bound)
        names |= fv(node.lhs) | fv(node.rhs)
        if node.witness is not None:
            names.add(node.witness)
    return frozenset(names)


def rename_var_in_derivation(d: Derivation, old: VarName, new: VarName) -> Derivation:
    """Textually rename a free variable everywhere: environment names and
    bounds, conclusions, witnesses.  The caller must pick `new` fresh for the
    whole tree; nothing is re-checked here."""
    env = Env(
        tuple(
            (new if name == old else name, subst_var(bound, old, new))
            for name, bound in d.env.bindings
        )
    )
    return Derivation(
        d.rule,
        env,
        subst_var(d.lhs, old, new),
        subst_var(d.rhs, old, new),
        tuple(rename_var_in_derivation(p, old, new) for p in d.premises),
        new if d.witness == old else d.witness,
    )


def replace_witness(d: Derivation, new: VarName) -> Derivation:
    """Rename the witness of a quantifier node, consistently through the body
    premise.  `new` must be fresh for that subtree and for the node's
    environment; validity is then preserved."""
    if d.rule not in (Rule.ALL, Rule.I_ALL) or d.witness is None:
        raise PreconditionError(f"not a quantifier node: {d.rule}")
    if new == d.witness:
        return d
    p_bound, p_body = d.premises
    return Derivation(
        d.rule,
        d.env,
        d.lhs,
        d.rhs,
        (p_bound, rename_var_in_derivation(p_body, d.witness, new)),
        new,
    )


def witness_for(g: Env, *tys: Ty) -> VarName:
    """Deterministic witness: fresh for the environment and for the given types."""
    avoid = {name for name, _ in g.bindings}
    for t in tys:
        avoid |= fv(t)
    return fresh(avoid)


# ---------------------------------------------------------------- checking


def _fmt_path(path: tuple[int, ...]) -> str:
    return "root" if not path else "root." + ".".join(str(i) for i in path)


def _diagnose(d: Derivation, path: tuple[int, ...], implicit: bool) -> Optional[str]:
    at = _fmt_path(path)
    ruleset = IMPLICIT_RULES if implicit else EXPLICIT_RULES
    if d.rule not in ruleset:
        system = "implicit" if implicit else "explicit"
        return f"{at}: rule {d.rule.value!r} does not belong to the {system} system"
    if len(d.premises) != ARITY[d.rule]:
        return f"{at}: rule {d.rule.value!r} takes {ARITY[d.rule]} premises, got {len(d.premises)}"
    if (d.witness is not None) != (d.rule in (Rule.ALL, Rule.I_ALL)):
        return f"{at}: witness must be present exactly at quantifier nodes"
    if not (is_locally_closed(d.lhs) and is_locally_closed(d.rhs)):
        return f"{at}: conclusion contains an escaped bound index"

    shape = _TO_EXPLICIT.get(d.rule, d.rule)
    g, s, t = d.concl
    if shape == Rule.TOP:
        if not isinstance(t, Top):
            return f"{at}: right side of a top node must be Top"
        if not implicit:
            if not ok(g):
                return f"{at}: environment is not ok"
            if not closed(s, g):
                return f"{at}: left side is not closed in the environment"
    elif shape == Rule.VAR:
        if not (isinstance(s, FreeVar) and s == t):
            return f"{at}: a reflexivity node relates a variable to itself"
        if not implicit:
            if not ok(g):
                return f"{at}: environment is not ok"
            if lookup(g, s.name) is None:
                return f"{at}: variable {s.name!r} is not declared"
    elif shape == Rule.TRS:
        if not isinstance(s, FreeVar):
            return f"{at}: left side of a bound-chaining node must be a variable"
        bound = lookup(g, s.name)
        if bound is None:
            return f"{at}: variable {s.name!r} is not declared"
        if d.premises[0].concl != (g, bound, t):
            return f"{at}: premise must conclude the declared bound below the right side"
    elif shape == Rule.ARR:
        if not (isinstance(s, Arrow) and isinstance(t, Arrow)):
            return f"{at}: both sides of an arrow node must be arrows"
        if d.premises[0].concl != (g, t.dom, s.dom):
            return f"{at}: first premise must compare domains contravariantly"
        if d.premises[1].concl != (g, s.cod, t.cod):
            return f"{at}: second premise must compare codomains covariantly"
    elif shape == Rule.ALL:
        if not (isinstance(s, Forall) and isinstance(t, Forall)):
            return f"{at}: both sides of a quantifier node must be universals"
        w = d.witness
        assert w is not None
        if not gfresh(g, w):
            return f"{at}: witness {w!r} is already declared"
        if w in fv(s.body) | fv(t.body):
            return f"{at}: witness {w!r} occurs free under a quantifier body"
        if d.premises[0].concl != (g, t.bound, s.bound):
            return f"{at}: first premise must compare bounds contravariantly"
        expected = (g.extend(w, t.bound), open_ty(s.body, w), open_ty(t.body, w))
        if d.premises[1].concl != expected:
            return f"{at}: second premise must compare bodies under the witness binding"

    for i, p in enumerate(d.premises):
        problem = _diagnose(p, path + (i,), implicit)
        if problem is not None:
            return problem
    return None


def diagnose_derivation(d: Derivation) -> Optional[str]:
    """None if `d` is valid in the explicit system, else the first offending
    node's path and the violated condition."""
    return _diagnose(d, (), implicit=False)


def check_derivation(d: Derivation) -> bool:
    """Validity in the explicit system: rule shapes, side conditions, and the
    witness discipline hold at every node."""
    return diagnose_derivation(d) is None


def diagnose_derivation_implicit(d: Derivation) -> Optional[str]:
    """Like `diagnose_derivation` for the implicit system (no ok/closed checks)."""
    return _diagnose(d, (), implicit=True)


def check_derivation_implicit(d: Derivation) -> bool:
    """Validity in the implicit system."""
    return diagnose_derivation_implicit(d) is None


def _retag(d: Derivation, mapping: dict[Rule, Rule]) -> Derivation:
    return Derivation(
        mapping[d.rule],
        d.env,
        d.lhs,
        d.rhs,
        tuple(_retag(p, mapping) for p in d.premises),
        d.witness,
    )


def to_implicit(d: Derivation) -> Derivation:
    """Retag a valid explicit derivation into the implicit system."""
    problem = diagnose_derivation(d)
    if problem is not None:
        raise PreconditionError(problem)
    return _retag(d, _TO_IMPLICIT)


def to_explicit(d: Derivation) -> Derivation:
    """Retag a valid implicit derivation into the explicit system.

    Requires an ok root environment with both root sides closed; the leaf
    obligations at every node then hold because each rule only ever extends the
    environment with a fresh name bound by a closed type."""
    problem = diagnose_derivation_implicit(d)
    if problem is not None:
        raise PreconditionError(problem)
    g, s, t = d.concl
    if not ok(g):
        raise PreconditionError("root environment is not ok")
    if not (closed(s, g) and closed(t, g)):
        raise PreconditionError("root conclusion is not closed in its environment")
    out = _retag(d, _TO_EXPLICIT)
    problem = diagnose_derivation(out)
    if problem is not None:
        raise InternalCheckError(f"retagged derivation failed the checker: {problem}")
    return out


# ---------------------------------------------------------------- deciding


def scoping_problem(g: Env, s: Ty, t: Ty) -> Optional[str]:
    """Why (g, s, t) is not a well-scoped query, or None."""
    if not ok(g):
        return "environment is not ok"
    if not closed(s, g):
        return "left type is not closed in the environment"
    if not closed(t, g):
        return "right type is not closed in the environment"
    return None


def decide_sub(g: Env, s: Ty, t: Ty, fuel: int = DEFAULT_FUEL) -> SubResult:
    """Decide `g |- s <: t` with a fuel bound.

    The system is syntax-directed, so at most one rule applies to each goal:
    Top on the right wins, then variable reflexivity, then chaining a left
    variable through its declared bound, then the structural rules.  Each goal
    visited consumes one unit of fuel; running out yields Unknown.
    """
    problem = scoping_problem(g, s, t)
    if problem is not None:
        return No(((g, s, t),), reason=problem)
    budget = [fuel]
    return _decide(g, s, t, budget, fuel)


def _decide(g: Env, s: Ty, t: Ty, budget: list[int], initial: int) -> SubResult:
    if budget[0] <= 0:
        return Unknown(initial)
    budget[0] -= 1
    goal: Goal = (g, s, t)

    if isinstance(t, Top):
        return Yes(Derivation(Rule.TOP, g, s, t))
    if isinstance(s, FreeVar):
        if s == t:
            return Yes(Derivation(Rule.VAR, g, s, t))
        bound = lookup(g, s.name)
        assert bound is not None  # s is closed in g
        sub = _decide(g, bound, t, budget, initial)
        if isinstance(sub, Yes):
            return Yes(Derivation(Rule.TRS, g, s, t, (sub.derivation,)))
        if isinstance(sub, No):
            return No((goal,) + sub.trace, reason=sub.reason)
        return sub
    if isinstance(s, Arrow) and isinstance(t, Arrow):
        doms = _decide(g, t.dom, s.dom, budget, initial)
        if isinstance(doms, No):
            return No((goal,) + doms.trace, reason=doms.reason)
        if isinstance(doms, Unknown):
            return doms
        cods = _decide(g, s.cod, t.cod, budget, initial)
        if isinstance(cods, No):
            return No((goal,) + cods.trace, reason=cods.reason)
        if isinstance(cods, Unknown):
            return cods
        return Yes(Derivation(Rule.ARR, g, s, t, (doms.derivation, cods.derivation)))
    if isinstance(s, Forall) and isinstance(t, Forall):
        bounds = _decide(g, t.bound, s.bound, budget, initial)
        if isinstance(bounds, No):
            return No((goal,) + bounds.trace, reason=bounds.reason)
        if isinstance(bounds, Unknown):
            return bounds
        w = witness_for(g, s.body, t.body)
        bodies = _decide(
            g.extend(w, t.bound), open_ty(s.body, w), open_ty(t.body, w), budget, initial
        )
        if isinstance(bodies, No):
            return No((goal,) + bodies.trace, reason=bodies.reason)
        if isinstance(bodies, Unknown):
            return bodies
        return Yes(
            Derivation(Rule.ALL, g, s, t, (bounds.derivation, bodies.derivation), witness=w)
        )
    return No((goal,), reason="no rule applies")


def _closed_subterms(t: Ty, acc: list[Ty]) -> None:
    # Subterms that are types in their own right; quantifier bodies are
    # abstractions, not types, so only the bound is descended into.
    acc.append(t)
    match t:
        case Arrow(dom, cod):
            _closed_subterms(dom, acc)
            _closed_subterms(cod, acc)
        case Forall(bound, _):
            _closed_subterms(bound, acc)


class DeclarativeSearch:
    """Bounded provability in the declarative system: hypothesis, unrestricted
    reflexivity, and transitivity through any midpoint replace the algorithmic
    variable rules.

    Midpoints for a transitivity step are drawn from a finite universe local to
    the goal (subterms of both sides, every declared bound, and Top), which
    keeps the search finite; the restriction is a potential completeness loss at
    scale, but none is observable on small instances.  Results are memoized per
    goal with the proven/failed budget, so an instance can be shared across many
    queries."""

    def __init__(self) -> None:
        self._proven: dict[Goal, int] = {}
        self._failed: dict[Goal, int] = {}

    def provable(self, g: Env, s: Ty, t: Ty, depth: int) -> bool:
        """True if a declarative derivation of height <= depth exists."""
        if depth <= 0:
            return False
        goal: Goal = (g, s, t)
        proven = self._proven.get(goal)
        if proven is not None and proven <= depth:
            return True
        if depth <= self._failed.get(goal, 0):
            return False
        found = self._search(g, s, t, depth)
        if found:
            if proven is None or depth < proven:
                self._proven[goal] = depth
        else:
            self._failed[goal] = max(self._failed.get(goal, 0), depth)
        return found

    def _search(self, g: Env, s: Ty, t: Ty, depth: int) -> bool:
        rest = depth - 1
        if isinstance(t, Top):
            return True
        if s == t:
            return True
        if isinstance(s, FreeVar) and lookup(g, s.name) == t:
            return True
        if isinstance(s, Arrow) and isinstance(t, Arrow):
            if self.provable(g, t.dom, s.dom, rest) and self.provable(g, s.cod, t.cod, rest):
                return True
        if isinstance(s, Forall) and isinstance(t, Forall):
            if self.provable(g, t.bound, s.bound, rest):
                w = witness_for(g, s.body, t.body)
                g2 = g.extend(w, t.bound)
                if self.provable(g2, open_ty(s.body, w), open_ty(t.body, w), rest):
                    return True
        for m in self._midpoints(g, s, t):
            if self.provable(g, s, m, rest) and self.provable(g, m, t, rest):
                return True
        return False

    @staticmethod
    def _midpoints(g: Env, s: Ty, t: Ty) -> list[Ty]:
        raw: list[Ty] = [Top()]
        for _, bound in g.bindings:
            raw.append(bound)
        _closed_subterms(s, raw)
        _closed_subterms(t, raw)
        seen: dict[Ty, None] = {}
        for m in raw:
            if m != s and m != t:
                seen.setdefault(m, None)
        return list(seen)


def decide_sub_declarative(
    g: Env, s: Ty, t: Ty, max_depth: int, search: Optional[DeclarativeSearch] = None
) -> bool:
    """Iterative-deepening provability in the declarative system up to `max_depth`."""
    engine = search if search is not None else DeclarativeSearch()
    for depth in range(1, max_depth + 1):
        if engine.provable(g, s, t, depth):
            return True
    return False


# ---------------------------------------------------------------- rendering


def derivation_to_text(d: Derivation) -> str:
    """Indented one-node-per-line rendering; quantifier nodes show their witness."""
    lines: list[str] = []

    def walk(node: Derivation, depth: int) -> None:
        tag = node.rule.value
        if node.witness is not None:
            tag += f" {node.witness}"
        lines.append("  " * depth + f"({tag}) " + print_judgment(node.env, node.lhs, node.rhs))
        for p in node.premises:
            walk(p, depth + 1)

    walk(d, 0)
    return "\n".join(lines)


def _to_obj(d: Derivation) -> dict:
    return {
        "rule": d.rule.value,
        "env": print_env(d.env),
        "lhs": print_type(d.lhs),
        "rhs": print_type(d.rhs),
        "witness": d.witness,
        "premises": [_to_obj(p) for p in d.premises],
    }


def derivation_to_json(d: Derivation, indent: Optional[int] = None) -> str:
    """Serialize with a fixed key order: rule, env, lhs, rhs, witness, premises.
    Types and environments use the surface syntax, so output re-parses exactly."""
    return json.dumps(_to_obj(d), indent=indent)


_JSON_KEYS = ("rule", "env", "lhs", "rhs", "witness", "premises")


def _from_obj(obj: object) -> Derivation:
    if not isinstance(obj, dict):
        raise ValueError(f"derivation node must be an object, got {type(obj).__name__}")
    for key in _JSON_KEYS:
        if key not in obj:
            raise ValueError(f"derivation node is missing {key!r}")
    try:
        rule = Rule(obj["rule"])
    except ValueError:
        raise ValueError(f"unknown rule tag: {obj['rule']!r}") from None
    witness = obj["witness"]
    if witness is not None and not isinstance(witness, str):
        raise ValueError("witness must be a name or null")
    premises = obj["premises"]
    if not isinstance(premises, list):
        raise ValueError("premises must be a list")
    for key in ("env", "lhs", "rhs"):
        if not isinstance(obj[key], str):
            raise ValueError(f"{key} must be a string of surface syntax")
    return Derivation(
        rule,
        parse_env(obj["env"]),
        parse_type(obj["lhs"]),
        parse_type(obj["rhs"]),
        tuple(_from_obj(p) for p in premises),
        witness,
    )


def derivation_from_json(text: str) -> Derivation:
    """Inverse of `derivation_to_json`.  Raises ValueError on schema violations."""
    return _from_obj(json.loads(text))

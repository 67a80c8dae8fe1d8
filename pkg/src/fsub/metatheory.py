"""Derivation transformers: reflexivity, permutation, weakening, transitivity,
narrowing.

Each operation consumes checker-valid derivations and produces a checker-valid
derivation of the transformed conclusion; precondition violations raise
`PreconditionError` instead of producing garbage.  Transitivity and narrowing
recurse into each other; their joint termination measure is the lexicographic
triple (size of the middle/pivot type, operation rank, height of the inducted
derivation), where narrowing ranks above transitivity.  Every recursive call
strictly decreases the triple: the only same-size step is narrowing's
bound-chain case at the pivot, which crosses to transitivity and drops the
rank.  The measure is asserted at runtime in debug mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import InternalCheckError, PreconditionError
from .judgments import Env, closed, env_concat, gfresh, names_in_env, ok
from .subtyper import (
    Derivation,
    Rule,
    derivation_height,
    diagnose_derivation,
    iter_nodes,
    names_in_derivation,
    replace_witness,
    witness_for,
)
from .syntax import Arrow, Forall, FreeVar, Top, Ty, VarName, fresh, open_ty, size

# Measure components; narrowing must rank above transitivity so that the
# pivot-chain crossover still decreases.
_TRANS_RANK = 0
_NARROW_RANK = 1

Measure = tuple[int, int, int]


def _require_valid(d: Derivation, what: str) -> None:
    problem = diagnose_derivation(d)
    if problem is not None:
        raise PreconditionError(f"{what} is not a valid derivation: {problem}")


def _step(parent: Optional[Measure], child: Measure) -> Measure:
    assert parent is None or child < parent, (
        f"termination measure did not decrease: {parent} -> {child}"
    )
    return child


def derive_refl(g: Env, s: Ty) -> Derivation:
    """A derivation of `g |- s <: s`, by recursion on `s`."""
    if not ok(g):
        raise PreconditionError("environment is not ok")
    if not closed(s, g):
        raise PreconditionError("type is not closed in the environment")
    return _refl(g, s)


def _refl(g: Env, s: Ty) -> Derivation:
    match s:
        case Top():
            return Derivation(Rule.TOP, g, s, s)
        case FreeVar():
            return Derivation(Rule.VAR, g, s, s)
        case Arrow(dom, cod):
            return Derivation(Rule.ARR, g, s, s, (_refl(g, dom), _refl(g, cod)))
        case Forall(bound, body):
            w = witness_for(g, body)
            opened = open_ty(body, w)
            premises = (_refl(g, bound), _refl(g.extend(w, bound), opened))
            return Derivation(Rule.ALL, g, s, s, premises, witness=w)
    raise PreconditionError(f"not a type: {s!r}")


def derive_permute(d: Derivation, pi: tuple[int, ...]) -> Derivation:
    """Reorder the root environment of `d` by `pi` (new declaration i is old
    declaration pi[i]) and rebuild the tree over the permuted environment.

    The permuted environment must itself be ok; reordering dependent bindings
    is rejected.  Extensions introduced at quantifier nodes ride on top of the
    permutation unchanged."""
    _require_valid(d, "derivation")
    decls = d.env.decls()
    if sorted(pi) != list(range(len(decls))):
        raise PreconditionError(f"not a permutation of {len(decls)} positions: {pi!r}")
    permuted = Env.from_decls(decls[i] for i in pi)
    if not ok(permuted):
        raise PreconditionError("permuted environment is not ok")
    return _rebuild_env(d, d.env, permuted)


def _rebuild_env(d: Derivation, old: Env, new: Env) -> Derivation:
    # Replace environment `old` by `new` throughout; both declare the same
    # names, and lookups agree because ok environments have unique names, so
    # every side condition survives.
    if d.env != old:
        raise InternalCheckError("derivation environment does not match its parent")
    premises = d.premises
    if d.rule == Rule.ALL:
        assert d.witness is not None and isinstance(d.rhs, Forall)
        ext_old = old.extend(d.witness, d.rhs.bound)
        ext_new = new.extend(d.witness, d.rhs.bound)
        premises = (
            _rebuild_env(premises[0], old, new),
            _rebuild_env(premises[1], ext_old, ext_new),
        )
    else:
        premises = tuple(_rebuild_env(p, old, new) for p in premises)
    return Derivation(d.rule, new, d.lhs, d.rhs, premises, d.witness)


def derive_weaken(d: Derivation, delta: Env) -> Derivation:
    """Append the bindings of `delta` (as the newer part) to the environment of
    `d`, producing a derivation of the same subtyping over the longer
    environment.  Requires the combined environment to be ok.

    A binding introduced at a quantifier node must end up newer than `delta`:
    the subtree is weakened as-is and the binding is then moved past `delta`
    with `derive_permute`, re-freshening the witness first when it collides
    with a name of `delta`."""
    _require_valid(d, "derivation")
    combined = env_concat(d.env, delta)
    if not ok(combined):
        raise PreconditionError("weakened environment is not ok")
    return _weaken(d, delta)


def _weaken(d: Derivation, delta: Env) -> Derivation:
    new_env = env_concat(d.env, delta)
    if d.rule in (Rule.TOP, Rule.VAR):
        return Derivation(d.rule, new_env, d.lhs, d.rhs)
    if d.rule == Rule.TRS:
        return Derivation(d.rule, new_env, d.lhs, d.rhs, (_weaken(d.premises[0], delta),))
    if d.rule == Rule.ARR:
        premises = tuple(_weaken(p, delta) for p in d.premises)
        return Derivation(d.rule, new_env, d.lhs, d.rhs, premises)
    if d.rule == Rule.ALL:
        node = d
        assert node.witness is not None
        if not gfresh(new_env, node.witness):
            avoid = names_in_derivation(node) | names_in_env(new_env)
            node = replace_witness(node, fresh(avoid))
        w = node.witness
        assert w is not None
        p_bound = _weaken(node.premises[0], delta)
        p_body = _weaken(node.premises[1], delta)
        # p_body's environment now reads (prefix, witness, delta); rotate the
        # witness binding to the newest position.
        m = len(d.env)
        k = len(delta)
        pi = tuple(range(m)) + tuple(range(m + 1, m + 1 + k)) + (m,)
        p_body = derive_permute(p_body, pi)
        return Derivation(Rule.ALL, new_env, node.lhs, node.rhs, (p_bound, p_body), witness=w)
    raise InternalCheckError(f"unexpected rule: {d.rule}")


@dataclass(frozen=True, slots=True)
class EnvSplit:
    """An environment cut at one pivot binding: prefix (older), the pivot, and
    suffix (newer).  `assemble` reconstitutes it, optionally with a different
    pivot bound."""

    prefix: Env
    pivot_var: VarName
    pivot_bound: Ty
    suffix: Env

    def assemble(self, bound: Optional[Ty] = None) -> Env:
        if bound is None:
            bound = self.pivot_bound
        return Env(self.suffix.bindings + ((self.pivot_var, bound),) + self.prefix.bindings)

    def extend_suffix(self, name: VarName, bound: Ty) -> "EnvSplit":
        return EnvSplit(self.prefix, self.pivot_var, self.pivot_bound, self.suffix.extend(name, bound))


def split_env(g: Env, x: VarName) -> EnvSplit:
    """Split `g` at the most recent binding of `x`."""
    for i, (name, bound) in enumerate(g.bindings):
        if name == x:
            return EnvSplit(
                prefix=Env(g.bindings[i + 1 :]),
                pivot_var=x,
                pivot_bound=bound,
                suffix=Env(g.bindings[:i]),
            )
    raise PreconditionError(f"variable {x!r} is not declared")


def ok_narrow(split: EnvSplit, p: Ty, d_pq: Derivation) -> bool:
    """Replacing the pivot bound by `p` keeps the environment ok, given a
    derivation that `p` is below the old bound over the prefix."""
    _require_valid(d_pq, "evidence derivation")
    if not ok(split.assemble()):
        raise PreconditionError("split environment is not ok")
    if d_pq.concl != (split.prefix, p, split.pivot_bound):
        raise PreconditionError(
            "evidence must conclude the new bound below the old bound over the prefix"
        )
    narrowed_ok = ok(split.assemble(p))
    if not narrowed_ok:
        raise InternalCheckError("narrowed environment failed the ok check")
    return narrowed_ok


def derive_trans(d1: Derivation, d2: Derivation) -> Derivation:
    """Compose `d1 : g |- s <: q` and `d2 : g |- q <: t` into `g |- s <: t`."""
    _require_valid(d1, "left derivation")
    _require_valid(d2, "right derivation")
    if d1.env != d2.env:
        raise PreconditionError("derivations have different environments")
    if d1.rhs != d2.lhs:
        raise PreconditionError("middle types differ")
    return _trans(d1, d2, None)


def _trans(d1: Derivation, d2: Derivation, parent: Optional[Measure]) -> Derivation:
    q = d1.rhs
    measure = _step(parent, (size(q), _TRANS_RANK, derivation_height(d1)))
    g = d1.env

    if isinstance(q, Top):
        # d2 can only end in the Top rule, so t = Top and the left side is
        # closed by d1's own leaf obligations.
        return Derivation(Rule.TOP, g, d1.lhs, d2.rhs)
    if d1.rule == Rule.VAR:
        return d2
    if d1.rule == Rule.TRS:
        inner = _trans(d1.premises[0], d2, measure)
        return Derivation(Rule.TRS, g, d1.lhs, d2.rhs, (inner,))
    if d2.rule == Rule.TOP:
        return Derivation(Rule.TOP, g, d1.lhs, d2.rhs)

    if d1.rule == Rule.ARR and d2.rule == Rule.ARR:
        a_dom, a_cod = d1.premises
        b_dom, b_cod = d2.premises
        p_dom = _trans(b_dom, a_dom, measure)
        p_cod = _trans(a_cod, b_cod, measure)
        return Derivation(Rule.ARR, g, d1.lhs, d2.rhs, (p_dom, p_cod))

    if d1.rule == Rule.ALL and d2.rule == Rule.ALL:
        assert isinstance(q, Forall) and isinstance(d2.rhs, Forall)
        b_bound, _ = d2.premises
        a_bound, _ = d1.premises
        p_bound = _trans(b_bound, a_bound, measure)
        # Harmonize both body premises on one witness, move the left body
        # premise from the middle bound to the right bound, then compose.
        w = fresh(
            names_in_derivation(d1) | names_in_derivation(d2) | names_in_env(g)
        )
        a_body = replace_witness(d1, w).premises[1]
        b_body = replace_witness(d2, w).premises[1]
        split = EnvSplit(g, w, q.bound, Env())
        a_body = _narrow(split, d2.rhs.bound, a_body, b_bound, measure)
        p_body = _trans(a_body, b_body, measure)
        return Derivation(Rule.ALL, g, d1.lhs, d2.rhs, (p_bound, p_body), witness=w)

    raise InternalCheckError(
        f"no composition case for rules {d1.rule.value!r} and {d2.rule.value!r}"
    )


def derive_narrow(split: EnvSplit, p: Ty, d: Derivation, d_pq: Derivation) -> Derivation:
    """Rebuild `d` over the environment with the pivot bound replaced by `p`,
    given evidence `d_pq : prefix |- p <: old bound`."""
    _require_valid(d, "derivation")
    ok_narrow(split, p, d_pq)
    if d.env != split.assemble():
        raise PreconditionError("derivation environment does not match the split")
    return _narrow(split, p, d, d_pq, None)


def _narrow(
    split: EnvSplit, p: Ty, d: Derivation, d_pq: Derivation, parent: Optional[Measure]
) -> Derivation:
    measure = _step(parent, (size(split.pivot_bound), _NARROW_RANK, derivation_height(d)))
    new_env = split.assemble(p)

    if d.rule in (Rule.TOP, Rule.VAR):
        # Domains coincide, so closedness and presence are unaffected; the
        # narrowed environment is ok by ok_narrow.
        return Derivation(d.rule, new_env, d.lhs, d.rhs)

    if d.rule == Rule.ARR:
        premises = tuple(_narrow(split, p, prem, d_pq, measure) for prem in d.premises)
        return Derivation(Rule.ARR, new_env, d.lhs, d.rhs, premises)

    if d.rule == Rule.ALL:
        # The witness binding lands in the suffix: it sits to the right of the
        # pivot, so the same split (with a longer suffix) narrows the body.
        assert d.witness is not None and isinstance(d.rhs, Forall)
        inner = split.extend_suffix(d.witness, d.rhs.bound)
        p_bound = _narrow(split, p, d.premises[0], d_pq, measure)
        p_body = _narrow(inner, p, d.premises[1], d_pq, measure)
        return Derivation(Rule.ALL, new_env, d.lhs, d.rhs, (p_bound, p_body), witness=d.witness)

    if d.rule == Rule.TRS:
        assert isinstance(d.lhs, FreeVar)
        name = d.lhs.name
        if name != split.pivot_var:
            premise = _narrow(split, p, d.premises[0], d_pq, measure)
            return Derivation(Rule.TRS, new_env, d.lhs, d.rhs, (premise,))
        # Chaining through the pivot itself: the old chain went through the old
        # bound q; narrow its premise, re-derive p <: q over the narrowed
        # environment by weakening, and compose at q before chaining at p.
        assert d.premises[0].lhs == split.pivot_bound
        narrowed = _narrow(split, p, d.premises[0], d_pq, measure)
        extension = Env(split.suffix.bindings + ((split.pivot_var, p),))
        widened = derive_weaken(d_pq, extension)
        composed = _trans(widened, narrowed, measure)
        return Derivation(Rule.TRS, new_env, d.lhs, d.rhs, (composed,))

    raise InternalCheckError(f"unexpected rule: {d.rule}")


def derivation_env_facts(
    d: Derivation,
) -> tuple[dict[tuple[int, ...], bool], dict[tuple[int, ...], bool]]:
    """Recompute, for every node, whether its environment is ok and whether both
    conclusion sides are closed in it.  Returns the two maps keyed by node path;
    any false entry is a checker bug and raises."""
    _require_valid(d, "derivation")
    ok_map: dict[tuple[int, ...], bool] = {}
    closed_map: dict[tuple[int, ...], bool] = {}
    for path, node in iter_nodes(d):
        ok_map[path] = ok(node.env)
        closed_map[path] = closed(node.lhs, node.env) and closed(node.rhs, node.env)
        if not (ok_map[path] and closed_map[path]):
            raise InternalCheckError(
                f"valid derivation with bad node facts at {'.'.join(map(str, path)) or 'root'}"
            )
    return ok_map, closed_map

"""Seeded generation of environments, types, and derivations, plus exhaustive
enumeration of small instances.

Randomness comes from SplitMix64, a tiny splittable 64-bit generator: the state
advances by the golden-gamma constant and each output is a finalizer mix of the
state.  It is trivial to reimplement bit-for-bit in any language, so corpora are
reproducible across implementations.  Every generator is a pure function of its
config; streams derive one child seed per element, so samples are independent
of each other's internals.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterator, Optional

from .errors import PreconditionError
from .judgments import Env, closed, fresh_for_env, lookup, ok
from .metatheory import EnvSplit, derive_refl
from .subtyper import (
    Derivation,
    Rule,
    Yes,
    decide_sub,
    derivation_height,
    witness_for,
)
from .syntax import Arrow, Forall, FreeVar, Top, Ty, VarName, close_ty, fresh, fv, open_ty, size

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """SplitMix64: state += gamma; output = mix(state).  `split` derives an
    independent child generator from the next output."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError(f"below() needs a positive bound, got {n}")
        return self.next_u64() % n

    def choose(self, items: list) -> object:
        return items[self.below(len(items))]

    def chance(self, num: int, den: int) -> bool:
        """True with probability num/den."""
        return self.below(den) < num


@dataclass(frozen=True, slots=True)
class GenConfig:
    """Bounds for one generated sample.  `seed` fully determines the output."""

    seed: int
    max_env_len: int = 4
    max_ty_size: int = 8
    max_deriv_depth: int = 4

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= _MASK:
            raise PreconditionError("seed must fit in 64 bits")
        # A zero-length environment bound is meaningful; the other bounds must
        # leave room for at least a leaf / a leaf rule.
        if self.max_env_len < 0 or self.max_ty_size < 1 or self.max_deriv_depth < 1:
            raise PreconditionError(f"bounds out of range: {self}")


def child_seeds(seed: int, count: int) -> list[int]:
    """`count` independent seeds derived from `seed`."""
    rng = SplitMix64(seed)
    return [rng.next_u64() for _ in range(count)]


# ---------------------------------------------------------------- generators


_W_TOP, _W_VAR, _W_ARROW, _W_ALL = 20, 30, 25, 25


def _gen_ty(g: Env, budget: int, rng: SplitMix64) -> Ty:
    # Weighted constructor choice, restricted to what the env and budget allow.
    choices: list[tuple[int, str]] = [(_W_TOP, "top")]
    if len(g) > 0:
        choices.append((_W_VAR, "var"))
    if budget >= 3:
        choices.append((_W_ARROW, "arrow"))
        choices.append((_W_ALL, "all"))
    total = sum(w for w, _ in choices)
    roll = rng.below(total)
    kind = "top"
    for weight, name in choices:
        if roll < weight:
            kind = name
            break
        roll -= weight

    if kind == "top":
        return Top()
    if kind == "var":
        names = [name for name, _ in g.decls()]
        return FreeVar(names[rng.below(len(names))])
    if kind == "arrow":
        left = 1 + rng.below(budget - 2)
        dom = _gen_ty(g, left, rng)
        cod = _gen_ty(g, budget - 1 - size(dom), rng)
        return Arrow(dom, cod)
    bound_budget = 1 + rng.below(budget - 2)
    bound = _gen_ty(g, bound_budget, rng)
    binder = fresh_for_env(g)
    body = _gen_ty(g.extend(binder, bound), budget - 1 - size(bound), rng)
    return Forall(bound, close_ty(body, binder))


def gen_closed_ty(g: Env, cfg: GenConfig) -> Ty:
    """A type closed in `g`, of size at most `cfg.max_ty_size`."""
    return _gen_ty(g, cfg.max_ty_size, SplitMix64(cfg.seed))


def _gen_env(rng: SplitMix64, length: int, ty_budget: int, base: Env = Env()) -> Env:
    g = base
    for _ in range(length):
        bound = _gen_ty(g, ty_budget, rng)
        g = g.extend(fresh_for_env(g), bound)
    return g


def gen_env(cfg: GenConfig) -> Env:
    """An ok environment of length at most `cfg.max_env_len`, built incrementally:
    each bound is closed in the bindings before it, each name is `fresh_for_env`."""
    rng = SplitMix64(cfg.seed)
    length = rng.below(cfg.max_env_len + 1)
    return _gen_env(rng, length, cfg.max_ty_size)


def gen_env_extension(g: Env, cfg: GenConfig) -> Env:
    """An extension delta such that `env_concat(g, delta)` is ok."""
    rng = SplitMix64(cfg.seed)
    length = rng.below(cfg.max_env_len + 1)
    extended = _gen_env(rng, length, cfg.max_ty_size, base=g)
    return Env(extended.bindings[: len(extended) - len(g)])


def _synth_sub_of(g: Env, target: Ty, depth: int, rng: SplitMix64) -> Derivation:
    # A derivation g |- S <: target for some synthesized S.
    if depth <= 0:
        return derive_refl(g, target)
    options = ["refl", "refl"]
    if isinstance(target, Top):
        options += ["top", "top", "top"]
    if isinstance(target, (Arrow, Forall)):
        options += ["structural", "structural", "structural"]
    chains = _chain_candidates(g, target, rng)
    if chains:
        options += ["chain", "chain", "chain"]
    kind = rng.choose(options)

    if kind == "top":
        s = _gen_ty(g, 1 + rng.below(6), rng)
        return Derivation(Rule.TOP, g, s, Top())
    if kind == "chain":
        name, evidence = chains[rng.below(len(chains))]
        return Derivation(Rule.TRS, g, FreeVar(name), target, (evidence,))
    if kind == "structural" and isinstance(target, Arrow):
        p_dom = _synth_sup_of(g, target.dom, depth - 1, rng)
        p_cod = _synth_sub_of(g, target.cod, depth - 1, rng)
        s = Arrow(p_dom.rhs, p_cod.lhs)
        return Derivation(Rule.ARR, g, s, target, (p_dom, p_cod))
    if kind == "structural" and isinstance(target, Forall):
        p_bound = _synth_sup_of(g, target.bound, depth - 1, rng)
        w = witness_for(g, target.body, p_bound.rhs)
        inner = g.extend(w, target.bound)
        p_body = _synth_sub_of(inner, open_ty(target.body, w), depth - 1, rng)
        s = Forall(p_bound.rhs, close_ty(p_body.lhs, w))
        return Derivation(Rule.ALL, g, s, target, (p_bound, p_body), witness=w)
    return derive_refl(g, target)


def _synth_sup_of(g: Env, source: Ty, depth: int, rng: SplitMix64) -> Derivation:
    # A derivation g |- source <: T for some synthesized T.
    if depth <= 0:
        return derive_refl(g, source)
    options = ["refl", "refl", "top", "top"]
    if isinstance(source, FreeVar):
        options += ["chain", "chain", "chain"]
    if isinstance(source, (Arrow, Forall)):
        options += ["structural", "structural", "structural"]
    kind = rng.choose(options)

    if kind == "top":
        return Derivation(Rule.TOP, g, source, Top())
    if kind == "chain" and isinstance(source, FreeVar):
        bound = lookup(g, source.name)
        assert bound is not None
        premise = _synth_sup_of(g, bound, depth - 1, rng)
        return Derivation(Rule.TRS, g, source, premise.rhs, (premise,))
    if kind == "structural" and isinstance(source, Arrow):
        p_dom = _synth_sub_of(g, source.dom, depth - 1, rng)
        p_cod = _synth_sup_of(g, source.cod, depth - 1, rng)
        t = Arrow(p_dom.lhs, p_cod.rhs)
        return Derivation(Rule.ARR, g, source, t, (p_dom, p_cod))
    if kind == "structural" and isinstance(source, Forall):
        p_bound = _synth_sub_of(g, source.bound, depth - 1, rng)
        t_bound = p_bound.lhs
        w = witness_for(g, source.body, t_bound)
        inner = g.extend(w, t_bound)
        p_body = _synth_sup_of(inner, open_ty(source.body, w), depth - 1, rng)
        t = Forall(t_bound, close_ty(p_body.rhs, w))
        return Derivation(Rule.ALL, g, source, t, (p_bound, p_body), witness=w)
    return derive_refl(g, source)


def _chain_candidates(
    g: Env, target: Ty, rng: SplitMix64
) -> list[tuple[VarName, Derivation]]:
    # Variables whose declared bound provably sits below the target; each comes
    # with the decision procedure's derivation as the chain premise.
    found: list[tuple[VarName, Derivation]] = []
    for name, bound in g.decls():
        if FreeVar(name) == target:
            continue
        res = decide_sub(g, bound, target, fuel=300)
        if isinstance(res, Yes):
            found.append((name, res.derivation))
    return found


def gen_derivation(cfg: GenConfig) -> Derivation:
    """A checker-valid derivation over a generated environment."""
    rng = SplitMix64(cfg.seed)
    g = _gen_env(rng.split(), rng.below(cfg.max_env_len + 1), cfg.max_ty_size)
    anchor = _gen_ty(g, cfg.max_ty_size, rng)
    if rng.chance(1, 2):
        return _synth_sub_of(g, anchor, cfg.max_deriv_depth, rng)
    return _synth_sup_of(g, anchor, cfg.max_deriv_depth, rng)


def gen_derivation_pair(cfg: GenConfig) -> tuple[Derivation, Derivation]:
    """Two derivations `g |- S <: Q` and `g |- Q <: T` sharing `g` and `Q`."""
    rng = SplitMix64(cfg.seed)
    g = _gen_env(rng.split(), rng.below(cfg.max_env_len + 1), cfg.max_ty_size)
    q = _gen_ty(g, cfg.max_ty_size, rng)
    left = _synth_sub_of(g, q, cfg.max_deriv_depth, rng)
    right = _synth_sup_of(g, q, cfg.max_deriv_depth, rng)
    return left, right


def gen_refl_case(cfg: GenConfig) -> tuple[Env, Ty]:
    """An ok environment together with a type closed in it."""
    rng = SplitMix64(cfg.seed)
    g = _gen_env(rng.split(), rng.below(cfg.max_env_len + 1), cfg.max_ty_size)
    return g, _gen_ty(g, cfg.max_ty_size, rng)


def gen_narrow_instance(
    cfg: GenConfig, force_pivot_chain: bool = False
) -> tuple[EnvSplit, Ty, Derivation, Derivation]:
    """A narrowing problem: a split environment, a new pivot bound `p`, a
    derivation over the split environment, and evidence `prefix |- p <: old
    bound`.  With `force_pivot_chain`, the derivation ends in a bound-chaining
    node at the pivot variable itself."""
    rng = SplitMix64(cfg.seed)
    g = _gen_env(rng.split(), 1 + rng.below(max(cfg.max_env_len, 1)), cfg.max_ty_size)
    decls = g.decls()
    pivot_pos = rng.below(len(decls))
    pivot_var, pivot_bound = decls[pivot_pos]
    split = EnvSplit(
        prefix=Env.from_decls(decls[:pivot_pos]),
        pivot_var=pivot_var,
        pivot_bound=pivot_bound,
        suffix=Env.from_decls(decls[pivot_pos + 1 :]),
    )
    d_pq = _synth_sub_of(split.prefix, pivot_bound, cfg.max_deriv_depth, rng)
    p = d_pq.lhs
    if force_pivot_chain:
        premise = _synth_sup_of(g, pivot_bound, cfg.max_deriv_depth, rng)
        d = Derivation(Rule.TRS, g, FreeVar(pivot_var), premise.rhs, (premise,))
    else:
        anchor = _gen_ty(g, cfg.max_ty_size, rng)
        if rng.chance(1, 2):
            d = _synth_sub_of(g, anchor, cfg.max_deriv_depth, rng)
        else:
            d = _synth_sup_of(g, anchor, cfg.max_deriv_depth, rng)
    return split, p, d, d_pq


# ---------------------------------------------------------------- shrinking


def shrink_env(g: Env) -> Iterator[Env]:
    """Smaller ok environments: drop a binding no later bound depends on, or
    blunt a bound to Top."""
    decls = g.decls()
    for i, (name, _) in enumerate(decls):
        used_later = any(name in fv(b) for _, b in decls[i + 1 :])
        if not used_later:
            yield Env.from_decls(decls[:i] + decls[i + 1 :])
    for i, (name, bound) in enumerate(decls):
        if size(bound) > 1:
            yield Env.from_decls(decls[:i] + ((name, Top()),) + decls[i + 1 :])


def shrink_ty(t: Ty, g: Env = Env()) -> Iterator[Ty]:
    """Strictly smaller types still closed in `g`."""
    if size(t) > 1:
        yield Top()
    match t:
        case Arrow(dom, cod):
            yield dom
            yield cod
            for d2 in shrink_ty(dom, g):
                yield Arrow(d2, cod)
            for c2 in shrink_ty(cod, g):
                yield Arrow(dom, c2)
        case Forall(bound, body):
            yield bound
            for b2 in shrink_ty(bound, g):
                yield Forall(b2, body)
            opener = fresh(fv(bound) | fv(body) | {name for name, _ in g.bindings})
            inner = g.extend(opener, bound)
            for s2 in shrink_ty(open_ty(body, opener), inner):
                yield Forall(bound, close_ty(s2, opener))


def shrink_derivation(d: Derivation) -> Iterator[Derivation]:
    """Valid subderivations, shallowest first; every premise of a valid tree is
    itself a valid tree over its own environment."""
    for p in d.premises:
        yield p
    for p in d.premises:
        yield from shrink_derivation(p)


def shrink(value: object, g: Env = Env()) -> Iterator[object]:
    """Dispatch to the matching shrinker; the stream is finite and each
    candidate is strictly smaller by the matching measure."""
    if isinstance(value, Env):
        return shrink_env(value)
    if isinstance(value, Ty):
        return shrink_ty(value, g)
    if isinstance(value, Derivation):
        return shrink_derivation(value)
    raise PreconditionError(f"cannot shrink a {type(value).__name__}")


# ---------------------------------------------------------------- enumeration


def enumerate_types(names: list[VarName], max_size: int) -> list[Ty]:
    """All types of exact sizes 1..max_size whose free variables are among
    `names`.  Quantifier bodies are enumerated opened with a fresh name per
    nesting level and closed again, which reaches every abstraction exactly
    once."""
    memo: dict[tuple[int, tuple[VarName, ...]], list[Ty]] = {}

    def of_size(n: int, allowed: tuple[VarName, ...]) -> list[Ty]:
        key = (n, allowed)
        if key in memo:
            return memo[key]
        out: list[Ty] = []
        if n == 1:
            out.append(Top())
            out.extend(FreeVar(v) for v in allowed)
        else:
            for left in range(1, n - 1):
                for d in of_size(left, allowed):
                    for c in of_size(n - 1 - left, allowed):
                        out.append(Arrow(d, c))
            opener = fresh(allowed)
            for b_size in range(1, n - 1):
                for bound in of_size(b_size, allowed):
                    for body in of_size(n - 1 - b_size, allowed + (opener,)):
                        out.append(Forall(bound, close_ty(body, opener)))
        memo[key] = out
        return out

    result: list[Ty] = []
    for n in range(1, max_size + 1):
        result.extend(of_size(n, tuple(names)))
    return result


def enumerate_ok_envs(names: list[VarName], max_len: int, max_bound_size: int) -> list[Env]:
    """All ok environments of length <= max_len over distinct `names`, with
    bounds of size <= max_bound_size closed in their prefixes."""
    out: list[Env] = [Env()]
    frontier: list[Env] = [Env()]
    for _ in range(max_len):
        next_frontier: list[Env] = []
        for g in frontier:
            declared = [n for n, _ in g.decls()]
            for name in names:
                if name in declared:
                    continue
                for bound in enumerate_types(declared, max_bound_size):
                    extended = g.extend(name, bound)
                    next_frontier.append(extended)
        out.extend(next_frontier)
        frontier = next_frontier
    return out


def enumerate_judgments(
    names: list[VarName], max_size: int, max_env_len: int
) -> Iterator[tuple[Env, Ty, Ty]]:
    """Every judgment with an ok environment over `names` (length <= max_env_len)
    and both sides of size <= max_size closed in it."""
    for g in enumerate_ok_envs(names, max_env_len, max_size):
        declared = [n for n, _ in g.decls()]
        universe = enumerate_types(declared, max_size)
        for s in universe:
            for t in universe:
                yield g, s, t

"""Naive named-term model used as an independent oracle.

Terms here carry binder names everywhere, substitution renames binders to
dodge capture, and alpha-equivalence walks both terms with a correspondence
map. Nothing is shared with the package's representation: agreement between
the two is evidence, not tautology.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from fsub.syntax import Arrow, BoundIdx, Forall, FreeVar, Top, Ty


@dataclass(frozen=True)
class NTop:
    pass


@dataclass(frozen=True)
class NVar:
    name: str


@dataclass(frozen=True)
class NArr:
    dom: "NTy"
    cod: "NTy"


@dataclass(frozen=True)
class NAll:
    binder: str
    bound: "NTy"
    body: "NTy"


NTy = Union[NTop, NVar, NArr, NAll]


def named_fv(t: NTy) -> frozenset[str]:
    match t:
        case NTop():
            return frozenset()
        case NVar(name):
            return frozenset({name})
        case NArr(dom, cod):
            return named_fv(dom) | named_fv(cod)
        case NAll(binder, bound, body):
            return named_fv(bound) | (named_fv(body) - {binder})
    raise AssertionError(t)


def named_size(t: NTy) -> int:
    match t:
        case NTop() | NVar(_):
            return 1
        case NArr(dom, cod):
            return 1 + named_size(dom) + named_size(cod)
        case NAll(_, bound, body):
            return 1 + named_size(bound) + named_size(body)
    raise AssertionError(t)


def _fresh_name(avoid: frozenset[str]) -> str:
    n = 0
    while f"N{n}" in avoid:
        n += 1
    return f"N{n}"


def named_subst(t: NTy, old: str, new: str) -> NTy:
    """Rename free occurrences of old to new, renaming binders on capture."""
    match t:
        case NTop():
            return t
        case NVar(name):
            return NVar(new) if name == old else t
        case NArr(dom, cod):
            return NArr(named_subst(dom, old, new), named_subst(cod, old, new))
        case NAll(binder, bound, body):
            new_bound = named_subst(bound, old, new)
            if binder == old:
                return NAll(binder, new_bound, body)
            if binder == new and old in named_fv(body):
                away = _fresh_name(named_fv(body) | {old, new})
                body = named_subst(body, binder, away)
                binder = away
            return NAll(binder, new_bound, named_subst(body, old, new))
    raise AssertionError(t)


def named_alpha_eq(s: NTy, t: NTy, pairs: tuple[tuple[str, str], ...] = ()) -> bool:
    match s, t:
        case NTop(), NTop():
            return True
        case NVar(a), NVar(b):
            for left, right in reversed(pairs):
                if left == a or right == b:
                    return left == a and right == b
            return a == b
        case NArr(d1, c1), NArr(d2, c2):
            return named_alpha_eq(d1, d2, pairs) and named_alpha_eq(c1, c2, pairs)
        case NAll(x, b1, t1), NAll(y, b2, t2):
            return named_alpha_eq(b1, b2, pairs) and named_alpha_eq(
                t1, t2, pairs + ((x, y),)
            )
    return False


def to_ln(t: NTy, scope: tuple[str, ...] = ()) -> Ty:
    """Independent conversion into the package representation.

    scope holds enclosing binder names, innermost last.
    """
    match t:
        case NTop():
            return Top()
        case NVar(name):
            for depth, binder in enumerate(reversed(scope)):
                if binder == name:
                    return BoundIdx(depth)
            return FreeVar(name)
        case NArr(dom, cod):
            return Arrow(to_ln(dom, scope), to_ln(cod, scope))
        case NAll(binder, bound, body):
            return Forall(to_ln(bound, scope), to_ln(body, scope + (binder,)))
    raise AssertionError(t)

"""Hypothesis strategies shared across test modules."""

from __future__ import annotations

from hypothesis import strategies as st

from fsub.gen import GenConfig, gen_closed_ty, gen_env
from fsub.judgments import Env
from fsub.syntax import Ty
from naive import NAll, NArr, NTop, NTy, NVar

NAME_POOL = ("X", "Y", "Z", "X'", "A")

var_names = st.sampled_from(NAME_POOL)


def named_types(max_depth: int = 4) -> st.SearchStrategy[NTy]:
    base = st.one_of(st.just(NTop()), st.builds(NVar, var_names))
    return st.recursive(
        base,
        lambda inner: st.one_of(
            st.builds(NArr, inner, inner),
            st.builds(NAll, var_names, inner, inner),
        ),
        max_leaves=2 ** max_depth,
    )


seeds = st.integers(min_value=0, max_value=(1 << 64) - 1)


@st.composite
def ok_envs(draw: st.DrawFn, max_len: int = 4, max_size: int = 6) -> Env:
    seed = draw(seeds)
    return gen_env(GenConfig(seed=seed, max_env_len=max_len, max_ty_size=max_size))


@st.composite
def envs_with_closed_ty(
    draw: st.DrawFn, max_len: int = 4, max_size: int = 8
) -> tuple[Env, Ty]:
    seed = draw(seeds)
    g = gen_env(GenConfig(seed=seed, max_env_len=max_len, max_ty_size=max_size))
    t = gen_closed_ty(g, GenConfig(seed=seed ^ 0xA5A5A5A5, max_ty_size=max_size))
    return g, t

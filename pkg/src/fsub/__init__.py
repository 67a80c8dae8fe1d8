"""Subtyping kernel for the pure type language of F-sub.

The package decides bounded-quantification subtyping with an explicit fuel
budget, emits derivation trees that an independent checker validates, and
implements reflexivity, permutation, weakening, transitivity, and narrowing
as total functions from checkable derivations to checkable derivations.
"""

from .errors import InternalCheckError, KernelError, MalformedTypeError, PreconditionError
from .gen import (
    GenConfig,
    SplitMix64,
    child_seeds,
    enumerate_judgments,
    enumerate_ok_envs,
    enumerate_types,
    gen_closed_ty,
    gen_derivation,
    gen_derivation_pair,
    gen_env,
    gen_env_extension,
    gen_narrow_instance,
    gen_refl_case,
    shrink,
)
from .judgments import (
    EMPTY_ENV,
    Env,
    closed,
    dom,
    env_concat,
    fresh_for_env,
    gfresh,
    lookup,
    ok,
)
from .metatheory import (
    EnvSplit,
    derivation_env_facts,
    derive_narrow,
    derive_permute,
    derive_refl,
    derive_trans,
    derive_weaken,
    ok_narrow,
    split_env,
)
from .parser import (
    ParseError,
    SourceJudgment,
    parse_env,
    parse_judgment,
    parse_type,
    print_env,
    print_judgment,
    print_type,
    scan_judgment,
)
from .subtyper import (
    DEFAULT_FUEL,
    DeclarativeSearch,
    Derivation,
    No,
    Rule,
    SubResult,
    Unknown,
    Yes,
    check_derivation,
    check_derivation_implicit,
    decide_sub,
    decide_sub_declarative,
    derivation_from_json,
    derivation_height,
    derivation_to_json,
    derivation_to_text,
    diagnose_derivation,
    diagnose_derivation_implicit,
    to_explicit,
    to_implicit,
)
from .syntax import (
    Arrow,
    BoundIdx,
    Forall,
    FreeVar,
    Top,
    Ty,
    alpha_eq,
    close_ty,
    fresh,
    fv,
    is_locally_closed,
    open_ty,
    size,
    subst_var,
)

__all__ = [
    "Arrow",
    "BoundIdx",
    "DeclarativeSearch",
    "DEFAULT_FUEL",
    "Derivation",
    "EMPTY_ENV",
    "Env",
    "EnvSplit",
    "Forall",
    "FreeVar",
    "GenConfig",
    "InternalCheckError",
    "KernelError",
    "MalformedTypeError",
    "No",
    "ParseError",
    "PreconditionError",
    "Rule",
    "SourceJudgment",
    "SplitMix64",
    "SubResult",
    "Top",
    "Ty",
    "Unknown",
    "Yes",
    "alpha_eq",
    "check_derivation",
    "check_derivation_implicit",
    "child_seeds",
    "close_ty",
    "closed",
    "decide_sub",
    "decide_sub_declarative",
    "derivation_env_facts",
    "derivation_from_json",
    "derivation_height",
    "derivation_to_json",
    "derivation_to_text",
    "derive_narrow",
    "derive_permute",
    "derive_refl",
    "derive_trans",
    "derive_weaken",
    "diagnose_derivation",
    "diagnose_derivation_implicit",
    "dom",
    "enumerate_judgments",
    "enumerate_ok_envs",
    "enumerate_types",
    "env_concat",
    "fresh",
    "fresh_for_env",
    "fv",
    "gen_closed_ty",
    "gen_derivation",
    "gen_derivation_pair",
    "gen_env",
    "gen_env_extension",
    "gen_narrow_instance",
    "gen_refl_case",
    "gfresh",
    "is_locally_closed",
    "lookup",
    "ok",
    "ok_narrow",
    "open_ty",
    "parse_env",
    "parse_judgment",
    "parse_type",
    "print_env",
    "print_judgment",
    "print_type",
    "scan_judgment",
    "shrink",
    "size",
    "split_env",
    "subst_var",
    "to_explicit",
    "to_implicit",
]

"""The five derivation transformers and the facts extractor.

Every transformer's output goes back through check_derivation, and for
trans/narrow the decision procedure independently confirms the conclusion.
"""

import pytest
from hypothesis import given, settings

from fsub.errors import InternalCheckError, PreconditionError
from fsub.gen import GenConfig, gen_derivation, gen_derivation_pair, gen_narrow_instance
from fsub.judgments import EMPTY_ENV, Env, dom, lookup, ok
from fsub.metatheory import (
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
from fsub.parser import parse_env, parse_judgment, parse_type
from fsub.subtyper import (
    Derivation,
    Rule,
    Yes,
    check_derivation,
    decide_sub,
    derivation_height,
    iter_nodes,
)
from fsub.syntax import FreeVar, Top, size
from strategies import seeds


def decide_yes(text: str) -> Derivation:
    g, lhs, rhs = parse_judgment(text)
    result = decide_sub(g, lhs, rhs)
    assert isinstance(result, Yes), result
    return result.derivation


def confirms(d: Derivation) -> bool:
    g, lhs, rhs = d.concl
    return check_derivation(d) and isinstance(decide_sub(g, lhs, rhs), Yes)


class TestRefl:
    def test_top(self):
        d = derive_refl(EMPTY_ENV, Top())
        assert d == Derivation(Rule.TOP, EMPTY_ENV, Top(), Top())

    def test_variable(self):
        g = parse_env("X <: Top")
        d = derive_refl(g, FreeVar("X"))
        assert d.rule == Rule.VAR
        assert check_derivation(d)

    def test_quantifier(self):
        t = parse_type("All X <: Top . X -> X")
        d = derive_refl(EMPTY_ENV, t)
        assert check_derivation(d)
        assert d.rule == Rule.ALL
        assert derivation_height(d) == 3

    def test_rejects_bad_env(self):
        with pytest.raises(PreconditionError):
            derive_refl(parse_env("X <: Y"), Top())

    def test_rejects_unclosed_type(self):
        with pytest.raises(PreconditionError):
            derive_refl(EMPTY_ENV, FreeVar("X"))

    @given(seeds)
    def test_generated(self, seed):
        cfg = GenConfig(seed=seed, max_ty_size=12, max_env_len=6)
        from fsub.gen import gen_refl_case

        g, t = gen_refl_case(cfg)
        d = derive_refl(g, t)
        assert check_derivation(d)
        assert d.concl == (g, t, t)
        assert derivation_height(d) <= size(t)
        assert isinstance(decide_sub(g, t, t), Yes)


class TestPermute:
    def test_identity(self):
        d = decide_yes("X <: Top, Y <: X |- Y <: X")
        assert derive_permute(d, (0, 1)) == d

    def test_swap_independent(self):
        d = decide_yes("X <: Top, Z <: Top |- X <: Top")
        out = derive_permute(d, (1, 0))
        assert check_derivation(out)
        assert dom(out.env) == ["Z", "X"]

    def test_swap_dependent_rejected(self):
        d = decide_yes("X <: Top, Y <: X |- Y <: X")
        with pytest.raises(PreconditionError):
            derive_permute(d, (1, 0))

    def test_rejects_non_permutation(self):
        d = decide_yes("X <: Top |- X <: Top")
        with pytest.raises(PreconditionError):
            derive_permute(d, (0, 0))
        with pytest.raises(PreconditionError):
            derive_permute(d, (0, 1))

    def test_rejects_invalid_input(self):
        bad = Derivation(Rule.TOP, parse_env("X <: Y"), Top(), Top())
        with pytest.raises(PreconditionError):
            derive_permute(bad, (0,))

    def test_permutes_under_quantifier(self):
        d = decide_yes("X <: Top, Z <: Top |- All W <: X . W <: All W <: X . X")
        out = derive_permute(d, (1, 0))
        assert check_derivation(out)
        assert dom(out.env) == ["Z", "X"]


class TestWeaken:
    def test_empty_delta(self):
        d = decide_yes("X <: Top |- X <: Top")
        out = derive_weaken(d, EMPTY_ENV)
        assert out == d

    def test_single_binding(self):
        d = derive_refl(EMPTY_ENV, Top())
        out = derive_weaken(d, parse_env("X <: Top"))
        assert out == Derivation(Rule.TOP, parse_env("X <: Top"), Top(), Top())

    def test_delta_may_depend_on_g(self):
        d = decide_yes("X <: Top |- X <: Top")
        out = derive_weaken(d, Env.from_decls([("Y", FreeVar("X"))]))
        assert check_derivation(out)
        assert dom(out.env) == ["X", "Y"]

    def test_quantifier_node(self):
        d = decide_yes("|- All X <: Top . X <: All X <: Top . Top")
        delta = parse_env("Z <: Top")
        out = derive_weaken(d, delta)
        assert check_derivation(out)
        assert out.witness not in dom(delta)
        assert out.concl == (delta, d.lhs, d.rhs)

    def test_witness_collision_renames(self):
        d = decide_yes("|- All X <: Top . X <: All X <: Top . Top")
        delta = Env.from_decls([(d.witness, Top())])
        out = derive_weaken(d, delta)
        assert check_derivation(out)
        assert out.witness != d.witness

    def test_rejects_clashing_delta(self):
        d = decide_yes("X <: Top |- X <: Top")
        with pytest.raises(PreconditionError):
            derive_weaken(d, parse_env("X <: Top"))

    @given(seeds)
    @settings(max_examples=60)
    def test_generated(self, seed):
        from fsub.gen import gen_env_extension

        d = gen_derivation(GenConfig(seed=seed))
        delta = gen_env_extension(d.env, GenConfig(seed=seed ^ 0x1234, max_env_len=2))
        out = derive_weaken(d, delta)
        assert check_derivation(out)
        assert out.env.bindings == delta.bindings + d.env.bindings


class TestSplitAndOkNarrow:
    def test_split_round_trip(self):
        g = parse_env("A <: Top, X <: A, Z <: X")
        split = split_env(g, "X")
        assert split.pivot_var == "X"
        assert split.pivot_bound == FreeVar("A")
        assert dom(split.prefix) == ["A"]
        assert dom(split.suffix) == ["Z"]
        assert split.assemble() == g

    def test_split_absent_name(self):
        with pytest.raises(PreconditionError):
            split_env(parse_env("A <: Top"), "B")

    def test_identity_toplevel(self):
        g = parse_env("X <: Top")
        split = split_env(g, "X")
        d_pq = derive_refl(EMPTY_ENV, Top())
        assert ok_narrow(split, Top(), d_pq)

    def test_identity_narrowing(self):
        g = parse_env("A <: Top, X <: A")
        split = split_env(g, "X")
        d_pq = derive_refl(parse_env("A <: Top"), FreeVar("A"))
        assert ok_narrow(split, FreeVar("A"), d_pq)

    def test_with_suffix(self):
        g = parse_env("A <: Top, X <: Top, Z <: X")
        split = split_env(g, "X")
        d_pq = decide_yes("A <: Top |- A <: Top")
        assert ok_narrow(split, FreeVar("A"), d_pq)
        assert ok(split.assemble(FreeVar("A")))

    def test_rejects_evidence_over_wrong_env(self):
        g = parse_env("A <: Top, X <: Top")
        split = split_env(g, "X")
        d_pq = decide_yes("A <: Top, X <: Top |- A <: Top")
        with pytest.raises(PreconditionError):
            ok_narrow(split, FreeVar("A"), d_pq)


class TestTrans:
    def test_top_top(self):
        d = derive_refl(EMPTY_ENV, Top())
        assert derive_trans(d, d) == d

    def test_right_top_absorbs(self):
        d1 = decide_yes("X <: Top |- X <: Top")
        d2 = decide_yes("X <: Top |- Top <: Top")
        out = derive_trans(d1, d2)
        assert confirms(out)
        assert out.concl == d1.concl

    def test_arrow_middle(self):
        d1 = decide_yes("A <: Top |- Top -> A <: A -> Top")
        d2 = derive_refl(parse_env("A <: Top"), parse_type("A -> Top"))
        out = derive_trans(d1, d2)
        assert confirms(out)
        g, lhs, rhs = out.concl
        assert lhs == parse_type("Top -> A") and rhs == parse_type("A -> Top")

    def test_quantifier_middle(self):
        s = parse_type("All Y <: Top . Y")
        q = parse_type("All Y <: Top . Top")
        d1 = decide_sub(EMPTY_ENV, s, q).derivation
        d2 = derive_refl(EMPTY_ENV, q)
        out = derive_trans(d1, d2)
        assert confirms(out)
        assert out.rule == Rule.ALL
        assert out.concl == (EMPTY_ENV, s, q)

    def test_variable_left(self):
        d1 = decide_yes("X <: Top, Y <: X |- Y <: X")
        d2 = decide_yes("X <: Top, Y <: X |- X <: Top")
        out = derive_trans(d1, d2)
        assert confirms(out)
        assert out.concl == (d1.env, FreeVar("Y"), Top())

    def test_narrow_then_trans_path(self):
        # The right bound is strictly tighter than the middle one and the
        # left body chains through the witness, so composing the bodies
        # forces a genuine narrowing of the left premise first.
        s = parse_type("All Y <: (Top -> Top) . Y")
        q = parse_type("All Y <: (Top -> Top) . Top -> Top")
        t = parse_type("All Y <: (Top -> Top -> Top) . Top -> Top")
        d1 = decide_sub(EMPTY_ENV, s, q).derivation
        d2 = decide_sub(EMPTY_ENV, q, t).derivation
        assert d1.premises[1].rule == Rule.TRS
        out = derive_trans(d1, d2)
        assert confirms(out)
        assert out.concl == (EMPTY_ENV, s, t)

    def test_rejects_env_mismatch(self):
        d1 = derive_refl(parse_env("X <: Top"), Top())
        d2 = derive_refl(EMPTY_ENV, Top())
        with pytest.raises(PreconditionError):
            derive_trans(d1, d2)

    def test_rejects_middle_mismatch(self):
        d1 = decide_yes("X <: Top |- X <: Top")
        d2 = decide_yes("X <: Top |- X <: X")
        with pytest.raises(PreconditionError):
            derive_trans(d1, d2)

    @given(seeds)
    @settings(max_examples=100)
    def test_generated_pairs(self, seed):
        d1, d2 = gen_derivation_pair(GenConfig(seed=seed, max_deriv_depth=5))
        out = derive_trans(d1, d2)
        assert confirms(out)
        assert out.concl == (d1.env, d1.lhs, d2.rhs)


class TestNarrow:
    def test_identity(self):
        g = parse_env("A <: Top, X <: A")
        d = decide_yes("A <: Top, X <: A |- X <: Top")
        split = split_env(g, "X")
        d_pq = derive_refl(parse_env("A <: Top"), FreeVar("A"))
        out = derive_narrow(split, FreeVar("A"), d, d_pq)
        assert confirms(out)
        assert out.env == g

    def test_tightens_bound(self):
        g = parse_env("A <: Top, X <: Top")
        d = decide_yes("A <: Top, X <: Top |- X <: Top")
        split = split_env(g, "X")
        d_pq = decide_yes("A <: Top |- A <: Top")
        out = derive_narrow(split, FreeVar("A"), d, d_pq)
        assert confirms(out)
        assert lookup(out.env, "X") == FreeVar("A")
        assert (out.lhs, out.rhs) == (d.lhs, d.rhs)

    def test_pivot_chain_crosses_to_trans(self):
        g = parse_env("A <: Top, X <: Top")
        # trs at the pivot: X <: Top via its (old) bound.
        d = Derivation(
            Rule.TRS,
            g,
            FreeVar("X"),
            Top(),
            (Derivation(Rule.TOP, g, Top(), Top()),),
        )
        assert check_derivation(d)
        split = split_env(g, "X")
        d_pq = decide_yes("A <: Top |- A <: Top")
        out = derive_narrow(split, FreeVar("A"), d, d_pq)
        assert confirms(out)
        assert out.rule == Rule.TRS
        assert lookup(out.env, "X") == FreeVar("A")

    def test_quantifier_under_narrowing(self):
        g = parse_env("A <: Top, X <: Top")
        d = decide_yes("A <: Top, X <: Top |- All W <: X . W <: All W <: X . X")
        split = split_env(g, "X")
        d_pq = decide_yes("A <: Top |- A <: Top")
        out = derive_narrow(split, FreeVar("A"), d, d_pq)
        assert confirms(out)

    def test_suffix_preserved(self):
        g = parse_env("A <: Top, X <: Top, Z <: X")
        d = decide_yes("A <: Top, X <: Top, Z <: X |- Z <: Top")
        split = split_env(g, "X")
        d_pq = decide_yes("A <: Top |- A <: Top")
        out = derive_narrow(split, FreeVar("A"), d, d_pq)
        assert confirms(out)
        assert dom(out.env) == ["A", "X", "Z"]

    def test_rejects_mismatched_env(self):
        g = parse_env("A <: Top, X <: Top")
        d = decide_yes("A <: Top |- A <: Top")
        split = split_env(g, "X")
        d_pq = decide_yes("A <: Top |- A <: Top")
        with pytest.raises(PreconditionError):
            derive_narrow(split, FreeVar("A"), d, d_pq)

    @given(seeds)
    @settings(max_examples=60)
    def test_generated_instances(self, seed):
        split, p, d, d_pq = gen_narrow_instance(GenConfig(seed=seed))
        out = derive_narrow(split, p, d, d_pq)
        assert confirms(out)
        assert lookup(out.env, split.pivot_var) == p or lookup(d.env, split.pivot_var) == p

    @given(seeds)
    @settings(max_examples=60)
    def test_forced_pivot_chains(self, seed):
        split, p, d, d_pq = gen_narrow_instance(GenConfig(seed=seed), force_pivot_chain=True)
        has_pivot_trs = any(
            node.rule == Rule.TRS and node.lhs == FreeVar(split.pivot_var)
            for _, node in iter_nodes(d)
        )
        assert has_pivot_trs
        out = derive_narrow(split, p, d, d_pq)
        assert confirms(out)


class TestEnvFacts:
    def test_top_leaf(self):
        d = derive_refl(EMPTY_ENV, Top())
        ok_map, closed_map = derivation_env_facts(d)
        assert ok_map == {(): True}
        assert closed_map == {(): True}

    def test_every_node_covered(self):
        d = decide_yes("X <: Top |- All Y <: X . Y -> Y <: All Y <: X . Y -> Top")
        ok_map, closed_map = derivation_env_facts(d)
        paths = {path for path, _ in iter_nodes(d)}
        assert set(ok_map) == paths
        assert set(closed_map) == paths
        assert all(ok_map.values()) and all(closed_map.values())

    def test_refuses_invalid_derivation(self):
        bad = Derivation(Rule.TOP, EMPTY_ENV, FreeVar("X"), Top())
        with pytest.raises(PreconditionError):
            derivation_env_facts(bad)

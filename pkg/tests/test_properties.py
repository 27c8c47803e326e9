"""Property suites, 200 generated cases each."""

import collections

from hypothesis import given, settings, strategies as st

from .properties import check_delta_fixed, check_dlog, check_essential_rank, check_left_right, check_semiregular

SEEDS = st.integers(0, 2**32 - 1)
CASES = settings(max_examples=200)


@CASES
@given(SEEDS)
def test_dlog_dichotomy(seed):
    check_dlog(seed)


@CASES
@given(SEEDS)
def test_semiregular_inequality_and_freeness(seed):
    check_semiregular(seed)


@CASES
@given(SEEDS)
def test_essential_tensor_rank(seed):
    check_essential_rank(seed)


@CASES
@given(SEEDS)
def test_left_right_witness_in_ideals(seed):
    check_left_right(seed)


@CASES
@given(SEEDS)
def test_delta_fixed_algebra_is_base(seed):
    check_delta_fixed(seed)


def test_suites_reach_both_arms():
    """The seeded generators exercise every arm and shape."""
    seen = collections.defaultdict(set)
    for seed in range(60):
        seen["dlog"].add(check_dlog(seed))
        seen["semireg"].add(check_semiregular(seed))
        seen["witness"].add(check_left_right(seed))
    for seed in range(11):
        seen["rank"].add(check_essential_rank(seed))
    for seed in range(4):
        seen["delta"].add(check_delta_fixed(seed))
    assert seen["dlog"] == {"found", "zd"}
    assert seen["semireg"] == {"found", "zd"}
    assert seen["witness"] == {"whole", "proper"}
    assert len(seen["rank"]) == 11
    assert seen["delta"] == {"r=2", "r=3", "r=5", "r=7"}

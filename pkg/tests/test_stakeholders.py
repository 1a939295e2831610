"""Utility matrices, welfare aggregation, and exact policy evaluation."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_pop
from fairfront.errors import ConfigError, ModeError
from fairfront.policy import DeterministicPolicy, MixturePolicy, StochasticPolicy
from fairfront.stakeholders import (
    CREDIT_DM,
    CREDIT_DS,
    JUSTICE_EGALITARIAN,
    JUSTICE_RAWLSIAN,
    MODE_EMPIRICAL,
    MODE_PROBABILISTIC,
    StakeholderSpec,
    UtilityMatrix,
    UtilityVector,
    credit_spec,
    egalitarian,
    eval_utilities,
    from_cost_form,
    rawlsian,
    unfairness,
    uniform_ds,
)

ACCEPT_ALL = DeterministicPolicy(thresholds=(0.0,))
REJECT_ALL = StochasticPolicy(betas=(1e6,), gammas=(1.0,))


def one_group_spec(justice=JUSTICE_EGALITARIAN, eval_mode=MODE_PROBABILISTIC):
    return StakeholderSpec(
        dm=CREDIT_DM, ds=uniform_ds(CREDIT_DS, 1), justice=justice, eval_mode=eval_mode
    )


# -- matrices -----------------------------------------------------------------


def test_cost_form_keeps_gains_and_negates_losses():
    m = from_cost_form(c00=1.0, c01=0.0, c10=0.0, c11=1.0)
    assert m.as_tuple() == (1.0, 0.0, 0.0, 1.0)


def test_cost_form_false_positive_cost_becomes_negative_payoff():
    m = from_cost_form(c00=0.0, c01=0.0, c10=0.4431, c11=28.5473)
    assert m.u10 == -0.4431
    assert m.u11 == 28.5473


def test_scaled_multiplies_every_entry():
    m = CREDIT_DS.scaled(2.0)
    assert m.as_tuple() == (0.0, -2.0, -10.0, 20.0)


def test_matrix_rejects_non_finite_entries():
    with pytest.raises(ConfigError):
        UtilityMatrix(0.0, 0.0, float("nan"), 1.0)


# -- welfare functionals --------------------------------------------------------


def test_egalitarian_examples():
    assert egalitarian([2.0, 2.0]) == 0.0
    assert egalitarian([1.0, 3.0]) == 2.0
    assert egalitarian([1.0, 2.0, 4.0]) == 6.0


def test_rawlsian_is_worst_group():
    assert rawlsian([-5.0, 10.0, 0.0]) == -5.0


def test_unfairness_orientation():
    uv = UtilityVector(u_dm=0.0, u_ds=(1.0, 3.0), u_sp_egal=2.0, u_sp_rawls=1.0)
    assert unfairness(uv, JUSTICE_EGALITARIAN) == 2.0
    assert unfairness(uv, JUSTICE_RAWLSIAN) == -1.0
    with pytest.raises(ConfigError):
        unfairness(uv, "utilitarian")


group_utils = st.lists(
    st.floats(min_value=-100.0, max_value=100.0, allow_nan=False), min_size=1, max_size=6
)


@given(group_utils)
def test_egalitarian_nonnegative_and_permutation_invariant(vals):
    base = egalitarian(vals)
    assert base >= 0.0
    assert egalitarian(list(reversed(vals))) == pytest.approx(base)


@given(group_utils, st.floats(min_value=-10.0, max_value=10.0, allow_nan=False))
def test_egalitarian_shift_invariant_rawlsian_equivariant(vals, c):
    shifted = [v + c for v in vals]
    assert egalitarian(shifted) == pytest.approx(egalitarian(vals), abs=1e-9)
    assert rawlsian(shifted) == pytest.approx(rawlsian(vals) + c, abs=1e-9)


# -- evaluation ----------------------------------------------------------------


def test_accepted_sure_positive_pays_full_acceptance_entry():
    pop = make_pop([1.0], [0])
    uv = eval_utilities(pop, ACCEPT_ALL, one_group_spec())
    assert uv.u_dm == 28.5473


def test_group_utility_is_member_mean():
    pop = make_pop([1.0, 0.0], [0, 0])
    uv = eval_utilities(pop, ACCEPT_ALL, one_group_spec())
    # accepted sure positive pays 10, accepted sure negative pays -5
    assert uv.u_ds == (2.5,)


def test_reject_everyone_costs_dm_nothing_and_ds_its_positives():
    pop = make_pop([0.3, 0.8], [0, 1])
    uv = eval_utilities(pop, DeterministicPolicy((1.0, 1.0)), credit_spec())
    # scores below 1 are all rejected; dm rejection entries are zero, the
    # subject loses u01 = -1 weighted by its positive mass
    assert uv.u_dm == 0.0
    assert uv.u_ds == (-0.3, -0.8)
    assert uv.u_sp_egal == pytest.approx(0.5)
    assert uv.u_sp_rawls == -0.8


def test_eval_fills_welfare_slots(two_group_pop):
    uv = eval_utilities(two_group_pop, ACCEPT_ALL, credit_spec())
    assert uv.u_sp_egal == pytest.approx(abs(uv.u_ds[0] - uv.u_ds[1]))
    assert uv.u_sp_rawls == pytest.approx(min(uv.u_ds))


def test_eval_group_count_mismatch_rejected(two_group_pop):
    with pytest.raises(ConfigError):
        eval_utilities(two_group_pop, ACCEPT_ALL, one_group_spec())


def test_empirical_mode_needs_outcomes():
    pop = make_pop([0.5], [0])
    with pytest.raises(ModeError):
        eval_utilities(pop, ACCEPT_ALL, one_group_spec(eval_mode=MODE_EMPIRICAL))


def test_empirical_mode_uses_realized_outcomes():
    pop = make_pop([0.9, 0.9], [0, 0], outcomes=[1, 0])
    uv = eval_utilities(pop, ACCEPT_ALL, one_group_spec(eval_mode=MODE_EMPIRICAL))
    assert uv.u_dm == pytest.approx((28.5473 - 0.4431) / 2.0)
    assert uv.u_ds == ((10.0 - 5.0) / 2.0,)


def test_per_record_dm_entries_win_over_constant_matrix():
    entries = [[0.0, 0.0, 0.0, 100.0]]
    pop = make_pop([1.0], [0], dm_entries=entries)
    uv = eval_utilities(pop, ACCEPT_ALL, one_group_spec())
    assert uv.u_dm == 100.0


def test_per_record_dm_entries_required_when_spec_has_none():
    pop = make_pop([1.0], [0])
    spec = StakeholderSpec(dm=None, ds=uniform_ds(CREDIT_DS, 1))
    with pytest.raises(ConfigError):
        eval_utilities(pop, ACCEPT_ALL, spec)


def test_dm_scaling_scales_dm_utility_exactly(two_group_pop):
    spec = credit_spec()
    doubled = StakeholderSpec(
        dm=spec.dm.scaled(2.0), ds=spec.ds, justice=spec.justice, eval_mode=spec.eval_mode
    )
    policy = StochasticPolicy(betas=(5.0, 5.0), gammas=(0.3, 0.7))
    base = eval_utilities(two_group_pop, policy, spec)
    twice = eval_utilities(two_group_pop, policy, doubled)
    assert twice.u_dm == 2.0 * base.u_dm
    assert twice.u_ds == base.u_ds


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_mixture_utilities_are_affine_in_lambda(lam):
    rng = np.random.default_rng(11)
    pop = make_pop(rng.uniform(0.0, 1.0, 40), rng.integers(0, 2, 40), group_count=2)
    left = DeterministicPolicy((0.3, 0.6))
    right = StochasticPolicy((10.0, 2.0), (0.5, 0.4))
    spec = credit_spec()
    mix = MixturePolicy(left=left, right=right, lam=lam)
    u_mix = eval_utilities(pop, mix, spec)
    u_l = eval_utilities(pop, left, spec)
    u_r = eval_utilities(pop, right, spec)
    assert u_mix.u_dm == pytest.approx(lam * u_l.u_dm + (1 - lam) * u_r.u_dm, abs=1e-10)
    for g in range(2):
        want = lam * u_l.u_ds[g] + (1 - lam) * u_r.u_ds[g]
        assert u_mix.u_ds[g] == pytest.approx(want, abs=1e-10)


def test_spec_validation():
    with pytest.raises(ConfigError):
        StakeholderSpec(dm=CREDIT_DM, ds=())
    with pytest.raises(ConfigError):
        StakeholderSpec(dm=CREDIT_DM, ds=(CREDIT_DS,), justice="maximin")
    with pytest.raises(ConfigError):
        StakeholderSpec(dm=CREDIT_DM, ds=(CREDIT_DS,), eval_mode="bayes")

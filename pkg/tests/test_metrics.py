import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from monoperm import (DimensionError, InputDomainError, Permutation, compose, kendall_tau,
                      kendall_tau_bruteforce, loss_report, loss_up_to_reversal, reverse,
                      spearman_footrule, zero_one_loss)
from monoperm.metrics import count_inversions
from oracles import brute_force_kendall

ID3 = Permutation.identity(3)


def same_size(k, max_size=30):
    return st.integers(2, max_size).flatmap(
        lambda p: st.tuples(*[st.permutations(list(range(p))).map(Permutation)] * k))


def test_zero_one_examples():
    assert zero_one_loss(ID3, ID3) == 0
    assert zero_one_loss(Permutation([1, 0, 2]), ID3) == 1
    assert zero_one_loss(reverse(ID3), ID3) == 1
    with pytest.raises(DimensionError):
        zero_one_loss(ID3, Permutation.identity(4))


def test_kendall_examples():
    pi = Permutation([2, 0, 3, 1])
    ident = Permutation.identity(4)
    assert kendall_tau(pi, pi) == 0
    assert kendall_tau(reverse(ident), ident) == 1
    assert kendall_tau(Permutation([0, 2, 1, 3]), Permutation.identity(4)) == pytest.approx(1 / 6)
    with pytest.raises(DimensionError):
        kendall_tau(ID3, Permutation.identity(4))


def test_count_inversions():
    assert count_inversions([]) == 0
    assert count_inversions([3, 2, 1, 0]) == 6
    assert count_inversions([1, 0, 3, 2]) == 2


def test_kendall_matches_bruteforce_on_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        p = int(rng.integers(2, 201))
        a, b = Permutation(rng.permutation(p)), Permutation(rng.permutation(p))
        assert kendall_tau(a, b) == kendall_tau_bruteforce(a, b)


def test_bruteforce_matches_pair_enumeration():
    rng = np.random.default_rng(1)
    for _ in range(100):
        p = int(rng.integers(2, 12))
        a, b = Permutation(rng.permutation(p)), Permutation(rng.permutation(p))
        assert kendall_tau_bruteforce(a, b) == pytest.approx(brute_force_kendall(a, b), abs=1e-15)


def test_footrule_examples():
    pi = Permutation([2, 0, 1])
    assert spearman_footrule(pi, pi) == 0
    assert spearman_footrule(Permutation([1, 0]), Permutation([0, 1])) == 2
    assert kendall_tau(Permutation([1, 0]), Permutation([0, 1])) == 1


@given(same_size(3))
def test_kendall_right_invariant(triple):
    a, b, s = triple
    assert kendall_tau(compose(a, s), compose(b, s)) == pytest.approx(kendall_tau(a, b), abs=1e-15)


@given(same_size(3))
def test_kendall_metric_axioms(triple):
    a, b, c = triple
    assert kendall_tau(a, b) == kendall_tau(b, a)
    assert (kendall_tau(a, b) == 0) == (a == b)
    assert kendall_tau(a, c) <= kendall_tau(a, b) + kendall_tau(b, c) + 1e-12


@given(same_size(2, max_size=60))
def test_diaconis_graham_sandwich(pair):
    a, b = pair
    tau, rho = kendall_tau(a, b), spearman_footrule(a, b)
    assert tau - 1e-12 <= rho <= 2 * tau + 1e-12


def test_loss_up_to_reversal_examples():
    truth = Permutation([3, 0, 4, 1, 2])
    assert loss_up_to_reversal(reverse(truth), truth, "kendall") == (0, True)
    assert loss_up_to_reversal(truth, truth, "kendall") == (0, False)
    assert loss_up_to_reversal(reverse(truth), truth, "zero_one") == (0, True)


def test_loss_up_to_reversal_constructed_tau():
    # three adjacent swaps out of C(5,2) = 10 pairs
    est = Permutation([1, 0, 3, 4, 2])
    truth = Permutation.identity(5)
    assert kendall_tau(est, truth) == pytest.approx(0.3)
    assert kendall_tau(est, reverse(truth)) == pytest.approx(0.7)
    loss, used = loss_up_to_reversal(est, truth, "kendall")
    assert loss == pytest.approx(0.3) and used is False


def test_loss_up_to_reversal_tie_is_not_reversal():
    # neither orientation matches, so both losses are 1
    est = Permutation([1, 0, 2])
    loss, used = loss_up_to_reversal(est, ID3, "zero_one")
    assert (loss, used) == (1, False)


def test_reversal_against_identity_complements_kendall():
    rng = np.random.default_rng(2)
    for _ in range(200):
        p = int(rng.integers(2, 40))
        a = Permutation(rng.permutation(p))
        ident = Permutation.identity(p)
        assert kendall_tau(a, reverse(ident)) == pytest.approx(1 - kendall_tau(a, ident))


def test_flipped_estimate_equals_reversed_truth():
    # a sign flip of the projection reverses the estimate; by right-invariance
    # that is the same as comparing against the reversed truth
    rng = np.random.default_rng(3)
    for _ in range(200):
        p = int(rng.integers(2, 40))
        a, b = Permutation(rng.permutation(p)), Permutation(rng.permutation(p))
        assert kendall_tau(reverse(a), b) == pytest.approx(kendall_tau(a, reverse(b)))
        assert kendall_tau(reverse(a), reverse(b)) == pytest.approx(kendall_tau(a, b))


@pytest.mark.parametrize("metric", ["zero_one", "kendall", "footrule"])
def test_loss_up_to_reversal_is_the_smaller_loss(metric):
    rng = np.random.default_rng(4)
    direct = {"zero_one": zero_one_loss, "kendall": kendall_tau, "footrule": spearman_footrule}[metric]
    for _ in range(100):
        p = int(rng.integers(2, 20))
        a, b = Permutation(rng.permutation(p)), Permutation(rng.permutation(p))
        loss, used = loss_up_to_reversal(a, b, metric)
        assert loss == min(direct(a, b), direct(a, reverse(b)))
        assert used == (direct(a, reverse(b)) < direct(a, b))


def test_unknown_metric_rejected():
    with pytest.raises(InputDomainError):
        loss_up_to_reversal(ID3, ID3, "hamming")


def test_loss_report_fields():
    truth = Permutation.identity(4)
    rep = loss_report(reverse(truth), truth, up_to_reversal=True)
    assert (rep.zero_one, rep.kendall_tau, rep.spearman_footrule, rep.reversal_used) == (0, 0, 0, True)
    raw = loss_report(reverse(truth), truth)
    assert raw.zero_one == 1 and raw.kendall_tau == 1 and not raw.reversal_used
    assert math.isclose(raw.spearman_footrule, spearman_footrule(reverse(truth), truth))


@pytest.mark.parametrize("p", range(2, 6))
def test_kendall_exhaustive_small(p):
    items = [Permutation(x) for x in itertools.permutations(range(p))]
    for a in items:
        for b in items:
            assert kendall_tau(a, b) == kendall_tau_bruteforce(a, b)

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from fastgrant.matching import (
    InstanceTooLarge,
    MatchingInstance,
    best_oma,
    brute_force_matching,
    max_weight_matching,
    optimal_pairing,
)


def _inst(w, ok=None):
    w = np.asarray(w, dtype=float)
    ok = w > 0 if ok is None else np.asarray(ok)
    return MatchingInstance(np.arange(w.shape[0]), np.arange(100, 100 + w.shape[1]), np.where(ok, w, 0.0), ok)


def test_best_oma_top_k():
    r = np.zeros(10)
    r[[2, 5, 7]] = [0.9, 0.5, 0.7]
    assert sorted(best_oma([2, 5, 7], r, 2).tolist()) == [2, 7]


def test_best_oma_single_and_empty():
    assert best_oma([4], np.ones(5), 10).tolist() == [4]
    assert len(best_oma([], np.ones(5), 10)) == 0


def test_best_oma_ties_to_lower_id():
    assert best_oma(np.array([8, 1, 4]), np.ones(10), 2).tolist() == [1, 4]


def test_single_pair():
    pairs, obj = optimal_pairing(_inst([[0.8]]))
    assert pairs == [(0, 100)] and obj == pytest.approx(0.8, abs=1e-9)


def test_two_by_two_tie():
    inst = _inst([[3, 2], [2, 1]])
    pairs, obj = optimal_pairing(inst)
    assert obj == 4 == brute_force_matching(inst)
    assert len(pairs) == 2


def test_all_ineligible():
    inst = _inst(np.ones((3, 4)), np.zeros((3, 4), dtype=bool))
    assert optimal_pairing(inst) == ([], 0.0)
    assert brute_force_matching(inst) == 0.0


def test_brute_force_small_cases():
    assert brute_force_matching(_inst(np.zeros((0, 0)))) == 0.0
    # weights live on a 2^-32 grid
    assert brute_force_matching(_inst([[0.37]])) == pytest.approx(0.37, abs=1e-9)


def test_brute_force_refuses_large():
    with pytest.raises(InstanceTooLarge):
        brute_force_matching(_inst(np.ones((7, 3))))
    with pytest.raises(InstanceTooLarge):
        brute_force_matching(_inst(np.ones((2, 9))))


def test_build_weights_and_eligibility():
    theta = np.array([0.5, 0.2, 0.3, 0.0])
    gamma = np.array([1.0, 1.1, 5.0, 0.0])
    inst = MatchingInstance.build([0], [1, 2, 3], theta, gamma, p_t=1.0, p_tol=0.5)
    assert inst.eligibility.tolist() == [[False, True, True]]
    np.testing.assert_allclose(inst.weights, [[0.0, 0.8, 0.5]])


def _random_instance(rng):
    n_c, n_n = rng.integers(0, 7), rng.integers(0, 9)
    w = rng.random((n_c, n_n))
    if rng.random() < 0.5:
        w = np.round(w, 1)          # plenty of ties
    ok = rng.random((n_c, n_n)) < 0.7
    return _inst(w, ok & (w > 0))


def test_engine_style_instances_match_exactly():
    # additive weights make many distinct matchings tie in exact arithmetic
    rng = np.random.default_rng(11)
    for _ in range(200):
        n_c, n_n = rng.integers(1, 7), rng.integers(1, 9)
        theta = rng.random(n_c + n_n)
        gamma = rng.exponential(1.0, n_c + n_n)
        inst = MatchingInstance.build(range(n_c), range(n_c, n_c + n_n), theta, gamma, 1.0, 0.3)
        assert optimal_pairing(inst)[1] == brute_force_matching(inst)


def test_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(10)
    for _ in range(500):
        inst = _random_instance(rng)
        pairs, obj = optimal_pairing(inst)
        assert obj == brute_force_matching(inst)
        used_c = [c for c, _ in pairs]
        used_n = [n for _, n in pairs]
        assert len(set(used_c)) == len(used_c) and len(set(used_n)) == len(used_n)


@pytest.mark.parametrize("shape", [(10, 300), (10, 50), (10, 10), (30, 5), (1, 200)])
def test_agrees_with_scipy_on_larger_instances(shape):
    rng = np.random.default_rng(shape[0] * 1000 + shape[1])
    for _ in range(20):
        w = rng.random(shape) * (rng.random(shape) < 0.5)
        r, c = linear_sum_assignment(w, maximize=True)
        ours = sum(w[i, j] for i, j in max_weight_matching(w))
        assert ours == pytest.approx(w[r, c].sum(), rel=1e-12, abs=1e-12)


def test_negative_weights_rejected():
    with pytest.raises(ValueError):
        max_weight_matching([[-1.0]])

import numpy as np
import pytest
from scipy import integrate, stats

from fastgrant.config import ScenarioConfig
from fastgrant.scenario import derive_stream
from fastgrant.traffic import (
    ActivationSchedule,
    Packet,
    PacketExpired,
    TrafficDraws,
    TrafficState,
    access_delay,
    beta_activation_pdf,
    build_activation_schedule,
    step_traffic,
)


def test_beta_pdf_endpoints():
    assert beta_activation_pdf(0, 10, 3, 4) == 0.0
    assert beta_activation_pdf(10, 10, 3, 4) == 0.0


def test_beta_pdf_midpoint():
    # oracle: scaled standard Beta density
    assert beta_activation_pdf(5, 10, 3, 4) == pytest.approx(stats.beta.pdf(0.5, 3, 4) / 10, abs=1e-12)
    assert beta_activation_pdf(5, 10, 3, 4) == pytest.approx(0.1875, abs=1e-12)


def test_beta_pdf_integrates_to_one():
    total, _ = integrate.quad(lambda t: beta_activation_pdf(t, 10, 3, 4), 0, 10)
    assert total == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("t", [-0.1, 10.1])
def test_beta_pdf_domain(t):
    with pytest.raises(ValueError):
        beta_activation_pdf(t, 10, 3, 4)


def test_schedule_normalized_and_mode():
    sched = build_activation_schedule(ScenarioConfig(), derive_stream(1, "activation"))
    assert sched.slot_probabilities.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(sched.slot_probabilities >= 0)
    # density peaks at t/T_A = 0.4, the boundary between slots 3 and 4
    assert int(np.argmax(sched.slot_probabilities)) in (3, 4)
    assert sched.assignment.shape == (500,)


def test_single_slot_schedule():
    sched = build_activation_schedule(ScenarioConfig(activation_slots=1), derive_stream(1, "activation"))
    assert sched.slot_probabilities.tolist() == [1.0]
    assert np.all(sched.assignment == 0)


def test_activation_histogram_matches_probabilities():
    cfg = ScenarioConfig()
    counts = np.zeros(cfg.activation_slots)
    for seed in range(40):
        sched = build_activation_schedule(cfg, derive_stream(seed, "activation"))
        counts += np.bincount(sched.assignment, minlength=cfg.activation_slots)
    expected = sched.slot_probabilities * counts.sum()
    assert stats.chisquare(counts, expected).pvalue > 1e-3


def _state(max_delay, slots=1, p=0.0, assignment=None):
    n = len(max_delay)
    sched = ActivationSchedule(np.full(slots, 1.0 / slots),
                               np.zeros(n, dtype=int) if assignment is None else np.asarray(assignment))
    return TrafficState(np.asarray(max_delay), sched, p)


def _draws(u, v=None):
    u = np.asarray(u, dtype=float)
    return TrafficDraws(u, np.full(len(u), 0.5) if v is None else np.asarray(v, dtype=float))


def test_burst_follows_assignment():
    st = _state([5, 5, 5], slots=3, assignment=[0, 2, 1])
    assert step_traffic(0, st, _draws([0, 0, 0])).tolist() == [0]
    assert step_traffic(1, st, _draws([0, 0, 0])).tolist() == [2]
    assert step_traffic(2, st, _draws([0, 0, 0])).tolist() == [1]


def test_zero_reactivation_never_activates():
    st = _state([5] * 4, p=0.0)
    st.active[:] = False
    rng = np.random.default_rng(0)
    for cycle in range(1, 50):
        st.drop_expired(cycle)
        assert len(step_traffic(cycle, st, rng)) == 0


def test_full_reactivation_wakes_everyone():
    st = _state([5] * 4, p=1.0)
    new = step_traffic(3, st, np.random.default_rng(0))
    assert sorted(new.tolist()) == [0, 1, 2, 3]


def test_reactivation_of_active_device_is_noop():
    st = _state([5, 5], p=1.0)
    step_traffic(0, st, _draws([0, 0], [0.25, 0.75]))
    new = step_traffic(1, st, _draws([0, 0], [0.9, 0.9]))
    assert len(new) == 0
    assert st.created.tolist() == [0, 0] and st.value.tolist() == [0.25, 0.75]


def test_new_packet_fields():
    st = _state([7], p=1.0)
    step_traffic(3, st, _draws([0.0], [0.42]))
    assert st.packet(0) == Packet(owner_id=0, created_cycle=3, value_of_info=0.42, deadline_cycle=10)


def test_drop_after_deadline():
    st = _state([1], slots=10, assignment=[7])
    step_traffic(7, st, _draws([1.0]))
    assert len(st.drop_expired(8)) == 0          # delay 1 still allowed
    assert st.drop_expired(9).tolist() == [0]   # delay 2 exceeds D_i = 1
    assert st.packet(0) is None


def test_at_most_one_packet_per_device():
    st = _state([3] * 20, p=0.5)
    rng = np.random.default_rng(1)
    for cycle in range(1, 200):
        st.drop_expired(cycle)
        step_traffic(cycle, st, rng)
        assert np.all(st.deadline[st.active] - st.created[st.active] == 3)


def test_access_delay():
    p = Packet(0, 10, 0.5, 13)
    assert access_delay(p, 10) == 0
    assert access_delay(p, 13) == 3
    with pytest.raises(PacketExpired):
        access_delay(p, 14)
    assert access_delay(Packet(0, 10, 0.5, 20), 15) == 5

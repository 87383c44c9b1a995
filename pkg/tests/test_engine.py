"""Engine unit tests: schedules, admissibility calculus, the recursion
itself, and the delimited output."""

from __future__ import annotations

import math

import numpy as np
import pytest

from avgsa.engine import (
    AdmissibilityReport,
    DivergenceError,
    RateSpec,
    StepSchedule,
    admissible_power_pair,
    admissible_qsa,
    check_schedule_numeric,
    read_csv_columns,
    run,
    sa_step,
    write_trajectory_csv,
)
from avgsa.innovations import HaltonSource, IidGaussianSource, IidUniformSource


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

def test_power_schedule_values():
    s = StepSchedule.power(8.0, 1.0)
    assert s.gamma(1) == 8.0
    assert s.gamma(4) == 2.0
    np.testing.assert_allclose(s.gamma_array(3), [8.0, 4.0, 8.0 / 3.0])


def test_power_schedule_validation():
    with pytest.raises(ValueError):
        StepSchedule.power(0.0, 1.0)
    with pytest.raises(ValueError):
        StepSchedule.power(1.0, -0.5)
    with pytest.raises(ValueError):
        StepSchedule(c=1.0, a=1.0, table=[1.0])
    with pytest.raises(ValueError):
        StepSchedule(c=1.0, a=None)


def test_tabulated_schedule():
    t = StepSchedule.tabulated([0.5, 0.5, 0.25])
    assert t.gamma(3) == 0.25
    with pytest.raises(ValueError):
        t.gamma(4)
    with pytest.raises(ValueError):
        StepSchedule.tabulated([0.5, 0.6])  # increasing
    with pytest.raises(ValueError):
        StepSchedule.tabulated([0.5, 0.0])  # not positive


def test_rate_spec_validation():
    RateSpec(0.5)
    RateSpec(1.0, log_exponent=1.5)
    with pytest.raises(ValueError):
        RateSpec(0.0)
    with pytest.raises(ValueError):
        RateSpec(1.2)
    with pytest.raises(ValueError):
        RateSpec(0.5, log_exponent=-1.0)


# ---------------------------------------------------------------------------
# admissibility: closed forms
# ---------------------------------------------------------------------------

def test_power_pair_rule_frozen_verdicts():
    assert admissible_power_pair(1.0, 0.5).verdict == "admissible"
    assert admissible_power_pair(0.75, 0.5).verdict == "admissible"
    assert admissible_power_pair(0.5, 0.5).verdict == "not-admissible"   # boundary excluded
    assert admissible_power_pair(0.4, 0.5).verdict == "not-admissible"
    assert admissible_power_pair(1.2, 0.5).verdict == "not-admissible"
    assert admissible_power_pair(1.0, 1.0).verdict == "admissible"
    assert admissible_power_pair(0.3, 1.0).verdict == "admissible"
    assert admissible_power_pair(1.0, 1.5).verdict == "not-admissible"   # rate label out of range
    rep = admissible_power_pair(0.4, 0.5)
    assert rep.failed_condition is not None
    assert not rep.ok


def test_qsa_rules():
    assert admissible_qsa("finite-variation", 3, 0.6).verdict == "admissible"
    assert admissible_qsa("finite-variation", 3, 0.5).verdict == "not-admissible"
    assert admissible_qsa("lipschitz", 2, 0.75).verdict == "admissible"
    assert admissible_qsa("lipschitz", 2, 0.5).verdict == "not-admissible"
    assert admissible_qsa("lipschitz", 1, 0.3).verdict == "admissible"
    with pytest.raises(ValueError):
        admissible_qsa("convex", 2, 0.8)


# ---------------------------------------------------------------------------
# admissibility: numerical probe
# ---------------------------------------------------------------------------

def test_probe_blesses_the_canonical_pair():
    rep = check_schedule_numeric(StepSchedule.power(1.0, 1.0), RateSpec(0.5), 10**6)
    assert rep.verdict == "consistent-with-admissible"
    assert len(rep.detail["checkpoints"]) == 10


def test_probe_rejects_constant_steps():
    rep = check_schedule_numeric(StepSchedule.power(0.1, 0.0), RateSpec(0.5), 10**6)
    assert rep.verdict == "not-admissible"
    assert "vanish" in rep.failed_condition


def test_probe_rejects_summable_steps():
    rep = check_schedule_numeric(StepSchedule.power(1.0, 2.0), RateSpec(0.5), 10**6)
    assert rep.verdict == "not-admissible"
    assert "convergent" in rep.failed_condition


def test_probe_tabulated_schedule():
    table = 1.0 / np.arange(1.0, 150_001.0)
    rep = check_schedule_numeric(StepSchedule.tabulated(table), RateSpec(0.5))
    assert rep.verdict == "consistent-with-admissible"


def test_probe_never_contradicts_closed_form():
    # seeded sweep over random power pairs: the probe may stay silent but
    # must never call an admissible pair not-admissible, nor endorse an
    # inadmissible one
    rng = np.random.default_rng(90210)
    for _ in range(40):
        a = float(rng.uniform(0.05, 1.5))
        beta = float(rng.uniform(0.05, 1.0))
        closed = admissible_power_pair(a, beta).verdict
        probe = check_schedule_numeric(
            StepSchedule.power(1.0, a), RateSpec(beta), 2 * 10**5
        ).verdict
        if probe == "not-admissible":
            assert closed == "not-admissible", (a, beta)
        if probe == "consistent-with-admissible":
            assert closed == "admissible", (a, beta)


# ---------------------------------------------------------------------------
# the recursion
# ---------------------------------------------------------------------------

def test_sa_step_frozen_value():
    h = lambda theta, y: theta - y
    assert sa_step(2.0, 0.0, 0.1, h) == pytest.approx(1.8, abs=0)
    assert sa_step(2.0, 0.0, 0.1, h, dm=1.0) == pytest.approx(1.7, abs=1e-15)


def test_run_averaging_identity():
    # with H(theta, y) = theta - f(y) and steps 1/n the iterate IS the
    # running mean of f over the innovations, whatever theta_0 was
    src = IidUniformSource(1, seed=31)
    f = lambda y: float(y[0]) ** 2
    traj = run(5.0, src, lambda th, y: th - f(y), StepSchedule.power(1.0, 1.0), 5_000)
    replay = IidUniformSource(1, seed=31).take_block(5_000)[:, 0]
    assert traj.final_theta[0] == pytest.approx(np.mean(replay**2), abs=1e-12)


def test_run_converges_on_linear_problem():
    src = IidGaussianSource(1, seed=3)
    traj = run(10.0, src, lambda th, y: th - (2.0 + float(y[0])), StepSchedule.power(1.0, 1.0), 100_000)
    assert abs(traj.final_theta[0] - 2.0) < 0.02


def test_run_vector_iterate():
    src = IidGaussianSource(2, seed=13)
    target = np.array([1.0, -2.0])
    traj = run(
        np.zeros(2), src,
        lambda th, y: th - (target + 0.1 * y),
        StepSchedule.power(1.0, 1.0), 50_000,
    )
    assert traj.dimension == 2
    np.testing.assert_allclose(traj.final_theta, target, atol=0.02)


def test_run_records_and_monitors():
    src = HaltonSource(1)
    traj = run(
        0.0, src, lambda th, y: th - float(y[0]),
        StepSchedule.power(1.0, 1.0), 103,
        record_stride=10,
        monitors={"double": lambda n, th: 2.0 * th},
    )
    assert traj.ns[0] == 0 and traj.ns[-1] == 103
    assert list(traj.ns[:3]) == [0, 10, 20]
    np.testing.assert_allclose(traj.monitors["double"], 2.0 * traj.thetas[:, 0])
    assert "double" in traj.channel_names()


def test_run_divergence_guard_trips():
    src = IidUniformSource(1, seed=0)
    with pytest.raises(DivergenceError) as exc:
        run(1.0, src, lambda th, y: -th, StepSchedule.power(2.0, 0.0), 10_000,
            divergence_bound=1e6)
    assert exc.value.step >= 1
    assert "diverged" in str(exc.value)


def test_run_guard_catches_nan():
    src = IidUniformSource(1, seed=0)
    with pytest.raises(DivergenceError):
        run(1.0, src, lambda th, y: float("nan"), StepSchedule.power(1.0, 1.0), 10)


def test_martingale_hook_needs_rng_and_is_reproducible():
    src = HaltonSource(1)
    hook = lambda n, th, rng: float(rng.standard_normal())
    with pytest.raises(ValueError):
        run(0.0, src, lambda th, y: th, StepSchedule.power(1.0, 1.0), 10, martingale=hook)

    def go():
        return run(
            0.0, HaltonSource(1), lambda th, y: th - float(y[0]),
            StepSchedule.power(1.0, 1.0), 1_000,
            martingale=hook, hook_rng=np.random.default_rng(np.random.SeedSequence(5)),
        ).final_theta[0]

    assert go() == go()


# ---------------------------------------------------------------------------
# delimited output
# ---------------------------------------------------------------------------

def test_csv_round_trip_and_byte_identity(tmp_path):
    src = IidGaussianSource(1, seed=8)
    traj = run(
        0.0, src, lambda th, y: th - float(y[0]), StepSchedule.power(1.0, 1.0), 500,
        record_stride=25, monitors={"sq": lambda n, th: th * th},
    )
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    write_trajectory_csv(traj, p1)
    write_trajectory_csv(traj, p2)
    assert p1.read_bytes() == p2.read_bytes()

    cols = read_csv_columns(p1)
    assert set(cols) == {"n", "theta_0", "sq"}
    np.testing.assert_array_equal(cols["n"], traj.ns)
    # 17 significant digits round-trip to the exact binary doubles
    np.testing.assert_array_equal(cols["theta_0"], traj.thetas[:, 0])
    np.testing.assert_array_equal(cols["sq"], traj.monitors["sq"])


def test_csv_reader_reports_malformed_rows(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("n,theta_0\n0,1.0\n1,2.0,9\n")
    with pytest.raises(ValueError, match="bad.csv:3"):
        read_csv_columns(p)
    p.write_text("n,theta_0\n0,hello\n")
    with pytest.raises(ValueError, match="bad.csv:2"):
        read_csv_columns(p)

"""Event driven integration: unit circuit times, curve confinement,
policies and serialization."""

import json
import math

import numpy as np
import pytest

from psvfkit.errors import DomainError
from psvfkit.flow import (
    ALWAYS_LEFT,
    ALWAYS_RIGHT,
    EVENT_CROSSING,
    EVENT_FOLD,
    EVENT_ORIGIN,
    Prescribed,
    RandomWeighted,
    fold_hits,
    integrate,
    save_events_jsonl,
    save_trajectory_csv,
    time_one_map,
)
from psvfkit.model import build_petal_system, build_zk, zk_folds, zk_polynomial


def curve_deviation(traj):
    """Largest distance of the samples from the invariant branches."""
    q = traj.psvf.curve
    x, y = traj.points[:, 0], traj.points[:, 1]
    qx = q(x)
    return float(np.max(np.minimum(np.abs(y - qx), np.abs(y + qx))))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_chain_fold_hits_are_unit_spaced(k):
    sys = build_zk(k)
    x0 = (0.3, float(sys.curve(0.3)))
    traj = integrate(sys, x0, 20.0, policy=RandomWeighted(0.5, 0.5),
                     seed=100 + k)
    ts = np.array([t for t, _ in fold_hits(traj)])
    assert len(ts) == 20
    gaps = np.diff(ts)
    assert np.max(np.abs(gaps - 1.0)) < 1e-6


@pytest.mark.parametrize("k", [2, 3, 4])
def test_chain_stays_on_curve(k):
    sys = build_zk(k)
    x0 = (0.2, -float(sys.curve(0.2)))
    traj = integrate(sys, x0, 15.0, policy=RandomWeighted(0.3, 0.6), seed=k)
    assert curve_deviation(traj) < 1e-6
    sts = traj.points[:, 0]
    assert sts.min() >= -(k - 1) / 2.0 - 1e-9
    assert sts.max() <= (k - 1) / 2.0 + 1e-9


def test_anchored_fold_start_hits_integers():
    sys = build_zk(3)
    traj = integrate(sys, (-0.5, 0.0), 9.5, policy=RandomWeighted(0.4, 0.4),
                     seed=5)
    ts = [t for t, _ in fold_hits(traj)]
    assert ts == pytest.approx(list(range(10)), abs=1e-9)


def test_always_right_loops_one_arc():
    # from the east fold of the 2-chain, always-east stays on the east loop
    sys = build_zk(2)
    traj = integrate(sys, (0.0, 0.0), 6.0, policy=ALWAYS_RIGHT)
    for t, _ in fold_hits(traj):
        x, y = traj.position(t)
        assert abs(x) < 1e-9 and abs(y) < 1e-9
    x, _ = traj.position(0.5)
    assert x > 0


def test_always_left_mirrors_right():
    sys = build_zk(2)
    right = integrate(sys, (0.0, 0.0), 4.0, policy=ALWAYS_RIGHT)
    left = integrate(sys, (0.0, 0.0), 4.0, policy=ALWAYS_LEFT)
    xr, _ = right.position(0.5)
    xl, _ = left.position(0.5)
    assert xr == pytest.approx(-xl)


def test_crossing_events_at_end_stations():
    sys = build_zk(3)
    traj = integrate(sys, (-0.5, 0.0), 3.6,
                     policy=Prescribed([0, 0, 1, 2]))
    crossings = [e for e in traj.events if e.kind == EVENT_CROSSING]
    assert crossings, "boundary loop must cross the end station"
    for e in crossings:
        assert abs(abs(e.where[0]) - 1.0) < 1e-9
        assert abs(e.where[1]) < 1e-9


def test_prescribed_symbols_consumed_in_order():
    sys = build_zk(3)
    word = [1, 3, 2, 0, 0, 1]
    traj = integrate(sys, (-0.5, 0.0), len(word) - 0.4,
                     policy=Prescribed(word))
    hits = fold_hits(traj)
    assert len(hits) == len(word)


def test_prescribed_exhausted_raises():
    sys = build_zk(3)
    with pytest.raises(DomainError):
        integrate(sys, (-0.5, 0.0), 5.0, policy=Prescribed([1, 2]))


def test_prescribed_inadmissible_symbol_raises():
    sys = build_zk(3)
    # from fold 1 the outgoing arcs are 0 and 1; arc 3 is unreachable
    with pytest.raises(DomainError):
        integrate(sys, (-0.5, 0.0), 2.0, policy=Prescribed([3, 3]))


def test_random_policy_needs_probabilities():
    sys = build_zk(3)
    with pytest.raises(DomainError):
        integrate(sys, (-0.5, 0.0), 2.0, policy=RandomWeighted(), seed=1)
    with pytest.raises(DomainError):
        integrate(sys, (-0.5, 0.0), 2.0, policy=RandomWeighted(0.5, None),
                  seed=1)
    petal = build_petal_system(3)
    with pytest.raises(DomainError):
        integrate(petal, (0.0, 0.0), 2.0,
                  policy=RandomWeighted(weights=(0.5, 0.5)), seed=1)


def test_same_seed_reproduces_and_seeds_differ():
    sys = build_zk(4)
    kw = dict(policy=RandomWeighted(0.5, 0.5))
    a = integrate(sys, (0.0, 0.0), 12.0, seed=9, **kw)
    b = integrate(sys, (0.0, 0.0), 12.0, seed=9, **kw)
    c = integrate(sys, (0.0, 0.0), 12.0, seed=10, **kw)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


def test_position_interpolates_and_bounds():
    sys = build_zk(2)
    traj = integrate(sys, (0.0, 0.0), 3.0, policy=ALWAYS_RIGHT)
    x, y = traj.position(0.25)
    assert x == pytest.approx(0.25, abs=1e-9)
    assert y == pytest.approx(float(sys.curve(0.25)), abs=1e-6)
    with pytest.raises(DomainError):
        traj.position(-0.5)
    with pytest.raises(DomainError):
        traj.position(3.5)


def test_time_shift_moves_clock():
    sys = build_zk(2)
    traj = integrate(sys, (0.0, 0.0), 3.0, policy=ALWAYS_RIGHT)
    shifted = traj.time_shift(1.0)
    assert shifted.times[0] == pytest.approx(-1.0)
    assert shifted.position(0.0) == pytest.approx(traj.position(1.0))
    assert shifted.events[0].t == pytest.approx(traj.events[0].t - 1.0)


def test_time_one_map_returns_to_a_fold():
    sys = build_zk(3)
    traj = integrate(sys, (-0.5, 0.0), 1.6, policy=Prescribed([1, 3]))
    x, y = time_one_map(traj, 0.0)
    assert y == pytest.approx(0.0, abs=1e-9)
    assert np.min(np.abs(zk_folds(3) - x)) < 1e-9


class TestPetal:
    def test_origin_anchors_the_clock(self):
        sys = build_petal_system(4)
        traj = integrate(sys, (0.0, 0.0), 6.0,
                         policy=RandomWeighted(weights=(0.25,) * 4), seed=2)
        origins = [e.t for e in traj.events if e.kind == EVENT_ORIGIN]
        assert origins == pytest.approx(list(range(7)), abs=1e-9)
        for t in origins:
            x, y = traj.position(t)
            assert math.hypot(x, y) < 1e-9

    def test_crossings_at_half_integers(self):
        sys = build_petal_system(3)
        traj = integrate(sys, (0.0, 0.0), 3.6, policy=Prescribed([0, 1, 2, 0]))
        crossings = [e.t for e in traj.events if e.kind == EVENT_CROSSING]
        assert crossings == pytest.approx([0.5, 1.5, 2.5, 3.5], abs=1e-9)

    def test_prescribed_visits_requested_petals(self):
        k = 5
        sys = build_petal_system(k)
        order = [3, 0, 4, 2]
        traj = integrate(sys, (0.0, 0.0), len(order) - 0.2,
                         policy=Prescribed(order))
        for i, j in enumerate(order):
            x, y = traj.position(i + 0.5)
            th = 2 * math.pi * j / k
            # the far point of petal j sits at radius 2 along its axis
            assert x == pytest.approx(2 * math.cos(th), abs=1e-6)
            assert y == pytest.approx(2 * math.sin(th), abs=1e-6)

    def test_fold_hits_reports_origin_passages(self):
        sys = build_petal_system(2)
        traj = integrate(sys, (0.0, 0.0), 5.0, policy=Prescribed([0, 1] * 3))
        assert len(fold_hits(traj)) == 6


class TestValidation:
    def test_time_bounds(self):
        sys = build_zk(2)
        with pytest.raises(DomainError):
            integrate(sys, (0.0, 0.0), 0.0)
        with pytest.raises(DomainError):
            integrate(sys, (0.0, 0.0), 2e4)

    def test_dt_bounds(self):
        sys = build_zk(2)
        with pytest.raises(DomainError):
            integrate(sys, (0.0, 0.0), 1.0, dt=0.0)
        with pytest.raises(DomainError):
            integrate(sys, (0.0, 0.0), 1.0, dt=0.5)

    def test_off_curve_start_rejected(self):
        sys = build_zk(3)
        with pytest.raises(DomainError):
            integrate(sys, (0.3, 0.5), 1.0)

    def test_mid_line_start_away_from_station_rejected(self):
        sys = build_zk(3)
        with pytest.raises(DomainError):
            integrate(sys, (0.25, 0.0), 1.0, policy=Prescribed([1]))


def test_trajectory_csv_round_trip(tmp_path):
    sys = build_zk(2)
    traj = integrate(sys, (0.0, 0.0), 2.0, policy=ALWAYS_RIGHT)
    path = tmp_path / "traj.csv"
    save_trajectory_csv(traj, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "t,x,y"
    assert len(lines) == len(traj.times) + 1
    t, x, y = (float(v) for v in lines[-1].split(","))
    assert t == pytest.approx(2.0)
    assert (x, y) == pytest.approx(traj.position(2.0), abs=1e-9)


def test_events_jsonl(tmp_path):
    sys = build_zk(3)
    traj = integrate(sys, (-0.5, 0.0), 2.6, policy=Prescribed([1, 3, 2]))
    path = tmp_path / "events.jsonl"
    save_events_jsonl(traj, path)
    rows = [json.loads(line) for line in path.read_text().strip().split("\n")]
    assert len(rows) == len(traj.events)
    kinds = {r["kind"] for r in rows}
    assert kinds <= {EVENT_CROSSING, EVENT_FOLD, EVENT_ORIGIN}
    assert rows[0]["t"] == pytest.approx(traj.events[0].t)

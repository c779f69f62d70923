"""Arc coding, transition graphs, word counting and the metrics."""

import math

import numpy as np
import pytest

from psvfkit.errors import DomainError
from psvfkit.flow import Prescribed, RandomWeighted, integrate
from psvfkit.model import build_petal_system, build_zk
from psvfkit.symbolic import (
    Itinerary,
    admissible,
    admissible_word_count,
    arc_partition,
    golden_mean_graph,
    itinerary,
    petal_transition_graph,
    random_admissible_word,
    realize_word,
    seq_distance,
    shift,
    traj_distance,
    zk_arcs,
    zk_transition_graph,
)


class TestArcPartition:
    def test_chain_arc_count(self):
        for k in (2, 3, 5):
            assert len(zk_arcs(k).arcs) == 2 * k - 2

    def test_locate_boundary_and_interior(self):
        part = zk_arcs(3)
        assert part.locate((-0.8, 0.1)) == 0
        assert part.locate((-0.8, -0.1)) == 0      # both sheets of the loop
        assert part.locate((0.8, 0.05)) == 3
        assert part.locate((0.0, 0.05)) == 1       # upper interior
        assert part.locate((0.0, -0.05)) == 2      # lower interior
        # end stations belong to their boundary loops
        assert part.locate((-1.0, 0.0)) == 0
        assert part.locate((1.0, 0.0)) == 3

    def test_locate_fold_is_ambiguous(self):
        part = zk_arcs(3)
        assert part.locate((-0.5, 0.0)) is None
        assert part.locate((0.5, 0.0)) is None

    def test_petal_locate(self):
        sys = build_petal_system(4)
        part = arc_partition(sys)
        h = float(sys.curve(1.0))
        assert part.locate((1.0, h)) == 0
        assert part.locate((1.0, -h)) == 0         # return leg, same petal
        assert part.locate((-h, 1.0)) == 1         # petal 0 rotated a quarter
        assert part.locate((0.0, 0.0)) is None     # origin anchors, no arc


class TestTransitionGraphs:
    def test_chain3_adjacency_frozen(self):
        A = zk_transition_graph(3).adjacency()
        assert A.tolist() == [[1, 1, 0, 0],
                              [0, 0, 1, 1],
                              [1, 1, 0, 0],
                              [0, 0, 1, 1]]

    def test_chain2_adjacency(self):
        A = zk_transition_graph(2).adjacency()
        assert A.tolist() == [[1, 1], [1, 1]]

    @pytest.mark.parametrize("k", [3, 4, 5, 6])
    def test_chain_successor_rules(self, k):
        g = zk_transition_graph(k)
        m = 2 * k - 2
        assert g.successors(0) == (0, 1)
        assert g.successors(m - 1) == (m - 2, m - 1)
        for a in range(1, m - 1):
            if a % 2 == 1:
                assert g.successors(a) == (a + 1, a + 2)
            else:
                assert g.successors(a) == (a - 2, a - 1)

    def test_every_chain_arc_has_two_exits(self):
        for k in range(2, 8):
            A = zk_transition_graph(k).adjacency()
            assert np.all(A.sum(axis=1) == 2)
            assert np.all(A.sum(axis=0) == 2)

    def test_petal_graph_is_complete(self):
        A = petal_transition_graph(5).adjacency()
        assert np.array_equal(A, np.ones((5, 5), dtype=A.dtype))

    def test_hub_graph_shape(self):
        A = golden_mean_graph(4).adjacency()
        expect = np.zeros((4, 4), dtype=A.dtype)
        expect[0, :] = 1
        expect[:, 0] = 1
        assert np.array_equal(A, expect)

    def test_to_dot(self):
        text = zk_transition_graph(2).to_dot()
        assert text.startswith("digraph")
        assert "->" in text


class TestWordCounting:
    def test_chain3_small_counts(self):
        g = zk_transition_graph(3)
        assert [admissible_word_count(g, n) for n in (1, 2, 3)] == [4, 8, 16]

    def test_chain3_doubles_every_step(self):
        g = zk_transition_graph(3)
        assert admissible_word_count(g, 20) == 4 * 2 ** 19

    def test_hub_count_ratio_approaches_radius(self):
        g = golden_mean_graph(4)
        c30 = admissible_word_count(g, 30)
        c31 = admissible_word_count(g, 31)
        assert c31 / c30 == pytest.approx((1 + math.sqrt(13)) / 2, abs=1e-3)

    def test_counts_are_exact_integers(self):
        g = golden_mean_graph(4)
        assert isinstance(admissible_word_count(g, 40), int)

    def test_admissible(self):
        g = zk_transition_graph(3)
        assert admissible(g, (0, 1, 3, 2, 0))
        assert not admissible(g, (0, 2))           # 0 cannot reach 2
        assert not admissible(g, (1, 1))           # interior arcs do not loop
        assert admissible(g, (3,))

    def test_random_words_are_admissible(self):
        g = zk_transition_graph(4)
        rng = np.random.default_rng(0)
        for _ in range(20):
            assert admissible(g, random_admissible_word(g, 25, rng))


@pytest.mark.parametrize("k, seed", [(2, 0), (2, 1), (3, 2), (3, 3)])
def test_chain_realization_recovers_word(k, seed):
    g = zk_transition_graph(k)
    rng = np.random.default_rng(seed)
    word = random_admissible_word(g, 15, rng)
    traj = realize_word(build_zk(k), word)
    assert itinerary(traj).symbols[:15] == tuple(word)


def test_petal_realization_recovers_word():
    g = petal_transition_graph(4)
    rng = np.random.default_rng(7)
    word = random_admissible_word(g, 10, rng)
    traj = realize_word(build_petal_system(4), word)
    assert itinerary(traj).symbols[:10] == tuple(word)


def test_shift_commutes_with_time_one_map():
    # reading the itinerary after advancing the clock one unit equals
    # dropping the first symbol, on the indices both readings define
    sys = build_zk(3)
    word = (1, 3, 3, 2, 0, 0, 1, 2)
    traj = realize_word(sys, word)
    it = itinerary(traj)
    moved = itinerary(traj.time_shift(1.0))
    hi = min(moved.end, shift(it, 1).end)
    assert moved.window(0, hi) == shift(it, 1).window(0, hi) == word[1:hi + 1]


class TestItinerary:
    def test_window(self):
        it = Itinerary((5, 6, 7, 8), base=2)
        assert it.end == 6
        assert it.window(3, 5) == (6, 7)
        with pytest.raises(DomainError):
            it.window(1, 3)
        with pytest.raises(DomainError):
            it.window(4, 7)

    def test_shift_bounds(self):
        it = Itinerary((1, 2, 3))
        assert shift(it, 2).symbols == (3,)
        with pytest.raises(DomainError):
            shift(it, 4)

    def test_unwatched_trajectory_raises(self):
        sys = build_zk(2)
        traj = integrate(sys, (0.0, 0.0), 0.3, policy=Prescribed([0]))
        with pytest.raises(DomainError):
            itinerary(traj)    # too short to read any symbol


class TestSeqDistance:
    def test_identical_is_zero(self):
        it = Itinerary((1, 2, 3))
        assert seq_distance(it, it) == 0.0

    def test_known_values(self):
        a = Itinerary((0, 0, 0))
        assert seq_distance(a, Itinerary((1, 0, 0))) == 1.0
        assert seq_distance(a, Itinerary((0, 0, 3))) == pytest.approx(0.75)

    def test_symmetry_and_triangle(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            xs = [Itinerary(tuple(rng.integers(0, 4, 8))) for _ in range(3)]
            dab = seq_distance(xs[0], xs[1])
            dba = seq_distance(xs[1], xs[0])
            assert dab == pytest.approx(dba)
            assert dab <= seq_distance(xs[0], xs[2]) \
                + seq_distance(xs[2], xs[1]) + 1e-12

    def test_window_clips(self):
        a = Itinerary((0,) * 6)
        b = Itinerary((0, 0, 0, 0, 0, 1))
        assert seq_distance(a, b, window=3) == 0.0
        assert seq_distance(a, b) == pytest.approx(2.0 ** -5)

    def test_disjoint_ranges_raise(self):
        with pytest.raises(DomainError):
            seq_distance(Itinerary((1,), base=0), Itinerary((1,), base=5))


class TestTrajDistance:
    def test_same_word_gives_zero(self):
        sys = build_zk(3)
        t1 = realize_word(sys, (1, 3, 2, 0))
        t2 = realize_word(sys, (1, 3, 2, 0))
        assert traj_distance(t1, t2, window=3) == pytest.approx(0.0, abs=1e-9)

    def test_diverging_words_separate(self):
        sys = build_zk(3)
        t1 = realize_word(sys, (1, 3, 2, 0))
        t2 = realize_word(sys, (1, 2, 0, 0))
        d = traj_distance(t1, t2, window=3)
        assert d > 0.1

    def test_closer_agreement_means_smaller_distance(self):
        sys = build_zk(3)
        base = realize_word(sys, (1, 3, 2, 0, 1))
        late = realize_word(sys, (1, 3, 2, 1, 2))     # differs from step 3
        early = realize_word(sys, (1, 2, 0, 0, 1))    # differs from step 1
        assert traj_distance(base, late, 4) < traj_distance(base, early, 4)

    def test_unanchored_rejected(self):
        sys = build_zk(3)
        traj = integrate(sys, (0.3, float(sys.curve(0.3))), 5.0,
                         policy=RandomWeighted(0.5, 0.5), seed=0)
        with pytest.raises(DomainError):
            traj_distance(traj, traj, window=2)

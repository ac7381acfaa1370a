import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fisherknn.errors import DimensionError
from fisherknn.knn import classify, distance_report, euclidean_distance, leave_one_out_min_distances, suggest_threshold

from oracles import naive_knn

LINE = np.array([[0.0, 1.0, 10.0, 11.0]])
LINE_LABELS = ["A", "A", "B", "B"]


class TestEuclidean:
    def test_345(self):
        assert euclidean_distance([0.0, 0.0], [3.0, 4.0]) == 5.0

    def test_self(self, rng):
        x = rng.random(7)
        assert euclidean_distance(x, x) == 0.0

    def test_against_reversed_accumulation(self, rng):
        for _ in range(50):
            x, y = rng.standard_normal(12), rng.standard_normal(12)
            acc = 0.0
            for a, b in reversed(list(zip(x, y))):
                acc += (a - b) * (a - b)
            assert euclidean_distance(x, y) == pytest.approx(math.sqrt(acc), rel=1e-12, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            euclidean_distance([1.0], [1.0, 2.0])

    def test_metric_properties(self, rng):
        for _ in range(200):
            x, y, z = rng.standard_normal((3, 5))
            assert abs(euclidean_distance(x, y) - euclidean_distance(y, x)) <= 1e-12
            assert euclidean_distance(x, z) <= euclidean_distance(x, y) + euclidean_distance(y, z) + 1e-9


class TestDistanceReport:
    def test_exact_match(self):
        exemplars = np.array([[0.0, 5.0, 2.0], [0.0, 5.0, 2.0]])
        r = distance_report([2.0, 2.0], exemplars)
        assert r.min == 0.0 and r.min_index == 2

    def test_tie_lowest_index(self):
        r = distance_report([0.0, 0.0], np.array([[1.0, 0.0, -1.0], [0.0, 1.0, 0.0]]))
        assert r.min_index == 0 and r.distances.tolist() == [1.0, 1.0, 1.0]

    def test_statistics(self, rng):
        probe, ex = rng.standard_normal(4), rng.standard_normal((4, 9))
        r = distance_report(probe, ex)
        direct = [euclidean_distance(probe, ex[:, i]) for i in range(9)]
        np.testing.assert_allclose(r.distances, direct, rtol=1e-14)
        assert r.column_sum == pytest.approx(sum(direct), rel=1e-14)
        assert r.sqrt_sum == pytest.approx(sum(math.sqrt(v) for v in direct), rel=1e-14)
        assert r.mean == pytest.approx(sum(direct) / 9, rel=1e-14)
        assert r.min == min(direct) and r.min_index == direct.index(min(direct))
        assert 0 <= r.min <= r.mean <= r.column_sum

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            distance_report([1.0, 2.0], np.ones((3, 4)))


class TestClassify:
    def test_k1_exact(self):
        v = classify([10.0], LINE, LINE_LABELS, 1)
        assert v.label == "B" and v.min_distance == 0.0 and not v.rejected

    def test_three_neighbour_vote(self):
        v = classify([0.4], LINE, LINE_LABELS, 3)
        assert v.neighbors == (0, 1, 2)
        assert v.votes == {"A": 2, "B": 1}
        assert v.label == "A"

    def test_threshold_rejects(self):
        v = classify([0.4], LINE, LINE_LABELS, 3, threshold=0.1)
        assert v.rejected and v.label is None and v.candidate == "A"
        assert v.threshold_used == 0.1 and v.min_distance == pytest.approx(0.4)

    def test_threshold_accepts_at_boundary(self):
        assert classify([0.5], LINE, LINE_LABELS, 1, threshold=0.5).label == "A"

    def test_vote_tie_goes_to_nearest(self, caplog):
        # k=2: neighbours 1 (A, 4.3 away) and 10 (B, 4.7 away)
        with caplog.at_level(logging.INFO, logger="fisherknn.knn"):
            v = classify([5.3], LINE, LINE_LABELS, 2)
        assert v.neighbors == (1, 2)
        assert v.vote_tie and v.label == "A"
        assert "vote tie" in caplog.text

    def test_vote_tie_equal_distance_goes_to_name_order(self):
        ex = np.array([[-1.0, 1.0]])
        assert classify([0.0], ex, ["zeta", "alpha"], 2).label == "alpha"
        assert classify([0.0], ex, ["alpha", "zeta"], 2).label == "alpha"

    def test_boundary_tie_lowest_index(self, caplog):
        ex = np.array([[0.0, 2.0, -2.0, 2.0]])
        with caplog.at_level(logging.INFO, logger="fisherknn.knn"):
            v = classify([0.0], ex, ["a", "b", "c", "d"], 2)
        assert v.neighbors == (0, 1) and v.boundary_tie
        assert "k-th neighbour tie" in caplog.text

    @pytest.mark.parametrize("k", [0, 5])
    def test_k_out_of_range(self, k):
        with pytest.raises(DimensionError):
            classify([0.0], LINE, LINE_LABELS, k)

    def test_label_mismatch(self):
        with pytest.raises(DimensionError):
            classify([0.0], LINE, ["A"], 1)

    def test_k1_is_argmin(self, rng):
        ex = rng.standard_normal((3, 15))
        labels = [f"c{i % 4}" for i in range(15)]
        for _ in range(100):
            probe = rng.standard_normal(3)
            r = distance_report(probe, ex)
            assert classify(probe, ex, labels, 1).label == labels[r.min_index]

    def test_permutation_invariance(self, rng):
        ex = rng.integers(-3, 4, size=(2, 20)).astype(float)
        labels = [f"c{i % 3}" for i in range(20)]
        perm = rng.permutation(20)
        ex_p, labels_p = ex[:, perm], [labels[i] for i in perm]
        for _ in range(200):
            probe = rng.integers(-3, 4, size=2).astype(float)
            for k in (1, 3, 6):
                a = classify(probe, ex, labels, k)
                b = classify(probe, ex_p, labels_p, k)
                # boundary ties may pick different members after permuting; compare those cases via votes only
                if not (a.boundary_tie or b.boundary_tie):
                    assert a.label == b.label and a.votes == b.votes
                assert a.min_distance == b.min_distance


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 50),
    st.integers(1, 4),
    st.integers(2, 6),
    st.integers(0, 2**32 - 1),
    st.booleans(),
)
def test_agrees_with_naive_oracle(p, dim, n_classes, seed, grid):
    rng = np.random.default_rng(seed)
    if grid:  # integer coordinates provoke many exact ties
        ex = rng.integers(-2, 3, size=(dim, p)).astype(float)
        probe = rng.integers(-2, 3, size=dim).astype(float)
    else:
        ex = rng.standard_normal((dim, p))
        probe = rng.standard_normal(dim)
    labels = [f"c{int(i)}" for i in rng.integers(0, n_classes, size=p)]
    threshold = float(rng.uniform(0, 2)) if seed % 2 else None
    for k in range(1, p + 1):
        v = classify(probe, ex, labels, k, threshold)
        assert (v.label, v.candidate) == naive_knn(probe, ex, labels, k, threshold)


class TestThreshold:
    def test_margin(self):
        assert suggest_threshold([1.0, 2.0, 3.0], 1.5) == 4.5

    def test_identity_margin(self):
        assert suggest_threshold([0.25], 1.0) == 0.25

    def test_empty(self):
        with pytest.raises(ValueError):
            suggest_threshold([], 1.5)

    @pytest.mark.parametrize("margin", [0.0, -1.0])
    def test_margin_positive(self, margin):
        with pytest.raises(ValueError):
            suggest_threshold([1.0], margin)

    def test_leave_one_out(self):
        assert leave_one_out_min_distances(LINE).tolist() == [1.0, 1.0, 1.0, 1.0]
        ex = np.array([[0.0, 3.0, 10.0]])
        assert leave_one_out_min_distances(ex).tolist() == [3.0, 3.0, 7.0]
        with pytest.raises(DimensionError):
            leave_one_out_min_distances(np.zeros((2, 1)))

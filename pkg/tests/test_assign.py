"""Maximum assignment: optimality against a permutation oracle, constraints, curve."""

import itertools

import numpy as np
import pytest

from cogmatrix import (
    Assignment,
    GoldPairs,
    ResourceLimitError,
    ScoreMatrix,
    hungarian_max,
    max_assignment_curve,
    save_assignment,
)


def mat(scores):
    scores = np.asarray(scores, dtype=np.float64)
    rows = tuple(f"r{i}" for i in range(scores.shape[0]))
    cols = tuple(f"c{j}" for j in range(scores.shape[1]))
    return ScoreMatrix(rows, cols, scores)


def brute_force_max_total(scores):
    """Exhaustive search over all one-to-one assignments of the short side."""
    n1, n2 = scores.shape
    best = -np.inf
    if n1 <= n2:
        for cols in itertools.permutations(range(n2), n1):
            best = max(best, sum(scores[i, c] for i, c in enumerate(cols)))
    else:
        for rows in itertools.permutations(range(n1), n2):
            best = max(best, sum(scores[r, j] for j, r in enumerate(rows)))
    return best


class TestHungarianMax:
    def test_diagonal_dominance(self):
        a = hungarian_max(mat([[2.0, 1.0], [1.0, 2.0]]))
        assert set(a.pairs) == {(0, 0), (1, 1)}
        assert a.total == 4.0

    def test_anti_diagonal_dominance(self):
        a = hungarian_max(mat([[1.0, 2.0], [2.0, 1.0]]))
        assert set(a.pairs) == {(0, 1), (1, 0)}
        assert a.total == 4.0

    def test_matches_brute_force_on_random_squares(self):
        rng = np.random.default_rng(77)
        for _ in range(60):
            n = int(rng.integers(1, 7))
            scores = rng.normal(size=(n, n))
            m = mat(scores)
            a = hungarian_max(m)
            assert a.total == pytest.approx(brute_force_max_total(scores), abs=1e-10)

    def test_matches_brute_force_on_rectangles(self):
        rng = np.random.default_rng(78)
        for _ in range(40):
            n1 = int(rng.integers(1, 6))
            n2 = int(rng.integers(1, 6))
            scores = rng.normal(size=(n1, n2))
            a = hungarian_max(mat(scores))
            assert len(a) == min(n1, n2)
            assert a.total == pytest.approx(brute_force_max_total(scores), abs=1e-10)

    def test_one_to_one_constraints_hold(self):
        rng = np.random.default_rng(79)
        for _ in range(20):
            a = hungarian_max(mat(rng.random((5, 8))))
            rows = [i for i, _ in a.pairs]
            cols = [j for _, j in a.pairs]
            assert len(set(rows)) == len(rows)
            assert len(set(cols)) == len(cols)

    def test_constant_shift_leaves_argmax_unchanged(self):
        rng = np.random.default_rng(80)
        scores = rng.random((6, 6))
        base = hungarian_max(mat(scores))
        shifted = hungarian_max(mat(scores + 3.7))
        assert set(base.pairs) == set(shifted.pairs)
        assert shifted.total == pytest.approx(base.total + 3.7 * 6, abs=1e-9)

    def test_size_guard(self):
        m = mat(np.zeros((3, 2)))
        with pytest.raises(ResourceLimitError, match="exceeds"):
            hungarian_max(m, max_side=2)

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValueError):
            hungarian_max(ScoreMatrix((), ("c0",), np.zeros((0, 1))))


class TestAssignmentType:
    def test_duplicate_row_rejected(self):
        with pytest.raises(ValueError, match="one-to-one"):
            Assignment(pairs=((0, 0), (0, 1)), scores=(1.0, 2.0), total=3.0)

    def test_duplicate_col_rejected(self):
        with pytest.raises(ValueError, match="one-to-one"):
            Assignment(pairs=((0, 1), (2, 1)), scores=(1.0, 2.0), total=3.0)


class TestMaxAssignmentCurve:
    def test_perfect_assignment_reaches_full_recall(self):
        m = mat([[0.9, 0.1], [0.2, 0.8]])
        a = hungarian_max(m)
        gold = GoldPairs(frozenset({("r0", "c0"), ("r1", "c1")}))
        curve = max_assignment_curve(m, a, gold)
        assert (curve.precisions == 1.0).all()
        assert curve.recalls[-1] == 1.0

    def test_leading_point_is_empty_prediction(self):
        m = mat([[0.9, 0.1], [0.2, 0.8]])
        a = hungarian_max(m)
        gold = GoldPairs(frozenset({("r0", "c0")}))
        curve = max_assignment_curve(m, a, gold)
        assert curve.recalls[0] == 0.0
        assert curve.precisions[0] == 1.0
        assert curve.thresholds[0] == np.inf

    def test_three_pair_sweep_by_hand(self):
        # assignment pairs score 0.9 (gold), 0.6 (not), 0.3 (gold); |gold|=3
        scores = np.array([
            [0.9, 0.0, 0.0],
            [0.0, 0.6, 0.0],
            [0.0, 0.0, 0.3],
        ])
        m = mat(scores)
        a = hungarian_max(m)
        gold = GoldPairs(frozenset({("r0", "c0"), ("r2", "c2"), ("r1", "c1x")}))
        curve = max_assignment_curve(m, a, gold)
        # prefix walk: (1/1, 1/3), (1/2, 1/3), (2/3, 2/3) after the empty point
        assert curve.thresholds.tolist() == [np.inf, 0.9, 0.6, 0.3]
        assert curve.precisions.tolist() == [1.0, 1.0, 0.5, 2 / 3]
        assert curve.recalls.tolist() == [0.0, 1 / 3, 1 / 3, 2 / 3]

    def test_empty_gold_rejected(self):
        m = mat([[1.0]])
        a = hungarian_max(m)
        with pytest.raises(ValueError, match="gold"):
            max_assignment_curve(m, a, GoldPairs(frozenset()))


class TestPersistence:
    def test_save_assignment(self, tmp_path):
        m = mat([[2.0, 1.0], [1.0, 2.0]])
        a = hungarian_max(m)
        path = tmp_path / "assignment.tsv"
        save_assignment(m, a, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines == ["r0\tc0\t2.0", "r1\tc1\t2.0"]

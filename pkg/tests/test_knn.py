import logging

import numpy as np
import pytest

from conftest import brute_knn_score
from vad import ContractError, ValidationError, build_index, score, score_batch


def make_index(rows, ids=None, normalize=False):
    rows = [np.asarray(r, dtype=np.float64) for r in rows]
    ids = ids or [f"v{i}" for i in range(len(rows))]
    return build_index(zip(ids, rows), normalize=normalize)


class TestBuildIndex:
    def test_construction(self):
        index = make_index([[0, 0], [1, 0], [0, 1]])
        assert (index.size, index.dims) == (3, 2)
        assert index.ids == ("v0", "v1", "v2")

    def test_mixed_dims_rejected(self):
        with pytest.raises(ValidationError):
            make_index([[0, 0], [1, 0, 2]])

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            build_index([])

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            make_index([[np.inf, 0.0]])

    def test_single_vector_valid(self):
        assert make_index([[3.0]]).size == 1

    def test_rows_are_immutable(self):
        index = make_index([[1.0, 2.0]])
        with pytest.raises(ValueError):
            index.vectors[0, 0] = 9.0


class TestScore:
    def test_hand_example(self):
        # distances^2 from (1,1): {2, 1, 1}; mean of two smallest = 1.0
        index = make_index([[0, 0], [1, 0], [0, 1]])
        result = score(index, np.array([1.0, 1.0]), k=2)
        assert result.score == 1.0
        assert result.neighbor_ids == ("v1", "v2")
        assert result.neighbor_distances.tolist() == [1.0, 1.0]

    def test_self_distance_is_zero(self):
        index = make_index([[2.0, -3.0], [5.0, 5.0]])
        assert score(index, np.array([2.0, -3.0]), k=1).score == 0.0

    def test_single_vector_clamps_k(self):
        v = np.array([1.0, 2.0, 3.0])
        index = make_index([v])
        q = np.array([2.0, 2.0, 2.0])
        expected = float(((q - v) ** 2).sum())
        for k in (1, 2, 10):
            assert score(index, q, k).score == expected

    def test_clamp_logs_warning(self, caplog):
        index = make_index([[0.0]])
        with caplog.at_level(logging.WARNING, logger="vad.knn"):
            score(index, np.array([1.0]), k=5)
        assert any("clamping" in r.message for r in caplog.records)

    def test_ties_break_on_lower_row(self):
        index = make_index([[0.0, 0.0], [0.0, 0.0], [3.0, 0.0]], ids=["a", "b", "c"])
        q = np.zeros(2)
        assert score(index, q, k=1).neighbor_ids == ("a",)
        assert score(index, q, k=2).neighbor_ids == ("a", "b")

    def test_distances_sorted_ascending(self):
        rng = np.random.default_rng(3)
        index = make_index(rng.normal(size=(20, 4)))
        result = score(index, rng.normal(size=4), k=7)
        d = result.neighbor_distances
        assert (np.diff(d) >= 0).all()
        assert result.score == float(np.mean(d))

    def test_contract_errors(self):
        index = make_index([[0.0, 0.0]])
        with pytest.raises(ContractError):
            score(index, np.zeros(3), k=1)
        with pytest.raises(ContractError):
            score(index, np.zeros(2), k=0)
        with pytest.raises(ContractError):
            score(index, np.zeros(2), k=1.5)  # type: ignore[arg-type]
        with pytest.raises(ContractError):
            score(index, np.array([np.nan, 0.0]), k=1)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            n, d = int(rng.integers(1, 60)), int(rng.integers(1, 16))
            vectors = rng.normal(size=(n, d))
            index = make_index(vectors)
            q = rng.normal(size=d)
            k = int(rng.integers(1, 6))
            got = score(index, q, k).score
            expected = brute_knn_score(vectors, q, k)
            assert got == pytest.approx(expected, rel=1e-9)

    def test_monotone_in_k(self):
        rng = np.random.default_rng(19)
        index = make_index(rng.normal(size=(30, 5)))
        q = rng.normal(size=5)
        scores = [score(index, q, k).score for k in range(1, 31)]
        assert all(b >= a - 1e-15 for a, b in zip(scores, scores[1:]))

    def test_zero_law(self):
        v = np.array([1.0, 2.0])
        index = make_index([v, v, [9.0, 9.0]])
        assert score(index, v, k=2).score == 0.0
        assert score(index, v, k=3).score > 0.0


class TestNormalize:
    def test_rows_unit_norm(self):
        index = make_index([[3.0, 4.0]], normalize=True)
        assert np.allclose(np.linalg.norm(index.vectors, axis=1), 1.0)

    def test_query_scale_invariance(self):
        index = make_index([[1.0, 0.0], [0.0, 1.0]], normalize=True)
        q = np.array([2.0, 1.0])
        assert score(index, q, k=1).score == score(index, 10 * q, k=1).score

    def test_zero_vector_survives(self):
        index = make_index([[0.0, 0.0], [1.0, 0.0]], normalize=True)
        result = score(index, np.zeros(2), k=1)
        assert result.score == 0.0


class TestScoreBatch:
    def test_singleton_law(self):
        rng = np.random.default_rng(29)
        index = make_index(rng.normal(size=(10, 3)))
        q = rng.normal(size=3)
        batch = score_batch(index, [q], k=2)
        single = score(index, q, k=2)
        assert batch[0].score == single.score
        assert batch[0].neighbor_ids == single.neighbor_ids

    def test_repeated_query_determinism(self):
        index = make_index([[0.0, 0.0], [1.0, 1.0]])
        q = np.array([0.5, 0.5])
        a, b = score_batch(index, [q, q], k=2)
        assert a.score == b.score
        assert a.neighbor_ids == b.neighbor_ids

    def test_matches_sequential_mapping_bitwise(self):
        rng = np.random.default_rng(31)
        index = make_index(rng.normal(size=(50, 8)))
        queries = [rng.normal(size=8) for _ in range(200)]
        batch = score_batch(index, queries, k=3)
        for q, result in zip(queries, batch):
            assert result.score == score(index, q, k=3).score

    def test_thread_count_does_not_change_bits(self):
        rng = np.random.default_rng(41)
        index = make_index(rng.normal(size=(40, 6)))
        queries = [rng.normal(size=6) for _ in range(64)]
        sequential = score_batch(index, queries, k=2, threads=1)
        threaded = score_batch(index, queries, k=2, threads=8)
        assert [r.score for r in sequential] == [r.score for r in threaded]
        assert [r.neighbor_ids for r in sequential] == [r.neighbor_ids for r in threaded]

    def test_failing_query_reports_position(self):
        index = make_index([[0.0, 0.0]])
        queries = [np.zeros(2), np.zeros(3), np.zeros(4)]
        with pytest.raises(ContractError, match="query 1"):
            score_batch(index, queries, k=1)

"""Set metrics, micro aggregation, cross-validation, and timing reports."""

from __future__ import annotations

import numpy as np
import pytest

from semassay import evaluation as ev
from semassay.corpus import split_folds
from semassay.label_semantifier import train_labeler
from semassay.cluster_semantifier import fit_semantifier


class TestScoreSets:
    def test_hand_counts(self):
        score = ev.score_sets({"A", "B", "C"}, {"B", "C", "D"})
        assert (score.tp, score.fp, score.fn) == (2, 1, 1)

    def test_disjoint_sets(self):
        score = ev.score_sets({"A"}, {"B", "C"})
        assert (score.tp, score.fp, score.fn) == (0, 1, 2)

    def test_exact_match(self):
        score = ev.score_sets({"A", "B"}, {"A", "B"})
        assert (score.tp, score.fp, score.fn) == (2, 0, 0)

    def test_empty_sides(self):
        assert ev.score_sets(set(), {"A"}) == ev.SetScore(0, 0, 1)
        assert ev.score_sets({"A"}, set()) == ev.SetScore(0, 1, 0)
        assert ev.score_sets(set(), set()) == ev.SetScore(0, 0, 0)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            ev.SetScore(tp=-1, fp=0, fn=0)


class TestAggregateMicro:
    def test_two_assay_fixture(self):
        scores = [ev.SetScore(1, 1, 0), ev.SetScore(1, 0, 1)]
        p, r, f1 = ev.aggregate_micro(scores)
        np.testing.assert_allclose((p, r, f1), (2 / 3, 2 / 3, 2 / 3), rtol=1e-12)

    def test_micro_pools_counts_not_ratios(self):
        # per-assay mean of ratios would be 0.5; pooling gives 1/4, 1/2, 1/3
        scores = [ev.SetScore(1, 0, 0), ev.SetScore(0, 3, 1)]
        p, r, f1 = ev.aggregate_micro(scores)
        np.testing.assert_allclose((p, r, f1), (1 / 4, 1 / 2, 1 / 3), rtol=1e-12)

    def test_single_score_matches_direct_ratios(self):
        p, r, f1 = ev.aggregate_micro([ev.SetScore(3, 1, 2)])
        np.testing.assert_allclose((p, r), (3 / 4, 3 / 5), rtol=1e-12)
        np.testing.assert_allclose(f1, 2 * p * r / (p + r), rtol=1e-12)

    def test_all_zero_counts_give_zero_metrics(self):
        assert ev.aggregate_micro([ev.SetScore(0, 0, 0)]) == (0.0, 0.0, 0.0)

    def test_zero_precision_and_recall_conventions(self):
        # nothing predicted: P undefined -> 0; nothing gold: R undefined -> 0
        assert ev.aggregate_micro([ev.SetScore(0, 0, 5)]) == (0.0, 0.0, 0.0)
        assert ev.aggregate_micro([ev.SetScore(0, 5, 0)]) == (0.0, 0.0, 0.0)

    def test_swapping_fp_fn_swaps_precision_recall(self):
        rng = np.random.default_rng(55)
        for _ in range(200):
            tp, fp, fn = (int(x) for x in rng.integers(0, 20, size=3))
            p1, r1, f1a = ev.aggregate_micro([ev.SetScore(tp, fp, fn)])
            p2, r2, f1b = ev.aggregate_micro([ev.SetScore(tp, fn, fp)])
            np.testing.assert_allclose((p1, r1), (r2, p2), rtol=1e-12)
            np.testing.assert_allclose(f1a, f1b, rtol=1e-12)

    def test_f1_is_harmonic_mean_identity(self):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            tp = int(rng.integers(1, 30))
            fp = int(rng.integers(0, 30))
            fn = int(rng.integers(0, 30))
            p, r, f1 = ev.aggregate_micro([ev.SetScore(tp, fp, fn)])
            np.testing.assert_allclose(f1, 2 * p * r / (p + r), rtol=1e-12)
            np.testing.assert_allclose(f1, 2 * tp / (2 * tp + fp + fn), rtol=1e-12)

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            ev.aggregate_micro([])


class TestCrossValidate:
    def test_cluster_report_structure(self, planted_small):
        folds = split_folds(planted_small, train_size=24, test_size=8, seed=3)
        config = ev.ClusterConfig(k=4, threshold=1, seed=0, restarts=6)
        report = ev.cross_validate(planted_small, config, folds)
        assert len(report.per_fold) == 3
        expected_mean = tuple(
            sum(col) / 3 for col in zip(*report.per_fold)
        )
        np.testing.assert_allclose(report.mean, expected_mean, rtol=1e-12)
        assert report.timing.n_assays == 24
        assert report.config["method"] == "cluster"
        assert report.config["k"] == 4
        assert report.config["folds_seed"] == 3

    def test_cluster_scores_deterministic(self, planted_small):
        folds = split_folds(planted_small, train_size=24, test_size=8, seed=3)
        config = ev.ClusterConfig(k=4, threshold=1, seed=0, restarts=6)
        first = ev.cross_validate(planted_small, config, folds)
        second = ev.cross_validate(planted_small, config, folds)
        assert first.per_fold == second.per_fold
        assert first.mean == second.mean

    def test_labeler_report_structure(self, planted_small):
        folds = split_folds(planted_small, train_size=16, test_size=6, seed=1)
        config = ev.LabelerConfig(rf_count=15, epochs=5, lr=0.5, seed=2)
        report = ev.cross_validate(planted_small, config, folds)
        assert len(report.per_fold) == 3
        assert report.timing.n_assays == 18
        assert report.config["method"] == "labeler"
        assert report.config["rf_count"] == 15
        second = ev.cross_validate(planted_small, config, folds)
        assert report.per_fold == second.per_fold

    def test_perfect_separation_scores_one(self, planted_small):
        # vocab-disjoint groups with identical in-group statements: k = #groups
        # with enough restarts recovers the partition, and copying is exact
        folds = split_folds(planted_small, train_size=24, test_size=8, seed=3)
        config = ev.ClusterConfig(k=4, threshold=1, seed=0, restarts=6)
        report = ev.cross_validate(planted_small, config, folds)
        np.testing.assert_allclose(report.mean, (1.0, 1.0, 1.0), atol=1e-12)


class TestTimingReport:
    def test_cluster_timing_fields(self, planted_small):
        assays = list(planted_small.assays)
        model = fit_semantifier(assays[:24], k=4, seed=0, restarts=4)
        stats = ev.timing_report(model, assays[24:32], threshold=1)
        assert stats.n_assays == 8
        assert stats.median_ms > 0
        assert stats.mean_ms > 0
        np.testing.assert_allclose(
            stats.assays_per_sec, 1000.0 / stats.mean_ms, rtol=1e-9
        )
        assert stats.evaluations_per_assay is None

    def test_labeler_reports_evaluation_count(self, planted_small):
        from semassay.synthetic import statement_universe

        assays = list(planted_small.assays)
        universe = statement_universe(120, 10)
        model = train_labeler(
            assays[:10], rf_count=10, seed=0, epochs=2, universe=universe
        )
        stats = ev.timing_report(model, assays[10:16])
        assert stats.n_assays == 6
        assert stats.evaluations_per_assay == 120

    def test_empty_assays_rejected(self, planted_small):
        model = fit_semantifier(list(planted_small.assays)[:8], k=2, seed=0)
        with pytest.raises(ValueError):
            ev.timing_report(model, [])

    def test_unsupported_model_rejected(self):
        with pytest.raises(TypeError):
            ev.timing_report(object(), [None])


class TestRendering:
    def test_eval_table_has_fold_mean_and_timing_rows(self):
        report = ev.EvalReport(
            per_fold=((1.0, 0.5, 2 / 3), (0.8, 0.6, 0.685714285714)),
            mean=(0.9, 0.55, 0.676),
            timing=ev.TimingStats(4, 0.5, 0.6, 1666.7),
            config={"method": "cluster"},
        )
        table = ev.render_eval_table(report)
        lines = table.splitlines()
        assert "P" in lines[0] and "F1" in lines[0]
        assert len([l for l in lines if l.strip().startswith(("1", "2"))]) == 2
        assert any(line.strip().startswith("mean") for line in lines)
        assert "median 0.500 ms/assay" in table

    def test_sweep_table_layout(self):
        cells = [
            [(1.0, 1.0, 1.0), (0.5, 0.25, 1 / 3)],
            [(0.9, 0.8, 0.847), (0.7, 0.1, 0.175)],
        ]
        table = ev.render_sweep_table([10, 20], [1, 2], cells)
        lines = table.splitlines()
        assert "freq>=1" in lines[0] and "freq>=2" in lines[0]
        assert lines[1].count("F1") == 2
        assert lines[2].strip().startswith("10")
        assert lines[3].strip().startswith("20")

    def test_report_to_dict_shapes(self):
        report = ev.EvalReport(
            per_fold=((1.0, 1.0, 1.0),),
            mean=(1.0, 1.0, 1.0),
            timing=ev.TimingStats(1, 0.1, 0.1, 10000.0, evaluations_per_assay=7),
            config={"method": "labeler"},
        )
        payload = report.to_dict()
        assert payload["mean"] == {"precision": 1.0, "recall": 1.0, "f1": 1.0}
        assert payload["timing"]["evaluations_per_assay"] == 7
        assert "timing" not in report.to_dict(include_timing=False)
        assert "aggregation" in payload

import json
import random

import pytest

from cxrkit.bench import (
    BENCH_TASKS,
    CorruptedOracleModel,
    EvalItem,
    OracleModel,
    build_eval_set,
    recompute_aggregates,
    report,
    run_task,
)
from cxrkit.metrics import Box


@pytest.fixture(scope="module")
def eval_sets(test_pairs):
    rng = random.Random(41)
    return {task: build_eval_set(task, test_pairs, rng) for task in BENCH_TASKS}


class TestBuild:
    def test_view_items_have_three_options(self, eval_sets):
        for item in eval_sets["view"]:
            assert len(item.options) == 3
            assert set(item.options) == {"anterior-posterior (AP)", "posterior-anterior (PA)", "lateral"}

    def test_temporal_items_carry_two_images(self, eval_sets):
        assert eval_sets["temporal"]
        for item in eval_sets["temporal"]:
            assert len(item.images) == 2
            assert set(item.options) == {"improved", "stable", "worsened"}

    def test_binary_options_and_balance(self, eval_sets):
        items = eval_sets["disease_binary"]
        for item in items:
            assert set(item.options) == {"Yes", "No"}
        positive = sum(1 for it in items if it.options[it.answer] == "Yes") / len(items)
        assert 0.4 <= positive <= 0.6

    def test_finegrained_options_differ_in_one_word(self, eval_sets):
        for item in eval_sets["finegrained"]:
            a, b = (o.split() for o in item.options)
            assert len(a) == len(b)
            assert sum(1 for x, y in zip(a, b) if x != y) == 1

    def test_finegrained_side_phrasing(self, eval_sets):
        sides = [it for it in eval_sets["finegrained"]
                 if any("-sided" in o for o in it.options)]
        assert sides
        sample = sides[0]
        assert any(o.startswith(("left-sided", "right-sided")) for o in sample.options)

    def test_grounding_answers_are_boxes(self, eval_sets):
        for item in eval_sets["grounding"]:
            assert isinstance(item.answer, Box)

    def test_builder_refuses_train_rows(self, synth_dataset):
        pairs, _ = synth_dataset
        with pytest.raises(ValueError, match="test rows only"):
            build_eval_set("view", pairs, random.Random(0))

    def test_options_present_iff_mcq(self, eval_sets):
        for task, items in eval_sets.items():
            for item in items:
                if task in ("grounding", "findings_gen", "findings_summ"):
                    assert item.options is None
                else:
                    assert item.options is not None

    def test_summarization_is_text_only(self, eval_sets):
        for item in eval_sets["findings_summ"]:
            assert item.images == ()


class TestRunTask:
    def test_oracle_scores_one_on_every_task(self, eval_sets):
        for task, items in eval_sets.items():
            result = run_task(OracleModel(items), items)
            assert result.primary_score() == 1.0, task

    def test_no_box_response_scores_zero(self, eval_sets):
        class NoBox:
            def generate(self, images, instruction, max_len=64):
                return "somewhere in the lung"

        result = run_task(NoBox(), eval_sets["grounding"])
        assert result.primary_score() == 0.0

    def test_generation_failure_scored_not_raised(self, eval_sets):
        class Flaky:
            def __init__(self):
                self.n = 0

            def generate(self, images, instruction, max_len=64):
                self.n += 1
                if self.n % 2 == 0:
                    raise RuntimeError("boom")
                return "Yes"

        items = eval_sets["disease_binary"][:10]
        result = run_task(Flaky(), items)
        assert result.n == 10
        assert sum(1 for r in result.rows if r.error) == 5

    def test_option_order_robustness(self, eval_sets):
        rng = random.Random(99)
        shuffled = []
        for item in eval_sets["disease_single"]:
            order = list(range(len(item.options)))
            rng.shuffle(order)
            shuffled.append(EvalItem(
                item_id=item.item_id, task=item.task, instruction=item.instruction,
                images=item.images, answer=order.index(item.answer),
                options=tuple(item.options[k] for k in order),
            ))
        result = run_task(OracleModel(shuffled), shuffled)
        assert result.primary_score() == 1.0

    def test_aggregates_recompute_bit_exactly(self, eval_sets):
        items = eval_sets["disease_binary"]
        result = run_task(CorruptedOracleModel(items, 0.2, seed=3), items, seed=7)
        again = recompute_aggregates("disease_binary", result.rows, items, seed=7)
        assert again["accuracy"] == result.aggregates["accuracy"]


class TestReport:
    def test_tables_and_plot_data(self, eval_sets, tmp_path):
        results = {t: run_task(OracleModel(eval_sets[t]), eval_sets[t])
                   for t in ("view", "grounding")}
        out = report(results, tmp_path)
        assert (tmp_path / "summary.csv").exists()
        plot = json.loads((tmp_path / "plot_data.json").read_text())
        assert plot["grounding_iou"]["model"]
        assert any(bar["task"] == "view" for bar in plot["bars"])

    def test_identical_result_sets_surface_tie(self, eval_sets, tmp_path):
        items = eval_sets["view"]
        res = run_task(OracleModel(items), items)
        out = report({"a": {"view": res}, "b": {"view": res}}, tmp_path)
        assert out["comparisons"][0]["verdict"] == "tie"

    def test_pairwise_significance(self, eval_sets, tmp_path):
        items = eval_sets["disease_binary"]
        good = run_task(OracleModel(items), items)
        bad = run_task(CorruptedOracleModel(items, 0.3, seed=1), items)
        out = report({"good": {"disease_binary": good}, "bad": {"disease_binary": bad}}, tmp_path)
        comp = out["comparisons"][0]
        assert comp["best"] == "good"
        assert comp["p_value"] < 0.05

    def test_mismatched_item_sets_error(self, eval_sets, tmp_path):
        items = eval_sets["view"]
        res_full = run_task(OracleModel(items), items)
        res_half = run_task(OracleModel(items[: len(items) // 2]), items[: len(items) // 2])
        with pytest.raises(ValueError, match="mismatched"):
            report({"a": {"view": res_full}, "b": {"view": res_half}}, tmp_path)

    def test_rows_jsonl_written(self, eval_sets, tmp_path):
        results = {"view": run_task(OracleModel(eval_sets["view"]), eval_sets["view"])}
        report(results, tmp_path)
        rows_file = tmp_path / "model_view_items.jsonl"
        rows = [json.loads(line) for line in rows_file.read_text().splitlines()]
        assert len(rows) == len(eval_sets["view"])
        assert all(r["score"] == 1.0 for r in rows)

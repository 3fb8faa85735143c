"""Result tables, pairwise significance tests, and plot data emission."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..metrics.bootstrap import CIResult
from ..metrics.stats import paired_t


def _normalize_results(results) -> dict:
    # accept either {task: EvalResult} or {model: {task: EvalResult}}
    if results and all(hasattr(v, "rows") for v in results.values()):
        return {"model": dict(results)}
    return {m: dict(tasks) for m, tasks in results.items()}


def _pairwise(task, per_model):
    """Two-sided paired t between the best and second-best models on a task."""
    ranked = sorted(per_model.items(), key=lambda kv: kv[1].primary_score(), reverse=True)
    (best_name, best), (second_name, second) = ranked[0], ranked[1]
    best_ids = [r.item_id for r in best.rows]
    second_by_id = {r.item_id: r for r in second.rows}
    if set(best_ids) != set(second_by_id):
        raise ValueError(f"mismatched item sets for pairwise comparison on {task}")
    a = [r.score for r in best.rows]
    b = [second_by_id[r.item_id].score for r in best.rows]
    try:
        p = paired_t(a, b)
        verdict = "significant" if p < 0.05 else "not significant"
    except ValueError:
        p = None
        verdict = "tie"
    return {
        "task": task,
        "best": best_name,
        "second": second_name,
        "best_score": best.primary_score(),
        "second_score": second.primary_score(),
        "p_value": p,
        "verdict": verdict,
    }


def report(results, out_dir) -> dict:
    """Write per-item rows, a CSV summary, plot data, and pairwise comparisons."""
    per_model = _normalize_results(results)
    if not per_model or not any(per_model.values()):
        raise ValueError("report requires at least one task result")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    summary_rows = []
    bar_data = []
    iou_distributions = {}
    for model_name, tasks in per_model.items():
        for task, result in sorted(tasks.items()):
            rows_path = out_dir / f"{model_name}_{task}_items.jsonl"
            with open(rows_path, "w", encoding="utf-8") as f:
                for row in result.rows:
                    f.write(json.dumps(row.to_dict(), sort_keys=True) + "\n")
            for metric, value in sorted(result.aggregates.items()):
                if isinstance(value, CIResult):
                    summary_rows.append([model_name, task, metric, value.point, value.lo, value.hi, result.n])
                    bar_data.append({
                        "model": model_name, "task": task, "metric": metric,
                        "point": value.point, "lo": value.lo, "hi": value.hi,
                    })
                elif isinstance(value, (int, float)):
                    summary_rows.append([model_name, task, metric, value, "", "", result.n])
            if task == "grounding":
                iou_distributions[model_name] = list(result.aggregates.get("ious", []))

    with open(out_dir / "summary.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["model", "task", "metric", "point", "lo", "hi", "n"])
        writer.writerows(summary_rows)

    comparisons = []
    tasks_seen = sorted({t for tasks in per_model.values() for t in tasks})
    for task in tasks_seen:
        have = {m: tasks[task] for m, tasks in per_model.items() if task in tasks}
        if len(have) >= 2:
            comparisons.append(_pairwise(task, have))

    plot_data = {"bars": bar_data, "grounding_iou": iou_distributions}
    with open(out_dir / "plot_data.json", "w", encoding="utf-8") as f:
        json.dump(plot_data, f, indent=2, sort_keys=True)
    with open(out_dir / "comparisons.json", "w", encoding="utf-8") as f:
        json.dump(comparisons, f, indent=2, sort_keys=True)
    return {"summary_rows": len(summary_rows), "comparisons": comparisons}

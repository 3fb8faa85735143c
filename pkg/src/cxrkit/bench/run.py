"""Run a model over benchmark items and score with the metrics module."""

from __future__ import annotations

import numpy as np

from ..metrics.boxes import iou, map_at_thresholds, parse_box
from ..metrics.bootstrap import mean_ci
from ..metrics.labels import label_extract, label_f1
from ..metrics.options import match_option
from ..metrics.rouge import rouge_l
from .items import EvalResult, ItemRow, MCQ_TASKS

_MAX_LEN = {"mcq": 48, "grounding": 32, "generation": 230}


def _load_image(ref):
    if isinstance(ref, np.ndarray):
        return ref
    from PIL import Image

    with Image.open(ref) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def _score_item(task, item, response):
    if task in MCQ_TASKS:
        parsed = match_option(response, list(item.options))
        return parsed, 1.0 if parsed == item.answer else 0.0
    if task == "grounding":
        parsed = parse_box(response)
        return parsed, 0.0 if parsed is None else iou(parsed, item.answer)
    return response, rouge_l(response, item.answer)


def run_task(model, items, seed: int = 0) -> EvalResult:
    """Evaluate `model.generate` over items; failures score 0 and are logged."""
    items = list(items)
    if not items:
        raise ValueError("run_task: no items")
    task = items[0].task
    if any(it.task != task for it in items):
        raise ValueError("run_task items must share one task")
    max_len = _MAX_LEN["mcq" if task in MCQ_TASKS else
                       ("grounding" if task == "grounding" else "generation")]

    rows = []
    for item in sorted(items, key=lambda it: it.item_id):
        try:
            images = [_load_image(ref) for ref in item.images]
            response = model.generate(images, item.instruction, max_len=max_len)
            parsed, score = _score_item(task, item, response)
            rows.append(ItemRow(item.item_id, response, parsed, score))
        except Exception as exc:  # benchmark must rank imperfect models
            rows.append(ItemRow(item.item_id, "", None, 0.0, error=str(exc)))

    result = EvalResult(task=task, rows=rows, seed=seed)
    result.aggregates = recompute_aggregates(task, rows, items, seed=seed)
    return result


def recompute_aggregates(task, rows, items, seed: int = 0) -> dict:
    """Aggregates as a pure function of the per-item rows (bit-reproducible)."""
    scores = [r.score for r in rows]
    if task in MCQ_TASKS:
        return {"accuracy": mean_ci(scores, seed=seed)}
    if task == "grounding":
        return {
            "miou": mean_ci(scores, seed=seed),
            "map": map_at_thresholds(scores),
            "ious": list(scores),
        }
    by_id = {it.item_id: it for it in items}
    preds = [label_extract(r.response) for r in rows]
    refs = [label_extract(by_id[r.item_id].answer) for r in rows]
    out = {"rouge_l": mean_ci(scores, seed=seed)}
    for variant in ("micro14", "macro14", "micro5", "macro5"):
        out[f"label_f1_{variant}"] = label_f1(preds, refs, variant)
    return out

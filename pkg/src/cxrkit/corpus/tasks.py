"""Task family registry: one spec per category, every answer format covered.

Additional task families can be registered at runtime; the shipped set holds
the families the benchmark and trainer rely on.
"""

from __future__ import annotations

from .types import TaskSpec

TASK_REGISTRY = {
    spec.task_id: spec
    for spec in (
        TaskSpec("view_classification", "coarse_perception", frozenset({"view"}), "mcq",
                 mcq_k=3, placeholders=frozenset({"options"})),
        TaskSpec("disease_binary", "coarse_perception", frozenset({"labels"}), "mcq",
                 mcq_k=2, placeholders=frozenset({"finding", "options"})),
        TaskSpec("disease_single", "coarse_perception", frozenset({"labels"}), "mcq",
                 mcq_k=4, placeholders=frozenset({"options"})),
        TaskSpec("disease_multi", "coarse_perception", frozenset({"labels"}), "mcq",
                 mcq_k=4, placeholders=frozenset({"options"})),
        TaskSpec("temporal_classification", "coarse_perception", frozenset({"prior"}), "mcq",
                 mcq_k=3, n_images=2, placeholders=frozenset({"finding", "options"})),
        TaskSpec("phrase_grounding", "fine_perception", frozenset({"boxes"}), "box",
                 placeholders=frozenset({"phrase"})),
        TaskSpec("vqa", "question_answering", frozenset({"qa"}), "mcq",
                 mcq_k=2, placeholders=frozenset({"phrase", "options"})),
        TaskSpec("findings_generation", "text_generation", frozenset({"sections"}), "open_text",
                 placeholders=frozenset()),
        TaskSpec("findings_summarization", "text_generation", frozenset({"sections"}), "text_only",
                 n_images=0, placeholders=frozenset({"findings_section"})),
        TaskSpec("image_text_matching", "misc", frozenset({"sections"}), "mcq",
                 mcq_k=2, placeholders=frozenset({"phrase", "options"})),
    )
}

VIEW_OPTION_TEXT = {
    "AP": "anterior-posterior (AP)",
    "PA": "posterior-anterior (PA)",
    "lateral": "lateral",
}

BINARY_OPTIONS = ("Yes", "No")
PROGRESSION_OPTIONS = ("improved", "stable", "worsened")


def task_spec(task_id: str) -> TaskSpec:
    try:
        return TASK_REGISTRY[task_id]
    except KeyError:
        raise ValueError(f"unknown task_id {task_id!r}") from None

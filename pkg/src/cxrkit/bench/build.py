"""Benchmark task construction from test-split records.

Items are built only from test-split rows (the builder refuses anything else)
and each task is class-balanced to the extent the data allows. MCQ option
slots are uniformly randomized per item.
"""

from __future__ import annotations

import random

from ..corpus.compile import _record_rng, _render_options, make_mcq
from ..corpus.synth import finding_phrase, parse_finding_phrase
from ..corpus.tasks import BINARY_OPTIONS, PROGRESSION_OPTIONS, VIEW_OPTION_TEXT
from ..corpus.templates import templates_for
from .items import EvalItem

BENCH_TASKS = (
    "view", "temporal", "disease_binary", "disease_single", "disease_multi",
    "finegrained", "vqa", "grounding", "findings_gen", "findings_summ",
)

_FINEGRAINED_INSTRUCTIONS = (
    "Which description better matches the image? Options: {options}.",
    "Select the phrase that correctly describes this radiograph. Options: {options}.",
    "Pick the more accurate finding description. Options: {options}.",
    "Which of these findings is shown in the image? Options: {options}.",
)

_OTHER = {"left": "right", "right": "left", "mild": "severe", "severe": "mild",
          "upper": "lower", "lower": "upper"}


def _require_test_split(pairs):
    for record, _ in pairs:
        if record.split != "test":
            raise ValueError(f"eval sets are built from test rows only; got {record.split!r} "
                             f"for {record.image_id}")


def _balanced(groups: dict, rng: random.Random):
    """Downsample each class to the smallest class size (deterministic)."""
    sizes = [len(v) for v in groups.values() if v]
    if not sizes:
        return []
    n = min(sizes)
    out = []
    for key in sorted(groups):
        members = sorted(groups[key], key=lambda p: p[0].image_id)
        out.extend(rng.sample(members, n) if len(members) > n else members)
    return sorted(out, key=lambda p: p[0].image_id)


def build_eval_set(task: str, pairs, rng: random.Random, max_items: int | None = None):
    """EvalItems for one benchmark task over test-split (record, annotation) pairs."""
    if task not in BENCH_TASKS:
        raise ValueError(f"unknown bench task {task!r}")
    pairs = list(pairs)
    _require_test_split(pairs)
    base_seed = rng.getrandbits(64)
    builder = _TASK_BUILDERS[task]
    items = builder(pairs, base_seed)
    items.sort(key=lambda it: it.item_id)
    if max_items is not None and len(items) > max_items:
        pick = random.Random(base_seed).sample(range(len(items)), max_items)
        items = [items[i] for i in sorted(pick)]
    return items


def _rng_for(base_seed: int, task: str, key: str) -> random.Random:
    return _record_rng(base_seed, f"bench:{task}", key)


def _mcq_item(task, key, record, instruction_template, correct, pool, k, r, fields=None, images=None):
    options, answer = make_mcq(correct, pool, k, r)
    instruction = instruction_template.format(options=_render_options(options), **(fields or {}))
    return EvalItem(
        item_id=f"{task}:{key}",
        task=task,
        instruction=instruction,
        images=tuple(images) if images is not None else (record.pixels_ref,),
        answer=answer,
        options=tuple(options),
    )


def _build_view(pairs, base_seed):
    rng = random.Random(base_seed)
    groups = {v: [] for v in VIEW_OPTION_TEXT}
    for record, annotation in pairs:
        if record.view in groups:
            groups[record.view].append((record, annotation))
    items = []
    for record, _ in _balanced(groups, rng):
        r = _rng_for(base_seed, "view", record.image_id)
        template = r.choice(templates_for("view_classification")).template
        correct = VIEW_OPTION_TEXT[record.view]
        pool = [t for v, t in VIEW_OPTION_TEXT.items() if v != record.view]
        items.append(_mcq_item("view", record.image_id, record, template, correct, pool, 3, r))
    return items


def _build_temporal(pairs, base_seed):
    study_to_ref = {rec.study_id: rec.pixels_ref for rec, _ in pairs}
    items = []
    for record, annotation in pairs:
        if annotation.prior is None:
            continue
        prior_study, progression = annotation.prior
        prior_ref = study_to_ref.get(prior_study)
        if prior_ref is None:
            continue
        r = _rng_for(base_seed, "temporal", record.image_id)
        finding = r.choice(sorted(progression))
        correct = progression[finding]
        template = r.choice(templates_for("temporal_classification")).template
        pool = [p for p in PROGRESSION_OPTIONS if p != correct]
        items.append(_mcq_item("temporal", record.image_id, record, template, correct, pool, 3, r,
                               fields={"finding": finding},
                               images=(prior_ref, record.pixels_ref)))
    return items


def _build_binary(pairs, base_seed):
    rng = random.Random(base_seed)
    by_finding = {}
    for record, annotation in pairs:
        for finding, value in annotation.labels.items():
            if finding == "no finding" or value not in ("present", "absent"):
                continue
            by_finding.setdefault(finding, {"present": [], "absent": []})[value].append((record, annotation))
    items = []
    for finding in sorted(by_finding):
        chosen = _balanced(by_finding[finding], rng)
        for record, annotation in chosen:
            r = _rng_for(base_seed, "disease_binary", f"{record.image_id}:{finding}")
            template = r.choice(templates_for("disease_binary")).template
            correct = "Yes" if annotation.labels[finding] == "present" else "No"
            pool = [o for o in BINARY_OPTIONS if o != correct]
            items.append(_mcq_item("disease_binary", f"{record.image_id}:{finding}", record,
                                   template, correct, pool, 2, r, fields={"finding": finding}))
    return items


def _present_absent(annotation):
    present = sorted(f for f, v in annotation.labels.items() if f != "no finding" and v == "present")
    absent = sorted(f for f, v in annotation.labels.items() if f != "no finding" and v == "absent")
    return present, absent


def _build_single(pairs, base_seed):
    items = []
    for record, annotation in pairs:
        present, absent = _present_absent(annotation)
        if not present or len(absent) < 3:
            continue
        r = _rng_for(base_seed, "disease_single", record.image_id)
        template = r.choice(templates_for("disease_single")).template
        correct = r.choice(present)
        items.append(_mcq_item("disease_single", record.image_id, record, template, correct, absent, 4, r))
    return items


def _build_multi(pairs, base_seed):
    items = []
    for record, annotation in pairs:
        present, absent = _present_absent(annotation)
        if not present:
            continue
        r = _rng_for(base_seed, "disease_multi", record.image_id)
        universe = present + absent
        correct = ", ".join(present)
        distractors = set()
        attempts = 0
        while len(distractors) < 3 and attempts < 200:
            attempts += 1
            size = r.randint(1, max(1, min(len(universe), len(present) + 1)))
            subset = ", ".join(sorted(r.sample(universe, size)))
            if subset != correct:
                distractors.add(subset)
        if len(distractors) < 3:
            continue
        template = r.choice(templates_for("disease_multi")).template
        items.append(_mcq_item("disease_multi", record.image_id, record, template, correct, distractors, 4, r))
    return items


def _build_finegrained(pairs, base_seed):
    items = []
    for record, annotation in pairs:
        for phrase in sorted(annotation.boxes):
            severity, side, finding, region = parse_finding_phrase(phrase)
            r = _rng_for(base_seed, "finegrained", f"{record.image_id}:{finding}")
            attribute = r.choice(("side", "severity", "region"))
            if attribute == "side":
                correct = f"{side}-sided {finding}"
                wrong = f"{_OTHER[side]}-sided {finding}"
            elif attribute == "severity":
                correct = f"{severity} {finding}"
                wrong = f"{_OTHER[severity]} {finding}"
            else:
                correct = f"{finding} in the {region} zone"
                wrong = f"{finding} in the {_OTHER[region]} zone"
            template = r.choice(_FINEGRAINED_INSTRUCTIONS)
            items.append(_mcq_item("finegrained", f"{record.image_id}:{finding}", record,
                                   template, correct, [wrong], 2, r))
    return items


def _build_vqa(pairs, base_seed):
    rng = random.Random(base_seed)
    groups = {"Yes": [], "No": []}
    staged = []
    for record, annotation in pairs:
        if not annotation.qa:
            continue
        r = _rng_for(base_seed, "vqa", record.image_id)
        question, answer = r.choice(sorted(annotation.qa))
        if answer not in BINARY_OPTIONS:
            continue
        staged.append((record, annotation, question, answer, r))
        groups[answer].append((record, annotation))
    keep_ids = {rec.image_id for rec, _ in _balanced(groups, rng)}
    items = []
    for record, annotation, question, answer, r in staged:
        if record.image_id not in keep_ids:
            continue
        template = r.choice(templates_for("vqa")).template
        pool = [o for o in BINARY_OPTIONS if o != answer]
        items.append(_mcq_item("vqa", record.image_id, record, template, answer, pool, 2, r,
                               fields={"phrase": question}))
    return items


def _build_grounding(pairs, base_seed):
    items = []
    for record, annotation in pairs:
        if not annotation.boxes:
            continue
        r = _rng_for(base_seed, "grounding", record.image_id)
        phrase = r.choice(sorted(annotation.boxes))
        template = r.choice(templates_for("phrase_grounding")).template
        items.append(EvalItem(
            item_id=f"grounding:{record.image_id}",
            task="grounding",
            instruction=template.format(phrase=phrase),
            images=(record.pixels_ref,),
            answer=annotation.boxes[phrase][0],
        ))
    return items


def _build_findings_gen(pairs, base_seed):
    items = []
    for record, annotation in pairs:
        findings = annotation.sections.get("findings")
        if not findings:
            continue
        r = _rng_for(base_seed, "findings_gen", record.image_id)
        template = r.choice(templates_for("findings_generation")).template
        items.append(EvalItem(
            item_id=f"findings_gen:{record.image_id}",
            task="findings_gen",
            instruction=template,
            images=(record.pixels_ref,),
            answer=findings,
        ))
    return items


def _build_findings_summ(pairs, base_seed):
    items = []
    for record, annotation in pairs:
        findings = annotation.sections.get("findings")
        impression = annotation.sections.get("impression")
        if not findings or not impression:
            continue
        r = _rng_for(base_seed, "findings_summ", record.image_id)
        template = r.choice(templates_for("findings_summarization")).template
        items.append(EvalItem(
            item_id=f"findings_summ:{record.image_id}",
            task="findings_summ",
            instruction=template.format(findings_section=findings),
            images=(),
            answer=impression,
        ))
    return items


_TASK_BUILDERS = {
    "view": _build_view,
    "temporal": _build_temporal,
    "disease_binary": _build_binary,
    "disease_single": _build_single,
    "disease_multi": _build_multi,
    "finegrained": _build_finegrained,
    "vqa": _build_vqa,
    "grounding": _build_grounding,
    "findings_gen": _build_findings_gen,
    "findings_summ": _build_findings_summ,
}

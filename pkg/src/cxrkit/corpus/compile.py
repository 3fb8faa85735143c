"""Triplet compilation: template sampling and MCQ construction per record.

Every random choice is driven by a per-record generator derived from the task
seed and the record id, so compilation order (or parallel fan-out) cannot
change the output; results are sorted by record id.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .tasks import BINARY_OPTIONS, PROGRESSION_OPTIONS, VIEW_OPTION_TEXT, task_spec
from .types import Triplet


def make_mcq(correct: str, distractor_pool, k: int, rng: random.Random):
    """Build k distinct options containing `correct` at a uniformly random slot."""
    if k < 2:
        raise ValueError("mcq needs k >= 2")
    pool = sorted({d for d in distractor_pool if d != correct})
    if len(pool) < k - 1:
        raise ValueError(f"distractor pool has {len(pool)} usable entries, need {k - 1}")
    options = rng.sample(pool, k - 1)
    answer_index = rng.randrange(k)
    options.insert(answer_index, correct)
    return options, answer_index


def _record_rng(base_seed: int, task_id: str, record_id: str) -> random.Random:
    digest = hashlib.sha256(f"{base_seed}:{task_id}:{record_id}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _render_options(options) -> str:
    # "; " keeps multi-finding options (themselves comma-joined) unambiguous
    return "; ".join(options)


@dataclass
class CompiledTask:
    triplets: list
    skipped: list  # (image_id, reason)


def compile_task(spec_or_id, records, templates, rng: random.Random) -> CompiledTask:
    """Compile one triplet per eligible record (or record pair for temporal tasks)."""
    spec = spec_or_id if hasattr(spec_or_id, "task_id") else task_spec(spec_or_id)
    templates = list(templates)
    if not templates:
        raise ValueError("compile_task: no templates")
    base_seed = rng.getrandbits(64)
    pairs = sorted(records, key=lambda p: p[0].image_id)
    study_to_image = {rec.study_id: rec.image_id for rec, _ in pairs}
    all_findings_texts = []

    triplets = []
    skipped = []
    for record, annotation in pairs:
        if annotation.sections.get("findings"):
            all_findings_texts.append((record.image_id, annotation.sections["findings"]))

    for record, annotation in pairs:
        r = _record_rng(base_seed, spec.task_id, record.image_id)
        template = r.choice(templates)
        built = _BUILDERS[spec.task_id](spec, record, annotation, template, r,
                                        study_to_image=study_to_image,
                                        findings_pool=all_findings_texts)
        if isinstance(built, str):
            skipped.append((record.image_id, built))
            continue
        triplets.append(built)
    return CompiledTask(triplets=triplets, skipped=skipped)


def _mcq_triplet(spec, record, template, r, correct, pool, fields):
    options, answer_index = make_mcq(correct, pool, spec.mcq_k, r)
    instruction = template.template.format(options=_render_options(options), **fields)
    return instruction, options[answer_index]


def _build_view(spec, record, annotation, template, r, **_):
    if record.view not in VIEW_OPTION_TEXT:
        return "view unknown"
    correct = VIEW_OPTION_TEXT[record.view]
    pool = [t for v, t in VIEW_OPTION_TEXT.items() if v != record.view]
    instruction, response = _mcq_triplet(spec, record, template, r, correct, pool, {})
    return Triplet(instruction, (record.image_id,), response, spec.task_id, record.source_id, record.split)


def _build_binary(spec, record, annotation, template, r, **_):
    candidates = sorted(f for f, v in annotation.labels.items()
                        if f != "no finding" and v in ("present", "absent"))
    if not candidates:
        return "no binary-labeled findings"
    finding = r.choice(candidates)
    correct = "Yes" if annotation.labels[finding] == "present" else "No"
    other = [o for o in BINARY_OPTIONS if o != correct]
    instruction, response = _mcq_triplet(spec, record, template, r, correct, other, {"finding": finding})
    return Triplet(instruction, (record.image_id,), response, spec.task_id, record.source_id, record.split)


def _present_absent(annotation):
    present = sorted(f for f, v in annotation.labels.items() if f != "no finding" and v == "present")
    absent = sorted(f for f, v in annotation.labels.items() if f != "no finding" and v == "absent")
    return present, absent


def _build_single(spec, record, annotation, template, r, **_):
    present, absent = _present_absent(annotation)
    if not present:
        return "no present finding"
    if len(absent) < spec.mcq_k - 1:
        return "too few absent findings for distractors"
    correct = r.choice(present)
    instruction, response = _mcq_triplet(spec, record, template, r, correct, absent, {})
    return Triplet(instruction, (record.image_id,), response, spec.task_id, record.source_id, record.split)


def _build_multi(spec, record, annotation, template, r, **_):
    present, absent = _present_absent(annotation)
    if not present:
        return "no present finding"
    universe = present + absent
    correct = ", ".join(present)
    distractors = set()
    attempts = 0
    while len(distractors) < spec.mcq_k - 1 and attempts < 200:
        attempts += 1
        size = r.randint(1, max(1, min(len(universe), len(present) + 1)))
        subset = ", ".join(sorted(r.sample(universe, size)))
        if subset != correct:
            distractors.add(subset)
    if len(distractors) < spec.mcq_k - 1:
        return "could not build distinct finding sets"
    instruction, response = _mcq_triplet(spec, record, template, r, correct, distractors, {})
    return Triplet(instruction, (record.image_id,), response, spec.task_id, record.source_id, record.split)


def _build_temporal(spec, record, annotation, template, r, study_to_image=None, **_):
    if annotation.prior is None:
        return "no prior study"
    prior_study, progression = annotation.prior
    prior_image = study_to_image.get(prior_study)
    if prior_image is None:
        return "prior study image not found"
    finding = r.choice(sorted(progression))
    correct = progression[finding]
    pool = [p for p in PROGRESSION_OPTIONS if p != correct]
    instruction, response = _mcq_triplet(spec, record, template, r, correct, pool, {"finding": finding})
    return Triplet(instruction, (prior_image, record.image_id), response,
                   spec.task_id, record.source_id, record.split)


def _build_grounding(spec, record, annotation, template, r, **_):
    if not annotation.boxes:
        return "no boxes"
    phrase = r.choice(sorted(annotation.boxes))
    box = annotation.boxes[phrase][0]
    instruction = template.template.format(phrase=phrase)
    return Triplet(instruction, (record.image_id,), box.as_text(),
                   spec.task_id, record.source_id, record.split)


def _build_vqa(spec, record, annotation, template, r, **_):
    if not annotation.qa:
        return "no qa pairs"
    question, answer = r.choice(sorted(annotation.qa))
    if answer not in BINARY_OPTIONS:
        return f"non-binary answer {answer!r}"
    other = [o for o in BINARY_OPTIONS if o != answer]
    instruction, response = _mcq_triplet(spec, record, template, r, answer, other, {"phrase": question})
    return Triplet(instruction, (record.image_id,), response, spec.task_id, record.source_id, record.split)


def _build_findings_gen(spec, record, annotation, template, r, **_):
    findings = annotation.sections.get("findings")
    if not findings:
        return "no findings section"
    return Triplet(template.template, (record.image_id,), findings,
                   spec.task_id, record.source_id, record.split)


def _build_findings_summ(spec, record, annotation, template, r, **_):
    findings = annotation.sections.get("findings")
    impression = annotation.sections.get("impression")
    if not findings or not impression:
        return "missing findings or impression"
    instruction = template.template.format(findings_section=findings)
    return Triplet(instruction, (), impression, spec.task_id, record.source_id, record.split)


def _build_matching(spec, record, annotation, template, r, findings_pool=None, **_):
    own = annotation.sections.get("findings")
    if not own:
        return "no findings section"
    candidates = [text for image_id, text in findings_pool
                  if image_id != record.image_id and text != own]
    matched = r.random() < 0.5 or not candidates
    text = own if matched else r.choice(candidates)
    correct = "Yes" if matched else "No"
    other = [o for o in BINARY_OPTIONS if o != correct]
    instruction, response = _mcq_triplet(spec, record, template, r, correct, other, {"phrase": text})
    return Triplet(instruction, (record.image_id,), response, spec.task_id, record.source_id, record.split)


_BUILDERS = {
    "view_classification": _build_view,
    "disease_binary": _build_binary,
    "disease_single": _build_single,
    "disease_multi": _build_multi,
    "temporal_classification": _build_temporal,
    "phrase_grounding": _build_grounding,
    "vqa": _build_vqa,
    "findings_generation": _build_findings_gen,
    "findings_summarization": _build_findings_summ,
    "image_text_matching": _build_matching,
}

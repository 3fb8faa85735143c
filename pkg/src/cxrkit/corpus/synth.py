"""Synthetic chest-film dataset with exact, recoverable ground truth.

Each image places non-overlapping shape primitives inside left/right "lung"
fields. The primitive encodes the finding, its placement encodes side and
region, and its radius encodes severity. Labels, tight boxes, progression
pairs, reports, and QA pairs are all derived from the construction parameters,
so every downstream metric has a checkable oracle. A small corner marker
encodes the view so view classification is learnable from pixels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from ..metrics.boxes import Box
from .types import Annotation, ImageRecord, SynthConfig

SHAPE_INTENSITY = 220
MARKER_INTENSITY = 140
LUNG_INTENSITY = 70
BACKGROUND_INTENSITY = 25

_INDICATIONS = (
    "Cough.", "Fever.", "Chest pain.", "Shortness of breath.",
    "Follow-up.", "Trauma evaluation.", "Pre-operative assessment.", "Line placement check.",
)

_SEVERITIES = ("mild", "severe")
_SIDES = ("left", "right")
_REGIONS = ("upper", "lower")
_VIEWS = ("AP", "PA", "lateral")


@dataclass
class _Shape:
    finding: str
    primitive: str
    side: str
    region: str
    severity: str
    cx: int
    cy: int
    radius: int


@dataclass
class SynthItem:
    record: ImageRecord
    annotation: Annotation
    pixels: np.ndarray
    report_text: str


def finding_phrase(severity: str, side: str, finding: str, region: str) -> str:
    return f"{severity} {side}-sided {finding} in the {region} zone"


def parse_finding_phrase(phrase: str):
    """Inverse of finding_phrase: (severity, side, finding, region)."""
    tokens = phrase.split()
    severity = tokens[0]
    side = tokens[1].removesuffix("-sided")
    region = tokens[-2]
    finding = " ".join(tokens[2:-4])
    return severity, side, finding, region


def report_text_views(annotation) -> list:
    """Texts to pair with an image for contrastive training.

    The full findings section, the impression, and each per-finding phrase as
    a caption-style sentence. The short views give the towers word-level
    alignment signal the long reports alone do not; negation sentences are
    deliberately excluded (one negation text matches many unrelated images).
    """
    views = []
    if annotation.sections.get("findings"):
        views.append(annotation.sections["findings"])
    if annotation.sections.get("impression"):
        views.append(annotation.sections["impression"])
    for phrase in sorted(annotation.boxes):
        views.append(f"There is a {phrase}.")
    seen = set()
    unique = []
    for v in views:
        if v not in seen:
            seen.add(v)
            unique.append(v)
    return unique


def _lung_bounds(size: int, side: str):
    y0, y1 = round(0.12 * size), round(0.88 * size)
    if side == "left":
        return round(0.08 * size), round(0.44 * size), y0, y1
    return round(0.56 * size), round(0.92 * size), y0, y1


def _region_bounds(size: int, side: str, region: str):
    x0, x1, y0, y1 = _lung_bounds(size, side)
    mid = size // 2
    if region == "upper":
        return x0, x1, y0, mid
    return x0, x1, mid, y1


def _place_shape(rng, size, side, region, radius, taken):
    x0, x1, y0, y1 = _region_bounds(size, side, region)
    for _ in range(40):
        cx = rng.randint(x0 + radius, x1 - radius - 1)
        cy = rng.randint(y0 + radius, y1 - radius - 1)
        bbox = (cx - radius, cy - radius, cx + radius + 1, cy + radius + 1)
        if all(bbox[2] <= t[0] or t[2] <= bbox[0] or bbox[3] <= t[1] or t[3] <= bbox[1]
               for t in taken):
            return cx, cy
    return None


def _draw_shape(draw: ImageDraw.ImageDraw, shape: _Shape) -> None:
    cx, cy, r = shape.cx, shape.cy, shape.radius
    bbox = [cx - r, cy - r, cx + r, cy + r]
    if shape.primitive == "disc":
        draw.ellipse(bbox, fill=SHAPE_INTENSITY)
    elif shape.primitive == "square":
        draw.rectangle(bbox, fill=SHAPE_INTENSITY)
    elif shape.primitive == "triangle":
        draw.polygon([(cx - r, cy + r), (cx + r, cy + r), (cx, cy - r)], fill=SHAPE_INTENSITY)
    elif shape.primitive == "cross":
        arm = max(1, r // 3)
        draw.rectangle([cx - r, cy - arm, cx + r, cy + arm], fill=SHAPE_INTENSITY)
        draw.rectangle([cx - arm, cy - r, cx + arm, cy + r], fill=SHAPE_INTENSITY)
    elif shape.primitive == "ring":
        draw.ellipse(bbox, outline=SHAPE_INTENSITY, width=max(2, r // 2))
    else:
        raise ValueError(f"unknown primitive {shape.primitive!r}")


def _draw_view_marker(draw: ImageDraw.ImageDraw, view: str, size: int) -> None:
    m = max(3, size // 16)
    corners = {
        "AP": (0, 0, m, m),
        "PA": (size - m - 1, 0, size - 1, m),
        "lateral": (0, size - m - 1, m, size - 1),
    }
    draw.rectangle(corners[view], fill=MARKER_INTENSITY)


def _render(shapes, view, cfg, noise_rng) -> np.ndarray:
    size = cfg.image_size
    img = Image.new("L", (size, size), BACKGROUND_INTENSITY)
    draw = ImageDraw.Draw(img)
    for side in _SIDES:
        x0, x1, y0, y1 = _lung_bounds(size, side)
        draw.rectangle([x0, y0, x1, y1], fill=LUNG_INTENSITY)
    for shape in shapes:
        _draw_shape(draw, shape)
    _draw_view_marker(draw, view, size)
    pixels = np.asarray(img, dtype=np.float64)
    if cfg.noise_sigma > 0:
        pixels = pixels + noise_rng.normal(0.0, cfg.noise_sigma, pixels.shape)
    return np.clip(np.rint(pixels), 0, 255).astype(np.uint8)


def _shape_box(shape: _Shape, size: int) -> Box:
    # pixel bbox is half-open; PIL draws each primitive to fill its inclusive bbox
    px1, py1 = shape.cx - shape.radius, shape.cy - shape.radius
    px2, py2 = shape.cx + shape.radius + 1, shape.cy + shape.radius + 1
    scale = 100.0 / size
    return Box(round(px1 * scale), round(py1 * scale), round(px2 * scale), round(py2 * scale))


def _report_sentences(shapes, absents, rng):
    sentences = [
        f"There is a {finding_phrase(s.severity, s.side, s.finding, s.region)}."
        for s in shapes
    ]
    if not sentences:
        sentences = ["No acute findings."]
    for finding in absents:
        sentences.append(f"No {finding}.")
    return " ".join(sentences)


def _impression(shapes):
    if not shapes:
        return "No acute findings."
    return " ".join(
        f"{s.severity.capitalize()} {s.side}-sided {s.finding}." for s in shapes
    )


def _sample_shapes(cfg, rng, fixed=None):
    """Sample shapes for one study; `fixed` carries prior-study shapes to mutate."""
    size = cfg.image_size
    thr = cfg.severity_size_thresholds
    if fixed is not None:
        return fixed
    findings = sorted(cfg.findings)
    present = [f for f in findings if rng.random() < 0.5]
    if len(present) > 3:
        present = rng.sample(present, 3)
        present.sort()
    shapes = []
    taken = []
    for finding in present:
        side = "left" if rng.random() < cfg.side_prob else "right"
        region = rng.choice(_REGIONS)
        severe = rng.random() < 0.5
        radius = rng.randint(thr, thr + 3) if severe else rng.randint(3, thr - 1)
        pos = _place_shape(rng, size, side, region, radius, taken)
        if pos is None:
            continue  # unplaceable: finding stays absent
        cx, cy = pos
        taken.append((cx - radius, cy - radius, cx + radius + 1, cy + radius + 1))
        shapes.append(_Shape(finding, cfg.findings[finding], side, region,
                             "severe" if severe else "mild", cx, cy, radius))
    return shapes


def _mutate_for_progression(cfg, rng, shapes):
    """Second-study shapes: one tracked finding changes size (or stays stable)."""
    if not shapes:
        return list(shapes), None
    tracked = rng.choice(sorted(shapes, key=lambda s: s.finding))
    progression = rng.choice(("improved", "stable", "worsened"))
    thr = cfg.severity_size_thresholds
    new_shapes = []
    for s in shapes:
        if s.finding != tracked.finding:
            new_shapes.append(s)
            continue
        if progression == "improved":
            r = max(2, s.radius - 3)
        elif progression == "worsened":
            r = min(thr + 3, s.radius + 3)
        else:
            r = s.radius
        severity = "severe" if r >= thr else "mild"
        new_shapes.append(replace(s, radius=r, severity=severity))
    return new_shapes, (tracked.finding, progression)


def _labels_for(cfg, shapes) -> dict:
    labels = {f: "absent" for f in sorted(cfg.findings)}
    for s in shapes:
        labels[s.finding] = "present"
    labels["no finding"] = "absent" if shapes else "present"
    return labels


def _annotation_for(cfg, shapes, rng, prior=None) -> Annotation:
    size = cfg.image_size
    labels = _labels_for(cfg, shapes)
    boxes = {
        finding_phrase(s.severity, s.side, s.finding, s.region): [_shape_box(s, size)]
        for s in shapes
    }
    absents = sorted(f for f, v in labels.items() if f != "no finding" and v == "absent")
    # negations are a deterministic function of the labels so the findings
    # text is fully predictable from the image content
    negated = absents[:2]
    findings_text = _report_sentences(shapes, negated, rng)
    sections = {
        "indication": rng.choice(_INDICATIONS),
        "findings": findings_text,
        "impression": _impression(shapes),
    }
    qa = []
    asked = rng.sample(sorted(cfg.findings), min(2, len(cfg.findings)))
    for finding in asked:
        answer = "Yes" if labels.get(finding) == "present" else "No"
        qa.append((f"Is there evidence of {finding}?", answer))
    annotation = Annotation(labels=labels, boxes=boxes, sections=sections, prior=prior, qa=qa)
    annotation.validate()
    return annotation


def synth_generate(cfg: SynthConfig):
    """Generate SynthItems with patient-level splits; pure function of cfg."""
    rng = random.Random(cfg.seed)
    noise_rng = np.random.default_rng(cfg.seed)
    items = []
    patient_idx = 0
    while len(items) < cfg.n_images:
        patient_idx += 1
        pid = f"p{patient_idx:05d}"
        u = rng.random()
        split = "train" if u < 0.8 else ("val" if u < 0.85 else "test")
        two_studies = rng.random() < 0.3 and len(items) + 2 <= cfg.n_images

        first_shapes = _sample_shapes(cfg, rng)
        studies = [(1, first_shapes, None)]
        if two_studies:
            second_shapes, tracked = _mutate_for_progression(cfg, rng, first_shapes)
            prior = None
            if tracked is not None:
                prior = (f"{pid}-s1", {tracked[0]: tracked[1]})
            studies.append((2, second_shapes, prior))

        for study_no, shapes, prior in studies:
            study_id = f"{pid}-s{study_no}"
            image_id = f"{study_id}-i0"
            view = rng.choice(_VIEWS)
            pixels = _render(shapes, view, cfg, noise_rng)
            record = ImageRecord(
                image_id=image_id,
                patient_id=pid,
                study_id=study_id,
                view=view,
                pixels_ref=f"images/{image_id}.png",
                source_id="synth",
                split=split,
            )
            annotation = _annotation_for(cfg, shapes, rng, prior=prior)
            report_text = (
                f"INDICATION: {annotation.sections['indication']} "
                f"FINDINGS: {annotation.sections['findings']} "
                f"IMPRESSION: {annotation.sections['impression']}"
            )
            items.append(SynthItem(record, annotation, pixels, report_text))
    return items[: cfg.n_images]


def write_synth_dataset(items, out_dir) -> list:
    """Write PNGs under out_dir/images and return pairs with resolved pixel paths."""
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    pairs = []
    for item in items:
        path = out_dir / "images" / f"{item.record.image_id}.png"
        Image.fromarray(item.pixels, mode="L").save(path)
        record = replace(item.record, pixels_ref=str(path))
        pairs.append((record, item.annotation))
    return pairs

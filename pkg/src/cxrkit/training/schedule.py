"""Linear-warmup cosine-decay learning-rate schedule."""

from __future__ import annotations

import math


def lr_schedule(step: int, total_steps: int, warmup_ratio: float, peak_lr: float) -> float:
    """LR at an optimizer step: 0 -> peak over ceil(ratio * total) steps, then cosine to 0."""
    if total_steps <= 0:
        raise ValueError("total_steps must be > 0")
    if not 0 <= step <= total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    warmup = math.ceil(warmup_ratio * total_steps)
    if step < warmup:
        return peak_lr * step / warmup
    if total_steps == warmup:
        return peak_lr if step < total_steps else 0.0
    progress = (step - warmup) / (total_steps - warmup)
    return peak_lr * 0.5 * (1.0 + math.cos(math.pi * progress))

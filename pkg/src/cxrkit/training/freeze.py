"""Per-stage, per-epoch trainable component sets."""

from __future__ import annotations

_POLICY = {
    "lm_pretrain": lambda epoch: frozenset({"decoder"}),
    "contrastive": lambda epoch: frozenset({"vision", "text_tower", "head"}),
    "align": lambda epoch: frozenset({"projector"}),
    # the vision tower is unfrozen for the first instruction-tuning epoch only
    "instruct": lambda epoch: (
        frozenset({"vision", "projector", "decoder"}) if epoch == 1
        else frozenset({"projector", "decoder"})
    ),
}


def freeze_policy(stage: str, epoch: int) -> frozenset:
    """Components trained at (stage, epoch); epochs are 1-based."""
    if epoch < 1:
        raise ValueError("epoch must be >= 1")
    if stage not in _POLICY:
        raise ValueError(f"unknown stage {stage!r}")
    return _POLICY[stage](epoch)

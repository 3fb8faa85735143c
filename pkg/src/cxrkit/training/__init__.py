"""Four-stage training: LM pretrain, contrastive, alignment, instruction tuning."""

from .freeze import freeze_policy
from .schedule import lr_schedule
from .stages import (
    STAGES,
    StageConfig,
    StageOrderError,
    TrainLog,
    default_stage_config,
    retrieval_top1,
    run_stage,
)

__all__ = [
    "STAGES",
    "StageConfig",
    "StageOrderError",
    "TrainLog",
    "default_stage_config",
    "freeze_policy",
    "lr_schedule",
    "retrieval_top1",
    "run_stage",
]

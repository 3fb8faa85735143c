"""Model components: towers, projector, decoder, losses, and the bundle."""

from .bundle import ModelBundle
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .config import DecoderConfig, ModelConfig, ProjectorConfig, TextTowerConfig, VisionConfig
from .decoder import Decoder, masked_lm_loss
from .losses import ContrastiveHead, siglip_loss
from .projector import Projector
from .text_tower import TextTower
from .tokenizer import EOS_ID, IMG_ID, PAD_ID, SEP_ID, VOCAB_SIZE, ByteTokenizer
from .vision import VisionTower, resize_pos_embed

__all__ = [
    "ByteTokenizer",
    "Checkpoint",
    "ContrastiveHead",
    "Decoder",
    "DecoderConfig",
    "EOS_ID",
    "IMG_ID",
    "ModelBundle",
    "ModelConfig",
    "PAD_ID",
    "Projector",
    "ProjectorConfig",
    "SEP_ID",
    "TextTower",
    "TextTowerConfig",
    "VOCAB_SIZE",
    "VisionConfig",
    "VisionTower",
    "load_checkpoint",
    "masked_lm_loss",
    "resize_pos_embed",
    "save_checkpoint",
    "siglip_loss",
]

"""Model configuration at configurable (toy) scale."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .tokenizer import VOCAB_SIZE


@dataclass(frozen=True)
class VisionConfig:
    patch_size: int = 8
    grid: tuple = (8, 8)
    dim: int = 64
    layers: int = 4
    heads: int = 4
    stem: str = "conv"  # "conv": translation-equivariant stem; "linear": plain patch embed

    def __post_init__(self):
        if self.stem not in ("conv", "linear"):
            raise ValueError(f"unknown stem {self.stem!r}")
        if self.stem == "conv" and self.patch_size % 4 != 0:
            raise ValueError("conv stem requires patch_size divisible by 4")

    @property
    def input_size(self) -> tuple:
        return (self.grid[0] * self.patch_size, self.grid[1] * self.patch_size)

    @property
    def n_patches(self) -> int:
        return self.grid[0] * self.grid[1]


@dataclass(frozen=True)
class TextTowerConfig:
    dim: int = 64
    layers: int = 2
    heads: int = 4
    vocab: int = VOCAB_SIZE
    max_seq: int = 256
    positions: str = "learned"  # "sinusoidal" available; learned measures better here

    def __post_init__(self):
        if self.positions not in ("sinusoidal", "learned"):
            raise ValueError(f"unknown positions {self.positions!r}")


@dataclass(frozen=True)
class DecoderConfig:
    dim: int = 128
    layers: int = 4
    heads: int = 4
    vocab: int = VOCAB_SIZE
    max_seq: int = 320  # fits 64-token images plus instruction and response


@dataclass(frozen=True)
class ProjectorConfig:
    in_dim: int = 64
    hidden_dim: int = 128
    out_dim: int = 128


@dataclass(frozen=True)
class ModelConfig:
    vision: VisionConfig = field(default_factory=VisionConfig)
    text_tower: TextTowerConfig = field(default_factory=TextTowerConfig)
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    projector: ProjectorConfig = field(default_factory=ProjectorConfig)
    embed_dim: int = 64  # shared contrastive embedding space

    def __post_init__(self):
        dims = (
            self.vision.dim, self.text_tower.dim, self.decoder.dim,
            self.projector.in_dim, self.projector.hidden_dim, self.projector.out_dim,
            self.embed_dim,
        )
        if any(d <= 0 for d in dims):
            raise ValueError("all dims must be > 0")
        if self.projector.in_dim != self.vision.dim:
            raise ValueError("projector.in_dim must equal vision.dim")
        if self.projector.out_dim != self.decoder.dim:
            raise ValueError("projector.out_dim must equal decoder.dim")
        for cfg in (self.vision, self.text_tower, self.decoder):
            if cfg.dim % cfg.heads != 0:
                raise ValueError("dim must be divisible by heads")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["vision"]["grid"] = list(self.vision.grid)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        vision = dict(d["vision"])
        vision["grid"] = tuple(vision["grid"])
        return cls(
            vision=VisionConfig(**vision),
            text_tower=TextTowerConfig(**d["text_tower"]),
            decoder=DecoderConfig(**d["decoder"]),
            projector=ProjectorConfig(**d["projector"]),
            embed_dim=d["embed_dim"],
        )

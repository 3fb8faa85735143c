"""Bidirectional byte encoder producing pooled text embeddings for contrast."""

from __future__ import annotations

import math

import torch
import torch.nn as nn

from .config import TextTowerConfig
from .layers import TransformerBlock, distinctive_pool
from .tokenizer import PAD_ID


def _sinusoidal_positions(max_seq: int, dim: int) -> torch.Tensor:
    pos = torch.arange(max_seq, dtype=torch.float32).unsqueeze(1)
    div = torch.exp(torch.arange(0, dim, 2, dtype=torch.float32) * (-math.log(10000.0) / dim))
    table = torch.zeros(max_seq, dim)
    table[:, 0::2] = torch.sin(pos * div)
    table[:, 1::2] = torch.cos(pos * div[: (dim + 1) // 2][: table[:, 1::2].shape[1]])
    return table


class TextTower(nn.Module):
    def __init__(self, cfg: TextTowerConfig, embed_dim: int):
        super().__init__()
        self.cfg = cfg
        self.tok_embed = nn.Embedding(cfg.vocab, cfg.dim)
        if cfg.positions == "learned":
            self.pos_embed = nn.Parameter(torch.zeros(cfg.max_seq, cfg.dim))
            nn.init.normal_(self.pos_embed, std=0.02)
        else:
            self.register_buffer("pos_embed", 0.1 * _sinusoidal_positions(cfg.max_seq, cfg.dim))
        self.blocks = nn.ModuleList(TransformerBlock(cfg.dim, cfg.heads) for _ in range(cfg.layers))
        self.norm = nn.LayerNorm(cfg.dim)
        self.head = nn.Linear(cfg.dim, embed_dim)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        """(B, T) padded byte ids -> (B, embed_dim) pooled embeddings."""
        if ids.shape[1] > self.cfg.max_seq:
            raise ValueError(f"sequence length {ids.shape[1]} > max_seq {self.cfg.max_seq}")
        pad = ids == PAD_ID
        x = self.tok_embed(ids) + self.pos_embed[: ids.shape[1]]
        for block in self.blocks:
            x = block(x, key_padding_mask=pad)
        x = self.norm(x)
        return self.head(distinctive_pool(x, keep=~pad))

"""Two-layer MLP projecting patch features into the decoder embedding space."""

from __future__ import annotations

import torch.nn as nn

from .config import ProjectorConfig


class Projector(nn.Module):
    def __init__(self, cfg: ProjectorConfig):
        super().__init__()
        self.cfg = cfg
        self.fc1 = nn.Linear(cfg.in_dim, cfg.hidden_dim)
        self.act = nn.GELU()
        self.fc2 = nn.Linear(cfg.hidden_dim, cfg.out_dim)

    def forward(self, features):
        """(B, N, in_dim) -> (B, N, out_dim); sequence length preserved."""
        if features.shape[-1] != self.cfg.in_dim:
            raise ValueError(f"feature dim {features.shape[-1]} != projector in_dim {self.cfg.in_dim}")
        return self.fc2(self.act(self.fc1(features)))

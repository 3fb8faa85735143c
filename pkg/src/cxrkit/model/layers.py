"""Shared transformer building blocks (pre-LN, no dropout for determinism)."""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F


def distinctive_pool(feats: torch.Tensor, keep: torch.Tensor | None = None) -> torch.Tensor:
    """Max over positions of per-sample-centered features, (B, T, D) -> (B, D).

    Subtracting each sample's own positional mean before the max keeps the few
    content-bearing positions from being averaged away by the shared
    background; without it, randomly initialized towers emit near-identical
    embeddings for every input and the pairwise contrastive loss collapses.
    `keep` (B, T) marks valid positions; padded ones can never win the max.
    """
    if keep is not None:
        keep = keep.unsqueeze(-1).to(feats.dtype)
        mean = (feats * keep).sum(dim=1) / keep.sum(dim=1).clamp(min=1.0)
        centered = (feats - mean.unsqueeze(1)) * keep + (keep - 1.0) * 1e4
    else:
        centered = feats - feats.mean(dim=1, keepdim=True)
    return centered.max(dim=1).values


class MultiHeadAttention(nn.Module):
    def __init__(self, dim: int, heads: int):
        super().__init__()
        self.heads = heads
        self.head_dim = dim // heads
        self.qkv = nn.Linear(dim, 3 * dim)
        self.out = nn.Linear(dim, dim)

    def forward(self, x, causal: bool = False, key_padding_mask=None):
        b, t, d = x.shape
        q, k, v = self.qkv(x).chunk(3, dim=-1)
        shape = (b, t, self.heads, self.head_dim)
        q = q.view(shape).transpose(1, 2)
        k = k.view(shape).transpose(1, 2)
        v = v.view(shape).transpose(1, 2)
        scores = q @ k.transpose(-2, -1) / self.head_dim**0.5
        if causal:
            mask = torch.triu(torch.ones(t, t, dtype=torch.bool, device=x.device), diagonal=1)
            scores = scores.masked_fill(mask, float("-inf"))
        if key_padding_mask is not None:
            # key_padding_mask: (b, t) True where padded
            scores = scores.masked_fill(key_padding_mask[:, None, None, :], float("-inf"))
        attn = F.softmax(scores, dim=-1)
        out = (attn @ v).transpose(1, 2).reshape(b, t, d)
        return self.out(out)


class TransformerBlock(nn.Module):
    def __init__(self, dim: int, heads: int, mlp_ratio: int = 4):
        super().__init__()
        self.norm1 = nn.LayerNorm(dim)
        self.attn = MultiHeadAttention(dim, heads)
        self.norm2 = nn.LayerNorm(dim)
        self.mlp = nn.Sequential(
            nn.Linear(dim, mlp_ratio * dim),
            nn.GELU(),
            nn.Linear(mlp_ratio * dim, dim),
        )

    def forward(self, x, causal: bool = False, key_padding_mask=None):
        x = x + self.attn(self.norm1(x), causal=causal, key_padding_mask=key_padding_mask)
        return x + self.mlp(self.norm2(x))

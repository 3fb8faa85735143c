"""Patch-based vision tower with a resizable 2-D positional embedding grid."""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from .config import VisionConfig
from .layers import TransformerBlock


def resize_pos_embed(pos: torch.Tensor, new_grid) -> torch.Tensor:
    """Bilinearly interpolate a (h, w, dim) positional grid to (h', w', dim).

    Corners map exactly onto corners; the identity grid is returned unchanged.
    """
    h, w, dim = pos.shape
    nh, nw = new_grid
    if h < 1 or w < 1 or nh < 1 or nw < 1:
        raise ValueError("grids must be >= 1 in both directions")
    if (h, w) == (nh, nw):
        return pos.clone()
    x = pos.permute(2, 0, 1).unsqueeze(0)  # (1, dim, h, w)
    x = F.interpolate(x, size=(nh, nw), mode="bilinear", align_corners=True)
    return x.squeeze(0).permute(1, 2, 0).contiguous()


class VisionTower(nn.Module):
    def __init__(self, cfg: VisionConfig):
        super().__init__()
        self.cfg = cfg
        if cfg.stem == "conv":
            # translation-equivariant stem: small shapes embed the same way
            # wherever they sit inside a patch cell
            s2 = cfg.patch_size // 4
            self.stem = nn.Sequential(
                nn.Conv2d(1, cfg.dim // 2, kernel_size=5, stride=4, padding=2),
                nn.GELU(),
                nn.Conv2d(cfg.dim // 2, cfg.dim, kernel_size=2 * s2 - 1, stride=s2,
                          padding=s2 - 1),
            )
        else:
            self.stem = nn.Linear(cfg.patch_size * cfg.patch_size, cfg.dim)
        self.pos_embed = nn.Parameter(torch.zeros(cfg.grid[0], cfg.grid[1], cfg.dim))
        nn.init.normal_(self.pos_embed, std=0.02)
        self.blocks = nn.ModuleList(TransformerBlock(cfg.dim, cfg.heads) for _ in range(cfg.layers))
        self.norm = nn.LayerNorm(cfg.dim)

    def set_input_resolution(self, new_grid) -> None:
        """Adapt to a new patch grid by interpolating the positional encodings."""
        with torch.no_grad():
            resized = resize_pos_embed(self.pos_embed.data, new_grid)
        self.pos_embed = nn.Parameter(resized)
        self.cfg = VisionConfig(
            patch_size=self.cfg.patch_size, grid=tuple(new_grid),
            dim=self.cfg.dim, layers=self.cfg.layers, heads=self.cfg.heads,
            stem=self.cfg.stem,
        )

    def _patchify(self, pixels: torch.Tensor) -> torch.Tensor:
        b, h, w = pixels.shape
        p = self.cfg.patch_size
        gh, gw = self.cfg.grid
        x = pixels.reshape(b, gh, p, gw, p)
        x = x.permute(0, 1, 3, 2, 4).reshape(b, gh * gw, p * p)
        return x

    def forward(self, pixels: torch.Tensor) -> torch.Tensor:
        """(B, H, W) grayscale in [0, 1] -> (B, grid.h * grid.w, dim) patch features."""
        if pixels.dim() == 2:
            pixels = pixels.unsqueeze(0)
        expected = self.cfg.input_size
        if tuple(pixels.shape[-2:]) != expected:
            raise ValueError(
                f"input resolution {tuple(pixels.shape[-2:])} != configured {expected}; caller must resize"
            )
        if self.cfg.stem == "conv":
            x = self.stem(pixels.unsqueeze(1))  # (B, dim, gh, gw)
            x = x.flatten(2).transpose(1, 2)
        else:
            x = self.stem(self._patchify(pixels))
        x = x + self.pos_embed.reshape(1, -1, self.cfg.dim)
        for block in self.blocks:
            x = block(x)
        return self.norm(x)

"""Pairwise sigmoid contrastive loss with learnable temperature and bias."""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F


class ContrastiveHead(nn.Module):
    """Learnable scalars of the sigmoid pairwise loss: t = exp(t'), bias b."""

    def __init__(self, init_temperature: float = 10.0, init_bias: float = -10.0):
        super().__init__()
        self.log_temperature = nn.Parameter(torch.tensor(math.log(init_temperature)))
        self.bias = nn.Parameter(torch.tensor(float(init_bias)))

    @property
    def temperature(self) -> torch.Tensor:
        return self.log_temperature.exp()


def siglip_loss(img_emb: torch.Tensor, txt_emb: torch.Tensor, head: ContrastiveHead) -> torch.Tensor:
    """-(1/N) sum_ij log sigmoid(z_ij * (t * <x_i, y_j> + b)), z diagonal +1 else -1.

    Rows are expected L2-normalized by the caller; the loss is finite for any
    finite inputs.
    """
    if img_emb.dim() != 2 or txt_emb.dim() != 2 or img_emb.shape != txt_emb.shape:
        raise ValueError("embeddings must be matching N x d matrices")
    n = img_emb.shape[0]
    if n < 1:
        raise ValueError("empty batch")
    logits = head.log_temperature.exp() * (img_emb @ txt_emb.T) + head.bias
    signs = 2.0 * torch.eye(n, dtype=logits.dtype, device=logits.device) - 1.0
    return -F.logsigmoid(signs * logits).sum() / n

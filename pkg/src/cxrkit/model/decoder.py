"""Causal byte decoder and the masked next-token loss."""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from .config import DecoderConfig
from .layers import TransformerBlock


def masked_lm_loss(logits: torch.Tensor, token_ids: torch.Tensor, loss_mask: torch.Tensor) -> torch.Tensor:
    """Mean cross-entropy over masked next-token predictions.

    loss_mask[t] = 1 marks position t as contributing the prediction of
    token t+1; the final position has no next token and is ignored.
    """
    if logits.dim() == 2:
        logits, token_ids, loss_mask = logits[None], token_ids[None], loss_mask[None]
    pred = logits[:, :-1]
    target = token_ids[:, 1:]
    mask = loss_mask[:, :-1].to(pred.dtype)
    if mask.sum() == 0:
        raise ValueError("loss mask is all-zero")
    per_tok = F.cross_entropy(
        pred.reshape(-1, pred.shape[-1]), target.reshape(-1), reduction="none"
    ).reshape(target.shape)
    return (per_tok * mask).sum() / mask.sum()


class Decoder(nn.Module):
    def __init__(self, cfg: DecoderConfig):
        super().__init__()
        self.cfg = cfg
        self.tok_embed = nn.Embedding(cfg.vocab, cfg.dim)
        self.pos_embed = nn.Parameter(torch.zeros(cfg.max_seq, cfg.dim))
        nn.init.normal_(self.pos_embed, std=0.02)
        self.blocks = nn.ModuleList(TransformerBlock(cfg.dim, cfg.heads) for _ in range(cfg.layers))
        self.norm = nn.LayerNorm(cfg.dim)
        self.head = nn.Linear(cfg.dim, cfg.vocab)

    def embed_tokens(self, ids: torch.Tensor) -> torch.Tensor:
        return self.tok_embed(ids)

    def forward_embeddings(self, embeds: torch.Tensor) -> torch.Tensor:
        """(B, T, dim) input embeddings -> (B, T, vocab) logits under causal attention."""
        t = embeds.shape[1]
        if t > self.cfg.max_seq:
            raise ValueError(f"sequence length {t} > max_seq {self.cfg.max_seq}")
        x = embeds + self.pos_embed[:t]
        for block in self.blocks:
            x = block(x, causal=True)
        return self.head(self.norm(x))

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        if ids.dim() == 1:
            ids = ids.unsqueeze(0)
        return self.forward_embeddings(self.embed_tokens(ids))

    def lm_loss(self, token_ids: torch.Tensor, loss_mask: torch.Tensor) -> torch.Tensor:
        if token_ids.dim() == 1:
            token_ids, loss_mask = token_ids.unsqueeze(0), loss_mask.unsqueeze(0)
        return masked_lm_loss(self(token_ids), token_ids, loss_mask)

"""The full model: vision tower + contrastive text tower + projector + decoder.

The decoder prompt layout is: all image patch tokens first (one image-placeholder
id per patch, embeddings swapped for projected features), then instruction
bytes, a separator, then response bytes ending with EOS. Instruction-tuning
loss is masked to response tokens only.
"""

from __future__ import annotations

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from .config import ModelConfig
from .decoder import Decoder, masked_lm_loss
from .layers import distinctive_pool
from .losses import ContrastiveHead
from .projector import Projector
from .text_tower import TextTower
from .tokenizer import EOS_ID, IMG_ID, PAD_ID, SEP_ID, ByteTokenizer
from .vision import VisionTower

COMPONENTS = ("vision", "text_tower", "projector", "decoder", "head")


def _to_pixel_tensor(image) -> torch.Tensor:
    if isinstance(image, torch.Tensor):
        t = image.to(torch.float32)
    else:
        t = torch.from_numpy(np.asarray(image)).to(torch.float32)
    if t.max() > 1.5:
        t = t / 255.0
    return t


class ModelBundle(nn.Module):
    def __init__(self, config: ModelConfig | None = None, seed: int | None = None):
        super().__init__()
        if config is None:
            config = ModelConfig()
        if seed is not None:
            torch.manual_seed(seed)
        self.config = config
        self.tokenizer = ByteTokenizer()
        self.vision = VisionTower(config.vision)
        self.vision_pool = nn.Linear(config.vision.dim, config.embed_dim)
        self.text_tower = TextTower(config.text_tower, config.embed_dim)
        self.projector = Projector(config.projector)
        self.decoder = Decoder(config.decoder)
        self.head = ContrastiveHead()

    # --- component handling (freeze policy / optimizers) ---

    def component_modules(self, name: str):
        table = {
            "vision": [self.vision, self.vision_pool],
            "text_tower": [self.text_tower],
            "projector": [self.projector],
            "decoder": [self.decoder],
            "head": [self.head],
        }
        if name not in table:
            raise ValueError(f"unknown component {name!r}")
        return table[name]

    def component_parameters(self, name: str):
        for module in self.component_modules(name):
            yield from module.parameters()

    def set_trainable(self, trainable) -> None:
        trainable = set(trainable)
        unknown = trainable - set(COMPONENTS)
        if unknown:
            raise ValueError(f"unknown components {sorted(unknown)}")
        for name in COMPONENTS:
            requires = name in trainable
            for p in self.component_parameters(name):
                p.requires_grad_(requires)

    # --- contrastive embeddings ---

    def embed_images(self, images) -> torch.Tensor:
        pixels = torch.stack([_to_pixel_tensor(im) for im in images])
        feats = self.vision(pixels)
        pooled = self.vision_pool(distinctive_pool(feats))
        return F.normalize(pooled, dim=-1)

    def embed_texts(self, texts) -> torch.Tensor:
        max_t = self.config.text_tower.max_seq
        encoded = [self.tokenizer.encode(t)[:max_t] for t in texts]
        width = max(1, max(len(e) for e in encoded))
        ids = torch.full((len(encoded), width), PAD_ID, dtype=torch.long)
        for i, e in enumerate(encoded):
            ids[i, : len(e)] = torch.tensor(e, dtype=torch.long)
        return F.normalize(self.text_tower(ids), dim=-1)

    # --- decoder prompt construction ---

    def _sequence_ids(self, n_images: int, instruction: str, response: str | None):
        n_patches = self.config.vision.n_patches
        max_seq = self.config.decoder.max_seq
        img_part = [IMG_ID] * (n_images * n_patches)
        instr = self.tokenizer.encode(instruction)
        resp = [] if response is None else self.tokenizer.encode(response) + [EOS_ID]
        budget = max_seq - len(img_part) - 1 - len(resp)  # 1 for SEP
        if budget < 0:
            resp = resp[: max_seq - len(img_part) - 1]
            budget = 0
        instr = instr[:budget]
        ids = img_part + instr + [SEP_ID] + resp
        response_start = len(img_part) + len(instr) + 1
        return ids, response_start

    def batch_sequences(self, samples):
        """samples: (images, instruction, response) -> (ids, loss_mask, image_feats order).

        loss_mask marks positions whose next-token prediction is a response
        token (or its EOS), per the response-only masking convention.
        """
        built = [self._sequence_ids(len(s[0]), s[1], s[2]) for s in samples]
        width = max(len(ids) for ids, _ in built)
        batch_ids = torch.full((len(built), width), PAD_ID, dtype=torch.long)
        loss_mask = torch.zeros((len(built), width), dtype=torch.float32)
        for i, (ids, response_start) in enumerate(built):
            batch_ids[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
            # response tokens occupy [response_start, len(ids)); the predictions
            # for them come from the positions one step earlier
            loss_mask[i, response_start - 1 : len(ids) - 1] = 1.0
        return batch_ids, loss_mask

    def _inject_images(self, ids: torch.Tensor, images_per_sample) -> torch.Tensor:
        embeds = self.decoder.embed_tokens(ids)
        flat_images = [im for images in images_per_sample for im in images]
        if flat_images:
            pixels = torch.stack([_to_pixel_tensor(im) for im in flat_images])
            feats = self.projector(self.vision(pixels))  # (n_images, n_patches, dec_dim)
            cursor = 0
            for i, images in enumerate(images_per_sample):
                if not images:
                    continue
                n = len(images) * self.config.vision.n_patches
                sample_feats = feats[cursor : cursor + len(images)].reshape(n, -1)
                positions = (ids[i] == IMG_ID).nonzero(as_tuple=True)[0]
                embeds[i, positions[: n]] = sample_feats.to(embeds.dtype)
                cursor += len(images)
        return embeds

    def triplet_loss(self, samples) -> torch.Tensor:
        """Causal LM loss over response tokens for (images, instruction, response) samples."""
        ids, mask = self.batch_sequences(samples)
        embeds = self._inject_images(ids, [s[0] for s in samples])
        logits = self.decoder.forward_embeddings(embeds)
        return masked_lm_loss(logits, ids, mask)

    def text_lm_loss(self, texts) -> torch.Tensor:
        """Plain next-byte loss over raw texts (language-model pretraining)."""
        max_seq = self.config.decoder.max_seq
        encoded = [self.tokenizer.encode(t)[: max_seq - 1] + [EOS_ID] for t in texts]
        width = max(len(e) for e in encoded)
        ids = torch.full((len(encoded), width), PAD_ID, dtype=torch.long)
        mask = torch.zeros((len(encoded), width), dtype=torch.float32)
        for i, e in enumerate(encoded):
            ids[i, : len(e)] = torch.tensor(e, dtype=torch.long)
            mask[i, : len(e) - 1] = 1.0
        return self.decoder.lm_loss(ids, mask)

    @torch.no_grad()
    def generate(self, images, instruction: str, max_len: int = 64) -> str:
        """Greedy (beam-1) decoding; deterministic for fixed weights and inputs."""
        if max_len < 1:
            raise ValueError("max_len must be >= 1")
        was_training = self.training
        self.eval()
        try:
            images = list(images)
            ids, _ = self._sequence_ids(len(images), instruction, None)
            ids_t = torch.tensor(ids, dtype=torch.long).unsqueeze(0)
            embeds = self._inject_images(ids_t, [images])
            generated = []
            max_seq = self.config.decoder.max_seq
            for _ in range(max_len):
                if embeds.shape[1] >= max_seq:
                    break
                logits = self.decoder.forward_embeddings(embeds)
                next_id = int(logits[0, -1].argmax().item())
                if next_id == EOS_ID:
                    break
                generated.append(next_id)
                next_embed = self.decoder.embed_tokens(
                    torch.tensor([[next_id]], dtype=torch.long)
                )
                embeds = torch.cat([embeds, next_embed], dim=1)
            return self.tokenizer.decode(generated)
        finally:
            if was_training:
                self.train()

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())

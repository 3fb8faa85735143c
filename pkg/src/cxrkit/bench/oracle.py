"""Ground-truth oracle models for harness soundness checks."""

from __future__ import annotations

import hashlib
import random

import numpy as np

from ..metrics.boxes import Box


def _pixels_digest(image) -> str:
    if not isinstance(image, np.ndarray):
        from PIL import Image

        with Image.open(image) as img:
            image = np.asarray(img.convert("L"), dtype=np.uint8)
    return hashlib.sha256(image.tobytes()).hexdigest()


def _item_key(instruction, images):
    return (instruction, tuple(_pixels_digest(im) for im in images))


class OracleModel:
    """Answers every item with its ground truth (scores 1.0 on every task).

    Items are identified by (instruction, image content); two records sharing
    an instruction are disambiguated by their pixels.
    """

    def __init__(self, items):
        self._by_key = {}
        for item in items:
            self._by_key[_item_key(item.instruction, item.images)] = item

    def _lookup(self, images, instruction):
        return self._by_key[_item_key(instruction, images)]

    def generate(self, images, instruction: str, max_len: int = 64) -> str:
        item = self._lookup(images, instruction)
        if item.options is not None:
            return item.options[item.answer]
        if isinstance(item.answer, Box):
            return item.answer.as_text()
        return item.answer


class CorruptedOracleModel(OracleModel):
    """Oracle with a fixed fraction of deterministically flipped answers."""

    def __init__(self, items, flip_fraction: float = 0.1, seed: int = 0):
        super().__init__(items)
        ordered = sorted(items, key=lambda it: it.item_id)
        n_flip = int(round(flip_fraction * len(ordered)))
        rng = random.Random(seed)
        flips = rng.sample(range(len(ordered)), n_flip)
        self._flipped = {ordered[i].item_id for i in flips}

    def generate(self, images, instruction: str, max_len: int = 64) -> str:
        item = self._lookup(images, instruction)
        if item.item_id not in self._flipped:
            return super().generate(images, instruction, max_len)
        if item.options is not None:
            wrong = (item.answer + 1) % len(item.options)
            return item.options[wrong]
        if isinstance(item.answer, Box):
            # disjoint from any lung-field answer box
            return "[0,0,1,1]" if (item.answer.x1, item.answer.y1) != (0, 0) else "[99,99,100,100]"
        return "zzz qqq vvv xxx"  # disjoint vocabulary -> zero overlap score

"""Byte-level tokenizer: ids 0..255 are raw bytes, then reserved specials."""

from __future__ import annotations

PAD_ID = 256
EOS_ID = 257
IMG_ID = 258
SEP_ID = 259
VOCAB_SIZE = 260


class ByteTokenizer:
    vocab_size = VOCAB_SIZE
    pad_id = PAD_ID
    eos_id = EOS_ID
    img_id = IMG_ID
    sep_id = SEP_ID

    def encode(self, text: str) -> list:
        return list(text.encode("utf-8"))

    def decode(self, ids) -> str:
        return bytes(i for i in ids if 0 <= i < 256).decode("utf-8", errors="replace")

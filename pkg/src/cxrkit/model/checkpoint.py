"""Self-describing checkpoint container, byte-stable for identical trajectories.

Layout: one JSON header line (config echo, stage tag, provenance, RNG state,
tensor directory) followed by the raw little-endian tensor bytes in directory
order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

_FORMAT = "cxrkit-ckpt-v1"

_DTYPES = {
    torch.float32: "<f4",
    torch.float64: "<f8",
    torch.int64: "<i8",
    torch.int32: "<i4",
    torch.uint8: "|u1",
    torch.bool: "|b1",
}
_TORCH_DTYPES = {v: k for k, v in _DTYPES.items()}


@dataclass
class Checkpoint:
    config: dict
    state: dict
    stage: str | None
    provenance: tuple
    torch_rng: bytes | None = None
    meta: dict = field(default_factory=dict)

    def bundle(self):
        from .bundle import ModelBundle
        from .config import ModelConfig

        bundle = ModelBundle(ModelConfig.from_dict(self.config))
        bundle.load_state_dict(self.state, strict=True)
        return bundle


def save_checkpoint(path, bundle, stage: str | None, provenance=(), meta=None,
                    include_rng: bool = True, rng_state: bytes | None = None) -> None:
    state = bundle.state_dict()
    directory = []
    blobs = []
    offset = 0
    for name in sorted(state):
        tensor = state[name].detach().cpu().contiguous()
        dtype = _DTYPES[tensor.dtype]
        blob = tensor.numpy().astype(np.dtype(dtype), copy=False).tobytes()
        directory.append({
            "name": name,
            "shape": list(tensor.shape),
            "dtype": dtype,
            "offset": offset,
            "nbytes": len(blob),
        })
        blobs.append(blob)
        offset += len(blob)

    if rng_state is None and include_rng:
        rng_state = torch.get_rng_state().numpy().tobytes()
    header = {
        "format": _FORMAT,
        "config": bundle.config.to_dict(),
        "stage": stage,
        "provenance": list(provenance),
        "torch_rng": rng_state.hex() if rng_state else None,
        "meta": meta or {},
        "tensors": directory,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        for blob in blobs:
            f.write(blob)


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as f:
        header_line = f.readline()
        payload = f.read()
    header = json.loads(header_line.decode("utf-8"))
    if header.get("format") != _FORMAT:
        raise ValueError(f"not a {_FORMAT} file: {path}")
    state = {}
    for entry in header["tensors"]:
        raw = payload[entry["offset"] : entry["offset"] + entry["nbytes"]]
        arr = np.frombuffer(raw, dtype=np.dtype(entry["dtype"])).reshape(entry["shape"]).copy()
        state[entry["name"]] = torch.from_numpy(arr).to(_TORCH_DTYPES[entry["dtype"]])
    rng_hex = header.get("torch_rng")
    return Checkpoint(
        config=header["config"],
        state=state,
        stage=header.get("stage"),
        provenance=tuple(header.get("provenance", ())),
        torch_rng=bytes.fromhex(rng_hex) if rng_hex else None,
        meta=header.get("meta", {}),
    )

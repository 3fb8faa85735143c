"""Stage orchestration: data batching, optimization, clipping, logging.

Stage defaults copy the reference hyperparameter table (peak LRs 2e-5 / 5e-4 /
1e-4 / 1e-5, weight decay 0.1 / 0.2 / 0.1 / 0.1, epochs 3 / 20 / 3 / 4, warmup
0.05, clip 1.0, AdamW beta1=0.9 beta2=0.98 eps=1e-6); batch sizes are scaled
to desk size. A uniform lr_scale preserves the between-stage ratios when a toy
run needs faster movement.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..model.bundle import ModelBundle
from ..model.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from ..model.config import ModelConfig
from ..model.losses import siglip_loss
from .freeze import freeze_policy
from .schedule import lr_schedule

STAGES = ("lm_pretrain", "contrastive", "align", "instruct")

_REQUIRED_PROVENANCE = {
    "lm_pretrain": frozenset(),
    "contrastive": frozenset(),
    "align": frozenset({"lm_pretrain", "contrastive"}),
    "instruct": frozenset({"align"}),
}

_TABLE_DEFAULTS = {
    "lm_pretrain": dict(peak_lr=2e-5, weight_decay=0.1, epochs=3, batch=32),
    "contrastive": dict(peak_lr=5e-4, weight_decay=0.2, epochs=20, batch=32),
    "align": dict(peak_lr=1e-4, weight_decay=0.1, epochs=3, batch=32),
    "instruct": dict(peak_lr=1e-5, weight_decay=0.1, epochs=4, batch=16),
}

# components whose weights a finished stage carries forward
_STAGE_COMPONENTS = {
    "lm_pretrain": ("decoder.",),
    "contrastive": ("vision.", "vision_pool.", "text_tower.", "head."),
    "align": ("projector.",),
    "instruct": ("vision.", "vision_pool.", "projector.", "decoder."),
}


class StageOrderError(ValueError):
    pass


@dataclass(frozen=True)
class StageConfig:
    stage: str
    peak_lr: float
    weight_decay: float
    epochs: int
    batch: int
    warmup_ratio: float = 0.05
    grad_accum: int = 1
    grad_clip: float = 1.0
    betas: tuple = (0.9, 0.98)
    eps: float = 1e-6
    freeze: frozenset = frozenset()
    seed: int = 0
    aug_noise_sigma: float = 0.0  # fresh pixel noise per draw (image stages)
    aug_jitter_px: int = 0  # random translation, contrastive stage only

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        if not 0.0 <= self.warmup_ratio <= 1.0:
            raise ValueError("warmup_ratio must be in [0, 1]")
        if self.batch < 1 or self.epochs < 1 or self.grad_accum < 1:
            raise ValueError("batch, epochs, grad_accum must be >= 1")
        bad = set(self.freeze) - {"vision", "text_tower", "projector", "decoder"}
        if bad:
            raise ValueError(f"freeze names unknown: {sorted(bad)}")


def default_stage_config(stage: str, *, seed: int = 0, lr_scale: float = 1.0, **overrides) -> StageConfig:
    if stage not in _TABLE_DEFAULTS:
        raise ValueError(f"unknown stage {stage!r}")
    params = dict(_TABLE_DEFAULTS[stage])
    params["peak_lr"] *= lr_scale
    params.update(overrides)
    return StageConfig(stage=stage, seed=seed, **params)


@dataclass
class StepLog:
    step: int
    lr: float
    loss: float
    grad_norm: float


@dataclass
class TrainLog:
    stage: str
    steps: list = field(default_factory=list)
    epoch_train_loss: list = field(default_factory=list)
    epoch_eval_loss: list = field(default_factory=list)
    wall_clock_s: float = 0.0

    def to_jsonl(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            for s in self.steps:
                f.write(json.dumps({
                    "stage": self.stage, "step": s.step, "lr": s.lr,
                    "loss": s.loss, "grad_norm": s.grad_norm,
                }) + "\n")
            f.write(json.dumps({
                "stage": self.stage,
                "epoch_train_loss": self.epoch_train_loss,
                "epoch_eval_loss": self.epoch_eval_loss,
                "wall_clock_s": self.wall_clock_s,
            }) + "\n")


def _load_pixels(ref) -> np.ndarray:
    if isinstance(ref, np.ndarray):
        return ref
    from PIL import Image

    with Image.open(ref) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


class _PixelCache:
    def __init__(self):
        self._cache = {}

    def get(self, ref):
        if isinstance(ref, np.ndarray):
            return ref
        if ref not in self._cache:
            self._cache[ref] = _load_pixels(ref)
        return self._cache[ref]


def _augment(pixels, sigma: float, jitter: int = 0):
    if sigma <= 0 and jitter <= 0:
        return pixels
    t = torch.from_numpy(np.ascontiguousarray(pixels)).float()
    if jitter > 0:
        # pad-and-crop shift; synthetic shapes sit far enough from region
        # boundaries that a few pixels never change side/region semantics
        dy = int(torch.randint(-jitter, jitter + 1, (1,)))
        dx = int(torch.randint(-jitter, jitter + 1, (1,)))
        background = float(t.min())
        padded = torch.full((t.shape[0] + 2 * jitter, t.shape[1] + 2 * jitter),
                            background)
        padded[jitter:jitter + t.shape[0], jitter:jitter + t.shape[1]] = t
        t = padded[jitter + dy:jitter + dy + t.shape[0],
                   jitter + dx:jitter + dx + t.shape[1]]
    if sigma > 0:
        t = t + sigma * torch.randn_like(t)
    return t.clamp(0.0, 255.0)


def _batch_loss(bundle: ModelBundle, stage: str, batch, cache: _PixelCache,
                aug_sigma: float = 0.0, aug_jitter: int = 0) -> torch.Tensor:
    if stage == "lm_pretrain":
        return bundle.text_lm_loss(batch)
    if stage == "contrastive":
        images = bundle.embed_images([_augment(cache.get(ref), aug_sigma, aug_jitter)
                                      for ref, _ in batch])
        texts = bundle.embed_texts([text for _, text in batch])
        return siglip_loss(images, texts, bundle.head)
    samples = [([_augment(cache.get(r), aug_sigma) for r in refs], instr, resp)
               for refs, instr, resp in batch]
    return bundle.triplet_loss(samples)


def _init_bundle(cfg: StageConfig, init, model_config) -> tuple:
    """Resolve the starting bundle and its provenance from checkpoint(s)."""
    required = _REQUIRED_PROVENANCE[cfg.stage]
    inits = []
    if init is not None:
        for item in init if isinstance(init, (list, tuple)) else [init]:
            if isinstance(item, (str, Path)):
                item = load_checkpoint(item)
            inits.append(item)

    provenance = set()
    for ck in inits:
        provenance.update(ck.provenance)
        if ck.stage:
            provenance.add(ck.stage)
    missing = required - provenance
    if missing:
        raise StageOrderError(
            f"stage-order violation: {cfg.stage} requires provenance {sorted(required)}, "
            f"got {sorted(provenance)}"
        )

    if not inits:
        bundle = ModelBundle(model_config or ModelConfig(), seed=cfg.seed)
        return bundle, ()

    base = inits[0]
    bundle = ModelBundle(ModelConfig.from_dict(base.config), seed=cfg.seed)
    merged = dict(bundle.state_dict())
    for ck in inits:
        # take only the components the checkpoint's stages actually trained,
        # so e.g. the contrastive checkpoint's virgin decoder cannot clobber
        # the stage-1 decoder during the alignment merge
        owned = set()
        for stage in set(ck.provenance) | ({ck.stage} if ck.stage else set()):
            owned.update(_STAGE_COMPONENTS.get(stage, ()))
        for name, tensor in ck.state.items():
            if any(name.startswith(prefix) for prefix in owned):
                merged[name] = tensor
    bundle.load_state_dict(merged, strict=True)
    return bundle, tuple(sorted(provenance))


def run_stage(cfg: StageConfig, data, init=None, eval_data=None, model_config=None):
    """Train one stage; returns (Checkpoint, TrainLog).

    `data` per stage: lm_pretrain -> texts; contrastive -> (image_ref, text)
    pairs; align/instruct -> (image_refs, instruction, response) triples.
    `init` is a Checkpoint/path or a sequence of them (alignment merges the
    stage-1 decoder with the stage-2 encoder).
    """
    bundle, provenance = _init_bundle(cfg, init, model_config)
    data = list(data)
    if not data:
        raise ValueError("run_stage: empty data")
    torch.manual_seed(cfg.seed)

    cache = _PixelCache()
    steps_per_epoch = max(1, len(data) // (cfg.batch * cfg.grad_accum))
    micro_per_step = cfg.grad_accum
    total_steps = cfg.epochs * steps_per_epoch
    optimizer = torch.optim.AdamW(
        bundle.parameters(), lr=0.0, betas=cfg.betas, eps=cfg.eps,
        weight_decay=cfg.weight_decay,
    )

    log = TrainLog(stage=cfg.stage)
    started = time.monotonic()
    step = 0
    bundle.train()
    for epoch in range(1, cfg.epochs + 1):
        trainable = freeze_policy(cfg.stage, epoch) - set(cfg.freeze)
        bundle.set_trainable(trainable)
        order = np.random.default_rng((cfg.seed, epoch)).permutation(len(data))
        epoch_losses = []
        for s in range(steps_per_epoch):
            optimizer.zero_grad(set_to_none=True)
            micro_losses = []
            for m in range(micro_per_step):
                lo = (s * micro_per_step + m) * cfg.batch
                idx = [order[(lo + j) % len(data)] for j in range(cfg.batch)]
                batch = [data[i] for i in idx]
                loss = _batch_loss(bundle, cfg.stage, batch, cache,
                                   aug_sigma=cfg.aug_noise_sigma,
                                   aug_jitter=cfg.aug_jitter_px) / micro_per_step
                loss.backward()
                micro_losses.append(float(loss.item()) * micro_per_step)
            step += 1
            lr = lr_schedule(step, total_steps, cfg.warmup_ratio, cfg.peak_lr)
            for group in optimizer.param_groups:
                group["lr"] = lr
            params = [p for p in bundle.parameters() if p.grad is not None]
            torch.nn.utils.clip_grad_norm_(params, cfg.grad_clip)
            post_norm = float(torch.norm(torch.stack([p.grad.norm() for p in params])))
            optimizer.step()
            mean_loss = sum(micro_losses) / len(micro_losses)
            epoch_losses.append(mean_loss)
            log.steps.append(StepLog(step=step, lr=lr, loss=mean_loss, grad_norm=post_norm))
        log.epoch_train_loss.append(sum(epoch_losses) / len(epoch_losses))
        if eval_data:
            bundle.eval()
            with torch.no_grad():
                chunks = [eval_data[i : i + cfg.batch] for i in range(0, len(eval_data), cfg.batch)]
                losses = [float(_batch_loss(bundle, cfg.stage, c, cache).item()) for c in chunks]
            log.epoch_eval_loss.append(sum(losses) / len(losses))
            bundle.train()

    log.wall_clock_s = time.monotonic() - started
    bundle.eval()
    checkpoint = Checkpoint(
        config=bundle.config.to_dict(),
        state={k: v.detach().clone() for k, v in bundle.state_dict().items()},
        stage=cfg.stage,
        provenance=tuple(sorted(set(provenance) | {cfg.stage})),
        torch_rng=bytes(torch.get_rng_state().numpy().tobytes()),
        meta={"epochs": cfg.epochs, "peak_lr": cfg.peak_lr, "seed": cfg.seed},
    )
    return checkpoint, log


def save_stage_checkpoint(path, checkpoint: Checkpoint) -> None:
    """Persist a run_stage result through the model checkpoint container."""
    bundle = checkpoint.bundle()
    save_checkpoint(path, bundle, checkpoint.stage, checkpoint.provenance,
                    meta=checkpoint.meta, rng_state=checkpoint.torch_rng)


@torch.no_grad()
def retrieval_top1(bundle: ModelBundle, pairs, pool_size: int = 64, seed: int = 0) -> float:
    """Image-to-text top-1 retrieval over fixed-size candidate pools.

    A retrieval counts as correct when the argmax candidate's text equals the
    image's paired text (duplicate texts are therefore never penalized).
    """
    pairs = list(pairs)
    if len(pairs) < pool_size:
        raise ValueError(f"need >= {pool_size} pairs, got {len(pairs)}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pairs))
    bundle.eval()
    cache = _PixelCache()
    correct = 0
    total = 0
    for lo in range(0, len(order) - pool_size + 1, pool_size):
        pool = [pairs[i] for i in order[lo : lo + pool_size]]
        images = bundle.embed_images([cache.get(ref) for ref, _ in pool])
        texts = bundle.embed_texts([t for _, t in pool])
        sims = images @ texts.T
        choices = sims.argmax(dim=1)
        for row, choice in enumerate(choices):
            if pool[int(choice)][1] == pool[row][1]:
                correct += 1
            total += 1
    return correct / total

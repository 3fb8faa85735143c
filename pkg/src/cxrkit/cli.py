"""Command-line entry point: synth, compile, train, bench, serve-study, analyze-study.

Every command echoes its resolved config and seed into the output directory so
any artifact's provenance can be reconstructed. Deterministic verbs reproduce
byte-identical outputs for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

USAGE_EXIT = 2
ERROR_EXIT = 1


def _load_config(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def _echo_provenance(out_dir: Path, verb: str, config: dict, args) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    resolved = {
        "verb": verb,
        "seed": args.seed,
        "config": config,
        "flags": {k: v for k, v in vars(args).items() if k != "func" and v is not None},
    }
    with open(out_dir / "run_config.json", "w", encoding="utf-8") as f:
        json.dump(resolved, f, indent=2, sort_keys=True)


def _cmd_synth(args) -> int:
    from .corpus import SynthConfig, synth_generate, write_synth_dataset, write_dataset, validate_splits

    config = _load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    cfg = SynthConfig.from_dict(config) if config else SynthConfig(seed=args.seed or 0)
    out = Path(args.out)
    _echo_provenance(out, "synth", cfg.to_dict(), args)
    items = synth_generate(cfg)
    pairs = write_synth_dataset(items, out)
    write_dataset(pairs, out / "dataset.jsonl")
    leakage = validate_splits([pairs])
    if not leakage.ok:
        raise ValueError("synthetic dataset leaked splits: " +
                         "; ".join(e.describe() for e in leakage.entries))
    stats = {
        "n_images": len(pairs),
        "splits": {s: sum(1 for r, _ in pairs if r.split == s) for s in ("train", "val", "test")},
    }
    (out / "stats.json").write_text(json.dumps(stats, indent=2, sort_keys=True))
    print(json.dumps(stats))
    return 0


def _cmd_compile(args) -> int:
    from .corpus import (TASK_REGISTRY, compile_task, emit_manifest, load_dataset,
                         templates_for, validate_splits)

    config = _load_config(args.config)
    dataset_path = config.get("dataset") or str(Path(args.out).parent / "dataset.jsonl")
    tasks = args.tasks.split(",") if args.tasks else config.get("tasks") or sorted(TASK_REGISTRY)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    out = Path(args.out)
    _echo_provenance(out, "compile", {"dataset": dataset_path, "tasks": tasks, "seed": seed}, args)

    pairs = load_dataset(dataset_path)
    all_triplets = []
    skip_log = {}
    for task in tasks:
        compiled = compile_task(task, pairs, templates_for(task), random.Random(seed))
        all_triplets.extend(compiled.triplets)
        skip_log[task] = compiled.skipped
    header = emit_manifest(all_triplets, out / "triplets.jsonl")
    leakage = validate_splits([pairs], [all_triplets])
    (out / "skipped.json").write_text(json.dumps(
        {t: len(s) for t, s in skip_log.items()}, indent=2, sort_keys=True))
    if not leakage.ok:
        raise ValueError("compiled manifest leaks splits: " +
                         "; ".join(e.describe() for e in leakage.entries))
    print(json.dumps(header))
    return 0


def _stage_data(stage: str, pairs, triplets):
    from .corpus import report_text_views

    ref_by_id = {r.image_id: r.pixels_ref for r, _ in pairs}
    train_pairs = [(r, a) for r, a in pairs if r.split == "train"]
    if stage == "lm_pretrain":
        return [
            f"INDICATION: {a.sections.get('indication', '')} "
            f"FINDINGS: {a.sections.get('findings', '')} "
            f"IMPRESSION: {a.sections.get('impression', '')}"
            for r, a in train_pairs
        ]
    if stage == "contrastive":
        return [(r.pixels_ref, text) for r, a in train_pairs for text in report_text_views(a)]
    if stage == "align":
        return [([r.pixels_ref], "", a.sections["findings"]) for r, a in train_pairs
                if a.sections.get("findings")]
    train_triplets = [t for t in triplets if t.split == "train"]
    return [([ref_by_id[i] for i in t.images], t.instruction, t.response) for t in train_triplets]


def _cmd_train(args) -> int:
    from .corpus import load_dataset, load_manifest
    from .training import default_stage_config, run_stage
    from .training.stages import save_stage_checkpoint

    if not args.stage:
        raise ValueError("train requires --stage")
    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    out = Path(args.out)

    dataset_path = config.get("dataset")
    if not dataset_path:
        raise ValueError("train config must name a dataset manifest")
    pairs = load_dataset(dataset_path)
    triplets = []
    if config.get("triplets"):
        triplets = load_manifest(config["triplets"])[1]

    stage_overrides = dict(config.get("stage_overrides", {}).get(args.stage, {}))
    cfg = default_stage_config(args.stage, seed=seed,
                               lr_scale=config.get("lr_scale", 1.0), **stage_overrides)
    _echo_provenance(out, "train", {
        "stage": args.stage, "dataset": dataset_path,
        "triplets": config.get("triplets"), "lr_scale": config.get("lr_scale", 1.0),
        "stage_config": {"peak_lr": cfg.peak_lr, "epochs": cfg.epochs, "batch": cfg.batch,
                         "weight_decay": cfg.weight_decay, "warmup_ratio": cfg.warmup_ratio,
                         "grad_clip": cfg.grad_clip}, "seed": seed,
    }, args)

    init = args.model.split(",") if args.model else None
    model_config = None
    if config.get("model"):
        from .model import ModelConfig

        model_config = ModelConfig.from_dict(config["model"])
    data = _stage_data(args.stage, pairs, triplets)
    checkpoint, log = run_stage(cfg, data, init=init, model_config=model_config)
    save_stage_checkpoint(out / f"{args.stage}.ckpt", checkpoint)
    log.to_jsonl(out / f"{args.stage}_log.jsonl")
    print(json.dumps({"stage": args.stage, "steps": len(log.steps),
                      "epoch_train_loss": log.epoch_train_loss}))
    return 0


def _cmd_bench(args) -> int:
    from .bench import BENCH_TASKS, build_eval_set, report, run_task
    from .corpus import load_dataset
    from .model import load_checkpoint

    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    dataset_path = config.get("dataset")
    if not dataset_path:
        raise ValueError("bench config must name a dataset manifest")
    if not args.model:
        raise ValueError("bench requires --model CHECKPOINT")
    tasks = args.tasks.split(",") if args.tasks else list(BENCH_TASKS)
    out = Path(args.out)
    _echo_provenance(out, "bench", {"dataset": dataset_path, "tasks": tasks,
                                    "model": args.model, "seed": seed}, args)

    pairs = [(r, a) for r, a in load_dataset(dataset_path) if r.split == "test"]
    bundle = load_checkpoint(args.model).bundle()
    results = {}
    for task in tasks:
        items = build_eval_set(task, pairs, random.Random(seed),
                               max_items=config.get("max_items"))
        if not items:
            continue
        results[task] = run_task(bundle, items, seed=seed)
    summary = report(results, out)
    print(json.dumps({t: results[t].primary_score() for t in results}))
    return 0


def _build_study_cfg(config: dict, seed: int):
    from .study import CaseRecord, Reader, build_study_config

    cases = [CaseRecord(case_id=c["case_id"], images=tuple(c["images"]),
                        indication=c["indication"], model_draft=c["model_draft"],
                        resident_draft=c.get("resident_draft"))
             for c in config["cases"]]
    readers = [Reader(r["reader_id"], r["role"]) for r in config["readers"]]
    return build_study_config(cases, readers, seed=seed, plans=config.get("plans"))


def _cmd_serve_study(args) -> int:
    from .study import serve_study

    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    out = Path(args.out)
    _echo_provenance(out, "serve-study", {"n_cases": len(config.get("cases", [])),
                                          "port": args.port, "seed": seed}, args)
    cfg = _build_study_cfg(config, seed)
    server, _ = serve_study(cfg, args.port, log_path=out / "events.jsonl")
    print(json.dumps({"listening": f"http://127.0.0.1:{args.port}",
                      "events": str(out / 'events.jsonl')}))
    sys.stdout.flush()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def _cmd_analyze_study(args) -> int:
    from .study import EventLog, analyze

    config = _load_config(args.config)
    log_path = config.get("events") or (Path(args.out) / "events.jsonl")
    out = Path(args.out)
    _echo_provenance(out, "analyze-study", {"events": str(log_path)}, args)
    log = EventLog.load(log_path)
    result = analyze(log.snapshot())
    (out / "study_report.json").write_text(json.dumps(result, indent=2, sort_keys=True))
    print(json.dumps(result))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cxrkit", description=__doc__)
    sub = parser.add_subparsers(dest="verb")

    def common(p, needs_out=True):
        p.add_argument("--config", help="declarative JSON config file")
        p.add_argument("--seed", type=int, default=None)
        if needs_out:
            p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("synth", help="generate the synthetic dataset")
    common(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("compile", help="compile instruction triplets")
    common(p)
    p.add_argument("--tasks", help="comma-separated task ids")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("train", help="run one training stage")
    common(p)
    p.add_argument("--stage", choices=["lm_pretrain", "contrastive", "align", "instruct"])
    p.add_argument("--model", help="input checkpoint(s), comma-separated for alignment")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("bench", help="run benchmark tasks over a checkpoint")
    common(p)
    p.add_argument("--tasks", help="comma-separated bench tasks")
    p.add_argument("--model", help="model checkpoint path")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve-study", help="serve the reader-study HTTP API")
    common(p)
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=_cmd_serve_study)

    p = sub.add_parser("analyze-study", help="analyze a study event log")
    common(p)
    p.set_defaults(func=_cmd_analyze_study)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return USAGE_EXIT
    try:
        return args.func(args)
    except Exception as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return ERROR_EXIT


if __name__ == "__main__":
    sys.exit(main())

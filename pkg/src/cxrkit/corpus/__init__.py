"""Corpus compilation: ingest, quality control, instruction triplets, synthesis."""

from .compile import compile_task, make_mcq
from .ingest import IngestResult, SourceDescriptor, default_qc_rules, ingest_source, qc_filter
from .manifest import LeakageReport, emit_manifest, load_manifest, load_dataset, validate_splits, write_dataset
from .restructure import restructure_report
from .synth import SynthItem, report_text_views, synth_generate, write_synth_dataset
from .tasks import TASK_REGISTRY, task_spec
from .templates import TEMPLATES, templates_for
from .types import (
    Annotation,
    ImageRecord,
    InstructionTemplate,
    SynthConfig,
    TaskSpec,
    Triplet,
)

__all__ = [
    "Annotation",
    "ImageRecord",
    "IngestResult",
    "InstructionTemplate",
    "LeakageReport",
    "SourceDescriptor",
    "SynthConfig",
    "SynthItem",
    "TASK_REGISTRY",
    "TEMPLATES",
    "TaskSpec",
    "Triplet",
    "compile_task",
    "default_qc_rules",
    "emit_manifest",
    "ingest_source",
    "load_dataset",
    "load_manifest",
    "make_mcq",
    "qc_filter",
    "report_text_views",
    "restructure_report",
    "synth_generate",
    "task_spec",
    "templates_for",
    "validate_splits",
    "write_dataset",
    "write_synth_dataset",
]

import numpy as np
import pytest
from PIL import Image

from cxrkit.corpus import SourceDescriptor, default_qc_rules, ingest_source, qc_filter
from cxrkit.corpus.ingest import QCRule


@pytest.fixture
def png(tmp_path):
    path = tmp_path / "img.png"
    Image.fromarray(np.zeros((32, 32), dtype=np.uint8)).save(path)
    return str(path)


@pytest.fixture
def tiny_png(tmp_path):
    path = tmp_path / "tiny.png"
    Image.fromarray(np.zeros((1, 1), dtype=np.uint8)).save(path)
    return str(path)


def descriptor(**overrides):
    base = dict(
        source_id="src1",
        id_fields={"image_id": "img", "patient_id": "pat", "study_id": "study"},
        pixels_field="path",
        split_field="split",
        view_field="view",
        labels_field="labels",
        report_text_field="report",
    )
    base.update(overrides)
    return SourceDescriptor(**base)


def raw_record(png, **overrides):
    base = {
        "img": "i1", "pat": "p1", "study": "s1", "path": png,
        "split": "train", "view": "AP",
        "labels": {"pneumonia": "present"},
    }
    base.update(overrides)
    return base


def test_labels_only_record(png):
    result = ingest_source(descriptor(), [raw_record(png)])
    assert len(result.pairs) == 1
    record, annotation = result.pairs[0]
    assert annotation.labels == {"pneumonia": "present"}
    assert annotation.sections == {}


def test_missing_split_rejected(png):
    raw = raw_record(png)
    del raw["split"]
    result = ingest_source(descriptor(), [raw])
    assert not result.pairs
    assert result.rejections[0].reason == "no split"


def test_three_records_one_malformed(png):
    rows = [
        raw_record(png, img="a"),
        raw_record(png, img="b"),
        {**raw_record(png, img="c"), "pat": None},
    ]
    result = ingest_source(descriptor(), rows)
    assert len(result.pairs) == 2
    assert len(result.rejections) == 1


def test_unreadable_image_rejected(tmp_path):
    raw = raw_record(str(tmp_path / "missing.png"))
    result = ingest_source(descriptor(), [raw])
    assert result.rejections[0].reason == "unreadable image"


def test_unmapped_fields_dropped_and_counted(png):
    raw = raw_record(png, extra_field=1, other=2)
    result = ingest_source(descriptor(), [raw])
    assert result.dropped_field_counts["extra_field"] == 1
    assert result.dropped_field_counts["other"] == 1


def test_report_text_is_restructured(png):
    raw = raw_record(png, report="FINDINGS: effusion. IMPRESSION: effusion.")
    result = ingest_source(descriptor(), [raw])
    _, annotation = result.pairs[0]
    assert annotation.sections["findings"] == "effusion."


def test_split_value_map(png):
    d = descriptor(split_value_map={"TRAIN": "train"})
    result = ingest_source(d, [raw_record(png, split="TRAIN")])
    assert result.pairs[0][0].split == "train"


def test_unknown_view_maps_to_unknown(png):
    result = ingest_source(descriptor(), [raw_record(png, view="oblique")])
    assert result.pairs[0][0].view == "unknown"


class TestQCFilter:
    def test_empty_input(self):
        kept, log = qc_filter([], default_qc_rules())
        assert kept == [] and log == []

    def test_min_size_rule(self, png, tiny_png):
        result = ingest_source(descriptor(), [raw_record(png, img="ok"),
                                              raw_record(tiny_png, img="small")])
        kept, log = qc_filter(result.pairs, default_qc_rules(min_image_size=8))
        assert len(kept) == 1
        assert log == [("small", "min_size")]

    def test_partition_is_total(self, png):
        result = ingest_source(descriptor(), [raw_record(png, img=f"i{k}") for k in range(10)])
        reject_even = QCRule("even", lambda r, a: not r.image_id.endswith(("0", "2", "4", "6", "8")))
        kept, log = qc_filter(result.pairs, [reject_even])
        assert len(kept) + len(log) == 10

    def test_two_failures_two_rule_ids(self, png, tiny_png):
        rows = [raw_record(png, img=f"i{k}") for k in range(8)]
        rows.append(raw_record(tiny_png, img="small"))
        rows.append(raw_record(png, img="bad_view", view="oblique"))
        result = ingest_source(descriptor(), rows)
        view_rule = QCRule("known_view", lambda r, a: r.view != "unknown")
        kept, log = qc_filter(result.pairs, default_qc_rules() + [view_rule])
        assert len(log) == 2
        assert {rule for _, rule in log} == {"min_size", "known_view"}

import numpy as np
import pytest

from cxrkit.metrics import Box, iou, map_at_thresholds, parse_box


def rasterized_iou(a: Box, b: Box) -> float:
    """Pixel-counting oracle on the [0,100) lattice."""
    grid_a = np.zeros((100, 100), dtype=bool)
    grid_b = np.zeros((100, 100), dtype=bool)
    grid_a[a.y1:a.y2, a.x1:a.x2] = True
    grid_b[b.y1:b.y2, b.x1:b.x2] = True
    union = np.logical_or(grid_a, grid_b).sum()
    inter = np.logical_and(grid_a, grid_b).sum()
    return inter / union


def random_box(rng) -> Box:
    x1, x2 = sorted(rng.choice(101, size=2, replace=False))
    y1, y2 = sorted(rng.choice(101, size=2, replace=False))
    return Box(int(x1), int(y1), int(x2), int(y2))


def test_identical_boxes():
    b = Box(10, 20, 30, 40)
    assert iou(b, b) == 1.0


def test_disjoint_boxes():
    assert iou(Box(0, 0, 10, 10), Box(50, 50, 60, 60)) == 0.0


def test_half_open_overlap():
    # [0,0,10,10] vs [5,0,15,10]: intersection 50, union 150
    assert iou(Box(0, 0, 10, 10), Box(5, 0, 15, 10)) == pytest.approx(1 / 3)


def test_edge_touching_boxes_do_not_intersect():
    assert iou(Box(0, 0, 10, 10), Box(10, 0, 20, 10)) == 0.0


def test_iou_matches_rasterization_oracle():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a, b = random_box(rng), random_box(rng)
        assert abs(iou(a, b) - rasterized_iou(a, b)) <= 1e-9


def test_iou_symmetry():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a, b = random_box(rng), random_box(rng)
        assert iou(a, b) == iou(b, a)


def test_degenerate_box_rejected():
    with pytest.raises(ValueError):
        Box(10, 0, 10, 5)
    with pytest.raises(ValueError):
        Box(0, 0, 101, 5)


def test_map_all_hits_and_misses():
    assert map_at_thresholds([1.0, 1.0]) == 1.0
    assert map_at_thresholds([0.0, 0.0]) == 0.0


def test_map_single_value():
    # 0.45 passes thresholds 0.1..0.4, fails 0.5
    assert map_at_thresholds([0.45]) == pytest.approx(0.8)


def test_map_empty_errors():
    with pytest.raises(ValueError):
        map_at_thresholds([])


def test_parse_box_basic():
    assert parse_box("[10,20,30,40]") == Box(10, 20, 30, 40)


def test_parse_box_bad_order():
    assert parse_box("box at [30,10,20,40]") is None


def test_parse_box_clamps():
    assert parse_box("[-5,0,150,50]") == Box(0, 0, 100, 50)


def test_parse_box_no_pattern():
    assert parse_box("the lesion is on the left") is None


def test_parse_box_first_match_wins():
    assert parse_box("[1,2,3,4] then [5,6,7,8]") == Box(1, 2, 3, 4)

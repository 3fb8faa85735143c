import numpy as np
import pytest
import torch

from cxrkit.model import ModelConfig, VisionConfig, VisionTower, resize_pos_embed


def patch16_config(stem="linear"):
    return VisionConfig(patch_size=16, grid=(4, 4), dim=64, layers=4, heads=4, stem=stem)


def test_patch_count_16px_patches():
    torch.manual_seed(0)
    tower = VisionTower(patch16_config())
    out = tower(torch.rand(64, 64))
    assert out.shape == (1, 16, 64)  # 4x4 grid of 16px patches


def test_patch_count_default_config():
    torch.manual_seed(0)
    tower = VisionTower(VisionConfig())
    out = tower(torch.rand(64, 64))
    cfg = VisionConfig()
    assert out.shape == (1, cfg.grid[0] * cfg.grid[1], cfg.dim)


def test_wrong_resolution_errors():
    tower = VisionTower(VisionConfig())
    with pytest.raises(ValueError, match="resolution"):
        tower(torch.rand(32, 32))


def test_eval_determinism():
    torch.manual_seed(0)
    tower = VisionTower(VisionConfig())
    img = torch.rand(2, 64, 64)
    tower.eval()
    assert torch.equal(tower(img), tower(img))


def test_patch_permutation_changes_outputs():
    """Positional encoding distinguishes content-identical patch layouts."""
    torch.manual_seed(0)
    tower = VisionTower(patch16_config(stem="linear"))
    img = torch.rand(64, 64)
    permuted = img.clone()
    permuted[0:16, 0:16], permuted[16:32, 0:16] = img[16:32, 0:16], img[0:16, 0:16]
    out, out_p = tower(img), tower(permuted)
    assert not torch.allclose(out, out_p, atol=1e-5)

    # with positional encodings zeroed, the same swap only permutes features
    with torch.no_grad():
        tower.pos_embed.zero_()
    out, out_p = tower(img)[0], tower(permuted)[0]
    swapped = out.clone()
    swapped[[0, 4]] = out[[4, 0]]  # patches (0,0) and (1,0) in a 4-wide grid
    assert torch.allclose(out_p, swapped, atol=1e-5)


def test_conv_stem_is_translation_tolerant():
    """A small shift perturbs conv-stem features far less than linear-patch ones."""
    torch.manual_seed(3)
    img = torch.zeros(64, 64)
    img[20:28, 20:28] = 1.0
    shifted = torch.zeros(64, 64)
    shifted[23:31, 23:31] = 1.0

    def drift(tower):
        with torch.no_grad():
            a, b = tower(img)[0], tower(shifted)[0]
        return (a - b).norm().item() / a.norm().item()

    conv_drift = drift(VisionTower(VisionConfig(stem="conv")))
    linear_drift = drift(VisionTower(VisionConfig(patch_size=8, grid=(8, 8), stem="linear")))
    assert conv_drift < linear_drift


class TestResizePosEmbed:
    def test_identity_bitwise(self):
        pos = torch.randn(12, 12, 8)
        assert torch.equal(resize_pos_embed(pos, (12, 12)), pos)

    def test_bilinear_center_by_hand(self):
        pos = torch.tensor([[0.0, 1.0], [2.0, 3.0]]).unsqueeze(-1)
        out = resize_pos_embed(pos, (3, 3))
        assert out.shape == (3, 3, 1)
        assert out[1, 1, 0].item() == pytest.approx(1.5)
        # corners preserved exactly
        assert out[0, 0, 0].item() == 0.0
        assert out[2, 2, 0].item() == 3.0
        # edge midpoints
        assert out[0, 1, 0].item() == pytest.approx(0.5)
        assert out[1, 0, 0].item() == pytest.approx(1.0)

    def test_full_scale_analog_24_to_32(self):
        # 384/16 = 24 grid resized for 512/16 = 32
        pos = torch.randn(24, 24, 16)
        out = resize_pos_embed(pos, (32, 32))
        assert out.shape == (32, 32, 16)

    def test_bounds_preserved_by_convexity(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            h, w = int(rng.integers(1, 9)), int(rng.integers(1, 9))
            nh, nw = int(rng.integers(1, 12)), int(rng.integers(1, 12))
            pos = torch.randn(h, w, 4)
            out = resize_pos_embed(pos, (nh, nw))
            for c in range(4):
                assert out[:, :, c].min() >= pos[:, :, c].min() - 1e-6
                assert out[:, :, c].max() <= pos[:, :, c].max() + 1e-6

    def test_invalid_grid(self):
        with pytest.raises(ValueError):
            resize_pos_embed(torch.randn(2, 2, 4), (0, 3))


def test_set_input_resolution_roundtrip():
    torch.manual_seed(1)
    tower = VisionTower(VisionConfig())
    tower.set_input_resolution((12, 12))
    out = tower(torch.rand(96, 96))
    assert out.shape == (1, 144, 64)


def test_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(projector=type(ModelConfig().projector)(in_dim=32, hidden_dim=16, out_dim=128))
    with pytest.raises(ValueError):
        VisionConfig(stem="resnet")
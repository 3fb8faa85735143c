import numpy as np
import pytest
import torch

from cxrkit.model import Decoder, DecoderConfig, EOS_ID, ModelBundle, ModelConfig


@pytest.fixture
def decoder():
    torch.manual_seed(7)
    return Decoder(DecoderConfig(dim=32, layers=2, heads=2, vocab=64, max_seq=32))


def test_causality_future_tokens_do_not_leak(decoder):
    rng = np.random.default_rng(0)
    for _ in range(10):
        ids = torch.from_numpy(rng.integers(0, 64, size=(1, 16))).long()
        cut = int(rng.integers(4, 12))
        perturbed = ids.clone()
        perturbed[0, cut:] = torch.from_numpy(rng.integers(0, 64, size=(16 - cut,))).long()
        with torch.no_grad():
            a = decoder(ids)[0, :cut]
            b = decoder(perturbed)[0, :cut]
        assert (a - b).abs().max().item() <= 1e-6


def test_sequence_length_limit(decoder):
    with pytest.raises(ValueError, match="max_seq"):
        decoder(torch.zeros(1, 40, dtype=torch.long))


@pytest.fixture
def bundle():
    return ModelBundle(ModelConfig(), seed=11)


class TestGenerate:
    def test_deterministic_repeat(self, bundle):
        img = np.random.default_rng(1).integers(0, 255, (64, 64), dtype=np.uint8)
        a = bundle.generate([img], "Describe the image.", max_len=12)
        b = bundle.generate([img], "Describe the image.", max_len=12)
        assert a == b

    def test_immediate_eos_gives_empty(self, bundle):
        # bias the output head so EOS always wins
        with torch.no_grad():
            bundle.decoder.head.bias[EOS_ID] = 1e4
        assert bundle.generate([], "anything", max_len=10) == ""

    def test_truncation_at_max_len(self, bundle):
        with torch.no_grad():
            bundle.decoder.head.bias[EOS_ID] = -1e4  # never emit EOS
        out = bundle.generate([], "abc", max_len=3)
        assert len(out.encode("utf-8", errors="replace")) <= 3 * 4
        out_ids = [b for b in out.encode("utf-8")]
        assert len(out) <= 3 or len(out_ids) <= 12

    def test_max_len_validation(self, bundle):
        with pytest.raises(ValueError):
            bundle.generate([], "x", max_len=0)

    def test_text_only_and_multi_image_prompts(self, bundle):
        rng = np.random.default_rng(2)
        img = rng.integers(0, 255, (64, 64), dtype=np.uint8)
        bundle.generate([], "no images", max_len=4)
        bundle.generate([img, img], "two images", max_len=4)

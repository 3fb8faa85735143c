import pytest
import torch

from cxrkit.corpus import SynthConfig, synth_generate, write_synth_dataset


@pytest.fixture(autouse=True)
def _limit_threads():
    torch.set_num_threads(2)


@pytest.fixture(scope="session")
def synth_items():
    # big enough that the test split can back a 50-case reader study
    return synth_generate(SynthConfig(n_images=420, seed=42))


@pytest.fixture(scope="session")
def synth_dataset(tmp_path_factory, synth_items):
    """(pairs, root) with PNGs written to disk."""
    root = tmp_path_factory.mktemp("synthds")
    pairs = write_synth_dataset(synth_items, root)
    return pairs, root


@pytest.fixture(scope="session")
def test_pairs(synth_dataset):
    pairs, _ = synth_dataset
    return [(r, a) for r, a in pairs if r.split == "test"]

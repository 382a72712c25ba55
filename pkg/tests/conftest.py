"""Shared fixtures: session-scoped synthetic corpora reused across tests.

Corpora are generated once per session because image synthesis dominates
test runtime; all downstream tests treat them as read-only.
"""

from __future__ import annotations

import numpy as np
import pytest

from figsep import SynthSpec, synth_generate
from figsep.raster import load_image


@pytest.fixture(scope="session")
def corpora_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("corpora")


@pytest.fixture(scope="session")
def whiteband_corpus(corpora_dir):
    spec = SynthSpec(count=200, separator_kind="whiteband", seed=1001)
    return synth_generate(spec, corpora_dir / "whiteband")


@pytest.fixture(scope="session")
def borderedge_corpus(corpora_dir):
    spec = SynthSpec(count=100, separator_kind="borderedge", seed=1002)
    return synth_generate(spec, corpora_dir / "borderedge")


@pytest.fixture(scope="session")
def stitched_corpus(corpora_dir):
    spec = SynthSpec(count=100, separator_kind="stitched", seed=1003)
    return synth_generate(spec, corpora_dir / "stitched")


@pytest.fixture(scope="session")
def single_corpus(corpora_dir):
    spec = SynthSpec(count=200, separator_kind="single", seed=1004)
    return synth_generate(spec, corpora_dir / "single")


@pytest.fixture(scope="session")
def small_corpus(corpora_dir):
    """A small mixed corpus for plumbing tests (not accuracy tests)."""
    spec = SynthSpec(count=8, separator_kind="whiteband", seed=42)
    return synth_generate(spec, corpora_dir / "small")


@pytest.fixture(scope="session")
def corpus_image():
    def _load(corpus, entry):
        return load_image(corpus.image_file(entry))

    return _load


@pytest.fixture()
def rng():
    return np.random.default_rng(7)

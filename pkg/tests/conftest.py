import numpy as np
import pytest

from src.counterexample import OneZeroSpec, build_bundle


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def output_dir(tmp_path, monkeypatch):
    out = tmp_path / "out"
    monkeypatch.setenv("ZERODIFF_OUTPUT_DIR", str(out))
    return out


@pytest.fixture(scope="session")
def bundle_one():
    return build_bundle(OneZeroSpec(n_seq=[1]))


@pytest.fixture(scope="session")
def bundle_two():
    return build_bundle(OneZeroSpec(n_seq=[2, 10]))

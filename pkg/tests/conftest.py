import numpy as np
import pytest

from fisherknn.pipeline import ThresholdPolicy, train
from fisherknn.synthetic import synthetic_gallery, write_synthetic_gallery


@pytest.fixture(scope="session")
def gallery():
    return synthetic_gallery(classes=5, per_class=4, width=16, height=16, seed=42)


@pytest.fixture(scope="session")
def impostors():
    return synthetic_gallery(classes=5, per_class=4, width=16, height=16, seed=4242, prefix="impostor")


@pytest.fixture(scope="session")
def model(gallery):
    return train(gallery, k=3, threshold_policy=ThresholdPolicy.auto(1.5))


@pytest.fixture(scope="session")
def gallery_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("gallery")
    write_synthetic_gallery(root, seed=42)
    return root


@pytest.fixture(scope="session")
def impostor_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("impostors")
    write_synthetic_gallery(root, seed=4242, prefix="impostor")
    return root


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)

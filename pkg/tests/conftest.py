import pytest
from hypothesis import HealthCheck, settings

from modalbench.dataset import generate_dataset, read_items
from modalbench.lexicon import Interpretation
from modalbench.toylm import build_default_lm

settings.register_profile(
    "suite",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def jane_john():
    """The interpretation used by every worked example."""
    return Interpretation(first=("Jane", "watching a show"), second=("John", "reading a book"))


@pytest.fixture(scope="session")
def small_items(tmp_path_factory):
    """A small natural main-family dataset: (path, items), 24 forms x 5 interps."""
    path = tmp_path_factory.mktemp("data") / "items.jsonl"
    generate_dataset(path, families=("main24",), n=5, seed=42)
    return path, read_items(path)


@pytest.fixture(scope="session")
def toy_lm():
    """Train the character model once; training is deterministic."""
    return build_default_lm()

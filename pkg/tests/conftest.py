import json

import numpy as np
import pytest

from debiaskit import EmbeddingMatrix
from debiaskit.subspace import BiasDirection, WordPairSet

from synthetic import (
    build_world,
    write_analogy_file,
    write_embedding_file,
    write_professions_file,
)

# the full method matrix: every algorithm in its
# group-specific and warmth/competence condition, hard debiasing
# restricted to gender, plus the gender+race+age upper bound
FULL_METHOD_MATRIX = [
    {"name": "hd_same", "method": "hd", "dimensions": "same",
     "attributes": ["gender"], "benchmarks": False},
    {"name": "sub_same", "method": "sub", "dimensions": "same", "benchmarks": False},
    {"name": "sub_scm", "method": "sub", "dimensions": ["warmth", "competence"], "benchmarks": False},
    {"name": "lp_same", "method": "lp", "dimensions": "same", "benchmarks": False},
    {"name": "lp_scm", "method": "lp", "dimensions": ["warmth", "competence"], "benchmarks": False},
    {"name": "pp_same", "method": "pp", "dimensions": "same", "benchmarks": False},
    {"name": "pp_scm", "method": "pp", "dimensions": ["warmth", "competence"], "benchmarks": False},
    {"name": "pp_gra", "method": "pp", "dimensions": ["gender", "race", "age"], "benchmarks": False},
]


@pytest.fixture(scope="session")
def world():
    """The deterministic synthetic 300-d embedding world."""
    return build_world()


@pytest.fixture(scope="session")
def world_dir(tmp_path_factory, world):
    """The world written out as the files a user would supply."""
    path = tmp_path_factory.mktemp("world")
    write_embedding_file(world, path / "embedding.txt")
    write_analogy_file(world, path / "analogy.txt")
    write_professions_file(world, path / "professions.txt")
    return path


def write_config(world_dir, target_dir, **overrides):
    """Experiment config JSON next to the world files (relative paths)."""
    config = {
        "embedding": str(world_dir / "embedding.txt"),
        "professions": str(world_dir / "professions.txt"),
        "attributes": ["gender", "race", "age"],
        "trials": 2,
        "sample_size": 8,
        "base_seed": 0,
    }
    config.update(overrides)
    path = target_dir / "config.json"
    path.write_text(json.dumps(config, indent=2))
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def tiny_emb():
    """2-d, 4-token embedding handy for hand-checkable geometry."""
    return EmbeddingMatrix(
        ("right", "up", "diag", "left"),
        np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 0.0]]),
    )


def random_embedding(rng, n_tokens, dim, prefix="t"):
    return EmbeddingMatrix(
        tuple(f"{prefix}{i}" for i in range(n_tokens)),
        rng.normal(size=(n_tokens, dim)),
    )


def direction_of(vec, anchor=None, name="d"):
    """BiasDirection from a raw vector (normalized) for direct op tests."""
    vec = np.asarray(vec, dtype=np.float64)
    anchor = np.zeros_like(vec) if anchor is None else np.asarray(anchor, dtype=np.float64)
    return BiasDirection(
        direction=vec / np.linalg.norm(vec),
        anchor_mean=anchor,
        source=WordPairSet(name, (("a", "b"),)),
    )

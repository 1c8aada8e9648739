"""Bias directions from word-pair lists.

A pair list names two poles of a social attribute ("man"/"woman",
"warm"/"cold"). Stacking the per-pair difference vectors gives a matrix
whose top principal direction is taken as the attribute's bias
direction; the mean embedding of the pair words anchors it.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .embedding_store import EmbeddingMatrix
from .errors import DataError, NumericError, UsageError, VocabularyError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WordPairSet:
    """Named, ordered list of (high-pole, low-pole) token pairs.

    ``seed`` records the sampling seed when the set was produced by
    :func:`sample_pairs`; loaded sets leave it None.
    """

    name: str
    pairs: tuple[tuple[str, str], ...]
    seed: int | None = None

    def __post_init__(self):
        if not self.pairs:
            raise DataError(f"pair set {self.name!r} is empty")
        pairs = tuple((str(p), str(m)) for p, m in self.pairs)
        for plus, minus in pairs:
            if plus == minus:
                raise DataError(f"pair set {self.name!r}: degenerate pair ({plus!r}, {minus!r})")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def tokens(self) -> list[str]:
        """All tokens in pair order (duplicates across pairs kept once)."""
        out: list[str] = []
        seen = set()
        for plus, minus in self.pairs:
            for tok in (plus, minus):
                if tok not in seen:
                    seen.add(tok)
                    out.append(tok)
        return out


@dataclass(frozen=True, eq=False)
class BiasDirection:
    """Unit bias direction plus the anchor mean of its defining words."""

    direction: np.ndarray
    anchor_mean: np.ndarray
    source: WordPairSet

    def __post_init__(self):
        direction = np.asarray(self.direction, dtype=np.float64)
        anchor = np.asarray(self.anchor_mean, dtype=np.float64)
        if direction.shape != anchor.shape or direction.ndim != 1:
            raise DataError("direction and anchor_mean must be equal-length vectors")
        if abs(np.linalg.norm(direction) - 1.0) > 1e-9:
            raise NumericError("bias direction must have unit norm")
        direction.setflags(write=False)
        anchor.setflags(write=False)
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "anchor_mean", anchor)

    @property
    def dim(self) -> int:
        return self.direction.shape[0]


def load_pair_set(path, name: str) -> WordPairSet:
    """Load a pair list from two-column TSV or a JSON array of 2-arrays.

    Tokens are lowercased on ingestion. TSV lines starting with ``#``
    are comments.
    """
    text = open(path, encoding="utf-8").read()
    pairs: list[tuple[str, str]] = []
    if str(path).endswith(".json"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, list):
            raise DataError(f"{path}: expected a JSON array of pairs")
        for i, item in enumerate(data):
            if not (isinstance(item, list) and len(item) == 2):
                raise DataError(f"{path}: element {i} is not a 2-element array")
            pairs.append((str(item[0]).lower(), str(item[1]).lower()))
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
                raise DataError(f"{path}:{lineno}: expected two tab-separated tokens")
            pairs.append((fields[0].strip().lower(), fields[1].strip().lower()))
    if not pairs:
        raise DataError(f"{path}: no pairs found")
    return WordPairSet(name=name, pairs=tuple(pairs))


def restrict_to_vocabulary(pair_set: WordPairSet, emb: EmbeddingMatrix) -> WordPairSet:
    """Drop pairs containing out-of-vocabulary tokens, with a warning."""
    kept = []
    dropped = []
    for plus, minus in pair_set.pairs:
        if plus in emb and minus in emb:
            kept.append((plus, minus))
        else:
            dropped.append((plus, minus))
    if dropped:
        log.warning(
            "pair set %r: dropped %d of %d pairs with out-of-vocabulary tokens: %s",
            pair_set.name, len(dropped), len(pair_set.pairs), dropped,
        )
    if not kept:
        raise VocabularyError(
            [t for p in dropped for t in p], f"pair set {pair_set.name!r} has no usable pairs"
        )
    return WordPairSet(name=pair_set.name, pairs=tuple(kept), seed=pair_set.seed)


def sample_pairs(pair_set: WordPairSet, n: int, seed: int) -> WordPairSet:
    """Sample n pairs without replacement; same seed, same sample."""
    if n < 1 or n > len(pair_set.pairs):
        raise UsageError(
            f"cannot sample {n} pairs from {pair_set.name!r} ({len(pair_set.pairs)} available)"
        )
    if seed < 0:
        raise UsageError("sampling seed must be nonnegative")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(pair_set.pairs), size=n, replace=False)
    return WordPairSet(
        name=pair_set.name,
        pairs=tuple(pair_set.pairs[i] for i in idx),
        seed=seed,
    )


def compute_bias_direction(emb: EmbeddingMatrix, pairs: WordPairSet, k: int = 1) -> BiasDirection:
    """Top principal direction of the stacked pair-difference matrix.

    Row i of the difference matrix is emb[plus_i] - emb[minus_i]; the
    direction is its first right-singular vector (uncentered), with sign
    fixed so it aligns with the first pair's difference. The anchor mean
    averages all 2n pair-word embeddings.
    """
    if k != 1:
        raise UsageError(f"k={k} bias dimensions not supported; only k=1 is implemented")
    missing = [t for t in pairs.tokens() if t not in emb]
    if missing:
        raise VocabularyError(missing, f"pair set {pairs.name!r}")
    diffs = np.array([emb.vector(p) - emb.vector(m) for p, m in pairs.pairs])
    _, s, vt = np.linalg.svd(diffs, full_matrices=False)
    if s[0] == 0.0:
        raise NumericError(f"pair set {pairs.name!r}: all difference vectors are zero")
    direction = vt[0]
    if np.dot(direction, diffs[0]) < 0:
        direction = -direction
    words = np.array([emb.vector(t) for pair in pairs.pairs for t in pair])
    return BiasDirection(direction=direction, anchor_mean=words.mean(axis=0), source=pairs)

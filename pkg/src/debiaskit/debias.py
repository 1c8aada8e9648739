"""Debiasing transforms over an embedding matrix.

Four algorithms are provided:

* subtract     -- shift every vector by the bias direction
* linear_project -- remove each vector's component along the direction
* partial_project -- soft removal that spares words with a small
  component orthogonal to the direction (the definitional words),
  attenuating by sigma^2 / (||r|| + 1)^2
* hard_debias  -- neutralize a designated token set orthogonal to the
  direction on the unit sphere, then re-place definitional pairs
  symmetrically about the bias hyperplane

subtract/linear_project/partial_project operate on raw vectors;
hard_debias works on a unit-normalized copy, since its equalize step is
defined on the sphere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .embedding_store import EmbeddingMatrix, unit_normalized
from .errors import DataError, NumericError, UsageError, VocabularyError
from .subspace import BiasDirection, WordPairSet, compute_bias_direction, sample_pairs

METHODS = ("sub", "lp", "pp", "hd")

# Derives the per-dimension sampling seed inside a pipeline. Kept as a
# plain affine mix so it can be stated in one line of CLI help.
SEED_MIX = 10007


def dimension_seed(trial_seed: int, dimension_index: int) -> int:
    return trial_seed * SEED_MIX + dimension_index


@dataclass(frozen=True)
class DebiasSpec:
    """A debiasing recipe: one method applied over an ordered list of
    bias dimensions (each a word-pair set)."""

    method: str
    dimensions: tuple[WordPairSet, ...]
    pp_sigma: float = 1.0
    # None selects the complement-of-pairs policy: every token not in the
    # dimension's pair list is treated as neutral.
    hd_neutral_tokens: frozenset[str] | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not self.dimensions:
            raise UsageError("debias spec needs at least one bias dimension")
        if self.method == "pp" and not self.pp_sigma > 0:
            raise UsageError(f"pp requires sigma > 0, got {self.pp_sigma}")
        object.__setattr__(self, "dimensions", tuple(self.dimensions))


def _check_direction(emb: EmbeddingMatrix, direction: BiasDirection, unit: bool = True):
    if direction.dim != emb.dim:
        raise DataError(f"direction dim {direction.dim} != embedding dim {emb.dim}")
    if unit and abs(np.linalg.norm(direction.direction) - 1.0) > 1e-9:
        raise NumericError("direction is not unit-norm")


def subtract(emb: EmbeddingMatrix, direction: BiasDirection) -> EmbeddingMatrix:
    """w' = w - v for every word w."""
    _check_direction(emb, direction, unit=False)
    return emb.with_vectors(emb.vectors - direction.direction)


def linear_project(emb: EmbeddingMatrix, direction: BiasDirection) -> EmbeddingMatrix:
    """w' = w - <w, v> v: every word becomes orthogonal to v."""
    _check_direction(emb, direction)
    v = direction.direction
    dots = emb.vectors @ v
    return emb.with_vectors(emb.vectors - dots[:, None] * v)


def partial_project(emb: EmbeddingMatrix, direction: BiasDirection, sigma: float = 1.0) -> EmbeddingMatrix:
    """w' = mu + r(w) + beta * f(||r(w)||) * v.

    r(w) = w - <w, v> v is the component orthogonal to v,
    beta = <w, v> - <mu, v>, f(eta) = sigma^2 / (eta + 1)^2, and mu is
    the anchor mean of the words that defined the direction. Words with
    a large orthogonal component keep almost none of their bias
    component; words close to the bias axis keep most of theirs.
    """
    _check_direction(emb, direction)
    if sigma < 0:
        raise UsageError(f"sigma must be nonnegative, got {sigma}")
    v = direction.direction
    mu = direction.anchor_mean
    dots = emb.vectors @ v
    residual = emb.vectors - dots[:, None] * v
    beta = dots - float(mu @ v)
    f = sigma**2 / (np.linalg.norm(residual, axis=1) + 1.0) ** 2
    return emb.with_vectors(mu + residual + (beta * f)[:, None] * v)


def hard_debias(
    emb: EmbeddingMatrix,
    direction: BiasDirection,
    neutral: Iterable[str],
    equality_pairs: WordPairSet,
) -> EmbeddingMatrix:
    """Neutralize-and-equalize on a unit-normalized copy.

    Neutral tokens lose their component along v and are re-normalized.
    Each equality pair (a, b) is re-placed symmetrically about the
    hyperplane orthogonal to v, so both ends are unit-norm and
    equidistant from every neutral token.
    """
    _check_direction(emb, direction)
    normalized = unit_normalized(emb)
    vectors = np.array(normalized.vectors)
    v = direction.direction

    eq_tokens = [t for pair in equality_pairs.pairs for t in pair]
    missing = [t for t in eq_tokens if t not in emb]
    if missing:
        raise VocabularyError(missing, "hard_debias equality pairs")

    neutral_rows = []
    for token in neutral:
        if token in emb:
            neutral_rows.append(emb.row(token))
    if neutral_rows:
        rows = np.array(neutral_rows)
        sub = vectors[rows]
        ortho = sub - (sub @ v)[:, None] * v
        norms = np.linalg.norm(ortho, axis=1)
        if np.any(norms == 0.0):
            bad = normalized.tokens[int(rows[int(np.argmin(norms))])]
            raise NumericError(f"token {bad!r} lies entirely on the bias direction")
        vectors[rows] = ortho / norms[:, None]

    for plus, minus in equality_pairs.pairs:
        a = normalized.vector(plus)
        b = normalized.vector(minus)
        midpoint = (a + b) / 2.0
        nu = midpoint - float(midpoint @ v) * v
        z_sq = 1.0 - float(nu @ nu)
        side = float((a - b) @ v)
        if z_sq <= 1e-18 or abs(side) <= 1e-12:
            raise NumericError(f"equality pair ({plus!r}, {minus!r}) collapses under equalize")
        z = np.sqrt(z_sq) * np.sign(side)
        vectors[emb.row(plus)] = nu + z * v
        vectors[emb.row(minus)] = nu - z * v

    return emb.with_vectors(vectors)


def complement_neutral_tokens(emb: EmbeddingMatrix, pair_set: WordPairSet) -> frozenset[str]:
    """Default neutral set: every vocabulary token not in the pair list."""
    pair_tokens = set(pair_set.tokens())
    return frozenset(t for t in emb.tokens if t not in pair_tokens)


def load_token_set(path) -> frozenset[str]:
    """Token-set file: one token per line, '#' comments allowed."""
    out = set()
    for line in open(path, encoding="utf-8"):
        line = line.strip()
        if line and not line.startswith("#"):
            out.add(line.lower())
    if not out:
        raise DataError(f"{path}: no tokens found")
    return frozenset(out)


def apply_method(
    emb: EmbeddingMatrix,
    spec: DebiasSpec,
    direction: BiasDirection,
    full_pairs: WordPairSet,
) -> EmbeddingMatrix:
    """Apply one debiasing step along one computed direction.

    ``full_pairs`` is the dimension's complete pair list; hard debiasing
    uses it for the equality sets (and, under the default policy, to
    derive the neutral set), while the direction itself may come from a
    sampled subset.
    """
    if spec.method == "sub":
        return subtract(emb, direction)
    if spec.method == "lp":
        return linear_project(emb, direction)
    if spec.method == "pp":
        return partial_project(emb, direction, spec.pp_sigma)
    neutral = spec.hd_neutral_tokens
    if neutral is None:
        neutral = complement_neutral_tokens(emb, full_pairs)
    return hard_debias(emb, direction, neutral, full_pairs)


def run_pipeline(
    emb: EmbeddingMatrix,
    spec: DebiasSpec,
    seed: int,
    sample_size: int = 8,
) -> EmbeddingMatrix:
    """Debias along each dimension of the spec, in order.

    For dimension i the pair sample is drawn with seed
    ``seed * 10007 + i``, the bias direction is computed on the current
    (possibly already debiased) embedding, and the method is applied.
    Identical (spec, seed) always produce identical output.
    """
    current = emb
    for i, dim_pairs in enumerate(spec.dimensions):
        if sample_size > len(dim_pairs):
            raise UsageError(
                f"sample size {sample_size} exceeds {len(dim_pairs)} pairs "
                f"in dimension {dim_pairs.name!r}"
            )
        sampled = sample_pairs(dim_pairs, sample_size, dimension_seed(seed, i))
        direction = compute_bias_direction(current, sampled)
        current = apply_method(current, spec, direction, dim_pairs)
    return current

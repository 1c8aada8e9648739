"""Dense word embeddings: loading, cosine similarity, nearest neighbors.

Embeddings are held as an immutable token list plus a |V| x d float64
matrix. Every transformation elsewhere in the toolkit produces a new
matrix; nothing mutates a loaded embedding in place, so one instance can
be shared freely across parallel trials.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DataError, NumericError


class Neighbor(NamedTuple):
    token: str
    similarity: float


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """Vocabulary-indexed dense embedding matrix.

    tokens are unique and ordered; ``vectors[i]`` is the embedding of
    ``tokens[i]``. The vector array is marked read-only on construction.
    """

    tokens: tuple[str, ...]
    vectors: np.ndarray
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise DataError(f"vectors must be 2-dimensional, got shape {vectors.shape}")
        if len(self.tokens) != vectors.shape[0]:
            raise DataError(
                f"{len(self.tokens)} tokens but {vectors.shape[0]} vector rows"
            )
        if vectors.shape[0] < 1 or vectors.shape[1] < 1:
            raise DataError("embedding must have at least one token and one dimension")
        if not np.all(np.isfinite(vectors)):
            bad = int(np.argwhere(~np.isfinite(vectors).all(axis=1))[0][0])
            raise DataError(f"non-finite value in vector of token {self.tokens[bad]!r}")
        index = {}
        for i, tok in enumerate(self.tokens):
            if tok in index:
                raise DataError(f"duplicate token {tok!r} at rows {index[tok]} and {i}")
            index[tok] = i
        if vectors.flags.writeable:
            vectors = vectors.copy()
            vectors.setflags(write=False)
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "_index", index)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def row(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise DataError(f"token {token!r} not in vocabulary") from None

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.row(token)]

    def with_vectors(self, vectors: np.ndarray) -> "EmbeddingMatrix":
        """New matrix over the same vocabulary with replaced vectors."""
        return EmbeddingMatrix(self.tokens, vectors)


def load_embeddings(path) -> EmbeddingMatrix:
    """Read a word2vec text file: header ``<count> <dim>``, then one
    token and ``dim`` reals per line.

    Rejects malformed headers, rows of the wrong arity, non-finite values
    and duplicate tokens (reporting the offending line).
    """
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise DataError(f"{path}: malformed header {header.strip()!r}")
        try:
            count, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise DataError(f"{path}: malformed header {header.strip()!r}") from None
        if count < 1 or dim < 1:
            raise DataError(f"{path}: header must declare positive count and dim")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.split()
            token = fields[0]
            if len(fields) - 1 != dim:
                raise DataError(
                    f"{path}:{lineno}: expected {dim} values for {token!r}, "
                    f"got {len(fields) - 1}"
                )
            if token in seen:
                raise DataError(
                    f"{path}:{lineno}: duplicate token {token!r} "
                    f"(first seen on line {seen[token]})"
                )
            try:
                vec = np.array(fields[1:], dtype=np.float64)
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric value for {token!r}") from None
            if not np.all(np.isfinite(vec)):
                raise DataError(f"{path}:{lineno}: non-finite value for {token!r}")
            seen[token] = lineno
            tokens.append(token)
            rows.append(vec)
    if len(tokens) != count:
        raise DataError(f"{path}: header declares {count} rows, file has {len(tokens)}")
    return EmbeddingMatrix(tuple(tokens), np.vstack(rows))


def save_embeddings(emb: EmbeddingMatrix, path) -> None:
    """Write word2vec text format, values at 6 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(emb)} {emb.dim}\n")
        for token, vec in zip(emb.tokens, emb.vectors):
            fh.write(token + " " + " ".join(f"{x:.6g}" for x in vec) + "\n")


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity of two equal-length, nonzero vectors."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DataError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise NumericError("cosine undefined for zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


def nearest_neighbor(
    emb: EmbeddingMatrix,
    query: np.ndarray,
    exclude: Iterable[str] = (),
    k: int = 1,
) -> list[Neighbor]:
    """Top-k tokens by cosine similarity with ``query``.

    Excluded tokens are never returned. Ties break by vocabulary order,
    so results are deterministic.
    """
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (emb.dim,):
        raise DataError(f"query dimension {query.shape} != embedding dim {emb.dim}")
    qnorm = np.linalg.norm(query)
    if qnorm == 0.0:
        raise NumericError("nearest_neighbor query has zero norm")
    norms = np.linalg.norm(emb.vectors, axis=1)
    if np.any(norms == 0.0):
        bad = emb.tokens[int(np.argmin(norms))]
        raise NumericError(f"zero-norm row for token {bad!r}")
    sims = emb.vectors @ query / (norms * qnorm)

    excluded_rows = [emb._index[t] for t in exclude if t in emb._index]
    available = len(emb) - len(set(excluded_rows))
    if k < 1 or k > available:
        raise DataError(f"k={k} but only {available} candidate tokens")
    if excluded_rows:
        sims = sims.copy()
        sims[excluded_rows] = -np.inf
    # stable sort on -similarity keeps vocabulary order among ties
    order = np.argsort(-sims, kind="stable")[:k]
    return [Neighbor(emb.tokens[i], float(sims[i])) for i in order]


def unit_normalized(emb: EmbeddingMatrix) -> EmbeddingMatrix:
    """Copy of the embedding with every row scaled to unit norm."""
    norms = np.linalg.norm(emb.vectors, axis=1)
    if np.any(norms == 0.0):
        bad = emb.tokens[int(np.argmin(norms))]
        raise NumericError(f"cannot normalize zero-norm row for token {bad!r}")
    return emb.with_vectors(emb.vectors / norms[:, None])

"""Residual-bias measures over an embedding.

Two audits are provided. The coherence test correlates (Spearman) the
rank order of profession similarities against each pole of a social
attribute: identical orderings (rho = 1) mean no measured bias. The
quality test counts how often the analogy "high-pole : low-pole ::
profession : x" returns the profession itself (or a plural/synonym),
reporting the unbiased fraction.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .embedding_store import EmbeddingMatrix, unit_normalized
from .errors import DataError, NumericError, VocabularyError
from .subspace import WordPairSet

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProfessionList:
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise DataError("profession list is empty")
        object.__setattr__(self, "tokens", tuple(str(t) for t in self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)


def load_professions(path) -> ProfessionList:
    """One lowercased token per line; '#' comments and blanks skipped."""
    tokens = []
    for line in open(path, encoding="utf-8"):
        line = line.strip()
        if line and not line.startswith("#"):
            tokens.append(line.lower())
    if not tokens:
        raise DataError(f"{path}: no professions found")
    return ProfessionList(tuple(tokens))


def filter_professions(professions: ProfessionList, emb: EmbeddingMatrix) -> ProfessionList:
    """Drop out-of-vocabulary professions, with a warning."""
    kept = tuple(t for t in professions.tokens if t in emb)
    dropped = len(professions.tokens) - len(kept)
    if dropped:
        log.warning("dropped %d of %d out-of-vocabulary professions", dropped, len(professions.tokens))
    if not kept:
        raise VocabularyError(professions.tokens, "no professions in vocabulary")
    return ProfessionList(kept)


_PLURAL_VOWELS = "aeiou"


def _plural_forms(token: str) -> set[str]:
    # rule-based: +s, +es, y -> ies
    forms = {token + "s", token + "es"}
    if token.endswith("y") and len(token) > 1 and token[-2] not in _PLURAL_VOWELS:
        forms.add(token[:-1] + "ies")
    return forms


class SynonymLexicon:
    """Acceptable alternates per token: the token itself, its listed
    synonyms, and rule-based plural forms of all of them."""

    def __init__(self, synonyms: dict[str, set[str]] | None = None):
        self._synonyms = {k.lower(): {a.lower() for a in v} for k, v in (synonyms or {}).items()}

    @classmethod
    def load(cls, path) -> "SynonymLexicon":
        """TSV: token TAB comma-separated alternates."""
        synonyms: dict[str, set[str]] = {}
        for lineno, line in enumerate(open(path, encoding="utf-8"), start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0].strip():
                raise DataError(f"{path}:{lineno}: expected 'token<TAB>alt,alt,...'")
            token = fields[0].strip().lower()
            alts = {a.strip().lower() for a in fields[1].split(",") if a.strip()}
            synonyms.setdefault(token, set()).update(alts)
        return cls(synonyms)

    def alternates_for(self, token: str) -> frozenset[str]:
        token = token.lower()
        base = {token} | self._synonyms.get(token, set())
        out = set(base)
        for word in base:
            out |= _plural_forms(word)
        return frozenset(out)

    def __len__(self) -> int:
        return len(self._synonyms)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation with average ranks for ties.

    Constant input makes the correlation undefined and raises rather
    than silently returning 0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"length mismatch: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise DataError("spearman needs at least 2 observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise NumericError("spearman undefined for constant input")
    rx = _average_ranks(x) - (len(x) + 1) / 2.0
    ry = _average_ranks(y) - (len(y) + 1) / 2.0
    return float(rx @ ry / np.sqrt((rx @ rx) * (ry @ ry)))


def _resolve(emb: EmbeddingMatrix, tokens, context: str) -> None:
    missing = [t for t in tokens if t not in emb]
    if missing:
        raise VocabularyError(missing, context)


def ect(emb: EmbeddingMatrix, attribute: WordPairSet, professions: ProfessionList) -> float:
    """Embedding coherence: Spearman correlation between the professions'
    cosine similarities to the two pole-mean embeddings."""
    _resolve(emb, attribute.tokens(), f"attribute {attribute.name!r}")
    _resolve(emb, professions.tokens, "professions")
    if len(professions) < 2:
        raise DataError("coherence test needs at least 2 professions")
    plus_mean = np.mean([emb.vector(p) for p, _ in attribute.pairs], axis=0)
    minus_mean = np.mean([emb.vector(m) for _, m in attribute.pairs], axis=0)
    prof = np.array([emb.vector(t) for t in professions.tokens])
    norms = np.linalg.norm(prof, axis=1)
    np_plus, np_minus = np.linalg.norm(plus_mean), np.linalg.norm(minus_mean)
    if np_plus == 0.0 or np_minus == 0.0 or np.any(norms == 0.0):
        raise NumericError("zero-norm vector in coherence test")
    s_plus = prof @ plus_mean / (norms * np_plus)
    s_minus = prof @ minus_mean / (norms * np_minus)
    return spearman(s_plus, s_minus)


def eqt(
    emb: EmbeddingMatrix,
    attribute: WordPairSet,
    professions: ProfessionList,
    lexicon: SynonymLexicon,
) -> float:
    """Fraction of unbiased analogies over all (pair, profession) cells.

    Each analogy high:low::profession is completed by 3CosAdd over
    unit-normalized vectors, excluding only the two pole words from the
    candidates (the profession itself may be returned). The completion
    is unbiased when it lands in the profession's alternate set.
    """
    _resolve(emb, attribute.tokens(), f"attribute {attribute.name!r}")
    _resolve(emb, professions.tokens, "professions")
    normalized = unit_normalized(emb)
    vectors = normalized.vectors
    prof_rows = np.array([normalized.row(t) for t in professions.tokens])
    alternates = [lexicon.alternates_for(t) for t in professions.tokens]

    unbiased = 0
    chunk = 64  # bounds the |V| x chunk score block on large vocabularies
    for plus, minus in attribute.pairs:
        p_row, m_row = normalized.row(plus), normalized.row(minus)
        offset = vectors[m_row] - vectors[p_row]
        for start in range(0, len(prof_rows), chunk):
            rows = prof_rows[start:start + chunk]
            # queries: one per profession, scored against every vocab word
            queries = vectors[rows] + offset
            scores = vectors @ queries.T
            scores[p_row, :] = -np.inf
            scores[m_row, :] = -np.inf
            winners = np.argmax(scores, axis=0)  # first max = vocabulary-order tie-break
            for j, winner in enumerate(winners):
                if normalized.tokens[winner] in alternates[start + j]:
                    unbiased += 1
    return unbiased / (len(attribute.pairs) * len(professions))

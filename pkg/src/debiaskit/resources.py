"""Access to the data files shipped with the package: the five
word-pair lists, the default professions list, and the synonym lexicon.
"""
from __future__ import annotations

from importlib import resources

from .bias_metrics import ProfessionList, SynonymLexicon, load_professions
from .errors import UsageError
from .subspace import WordPairSet, load_pair_set

BUILTIN_PAIR_SETS = ("gender", "race", "age", "warmth", "competence")


def _data_path(filename: str):
    return resources.files("debiaskit").joinpath("data", filename)


def builtin_pair_set(name: str) -> WordPairSet:
    if name not in BUILTIN_PAIR_SETS:
        raise UsageError(
            f"unknown built-in pair set {name!r}; available: {', '.join(BUILTIN_PAIR_SETS)}"
        )
    with resources.as_file(_data_path(f"{name}.tsv")) as path:
        return load_pair_set(path, name)


def builtin_professions() -> ProfessionList:
    with resources.as_file(_data_path("professions.txt")) as path:
        return load_professions(path)


def builtin_lexicon() -> SynonymLexicon:
    with resources.as_file(_data_path("lexicon.tsv")) as path:
        return SynonymLexicon.load(path)

"""Deterministic synthetic 300-d embedding with planted social-bias
structure, used by the test suite where a pre-trained embedding would
otherwise be required.

Construction sketch:

* six orthonormal "special" directions: a common centroid shared by
  every word (real embedding clouds are far from the origin), warmth,
  competence, and one extra per social attribute;
* each attribute's bias direction is a unit mix of warmth/competence
  (weight ``rho``) and its own extra direction, so group bias lives
  mostly, but not entirely, inside the warmth/competence plane;
* pole words sit at pair-shared random bases plus/minus ``gamma`` times
  their attribute direction; professions carry random coefficients on
  every attribute direction (the planted bias the audits must detect);
* analogy questions are planted so the correct answer beats a single
  distractor only through a component along a chosen direction: in the
  warmth/competence plane (breaks once those are removed), along a
  group direction (breaks when group directions are removed directly,
  survives warmth/competence removal), or along a never-removed
  direction (the stable control group).

Everything derives from one seeded generator, so repeated builds are
bit-identical.
"""
from __future__ import annotations

import numpy as np

from debiaskit import EmbeddingMatrix, builtin_pair_set, builtin_professions

DIM = 300
GAMMA = 1.2           # pole displacement along the attribute direction
BODY_NORM = 3.0       # norm of the unstructured part of every word
CENTROID_NORM = 2.0   # shared offset of the whole word cloud
CENTROID_SPREAD = 0.5  # per-word variation of the centroid coefficient
NOISE_NORM = 0.35     # total norm of per-word isotropic jitter
PROF_BIAS = 0.45      # stdev of profession coefficients on attribute directions
RHO = 0.95            # attribute-direction weight inside the warmth/competence plane
N_FILLER = 700
N_PROFESSIONS = 60

ATTRIBUTES = ("gender", "race", "age")
SCM = ("warmth", "competence")
# in-plane angles of the three attribute directions
THETAS = {"gender": np.deg2rad(20.0), "race": np.deg2rad(55.0), "age": np.deg2rad(80.0)}

# analogy plant: answer margin along the discriminating direction, and
# its small mismatch in the never-removed subspace
DELTA = 0.8
EPS = 0.4
OFFSET_NORM = 1.5
N_PER_FAMILY = {"plane": 12, "group": 20, "clean": 48}  # questions per section

# bias-attractor twins for the analogy-quality audit
N_TWINNED = 20
TWIN_SHIFT = 0.67   # fraction of the profession norm, along the attribute direction
TWIN_JITTER = 0.3


class SyntheticWorld:
    """The embedding plus the question/answer bookkeeping of one build."""

    def __init__(self, emb: EmbeddingMatrix, questions, sections, professions):
        self.embedding = emb
        self.questions = questions      # list of (a, b, c, answer) token tuples
        self.sections = sections        # per-question section label
        self.professions = professions  # tokens present in the vocabulary


def _orthonormal_specials(rng) -> dict[str, np.ndarray]:
    basis, _ = np.linalg.qr(rng.normal(size=(DIM, 6)))
    names = ("centroid", "warmth", "competence", "gender_extra", "race_extra", "age_extra")
    return {name: basis[:, i].copy() for i, name in enumerate(names)}


def _attribute_directions(specials) -> dict[str, np.ndarray]:
    out = {"warmth": specials["warmth"], "competence": specials["competence"]}
    tail = np.sqrt(1.0 - RHO**2)
    for attr in ATTRIBUTES:
        theta = THETAS[attr]
        in_plane = np.cos(theta) * specials["warmth"] + np.sin(theta) * specials["competence"]
        out[attr] = RHO * in_plane + tail * specials[f"{attr}_extra"]
    return out


class _Builder:
    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)
        self.specials = _orthonormal_specials(self.rng)
        self.special_basis = np.stack(list(self.specials.values()), axis=1)
        self.directions = _attribute_directions(self.specials)
        self.centroid = CENTROID_NORM * self.specials["centroid"]

    def body(self, norm: float = BODY_NORM) -> np.ndarray:
        raw = self.rng.normal(size=DIM)
        raw -= self.special_basis @ (self.special_basis.T @ raw)
        return raw * (norm / np.linalg.norm(raw))

    def noise(self) -> np.ndarray:
        raw = self.rng.normal(size=DIM)
        return raw * (NOISE_NORM / np.linalg.norm(raw))

    def grounded(self, vec: np.ndarray) -> np.ndarray:
        """Body-space vector moved into the word cloud."""
        coef = self.rng.normal(1.0, CENTROID_SPREAD)
        return vec + coef * self.centroid + self.noise()


def build_world(seed: int = 1902) -> SyntheticWorld:
    b = _Builder(seed)
    vectors: dict[str, np.ndarray] = {}

    # pole words: pair-shared base +/- gamma along the list's direction;
    # words in several pairs average their bases and side terms
    contributions: dict[str, list[tuple[np.ndarray, np.ndarray]]] = {}
    for list_name in ATTRIBUTES + SCM:
        direction = b.directions[list_name]
        for plus, minus in builtin_pair_set(list_name).pairs:
            base = b.body()
            contributions.setdefault(plus, []).append((base, GAMMA * direction))
            contributions.setdefault(minus, []).append((base, -GAMMA * direction))
    for token, parts in contributions.items():
        base = np.mean([p for p, _ in parts], axis=0)
        side = np.mean([s for _, s in parts], axis=0)
        vectors[token] = b.grounded(base + side)

    # professions: random coefficients on every attribute direction
    professions = list(builtin_professions().tokens[:N_PROFESSIONS])
    for token in professions:
        vec = b.body()
        for attr in ATTRIBUTES:
            vec = vec + b.rng.normal(0.0, PROF_BIAS) * b.directions[attr]
        vec = vec + b.rng.normal(0.0, 0.2) * b.directions["warmth"]
        vec = vec + b.rng.normal(0.0, 0.2) * b.directions["competence"]
        vectors[token] = b.grounded(vec)

    # bias attractors: a shifted twin of a profession hijacks the
    # high:low::profession analogy until the attribute is debiased away
    # (the classic biased-completion effect)
    for token in professions[:N_TWINNED]:
        base = vectors[token]
        for attr in ATTRIBUTES:
            twin = base - TWIN_SHIFT * np.linalg.norm(base) * b.directions[attr]
            vectors[f"near_{attr}_{token}"] = twin + TWIN_JITTER * b.body(1.0)

    # analogy questions: the answer d matches the query exactly along the
    # discriminating direction u but carries a small mismatch elsewhere;
    # the distractor z matches everywhere except for opposing u. Once u
    # is debiased away, z overtakes d.
    questions = []
    sections = []
    qid = 0
    for family, count in N_PER_FAMILY.items():
        offset = b.body(OFFSET_NORM)
        for _ in range(count):
            if family == "plane":
                phi = b.rng.uniform(0.0, 2.0 * np.pi)
                u = np.cos(phi) * b.specials["warmth"] + np.sin(phi) * b.specials["competence"]
            elif family == "group":
                u = b.directions[ATTRIBUTES[qid % len(ATTRIBUTES)]]
            else:
                u = b.body(1.0)
            mismatch = b.body(1.0)
            x = b.body()
            y = b.body()
            names = tuple(f"q{role}{qid:03d}" for role in "abcdz")
            vectors[names[0]] = x + b.centroid
            vectors[names[1]] = x + offset + DELTA * u + b.centroid
            vectors[names[2]] = y + b.centroid
            vectors[names[3]] = y + offset + DELTA * u + EPS * mismatch + b.centroid
            vectors[names[4]] = y + offset - DELTA * u + b.centroid
            questions.append(names[:4])
            sections.append(family)
            qid += 1

    for i in range(N_FILLER):
        vec = b.body()
        for direction in b.directions.values():
            vec = vec + b.rng.normal(0.0, 0.15) * direction
        vectors[f"filler{i:04d}"] = b.grounded(vec)

    tokens = tuple(vectors)
    emb = EmbeddingMatrix(tokens, np.array([vectors[t] for t in tokens]))
    return SyntheticWorld(emb, questions, sections, professions)


def write_embedding_file(world: SyntheticWorld, path) -> None:
    from debiaskit import save_embeddings

    save_embeddings(world.embedding, path)


def write_analogy_file(world: SyntheticWorld, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        current = None
        for question, section in zip(world.questions, world.sections):
            if section != current:
                fh.write(f": {section}\n")
                current = section
            fh.write(" ".join(question) + "\n")


def write_professions_file(world: SyntheticWorld, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for token in world.professions:
            fh.write(token + "\n")

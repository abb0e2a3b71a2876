"""Bundled example matrices and the continuity fixture library."""
from __future__ import annotations

import json
from importlib import resources
from typing import NamedTuple

import numpy as np

from . import ensembles
from .continuity import DEFAULT_J_VALUES, MatrixSequence, sequence_from_config
from .matio import matrix_from_obj

__all__ = [
    "PAIR_NAMES",
    "load_json",
    "load_pair",
    "comparison_pair",
    "comparison_epsilons",
    "load_sequence",
    "SequenceFixture",
    "continuity_library",
]

PAIR_NAMES = ("range_inclusion_pair", "projector_pair", "rank_pair")


def load_json(name: str) -> dict:
    ref = resources.files("coreep") / "fixtures" / f"{name}.json"
    return json.loads(ref.read_text())


def load_pair(name: str) -> tuple[np.ndarray, np.ndarray]:
    obj = load_json(name)
    return matrix_from_obj(obj["A"]), matrix_from_obj(obj["E"])


def comparison_epsilons() -> list[float]:
    return list(load_json("comparison_pair")["epsilons"])


def comparison_pair(eps: float) -> tuple[np.ndarray, np.ndarray]:
    obj = load_json("comparison_pair")
    return matrix_from_obj(obj["A"]), eps * matrix_from_obj(obj["E_pattern"])


def load_sequence(name: str) -> MatrixSequence:
    return sequence_from_config(load_json(name))


class SequenceFixture(NamedTuple):
    name: str
    sequence: MatrixSequence
    convergent: bool


def _lifted(c: ensembles.Constructed, block_fn):
    return lambda j: c.A + c.lift(block_fn(j))


def continuity_library(seed: int = 2024) -> list[SequenceFixture]:
    """Sequences whose convergence or divergence is known by construction."""
    rng = np.random.default_rng(seed)
    js = DEFAULT_J_VALUES
    lib = [
        SequenceFixture("jordan_tail", load_sequence("jordan_tail_sequence"), False),
        SequenceFixture("constant", load_sequence("constant_sequence"), True),
        SequenceFixture("shrinking_core", load_sequence("shrinking_core_sequence"), True),
    ]

    # Rank drops in the limit: inverse blows up.
    lib.append(SequenceFixture(
        "vanishing_scalar",
        MatrixSequence(lambda j: np.diag([1.0 / j, 0.0]), np.zeros((2, 2)), js), False))
    lib.append(SequenceFixture(
        "vanishing_pivot",
        MatrixSequence(lambda j: np.diag([1.0, 1.0 / j]), np.diag([1.0, 0.0]), js), False))
    lib.append(SequenceFixture(
        "split_jordan",
        MatrixSequence(lambda j: np.array([[0.0, 1.0], [1.0 / j, 0.0]]),
                       np.array([[0.0, 1.0], [0.0, 0.0]]), js), False))
    # Index changes (2 -> 1) without a rank change: converges.
    lib.append(SequenceFixture(
        "fading_nilpotent",
        MatrixSequence(lambda j: np.array([[0.0, 1.0 / j], [0.0, 0.0]]), np.zeros((2, 2)), js), True))

    # Nonsingular limit.
    c0 = ensembles.random_index_matrix(rng, 5, 0)
    b0 = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    lib.append(SequenceFixture(
        "nonsingular", MatrixSequence(lambda j: c0.A + b0 / j, c0.A, js), True))

    # Case-1 and case-2 perturbations shrinking like 1/j.
    c1, e1 = ensembles.case1_pair(rng, 6, 2, strength=0.5)
    lib.append(SequenceFixture(
        "range_confined", MatrixSequence(lambda j: c1.A + e1 / j, c1.A, js), True))
    c2, e2 = ensembles.case2_pair(rng, 7, 3, strength=0.5)
    lib.append(SequenceFixture(
        "projector_preserving", MatrixSequence(lambda j: c2.A + e2 / j, c2.A, js), True))

    # Rank-preserving path in a rotating basis.
    c3, build = ensembles.case3_path(rng, 6, 2)
    lib.append(SequenceFixture(
        "rotating_basis", MatrixSequence(lambda j: c3.A + build(0.1 / j), c3.A, js), True))

    # A zero eigenvalue of the nilpotent part is lifted to 1/j.
    c4 = ensembles.random_index_matrix(rng, 6, 3, nil_size=4)

    def lift_zero(j):
        blk = np.zeros((6, 6), dtype=np.complex128)
        blk[3, 3] = 1.0 / j
        return blk

    lib.append(SequenceFixture(
        "lifted_zero_eigenvalue", MatrixSequence(_lifted(c4, lift_zero), c4.A, js), False))

    # Semistable limit with a confined perturbation.
    c5 = ensembles.semistable_matrix(rng, 5, p=3)
    blk5 = np.zeros((5, 5), dtype=np.complex128)
    blk5[:3, :3] = rng.normal(size=(3, 3))
    lib.append(SequenceFixture(
        "semistable_confined", MatrixSequence(_lifted(c5, lambda j: blk5 / j), c5.A, js), True))
    return lib

"""Specker's three-box parable under several outcome models.

Boxes are A, B, C (indices 0, 1, 2). Each round a pair is opened and the
outcome is recorded as a two-character string, first box first: "10" means
the gem sits in the first box of the pair.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import IO, Sequence

import numpy as np

from .errors import ConfigError

OUTCOMES = ("00", "01", "10", "11")


class BoxPair(enum.Enum):
    AB = "AB"
    AC = "AC"
    BC = "BC"

    @property
    def boxes(self) -> tuple[int, int]:
        return {"AB": (0, 1), "AC": (0, 2), "BC": (1, 2)}[self.value]


PAIRS = tuple(BoxPair)


@dataclass(frozen=True)
class ProphetTable:
    """Outcome for every pair at every round, fixed before any round is played."""

    rows: tuple[tuple[str, str, str], ...]

    def __len__(self):
        return len(self.rows)

    def cell(self, round_index: int, pair: BoxPair) -> str:
        return self.rows[round_index][PAIRS.index(pair)]


def _check_probability(p: float, name: str):
    if not (0.0 <= p <= 1.0):
        raise ConfigError(f"{name} must lie in [0, 1], got {p}")


def build_prophet_table(rounds: int, outcome_bias: float = 0.5, seed: int = 0) -> ProphetTable:
    _check_probability(outcome_bias, "outcome_bias")
    if rounds < 0:
        raise ConfigError(f"rounds must be >= 0, got {rounds}")
    rng = np.random.default_rng(seed)
    draws = rng.random((rounds, len(PAIRS))) < outcome_bias
    rows = tuple(tuple("10" if x else "01" for x in row) for row in draws)
    return ProphetTable(rows)


class NoncontextualModel:
    """Each box holds a predetermined bit; a pair reveals both bits.

    Without ``assignment`` a fresh uniform 3-bit assignment is drawn every
    round; with one, that assignment is used in every round.
    """

    kind = "NONCONTEXTUAL"

    def __init__(self, assignment: Sequence[int] | None = None):
        if assignment is not None:
            assignment = tuple(int(b) for b in assignment)
            if len(assignment) != 3 or any(b not in (0, 1) for b in assignment):
                raise ConfigError(f"assignment must be three bits, got {assignment}")
        self.assignment = assignment

    def hidden(self, rounds: int, rng: np.random.Generator):
        if self.assignment is not None:
            return None
        return rng.integers(0, 2, size=(rounds, 3))

    def answer(self, round_index: int, pair: BoxPair, hidden) -> str:
        bits = self.assignment if hidden is None else hidden[round_index]
        i, j = pair.boxes
        return f"{bits[i]}{bits[j]}"


class ProphetModel:
    kind = "PROPHET"

    def __init__(self, table: ProphetTable):
        self.table = table

    def hidden(self, rounds: int, rng: np.random.Generator):
        if rounds > len(self.table):
            raise ConfigError(f"prophet table has {len(self.table)} rounds, {rounds} requested")
        return None

    def answer(self, round_index: int, pair: BoxPair, hidden) -> str:
        return self.table.cell(round_index, pair)


class SequentialMachine:
    """Classical machine for time-like ordered openings.

    The first box of the pair gets a fair coin when opened; the machine then
    signals the second box, which shows the complement.
    """

    kind = "SEQUENTIAL_MACHINE"

    def __init__(self):
        self.signal: int | None = None

    def hidden(self, rounds: int, rng: np.random.Generator):
        return rng.integers(0, 2, size=rounds)

    def answer(self, round_index: int, pair: BoxPair, hidden) -> str:
        first = int(hidden[round_index])
        self.signal = 1 - first
        return f"{first}{self.signal}"


ParableModel = NoncontextualModel | ProphetModel | SequentialMachine


@dataclass(frozen=True)
class RoundRecord:
    round: int
    pair: str
    outcome: str
    model: str


@dataclass(frozen=True)
class ParableStats:
    rounds: int
    counts: dict[str, dict[str, int]]
    log: tuple[RoundRecord, ...] = field(repr=False, default=())

    @property
    def same(self) -> int:
        return sum(c["00"] + c["11"] for c in self.counts.values())

    @property
    def p_same(self) -> float:
        return self.same / self.rounds if self.rounds else 0.0

    def box_ones_rate(self) -> dict[str, float]:
        """Fraction of openings of each box that found the gem."""
        opened = {"A": 0, "B": 0, "C": 0}
        ones = {"A": 0, "B": 0, "C": 0}
        for pair, tally in self.counts.items():
            first, second = pair
            for outcome, k in tally.items():
                opened[first] += k
                opened[second] += k
                ones[first] += k * int(outcome[0])
                ones[second] += k * int(outcome[1])
        return {b: (ones[b] / opened[b] if opened[b] else 0.0) for b in "ABC"}

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "counts": self.counts,
            "same": self.same,
            "p_same": self.p_same,
            "box_ones_rate": self.box_ones_rate(),
        }

    def write_log(self, fp: IO[str]):
        for rec in self.log:
            fp.write(json.dumps({"round": rec.round, "pair": rec.pair,
                                 "outcome": rec.outcome, "model": rec.model}) + "\n")


def _choices(chooser, rounds: int, rng: np.random.Generator) -> list[BoxPair]:
    if chooser is None or chooser == "uniform":
        return [PAIRS[k] for k in rng.integers(0, 3, size=rounds)]
    seq = [c if isinstance(c, BoxPair) else BoxPair(c) for c in chooser]
    if len(seq) < rounds:
        raise ConfigError(f"chooser has {len(seq)} entries for {rounds} rounds")
    return seq[:rounds]


def run_parable(model, chooser, rounds: int, seed: int = 0) -> ParableStats:
    """Play ``rounds`` rounds; ``chooser`` is a pair sequence or ``"uniform"``.

    Records are appended as rounds are played and never revisited.
    """
    if rounds < 1:
        raise ConfigError(f"rounds must be >= 1, got {rounds}")
    chooser_seed, model_seed = np.random.SeedSequence(seed).spawn(2)
    pairs = _choices(chooser, rounds, np.random.default_rng(chooser_seed))
    hidden = model.hidden(rounds, np.random.default_rng(model_seed))
    counts = {p.value: dict.fromkeys(OUTCOMES, 0) for p in PAIRS}
    log = []
    for r, pair in enumerate(pairs):
        outcome = model.answer(r, pair, hidden)
        log.append(RoundRecord(r, pair.value, outcome, model.kind))
        counts[pair.value][outcome] += 1
    return ParableStats(rounds, counts, tuple(log))


@dataclass(frozen=True)
class ParableBound:
    value: Fraction
    witness: tuple[int, int, int]
    scores: dict[tuple[int, int, int], Fraction]


def equal_pair_fraction(assignment: Sequence[int]) -> Fraction:
    return Fraction(sum(assignment[i] == assignment[j] for i, j in (p.boxes for p in PAIRS)), 3)


def noncontextual_parable_bound() -> ParableBound:
    """Least same-result probability any fixed box contents can achieve.

    The witness is the minimizer with the fewest gems, earliest box first.
    """
    scores = {a: equal_pair_fraction(a) for a in product((0, 1), repeat=3)}
    value = min(scores.values())
    witness = min((a for a, s in scores.items() if s == value), key=lambda a: (sum(a), [-x for x in a]))
    return ParableBound(value, witness, scores)


def sequential_machine_sim(rounds: int, seed: int = 0) -> ParableStats:
    return run_parable(SequentialMachine(), "uniform", rounds, seed)

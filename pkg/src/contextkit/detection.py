"""Detection-level experiments: exclusivity, Mach-Zehnder, CHSH, causal order.

Detectors are classical sinks. A trial ends with one irrevocable record of
which detector fired; no detector superposition is representable.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .linalg import QuantumState, Ray, basis_state, born_probability, kron, projector_of

SPEED_OF_LIGHT = 299_792_458.0
LIGHTLIKE_RTOL = 1e-12


class Separation(enum.Enum):
    SPACELIKE = "SPACELIKE"
    TIMELIKE = "TIMELIKE"
    LIGHTLIKE = "LIGHTLIKE"


@dataclass(frozen=True)
class SpacetimeEvent:
    t: float
    x: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ConfigError(f"event coordinates must be finite, got ({self.t}, {self.x})")


def separation_class(e1: SpacetimeEvent, e2: SpacetimeEvent, c: float = SPEED_OF_LIGHT) -> Separation:
    if not c > 0:
        raise ConfigError(f"signal speed must be positive, got {c}")
    dx = abs(e2.x - e1.x)
    ct = c * abs(e2.t - e1.t)
    if abs(dx - ct) <= LIGHTLIKE_RTOL * max(dx, ct):
        return Separation.LIGHTLIKE
    return Separation.SPACELIKE if dx > ct else Separation.TIMELIKE


@dataclass(frozen=True)
class DetectionTrial:
    fired: tuple[int, ...]


@dataclass(frozen=True)
class DetectionRecord:
    """All trials of one run as a ``trials x detectors`` 0/1 matrix."""

    fired: np.ndarray

    def __post_init__(self):
        self.fired.setflags(write=False)

    @property
    def trial_count(self) -> int:
        return self.fired.shape[0]

    @property
    def coincidences(self) -> int:
        return int(np.count_nonzero(self.fired.sum(axis=1) > 1))

    @property
    def no_detections(self) -> int:
        return int(np.count_nonzero(self.fired.sum(axis=1) == 0))

    @property
    def rates(self) -> list[float]:
        return [float(r) for r in self.fired.mean(axis=0)]

    def trials(self) -> list[DetectionTrial]:
        return [DetectionTrial(tuple(int(b) for b in row)) for row in self.fired]


def _fire(which: np.ndarray, n_detectors: int) -> DetectionRecord:
    fired = np.zeros((which.size, n_detectors), dtype=np.uint8)
    fired[np.arange(which.size), which] = 1
    return DetectionRecord(fired)


def _check_trials(trials: int):
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")


def exclusivity_run(n_detectors: int, probs: Sequence[float], trials: int, seed: int = 0) -> DetectionRecord:
    """Complete measurement with ``n_detectors`` outputs; one fires per trial."""
    if n_detectors not in (2, 3):
        raise ConfigError(f"n_detectors must be 2 or 3, got {n_detectors}")
    p = np.asarray(probs, dtype=float)
    if p.shape != (n_detectors,) or np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ConfigError(f"need {n_detectors} non-negative probabilities, got {list(probs)}")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ConfigError(f"probabilities sum to {p.sum()}, not 1")
    _check_trials(trials)
    rng = np.random.default_rng(seed)
    return _fire(rng.choice(n_detectors, size=trials, p=p / p.sum()), n_detectors)


class MzModel(enum.Enum):
    QUANTUM = "QUANTUM"
    PREDETERMINED_PATH = "PREDETERMINED_PATH"


@dataclass(frozen=True)
class MzConfig:
    phase: float
    model: MzModel = MzModel.QUANTUM
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        _check_trials(self.trials)
        if not math.isfinite(self.phase):
            raise ConfigError("phase must be finite")


@dataclass(frozen=True)
class MzResult:
    p_d0: float
    p_d0_theory: float
    record: DetectionRecord


# balanced beamsplitter; path 0 feeds D0 at zero phase
BEAMSPLITTER = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def mz_output_state(phase: float) -> QuantumState:
    phase_shifter = np.diag([1.0, np.exp(1j * phase)])
    out = BEAMSPLITTER @ phase_shifter @ BEAMSPLITTER @ basis_state(2, 0).components
    return QuantumState(out)


def mz_run(cfg: MzConfig) -> MzResult:
    rng = np.random.default_rng(cfg.seed)
    ports = [projector_of(basis_state(2, k)) for k in range(2)]
    if cfg.model is MzModel.QUANTUM:
        psi = mz_output_state(cfg.phase)
        theory = born_probability(psi, ports[0])
        which = (rng.random(cfg.trials) >= theory).astype(np.int64)
    else:
        # the particle leaves the first beamsplitter on a definite path and
        # the second beamsplitter sends it to either port with weight 1/2
        paths = rng.integers(0, 2, size=cfg.trials)
        to_d0 = np.array([born_probability(Ray(BEAMSPLITTER[:, k]), ports[0]) for k in range(2)])
        theory = 0.5
        which = (rng.random(cfg.trials) >= to_d0[paths]).astype(np.int64)
    record = _fire(which, 2)
    return MzResult(record.rates[0], float(theory), record)


@dataclass(frozen=True)
class ChshSetting:
    alice_angles: tuple[float, float]
    bob_angles: tuple[float, float]


# maximizes the E11 + E12 + E21 - E22 pattern for the singlet
OPTIMAL_CHSH = ChshSetting((0.0, math.pi / 2), (math.pi / 4, -math.pi / 4))

SINGLET = QuantumState(np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2))


def spin_observable(angle: float) -> np.ndarray:
    """``cos(a) Z + sin(a) X`` assembled from its two eigenprojectors."""
    up = projector_of(Ray([math.cos(angle / 2), math.sin(angle / 2)]))
    down = projector_of(Ray([-math.sin(angle / 2), math.cos(angle / 2)]))
    return up.matrix - down.matrix


def singlet_correlator(a: float, b: float) -> float:
    op = kron(spin_observable(a), spin_observable(b))
    return float(np.vdot(SINGLET.components, op @ SINGLET.components).real)


def chsh_quantum_value(s: ChshSetting) -> float:
    (a1, a2), (b1, b2) = s.alice_angles, s.bob_angles
    e = singlet_correlator
    return abs(e(a1, b1) + e(a1, b2) + e(a2, b1) - e(a2, b2))


def chsh_strategies() -> list[tuple[tuple[int, int, int, int], int]]:
    """Every deterministic local strategy ``(a1, a2, b1, b2)`` with its CHSH sum."""
    out = []
    for a1, a2, b1, b2 in product((1, -1), repeat=4):
        out.append(((a1, a2, b1, b2), a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2))
    return out


def chsh_lhv_bound() -> int:
    return max(abs(s) for _, s in chsh_strategies())

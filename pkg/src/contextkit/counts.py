"""World and history counting over numbers far beyond float range.

:class:`Magnitude` keeps a count exactly as an integer until it would need
more than a million decimal digits, then switches to storing its base-10
logarithm as an mpmath float. Estimates built from physical constants are
not integers and live in log form from the start.
"""
from __future__ import annotations

import enum
import math
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from typing import NamedTuple

import mpmath

from .errors import ConfigError

DIGIT_LIMIT = 10**6
LOG_DPS = 40

_LOG10_2 = math.log10(2)


@contextmanager
def _precision():
    with mpmath.workdps(LOG_DPS):
        yield


def _too_long(n: int) -> bool:
    """True when ``n`` has more than DIGIT_LIMIT decimal digits."""
    estimate = n.bit_length() * _LOG10_2
    if estimate < DIGIT_LIMIT - 1:
        return False
    if estimate > DIGIT_LIMIT + 1:
        return True
    with mpmath.workdps(LOG_DPS):
        return int(mpmath.floor(mpmath.log10(mpmath.mpf(n)))) + 1 > DIGIT_LIMIT


@dataclass(frozen=True)
class Magnitude:
    depth: int
    value: int | mpmath.mpf

    @classmethod
    def exact(cls, n: int) -> "Magnitude":
        if n < 1:
            raise ValueError(f"magnitudes are positive counts, got {n}")
        if _too_long(n):
            return cls.from_log10(cls._log10_int(n))
        return cls(0, int(n))

    @classmethod
    def from_log10(cls, log10) -> "Magnitude":
        with _precision():
            return cls(1, mpmath.mpf(log10))

    @classmethod
    def from_real(cls, x: float) -> "Magnitude":
        if not (x > 0 and math.isfinite(x)):
            raise ValueError(f"need a positive finite real, got {x}")
        with _precision():
            return cls.from_log10(mpmath.log10(mpmath.mpf(x)))

    @staticmethod
    def _log10_int(n: int):
        with _precision():
            return mpmath.log10(mpmath.mpf(n))

    def log10(self) -> mpmath.mpf:
        if self.depth == 0:
            return self._log10_int(self.value)
        return self.value

    def __mul__(self, other: "Magnitude | int") -> "Magnitude":
        if isinstance(other, int):
            other = Magnitude.exact(other)
        if self.depth == 0 and other.depth == 0:
            return Magnitude.exact(self.value * other.value)
        with _precision():
            return Magnitude.from_log10(self.log10() + other.log10())

    __rmul__ = __mul__

    def __pow__(self, exponent) -> "Magnitude":
        """Raise to a non-negative integer or real (or Magnitude) power."""
        if isinstance(exponent, Magnitude):
            if exponent.depth == 0:
                exponent = exponent.value
            else:
                with _precision():
                    return Magnitude.from_log10(self.log10() * mpmath.power(10, exponent.value))
        if isinstance(exponent, int) and self.depth == 0:
            if exponent < 0:
                raise ValueError("negative exponents are not counts")
            if exponent * math.log10(self.value) < DIGIT_LIMIT + 1:
                return Magnitude.exact(self.value**exponent)
        with _precision():
            return Magnitude.from_log10(self.log10() * mpmath.mpf(exponent))

    def _cmp_key(self):
        return self.log10()

    def __eq__(self, other):
        if not isinstance(other, Magnitude):
            return NotImplemented
        if self.depth == 0 and other.depth == 0:
            return self.value == other.value
        return self._cmp_key() == other._cmp_key()

    def __lt__(self, other):
        if self.depth == 0 and other.depth == 0:
            return self.value < other.value
        return self._cmp_key() < other._cmp_key()

    def __le__(self, other):
        return self == other or self < other

    def __hash__(self):
        return hash((self.depth, self.value))

    def to_json(self) -> dict:
        if self.depth == 0:
            with _int_digits():
                return {"exact": str(self.value)}
        return {"log10": float(self.value)}

    def __str__(self):
        if self.depth == 0:
            with _int_digits():
                return str(self.value)
        return f"10^{mpmath.nstr(self.value, 15)}"


@contextmanager
def _int_digits():
    # int <-> str conversion is capped at 4300 digits by default
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    old = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


class Interpretation(enum.Enum):
    MW_OUTCOMES = "MW_OUTCOMES"
    MW_COMPLETED = "MW_COMPLETED"
    APW_CHOICES = "APW_CHOICES"


def _positive(**counts):
    for name, v in counts.items():
        if v < 1:
            raise ConfigError(f"{name} must be >= 1, got {v}")


def world_count(interpretation: Interpretation, choices: int, outcomes: int, rounds: int) -> Magnitude:
    """Number of branches after ``rounds`` rounds.

    MW_OUTCOMES splits on outcomes only, MW_COMPLETED on every
    (choice, outcome) pair, APW_CHOICES keeps only the choice branches.
    """
    _positive(choices=choices, outcomes=outcomes, rounds=rounds)
    per_round = {
        Interpretation.MW_OUTCOMES: outcomes,
        Interpretation.MW_COMPLETED: choices * outcomes,
        Interpretation.APW_CHOICES: choices,
    }[Interpretation(interpretation)]
    return Magnitude.exact(per_round) ** rounds


def history_count(choices: int, rounds: int, agents: int) -> Magnitude:
    _positive(choices=choices, rounds=rounds, agents=agents)
    return Magnitude.exact(choices) ** (rounds * agents)


@dataclass(frozen=True)
class CosmicParams:
    signal_speed: float = 3e8
    horizon_years: float = 1e9
    seconds_per_year: float = 31e6
    planck_length: float = 1.6e-35
    # chosen so a 100-year life is 10^53 time pixels at 31e6 s per year
    planck_time: float = 3.1e-44
    lifetime_years: float = 100.0
    population: float = 7.5e9

    def __post_init__(self):
        for name, v in asdict(self).items():
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {v!r}")

    @classmethod
    def physical(cls) -> "CosmicParams":
        return cls(
            signal_speed=299_792_458.0,
            seconds_per_year=31_557_600.0,
            planck_length=1.616255e-35,
            planck_time=5.391247e-44,
        )

    @classmethod
    def from_dict(cls, doc: dict) -> "CosmicParams":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown cosmic parameters: {sorted(unknown)}")
        try:
            return cls(**{k: float(v) for k, v in doc.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad cosmic parameter: {exc}") from exc


@dataclass(frozen=True)
class InfuturabilienReport:
    params: CosmicParams
    linear_pixels: Magnitude
    space_pixels: Magnitude
    lifetime_time_pixels: Magnitude
    per_person_histories: Magnitude
    humanity_histories: Magnitude

    @property
    def humanity_exponent_rounded(self) -> int:
        """Order of magnitude of the humanity exponent, as in 10^10^k."""
        return int(mpmath.nint(mpmath.log10(self.humanity_histories.log10())))

    def to_dict(self) -> dict:
        return {
            "params": asdict(self.params),
            "linear_pixels": self.linear_pixels.to_json(),
            "space_pixels": self.space_pixels.to_json(),
            "lifetime_time_pixels": self.lifetime_time_pixels.to_json(),
            "per_person_histories": self.per_person_histories.to_json(),
            "humanity_histories": self.humanity_histories.to_json(),
            "humanity_rounded": f"10^10^{self.humanity_exponent_rounded}",
        }


def infuturabilien_estimate(p: CosmicParams | None = None) -> InfuturabilienReport:
    """Count the histories humanity could generate before the horizon.

    Space is cut into Planck-length pixels out to the light-travel distance
    of the horizon, time into Planck-time pixels over one lifetime; each
    time pixel a person picks one space pixel.
    """
    p = p or CosmicParams()
    horizon_s = p.horizon_years * p.seconds_per_year
    linear = Magnitude.from_real(p.signal_speed * horizon_s / p.planck_length)
    space = linear**3
    with _precision():
        ticks = mpmath.mpf(p.lifetime_years) * mpmath.mpf(p.seconds_per_year) / mpmath.mpf(p.planck_time)
        time_pixels = Magnitude.from_log10(mpmath.log10(ticks))
        per_person = space**ticks
        humanity = per_person ** mpmath.mpf(p.population)
    return InfuturabilienReport(p, linear, space, time_pixels, per_person, humanity)


class BoltzmannFluctuation(NamedTuple):
    delta_s_over_k: float
    probability_log2: float

    @property
    def probability(self) -> float:
        return 2.0**self.probability_log2


def boltzmann_fluctuation(n_molecules: int) -> BoltzmannFluctuation:
    """All ``n`` molecules found in one half of the room."""
    if n_molecules < 1:
        raise ConfigError(f"need at least one molecule, got {n_molecules}")
    return BoltzmannFluctuation(n_molecules * math.log(2), -float(n_molecules))

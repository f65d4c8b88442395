"""Small dense complex linear algebra for rays, projectors and states.

Everything here works on dimensions of a handful (d <= 8), so plain numpy
arrays and explicit products are used throughout. Tolerances are absolute.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DimensionError, NormalizationError

NORM_TOL = 1e-9
ORTH_TOL = 1e-9


def _as_vector(components) -> np.ndarray:
    arr = np.array(components, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise NormalizationError("non-finite amplitude")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ray:
    """A unit vector of dimension ``d >= 2``.

    Equality is exact component equality; global phase is only quotiented
    out once the ray is turned into a projector.
    """

    components: np.ndarray
    label: str | None = None

    def __post_init__(self):
        arr = _as_vector(self.components)
        object.__setattr__(self, "components", arr)
        if arr.size < 2:
            raise DimensionError(f"ray dimension must be >= 2, got {arr.size}")
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"ray norm {norm!r} differs from 1")

    @classmethod
    def normalized(cls, components, label: str | None = None) -> "Ray":
        arr = np.array(components, dtype=complex).reshape(-1)
        norm = np.linalg.norm(arr)
        if not np.isfinite(norm) or norm == 0:
            raise NormalizationError("cannot normalize a zero or non-finite vector")
        return cls(arr / norm, label)

    @property
    def dimension(self) -> int:
        return self.components.size

    def __eq__(self, other):
        if not isinstance(other, Ray):
            return NotImplemented
        return np.array_equal(self.components, other.components)

    def __hash__(self):
        return hash(self.components.tobytes())


class QuantumState(Ray):
    """A normalized pure state; same representation as a ray."""


@dataclass(frozen=True, eq=False)
class Projector:
    """Rank-one orthogonal projector stored as a dense ``d x d`` matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"projector must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def is_valid(self, tol: float = 1e-9) -> bool:
        m = self.matrix
        return (
            np.max(np.abs(m - m.conj().T)) <= tol
            and np.max(np.abs(m @ m - m)) <= tol
            and abs(np.trace(m) - 1.0) <= tol
        )


def _check_same_dim(a: int, b: int):
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} vs {b}")


def inner_product(a: Ray, b: Ray) -> complex:
    """Return <a|b>, conjugate-linear in ``a``."""
    _check_same_dim(a.dimension, b.dimension)
    return complex(np.vdot(a.components, b.components))


def projector_of(v: Ray) -> Projector:
    norm = np.linalg.norm(v.components)
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"ray norm {norm!r} differs from 1")
    return Projector(np.outer(v.components, v.components.conj()))


def born_probability(psi: QuantumState | Ray, p: Projector) -> float:
    _check_same_dim(psi.dimension, p.dimension)
    value = np.vdot(psi.components, p.matrix @ psi.components)
    return float(min(1.0, max(0.0, value.real)))


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of ``ab - ba``."""
    return float(np.linalg.norm(a @ b - b @ a))


@dataclass(frozen=True)
class ContextValidation:
    valid: bool
    dimension: int
    size: int
    orthogonality_defects: dict[tuple[int, int], float] = field(default_factory=dict)
    commutator_norms: dict[tuple[int, int], float] = field(default_factory=dict)
    completeness_defect: float = 0.0
    failures: tuple[str, ...] = ()


def validate_context(rays: Sequence[Ray]) -> ContextValidation:
    """Check that ``rays`` form a complete orthonormal basis.

    Never raises on geometric failure; the returned record lists what went
    wrong. An empty list or mixed dimensions are reported the same way.
    """
    if not rays:
        return ContextValidation(False, 0, 0, failures=("empty context",))
    dims = {r.dimension for r in rays}
    if len(dims) != 1:
        return ContextValidation(
            False, max(dims), len(rays), failures=(f"mixed dimensions {sorted(dims)}",)
        )
    d = dims.pop()
    failures = []
    projectors = [projector_of(r).matrix for r in rays]
    orth = {}
    comm = {}
    for i, k in combinations(range(len(rays)), 2):
        orth[(i, k)] = abs(inner_product(rays[i], rays[k]))
        comm[(i, k)] = commutator_norm(projectors[i], projectors[k])
        if orth[(i, k)] > ORTH_TOL:
            failures.append(f"rays {i} and {k} not orthogonal (|<a|b>| = {orth[(i, k)]:.3g})")
        if comm[(i, k)] > ORTH_TOL:
            failures.append(f"projectors {i} and {k} do not commute")
    total = np.sum(projectors, axis=0)
    completeness = float(np.max(np.abs(total - np.eye(d))))
    if completeness > ORTH_TOL:
        failures.append(f"incomplete: max |sum P - I| = {completeness:.3g}")
    if len(rays) != d:
        failures.append(f"context has {len(rays)} rays in dimension {d}")
    return ContextValidation(
        valid=not failures,
        dimension=d,
        size=len(rays),
        orthogonality_defects=orth,
        commutator_norms=comm,
        completeness_defect=completeness,
        failures=tuple(failures),
    )


def random_state(d: int, seed: int) -> QuantumState:
    """Haar-random pure state from i.i.d. complex normal amplitudes."""
    if d < 2:
        raise DimensionError(f"d must be >= 2, got {d}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return QuantumState(z / np.linalg.norm(z))


def basis_state(d: int, index: int) -> QuantumState:
    e = np.zeros(d, dtype=complex)
    e[index] = 1.0
    return QuantumState(e)


def kron(*ops: np.ndarray) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out

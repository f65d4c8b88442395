"""Ray systems, Kochen-Specker proofs and contextuality witnesses.

A ray system is a list of rays plus contexts (complete orthonormal bases
given as index lists). Search operations only need the incidence structure,
so they run on :class:`ContextHypergraph`, which can also be built directly
from abstract edge lists without coordinates.
"""
from __future__ import annotations

import enum
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DimensionError,
    GeometryError,
    NormalizationError,
    ParseError,
    SearchBudgetExceeded,
)
from .linalg import NORM_TOL, QuantumState, Ray, inner_product, projector_of, validate_context

SEARCH_CAP = 40

# Fig. 5 of the 18-ray proof: ray (slot, basis) pairs that coincide, 1-based.
CEG18_IDENTIFICATIONS = (
    ((1, 9), (3, 3)),
    ((2, 9), (3, 4)),
    ((3, 9), (4, 7)),
    ((4, 9), (2, 8)),
)


@dataclass(frozen=True)
class ContextHypergraph:
    vertex_count: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        edges = tuple(tuple(int(v) for v in e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        sizes = {len(e) for e in edges}
        if len(sizes) > 1:
            raise ParseError(f"edges have mixed sizes {sorted(sizes)}")
        for j, e in enumerate(edges):
            if len(set(e)) != len(e):
                raise ParseError(f"edge {j} repeats a vertex")
            if any(v < 0 or v >= self.vertex_count for v in e):
                raise ParseError(f"edge {j} references a vertex outside 0..{self.vertex_count - 1}")

    def degrees(self) -> list[int]:
        deg = [0] * self.vertex_count
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg


@dataclass(frozen=True)
class RaySystem:
    name: str
    dimension: int
    rays: tuple[Ray, ...]
    contexts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(self.rays))
        object.__setattr__(self, "contexts", tuple(tuple(int(i) for i in c) for c in self.contexts))
        n = len(self.rays)
        for r in self.rays:
            if r.dimension != self.dimension:
                raise DimensionError(f"ray of dimension {r.dimension} in a d={self.dimension} system")
        for j, ctx in enumerate(self.contexts):
            if any(i < 0 or i >= n for i in ctx):
                raise ParseError(f"context {j} references a ray outside 0..{n - 1}")
            if len(set(ctx)) != len(ctx):
                raise GeometryError(f"context {j} repeats a ray", j)
            check = validate_context([self.rays[i] for i in ctx])
            if not check.valid:
                raise GeometryError(f"context {j} invalid: " + "; ".join(check.failures), j)
        for a in range(n):
            for b in range(a + 1, n):
                if abs(inner_product(self.rays[a], self.rays[b])) >= 1.0 - NORM_TOL:
                    raise GeometryError(f"rays {a} and {b} are equal up to phase")

    @property
    def ray_count(self) -> int:
        return len(self.rays)

    def hypergraph(self) -> ContextHypergraph:
        return ContextHypergraph(len(self.rays), self.contexts)


def parse_ray_system(doc: Mapping) -> RaySystem:
    """Build a :class:`RaySystem` from an already decoded JSON document."""
    try:
        name = str(doc.get("name", ""))
        d = int(doc["dimension"])
        raw_rays = doc["rays"]
        contexts = [[int(i) for i in c] for c in doc["contexts"]]
        amplitudes = [[complex(float(re), float(im)) for re, im in ray] for ray in raw_rays]
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed ray-system document: {exc}") from exc
    rays = []
    for k, amps in enumerate(amplitudes):
        if len(amps) != d:
            raise ParseError(f"ray {k} has {len(amps)} components, expected {d}")
        try:
            rays.append(Ray(np.array(amps)))
        except NormalizationError as exc:
            owner = next((j for j, c in enumerate(contexts) if k in c), None)
            raise GeometryError(f"ray {k}: {exc}", owner) from exc
    for j, c in enumerate(contexts):
        if len(c) != d:
            raise GeometryError(f"context {j} has {len(c)} rays, expected {d}", j)
    return RaySystem(name, d, rays, contexts)


def load_ray_system(source: str | Path | Mapping) -> RaySystem:
    """Load a ray system from a path or a decoded document."""
    if isinstance(source, Mapping):
        return parse_ray_system(source)
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be an object")
    return parse_ray_system(doc)


def bundled_path(name: str = "ceg18.json") -> Path:
    return Path(str(resources.files("contextkit") / "data" / name))


def fig5_structure(system: RaySystem) -> dict[str, bool]:
    """Structural checks of the 18-ray proof figure, keyed by check name."""
    deg = system.hypergraph().degrees()
    ctx = system.contexts
    checks = {
        "18 rays": system.ray_count == 18,
        "9 contexts": len(ctx) == 9,
        "contexts of 4": all(len(c) == 4 for c in ctx),
        "every ray in 2 contexts": all(k == 2 for k in deg),
    }
    for (i, j), (k, l) in CEG18_IDENTIFICATIONS:
        key = f"P{i}{j} = P{k}{l}"
        try:
            checks[key] = ctx[j - 1][i - 1] == ctx[l - 1][k - 1]
        except IndexError:
            checks[key] = False
    return checks


def ceg18() -> RaySystem:
    """The bundled 18-ray system, checked against the Fig. 5 structure."""
    system = load_ray_system(bundled_path())
    failed = [k for k, ok in fig5_structure(system).items() if not ok]
    if failed:
        raise GeometryError("bundled 18-ray data lost its structure: " + ", ".join(failed))
    return system


class CertificateResult(enum.Enum):
    PROOF_OF_NONCOLORABILITY = "PROOF_OF_NONCOLORABILITY"
    INCONCLUSIVE = "INCONCLUSIVE"


def parity_certificate(h: ContextHypergraph) -> CertificateResult:
    """Parity proof that no vertex valuation puts exactly one 1 on every edge.

    With all degrees even, summing the ones edge by edge counts each vertex
    an even number of times; an odd number of edges would need an odd total.
    """
    if len(h.edges) % 2 == 1 and all(k % 2 == 0 for k in h.degrees()):
        return CertificateResult.PROOF_OF_NONCOLORABILITY
    return CertificateResult.INCONCLUSIVE


def _check_cap(n: int, cap: int | None):
    cap = SEARCH_CAP if cap is None else cap
    if n > cap:
        raise SearchBudgetExceeded(f"{n} vertices exceeds search cap {cap}")


def _exact_one(n: int, edges: tuple[tuple[int, ...], ...], fixed: Mapping[int, int]):
    """Backtracking for a 0/1 valuation with exactly one 1 per edge.

    Branches on the unsatisfied edge with fewest free vertices; choosing a
    vertex forces its edge-mates to 0, and a vertex that failed as the 1 is
    pinned to 0 for the sibling branches.
    """
    value = [-1] * n
    incident: list[list[int]] = [[] for _ in range(n)]
    for j, e in enumerate(edges):
        for v in e:
            incident[v].append(j)
    trail: list[int] = []

    def assign(v: int, bit: int) -> bool:
        if value[v] != -1:
            return value[v] == bit
        value[v] = bit
        trail.append(v)
        if bit == 1:
            for j in incident[v]:
                for u in edges[j]:
                    if u != v and not assign(u, 0):
                        return False
        else:
            for j in incident[v]:
                if all(value[u] == 0 for u in edges[j]):
                    return False
        return True

    def undo(mark: int):
        while len(trail) > mark:
            value[trail.pop()] = -1

    for v, bit in fixed.items():
        if not assign(v, bit):
            return None

    def solve() -> bool:
        best = None
        for e in edges:
            if any(value[u] == 1 for u in e):
                continue
            free = [u for u in e if value[u] == -1]
            if not free:
                return False
            if best is None or len(free) < len(best):
                best = free
        if best is None:
            return True
        mark = len(trail)
        for v in best:
            inner = len(trail)
            if assign(v, 1) and solve():
                return True
            undo(inner)
            if not assign(v, 0):
                break
        undo(mark)
        return False

    if not solve():
        return None
    return tuple(max(b, 0) for b in value)


def _first_free_edge(h: ContextHypergraph):
    return min(h.edges, key=len) if h.edges else None


def find_noncontextual_assignment(
    h: ContextHypergraph, *, search_cap: int | None = None, workers: int = 1
) -> tuple[int, ...] | None:
    """Return a valuation with exactly one 1 per edge, or None if none exists.

    The search is exhaustive. With ``workers > 1`` the branches of the first
    edge run in separate processes; the answer is the same as serial.
    """
    _check_cap(h.vertex_count, search_cap)
    if workers <= 1 or not h.edges:
        return _exact_one(h.vertex_count, h.edges, {})
    first = _first_free_edge(h)
    tasks = []
    for k, v in enumerate(first):
        fixed = {u: 0 for u in first[:k]}
        fixed[v] = 1
        tasks.append(fixed)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_exact_one, [h.vertex_count] * len(tasks), [h.edges] * len(tasks), tasks))
    return next((r for r in results if r is not None), None)


@dataclass(frozen=True)
class Witness:
    """Sum of context products of the +-1 observables ``I - 2P``.

    ``sign = -1`` negates the sum so that the classical bound and quantum
    value come out as +7 and +9 on the 18-ray system; ``sign = +1`` keeps
    the literal sum.
    """

    system: RaySystem
    sign: int = -1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    def score(self, assignment: Sequence[int]) -> int:
        if len(assignment) != self.system.ray_count:
            raise DimensionError(
                f"assignment of length {len(assignment)} for {self.system.ray_count} rays"
            )
        total = 0
        for ctx in self.system.contexts:
            ones = sum(assignment[i] for i in ctx)
            total += -1 if ones % 2 else 1
        return self.sign * total


@dataclass(frozen=True)
class WitnessReport:
    classical_bound: int
    maximizing_assignment: tuple[int, ...]
    quantum_value: float

    @property
    def margin(self) -> float:
        return self.quantum_value - self.classical_bound


def _branch_and_bound(n: int, edges, sign: int, prefix: tuple[int, ...]):
    # An edge's term is settled once its largest vertex has a value; every
    # unsettled edge can still add at most +1.
    closing: list[list[int]] = [[] for _ in range(n)]
    incident: list[list[int]] = [[] for _ in range(n)]
    for j, e in enumerate(edges):
        closing[max(e)].append(j)
        for v in e:
            incident[v].append(j)
    parity = [0] * len(edges)
    a = [0] * n
    best_val = -(len(edges) + 1)
    best: tuple[int, ...] | None = None

    def walk(v: int, score: int, remaining: int):
        nonlocal best_val, best
        if score + remaining <= best_val:
            return
        if v == n:
            best_val, best = score, tuple(a)
            return
        for bit in (prefix[v],) if v < len(prefix) else (0, 1):
            a[v] = bit
            if bit:
                for j in incident[v]:
                    parity[j] ^= 1
            gained = sum(sign * (-1 if parity[j] else 1) for j in closing[v])
            walk(v + 1, score + gained, remaining - len(closing[v]))
            if bit:
                for j in incident[v]:
                    parity[j] ^= 1
        a[v] = 0

    walk(0, 0, len(edges))
    return best_val, best


def _exhaustive(n: int, edges, sign: int):
    if n > 26:
        raise SearchBudgetExceeded(f"exhaustive scan limited to 26 vertices, got {n}")
    codes = np.arange(1 << n, dtype=np.int64)
    # bit (n-1-v) holds vertex v, so numeric order is lexicographic order
    total = np.zeros(codes.size, dtype=np.int64)
    for e in edges:
        par = np.zeros(codes.size, dtype=np.int64)
        for v in e:
            par ^= (codes >> (n - 1 - v)) & 1
        total += 1 - 2 * par
    total *= sign
    k = int(np.argmax(total))
    return int(total[k]), tuple(int(c) for c in np.binary_repr(k, width=n)) if n else ()


def classical_bound(
    w: Witness,
    *,
    method: str = "branch-and-bound",
    search_cap: int | None = None,
    workers: int = 1,
) -> tuple[int, tuple[int, ...]]:
    """Exact noncontextual maximum of the witness and its first maximizer.

    Ties resolve to the lexicographically smallest bit string. ``method``
    is ``"branch-and-bound"`` or ``"exhaustive"`` (plain 2^n scan).
    """
    n = w.system.ray_count
    _check_cap(n, search_cap)
    edges = w.system.contexts
    if method == "exhaustive":
        return _exhaustive(n, edges, w.sign)
    if method != "branch-and-bound":
        raise ValueError(f"unknown method {method!r}")
    if workers <= 1 or n == 0:
        return _branch_and_bound(n, edges, w.sign, ())
    depth = min(n, max(1, (workers - 1).bit_length()))
    prefixes = list(product((0, 1), repeat=depth))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(
            pool.map(
                _branch_and_bound,
                [n] * len(prefixes),
                [edges] * len(prefixes),
                [w.sign] * len(prefixes),
                prefixes,
            )
        )
    # prefixes are in lexicographic order, so the first maximum wins ties
    best_val = max(v for v, _ in parts)
    return best_val, next(arg for v, arg in parts if v == best_val)


def quantum_witness_value(w: Witness, psi: QuantumState | Ray) -> float:
    d = w.system.dimension
    if psi.dimension != d:
        raise DimensionError(f"state of dimension {psi.dimension} for a d={d} system")
    observables = [np.eye(d) - 2 * projector_of(r).matrix for r in w.system.rays]
    total = 0.0 + 0.0j
    for ctx in w.system.contexts:
        op = np.eye(d, dtype=complex)
        for i in ctx:
            op = op @ observables[i]
        total += np.vdot(psi.components, op @ psi.components)
    return float(w.sign * total.real)


def witness_report(w: Witness, psi: QuantumState | Ray, **kwargs) -> WitnessReport:
    bound, arg = classical_bound(w, **kwargs)
    return WitnessReport(bound, arg, quantum_witness_value(w, psi))

"""Exit criteria, one test each.

Each test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""
import io
import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from contextkit import cli
from contextkit.counts import CosmicParams, Interpretation, history_count, infuturabilien_estimate, world_count
from contextkit.detection import (
    OPTIMAL_CHSH,
    MzConfig,
    MzModel,
    chsh_lhv_bound,
    chsh_quantum_value,
    chsh_strategies,
    exclusivity_run,
    mz_run,
)
from contextkit.ks import (
    CertificateResult,
    Witness,
    ceg18,
    classical_bound,
    find_noncontextual_assignment,
    parity_certificate,
    quantum_witness_value,
)
from contextkit.linalg import random_state
from contextkit.parable import (
    NoncontextualModel,
    ProphetModel,
    build_prophet_table,
    noncontextual_parable_bound,
    run_parable,
    sequential_machine_sim,
)

RESULTS: list[str] = []


def record(number: int, title: str, ok: bool, detail: str):
    RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}")
    assert ok, detail


def test_01_ceg18_not_colorable():
    start = time.perf_counter()
    system = ceg18()
    h = system.hypergraph()
    cert = parity_certificate(h)
    found = find_noncontextual_assignment(h)
    elapsed = time.perf_counter() - start
    ok = cert is CertificateResult.PROOF_OF_NONCOLORABILITY and found is None and elapsed < 1.0
    record(1, "18-ray KS non-colorability", ok, f"{cert.value}, search={found}, {elapsed * 1e3:.1f} ms")


def _scan_bound(system):
    grid = np.array(list(itertools.product((0, 1), repeat=system.ray_count)), dtype=np.int64)
    total = np.zeros(len(grid), dtype=np.int64)
    for ctx in system.contexts:
        total -= np.prod(1 - 2 * grid[:, list(ctx)], axis=1)
    k = int(np.argmax(total))
    return int(total[k]), tuple(int(x) for x in grid[k])


def test_02_witness_gap():
    system = ceg18()
    w = Witness(system)
    oracle = _scan_bound(system)
    pruned = classical_bound(w)
    values = [quantum_witness_value(w, random_state(4, seed)) for seed in range(20)]
    spread = max(values) - min(values)
    worst = max(abs(v - 9) for v in values)
    ok = oracle[0] == 7 and pruned == oracle and worst <= 1e-9 and spread < 1e-9
    record(2, "witness 7 vs 9", ok,
           f"bound={pruned[0]} (scan {oracle[0]}, same maximizer {pruned[1] == oracle[1]}), "
           f"max |q-9|={worst:.1e}, spread={spread:.1e}")


def test_03_fig5_structure():
    system = ceg18()
    deg = system.hypergraph().degrees()
    ctx = system.contexts
    ident = {
        "P19=P33": ctx[8][0] == ctx[2][2],
        "P29=P34": ctx[8][1] == ctx[3][2],
        "P39=P47": ctx[8][2] == ctx[6][3],
        "P49=P28": ctx[8][3] == ctx[7][1],
    }
    ok = (
        system.ray_count == 18
        and len(ctx) == 9
        and all(len(c) == 4 for c in ctx)
        and all(k == 2 for k in deg)
        and all(ident.values())
    )
    record(3, "Fig. 5 structure", ok, f"rays={system.ray_count}, contexts={len(ctx)}, degrees={set(deg)}, {ident}")


def test_04_parable_statistics():
    rounds = 100_000
    bound = noncontextual_parable_bound().value
    prophet = run_parable(ProphetModel(build_prophet_table(rounds, 0.5, seed=1)), "uniform", rounds, seed=1)
    machine = sequential_machine_sim(rounds, seed=1)
    fixed = run_parable(NoncontextualModel((1, 0, 0)), "uniform", rounds, seed=1)
    ok = (
        bound == Fraction(1, 3)
        and prophet.same == 0
        and machine.same == 0
        and abs(fixed.p_same - 1 / 3) <= 0.01
    )
    record(4, "parable 1/3 vs 0", ok,
           f"bound={bound}, prophet same={prophet.same}, machine same={machine.same}, "
           f"fixed p_same={fixed.p_same:.4f}")


def test_05_exclusivity():
    beam = exclusivity_run(2, (0.5, 0.5), 100_000, seed=1)
    qutrit = exclusivity_run(3, (1 / 3, 1 / 3, 1 / 3), 100_000, seed=1)
    bad = beam.coincidences + beam.no_detections + qutrit.coincidences + qutrit.no_detections
    ok = bad == 0 and beam.trial_count == qutrit.trial_count == 100_000
    record(5, "exclusivity at detection", ok,
           f"coincidences={beam.coincidences}+{qutrit.coincidences}, "
           f"no-detections={beam.no_detections}+{qutrit.no_detections}")


def test_06_interference_vs_path():
    trials = 100_000
    tol = 4 / math.sqrt(trials)
    rng = random.Random(2024)
    phases = [rng.uniform(0, 2 * math.pi) for _ in range(20)]
    q_err = max(abs(mz_run(MzConfig(p, MzModel.QUANTUM, trials, seed=k)).p_d0 - math.cos(p / 2) ** 2)
                for k, p in enumerate(phases))
    p_err = max(abs(mz_run(MzConfig(p, MzModel.PREDETERMINED_PATH, trials, seed=k)).p_d0 - 0.5)
                for k, p in enumerate(phases))
    ok = q_err <= tol and p_err <= 0.005
    record(6, "interference vs predetermined path", ok,
           f"quantum max err={q_err:.4f} (tol {tol:.4f}), path max err={p_err:.4f} (tol 0.005)")


def test_07_chsh_gap():
    strategies = chsh_strategies()
    lhv = chsh_lhv_bound()
    q = chsh_quantum_value(OPTIMAL_CHSH)
    (a1, a2), (b1, b2) = OPTIMAL_CHSH.alice_angles, OPTIMAL_CHSH.bob_angles
    closed = abs(-math.cos(a1 - b1) - math.cos(a1 - b2) - math.cos(a2 - b1) + math.cos(a2 - b2))
    ok = len(strategies) == 16 and lhv == 2 and abs(q - 2 * math.sqrt(2)) <= 1e-9 and abs(q - closed) <= 1e-9
    record(7, "CHSH 2 vs 2*sqrt(2)", ok, f"lhv={lhv} over {len(strategies)} strategies, quantum={q!r}, closed={closed!r}")


def test_08_infuturabilien():
    start = time.perf_counter()
    r = infuturabilien_estimate(CosmicParams())
    elapsed = time.perf_counter() - start
    lin = float(r.linear_pixels.log10())
    space = float(r.space_pixels.log10())
    person = float(r.per_person_histories.log10())
    humanity = float(r.humanity_histories.log10())
    ok = (
        abs(lin - 60) <= 0.5
        and abs(space - 180) <= 2
        and abs(person / 1.8e55 - 1) <= 0.1
        and abs(humanity / 1.35e65 - 1) <= 0.1
        and elapsed < 0.01
    )
    record(8, "Infuturabilien number", ok,
           f"log10 linear={lin:.2f}, space={space:.2f}, person={person:.4g}, humanity={humanity:.4g}, "
           f"{elapsed * 1e3:.2f} ms")


def test_09_counting_identities():
    mw = world_count(Interpretation.MW_OUTCOMES, 3, 4, 1)
    completed = world_count(Interpretation.MW_COMPLETED, 3, 4, 1)
    hist = history_count(3, 8, 10)
    ok = mw.value == 4 and completed.value == 12 and hist.depth == 0 and hist.value == 3**80
    record(9, "world and history counts", ok, f"MW={mw}, completed={completed}, histories={hist}")


REPRO_COMMANDS = [
    ["ks", "verify", "--rays", "ceg18.json"],
    ["ks", "search", "--rays", "ceg18.json"],
    ["witness", "bound", "--rays", "ceg18.json"],
    ["witness", "quantum", "--seed", "5"],
    ["parable", "run", "--model", "prophet", "--trials", "5000", "--seed", "3"],
    ["parable", "run", "--model", "noncontextual", "--trials", "5000", "--seed", "3"],
    ["parable", "run", "--model", "noncontextual", "--assignment", "100", "--trials", "5000", "--seed", "3"],
    ["parable", "bound"],
    ["parable", "machine", "--trials", "5000", "--seed", "3"],
    ["detect", "mz", "--phase", "1.1", "--trials", "5000", "--seed", "3"],
    ["detect", "mz", "--phase", "1.1", "--model", "path", "--trials", "5000", "--seed", "3"],
    ["detect", "exclusivity", "--detectors", "3", "--trials", "5000", "--seed", "3"],
    ["detect", "chsh"],
    ["detect", "separation", "--event1", "0,0", "--event2", "1,1"],
    ["counts", "worlds", "--interpretation", "APW_CHOICES", "--rounds", "8"],
    ["counts", "histories", "--agents", "10"],
    ["counts", "infuturabilien"],
    ["counts", "boltzmann", "--molecules", "100"],
]
SEARCH_COMMANDS = REPRO_COMMANDS[:3]


def _json_bytes(argv):
    out = io.StringIO()
    code = cli.dispatch(argv + ["--format", "json"], stdout=out, stderr=io.StringIO())
    assert code == 0, argv
    return out.getvalue().encode()


def test_10_reproducibility():
    mismatched = [" ".join(a) for a in REPRO_COMMANDS if _json_bytes(a) != _json_bytes(a)]
    for argv in SEARCH_COMMANDS:
        serial = _json_bytes(argv + ["--workers", "1"])
        for workers in ("2", "4"):
            if _json_bytes(argv + ["--workers", workers]) != serial:
                mismatched.append(" ".join(argv) + f" --workers {workers}")
    ok = not mismatched
    record(10, "byte-identical JSON", ok,
           f"{len(REPRO_COMMANDS)} commands x2, {len(SEARCH_COMMANDS)} search commands x3 worker counts; "
           f"mismatches={mismatched}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

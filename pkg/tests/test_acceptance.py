"""One test per acceptance criterion; each records a PASS/FAIL line before asserting.

Tolerances are pinned at the values the criteria state. Targets are the
tabulated closed forms, not the values this package computes.
"""

import math
import time

import numpy as np
import pytest

from rydspec import reference
from rydspec.analysis import (AnalysisOptions, build_hamiltonian, detect_peaks, fourier_spectrum,
                              match_lines, run_pipeline)
from rydspec.cli import main
from rydspec.config import ExperimentConfig
from rydspec.dynamics import (NoiseParams, TimeGrid, apply_spam, p0_closed_form, p0_lindblad,
                              sample_shots)
from rydspec.hamiltonian import build_pxp
from rydspec.spectral import bright_lines, diagonalize
from rydspec.verify import (_propagation_instances, ising_cases, ising_residual, pxp_deviation,
                            CONVERGENCE_RATIOS)

sq = math.sqrt
EIG_RTOL = 1e-10
OVERLAP_TOL = 1e-10
P0_TOL = 1e-8
OFFSET_TOL = 1e-10
PXP_FINAL = 1e-3
DEGEN_RTOL = 1e-6
DE_TOL = 0.10

# Bright eigenvalues in units of omega as stated for each graph class. For the
# diamond only the negative pair is given; the positive partners are the
# negatives of the exact lower roots (spectrum symmetric about zero).
_DIA = reference.bright_reference("diamond").eigenvalues
TARGETS = {
    "complete_4": [-1.0, 1.0],
    "cycle_4": [-sq(3 / 2), 0.0, sq(3 / 2)],
    "star_4": [-sq(23 / 10), -sq(10 / 23), sq(10 / 23), sq(23 / 10)],
    "diamond": [-sq(13 / 10), -sq(5 / 26), -_DIA[1], -_DIA[0]],
}


@pytest.mark.parametrize("cls", ["complete_4", "cycle_4", "star_4", "diamond"])
def test_c1_bright_eigenvalues(cls, report):
    t0 = time.perf_counter()
    sd = diagonalize(build_pxp(reference.bright_reference(cls).graph(), 1.0))
    got = np.sort(sd.bright_eigenvalues())
    elapsed = time.perf_counter() - t0
    want = np.array(TARGETS[cls])
    ok_shape = got.shape == want.shape
    rel = np.abs(got - want) / np.maximum(np.abs(want), 1.0) if ok_shape else np.array([np.inf])
    ok = ok_shape and bool(np.all(rel <= EIG_RTOL)) and elapsed < 1.0
    detail = f"computed {np.round(got, 12).tolist()} target {np.round(want, 12).tolist()} " \
             f"max rel {float(rel.max()):.2e} ({elapsed:.2f} s)"
    if cls == "diamond":
        lam6 = reference.bright_reference("diamond").states[-1]
        detail += f"; WARN printed lambda_6 {lam6.printed_eigenvalue:.6f}, computed {got[-1]:.6f}"
    report(f"C1 table eigenvalues [{cls}]", ok, detail)
    assert ok, detail


def test_c2_cycle_eigenvectors(report):
    sys = reference.bright_reference("cycle_4")
    sd = diagonalize(build_pxp(sys.graph(), 1.0))
    overlaps = []
    for st in sys.states:
        v = st.vector()
        overlaps.append(abs(np.vdot(v / np.linalg.norm(v), sd.eigenvectors[:, st.index - 1])))
    worst = min(overlaps)
    ok = worst > 1 - OVERLAP_TOL
    report("C2 cycle eigenvectors", ok, f"min overlap 1 - {1 - worst:.1e}")
    assert ok


def test_c3_unitary_vs_spectral_sum(report):
    t0 = time.perf_counter()
    grid = TimeGrid()
    from rydspec.dynamics import p0_unitary
    worst, n = 0.0, 0
    for _, h in _propagation_instances():
        worst = max(worst, float(np.max(np.abs(p0_unitary(h, grid).values
                                               - p0_closed_form(diagonalize(h), grid).values))))
        n += 1
    elapsed = time.perf_counter() - t0
    ok = worst < P0_TOL and elapsed < 5.0
    report("C3 propagation vs spectral sum", ok, f"{n} instances, max diff {worst:.1e} ({elapsed:.2f} s)")
    assert ok


def test_c4_ising_offset(report):
    res = {name: ising_residual(arr, r_b) for name, arr, r_b in ising_cases()}
    worst = max(res.values())
    ok = worst < OFFSET_TOL
    report("C4 truncated minus Ising is offset*I", ok, f"max residual {worst:.1e} over {sorted(res)}")
    assert ok


def test_c5_pxp_convergence(report):
    devs = {cls: [pxp_deviation(cls, r) for r in CONVERGENCE_RATIOS] for cls in reference.SUPPORTED}
    ok = all(d[0] > d[1] > d[2] and d[2] < PXP_FINAL for d in devs.values())
    detail = "; ".join(f"{c} " + "/".join(f"{x:.1e}" for x in d) for c, d in devs.items())
    report("C5 PXP convergence", ok, detail)
    assert ok


def test_c6_collective_enhancement(report):
    res = run_pipeline(*_ideal("triangle-60"))
    target = sq(3.0)
    peaks = res.peaks.freqs
    ok_tri = len(peaks) == 1 and abs(peaks[0] - target) <= res.spectrum.resolution
    cfg = ExperimentConfig.from_preset("hexagon-1.5d")
    f_rabi = cfg.drive().omega / (2 * math.pi)
    sd = diagonalize(build_hamiltonian(cfg.arrangement(), cfg.drive(), cfg.model))
    lines = sorted(ln.freq_mhz for ln in bright_lines(sd))
    want = [sq(3.0) * f_rabi, 2 * sq(3.0) * f_rabi]
    ok_hex = len(lines) == 2 and np.allclose(lines, want, rtol=1e-9)
    ok = ok_tri and ok_hex
    report("C6 collective enhancement", ok,
           f"triangle peaks {np.round(peaks, 4).tolist()} vs {target:.4f} (bin {res.spectrum.resolution:.4f}); "
           f"trios lines {np.round(lines, 6).tolist()} vs {np.round(want, 6).tolist()}")
    assert ok


def _ideal(name):
    cfg = ExperimentConfig.from_preset(name)
    return cfg.arrangement(), cfg.drive(), cfg.model, cfg.grid()


EXPECTED_LINES = {"s4": 4, "k4": 1, "c4": 2, "k4e": 3, "hexagon-0.75d": 6}
# For the diamond the count runs over the named transitions (6,5), (5,1), (6,1).
NAMED_PAIRS = {"k4e": {(5, 6), (1, 5), (1, 6)}}


def _count(name, lines):
    if name not in NAMED_PAIRS:
        return len(lines)
    want = NAMED_PAIRS[name]
    hit = [ln for ln in lines if want & set(ln.pairs)]
    covered = set().union(*(set(ln.pairs) for ln in hit)) if hit else set()
    return len(hit) if want <= covered else -len(hit)


def test_c7_line_counts(report):
    counts = {}
    for name in EXPECTED_LINES:
        cfg = ExperimentConfig.from_preset(name)
        sd = diagonalize(build_hamiltonian(cfg.arrangement(), cfg.drive(), cfg.model))
        counts[name] = _count(name, bright_lines(sd))
    ok = counts == EXPECTED_LINES
    report("C7 distinct line counts", ok, f"computed {counts} expected {EXPECTED_LINES}")
    assert ok


N4_PRESETS = ("s4", "k4", "c4", "k4e")
SEEDS = range(10)


def test_c8_noisy_resolution(report):
    t0 = time.perf_counter()
    noise = NoiseParams(gamma_phi=0.1, n_shots=150)
    opts = AnalysisOptions()
    prepared = {}
    for name in N4_PRESETS:
        cfg = ExperimentConfig.from_preset(name)
        grid = cfg.grid()
        h = build_hamiltonian(cfg.arrangement(), cfg.drive(), cfg.model)
        lines = bright_lines(diagonalize(h))
        prepared[name] = (apply_spam(p0_lindblad(h, noise, grid), noise), lines)
    passing, worst = 0, {}
    for seed in SEEDS:
        seed_ok = True
        for name, (measured, lines) in prepared.items():
            shots = sample_shots(measured, NoiseParams(gamma_phi=0.1, n_shots=150, rng_seed=seed))
            spec = fourier_spectrum(shots, opts.noisy_window, opts.zero_pad_factor)
            m = match_lines(detect_peaks(spec, opts.min_prominence_frac), lines, DE_TOL)
            worst[name] = max(worst.get(name, 0.0), m.max_rel_err)
            seed_ok &= bool(m.matches) and m.all_within_tol
        passing += seed_ok
    elapsed = time.perf_counter() - t0
    ok = passing >= 9 and elapsed < 60.0
    report("C8 noisy resolution", ok,
           f"{passing}/10 seeds pass; worst dE/E {', '.join(f'{k} {v:.3f}' for k, v in worst.items())} "
           f"({elapsed:.1f} s)")
    assert ok


def test_c9_chain_degeneracy(report):
    cfg = ExperimentConfig.from_preset("triangle-180")
    lam = diagonalize(build_hamiltonian(cfg.arrangement(), cfg.drive(), "truncated")).eigenvalues

    def gap(j, k):
        return lam[j - 1] - lam[k - 1]

    triple = [gap(5, 4), gap(4, 2), gap(2, 1)]
    pair = [gap(4, 1), gap(5, 2)]
    r1 = (max(triple) - min(triple)) / max(abs(x) for x in triple)
    r2 = abs(pair[0] - pair[1]) / max(abs(x) for x in pair)
    ok = r1 <= DEGEN_RTOL and r2 <= DEGEN_RTOL
    report("C9 chain degeneracy", ok,
           f"l54, l42, l21 = {np.round(triple, 4).tolist()} (rel spread {r1:.2e}); "
           f"l41, l52 = {np.round(pair, 4).tolist()} (rel spread {r2:.2e})")
    assert ok


def _artifacts(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_c10_determinism(tmp_path, report):
    runs = {}
    for tag in ("a", "b"):
        out = tmp_path / tag
        codes = [main(["spectrum", "--preset", "k4e", "--noisy", "--seed", "11", "--svg", "--out", str(out)]),
                 main(["sweep", "--family", "tetra-to-square", "--steps", "5", "--noisy", "--seed", "11",
                       "--svg", "--out", str(out)])]
        assert codes == [0, 0]
        runs[tag] = _artifacts(out)
    ok = runs["a"] == runs["b"] and len(runs["a"]) > 0
    report("C10 determinism", ok, f"{len(runs['a'])} artifacts byte-identical across reruns")
    assert ok

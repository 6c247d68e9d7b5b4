"""Fourier spectroscopy of P0(t): spectra, peaks, line matching and transformation sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .dynamics import (NoiseParams, TimeGrid, TimeSeries, apply_spam, p0_closed_form,
                       p0_lindblad, sample_shots)
from .errors import ParameterError, RydspecError
from .geometry import FAMILY_DOMAINS, AtomArrangement, build_family, hexagon_to_antiprism
from .graphs import blockade_graph
from .hamiltonian import (DriveParams, HamiltonianMatrix, build_full, build_full_truncated,
                          build_ising, build_pxp, ising_params_from)
from .spectral import SpectralDecomposition, TransitionLine, bright_lines, diagonalize
from .validation import frozen

TWO_PI = 2.0 * math.pi
MODELS = ("full", "truncated", "ising", "pxp")
WINDOWS = ("rect", "hann")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided PSD (MHz bins) of a mean-subtracted, windowed, zero-padded series.

    ``psd`` sums to the mean square of the windowed signal. ``dc_level`` is
    the series mean, i.e. the constant term of P0(t). ``resolution`` is the
    unpadded bin width 1/(N dt).
    """

    freqs: np.ndarray
    psd: np.ndarray
    window: str
    zero_pad_factor: int
    dc_level: float
    resolution: float

    @property
    def bin_width(self) -> float:
        return float(self.freqs[1] - self.freqs[0])

    def to_csv(self) -> str:
        rows = ["freq_MHz,psd"] + [f"{float(f)!r},{float(p)!r}" for f, p in zip(self.freqs, self.psd)]
        return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class Peak:
    freq_mhz: float
    height: float
    prominence: float


@dataclass(frozen=True)
class PeakSet:
    peaks: tuple
    resolution: float
    threshold: float

    @property
    def freqs(self) -> np.ndarray:
        return np.array([p.freq_mhz for p in self.peaks])

    def __len__(self):
        return len(self.peaks)


def fourier_spectrum(series: TimeSeries | np.ndarray, window: str = "hann", zero_pad_factor: int = 8,
                     dt: float | None = None) -> Spectrum:
    if isinstance(series, TimeSeries):
        x, dt = np.asarray(series.values, dtype=float), series.grid.dt
    else:
        x = np.asarray(series, dtype=float)
        if dt is None:
            raise ParameterError("dt is required for raw arrays")
    if window not in WINDOWS:
        raise ParameterError(f"window must be one of {WINDOWS}")
    if int(zero_pad_factor) != zero_pad_factor or zero_pad_factor < 1:
        raise ParameterError("zero_pad_factor must be an integer >= 1")
    n = len(x)
    if n < 8:
        raise ParameterError(f"need at least 8 samples for a spectrum, got {n}")
    w = np.ones(n) if window == "rect" else np.hanning(n)
    mean = float(np.mean(x))
    y = (x - mean) * w
    m = int(zero_pad_factor) * n
    X = np.fft.rfft(y, n=m)
    psd = np.abs(X) ** 2 / (m * n)
    stop = len(psd) - 1 if m % 2 == 0 else len(psd)
    psd[1:stop] *= 2.0
    freqs = np.arange(len(psd)) / (m * dt)
    return Spectrum(frozen(freqs), frozen(psd), window, int(zero_pad_factor), mean, 1.0 / (n * dt))


def detect_peaks(spec: Spectrum, min_prominence_frac: float = 0.05) -> PeakSet:
    """Local maxima above DC, refined by a 3-point parabola on the PSD.

    Prominence is measured on the amplitude spectrum sqrt(psd) and must reach
    ``min_prominence_frac`` times its largest non-DC value. ``Peak.prominence``
    is reported as that fraction.
    """
    psd = spec.psd
    amp = np.sqrt(psd)
    top = float(np.max(amp[1:])) if len(amp) > 1 else 0.0
    threshold = min_prominence_frac * top
    if top <= 0.0:
        return PeakSet((), spec.resolution, threshold)
    idx, props = find_peaks(amp[1:], prominence=max(threshold, np.finfo(float).tiny))
    df = spec.bin_width
    peaks = []
    for i, prom in zip(idx + 1, props["prominences"]):
        a, b, c = psd[i - 1], psd[i], psd[i + 1] if i + 1 < len(psd) else psd[i]
        denom = a - 2.0 * b + c
        delta = 0.5 * (a - c) / denom if denom < 0 else 0.0
        peaks.append(Peak(float((i + delta) * df), float(b - 0.25 * (a - c) * delta), float(prom / top)))
    return PeakSet(tuple(peaks), spec.resolution, threshold)


@dataclass(frozen=True)
class LineMatch:
    line_freq: float
    peak_freq: float
    rel_err: float
    weight: float


@dataclass(frozen=True)
class MatchReport:
    matches: tuple
    missed: tuple
    spurious: tuple
    tol_frac: float

    @property
    def all_within_tol(self) -> bool:
        return all(m.rel_err < self.tol_frac for m in self.matches)

    @property
    def max_rel_err(self) -> float:
        return max((m.rel_err for m in self.matches), default=0.0)

    def to_dict(self) -> dict:
        return {
            "matches": [{"line_freq": m.line_freq, "peak_freq": m.peak_freq, "rel_err": m.rel_err,
                         "weight": m.weight} for m in self.matches],
            "missed": [{"line_freq": f, "weight": w} for f, w in self.missed],
            "spurious": [{"peak_freq": f, "height": h} for f, h in self.spurious],
            "tol_frac": self.tol_frac,
            "all_within_tol": self.all_within_tol,
        }


def merge_lines_mhz(lines, resolution: float) -> list[tuple[float, float]]:
    """Lines as (MHz, weight), merged when closer than one resolution bin; DC-like lines dropped."""
    pts = sorted((ln.frequency / TWO_PI, ln.weight) for ln in lines)
    pts = [p for p in pts if p[0] >= resolution]
    groups: list[list] = []
    for f, w in pts:
        if groups and f - groups[-1][-1][0] < resolution:
            groups[-1].append((f, w))
        else:
            groups.append([(f, w)])
    out = []
    for g in groups:
        wsum = sum(w for _, w in g)
        f = sum(f * w for f, w in g) / wsum if wsum > 0 else g[0][0]
        out.append((f, wsum))
    return out


def match_lines(peaks: PeakSet, lines: list[TransitionLine], tol_frac: float = 0.10,
                capture_bins: float = 2.0) -> MatchReport:
    """Greedy nearest-frequency pairing of peaks with theoretical lines.

    Candidate pairs closer than ``capture_bins`` resolution bins are taken in
    order of increasing frequency gap. ``rel_err`` is |f_peak - f_line| / f_line;
    matches above ``tol_frac`` are kept and show up in ``all_within_tol``.
    """
    merged = merge_lines_mhz(lines, peaks.resolution)
    window = capture_bins * peaks.resolution
    cands = []
    for li, (fl, _) in enumerate(merged):
        for pi, pk in enumerate(peaks.peaks):
            gap = abs(pk.freq_mhz - fl)
            if gap <= window:
                cands.append((gap, li, pi))
    cands.sort()
    used_l, used_p, matches = set(), set(), []
    for gap, li, pi in cands:
        if li in used_l or pi in used_p:
            continue
        used_l.add(li)
        used_p.add(pi)
        fl, wl = merged[li]
        matches.append(LineMatch(fl, peaks.peaks[pi].freq_mhz, gap / fl, wl))
    matches.sort(key=lambda m: m.line_freq)
    missed = tuple((f, w) for i, (f, w) in enumerate(merged) if i not in used_l)
    spurious = tuple((p.freq_mhz, p.height) for i, p in enumerate(peaks.peaks) if i not in used_p)
    return MatchReport(tuple(matches), missed, spurious, tol_frac)


# -- pipeline -----------------------------------------------------------

def build_hamiltonian(arr: AtomArrangement, drive: DriveParams, model: str,
                      r_b: float | None = None) -> HamiltonianMatrix:
    """Compile ``arr`` under one of the models; the graph uses ``r_b`` or the drive's blockade radius."""
    if model not in MODELS:
        raise ParameterError(f"model must be one of {MODELS}, got {model!r}")
    if model == "full":
        return build_full(arr, drive)
    graph = blockade_graph(arr, drive.blockade_radius if r_b is None else r_b)
    if model == "truncated":
        return build_full_truncated(arr, drive, graph)
    if model == "pxp":
        return build_pxp(graph, drive.omega)
    return build_ising(graph, ising_params_from(drive, graph))


@dataclass(frozen=True)
class AnalysisOptions:
    window: str = "hann"
    noisy_window: str = "hann"
    zero_pad_factor: int = 8
    min_prominence_frac: float = 0.05
    tol_frac: float = 0.10
    eps_bright: float = 1e-6


@dataclass(frozen=True, eq=False)
class PipelineResult:
    arrangement: AtomArrangement
    hamiltonian: HamiltonianMatrix
    decomposition: SpectralDecomposition
    lines: tuple
    ideal: TimeSeries
    measured: TimeSeries | None
    spectrum: Spectrum
    peaks: PeakSet
    match: MatchReport

    @property
    def observed(self) -> TimeSeries:
        return self.measured if self.measured is not None else self.ideal


def run_pipeline(arr: AtomArrangement, drive: DriveParams, model: str, grid: TimeGrid,
                 noise: NoiseParams | None = None, options: AnalysisOptions | None = None,
                 stream_id: int = 0, r_b: float | None = None) -> PipelineResult:
    """Arrangement -> Hamiltonian -> P0(t) (ideal, optionally noisy) -> spectrum -> matched lines."""
    opts = options or AnalysisOptions()
    h = build_hamiltonian(arr, drive, model, r_b)
    sd = diagonalize(h)
    lines = tuple(bright_lines(sd, opts.eps_bright))
    ideal = p0_closed_form(sd, grid)
    measured = None
    window = opts.window
    if noise is not None:
        measured = sample_shots(apply_spam(p0_lindblad(h, noise, grid), noise), noise, stream_id)
        window = opts.noisy_window
    spec = fourier_spectrum(measured if measured is not None else ideal, window, opts.zero_pad_factor)
    peaks = detect_peaks(spec, opts.min_prominence_frac)
    match = match_lines(peaks, list(lines), opts.tol_frac)
    return PipelineResult(arr, h, sd, lines, ideal, measured, spec, peaks, match)


@dataclass(frozen=True, eq=False)
class SweepResult:
    family: str
    values: np.ndarray
    points: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(np.diff(v) <= 0):
            raise ParameterError("sweep parameter values must be strictly increasing")
        object.__setattr__(self, "values", frozen(v))

    @property
    def spectra(self) -> list[Spectrum]:
        return [p.spectrum for p in self.points]

    @property
    def lines(self) -> list[tuple]:
        return [p.lines for p in self.points]

    def spectrogram(self) -> np.ndarray:
        """PSD matrix with one row per parameter value."""
        return np.vstack([s.psd for s in self.spectra])

    def spectrogram_csv(self) -> str:
        rows = ["param,freq_MHz,psd"]
        for v, s in zip(self.values, self.spectra):
            rows += [f"{float(v)!r},{float(f)!r},{float(p)!r}" for f, p in zip(s.freqs, s.psd)]
        return "\n".join(rows) + "\n"

    def lines_csv(self) -> str:
        rows = ["param,j,k,freq_MHz,weight"]
        for v, lines in zip(self.values, self.lines):
            rows += [f"{float(v)!r},{ln.j},{ln.k},{ln.freq_mhz!r},{ln.weight!r}" for ln in lines]
        return "\n".join(rows) + "\n"


class SweepError(RydspecError):
    def __init__(self, index: int, value: float, cause: Exception):
        super().__init__(f"sweep point {index} (value={value!r}) failed: {cause}")
        self.index = index
        self.value = value
        self.cause = cause


def _run_points(family, values, make_arr, drive, model, grid, noise, options, n_jobs, r_b):
    def one(i):
        try:
            return run_pipeline(make_arr(values[i]), drive, model, grid, noise, options,
                                stream_id=i, r_b=r_b)
        except RydspecError as exc:
            raise SweepError(i, float(values[i]), exc) from exc

    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            points = tuple(pool.map(one, range(len(values))))
    else:
        points = tuple(one(i) for i in range(len(values)))
    return SweepResult(family, np.asarray(values, dtype=float), points)


def sweep(family: str, n_steps: int, drive: DriveParams, grid: TimeGrid, model: str = "pxp",
          noise: NoiseParams | None = None, options: AnalysisOptions | None = None, d: float = 8.0,
          n_jobs: int = 1, r_b: float | None = None, values=None) -> SweepResult:
    """Run the pipeline at ``n_steps`` evenly spaced values across the family's domain.

    Point ``i`` draws shot noise from stream ``(noise.rng_seed, i)``.
    """
    if family not in FAMILY_DOMAINS:
        raise ParameterError(f"unknown family {family!r}")
    if values is None:
        if int(n_steps) != n_steps or n_steps < 2:
            raise ParameterError(f"n_steps must be an integer >= 2, got {n_steps}")
        lo, hi = FAMILY_DOMAINS[family]
        values = np.linspace(lo, hi, int(n_steps))
    return _run_points(family, np.asarray(values, dtype=float), lambda v: build_family(family, v, d),
                       drive, model, grid, noise, options, n_jobs, r_b)


def hexagon_sweep(z_values, d: float, drive: DriveParams, grid: TimeGrid,
                  noise: NoiseParams | None = None, options: AnalysisOptions | None = None,
                  n_jobs: int = 1) -> SweepResult:
    """Hexagon-to-antiprism sweep over plane separations ``z_values`` (um), full Hamiltonian."""
    z = np.asarray(z_values, dtype=float)
    if len(z) < 2:
        raise ParameterError("need at least two z values")
    return _run_points("hexagon_to_antiprism", z, lambda v: hexagon_to_antiprism(v, d),
                       drive, "full", grid, noise, options, n_jobs, None)

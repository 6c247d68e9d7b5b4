"""Return probability P0(t) = |<W0| exp(-iHt) |W0>|^2: closed form, unitary and Lindblad."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import NumericalError, ParameterError
from .hamiltonian import HamiltonianMatrix, occupations
from .rng import stream
from .spectral import SpectralDecomposition
from .validation import check_hermitian, check_probability, check_scalar, frozen

VALUE_TOL = 1e-6
NORM_TOL = 1e-10
TRACE_TOL = 1e-4
RK4_MAX_STEPS = 200_000


@dataclass(frozen=True)
class TimeGrid:
    """Uniform samples 0, dt, ..., floor(t_max/dt) dt (us)."""

    t_max: float = 5.0
    dt: float = 0.1

    def __post_init__(self):
        check_scalar(self.dt, "dt", min_val=0.0, include_min=False)
        check_scalar(self.t_max, "t_max", min_val=self.dt)

    @property
    def n_samples(self) -> int:
        return int(math.floor(self.t_max / self.dt + 1e-9)) + 1

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.n_samples)


@dataclass(frozen=True)
class NoiseParams:
    """Decoherence and readout model. Defaults are estimates, not published values.

    ``gamma_phi`` (1/us) is the per-atom dephasing rate on the Rydberg
    population; 0.1/us corresponds to a 10 us coherence time.
    """

    gamma_phi: float = 0.1
    eps_prep: float = 0.01
    eps_det_0to1: float = 0.02
    eps_det_1to0: float = 0.05
    n_shots: int = 150
    rng_seed: int = 0

    def __post_init__(self):
        check_scalar(self.gamma_phi, "gamma_phi", min_val=0.0)
        for name in ("eps_prep", "eps_det_0to1", "eps_det_1to0"):
            check_probability(getattr(self, name), name)
        if int(self.n_shots) != self.n_shots or self.n_shots < 1:
            raise ParameterError(f"n_shots must be a positive integer, got {self.n_shots}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    grid: TimeGrid
    values: np.ndarray
    kind: str
    n_atoms: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_samples,):
            raise ParameterError(f"expected {self.grid.n_samples} samples, got {v.shape}")
        object.__setattr__(self, "values", frozen(v))

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def to_csv(self) -> str:
        rows = ["t_us,p0"]
        rows += [f"{float(t)!r},{float(p)!r}" for t, p in zip(self.times, self.values)]
        return "\n".join(rows) + "\n"

    def to_json(self) -> str:
        """Envelope with provenance metadata; values are written as exact reprs."""
        body = {"kind": self.kind, "n_atoms": self.n_atoms, "t_max_us": self.grid.t_max,
                "dt_us": self.grid.dt, "meta": self.meta, "p0": [float(v) for v in self.values]}
        return json.dumps(body, sort_keys=True, default=str) + "\n"


def p0_closed_form(sd: SpectralDecomposition, grid: TimeGrid) -> TimeSeries:
    """sum_j |A_j|^4 + sum_{j<k} 2|A_j|^2|A_k|^2 cos((lambda_k - lambda_j) t)."""
    p = sd.bright_probabilities
    keep = p > 0.0
    p, lam = p[keep], sd.eigenvalues[keep]
    t = grid.times
    out = np.full(t.shape, float(np.sum(p**2)))
    ju, ku = np.triu_indices(len(p), k=1)
    if len(ju):
        B = 2.0 * p[ju] * p[ku]
        freq = lam[ku] - lam[ju]
        out += np.cos(np.outer(t, freq)) @ B
    n = int(round(math.log2(len(sd.eigenvalues))))
    return TimeSeries(grid, out, "ideal", n, {"method": "closed_form", "source": sd.source})


def p0_unitary(h: HamiltonianMatrix, grid: TimeGrid) -> TimeSeries:
    """Evolve |W0> with exp(-iHt) built from a fresh eigendecomposition."""
    M = check_hermitian(getattr(h, "matrix", h))
    w, V = np.linalg.eigh(M)
    c = V.conj().T[:, 0]
    t = grid.times
    psi = (np.exp(-1j * np.outer(t, w)) * c) @ V.T
    norms = np.linalg.norm(psi, axis=1)
    drift = float(np.max(np.abs(norms - 1.0)))
    if drift > NORM_TOL:
        raise NumericalError(f"state norm drifted by {drift:.2e}", {"norm_drift": drift})
    vals = np.abs(psi[:, 0]) ** 2
    n = getattr(h, "n_qubits", int(round(math.log2(M.shape[0]))))
    return TimeSeries(grid, vals, "ideal", n,
                      {"method": "unitary", "source": getattr(h, "source", "custom"), "norm_drift": drift})


def dephasing_rates(n: int, gamma_phi: float) -> np.ndarray:
    """Elementwise decay of rho_ab: -(gamma/2) * Hamming(a, b) for jump operators n_j."""
    occ = occupations(n).astype(float)
    ham = np.abs(occ[:, None, :] - occ[None, :, :]).sum(axis=-1)
    return -0.5 * gamma_phi * ham


def lindblad_rhs(H: np.ndarray, decay: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """-i[H, rho] + gamma sum_j (n_j rho n_j - {n_j, rho}/2)."""
    return -1j * (H @ rho - rho @ H) + decay * rho


def rk4_substep(H: np.ndarray, gamma_phi: float, n: int, dt: float) -> float:
    scale = max(float(np.max(np.abs(H))), 0.5 * gamma_phi * n, 1e-300)
    return min(dt / 20.0, 0.002 / scale)


def _rk4(H, decay, rho0, grid, substep):
    n_sub = int(math.ceil(grid.dt / substep - 1e-12))
    h = grid.dt / n_sub
    rho = rho0.copy()
    out = [rho.copy()]
    for _ in range(grid.n_samples - 1):
        for _ in range(n_sub):
            k1 = lindblad_rhs(H, decay, rho)
            k2 = lindblad_rhs(H, decay, rho + 0.5 * h * k1)
            k3 = lindblad_rhs(H, decay, rho + 0.5 * h * k2)
            k4 = lindblad_rhs(H, decay, rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out.append(rho.copy())
    return out, h


def _expm(H, decay, rho0, grid):
    dim = H.shape[0]
    eye = sp.identity(dim, format="csr", dtype=complex)
    Hs = sp.csr_matrix(H)
    # row-major vec: vec(A rho B) = (A kron B^T) vec(rho)
    L = -1j * (sp.kron(Hs, eye) - sp.kron(eye, Hs.T)) + sp.diags(decay.ravel())
    vecs = expm_multiply(L.tocsr(), rho0.ravel(), start=0.0, stop=grid.dt * (grid.n_samples - 1),
                         num=grid.n_samples, endpoint=True)
    return [v.reshape(dim, dim) for v in vecs]


def p0_lindblad(h: HamiltonianMatrix, noise: NoiseParams, grid: TimeGrid, *,
                method: str = "auto", substep: float | None = None) -> TimeSeries:
    """<W0|rho(t)|W0> under pure dephasing of every atom's Rydberg population.

    ``method="rk4"`` integrates with fixed RK4 substeps no larger than
    dt/20 and 0.002/max|H|. ``"expm"`` applies the exact superoperator
    exponential and is what ``"auto"`` falls back to when RK4 would need more
    than ``RK4_MAX_STEPS`` substeps (stiff, strongly interacting systems).
    """
    if method not in ("auto", "rk4", "expm"):
        raise ParameterError(f"unknown method {method!r}")
    M = check_hermitian(h.matrix)
    n = h.n_qubits
    decay = dephasing_rates(n, noise.gamma_phi)
    rho0 = np.zeros_like(M)
    rho0[0, 0] = 1.0
    limit = rk4_substep(M, noise.gamma_phi, n, grid.dt)
    if substep is None:
        substep = limit
    elif substep > limit * (1 + 1e-12):
        raise ParameterError(f"substep {substep} exceeds the stability guard {limit}")
    total = int(math.ceil(grid.dt / substep)) * (grid.n_samples - 1)
    if method == "auto":
        method = "rk4" if total <= RK4_MAX_STEPS else "expm"
    meta = {"method": method, "source": h.source, "gamma_phi": noise.gamma_phi}
    if method == "rk4":
        rhos, used = _rk4(M, decay, rho0, grid, substep)
        meta["substep"] = used
    else:
        rhos = _expm(M, decay, rho0, grid)
    traces = np.array([np.trace(r).real for r in rhos])
    drift = float(np.max(np.abs(traces - 1.0)))
    min_eig = float(min(np.linalg.eigvalsh(0.5 * (r + r.conj().T))[0] for r in rhos))
    meta.update(trace_drift=drift, min_eigenvalue=min_eig)
    if drift > TRACE_TOL or not np.isfinite(drift):
        raise NumericalError(f"Lindblad trace drifted by {drift:.2e}", meta)
    vals = np.array([r[0, 0].real for r in rhos])
    return TimeSeries(grid, vals, "lindblad", n, meta)


def spam_coefficients(n_atoms: int, noise: NoiseParams) -> tuple[float, float]:
    """Slope and intercept of the affine readout map P_meas = a P_ideal + b.

    Each atom is mis-prepared with probability eps_prep; a mis-prepared
    system never reads as all-ground. A truly all-ground system reads
    correctly with probability (1 - eps_det_0to1)**N. To first order in
    eps_det_1to0, the remaining population is taken to sit in single
    excitations (the blockaded manifold), each read as all-ground with
    probability eps_det_1to0 (1 - eps_det_0to1)**(N-1).
    """
    ok = (1.0 - noise.eps_prep) ** n_atoms
    read0 = (1.0 - noise.eps_det_0to1) ** n_atoms
    leak = noise.eps_det_1to0 * (1.0 - noise.eps_det_0to1) ** (n_atoms - 1)
    return ok * (read0 - leak), leak


def apply_spam(series: TimeSeries, noise: NoiseParams) -> TimeSeries:
    """Affine state-preparation and detection error model, see :func:`spam_coefficients`."""
    a, b = spam_coefficients(series.n_atoms, noise)
    vals = np.clip(a * np.clip(series.values, 0.0, 1.0) + b, 0.0, 1.0)
    meta = dict(series.meta, spam={"slope": a, "intercept": b})
    return TimeSeries(series.grid, vals, series.kind, series.n_atoms, meta)


def sample_shots(series: TimeSeries, noise: NoiseParams, stream_id: int = 0) -> TimeSeries:
    """Binomial shot noise: count / n_shots at every sample, seeded by (rng_seed, stream_id)."""
    rng = stream(noise.rng_seed, stream_id)
    p = np.clip(series.values, 0.0, 1.0)
    counts = rng.binomial(int(noise.n_shots), p)
    meta = dict(series.meta, n_shots=int(noise.n_shots), seed=int(noise.rng_seed), stream=int(stream_id))
    return TimeSeries(series.grid, counts / noise.n_shots, "sampled", series.n_atoms, meta)

"""scikit-learn style wrappers around the simulation and spectroscopy pipeline.

``ReturnProbabilityModel`` treats atom positions as the training input:
``fit`` compiles and diagonalizes the Hamiltonian, ``predict`` evaluates
P0 at the requested times. ``FourierSpectrometer`` is a stateless
transformer from sampled P0 rows to PSD rows.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analysis import MODELS, build_hamiltonian, detect_peaks, fourier_spectrum
from .errors import ParameterError
from .geometry import AtomArrangement
from .graphs import blockade_graph
from .hamiltonian import DEFAULT_OMEGA, DEFAULT_RB, DriveParams
from .spectral import EPS_BRIGHT, bright_lines, diagonalize
from .validation import check_positions


class ReturnProbabilityModel(BaseEstimator):
    """Quench from the all-ground state of the atoms given to ``fit``.

    Parameters are in rad/us and um. ``r_b`` only sets the blockade graph for
    the truncated, Ising and PXP models; ``None`` uses (c6/omega)**(1/6).
    """

    def __init__(self, omega=DEFAULT_OMEGA, c6=DEFAULT_OMEGA * DEFAULT_RB**6, detuning=0.0,
                 model="pxp", r_b=None, eps_bright=EPS_BRIGHT):
        self.omega = omega
        self.c6 = c6
        self.detuning = detuning
        self.model = model
        self.r_b = r_b
        self.eps_bright = eps_bright

    def fit(self, X, y=None):
        if self.model not in MODELS:
            raise ParameterError(f"model must be one of {MODELS}, got {self.model!r}")
        pos = check_positions(X)
        drive = DriveParams(self.omega, self.c6, self.detuning)
        self.arrangement_ = AtomArrangement(pos)
        self.graph_ = blockade_graph(self.arrangement_, self.r_b or drive.blockade_radius)
        self.hamiltonian_ = build_hamiltonian(self.arrangement_, drive, self.model, self.r_b)
        self.decomposition_ = diagonalize(self.hamiltonian_)
        self.lines_ = bright_lines(self.decomposition_, self.eps_bright)
        self.n_atoms_ = self.arrangement_.n_atoms
        return self

    def predict(self, times):
        """P0 at each time in ``times`` (us)."""
        check_is_fitted(self, "decomposition_")
        t = np.asarray(times, dtype=float).ravel()
        p = self.decomposition_.bright_probabilities
        lam = self.decomposition_.eigenvalues
        amp = np.exp(-1j * np.outer(t, lam)) @ p
        return np.abs(amp) ** 2

    def line_frequencies(self):
        """Theoretical transition frequencies in MHz."""
        check_is_fitted(self, "lines_")
        return np.array([ln.freq_mhz for ln in self.lines_])


class FourierSpectrometer(TransformerMixin, BaseEstimator):
    """Map rows of uniformly sampled P0 values to one-sided PSD rows."""

    def __init__(self, dt=0.1, window="hann", zero_pad_factor=8, min_prominence_frac=0.05):
        self.dt = dt
        self.window = window
        self.zero_pad_factor = zero_pad_factor
        self.min_prominence_frac = min_prominence_frac

    def fit(self, X, y=None):
        X = self._rows(X)
        self.n_samples_ = X.shape[1]
        self.freqs_ = fourier_spectrum(X[0], self.window, self.zero_pad_factor, dt=self.dt).freqs
        return self

    def transform(self, X):
        check_is_fitted(self, "freqs_")
        X = self._rows(X)
        if X.shape[1] != self.n_samples_:
            raise ParameterError(f"expected rows of {self.n_samples_} samples, got {X.shape[1]}")
        return np.vstack([fourier_spectrum(x, self.window, self.zero_pad_factor, dt=self.dt).psd
                          for x in X])

    def peak_frequencies(self, X):
        """Refined peak positions (MHz) for each row."""
        check_is_fitted(self, "freqs_")
        out = []
        for x in self._rows(X):
            spec = fourier_spectrum(x, self.window, self.zero_pad_factor, dt=self.dt)
            out.append(detect_peaks(spec, self.min_prominence_frac).freqs)
        return out

    def _rows(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] < 8:
            raise ParameterError("expected a 2-D array with at least 8 samples per row")
        return X


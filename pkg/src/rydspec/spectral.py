"""Exact diagonalization, bright-state amplitudes and transition lines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import AtomArrangement
from .hamiltonian import DriveParams, HamiltonianMatrix, pair_couplings
from .validation import check_hermitian, frozen

DEGENERACY_GAP = 1e-9
EPS_BRIGHT = 1e-6
LINE_MERGE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues (rad/us), unitary eigenvector columns and A_j = <W0|lambda_j>.

    For PXP matrices the blockade-allowed sector is listed first and the
    excluded states (formally at infinite energy) after it.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    bright_amplitudes: np.ndarray
    source: str = "custom"

    @property
    def bright_probabilities(self) -> np.ndarray:
        return np.abs(self.bright_amplitudes) ** 2

    def bright_indices(self, eps_bright: float = EPS_BRIGHT) -> list[int]:
        """1-based indices of eigenstates with |A_j|^2 > eps_bright."""
        return [int(i) + 1 for i in np.nonzero(self.bright_probabilities > eps_bright)[0]]

    def bright_eigenvalues(self, eps_bright: float = EPS_BRIGHT) -> np.ndarray:
        return self.eigenvalues[self.bright_probabilities > eps_bright]

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def to_csv(self) -> str:
        lines = ["index,eigenvalue_rad_per_us,bright_prob"]
        for i, (lam, p) in enumerate(zip(self.eigenvalues, self.bright_probabilities), start=1):
            lines.append(f"{i},{float(lam)!r},{float(p)!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TransitionLine:
    """A cosine component of P0(t): frequency lambda_k - lambda_j (rad/us), weight B_jk.

    ``pairs`` lists every (j, k) merged into this line (1-based eigenindices).
    """

    j: int
    k: int
    frequency: float
    weight: float
    pairs: tuple = field(default=())

    @property
    def freq_mhz(self) -> float:
        return self.frequency / (2.0 * np.pi)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    mag = np.abs(v)
    i = int(np.nonzero(mag >= mag.max() - 1e-12)[0][0])
    return v * (np.conj(v[i]) / mag[i])


def _canonicalize_cluster(Q: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(Q).

    Canonical basis vectors are projected into the subspace and Gram-Schmidt
    orthonormalized in basis-index order. The vector carrying all of the
    overlap with basis state 0 is moved to the end of the cluster, which is
    the order the degenerate levels take at large but finite blockade.
    """
    m = Q.shape[1]
    out = []
    has_w0 = False
    for i in range(Q.shape[0]):
        v = Q @ np.conj(Q[i, :])
        for u in out:
            v = v - u * np.vdot(u, v)
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            if not out and i == 0:
                has_w0 = True
            out.append(v / nrm)
            if len(out) == m:
                break
    if has_w0:
        out = out[1:] + out[:1]
    return np.column_stack(out)


def _eig_block(M: np.ndarray):
    w, V = np.linalg.eigh(M)
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] < DEGENERACY_GAP:
            stop += 1
        if stop - start > 1:
            V[:, start:stop] = _canonicalize_cluster(V[:, start:stop])
            w[start:stop] = np.mean(w[start:stop])
        start = stop
    return w, V


def diagonalize(h: HamiltonianMatrix) -> SpectralDecomposition:
    """Dense Hermitian eigendecomposition with a reproducible eigenvector gauge."""
    M = check_hermitian(h.matrix if isinstance(h, HamiltonianMatrix) else h)
    source = getattr(h, "source", "custom")
    sector = getattr(h, "sector", None)
    dim = M.shape[0]
    if sector is None or sector.all():
        w, V = _eig_block(M.copy())
    else:
        groups = [np.nonzero(sector)[0], np.nonzero(~sector)[0]]
        ws, cols = [], []
        for idx in groups:
            wb, Vb = _eig_block(M[np.ix_(idx, idx)].copy())
            full = np.zeros((dim, len(idx)), dtype=complex)
            full[idx, :] = Vb
            ws.append(wb)
            cols.append(full)
        w = np.concatenate(ws)
        V = np.hstack(cols)
    V = np.column_stack([_fix_phase(V[:, i]) for i in range(dim)])
    return SpectralDecomposition(frozen(w), frozen(V), frozen(V[0, :].copy()), source)


def bright_lines(sd: SpectralDecomposition, eps_bright: float = EPS_BRIGHT) -> list[TransitionLine]:
    """All pairwise differences between bright eigenvalues, merged when equal within 1e-9 rad/us."""
    p = sd.bright_probabilities
    idx = np.nonzero(p > eps_bright)[0]
    raw = []
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            j, k = idx[a], idx[b]
            raw.append((float(sd.eigenvalues[k] - sd.eigenvalues[j]), int(j) + 1, int(k) + 1,
                        2.0 * p[j] * p[k]))
    raw.sort(key=lambda r: (r[0], r[1], r[2]))
    merged: list[TransitionLine] = []
    group: list = []

    def flush():
        if group:
            f0, j0, k0, _ = group[0]
            merged.append(TransitionLine(j0, k0, f0, float(sum(g[3] for g in group)),
                                         tuple((g[1], g[2]) for g in group)))

    for r in raw:
        if group and r[0] - group[-1][0] > LINE_MERGE_TOL:
            flush()
            group = []
        group.append(r)
    flush()
    return merged


def lines_to_csv(lines: list[TransitionLine]) -> str:
    rows = ["j,k,freq_MHz,weight"]
    for ln in lines:
        rows.append(f"{ln.j},{ln.k},{ln.freq_mhz!r},{ln.weight!r}")
    return "\n".join(rows) + "\n"


# -- regime diagnostics -------------------------------------------------

BLOCKADED = "blockaded"
INTERMEDIATE = "intermediate"
DECOUPLED = "decoupled"
DECOUPLED_RATIO = 1e-2


@dataclass(frozen=True)
class PairCoupling:
    atoms: tuple[int, int]
    distance: float
    ratio: float
    label: str


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    pairs: tuple

    def ratio(self, a: int, b: int) -> float:
        key = (min(a, b), max(a, b))
        for pc in self.pairs:
            if pc.atoms == key:
                return pc.ratio
        raise KeyError(key)


def _label(ratio: float) -> str:
    if ratio > 1.0:
        return BLOCKADED
    if ratio > DECOUPLED_RATIO:
        return INTERMEDIATE
    return DECOUPLED


def regime_report(arr: AtomArrangement, drive: DriveParams) -> RegimeReport:
    """Label every pair by U/omega and summarize by the weakest pair.

    Pair atoms are 1-based labels. The overall tag is ``super_atom`` when every
    pair is blockaded, ``decoupled`` when the weakest pair is decoupled, and
    ``double_excitation`` otherwise.
    """
    dist = arr.pair_distances()
    rows = []
    for (j, k), U in pair_couplings(arr, drive).items():
        ratio = U / drive.omega
        rows.append(PairCoupling((j + 1, k + 1), dist[(j, k)], ratio, _label(ratio)))
    if not rows:
        return RegimeReport("single_atom", ())
    weakest = _label(min(r.ratio for r in rows))
    regime = {BLOCKADED: "super_atom", INTERMEDIATE: "double_excitation", DECOUPLED: "decoupled"}[weakest]
    return RegimeReport(regime, tuple(rows))

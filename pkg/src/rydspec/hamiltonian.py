"""Hamiltonian compilers: full van der Waals, edge-truncated, quantum Ising and PXP.

Units: hbar = 1, energies in rad/us, lengths in um. Basis index ``b`` encodes
the bitstring b_1 b_2 ... b_N with atom 1 as the most significant bit and
bit value 1 meaning the Rydberg state, so index 0 is the all-ground state.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ParameterError
from .geometry import AtomArrangement
from .graphs import BlockadeGraph
from .validation import check_hermitian, check_scalar, frozen

TWO_PI = 2.0 * math.pi
MAX_QUBITS = 12
DEFAULT_OMEGA = TWO_PI * 1.0
DEFAULT_RB = 10.0


@dataclass(frozen=True)
class DriveParams:
    """Global drive. ``omega`` and ``detuning`` in rad/us, ``c6`` in rad um^6/us."""

    omega: float = DEFAULT_OMEGA
    c6: float = DEFAULT_OMEGA * DEFAULT_RB**6
    detuning: float = 0.0

    def __post_init__(self):
        check_scalar(self.omega, "omega", min_val=0.0, include_min=False)
        check_scalar(self.c6, "c6", min_val=0.0, include_min=False)
        check_scalar(self.detuning, "detuning")

    @classmethod
    def from_blockade_radius(cls, omega: float, r_b: float, detuning: float = 0.0) -> "DriveParams":
        """C6 chosen so that U(r_b) = omega."""
        check_scalar(r_b, "r_b", min_val=0.0, include_min=False)
        return cls(omega=omega, c6=omega * r_b**6, detuning=detuning)

    @classmethod
    def from_mhz(cls, omega_mhz: float, r_b: float | None = None, c6: float | None = None,
                 detuning_mhz: float = 0.0) -> "DriveParams":
        omega = TWO_PI * check_scalar(omega_mhz, "omega_MHz", min_val=0.0, include_min=False)
        if c6 is None:
            c6 = omega * (DEFAULT_RB if r_b is None else r_b) ** 6
        return cls(omega=omega, c6=c6, detuning=TWO_PI * detuning_mhz)

    @property
    def blockade_radius(self) -> float:
        return (self.c6 / self.omega) ** (1.0 / 6.0)

    def interaction(self, r):
        return self.c6 / np.asarray(r, dtype=float) ** 6


@dataclass(frozen=True)
class IsingParams:
    """Coefficients of J sum s_z s_z + sum (h_x s_x + h_z^(j) s_z) + offset."""

    j_coupling: float
    h_x: float
    h_z: tuple
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "h_z", tuple(float(h) for h in self.h_z))


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """Dense Hermitian operator on the 2**n_qubits product basis.

    ``sector`` (PXP only) marks the blockade-allowed basis states; the matrix
    vanishes outside it.
    """

    matrix: np.ndarray
    n_qubits: int
    source: str = "custom"
    sector: np.ndarray | None = None

    def __post_init__(self):
        M = check_hermitian(self.matrix)
        if M.shape[0] != 2**self.n_qubits:
            raise ParameterError(f"matrix dimension {M.shape[0]} != 2**{self.n_qubits}")
        object.__setattr__(self, "matrix", frozen(M))
        if self.sector is not None:
            s = np.asarray(self.sector, dtype=bool)
            if s.shape != (M.shape[0],):
                raise ParameterError("sector mask must have one entry per basis state")
            object.__setattr__(self, "sector", frozen(s))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_csv(self, atol: float = 0.0) -> str:
        """Nonzero entries as ``row,col,re,im`` rows."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "re", "im"])
        rows, cols = np.nonzero(np.abs(self.matrix) > atol)
        for r, c in zip(rows, cols):
            v = self.matrix[r, c]
            w.writerow([int(r), int(c), repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()


def occupations(n: int) -> np.ndarray:
    """``occ[b, j]`` = Rydberg occupation of atom j (0-based) in basis state b."""
    b = np.arange(2**n)[:, None]
    shifts = (n - 1 - np.arange(n))[None, :]
    return ((b >> shifts) & 1).astype(np.int8)


def _check_size(n: int):
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} atoms exceeds the dense-matrix limit of {MAX_QUBITS}")
    if n < 1:
        raise ParameterError("need at least one atom")


def _drive_part(n: int, omega: float, detuning: float) -> np.ndarray:
    dim = 2**n
    H = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    for j in range(n):
        flip = idx ^ (1 << (n - 1 - j))
        H[flip, idx] += omega / 2.0
    if detuning:
        H[idx, idx] -= detuning * occupations(n).sum(axis=1)
    return H


def _with_interactions(n: int, drive: DriveParams, pairs) -> np.ndarray:
    H = _drive_part(n, drive.omega, drive.detuning)
    occ = occupations(n)
    diag = np.zeros(2**n)
    for (j, k), r in pairs:
        diag += drive.c6 / r**6 * (occ[:, j] * occ[:, k])
    H[np.diag_indices(2**n)] += diag
    return H


def build_full(arr: AtomArrangement, drive: DriveParams) -> HamiltonianMatrix:
    """Every pair interacts through C6 / r**6."""
    _check_size(arr.n_atoms)
    H = _with_interactions(arr.n_atoms, drive, arr.pair_distances().items())
    return HamiltonianMatrix(H, arr.n_atoms, source="full")


def build_full_truncated(arr: AtomArrangement, drive: DriveParams,
                         graph: BlockadeGraph) -> HamiltonianMatrix:
    """As :func:`build_full` with the interaction sum restricted to graph edges."""
    _check_size(arr.n_atoms)
    if graph.n_vertices != arr.n_atoms:
        raise ParameterError(f"graph has {graph.n_vertices} vertices, arrangement has {arr.n_atoms} atoms")
    dist = arr.pair_distances()
    H = _with_interactions(arr.n_atoms, drive, ((e, dist[e]) for e in graph.sorted_edges()))
    return HamiltonianMatrix(H, arr.n_atoms, source="truncated")


def ising_params_from(drive: DriveParams, graph: BlockadeGraph, *,
                      hz_factor: str = "derived") -> IsingParams:
    """Map the edge-truncated Rydberg Hamiltonian onto the Ising form.

    With n = (1 - s_z)/2, ``U n_j n_k = U/4 (1 - s_z^j - s_z^k + s_z^j s_z^k)`` gives
    J = U(d)/4, h_x = omega/2 and h_z^(j) = -deg_j U(d)/4 + detuning/2, plus the
    scalar offset |E| U(d)/4 - N detuning/2. ``hz_factor="printed"`` uses
    -deg_j U(d)/2 instead; that variant does not reproduce the Rydberg matrix.
    """
    if hz_factor not in ("derived", "printed"):
        raise ParameterError("hz_factor must be 'derived' or 'printed'")
    n = graph.n_vertices
    if graph.n_edges == 0:
        J = 0.0 if graph.edge_length is None else float(drive.interaction(graph.edge_length)) / 4.0
        U = 0.0
    else:
        if graph.edge_length is None:
            raise ParameterError("graph has no common edge length; the Ising mapping needs one")
        U = float(drive.interaction(graph.edge_length))
        J = U / 4.0
    scale = 4.0 if hz_factor == "derived" else 2.0
    h_z = tuple(-deg * U / scale + drive.detuning / 2.0 for deg in graph.degree)
    offset = graph.n_edges * U / 4.0 - n * drive.detuning / 2.0
    return IsingParams(j_coupling=J, h_x=drive.omega / 2.0, h_z=h_z, offset=offset)


def build_ising(graph: BlockadeGraph, params: IsingParams) -> HamiltonianMatrix:
    """Pauli-form Ising matrix with s_z|0> = +|0>, s_z|1> = -|1>. The offset is not added."""
    n = graph.n_vertices
    _check_size(n)
    if len(params.h_z) != n:
        raise ParameterError(f"h_z has {len(params.h_z)} entries for {n} vertices")
    sz = 1 - 2 * occupations(n).astype(float)
    diag = np.zeros(2**n)
    for j, k in graph.sorted_edges():
        diag += params.j_coupling * sz[:, j] * sz[:, k]
    diag += sz @ np.asarray(params.h_z, dtype=float)
    H = _drive_part(n, 2.0 * params.h_x, 0.0)
    H[np.diag_indices(2**n)] += diag
    return HamiltonianMatrix(H, n, source="ising")


def independent_set_mask(graph: BlockadeGraph) -> np.ndarray:
    occ = occupations(graph.n_vertices)
    ok = np.ones(2**graph.n_vertices, dtype=bool)
    for j, k in graph.edges:
        ok &= ~((occ[:, j] == 1) & (occ[:, k] == 1))
    return ok


def build_pxp(graph: BlockadeGraph, omega: float) -> HamiltonianMatrix:
    """Perfect-blockade Hamiltonian (omega/2) sum_j P_nbr(j) s_x^(j) on the independent sets.

    An atom flips only when all of its graph neighbours are in the ground
    state. The matrix is zero outside the independent-set sector.
    """
    omega = check_scalar(omega, "omega", min_val=0.0, include_min=False)
    n = graph.n_vertices
    _check_size(n)
    mask = independent_set_mask(graph)
    dim = 2**n
    H = np.zeros((dim, dim), dtype=complex)
    states = np.nonzero(mask)[0]
    for j in range(n):
        flipped = states ^ (1 << (n - 1 - j))
        keep = mask[flipped]
        H[flipped[keep], states[keep]] = omega / 2.0
    return HamiltonianMatrix(H, n, source="pxp", sector=mask)


def basis_permutation(n: int, order) -> np.ndarray:
    """Index map for the relabeling new atom i = old atom ``order[i]``.

    ``perm[b_new] = b_old``, so ``H_new = H_old[np.ix_(perm, perm)]``.
    """
    occ_new = occupations(n)
    perm = np.zeros(2**n, dtype=int)
    for b_new in range(2**n):
        b_old = 0
        for i in range(n):
            if occ_new[b_new, i]:
                b_old |= 1 << (n - 1 - order[i])
        perm[b_new] = b_old
    return perm


def pair_couplings(arr: AtomArrangement, drive: DriveParams) -> dict:
    return {(j, k): float(drive.interaction(r)) for (j, k), r in arr.pair_distances().items()}



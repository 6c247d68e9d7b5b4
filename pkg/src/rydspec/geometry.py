"""Atom arrangements for the three-, four- and six-atom configurations.

All constructors are closed-form. Positions are in micrometres and the row
order of ``positions`` is the atom label order (label = row + 1), which is
also the qubit order used by every Hamiltonian downstream.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ParameterError
from .validation import check_positions, check_scalar, frozen

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

FAMILIES = (
    "three_atom_bend",
    "star_to_tetrahedron",
    "tetra_to_square",
    "square_to_diamond",
    "hexagon_to_antiprism",
)


@dataclass(frozen=True, eq=False)
class AtomArrangement:
    """Labelled 3D atom positions (um). Labels run 1..N in row order."""

    positions: np.ndarray
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pos = check_positions(self.positions)
        object.__setattr__(self, "positions", frozen(pos))
        d = self.distances()
        iu = np.triu_indices(len(pos), k=1)
        if np.any(d[iu] <= 0.0):
            j, k = (int(v[0]) for v in np.nonzero(np.triu(d <= 0.0, k=1)))
            raise ParameterError(f"atoms {j + 1} and {k + 1} coincide")

    @property
    def n_atoms(self) -> int:
        return len(self.positions)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_atoms + 1))

    def distances(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.sqrt(np.sum(diff**2, axis=-1))

    def pair_distances(self) -> dict[tuple[int, int], float]:
        """Distances keyed by 0-based index pairs ``(j, k)`` with ``j < k``."""
        d = self.distances()
        return {(j, k): float(d[j, k]) for j, k in combinations(range(self.n_atoms), 2)}

    def permuted(self, order) -> "AtomArrangement":
        """Relabel atoms so that new atom ``i`` is old atom ``order[i]``."""
        order = list(order)
        if sorted(order) != list(range(self.n_atoms)):
            raise ParameterError(f"{order} is not a permutation of 0..{self.n_atoms - 1}")
        return AtomArrangement(self.positions[order], name=self.name, meta=dict(self.meta))

    # -- serialization -------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "atoms": [
                {"label": lab, "xyz_um": [float(c) for c in p]}
                for lab, p in zip(self.labels, self.positions)
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json_dict(cls, data: dict, name: str = "") -> "AtomArrangement":
        try:
            atoms = data["atoms"]
            recs = sorted(((int(a["label"]), a["xyz_um"]) for a in atoms), key=lambda r: r[0])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"malformed arrangement record: {exc}") from exc
        labels = [r[0] for r in recs]
        if labels != list(range(1, len(labels) + 1)):
            raise ParameterError(f"atom labels must be 1..N consecutive, got {labels}")
        for lab, xyz in recs:
            if len(xyz) != 3:
                raise ParameterError(f"atom {lab}: xyz_um must have 3 components")
        return cls(np.array([r[1] for r in recs], dtype=float), name=name)

    @classmethod
    def from_json(cls, text: str, name: str = "") -> "AtomArrangement":
        return cls.from_json_dict(json.loads(text), name=name)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "x_um", "y_um", "z_um"])
        for lab, p in zip(self.labels, self.positions):
            w.writerow([lab, *(repr(float(c)) for c in p)])
        return buf.getvalue()


def _check_d(d) -> float:
    return check_scalar(d, "d", min_val=0.0, include_min=False)


def _unit(value, name) -> float:
    return check_scalar(value, name, min_val=0.0, max_val=1.0)


def three_atom_bend(theta: float, d: float) -> AtomArrangement:
    """Atoms A, B, C with AB = BC = d and bending angle ``theta`` (degrees) at B."""
    theta = check_scalar(theta, "theta", min_val=0.0, max_val=180.0, include_min=False)
    d = _check_d(d)
    t = math.radians(theta)
    pos = np.array([[-d, 0.0, 0.0], [0.0, 0.0, 0.0], [-d * math.cos(t), d * math.sin(t), 0.0]])
    return AtomArrangement(pos, name=f"three_atom_bend(theta={theta:g})",
                           meta={"family": "three_atom_bend", "value": theta, "d": d})


def star_leaf_radius(xi: float, literal: bool = False) -> float:
    """Leaf circle radius (units of d) along the star-to-tetrahedron path.

    The default coefficient makes all six edges equal at ``xi = 1``. With
    ``literal=True`` the alternative ``1 - (1 - 2/sqrt(3)) xi`` form is used,
    which grows the base triangle instead.
    """
    coef = 2.0 / SQRT3 if literal else 1.0 / SQRT3
    return 1.0 - (1.0 - coef) * xi


def star_to_tetrahedron(xi: float, d: float, *, literal: bool = False) -> AtomArrangement:
    """Lift the centre of a 3-claw star out of the plane (atom 1 is the centre)."""
    xi = _unit(xi, "xi")
    d = _check_d(d)
    rho = star_leaf_radius(xi, literal)
    pts = [[0.0, 0.0, math.sqrt(2.0 / 3.0) * xi]]
    for i in range(3):
        a = 2.0 * math.pi * i / 3.0
        pts.append([rho * math.cos(a), rho * math.sin(a), 0.0])
    return AtomArrangement(d * np.array(pts), name=f"star_to_tetrahedron(xi={xi:g})",
                           meta={"family": "star_to_tetrahedron", "value": xi, "d": d,
                                 "literal": literal})


def tetra_to_square(eta: float, d: float) -> AtomArrangement:
    """Stretch two opposite edges of a regular tetrahedron until a square forms."""
    eta = _unit(eta, "eta")
    d = _check_d(d)
    r3 = 1.0 / SQRT3
    pts = [
        [-eta / SQRT2, 0.0, math.sqrt(2.0 / 3.0) * (1.0 - eta)],
        [r3 + (1.0 / SQRT2 - r3) * eta, 0.0, 0.0],
        [-(1.0 - eta) / (2.0 * SQRT3), 0.5 + (1.0 / SQRT2 - 0.5) * eta, 0.0],
        [-(1.0 - eta) / (2.0 * SQRT3), -0.5 + (-1.0 / SQRT2 + 0.5) * eta, 0.0],
    ]
    return AtomArrangement(d * np.array(pts), name=f"tetra_to_square(eta={eta:g})",
                           meta={"family": "tetra_to_square", "value": eta, "d": d})


def square_to_diamond(zeta: float, d: float) -> AtomArrangement:
    """Squash the square along x and stretch it along y into a rhombus of two triangles."""
    zeta = _unit(zeta, "zeta")
    d = _check_d(d)
    x = 1.0 / SQRT2 + (0.5 - 1.0 / SQRT2) * zeta
    y = 1.0 / SQRT2 + (SQRT3 / 2.0 - 1.0 / SQRT2) * zeta
    pts = [[-x, 0.0, 0.0], [x, 0.0, 0.0], [0.0, y, 0.0], [0.0, -y, 0.0]]
    return AtomArrangement(d * np.array(pts), name=f"square_to_diamond(zeta={zeta:g})",
                           meta={"family": "square_to_diamond", "value": zeta, "d": d})


def hexagon_to_antiprism(z: float, d: float) -> AtomArrangement:
    """Six atoms on a hexagon of circumradius d/sqrt(3); even labels lifted to height ``z``.

    Odd and even atoms each form an equilateral triangle of side ``d``; the
    adjacent (odd, even) spacing is ``sqrt(d**2 / 3 + z**2)``.
    """
    z = check_scalar(z, "z", min_val=0.0)
    d = _check_d(d)
    R = d / SQRT3
    pts = []
    for j in range(1, 7):
        a = j * math.pi / 3.0
        pts.append([R * math.cos(a), R * math.sin(a), z if j % 2 == 0 else 0.0])
    return AtomArrangement(np.array(pts), name=f"hexagon_to_antiprism(z={z:g})",
                           meta={"family": "hexagon_to_antiprism", "value": z, "d": d})


FAMILY_DOMAINS = {
    "three_atom_bend": (60.0, 180.0),
    "star_to_tetrahedron": (0.0, 1.0),
    "tetra_to_square": (0.0, 1.0),
    "square_to_diamond": (0.0, 1.0),
    # in units of d
    "hexagon_to_antiprism": (0.0, 1.5),
}


@dataclass(frozen=True)
class TransformationParam:
    """One point on a transformation path.

    ``value`` is theta in degrees for the bend, xi/eta/zeta in [0, 1] for the
    four-atom paths, and z in units of ``scale`` for the hexagon.
    """

    family: str
    value: float
    scale: float = 8.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        check_scalar(self.scale, "scale", min_val=0.0, include_min=False)
        v = check_scalar(self.value, "value")
        if self.family == "three_atom_bend":
            check_scalar(v, "theta", min_val=0.0, max_val=180.0, include_min=False)
        elif self.family == "hexagon_to_antiprism":
            check_scalar(v, "z", min_val=0.0)
        else:
            check_scalar(v, self.family, min_val=0.0, max_val=1.0)

    def arrangement(self) -> AtomArrangement:
        return build_family(self.family, self.value, self.scale)


def build_family(family: str, value: float, d: float) -> AtomArrangement:
    if family == "three_atom_bend":
        return three_atom_bend(value, d)
    if family == "star_to_tetrahedron":
        return star_to_tetrahedron(value, d)
    if family == "tetra_to_square":
        return tetra_to_square(value, d)
    if family == "square_to_diamond":
        return square_to_diamond(value, d)
    if family == "hexagon_to_antiprism":
        return hexagon_to_antiprism(value * d, d)
    raise ParameterError(f"unknown family {family!r}")


def distance_multiset(arr: AtomArrangement) -> np.ndarray:
    """Sorted pairwise distances; equal multisets within tolerance mean congruent shapes here."""
    d = arr.distances()
    return np.sort(d[np.triu_indices(arr.n_atoms, k=1)])

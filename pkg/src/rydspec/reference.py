"""Closed-form bright eigensystems of the four 4-vertex connected graphs (perfect blockade).

Vertex labelling follows the symmetric basis states of the published table:
the star centre is atom 1, the cycle is 1-2-3-4-1 and the diamond lacks the
1-3 edge. Eigenvalues are in units of omega.

Each entry keeps two things apart:

* ``eigenvalue`` / ``amplitudes`` -- exact closed forms. For the star and the
  diamond these are roots of ``x**4 - (11/4) x**2 + 1`` and
  ``x**4 - (3/2) x**2 + 1/4``; amplitudes follow from the reduced
  symmetric-sector equations, normalized.
* ``printed_eigenvalue`` / ``printed_amplitudes`` -- the tabulated values.
  Star and diamond entries there are rational approximations (e.g. 23/10 for
  (11 + sqrt 57)/8), and the last diamond eigenvalue is printed as
  sqrt(23/10) although the spectrum is symmetric. ``flags`` records each case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .graphs import BlockadeGraph

SUPPORTED = ("star_4", "complete_4", "cycle_4", "diamond")

# W-basis states as {bitstring: coefficient} before normalization
W_STATES = {
    "W0": ["0000"],
    "W1": ["1000", "0100", "0010", "0001"],
    "W2C": ["1010", "0101"],
    "W1S": ["0100", "0010", "0001"],
    "W2S": ["0110", "0011", "0101"],
    "W1D": ["1000", "0010"],
    "W1pD": ["0100", "0001"],
    "1000": ["1000"],
    "0111": ["0111"],
    "1010": ["1010"],
}

GRAPH_EDGES = {
    "star_4": [(0, 1), (0, 2), (0, 3)],
    "complete_4": [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    "cycle_4": [(0, 1), (1, 2), (2, 3), (3, 0)],
    "diamond": [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)],
}


def w_state(name: str, n: int = 4) -> np.ndarray:
    v = np.zeros(2**n)
    bits = W_STATES[name]
    for b in bits:
        v[int(b, 2)] = 1.0
    return v / math.sqrt(len(bits))


@dataclass(frozen=True)
class BrightState:
    index: int
    eigenvalue: float
    amplitudes: dict
    printed_eigenvalue: float
    printed_amplitudes: dict
    flags: tuple = field(default=())

    def vector(self, printed: bool = False) -> np.ndarray:
        amps = self.printed_amplitudes if printed else self.amplitudes
        v = np.zeros(16)
        for name, c in amps.items():
            v = v + c * w_state(name)
        return v


@dataclass(frozen=True)
class ReferenceSystem:
    graph_class: str
    states: tuple

    def graph(self) -> BlockadeGraph:
        return BlockadeGraph.from_edges(4, GRAPH_EDGES[self.graph_class])

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([s.eigenvalue for s in self.states])

    @property
    def printed_eigenvalues(self) -> np.ndarray:
        return np.array([s.printed_eigenvalue for s in self.states])

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(s.index for s in self.states)


def _normalize(amps: dict, sign_key: str, sign: float) -> dict:
    nrm = math.sqrt(sum(c * c for c in amps.values()))
    s = sign * math.copysign(1.0, amps[sign_key])
    return {k: s * c / nrm for k, c in amps.items()}


def _star_vector(lam: float, sign_key: str, sign: float) -> dict:
    # sector basis W0, |1000>, W1S, W2S, |0111>; couplings 1/2, sqrt3/2, 1, sqrt3/2
    c = 1.0 / (2.0 * lam)
    s1 = (lam - 1.0 / (4.0 * lam)) * 2.0 / math.sqrt(3.0)
    s2 = s1 / (lam - 3.0 / (4.0 * lam))
    w3 = math.sqrt(3.0) * s2 / (2.0 * lam)
    return _normalize({"W0": 1.0, "W1S": s1, "1000": c, "W2S": s2, "0111": w3}, sign_key, sign)


def _diamond_vector(lam: float, sign_key: str, sign: float) -> dict:
    # sector basis W0, W1D, W1pD, |1010>; all couplings 1/sqrt2
    r = 1.0 / math.sqrt(2.0)
    b = r / (lam - r * r / lam)
    bp = r / lam
    e = r * b / lam
    return _normalize({"W0": 1.0, "W1D": b, "W1pD": bp, "1010": e}, sign_key, sign)


def _build() -> dict:
    sq = math.sqrt
    star_hi = sq((11.0 + sq(57.0)) / 8.0)
    star_lo = sq((11.0 - sq(57.0)) / 8.0)
    dia_hi = sq((3.0 + sq(5.0)) / 4.0)
    dia_lo = sq((3.0 - sq(5.0)) / 4.0)
    approx = ("printed value is a rational approximation of the exact root",)

    star = ReferenceSystem("star_4", (
        BrightState(1, -star_hi, _star_vector(-star_hi, "W0", +1),
                    -sq(23 / 10), {"W0": sq(3 / 20), "W1S": -sq(11 / 30), "1000": -sq(1 / 60),
                                   "W2S": sq(7 / 20), "0111": -sq(7 / 60)}, approx),
        BrightState(2, -star_lo, _star_vector(-star_lo, "W0", -1),
                    -sq(10 / 23), {"W0": -sq(7 / 20), "W1S": sq(1 / 30), "1000": sq(1 / 5),
                                   "W2S": sq(3 / 20), "0111": -sq(4 / 15)}, approx),
        BrightState(8, star_lo, _star_vector(star_lo, "W0", +1),
                    sq(10 / 23), {"W0": sq(7 / 20), "W1S": sq(1 / 30), "1000": sq(1 / 5),
                                  "W2S": -sq(3 / 20), "0111": -sq(4 / 15)}, approx),
        BrightState(9, star_hi, _star_vector(star_hi, "W0", +1),
                    sq(23 / 10), {"W0": sq(3 / 20), "W1S": sq(11 / 30), "1000": sq(1 / 60),
                                  "W2S": sq(7 / 20), "0111": sq(7 / 60)}, approx),
    ))
    complete = ReferenceSystem("complete_4", (
        BrightState(1, -1.0, {"W0": sq(1 / 2), "W1": -sq(1 / 2)}, -1.0,
                    {"W0": sq(1 / 2), "W1": -sq(1 / 2)}),
        BrightState(5, 1.0, {"W0": sq(1 / 2), "W1": sq(1 / 2)}, 1.0,
                    {"W0": sq(1 / 2), "W1": sq(1 / 2)}),
    ))
    c4_1 = {"W0": -sq(1 / 3), "W1": sq(1 / 2), "W2C": -sq(1 / 6)}
    c4_5 = {"W0": -sq(1 / 3), "W2C": sq(2 / 3)}
    c4_7 = {"W0": sq(1 / 3), "W1": sq(1 / 2), "W2C": sq(1 / 6)}
    cycle = ReferenceSystem("cycle_4", (
        BrightState(1, -sq(3 / 2), c4_1, -sq(3 / 2), dict(c4_1)),
        BrightState(5, 0.0, c4_5, 0.0, dict(c4_5)),
        BrightState(7, sq(3 / 2), c4_7, sq(3 / 2), dict(c4_7)),
    ))
    diamond = ReferenceSystem("diamond", (
        BrightState(1, -dia_hi, _diamond_vector(-dia_hi, "W0", -1),
                    -sq(13 / 10), {"W0": -3 / 5, "W1D": 3 / 5, "W1pD": sq(7 / 50), "1010": -sq(7 / 50)},
                    approx),
        BrightState(2, -dia_lo, _diamond_vector(-dia_lo, "W0", -1),
                    -sq(5 / 26), {"W0": -sq(7 / 50), "W1D": -sq(7 / 50), "W1pD": 3 / 5, "1010": 3 / 5},
                    approx),
        BrightState(5, dia_lo, _diamond_vector(dia_lo, "W0", +1),
                    sq(5 / 26), {"W0": sq(7 / 50), "W1D": -sq(7 / 50), "W1pD": 3 / 5, "1010": -3 / 5},
                    approx),
        BrightState(6, dia_hi, _diamond_vector(dia_hi, "W0", +1),
                    sq(23 / 10), {"W0": 3 / 5, "W1D": 3 / 5, "W1pD": sq(7 / 50), "1010": sq(7 / 50)},
                    approx + ("printed value breaks the +/- symmetry of the spectrum; "
                              "symmetric partner of the lowest level is used",)),
    ))
    return {s.graph_class: s for s in (star, complete, cycle, diamond)}


_TABLE = _build()


def bright_reference(graph_class: str) -> ReferenceSystem:
    """Analytic bright eigensystem for ``star_4``, ``complete_4``, ``cycle_4`` or ``diamond``."""
    try:
        return _TABLE[graph_class]
    except KeyError:
        raise ParameterError(f"no reference for {graph_class!r}; supported: {SUPPORTED}") from None


def flagged_entries() -> list[tuple[str, BrightState]]:
    return [(cls, s) for cls, sys in _TABLE.items() for s in sys.states if s.flags]

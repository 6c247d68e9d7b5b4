import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from rydspec.errors import NumericalError, ParameterError, ValidationError
from rydspec.geometry import AtomArrangement, tetra_to_square
from rydspec.graphs import BlockadeGraph
from rydspec.hamiltonian import DriveParams, HamiltonianMatrix, build_full, build_pxp
from rydspec.reference import GRAPH_EDGES
from rydspec.rng import stream
from rydspec.spectral import diagonalize
from rydspec.dynamics import (NoiseParams, TimeGrid, TimeSeries, apply_spam, p0_closed_form,
                              p0_lindblad, p0_unitary, sample_shots, spam_coefficients)

OMEGA = 2 * math.pi
GRID = TimeGrid()


def pxp(cls):
    return build_pxp(BlockadeGraph.from_edges(4, GRAPH_EDGES[cls]), OMEGA)


def single_atom():
    return build_full(AtomArrangement(np.zeros((1, 3))), DriveParams())


def random_hermitian(n, seed):
    rng = stream(seed, 7)
    A = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    return HamiltonianMatrix((A + A.conj().T) / 2, n)


class TestGrid:
    def test_default(self):
        assert GRID.n_samples == 51
        assert GRID.times[-1] == pytest.approx(5.0)

    def test_floor(self):
        assert TimeGrid(1.05, 0.1).n_samples == 11

    def test_invalid(self):
        with pytest.raises(ParameterError):
            TimeGrid(0.05, 0.1)
        with pytest.raises(ParameterError):
            TimeGrid(1.0, 0.0)


class TestClosedForm:
    @given(st.integers(1, 4), st.integers(0, 1000))
    def test_starts_at_one(self, n, seed):
        assert p0_closed_form(diagonalize(random_hermitian(n, seed)), GRID).values[0] == pytest.approx(1.0)

    def test_rabi(self):
        p = p0_closed_form(diagonalize(single_atom()), GRID)
        np.testing.assert_allclose(p.values, np.cos(OMEGA * GRID.times / 2) ** 2, atol=1e-12)

    def test_collective_triangle(self):
        h = build_pxp(BlockadeGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)]), OMEGA)
        p = p0_closed_form(diagonalize(h), GRID)
        np.testing.assert_allclose(p.values, np.cos(math.sqrt(3) * OMEGA * GRID.times / 2) ** 2, atol=1e-12)

    def test_csv_and_json(self):
        p = p0_closed_form(diagonalize(single_atom()), GRID)
        rows = p.to_csv().splitlines()
        assert rows[0] == "t_us,p0" and len(rows) == 52
        assert '"kind": "ideal"' in p.to_json()


class TestUnitary:
    def test_complete_graph(self):
        p = p0_unitary(pxp("complete_4"), GRID)
        np.testing.assert_allclose(p.values, np.cos(OMEGA * GRID.times) ** 2, atol=1e-10)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_closed_form(self, seed):
        n = 1 + seed % 5
        h = random_hermitian(n, seed)
        a = p0_unitary(h, GRID).values
        b = p0_closed_form(diagonalize(h), GRID).values
        assert np.max(np.abs(a - b)) < 1e-8

    def test_norm_recorded(self):
        assert p0_unitary(random_hermitian(3, 1), GRID).meta["norm_drift"] < 1e-10

    def test_finite_u_differs_from_pxp(self):
        arr = tetra_to_square(1.0, 8.0)
        full = p0_unitary(build_full(arr, DriveParams()), GRID).values
        ideal = p0_unitary(pxp("cycle_4"), GRID).values
        dev = np.abs(full - ideal)
        # U(d)/omega is only ~3.8, so agreement holds over the first few tenths of a us
        assert np.max(dev[GRID.times <= 0.3]) < 0.05
        assert np.max(dev) > 1e-3

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            p0_unitary(np.array([[0, 1], [0, 0]]), GRID)


def bloch_oracle(omega, gamma, times):
    """Two-level Bloch equations with population dephasing at rate gamma."""
    def rhs(_, y):
        p0, u, v = y
        w = 2 * p0 - 1
        return [-omega * v, -gamma / 2 * u, omega / 2 * w - gamma / 2 * v]
    sol = solve_ivp(rhs, (0, times[-1]), [1.0, 0.0, 0.0], t_eval=times, rtol=1e-11, atol=1e-12,
                    method="DOP853")
    return sol.y[0]


class TestLindblad:
    def test_closed_limit(self):
        h = pxp("complete_4")
        lind = p0_lindblad(h, NoiseParams(gamma_phi=0.0), GRID).values
        assert np.max(np.abs(lind - p0_unitary(h, GRID).values)) < 1e-6

    def test_single_atom_oracle(self):
        grid = TimeGrid(40.0, 0.1)
        lind = p0_lindblad(single_atom(), NoiseParams(gamma_phi=0.1), grid)
        ref = bloch_oracle(OMEGA, 0.1, grid.times)
        assert np.max(np.abs(lind.values - ref)) < 1e-6
        late = lind.values[grid.times > 30]
        assert abs(late.mean() - 0.5) < 0.02
        assert lind.meta["trace_drift"] < 1e-6
        assert lind.meta["min_eigenvalue"] > -1e-8

    def test_envelope_decays(self):
        grid = TimeGrid(30.0, 0.1)
        lind = p0_lindblad(single_atom(), NoiseParams(gamma_phi=0.1), grid).values
        dev = np.abs(lind - 0.5)
        per = int(round(1.0 / grid.dt))  # one Rabi period is 1 us
        peaks = [dev[i:i + per].max() for i in range(0, len(dev) - per, per)]
        assert all(b <= a + 1e-12 for a, b in zip(peaks, peaks[1:]))
        assert peaks[-1] < 0.6 * peaks[0]

    def test_cycle_contrast_scale(self):
        grid = TimeGrid(20.0, 0.1)
        h = pxp("cycle_4")
        lind = p0_lindblad(h, NoiseParams(gamma_phi=0.1), grid).values
        ideal = p0_closed_form(diagonalize(h), grid).values
        centers, ratios = [], []
        for a in range(0, 20, 5):
            m = (grid.times >= a) & (grid.times < a + 5)
            centers.append(a + 2.5)
            ratios.append(np.std(lind[m]) / np.std(ideal[m]))
        slope = np.polyfit(centers, np.log(ratios), 1)[0]
        assert 5.0 < -1.0 / slope < 30.0

    def test_substep_convergence(self):
        h = pxp("cycle_4")
        noise = NoiseParams(gamma_phi=0.1)
        a = p0_lindblad(h, noise, GRID, method="rk4")
        b = p0_lindblad(h, noise, GRID, method="rk4", substep=a.meta["substep"] / 2)
        assert np.max(np.abs(a.values - b.values)) < 1e-6

    def test_expm_route_agrees(self):
        h = pxp("diamond")
        noise = NoiseParams(gamma_phi=0.3)
        a = p0_lindblad(h, noise, GRID, method="rk4").values
        b = p0_lindblad(h, noise, GRID, method="expm").values
        assert np.max(np.abs(a - b)) < 1e-6

    def test_substep_guard(self):
        with pytest.raises(ParameterError):
            p0_lindblad(pxp("cycle_4"), NoiseParams(), GRID, method="rk4", substep=0.01)

    def test_instability_reported(self, monkeypatch):
        import rydspec.dynamics as dyn
        monkeypatch.setattr(dyn, "TRACE_TOL", -1.0)
        with pytest.raises(NumericalError) as info:
            p0_lindblad(pxp("complete_4"), NoiseParams(), GRID)
        assert "trace_drift" in info.value.diagnostics


class TestSpam:
    def test_identity(self):
        noise = NoiseParams(eps_prep=0, eps_det_0to1=0, eps_det_1to0=0)
        p = p0_closed_form(diagonalize(pxp("cycle_4")), GRID)
        np.testing.assert_array_equal(apply_spam(p, noise).values, np.clip(p.values, 0, 1))

    def test_false_positive_product(self):
        noise = NoiseParams(eps_prep=0, eps_det_0to1=0.01, eps_det_1to0=0)
        a, b = spam_coefficients(4, noise)
        assert a + b == pytest.approx(0.99**4)
        assert a + b == pytest.approx(0.9606, abs=1e-4)

    def test_preparation_loss(self):
        noise = NoiseParams(eps_prep=0.05, eps_det_0to1=0, eps_det_1to0=0)
        p = p0_closed_form(diagonalize(pxp("cycle_4")), GRID)
        assert apply_spam(p, noise).values[0] < 1.0

    @given(st.floats(0, 1), st.floats(0, 0.2), st.floats(0, 0.2), st.floats(0, 0.2), st.integers(1, 6))
    def test_stays_in_unit_interval(self, p, e1, e2, e3, n):
        a, b = spam_coefficients(n, NoiseParams(eps_prep=e1, eps_det_0to1=e2, eps_det_1to0=e3))
        assert 0.0 <= a * p + b <= 1.0


class TestShots:
    def _half(self):
        return TimeSeries(TimeGrid(100.0, 0.1), np.full(1001, 0.5), "ideal", 4)

    def test_binomial_spread(self):
        s = sample_shots(self._half(), NoiseParams(n_shots=150, rng_seed=3))
        assert np.std(s.values) == pytest.approx(math.sqrt(0.25 / 150), rel=0.1)

    def test_large_n(self):
        s = sample_shots(self._half(), NoiseParams(n_shots=10**6, rng_seed=1))
        assert np.max(np.abs(s.values - 0.5)) < 0.005

    def test_deterministic(self):
        a = sample_shots(self._half(), NoiseParams(rng_seed=9), stream_id=2)
        b = sample_shots(self._half(), NoiseParams(rng_seed=9), stream_id=2)
        c = sample_shots(self._half(), NoiseParams(rng_seed=9), stream_id=3)
        np.testing.assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_noise_validation(self):
        with pytest.raises(ParameterError):
            NoiseParams(eps_prep=1.5)
        with pytest.raises(ParameterError):
            NoiseParams(n_shots=0)
        with pytest.raises(ParameterError):
            NoiseParams(gamma_phi=-0.1)

"""Tests for evolution, receiver windows and arrival-profile metrics."""

import math

import numpy as np
import pytest
from scipy.integrate import quad, simpson

from pstlab.core.exceptions import InvalidInput, NoArrivalPlateau
from pstlab.models.schemas import ChainSpec, ReceiverWindow, TRexParams
from pstlab.services.chain_core import eigensystem
from pstlab.services.dynamics import (
    amplitude_column,
    arrival_width,
    expected_fidelity,
    plateau_width,
    profile_exponent,
    qubit_fidelity,
    trace,
    transfer_amplitude,
    windowed_transfer,
)
from pstlab.services.synthesis import (
    chain_from_spectrum,
    krawtchouk,
    special_r2_spectrum,
    trex_chain,
)


class TestEvolution:
    def test_two_site_amplitude(self):
        chain = ChainSpec.from_couplings([1.0])
        assert transfer_amplitude(chain, 0.7) == pytest.approx(-1j * math.sin(0.7), abs=1e-12)

    @pytest.mark.parametrize("t", [0.3, 1.1, 2.0, 4.4])
    def test_krawtchouk_closed_form(self, t):
        chain = krawtchouk(5, 0.7)
        fe = abs(transfer_amplitude(chain, t)) ** 2
        assert fe == pytest.approx(math.sin(0.7 * t) ** 8, abs=1e-12)

    def test_trex_arrives_at_pi(self, trex149):
        assert abs(transfer_amplitude(trex149, math.pi)) == pytest.approx(1.0, abs=1e-7)

    def test_unitarity(self):
        rng = np.random.default_rng(11)
        chain = ChainSpec.from_couplings(rng.uniform(0.1, 3.0, 9))
        for t in rng.uniform(0, 20, 10):
            column = amplitude_column(chain, float(t), source=int(rng.integers(1, 11)))
            assert np.linalg.norm(column) == pytest.approx(1.0, abs=1e-10)

    def test_site_out_of_range(self, kraw8):
        with pytest.raises(InvalidInput):
            transfer_amplitude(kraw8, 1.0, source=9)

    @pytest.mark.parametrize(
        ("chain", "t0"),
        [
            (krawtchouk(8), math.pi / 2),
            (trex_chain(TRexParams(n=8, r=4, gamma=13)), math.pi),
            (trex_chain(TRexParams(n=9, r=5, gamma=11)), math.pi),
        ],
        ids=["krawtchouk", "trex-even", "trex-odd"],
    )
    def test_arrival_symmetric_about_t0(self, chain, t0):
        offsets = np.linspace(0.0, t0, 41)
        system = eigensystem(chain)
        late = np.abs(system.amplitude(t0 + offsets)) ** 2
        early = np.abs(system.amplitude(t0 - offsets)) ** 2
        np.testing.assert_allclose(late, early, rtol=0, atol=1e-7)


class TestTrace:
    def test_krawtchouk_profile(self, kraw8):
        result = trace(kraw8, math.pi, 2001)
        assert np.max(np.abs(result.fe - np.sin(result.times) ** 14)) < 1e-10
        assert result.fe == pytest.approx(np.abs(result.amplitudes) ** 2, abs=1e-15)
        assert result.f[0] == pytest.approx(0.5)

    def test_trex_follows_sin_six(self, trex149):
        result = trace(trex149, 2 * math.pi, 4001)
        assert np.max(np.abs(result.fe - np.sin(result.times / 2) ** 6)) < 0.01

    def test_profile_exponents(self, kraw8, trex149):
        assert profile_exponent(trace(kraw8, math.pi / 2, 2001), math.pi / 2) == pytest.approx(
            7.0, abs=0.01
        )
        assert profile_exponent(trace(trex149, math.pi, 4001), math.pi) == pytest.approx(
            3.0, abs=0.05
        )

    def test_r2_ladder_exponent(self):
        chain = chain_from_spectrum(special_r2_spectrum(8, 401))
        t0 = math.pi / 2
        assert profile_exponent(trace(chain, t0, 20001), t0) == pytest.approx(1.0, abs=0.1)

    def test_too_few_fit_samples(self, kraw8):
        with pytest.raises(InvalidInput):
            profile_exponent(trace(kraw8, math.pi / 2, 5), math.pi / 2)

    def test_invalid_grid(self, kraw8):
        with pytest.raises(InvalidInput):
            trace(kraw8, 1.0, 1)


class TestQubitFidelity:
    @pytest.mark.parametrize(
        ("fe", "expected"), [(1.0, 1.0), (0.0, 0.5), (0.25, 1 / 3 + 2.25 / 6)]
    )
    def test_values(self, fe, expected):
        assert qubit_fidelity(fe) == pytest.approx(expected)

    def test_out_of_range(self):
        with pytest.raises(InvalidInput):
            qubit_fidelity(-0.1)


class TestWindows:
    @pytest.mark.parametrize(
        "window",
        [
            ReceiverWindow.box(0.3),
            ReceiverWindow.gaussian(0.07),
            ReceiverWindow(
                kind="tabulated",
                times=(-0.2, -0.1, 0.0, 0.1, 0.2),
                density_table=(0.0, 1.0, 3.0, 1.0, 0.0),
            ),
        ],
    )
    def test_density_normalized(self, window):
        lo, hi = window.support()
        total, _ = quad(lambda x: float(window.density(x)), lo, hi, points=[-0.1, 0.0, 0.1])
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_delta_window_on_pst_chain(self, kraw8):
        window = ReceiverWindow.delta()
        assert windowed_transfer(kraw8, window, math.pi / 2) == pytest.approx(1.0, abs=1e-9)
        assert expected_fidelity(kraw8, window, math.pi / 2) == pytest.approx(1.0, abs=1e-9)

    def test_box_window_against_fixed_grid(self, kraw8):
        t0, width = math.pi / 2, 0.4
        ts = np.linspace(t0 - width / 2, t0 + width / 2, 20001)
        amps = np.abs(eigensystem(kraw8).amplitude(ts))
        oracle = simpson(amps / width, x=ts)
        value = windowed_transfer(kraw8, ReceiverWindow.box(width), t0)
        assert value == pytest.approx(oracle, abs=1e-7)

    def test_gaussian_expected_fidelity_against_fixed_grid(self, kraw8):
        t0, sigma = math.pi / 2, 0.05
        ts = np.linspace(t0 - 5 * sigma, t0 + 5 * sigma, 20001)
        density = np.exp(-0.5 * ((ts - t0) / sigma) ** 2)
        density /= simpson(density, x=ts)
        mod = np.abs(eigensystem(kraw8).amplitude(ts))
        oracle = 0.5 + simpson(density * (2 * mod + mod**2), x=ts) / 6
        value = expected_fidelity(kraw8, ReceiverWindow.gaussian(sigma), t0)
        assert value == pytest.approx(oracle, abs=1e-7)

    @pytest.mark.parametrize(
        ("chain", "t0"),
        [
            (krawtchouk(8), math.pi / 2),
            (trex_chain(TRexParams(n=8, r=4, gamma=13)), math.pi),
            (trex_chain(TRexParams(n=9, r=5, gamma=11)), math.pi),
        ],
        ids=["krawtchouk", "trex-even", "trex-odd"],
    )
    @pytest.mark.parametrize("loss", [1e-6, 1e-4])
    def test_small_jitter_loss_is_quadratic(self, chain, t0, loss):
        sigma = math.sqrt(2 * loss) / chain.j1
        value = windowed_transfer(chain, ReceiverWindow.gaussian(sigma), t0)
        assert 1.0 - value == pytest.approx(loss, rel=0.1)

    def test_window_reaching_before_zero_keeps_full_mass(self):
        chain = ChainSpec.from_couplings([1.0])
        t0, sigma = math.pi / 2, 0.6
        ts = np.linspace(t0 - 5 * sigma, t0 + 5 * sigma, 60001)
        assert ts[0] < 0
        density = np.exp(-0.5 * ((ts - t0) / sigma) ** 2)
        density /= simpson(density, x=ts)
        mod = np.abs(np.sin(ts))
        window = ReceiverWindow.gaussian(sigma)
        assert windowed_transfer(chain, window, t0) == pytest.approx(
            simpson(density * mod, x=ts), abs=1e-6
        )
        assert expected_fidelity(chain, window, t0) == pytest.approx(
            0.5 + simpson(density * (2 * mod + mod**2), x=ts) / 6, abs=1e-6
        )


class TestArrivalWidth:
    def test_closed_form_profile(self):
        t0, m, epsilon = 1.3, 3, 0.1

        def fe(ts):
            return np.sin(np.pi * np.asarray(ts) / (2 * t0)) ** (2 * m)

        expected = (4 * t0 / math.pi) * (math.pi / 2 - math.asin((1 - epsilon) ** (1 / (2 * m))))
        assert plateau_width(fe, t0, epsilon, 1e-3) == pytest.approx(expected, abs=1e-8)

    def test_clear_out_widens_the_peak(self, trex149):
        kraw = krawtchouk(8, 0.5)
        assert arrival_width(trex149, math.pi, 0.1) > arrival_width(kraw, math.pi, 0.1)

    def test_vanishing_threshold(self, kraw8):
        assert arrival_width(kraw8, math.pi / 2, 1e-8) < 1e-3

    def test_no_plateau(self):
        chain = ChainSpec.from_couplings([1.0] * 4)
        with pytest.raises(NoArrivalPlateau):
            arrival_width(chain, 1.0, 0.1)

    def test_epsilon_range(self, kraw8):
        with pytest.raises(InvalidInput):
            arrival_width(kraw8, math.pi / 2, 1.5)

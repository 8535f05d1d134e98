"""Tests for chain synthesis: Krawtchouk, inverse eigenvalue solve, T-Rex, pruning."""

import math

import numpy as np
import pytest
from structlog.testing import capture_logs

from pstlab.core.exceptions import (
    IllConditionedSpectrum,
    LanczosBreakdown,
    ParityError,
    SpectrumError,
)
from pstlab.models.schemas import ChainSpec, Spectrum, TRexParams
from pstlab.services.chain_core import (
    antisymmetric_trace,
    eigensystem,
    is_mirror_symmetric,
    pst_check,
)
from pstlab.services.synthesis import (
    chain_from_spectral_data,
    chain_from_spectrum,
    end_weights_from_spectrum,
    krawtchouk,
    prune_extremal_pair,
    rescale_to_unit_max,
    snap_gamma,
    special_r2_spectrum,
    trex_approximation,
    trex_central_coupling,
    trex_chain,
    trex_spectrum,
)


class TestKrawtchouk:
    def test_four_sites(self):
        chain = krawtchouk(4)
        assert chain.couplings == pytest.approx((math.sqrt(3), 2.0, math.sqrt(3)))
        assert chain.provenance["t0"] == pytest.approx(math.pi / 2)

    def test_two_sites(self):
        assert krawtchouk(2).couplings == (1.0,)

    def test_central_couplings_largest(self):
        couplings = np.asarray(krawtchouk(11, 0.3).couplings)
        half = couplings[: couplings.size // 2]
        assert np.all(np.diff(half) > 0)


class TestEndWeights:
    def test_two_levels(self):
        weights = end_weights_from_spectrum(Spectrum(values=(-1.0, 1.0)))
        assert weights.weights == pytest.approx((0.5, 0.5))

    def test_krawtchouk_binomial_weights(self):
        weights = end_weights_from_spectrum(Spectrum(values=(-3.0, -1.0, 1.0, 3.0)))
        assert weights.weights == pytest.approx((1 / 8, 3 / 8, 3 / 8, 1 / 8), rel=1e-12)

    def test_trex_outer_weights_are_tiny(self):
        spectrum = trex_spectrum(TRexParams(n=8, r=4, gamma=149))
        w = end_weights_from_spectrum(spectrum).as_array()
        assert w[-1] / w[4] < 1e-5

    def test_near_degenerate_spectrum(self):
        with pytest.raises(IllConditionedSpectrum):
            end_weights_from_spectrum(Spectrum(values=(0.0, 1e-13, 1.0)))

    @pytest.mark.parametrize("gamma", [17, 29, 149])
    def test_clear_out_weight_hierarchy(self, gamma):
        w = end_weights_from_spectrum(trex_spectrum(TRexParams(n=8, r=4, gamma=gamma))).as_array()
        central = w[2:6].max()
        outer = np.concatenate([w[:2], w[6:]]).max()
        assert outer <= 10 * gamma ** (1 - 4) * central


class TestInverseSolve:
    def test_two_levels(self):
        chain = chain_from_spectrum(Spectrum(values=(-1.0, 1.0)))
        assert chain.couplings == pytest.approx((1.0,), rel=1e-14)

    def test_general_spectral_data(self):
        values, weights = (0.0, 1.0, 3.0), (0.2, 0.5, 0.3)
        chain = chain_from_spectral_data(values, weights)
        system = eigensystem(chain)
        assert system.values == pytest.approx(values, abs=1e-12)
        assert system.weights == pytest.approx(weights, rel=1e-10)

    def test_repeated_eigenvalue_breaks_down(self):
        with pytest.raises(LanczosBreakdown) as info:
            chain_from_spectral_data((0.0, 0.0, 1.0), (1 / 3, 1 / 3, 1 / 3))
        assert info.value.step == 2

    def test_asymmetric_spectrum_rejected(self):
        with pytest.raises(SpectrumError):
            chain_from_spectrum(Spectrum(values=(-1.0, 0.0, 2.0)))

    def test_trex_golden_chain(self, trex149):
        expected = (0.8729, 10.54, 128.0, 150.0, 128.0, 10.54, 0.8729)
        assert trex149.couplings == pytest.approx(expected, rel=1e-3)
        assert trex149.couplings[3] == pytest.approx(150.0, rel=1e-9)
        assert trex149.is_field_free
        assert is_mirror_symmetric(trex149)

    def test_r2_golden_chain(self):
        chain = rescale_to_unit_max(chain_from_spectrum(special_r2_spectrum(8, 51)))
        expected = (0.086, 0.866, 0.712, 1.0, 0.712, 0.866, 0.086)
        assert chain.couplings == pytest.approx(expected, abs=5e-4)


class TestTRexSpectrum:
    def test_even_r(self):
        spectrum = trex_spectrum(TRexParams(n=8, r=4, gamma=149))
        assert spectrum.values == pytest.approx(
            (-223.5, -74.5, -1.5, -0.5, 0.5, 1.5, 74.5, 223.5)
        )
        assert spectrum.transfer_time == pytest.approx(math.pi)

    def test_odd_r(self):
        spectrum = trex_spectrum(TRexParams(n=9, r=5, gamma=11))
        assert spectrum.values == pytest.approx((-18, -7, -2, -1, 0, 1, 2, 7, 18))

    def test_no_clear_out_is_krawtchouk(self):
        spectrum = trex_spectrum(TRexParams(n=4, r=4, gamma=7))
        assert spectrum.values == pytest.approx((-1.5, -0.5, 0.5, 1.5))

    def test_base_gap_scales_spectrum(self):
        spectrum = trex_spectrum(TRexParams(n=9, r=5, gamma=11, base_gap=2.0))
        assert spectrum.values[-1] == pytest.approx(36.0)
        assert spectrum.transfer_time == pytest.approx(math.pi / 2)

    def test_r2_variant_halves_the_ladder(self):
        spectrum = trex_spectrum(TRexParams(n=4, r=2, gamma=3, variant="r2"))
        assert spectrum.values == pytest.approx((-3.5, -0.5, 0.5, 3.5))
        assert spectrum.base_gap == pytest.approx(1.0)

    @pytest.mark.parametrize(
        ("n", "r", "gamma", "error"),
        [
            (8, 5, 11, ParityError),
            (4, 6, 7, ParityError),
            (8, 4, 1, SpectrumError),
            (9, 2, 3, ParityError),
        ],
    )
    def test_invalid_parameters(self, n, r, gamma, error):
        with pytest.raises(error):
            TRexParams(n=n, r=r, gamma=gamma)


class TestGammaSnapping:
    @pytest.mark.parametrize(
        ("r", "gamma", "expected"),
        [(4, 150, 149), (4, 149, 149), (4, 151, 153), (5, 12, 13), (5, 10.2, 11), (2, 6, 7)],
    )
    def test_snap(self, r, gamma, expected):
        assert snap_gamma(r, gamma) == expected

    def test_params_record_the_requested_value(self):
        with capture_logs() as logs:
            params = TRexParams(n=8, r=4, gamma=150)
        assert params.gamma == 149
        assert params.snapped_from == 150
        assert any(entry["event"] == "synthesis.gamma_snapped" for entry in logs)

    def test_snap_warning_in_provenance(self):
        chain = trex_chain(TRexParams(n=8, r=4, gamma=150))
        assert "snap_warning" in chain.provenance
        assert chain.couplings[3] == pytest.approx(150.0, rel=1e-9)


class TestTRexChain:
    def test_rescaled_to_unit_max(self):
        chain = trex_chain(TRexParams(n=8, r=4, gamma=149), rescale_to_unit_max_coupling=True)
        assert chain.max_coupling == pytest.approx(1.0, rel=1e-12)
        assert chain.provenance["t0"] == pytest.approx(150 * math.pi, rel=1e-9)
        assert chain.provenance["rescaled"] is True
        assert chain.j1 * chain.provenance["t0"] == pytest.approx(0.8729 * math.pi, rel=1e-3)

    def test_unique_when_nothing_is_cleared_out(self):
        chain = trex_chain(TRexParams(n=6, r=6, gamma=7))
        assert chain.couplings == pytest.approx(krawtchouk(6, 0.5).couplings, rel=1e-10)

    @pytest.mark.parametrize(
        ("n", "r", "gamma"), [(8, 4, 149), (10, 4, 21), (10, 6, 27), (12, 2, 7), (8, 2, 11)]
    )
    def test_central_coupling_formula(self, n, r, gamma):
        params = TRexParams(n=n, r=r, gamma=gamma)
        chain = trex_chain(params)
        assert trex_central_coupling(params) == pytest.approx(chain.couplings[n // 2 - 1], rel=1e-9)
        assert 2 * trex_central_coupling(params) == pytest.approx(
            antisymmetric_trace(chain, 1), rel=1e-9
        )

    def test_central_coupling_known_values(self):
        assert trex_central_coupling(TRexParams(n=8, r=4, gamma=149)) == 150.0
        assert trex_central_coupling(TRexParams(n=10, r=4, gamma=21)) == 30.5

    def test_exact_chain_transfers(self):
        for params in (TRexParams(n=10, r=4, gamma=21), TRexParams(n=11, r=5, gamma=13)):
            verdict = pst_check(trex_chain(params))
            assert verdict.is_pst
            assert verdict.arrival_modulus == pytest.approx(1.0, abs=1e-7)


class TestApproximation:
    def test_golden_approximation(self):
        chain = trex_approximation(TRexParams(n=8, r=4, gamma=149))
        expected = (0.8660, 10.57, 129.0, 149.0, 129.0, 10.57, 0.8660)
        assert chain.couplings == pytest.approx(expected, rel=1e-3)
        assert chain.couplings[1] == pytest.approx(math.sqrt(3 * 149) / 2, rel=1e-12)

    def test_central_block_inverse_corner(self):
        gamma = 149.0
        a, b = (gamma / 2) * math.sqrt(3), gamma
        block = np.array([[0, a, 0, 0], [a, 0, b, 0], [0, b, 0, a], [0, 0, a, 0]])
        assert np.linalg.inv(block)[0, 3] == pytest.approx(-4 / (3 * gamma), rel=1e-12)

    def test_odd_r_undefined(self):
        with pytest.raises(ParityError):
            trex_approximation(TRexParams(n=9, r=5, gamma=11))

    def test_no_clear_out_is_krawtchouk(self):
        chain = trex_approximation(TRexParams(n=6, r=6, gamma=7))
        assert chain.couplings == pytest.approx(krawtchouk(6, 0.5).couplings)


class TestPrune:
    def test_krawtchouk_four(self):
        pruned, predicted = prune_extremal_pair(krawtchouk(4))
        assert pruned.couplings == pytest.approx((1.0,), rel=1e-12)
        assert predicted == pytest.approx(1.0)

    def test_krawtchouk_five(self):
        pruned, predicted = prune_extremal_pair(krawtchouk(5))
        assert pruned.couplings == pytest.approx((math.sqrt(2), math.sqrt(2)), rel=1e-12)
        assert predicted == pytest.approx(2.0)

    def test_random_spectra(self, pst_spectra):
        for spectrum in pst_spectra[:100]:
            chain = chain_from_spectrum(spectrum)
            pruned, predicted = prune_extremal_pair(chain)
            assert pruned.n == chain.n - 2
            assert pruned.j1**2 == pytest.approx(predicted, rel=1e-9)
            assert pruned.j1 < chain.j1
            arrival = abs(complex(eigensystem(pruned).amplitude(math.pi)))
            assert arrival == pytest.approx(1.0, abs=1e-7)

    def test_non_pst_chain_rejected(self):
        with pytest.raises(SpectrumError):
            prune_extremal_pair(ChainSpec.from_couplings([1.0, 1.0, 1.0, 1.0]))

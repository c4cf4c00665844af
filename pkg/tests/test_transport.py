import math

import numpy as np
import pytest
from scipy import integrate

from biofet_mc.constants import STATIONARY_FRACTION
from biofet_mc.errors import InvalidParameterError, InvalidTimeError
from biofet_mc.transport import (
    ChannelSpec,
    LigandSpec,
    concentration,
    dispersion_factor,
    effective_diffusion,
    passage_duration,
    propagation_delay,
    received_concentration,
)

CH = ChannelSpec(h_ch=3e-6, l_ch=15e-6, u=10e-6, d=1e-3)
LIG = LigandSpec(D0=2e-10, k1=2e-19, k_neg1=20.0, N_e=3)


class TestSpecs:
    @pytest.mark.parametrize("field", ["h_ch", "l_ch", "u", "d"])
    def test_channel_rejects_nonpositive(self, field):
        kw = dict(h_ch=3e-6, l_ch=15e-6, u=1e-5, d=1e-3)
        kw[field] = 0.0
        with pytest.raises(InvalidParameterError):
            ChannelSpec(**kw)

    def test_ligand_rejects_negative_electrons(self):
        with pytest.raises(InvalidParameterError):
            LigandSpec(D0=2e-10, k1=2e-19, k_neg1=20.0, N_e=-1)

    def test_dissociation_constant(self):
        assert LIG.K_D == pytest.approx(1e20, rel=1e-12)

    def test_area_and_flow(self):
        assert CH.area == pytest.approx(4.5e-11)
        assert CH.flow_rate == pytest.approx(4.5e-16)


class TestEffectiveDiffusion:
    def test_no_flow_gives_intrinsic(self):
        assert dispersion_factor(0.0, 3e-6, 15e-6, 2e-10) == 1.0

    def test_defaults(self):
        D = effective_diffusion(CH, LIG)
        assert D == pytest.approx(2.0012e-10, rel=2e-5)
        assert D / LIG.D0 - 1 == pytest.approx(6.0e-4, rel=0.01)

    def test_dispersion_scales_with_u_squared(self):
        base = dispersion_factor(1e-5, 3e-6, 15e-6, 2e-10) - 1
        fast = dispersion_factor(1e-4, 3e-6, 15e-6, 2e-10) - 1
        assert fast / base == pytest.approx(100.0, rel=1e-12)

    def test_never_below_intrinsic(self):
        for u in (1e-7, 1e-5, 1e-3):
            ch = ChannelSpec(3e-6, 15e-6, u, 1e-3)
            assert effective_diffusion(ch, LIG) >= LIG.D0


class TestConcentration:
    def test_zero_release(self):
        assert concentration(CH, LIG, 0, np.linspace(0, 2e-3, 5), 50.0).tolist() == [0.0] * 5

    def test_rejects_nonpositive_time(self):
        with pytest.raises(InvalidTimeError):
            concentration(CH, LIG, 5e5, 1e-3, 0.0)

    def test_peak_follows_flow(self):
        t = 60.0
        x = np.linspace(0, 1.5e-3, 30001)
        c = concentration(CH, LIG, 5e5, x, t)
        assert x[np.argmax(c)] == pytest.approx(CH.u * t, abs=1e-7)

    def test_default_receiver_value(self):
        assert concentration(CH, LIG, 5e5, 1e-3, 100.0) == pytest.approx(2.2157e19, rel=1e-4)

    def test_equals_received_concentration_exactly(self):
        assert concentration(CH, LIG, 5e5, CH.d, propagation_delay(CH)) == received_concentration(CH, LIG, 5e5)

    def test_integrates_to_surface_density(self):
        t = 100.0
        D = effective_diffusion(CH, LIG)
        half = 12 * math.sqrt(2 * D * t)
        total, _ = integrate.quad(lambda x: concentration(CH, LIG, 5e5, x, t), CH.u * t - half, CH.u * t + half,
                                  epsabs=0, epsrel=1e-10)
        assert total == pytest.approx(5e5 / CH.area, rel=1e-6)


class TestTiming:
    @pytest.mark.parametrize("d,expected", [(1e-4, 10.0), (1e-3, 100.0), (1e-2, 1000.0)])
    def test_propagation_delay(self, d, expected):
        assert propagation_delay(ChannelSpec(3e-6, 15e-6, 1e-5, d)) == pytest.approx(expected)

    def test_stationarity_constant(self):
        assert -math.log(STATIONARY_FRACTION) == pytest.approx(0.01005, rel=1e-3)

    def test_passage_duration_defaults(self):
        assert passage_duration(CH, LIG) == pytest.approx(5.673, rel=1e-3)

    def test_passage_scaling_at_fixed_diffusion(self):
        # D0 large enough that the flow term is negligible, so D stays fixed
        lig = LigandSpec(D0=1e-6, k1=2e-19, k_neg1=20.0, N_e=3)
        slow = ChannelSpec(3e-6, 15e-6, 5e-6, 1e-3)
        ratio = passage_duration(slow, lig) / passage_duration(CH, lig)
        assert ratio == pytest.approx(2 * math.sqrt(2), rel=1e-9)


class TestReceivedConcentration:
    def test_defaults(self):
        assert received_concentration(CH, LIG, 5e5) == pytest.approx(2.2157e19, rel=1e-4)

    def test_linear_in_release(self):
        assert received_concentration(CH, LIG, 1e6) == pytest.approx(2 * received_concentration(CH, LIG, 5e5), rel=1e-14)

    def test_inverse_sqrt_distance(self):
        far = ChannelSpec(3e-6, 15e-6, 1e-5, 4e-3)
        assert received_concentration(far, LIG, 5e5) == pytest.approx(received_concentration(CH, LIG, 5e5) / 2, rel=1e-12)

    def test_monotone_in_u_and_D0(self):
        fast = ChannelSpec(3e-6, 15e-6, 2e-5, 1e-3)
        assert received_concentration(fast, LIG, 5e5) > received_concentration(CH, LIG, 5e5)
        slow_lig = LigandSpec(D0=4e-10, k1=2e-19, k_neg1=20.0, N_e=3)
        assert received_concentration(CH, slow_lig, 5e5) < received_concentration(CH, LIG, 5e5)

import math

import numpy as np
import pytest

from biofet_mc.binding import (
    ReceiverGeometry,
    binding_noise_psd,
    check_equilibrium,
    correlation_time,
    effective_rates,
    equilibrium_stats,
    peclet_shear,
    transport_rate,
)
from biofet_mc.errors import InvalidParameterError
from biofet_mc.transport import ChannelSpec, LigandSpec, received_concentration

CH = ChannelSpec(h_ch=3e-6, l_ch=15e-6, u=10e-6, d=1e-3)
LIG = LigandSpec(D0=2e-10, k1=2e-19, k_neg1=20.0, N_e=3)
GEO = ReceiverGeometry(r_R=10e-9, l_R=15e-6, rho_SR=4e16, l_SR=2e-9)


def _geo(r_R=10e-9):
    return ReceiverGeometry(r_R=r_R, l_R=15e-6, rho_SR=4e16, l_SR=2e-9)


class TestGeometry:
    def test_receptor_count(self):
        assert GEO.n_receptors == pytest.approx(18849.56, rel=1e-6)
        assert GEO.w_R == pytest.approx(math.pi * 1e-8)

    def test_rejects_fewer_than_one_receptor(self):
        with pytest.raises(InvalidParameterError):
            ReceiverGeometry(r_R=1e-9, l_R=1e-6, rho_SR=1e10, l_SR=2e-9)


class TestTransportRate:
    def test_defaults(self):
        assert peclet_shear(CH, LIG, GEO) == pytest.approx(9.86e-5, rel=2e-3)
        assert transport_rate(CH, LIG, GEO) == pytest.approx(1.3368e-15, rel=1e-3)

    def test_branches_agree_near_unity(self):
        # Tune u so that P_s crosses 1 and compare the two sides.
        def rate_at(ps_target):
            ps_default = peclet_shear(CH, LIG, GEO)
            # P_s is proportional to u only through Q while D barely changes; iterate once
            u = CH.u * ps_target / ps_default
            ch = ChannelSpec(CH.h_ch, CH.l_ch, u, CH.d)
            u *= ps_target / peclet_shear(ch, LIG, GEO)
            ch = ChannelSpec(CH.h_ch, CH.l_ch, u, CH.d)
            return transport_rate(ch, LIG, GEO)

        lo, hi = rate_at(1 - 1e-9), rate_at(1 + 1e-9)
        assert abs(hi - lo) / lo < 0.05

    def test_increasing_in_radius(self):
        rates = [transport_rate(CH, LIG, _geo(r)) for r in np.geomspace(5e-9, 50e-9, 12)]
        assert np.all(np.diff(rates) > 0)


class TestEffectiveRates:
    def test_reaction_limited_limit(self):
        k1s, km1s = effective_rates(LIG, 1e6 * LIG.k1)
        assert k1s == pytest.approx(LIG.k1, rel=1e-5)
        assert km1s == pytest.approx(LIG.k_neg1, rel=1e-5)

    @pytest.mark.parametrize("k_T", [1e-20, 1e-18, 1.3e-15, math.inf])
    def test_dissociation_constant_preserved(self, k_T):
        k1s, km1s = effective_rates(LIG, k_T)
        assert km1s / k1s == pytest.approx(LIG.K_D, rel=1e-12)

    def test_defaults(self):
        k1s, _ = effective_rates(LIG, transport_rate(CH, LIG, GEO))
        assert k1s / LIG.k1 == pytest.approx(1 - 1.5e-4, abs=2e-6)


class TestEquilibriumStats:
    def test_half_occupancy(self):
        s = equilibrium_stats(LIG.K_D, LIG, GEO, 1e-15)
        assert s.p_on == pytest.approx(0.5)
        assert s.var_NB == pytest.approx(GEO.n_receptors / 4)

    def test_zero_concentration(self):
        k_T = 1e-15
        s = equilibrium_stats(0.0, LIG, GEO, k_T)
        assert (s.p_on, s.mu_NB, s.var_NB) == (0.0, 0.0, 0.0)
        expected = 1 / LIG.k_neg1 + LIG.k1 * GEO.n_receptors / (k_T * LIG.k_neg1)
        assert s.tau_B == pytest.approx(expected, rel=1e-12)

    def test_defaults(self):
        rho = received_concentration(CH, LIG, 5e5)
        s = equilibrium_stats(rho, LIG, GEO, transport_rate(CH, LIG, GEO))
        assert s.p_on == pytest.approx(0.18138, rel=1e-4)
        assert s.tau_B == pytest.approx(0.13543, rel=1e-4)
        assert s.var_NB == pytest.approx(s.p_on * (1 - s.p_on) * GEO.n_receptors, rel=1e-14)

    def test_reaction_limited_correlation_time(self):
        rho = 3e19
        assert correlation_time(rho, LIG, GEO.n_receptors, math.inf) == pytest.approx(1 / (LIG.k1 * rho + LIG.k_neg1))

    def test_rejects_negative_concentration(self):
        with pytest.raises(InvalidParameterError):
            equilibrium_stats(-1.0, LIG, GEO, 1e-15)

    def test_variance_bound(self):
        for rho in np.geomspace(1e17, 1e23, 25):
            s = equilibrium_stats(rho, LIG, GEO, 1e-15)
            assert s.var_NB <= GEO.n_receptors / 4 * (1 + 1e-15)


class TestBindingPsd:
    STATS = equilibrium_stats(2.2e19, LIG, GEO, 1.3e-15)

    def test_dc_value(self):
        assert binding_noise_psd(self.STATS, 0.0) == pytest.approx(2 * self.STATS.var_NB * self.STATS.tau_B)

    def test_half_power_frequency(self):
        f_c = 1 / (2 * math.pi * self.STATS.tau_B)
        assert binding_noise_psd(self.STATS, f_c) == pytest.approx(binding_noise_psd(self.STATS, 0.0) / 2)

    def test_even_and_decreasing(self):
        f = np.geomspace(1e-3, 1e3, 50)
        s = binding_noise_psd(self.STATS, f)
        assert np.array_equal(s, binding_noise_psd(self.STATS, -f))
        assert np.all(np.diff(s) < 0) and np.all(s > 0)


class TestEquilibriumCheck:
    def test_defaults_valid(self):
        rep = check_equilibrium(CH, LIG, GEO, 5e5)
        assert rep.valid
        assert rep.tau_p == pytest.approx(5.673, rel=1e-3)
        assert rep.tau_B == pytest.approx(0.13543, rel=1e-4)

    def test_fast_short_channel_invalid(self):
        ch = ChannelSpec(3e-6, 15e-6, 1e-3, 1e-4)
        assert not check_equilibrium(ch, LIG, GEO, 5e5).valid

    def test_fast_receptor_valid(self):
        lig = LigandSpec(D0=2e-10, k1=2e-19, k_neg1=200.0, N_e=3)
        rep = check_equilibrium(CH, lig, GEO, 5e5)
        assert rep.valid and rep.tau_B < check_equilibrium(CH, LIG, GEO, 5e5).tau_B

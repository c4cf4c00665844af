"""FET output stage: transconductance, mean signal current, noise PSDs, variance and SNR.

Oxide capacitance enters the FET and flicker formulas per unit area
(``c_ox = eps_OX / t_OX``); the capacitive divider in :mod:`transducer`
uses the total oxide capacitance.

The 1/f spectrum is flat below ``f_L`` and integrated up to ``f_H``. Without
the upper cutoff the flicker variance diverges logarithmically, so every
variance and SNR in this package depends on ``f_H`` (default 1e5 Hz).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binding import (
    BindingStats,
    EquilibriumReport,
    ReceiverGeometry,
    binding_noise_psd,
    check_equilibrium,
    equilibrium_stats,
    transport_rate,
)
from .constants import K_B, Q_E
from .errors import BiasRegionError, InvalidBandError, InvalidParameterError
from .transducer import MediumSpec, TransducerSpec, TransducerState, capacitances
from .transport import ChannelSpec, LigandSpec, effective_diffusion, received_concentration

SNR_FLOOR_DB = -400.0
FLICKER_MODELS = ("standard", "as-printed")


@dataclass(frozen=True)
class FetBias:
    """Bias point and 1/f noise parameters of the p-type nanowire FET (SI).

    N_ot is the oxide trap density in eV^-1 m^-3 and is used numerically in
    the flatband-voltage PSD together with k_B*T in joules.
    """

    V_SD: float
    V_SG: float
    V_TH: float
    mu_p: float
    N_ot: float
    lambda_tun: float
    alpha_s: float
    f_L: float
    f_H: float
    flicker_model: str = "standard"

    def __post_init__(self):
        for name in ("mu_p", "N_ot", "lambda_tun", "alpha_s"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise InvalidParameterError(f"bias.{name} must be positive, got {value!r}")
        if not self.V_SD >= 0:
            raise InvalidParameterError(f"bias.V_SD must be >= 0, got {self.V_SD!r}")
        if not 0 < self.f_L < self.f_H:
            raise InvalidBandError(f"need 0 < f_L < f_H, got f_L={self.f_L!r}, f_H={self.f_H!r}")
        if self.flicker_model not in FLICKER_MODELS:
            raise InvalidParameterError(
                f"bias.flicker_model must be one of {FLICKER_MODELS}, got {self.flicker_model!r}"
            )

    @property
    def overdrive(self) -> float:
        return self.V_SG - abs(self.V_TH)


def check_linear_region(bias: FetBias) -> None:
    if not bias.V_SG > abs(bias.V_TH):
        raise BiasRegionError(f"V_SG={bias.V_SG} must exceed |V_TH|={abs(bias.V_TH)}")
    if not bias.V_SD <= bias.overdrive:
        raise BiasRegionError(f"V_SD={bias.V_SD} exceeds V_SG - |V_TH| = {bias.overdrive}")


def oxide_capacitance_per_area(td: TransducerSpec) -> float:
    return td.eps_OX / td.t_OX


def channel_current(geo: ReceiverGeometry, td: TransducerSpec, bias: FetBias) -> float:
    """Linear-region source-drain bias current (A)."""
    check_linear_region(bias)
    k = bias.mu_p * oxide_capacitance_per_area(td) * geo.w_R / geo.l_R
    return k * (bias.overdrive * bias.V_SD - bias.V_SD**2 / 2.0)


def transconductance(geo: ReceiverGeometry, td: TransducerSpec, bias: FetBias) -> float:
    check_linear_region(bias)
    return bias.mu_p * oxide_capacitance_per_area(td) * geo.w_R / geo.l_R * bias.V_SD


def _scattering_factor(td: TransducerSpec, bias: FetBias) -> float:
    return (1.0 + bias.alpha_s * bias.mu_p * oxide_capacitance_per_area(td) * bias.overdrive) ** 2


def flatband_psd_amplitude(geo: ReceiverGeometry, td: TransducerSpec, bias: FetBias, T: float) -> float:
    """Coefficient A of the flatband-voltage PSD S_VFB(f) = A / |f| (V^2)."""
    c_ox = oxide_capacitance_per_area(td)
    amp = bias.lambda_tun * K_B * T * Q_E**2 * bias.N_ot / (geo.area * c_ox**2)
    if bias.flicker_model == "as-printed":
        amp *= transconductance(geo, td, bias) ** 2
    return amp


def flicker_amplitude(geo: ReceiverGeometry, td: TransducerSpec, bias: FetBias, T: float) -> float:
    """Coefficient A_F of the output 1/f PSD, S_IF(f) = A_F / |f| for |f| >= f_L (A^2)."""
    g = transconductance(geo, td, bias)
    return flatband_psd_amplitude(geo, td, bias, T) * g**2 * _scattering_factor(td, bias)


def flicker_psd(geo: ReceiverGeometry, td: TransducerSpec, bias: FetBias, f, *, T: float):
    """Output-referred 1/f current PSD (A^2/Hz), white below f_L."""
    f = np.abs(np.asarray(f, dtype=float))
    out = flicker_amplitude(geo, td, bias, T) / np.maximum(f, bias.f_L)
    return float(out) if out.ndim == 0 else out


def binding_current_psd(stats: BindingStats, state: TransducerState, g_fet: float, f):
    return binding_noise_psd(stats, f) * state.psi_L**2 * g_fet**2


def flicker_variance(A_F: float, f_L: float, f_H: float) -> float:
    """Integral of the flat-then-1/f spectrum over [-f_H, f_H]."""
    if not f_H > f_L:
        raise InvalidBandError(f"f_H={f_H!r} must exceed f_L={f_L!r}")
    return 2.0 * (A_F + A_F * math.log(f_H / f_L))


def binding_variance(stats: BindingStats, state: TransducerState, g_fet: float, f_H: float) -> float:
    """Integral of the Lorentzian binding-current PSD over [-f_H, f_H]."""
    scale = state.psi_L**2 * g_fet**2
    return stats.var_NB * scale * (2.0 / math.pi) * math.atan(2.0 * math.pi * f_H * stats.tau_B)


def output_noise_psd(stats, state, geo, td, bias, f, *, T: float):
    """Total output-referred current noise PSD S_IB + S_IF (A^2/Hz)."""
    g = transconductance(geo, td, bias)
    return binding_current_psd(stats, state, g, f) + flicker_psd(geo, td, bias, f, T=T)


def output_variance(stats, state, geo, td, bias, *, T: float, f_H: float | None = None) -> float:
    """Closed-form output current variance over [-f_H, f_H] (A^2)."""
    f_H = bias.f_H if f_H is None else f_H
    if not f_H > bias.f_L:
        raise InvalidBandError(f"f_H={f_H!r} must exceed f_L={bias.f_L!r}")
    g = transconductance(geo, td, bias)
    A_F = flicker_amplitude(geo, td, bias, T)
    return binding_variance(stats, state, g, f_H) + flicker_variance(A_F, bias.f_L, f_H)


def snr_db(mu_I: float, var_I: float) -> float:
    if not var_I > 0:
        raise InvalidParameterError(f"output variance must be positive, got {var_I!r}")
    if mu_I == 0:
        return SNR_FLOOR_DB
    return max(10.0 * math.log10(mu_I**2 / var_I), SNR_FLOOR_DB)


@dataclass(frozen=True)
class SymbolLink:
    """Per-symbol statistics at the receiver output."""

    N_m: float
    rho_R: float
    stats: BindingStats
    mu_I: float
    var_I_binding: float
    var_I_flicker: float
    snr_db: float
    equilibrium: EquilibriumReport

    @property
    def var_I(self) -> float:
        return self.var_I_binding + self.var_I_flicker

    @property
    def sigma_I(self) -> float:
        return math.sqrt(self.var_I)


@dataclass(frozen=True)
class LinkModel:
    """Physical chain from transmitter release to FET output current."""

    channel: ChannelSpec
    ligand: LigandSpec
    geometry: ReceiverGeometry
    medium: MediumSpec
    transducer: TransducerSpec
    bias: FetBias

    def state(self) -> TransducerState:
        return capacitances(self.geometry, self.medium, self.transducer, self.ligand.N_e)

    def g_fet(self) -> float:
        return transconductance(self.geometry, self.transducer, self.bias)

    def k_T(self) -> float:
        return transport_rate(self.channel, self.ligand, self.geometry)

    def binding_stats(self, N_m: float) -> BindingStats:
        rho_R = received_concentration(self.channel, self.ligand, N_m)
        return equilibrium_stats(rho_R, self.ligand, self.geometry, self.k_T())

    def mean_current(self, N_m: float) -> float:
        """Closed-form mean output current for a release of N_m ligands (A)."""
        if N_m < 0:
            raise InvalidParameterError(f"N_m must be >= 0, got {N_m!r}")
        if N_m == 0:
            return 0.0
        ch, lig = self.channel, self.ligand
        D = effective_diffusion(ch, lig)
        attenuation = lig.K_D * ch.area / N_m * math.sqrt(4.0 * math.pi * D * ch.d / ch.u)
        return self.g_fet() * self.state().psi_L * self.geometry.n_receptors / (1.0 + attenuation)

    def flicker_amplitude(self) -> float:
        return flicker_amplitude(self.geometry, self.transducer, self.bias, self.medium.T)

    def flicker_psd(self, f):
        return flicker_psd(self.geometry, self.transducer, self.bias, f, T=self.medium.T)

    def binding_psd(self, N_m: float, f):
        return binding_current_psd(self.binding_stats(N_m), self.state(), self.g_fet(), f)

    def output_noise_psd(self, N_m: float, f):
        return output_noise_psd(
            self.binding_stats(N_m), self.state(), self.geometry, self.transducer, self.bias, f, T=self.medium.T
        )

    def variance_parts(self, N_m: float, f_H: float | None = None) -> tuple[float, float]:
        """(binding, flicker) contributions to the output variance over [-f_H, f_H]."""
        f_H = self.bias.f_H if f_H is None else f_H
        if not f_H > self.bias.f_L:
            raise InvalidBandError(f"f_H={f_H!r} must exceed f_L={self.bias.f_L!r}")
        g = self.g_fet()
        var_b = binding_variance(self.binding_stats(N_m), self.state(), g, f_H)
        var_f = flicker_variance(self.flicker_amplitude(), self.bias.f_L, f_H)
        return var_b, var_f

    def output_variance(self, N_m: float, f_H: float | None = None) -> float:
        return output_variance(
            self.binding_stats(N_m), self.state(), self.geometry, self.transducer, self.bias,
            T=self.medium.T, f_H=f_H,
        )

    def symbol(self, N_m: float) -> SymbolLink:
        stats = self.binding_stats(N_m)
        state = self.state()
        g = self.g_fet()
        mu_I = g * state.psi_L * stats.mu_NB
        var_b = binding_variance(stats, state, g, self.bias.f_H)
        var_f = flicker_variance(self.flicker_amplitude(), self.bias.f_L, self.bias.f_H)
        return SymbolLink(
            N_m=N_m,
            rho_R=stats.rho_R,
            stats=stats,
            mu_I=mu_I,
            var_I_binding=var_b,
            var_I_flicker=var_f,
            snr_db=snr_db(mu_I, var_b + var_f),
            equilibrium=check_equilibrium(self.channel, self.ligand, self.geometry, N_m),
        )

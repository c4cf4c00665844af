"""Ligand-receptor binding at the nanowire surface and the resulting binding noise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .transport import (
    ChannelSpec,
    LigandSpec,
    effective_diffusion,
    passage_duration,
    received_concentration,
)

# Receptors are taken to be equilibrated after this many correlation times.
EQUILIBRIUM_SETTLING = 5.0


@dataclass(frozen=True)
class ReceiverGeometry:
    """Nanowire and receptor layer geometry (SI).

    r_R: nanowire radius (m); l_R: nanowire length (m), normally equal to the
    channel width; rho_SR: receptor areal density (m^-2); l_SR: receptor
    length (m).
    """

    r_R: float
    l_R: float
    rho_SR: float
    l_SR: float

    def __post_init__(self):
        for name in ("r_R", "l_R", "rho_SR", "l_SR"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise InvalidParameterError(f"geometry.{name} must be positive, got {value!r}")
        if self.n_receptors < 1:
            raise InvalidParameterError(
                f"geometry yields {self.n_receptors:.3g} receptors; at least one is required"
            )

    @property
    def w_R(self) -> float:
        """Effective width of the exposed hemicylinder, pi * r_R (m)."""
        return math.pi * self.r_R

    @property
    def area(self) -> float:
        return self.w_R * self.l_R

    @property
    def n_receptors(self) -> float:
        return self.area * self.rho_SR


@dataclass(frozen=True)
class BindingStats:
    """Equilibrium statistics of the bound-receptor count for one symbol."""

    rho_R: float
    p_on: float
    mu_NB: float
    var_NB: float
    tau_B: float
    k_T: float
    k1_eff: float
    kneg1_eff: float
    n_receptors: float


@dataclass(frozen=True)
class EquilibriumReport:
    tau_p: float
    tau_B: float
    valid: bool

    @property
    def margin(self) -> float:
        """tau_p / (5 tau_B); values >= 1 satisfy the constraint."""
        return self.tau_p / (EQUILIBRIUM_SETTLING * self.tau_B)


def peclet_shear(ch: ChannelSpec, lig: LigandSpec, geo: ReceiverGeometry) -> float:
    """Shear Peclet number P_s = 6 Q w_R^2 / (D l_ch h_ch^2)."""
    D = effective_diffusion(ch, lig)
    return 6.0 * ch.flow_rate * geo.w_R**2 / (D * ch.l_ch * ch.h_ch**2)


def transport_rate(ch: ChannelSpec, lig: LigandSpec, geo: ReceiverGeometry) -> float:
    """Convective-diffusive transport rate k_T (m^3/s) to the hemicylindrical sensor.

    P_s == 1 falls into the high-Peclet branch.
    """
    P_s = peclet_shear(ch, lig, geo)
    D = effective_diffusion(ch, lig)
    if P_s >= 1.0:
        shape = 0.8075 * P_s ** (1 / 3) + 0.7058 * P_s ** (-1 / 6) - 0.1984 * P_s ** (-1 / 3)
    else:
        denom = 4.885 - math.log(P_s)
        shape = 2.0 * math.pi / denom * (1.0 - 0.09266 * P_s / denom)
    return shape * D * geo.l_R


def effective_rates(lig: LigandSpec, k_T: float) -> tuple[float, float]:
    """Transport-limited binding and unbinding rates (k1*, k_-1*)."""
    if not k_T > 0:
        raise InvalidParameterError(f"k_T must be positive, got {k_T!r}")
    if math.isinf(k_T):
        return lig.k1, lig.k_neg1
    share = k_T / (k_T + lig.k1)
    return share * lig.k1, share * lig.k_neg1


def correlation_time(rho_R: float, lig: LigandSpec, n_receptors: float, k_T: float) -> float:
    """Relaxation time of the transport-influenced binding reaction (s)."""
    on = lig.k1 * rho_R + lig.k_neg1
    tau = 1.0 / on
    if not math.isinf(k_T):
        tau += lig.k1 * (lig.k1 * rho_R + n_receptors * lig.k_neg1) / (k_T * on**2)
    return tau


def equilibrium_stats(rho_R: float, lig: LigandSpec, geo: ReceiverGeometry, k_T: float) -> BindingStats:
    if not rho_R >= 0:
        raise InvalidParameterError(f"rho_R must be >= 0, got {rho_R!r}")
    n_r = geo.n_receptors
    p_on = rho_R / (rho_R + lig.K_D)
    k1_eff, kneg1_eff = effective_rates(lig, k_T)
    return BindingStats(
        rho_R=rho_R,
        p_on=p_on,
        mu_NB=p_on * n_r,
        var_NB=p_on * (1.0 - p_on) * n_r,
        tau_B=correlation_time(rho_R, lig, n_r, k_T),
        k_T=k_T,
        k1_eff=k1_eff,
        kneg1_eff=kneg1_eff,
        n_receptors=n_r,
    )


def binding_noise_psd(stats: BindingStats, f):
    """Two-sided Lorentzian PSD of the bound-receptor count (1/Hz)."""
    f = np.asarray(f, dtype=float)
    tau = stats.tau_B
    out = stats.var_NB * 2.0 * tau / (1.0 + (2.0 * math.pi * f * tau) ** 2)
    return float(out) if out.ndim == 0 else out


def check_equilibrium(ch: ChannelSpec, lig: LigandSpec, geo: ReceiverGeometry, N_m: float) -> EquilibriumReport:
    """Compare the stationary passage window with the binding relaxation time."""
    rho_R = received_concentration(ch, lig, N_m)
    k_T = transport_rate(ch, lig, geo)
    tau_B = correlation_time(rho_R, lig, geo.n_receptors, k_T)
    tau_p = passage_duration(ch, lig)
    return EquilibriumReport(tau_p=tau_p, tau_B=tau_B, valid=tau_p >= EQUILIBRIUM_SETTLING * tau_B)

"""Advection-diffusion transport of a ligand plug along a microfluidic channel.

The channel is modeled in one dimension along the flow axis with the
concentration averaged over the rectangular cross-section. The transmitter
sits at x = 0 and the receiver center at x = d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import STATIONARY_FRACTION
from .errors import InvalidParameterError, InvalidTimeError


def _require_positive(owner, **values):
    for name, value in values.items():
        if not value > 0 or not math.isfinite(value):
            raise InvalidParameterError(f"{owner}.{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class ChannelSpec:
    """Channel geometry and flow, all SI.

    h_ch, l_ch are the cross-section height and width (m), u the mean
    flow velocity (m/s) and d the transmitter-receiver distance (m).
    """

    h_ch: float
    l_ch: float
    u: float
    d: float

    def __post_init__(self):
        _require_positive("channel", h_ch=self.h_ch, l_ch=self.l_ch, u=self.u, d=self.d)

    @property
    def area(self) -> float:
        return self.h_ch * self.l_ch

    @property
    def flow_rate(self) -> float:
        """Volumetric flow rate Q = u * A (m^3/s)."""
        return self.u * self.area


@dataclass(frozen=True)
class LigandSpec:
    """Ligand transport and binding constants.

    D0 is the intrinsic diffusivity (m^2/s), k1 the association rate
    (m^3/s), k_neg1 the dissociation rate (1/s) and N_e the number of free
    electrons carried per ligand.
    """

    D0: float
    k1: float
    k_neg1: float
    N_e: float

    def __post_init__(self):
        _require_positive("ligand", D0=self.D0, k1=self.k1, k_neg1=self.k_neg1)
        if not self.N_e >= 0:
            raise InvalidParameterError(f"ligand.N_e must be >= 0, got {self.N_e!r}")

    @property
    def K_D(self) -> float:
        """Dissociation constant k_neg1 / k1 (m^-3)."""
        return self.k_neg1 / self.k1


def dispersion_factor(u: float, h: float, l: float, D0: float) -> float:
    """Taylor-Aris enhancement D / D0 for an h x l rectangular cross-section.

    Takes raw numbers so the no-flow limit u = 0 can be evaluated.
    """
    return 1.0 + 8.5 * u**2 * h**2 * l**2 / (210.0 * D0**2 * (h**2 + 2.4 * h * l + l**2))


def effective_diffusion(ch: ChannelSpec, lig: LigandSpec) -> float:
    """Effective axial diffusivity including Taylor-Aris dispersion (m^2/s)."""
    return dispersion_factor(ch.u, ch.h_ch, ch.l_ch, lig.D0) * lig.D0


def concentration(ch: ChannelSpec, lig: LigandSpec, N_m, x, t):
    """Cross-section-averaged concentration (m^-3) of a plug of N_m ligands.

    Accepts scalars or arrays for ``x`` and ``t``; ``t`` must be strictly
    positive.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)):
        raise InvalidTimeError(f"concentration requires t > 0, got {t!r}")
    if N_m < 0:
        raise InvalidParameterError(f"N_m must be >= 0, got {N_m!r}")
    D = effective_diffusion(ch, lig)
    x_arr = np.asarray(x, dtype=float)
    out = N_m / (ch.area * np.sqrt(4.0 * math.pi * D * t_arr)) * np.exp(
        -((x_arr - ch.u * t_arr) ** 2) / (4.0 * D * t_arr)
    )
    return float(out) if out.ndim == 0 else out


def propagation_delay(ch: ChannelSpec) -> float:
    """Arrival time of the concentration peak at the receiver, d / u (s)."""
    return ch.d / ch.u


def passage_duration(ch: ChannelSpec, lig: LigandSpec) -> float:
    """Time the concentration stays within 1% of its peak at the receiver (s)."""
    D = effective_diffusion(ch, lig)
    return 4.0 / ch.u * math.sqrt(-math.log(STATIONARY_FRACTION) * D * propagation_delay(ch))


def received_concentration(ch: ChannelSpec, lig: LigandSpec, N_m: float) -> float:
    """Peak concentration at the receiver, held fixed during sampling (m^-3)."""
    if N_m < 0:
        raise InvalidParameterError(f"N_m must be >= 0, got {N_m!r}")
    D = effective_diffusion(ch, lig)
    t_D = propagation_delay(ch)
    return N_m / (ch.area * math.sqrt(4.0 * math.pi * D * t_D))

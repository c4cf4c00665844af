"""Charge-to-potential transduction at the oxide surface of the nanowire."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .binding import ReceiverGeometry
from .constants import K_B, N_A, Q_E
from .errors import InvalidParameterError


@dataclass(frozen=True)
class MediumSpec:
    """Electrolyte: ionic concentration c_ion (mol/m^3), permittivity eps_M (F/m), temperature T (K)."""

    c_ion: float
    eps_M: float
    T: float

    def __post_init__(self):
        for name in ("c_ion", "eps_M", "T"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise InvalidParameterError(f"medium.{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class TransducerSpec:
    """Oxide and semiconductor properties: permittivities (F/m), oxide thickness (m), hole density (m^-3)."""

    eps_OX: float
    eps_Si: float
    t_OX: float
    p: float

    def __post_init__(self):
        for name in ("eps_OX", "eps_Si", "t_OX", "p"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise InvalidParameterError(f"transducer.{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class TransducerState:
    lambda_D: float
    q_eff: float
    C_DL: float
    C_OX_total: float
    C_NW: float
    C_eq: float
    psi_L: float


def debye_length(med: MediumSpec) -> float:
    return math.sqrt(med.eps_M * K_B * med.T / (2.0 * N_A * Q_E**2 * med.c_ion))


def effective_charge(med: MediumSpec, l_SR: float, N_e: float = 1.0) -> float:
    """Screened charge seen at the surface from N_e electrons at distance l_SR (C).

    With the default N_e = 1 this is the per-electron effective charge.
    """
    if l_SR < 0:
        raise InvalidParameterError(f"l_SR must be >= 0, got {l_SR!r}")
    return Q_E * math.exp(-l_SR / debye_length(med)) * N_e


def nanowire_screening_length(td: TransducerSpec, T: float) -> float:
    """Thickness of the carrier double layer inside the nanowire (m)."""
    return math.sqrt(td.eps_Si * K_B * T / (td.p * Q_E**2))


def capacitances(geo: ReceiverGeometry, med: MediumSpec, td: TransducerSpec, N_e: float) -> TransducerState:
    """Diffusion-layer, oxide and nanowire capacitances plus the single-ligand potential."""
    area = geo.area
    lam_D = debye_length(med)
    c_dl = med.eps_M / lam_D * area
    c_ox = td.eps_OX / td.t_OX * area
    c_nw = td.eps_Si / nanowire_screening_length(td, med.T) * area
    c_eq = 1.0 / (1.0 / c_ox + 1.0 / c_nw) + c_dl
    q_eff = effective_charge(med, geo.l_SR)
    return TransducerState(
        lambda_D=lam_D,
        q_eff=q_eff,
        C_DL=c_dl,
        C_OX_total=c_ox,
        C_NW=c_nw,
        C_eq=c_eq,
        psi_L=q_eff * N_e / c_eq,
    )


def surface_potential(n_bound, state: TransducerState):
    """Surface potential (V) produced by ``n_bound`` bound ligands."""
    if n_bound < 0:
        raise InvalidParameterError(f"n_bound must be >= 0, got {n_bound!r}")
    return n_bound * state.psi_L

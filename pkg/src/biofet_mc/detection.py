"""M-ary concentration shift keying: constellations, ML thresholds and symbol error probability."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import erfc, log_ndtr, logsumexp

from .errors import (
    BiasRegionError,
    DegenerateConstellationError,
    EquilibriumError,
    InvalidParameterError,
    ThresholdOrderingError,
)
from .fet_output import LinkModel, SymbolLink

# Relative variance gap below which adjacent symbols are treated as equal-variance.
EQUAL_VARIANCE_RTOL = 1e-12

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class Constellation:
    M: int
    K: float
    s: float
    levels: tuple[int, ...]


def _is_integral(x) -> bool:
    return float(x).is_integer()


def build_constellation(M: int, K: float, s: float = 1.0) -> Constellation:
    """Release counts N_m = ceil((m+1)^s * K / M^s) for m = 0..M-1."""
    if int(M) != M or M < 2:
        raise InvalidParameterError(f"M must be an integer >= 2, got {M!r}")
    M = int(M)
    if not K >= M:
        raise InvalidParameterError(f"K must be >= M, got K={K!r}, M={M}")
    if not s > 0:
        raise InvalidParameterError(f"s must be positive, got {s!r}")
    if _is_integral(s) and _is_integral(K):
        # exact rational arithmetic avoids ceil() of values like 250000.00000000003
        base = Fraction(int(K), M ** int(s))
        levels = tuple(math.ceil((m + 1) ** int(s) * base) for m in range(M))
    else:
        levels = []
        for m in range(M):
            v = (m + 1) ** s * (K / M**s)
            levels.append(math.ceil(v * (1.0 - 4 * np.finfo(float).eps)))
        levels = tuple(levels)
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise DegenerateConstellationError(f"levels not strictly increasing: {levels}")
    return Constellation(M=M, K=K, s=s, levels=levels)


def pair_threshold(mu0, s0, mu1, s1, eps_rel=EQUAL_VARIANCE_RTOL):
    """Equal-density crossing of N(mu0, s0^2) and N(mu1, s1^2) on the "+" branch.

    No ordering check; see decision_thresholds for the guarded version.
    """
    if abs(s1**2 - s0**2) < eps_rel * max(s0, s1) ** 2:
        return 0.5 * (mu0 + mu1)
    delta = mu1 - mu0
    log_ratio = math.log(s1 / s0)
    root = math.sqrt(delta**2 + 2.0 * (s1**2 - s0**2) * log_ratio)
    # Rationalized form of the "+" root; no cancellation as s1 -> s0.
    return mu0 + s0 * (delta**2 + 2.0 * s1**2 * log_ratio) / (s1 * root + s0 * delta)


def decision_thresholds(mus: Sequence[float], sigmas: Sequence[float], eps_rel: float = EQUAL_VARIANCE_RTOL) -> list[float]:
    """ML thresholds between adjacent Gaussian symbol distributions.

    Raises ThresholdOrderingError if a threshold is not strictly between the
    adjacent means. Pairs with identical mean and variance get the midpoint.
    """
    if len(mus) != len(sigmas) or len(mus) < 2:
        raise InvalidParameterError("need matching mean/sigma sequences of length >= 2")
    if any(not s > 0 for s in sigmas):
        raise InvalidParameterError(f"all sigmas must be positive, got {list(sigmas)}")
    out = []
    for m in range(1, len(mus)):
        mu0, mu1, s0, s1 = mus[m - 1], mus[m], sigmas[m - 1], sigmas[m]
        if mu0 == mu1 and s0 == s1:
            out.append(mu0)
            continue
        if not mu1 > mu0:
            raise ThresholdOrderingError(f"means not increasing at symbol {m}: {mu0!r} >= {mu1!r}")
        lam = pair_threshold(mu0, s0, mu1, s1, eps_rel)
        if not mu0 < lam < mu1:
            raise ThresholdOrderingError(
                f"threshold {lam!r} for symbols {m - 1},{m} outside ({mu0!r}, {mu1!r})"
            )
        out.append(lam)
    return out


def _error_terms(mus, sigmas, thresholds):
    """Arguments z of the 2(M-1) erfc terms in the SEP sum."""
    M = len(mus)
    sq2 = math.sqrt(2.0)
    z = [(thresholds[0] - mus[0]) / (sigmas[0] * sq2)]
    for m in range(1, M - 1):
        z.append((mus[m] - thresholds[m - 1]) / (sigmas[m] * sq2))
        z.append((thresholds[m] - mus[m]) / (sigmas[m] * sq2))
    z.append((mus[-1] - thresholds[-1]) / (sigmas[-1] * sq2))
    return np.asarray(z)


def symbol_error_probability(mus, sigmas, thresholds=None) -> float:
    """SEP with equal priors; may underflow to 0 (see log10_symbol_error_probability)."""
    if thresholds is None:
        thresholds = decision_thresholds(mus, sigmas)
    z = _error_terms(mus, sigmas, thresholds)
    p = float(np.sum(erfc(z))) / (2 * len(mus))
    return min(max(p, 0.0), 1.0)


def log10_symbol_error_probability(mus, sigmas, thresholds=None) -> float:
    """log10 of the SEP, finite far below the double-precision underflow limit."""
    if thresholds is None:
        thresholds = decision_thresholds(mus, sigmas)
    z = _error_terms(mus, sigmas, thresholds)
    # ln erfc(z) = ln 2 + ln Phi(-z sqrt 2)
    log_terms = math.log(2.0) + log_ndtr(-z * math.sqrt(2.0))
    ln_p = float(logsumexp(log_terms)) - math.log(2 * len(mus))
    return min(ln_p, 0.0) / _LN10


@dataclass(frozen=True)
class DecisionModel:
    mus: tuple[float, ...]
    sigmas: tuple[float, ...]
    thresholds: tuple[float, ...]

    @classmethod
    def from_stats(cls, mus, sigmas, eps_rel: float = EQUAL_VARIANCE_RTOL) -> "DecisionModel":
        th = decision_thresholds(mus, sigmas, eps_rel)
        return cls(tuple(mus), tuple(sigmas), tuple(th))

    def sep(self) -> float:
        return symbol_error_probability(self.mus, self.sigmas, self.thresholds)

    def log10_sep(self) -> float:
        return log10_symbol_error_probability(self.mus, self.sigmas, self.thresholds)

    def classify(self, z):
        """Map output samples to symbol indices."""
        return np.searchsorted(np.asarray(self.thresholds), z, side="right")


@dataclass(frozen=True)
class SepResult:
    sep: float
    log10_sep: float
    links: tuple[SymbolLink, ...]
    decision: DecisionModel


def symbol_links(link: LinkModel, constellation: Constellation, require_equilibrium: bool = True) -> list[SymbolLink]:
    out = []
    for m, N_m in enumerate(constellation.levels):
        try:
            sl = link.symbol(N_m)
        except BiasRegionError as exc:
            raise BiasRegionError(f"symbol {m}: {exc}") from exc
        if require_equilibrium and not sl.equilibrium.valid:
            eq = sl.equilibrium
            raise EquilibriumError(
                f"symbol {m} (N_m={N_m}): tau_p={eq.tau_p:.4g} s < 5 tau_B={5 * eq.tau_B:.4g} s",
                symbol=m,
            )
        out.append(sl)
    return out


def end_to_end_sep(link: LinkModel, constellation: Constellation) -> SepResult:
    """Symbol error probability of the full physical link for a constellation."""
    links = symbol_links(link, constellation)
    decision = DecisionModel.from_stats([s.mu_I for s in links], [s.sigma_I for s in links])
    return SepResult(sep=decision.sep(), log10_sep=decision.log10_sep(), links=tuple(links), decision=decision)

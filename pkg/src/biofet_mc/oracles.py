"""Independent numerical checks of the closed-form link model.

Each oracle recomputes a quantity along a different route (time integration,
random sampling, adaptive quadrature, root finding) so that agreement with
the analytic path is meaningful.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .binding import (
    BindingStats,
    ReceiverGeometry,
    binding_noise_psd,
    correlation_time,
    effective_rates,
    transport_rate,
)
from .detection import Constellation, end_to_end_sep
from .errors import InsufficientTrialsError, InvalidBandError, InvalidParameterError, OracleFailure
from .fet_output import LinkModel
from .transport import ChannelSpec, LigandSpec, concentration, propagation_delay, received_concentration

MIN_MC_TRIALS = 10_000
MIN_EXPECTED_ERRORS = 100
MC_MODEL_SLACK = 0.10
MAX_ODE_STEPS = 50_000_000


@dataclass(frozen=True)
class OracleReport:
    name: str
    analytic: float
    numeric: float
    rel_err: float
    tolerance: float
    passed: bool
    budget: int
    seed: int | None = None
    note: str = ""

    @classmethod
    def compare(cls, name, analytic, numeric, tolerance, budget, seed=None, note=""):
        scale = abs(analytic) if analytic != 0 else 1.0
        rel = float(abs(numeric - analytic) / scale)
        tolerance = float(tolerance)
        return cls(name, float(analytic), float(numeric), rel, tolerance, rel <= tolerance, int(budget), seed, note)

    def to_dict(self) -> dict:
        return asdict(self)


# --------------------------------------------------------------------------- ODE


@dataclass(frozen=True)
class OdeResult:
    t: np.ndarray
    mu: np.ndarray
    t_sample: float
    mu_at_sample: float
    step: float

    @property
    def n_steps(self) -> int:
        return len(self.t) - 1


def _rk4_linear(a, b, mu0, h):
    """Fixed-step RK4 for d mu/dt = a(t) - b(t) mu.

    ``a`` and ``b`` are sampled on the half-step grid (length 2n+1).
    """
    n = (len(a) - 1) // 2
    mu = np.empty(n + 1)
    mu[0] = y = mu0
    half = 0.5 * h
    for i in range(n):
        a0, am, a1 = a[2 * i], a[2 * i + 1], a[2 * i + 2]
        b0, bm, b1 = b[2 * i], b[2 * i + 1], b[2 * i + 2]
        k1 = a0 - b0 * y
        k2 = am - bm * (y + half * k1)
        k3 = am - bm * (y + half * k2)
        k4 = a1 - b1 * (y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        mu[i + 1] = y
    return mu


def binding_ode_solve(
    ch: ChannelSpec,
    lig: LigandSpec,
    geo: ReceiverGeometry,
    N_m: float,
    t_end: float | None = None,
    *,
    rho: Callable | None = None,
    k_T: float | None = None,
    t_sample: float | None = None,
    steps_per_tau: int = 100,
    mu0: float = 0.0,
) -> OdeResult:
    """Integrate the mean bound-receptor count under a time-varying concentration.

    By default the concentration is the travelling plug evaluated at the
    receiver (zero at t = 0) and the solution is sampled at the propagation
    delay. ``rho`` replaces the concentration with any vectorized callable
    of time; ``k_T`` overrides the transport rate (``math.inf`` gives the
    reaction-limited case).
    """
    t_D = propagation_delay(ch)
    t_sample = t_D if t_sample is None else t_sample
    t_end = t_sample if t_end is None else t_end
    if t_end < t_sample:
        raise InvalidParameterError(f"t_end={t_end!r} must be >= sampling time {t_sample!r}")
    k_T = transport_rate(ch, lig, geo) if k_T is None else k_T
    k1s, km1s = effective_rates(lig, k_T)
    n_r = geo.n_receptors

    if rho is None:
        def rho(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t)
            pos = t > 0
            out[pos] = concentration(ch, lig, N_m, ch.d, t[pos])
            return out

    probe = rho(np.linspace(0.0, t_end, 4097))
    rho_peak = float(np.max(probe))
    tau = min(
        correlation_time(received_concentration(ch, lig, N_m), lig, n_r, k_T),
        1.0 / (k1s * rho_peak + km1s),
    )
    h_max = tau / steps_per_tau
    n1 = max(1, math.ceil(t_sample / h_max))
    h = t_sample / n1
    n2 = math.ceil((t_end - t_sample) / h - 1e-9) if t_end > t_sample else 0
    n = n1 + n2
    if n > MAX_ODE_STEPS or h <= 0 or not math.isfinite(h):
        raise OracleFailure(f"ODE step {h!r} too small: {n} steps needed")

    grid = np.arange(2 * n + 1) * (h / 2.0)
    r = np.asarray(rho(grid), dtype=float)
    a = k1s * r * n_r
    b = k1s * r + km1s
    mu = _rk4_linear(a, b, mu0, h)
    t = grid[::2]
    return OdeResult(t=t, mu=mu, t_sample=t_sample, mu_at_sample=float(mu[n1]), step=h)


# --------------------------------------------------------------------------- RNG


def _substreams(seed: int, workers: int):
    ss = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(workers)]


def _split(n: int, workers: int) -> list[int]:
    base, extra = divmod(n, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _bound_counts(rng, n_receptors: float, p_on, size):
    """Bound-receptor samples for a possibly non-integer receptor count.

    floor(N_R) receptors are drawn binomially and the fractional remainder
    counts as one extra receptor present with that probability, which keeps
    the mean exactly p_on * N_R.
    """
    whole = math.floor(n_receptors)
    frac = n_receptors - whole
    x = rng.binomial(whole, p_on, size=size)
    if frac > 0:
        x = x + (rng.random(size) < frac * np.asarray(p_on))
    return x


def _run_parallel(fn, jobs, workers):
    if workers == 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


# --------------------------------------------------------------------------- MC binding


@dataclass(frozen=True)
class MCBindingResult:
    mean: float
    var: float
    se_mean: float
    se_var: float
    n_trials: int
    n_receptors: float
    seed: int


def mc_binding(stats: BindingStats, n_trials: int, seed: int, workers: int = 1) -> MCBindingResult:
    """Sample equilibrium bound-receptor counts from Binomial(N_R, p_on)."""
    if n_trials < MIN_MC_TRIALS:
        raise InvalidParameterError(f"n_trials must be >= {MIN_MC_TRIALS}, got {n_trials}")
    n_r = stats.n_receptors
    shift = n_r * stats.p_on

    def chunk(rng, n):
        x = _bound_counts(rng, n_r, stats.p_on, n) - shift
        return n, x.sum(), (x**2).sum(), (x**3).sum(), (x**4).sum()

    parts = _run_parallel(chunk, list(zip(_substreams(seed, workers), _split(n_trials, workers))), workers)
    n, s1, s2, s3, s4 = (sum(p[i] for p in parts) for i in range(5))
    m1 = s1 / n
    var = s2 / n - m1**2
    # fourth central moment from raw shifted moments
    m4 = s4 / n - 4 * m1 * s3 / n + 6 * m1**2 * s2 / n - 3 * m1**4
    var_unbiased = var * n / (n - 1)
    return MCBindingResult(
        mean=m1 + shift,
        var=var_unbiased,
        se_mean=math.sqrt(var / n),
        se_var=math.sqrt(max(m4 - var**2, 0.0) / n),
        n_trials=n,
        n_receptors=n_r,
        seed=seed,
    )


# --------------------------------------------------------------------------- MC SEP


@dataclass(frozen=True)
class MCSepResult:
    sep: float
    se: float
    analytic: float
    n_errors: int
    n_trials: int
    confusion: np.ndarray = field(repr=False)
    seed: int = 0

    @property
    def far_error_fraction(self) -> float:
        """Share of errors that skip over at least one symbol."""
        if self.n_errors == 0:
            return 0.0
        M = self.confusion.shape[0]
        idx = np.arange(M)
        far = np.abs(idx[:, None] - idx[None, :]) >= 2
        return float(self.confusion[far].sum()) / self.n_errors

    def within_tolerance(self, n_se: float = 3.0, slack: float = MC_MODEL_SLACK) -> bool:
        return abs(self.sep - self.analytic) <= n_se * self.se + slack * self.analytic


def mc_sep(
    link: LinkModel,
    constellation: Constellation,
    n_trials: int,
    seed: int,
    workers: int = 1,
    min_expected_errors: float = MIN_EXPECTED_ERRORS,
    chunk_size: int = 1_000_000,
) -> MCSepResult:
    """Empirical SEP with binomial binding and a white Gaussian 1/f surrogate.

    The surrogate has the same total variance as the band-limited flicker
    noise. Thresholds are the analytic ML thresholds.
    """
    analytic = end_to_end_sep(link, constellation)
    expected = n_trials * analytic.sep
    if expected < min_expected_errors:
        raise InsufficientTrialsError(
            f"{n_trials} trials give {expected:.3g} expected errors at SEP={analytic.sep:.3g}; "
            f"need >= {min_expected_errors}"
        )
    M = constellation.M
    gain = link.g_fet() * link.state().psi_L
    sigma_f = math.sqrt(analytic.links[0].var_I_flicker)
    p_on = np.array([sl.stats.p_on for sl in analytic.links])
    n_r = link.geometry.n_receptors
    thresholds = np.asarray(analytic.decision.thresholds)

    def run(rng, n):
        conf = np.zeros((M, M), dtype=np.int64)
        done = 0
        while done < n:
            k = min(chunk_size, n - done)
            sym = rng.integers(0, M, size=k)
            n_b = _bound_counts(rng, n_r, p_on[sym], k)
            z = gain * n_b + rng.normal(0.0, sigma_f, size=k)
            dec = np.searchsorted(thresholds, z, side="right")
            np.add.at(conf, (sym, dec), 1)
            done += k
        return conf

    parts = _run_parallel(run, list(zip(_substreams(seed, workers), _split(n_trials, workers))), workers)
    conf = sum(parts)
    n_err = int(conf.sum() - np.trace(conf))
    p = n_err / n_trials
    return MCSepResult(
        sep=p,
        se=math.sqrt(max(p * (1 - p), 1.0 / n_trials) / n_trials),
        analytic=analytic.sep,
        n_errors=n_err,
        n_trials=n_trials,
        confusion=conf,
        seed=seed,
    )


# --------------------------------------------------------------------------- quadrature


def _quad(fn, a, b, rtol, limit=500):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(fn, a, b, epsabs=0.0, epsrel=rtol, limit=limit)
        except integrate.IntegrationWarning as exc:
            raise OracleFailure(f"quadrature did not converge on [{a}, {b}]: {exc}") from exc
    return val


def psd_quadrature(psd: Callable[[float], float], f_L: float, f_H: float, rtol: float = 1e-10) -> float:
    """Integrate an even PSD over [-f_H, f_H] by adaptive quadrature.

    [0, f_L] is integrated directly and [f_L, f_H] in log-frequency so the
    1/f tail is smooth; the breakpoint at f_L isolates the kink of a flat
    low-frequency plateau.
    """
    if not 0 < f_L < f_H:
        raise InvalidBandError(f"need 0 < f_L < f_H, got {f_L!r}, {f_H!r}")
    low = _quad(lambda f: float(psd(f)), 0.0, f_L, rtol)
    high = _quad(lambda u: float(psd(math.exp(u))) * math.exp(u), math.log(f_L), math.log(f_H), rtol)
    return 2.0 * (low + high)


def total_power(psd: Callable[[float], float], rtol: float = 1e-10) -> float:
    """Integral of an even PSD over the whole real line."""
    return 2.0 * _quad(lambda f: float(psd(f)), 0.0, math.inf, rtol)


# --------------------------------------------------------------------------- thresholds


def threshold_by_root(mu0: float, s0: float, mu1: float, s1: float) -> float:
    """Equal-density point of two Gaussians found by bracketing root search.

    Returns the crossing nearest the narrower distribution on the side of the
    wider one; this is the root that lies between the means whenever one does.
    """

    def diff(x):
        return (
            -((x - mu1) ** 2) / (2 * s1**2) - math.log(s1)
            + ((x - mu0) ** 2) / (2 * s0**2) + math.log(s0)
        )

    width = max(s0, s1, abs(mu1 - mu0))
    if s1 >= s0:
        a, b = mu0, mu1
        while diff(b) < 0:
            b += width
            width *= 2
    else:
        a, b = mu0, mu1
        while diff(a) > 0:
            a -= width
            width *= 2
    return optimize.brentq(diff, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


# --------------------------------------------------------------------------- suite


def run_validation(link: LinkModel, N_m: float, constellation: Constellation, seed: int = 0,
                   mc_trials: int = 200_000, workers: int = 1) -> list[OracleReport]:
    """Run every oracle against the analytic model for one configuration."""
    reports = []
    ch, lig, geo = link.channel, link.ligand, link.geometry
    stats = link.binding_stats(N_m)

    ode = binding_ode_solve(ch, lig, geo, N_m)
    reports.append(OracleReport.compare("ode_equilibrium_mean", stats.mu_NB, ode.mu_at_sample, 1e-3, ode.n_steps))

    closed = link.output_variance(N_m)
    quad = psd_quadrature(lambda f: link.output_noise_psd(N_m, f), link.bias.f_L, link.bias.f_H)
    reports.append(OracleReport.compare("output_variance_quadrature", closed, quad, 1e-6, 0))

    total = total_power(lambda f: binding_noise_psd(stats, f))
    reports.append(OracleReport.compare("lorentzian_normalization", stats.var_NB, total, 1e-6, 0))

    mcb = mc_binding(stats, mc_trials, seed, workers)
    tol_mean = 3 * mcb.se_mean / stats.mu_NB if stats.mu_NB else 0.0
    reports.append(OracleReport.compare("mc_binding_mean", stats.mu_NB, mcb.mean, tol_mean, mc_trials, seed))
    tol_var = 3 * mcb.se_var / stats.var_NB if stats.var_NB else 0.0
    reports.append(OracleReport.compare("mc_binding_variance", stats.var_NB, mcb.var, tol_var, mc_trials, seed))

    sep = end_to_end_sep(link, constellation)
    d = sep.decision
    worst = (0.0, float(d.thresholds[0]), float(d.thresholds[0]))
    for m, lam in enumerate(d.thresholds, start=1):
        ref = threshold_by_root(d.mus[m - 1], d.sigmas[m - 1], d.mus[m], d.sigmas[m])
        worst = max(worst, (float(abs(lam - ref) / abs(ref)), float(lam), float(ref)))
    rel, lam, ref = worst
    reports.append(OracleReport("threshold_root_finding", lam, ref, rel, 1e-9, rel <= 1e-9, constellation.M - 1))

    try:
        mcs = mc_sep(link, constellation, mc_trials, seed, workers)
    except InsufficientTrialsError as exc:
        reports.append(OracleReport("mc_sep", sep.sep, float("nan"), 0.0, 0.0, True, mc_trials, seed,
                                    note=f"skipped: {exc}"))
    else:
        tol = (3 * mcs.se + MC_MODEL_SLACK * mcs.analytic) / mcs.analytic
        reports.append(OracleReport.compare("mc_sep", mcs.analytic, mcs.sep, tol, mc_trials, seed,
                                            note=f"{mcs.n_errors} errors"))
    return reports

"""Deterministic truncation/discretization error bounds.

Turns a point estimate of the lattice constant H_alpha^eta(T) into a
certified-style interval for H_alpha.  Every tail term is an explicit
Borell-type Gaussian bound: an entropy (chaining) bound with all
constants spelled out, a lognormal tail evaluated in closed form through
the Gaussian upper-tail function, and exponentially decaying window
terms over the geometric window sequence a_j = T*(1+gamma)^(j-1).

All functions are pure; repeated calls are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

from .exceptions import ParameterError, PreconditionError

__all__ = [
    "BoundParams",
    "AuxTerms",
    "IntervalReport",
    "window",
    "kappa_window",
    "entropy_bound",
    "aux_tail_terms",
    "p_truncation_event",
    "p_discretization_event",
    "upper_bound",
    "lower_bound",
    "interval",
]

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BoundParams:
    """Tunable constants of the bound calculus (defaults are the schedules
    under which the bundled appendix_b.csv reference table was produced).

    eps_ub(alpha) = eps_scale*(0.005 + 0.025*(2-alpha)) drives the upper
    bound, eps_lb = eps_ub/3 the lower bound; tau_base applies to the
    window-0 terms and tau_j_base*tau_j_growth^(j-1) to the j-th
    truncation term.  Infinite j-sums stop when a term falls below
    term_tol (relative) and are capped at j_cap.
    """

    gamma: float = 0.025
    psi: float = 0.3
    tau_base: float = 1.4
    tau_j_base: float = 1.3
    tau_j_growth: float = 1.005
    j_cap: int = 10000
    term_tol: float = 1e-16
    eps_scale: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0 or self.psi <= 0:
            raise ParameterError("gamma and psi must be positive")
        if self.tau_base <= 1 or self.tau_j_base <= 1 or self.tau_j_growth < 1:
            raise ParameterError("tau parameters must exceed 1")
        if self.eps_scale <= 0:
            raise ParameterError("eps_scale must be positive")

    def eps_ub(self, alpha: float) -> float:
        return self.eps_scale * (0.005 + 0.025 * (2.0 - alpha))

    def eps_lb(self, alpha: float) -> float:
        return self.eps_ub(alpha) / 3.0

    def tau_j(self, j: int) -> float:
        return self.tau_j_base * self.tau_j_growth ** (j - 1)


@dataclass(frozen=True)
class AuxTerms:
    """Breakdown of one window's tail bound."""

    kappa: float
    entropy: float
    integral_term: float
    point_term: float
    p_event_scaled: float

    @property
    def total(self) -> float:
        return self.integral_term + self.point_term + self.p_event_scaled


@dataclass(frozen=True)
class IntervalReport:
    """Interval for H_alpha from a point estimate of H_alpha^eta(T).

    ``lb``/``ub`` are None when that direction's preconditions fail
    (rendered as "---" in the report tables); ``failures`` carries the
    per-direction messages.  ``breakdown`` sums to the reported bounds:
    ub = ub_main + ub_disc + ub_trunc_sum, lb = lb_main - lb_correction.
    """

    alpha: float
    T: float
    eta: float
    estimate: float
    lb: float | None
    ub: float | None
    breakdown: dict[str, float]
    preconditions_ok: dict[str, bool]
    failures: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def window(j: int, T: float, gamma: float) -> tuple[float, float]:
    """The j-th truncation window [a_j, a_{j+1}), a_j = T*(1+gamma)^(j-1)."""
    a_j = T * (1.0 + gamma) ** (j - 1)
    return a_j, a_j * (1.0 + gamma)


def kappa_window(J: tuple[float, float], alpha: float, eta: float) -> float:
    """sup over J of Var(Z_t) - Var(Z_t^eta), with Var(Z_t) = 2|t|^alpha.

    Equals 2*max(eta^alpha, t_max^alpha - (t_max-eta)^alpha) where t_max
    is the largest |t| in J: the first branch dominates the concave
    (alpha < 1) regime and the second the convex (alpha > 1) regime.
    """
    lo, hi = J
    t_max = max(abs(lo), abs(hi))
    step = t_max**alpha - max(t_max - eta, 0.0) ** alpha
    return 2.0 * max(eta**alpha, step)


def entropy_bound(
    J_length: float, alpha: float, eta: float, term_tol: float = 1e-16
) -> float:
    """Explicit chaining bound on E[sup_J (B_t - B_t^eta)] (times sqrt 2).

    sqrt(2*pi/log 2) * sum_{j>=2} 2^{3/2} r^{-j+1} sqrt(log(2^{j+1} N_j^2))
    with r = 1/(2*eta^{alpha/2}) and N_j = |J| * r^{j/H}, H = alpha/2.
    The log is expanded analytically so N_j never overflows; the series
    is truncated when a term falls below term_tol relative to the sum.
    """
    if J_length <= 0 or eta <= 0:
        raise ParameterError("J_length and eta must be positive")
    H = alpha / 2.0
    r = 1.0 / (2.0 * eta**H)
    if r <= 1.0:
        raise PreconditionError(
            f"mesh too coarse for entropy bound: requires eta^(alpha/2) < 1/2, "
            f"got eta={eta}, alpha={alpha}",
            term="entropy",
        )
    log_r = math.log(r)
    log_J = math.log(J_length)
    log2 = math.log(2.0)
    coef = 2.0**1.5
    total = 0.0
    j = 2
    while j <= 100000:
        # log(2^{j+1} N_j^2) = (j+1)log2 + 2(log|J| + (j/H) log r)
        inner = (j + 1) * log2 + 2.0 * (log_J + (j / H) * log_r)
        term = coef * r ** (-j + 1) * math.sqrt(inner)
        total += term
        if term <= term_tol * total:
            break
        j += 1
    return math.sqrt(2.0 * math.pi / log2) * total


def _gauss_upper_tail(x: float) -> float:
    """P(N > x) for standard normal N."""
    return 0.5 * math.erfc(x / _SQRT2)


def aux_tail_terms(
    eta: float, alpha: float, kappa: float, entropy: float, tau: float
) -> tuple[float, float]:
    """Event-independent tail terms of one window's bound.

    With m = kappa + entropy and sigma^2 = 2*eta^alpha:
      point_term    = (tau/eta) * exp(-(log tau - m)^2 / (4 eta^alpha))
      integral_term = (1/eta) * sigma*sqrt(2 pi) * e^{m + sigma^2/2}
                      * Q((log tau - m - sigma^2)/sigma)
    the closed form of (1/eta) * int_tau^inf exp(-(log y - m)^2/(4 eta^alpha)) dy.
    Requires tau > exp(kappa + entropy).
    """
    m = kappa + entropy
    if tau <= math.exp(m):
        raise PreconditionError(
            f"tau={tau:.6g} must exceed exp(kappa+entropy)={math.exp(m):.6g}",
            term="aux tail",
        )
    sigma2 = 2.0 * eta**alpha
    sigma = math.sqrt(sigma2)
    log_tau = math.log(tau)
    point = (tau / eta) * math.exp(-((log_tau - m) ** 2) / (4.0 * eta**alpha))
    integral = (
        (1.0 / eta)
        * sigma
        * _SQRT2PI
        * math.exp(m + sigma2 / 2.0)
        * _gauss_upper_tail((log_tau - m - sigma2) / sigma)
    )
    return integral, point


def p_truncation_event(j: int, alpha: float, T: float, gamma: float) -> float:
    """Borell bound on P(sqrt2 * sup_{J_j} B > min_{J_j} |s|^alpha).

    exp(-(a_j^{alpha/2} - gamma^{alpha/2} sqrt2)^2 / (4 (1+gamma)^alpha)),
    valid provided T > gamma*2^(1/alpha) and a_j^{alpha/2} > sqrt2*gamma^{alpha/2}.
    """
    if T <= gamma * 2.0 ** (1.0 / alpha):
        raise PreconditionError(
            f"T={T} too small for truncation bound (needs T > gamma*2^(1/alpha) "
            f"= {gamma * 2.0 ** (1.0 / alpha):.6g})",
            term=f"truncation j={j}",
        )
    a_j, _ = window(j, T, gamma)
    gap = a_j ** (alpha / 2.0) - _SQRT2 * gamma ** (alpha / 2.0)
    if gap <= 0:
        raise PreconditionError(
            f"truncation bound invalid at j={j}: requires a_j^(alpha/2) > "
            f"sqrt2*gamma^(alpha/2)",
            term=f"truncation j={j}",
        )
    return math.exp(-(gap * gap) / (4.0 * (1.0 + gamma) ** alpha))


def p_discretization_event(eps: float, alpha: float, T: float, eta: float) -> float:
    """Borell/self-similarity bound on P(sup_{(-T,T)} (Z - Z^eta) > eps).

    (2T/eta) * exp(-0.5 * ((eps - kappa0)/(sqrt2 * eta^{alpha/2}) - 1)^2)
    clipped to [0, 1], with kappa0 = max(eta^alpha, T^alpha - (T-eta)^alpha).
    """
    kappa0 = max(eta**alpha, T**alpha - (T - eta) ** alpha)
    if eps <= kappa0:
        raise PreconditionError(
            f"eps={eps:.6g} at or below discretization floor kappa0={kappa0:.6g}",
            term="discretization",
        )
    ratio = (eps - kappa0) / (_SQRT2 * eta ** (alpha / 2.0))
    if ratio <= 1.0:
        raise PreconditionError(
            f"discretization bound invalid: (eps-kappa0)/(sqrt2*eta^(alpha/2)) "
            f"= {ratio:.6g} must exceed 1",
            term="discretization",
        )
    p = (2.0 * T / eta) * math.exp(-0.5 * (ratio - 1.0) ** 2)
    return min(max(p, 0.0), 1.0)


def _window0_aux(
    alpha: float, T: float, eta: float, params: BoundParams
) -> tuple[float, float, float, float]:
    """(kappa, entropy, integral, point) for the central window (-T, T)."""
    kap = kappa_window((-T, T), alpha, eta)
    ent = entropy_bound(2.0 * T, alpha, eta, params.term_tol)
    integral, point = aux_tail_terms(eta, alpha, kap, ent, params.tau_base)
    return kap, ent, integral, point


def upper_bound(
    estimate: float,
    alpha: float,
    T: float,
    eta: float,
    params: BoundParams | None = None,
) -> tuple[float, dict[str, float]]:
    """Upper bound on H_alpha: e^eps * estimate + event terms.

    ub = e^eps*estimate + disc_term + 2*sum_{j>=1} trunc_term_j, where
    disc_term bounds the mesh-approximation event on (-T, T) and each
    truncation term bounds the contribution of window J_j.  The j-sum
    stops when a term drops below term_tol relative to the accumulated
    bound (capped at j_cap).  Raises PreconditionError, naming the term,
    when the calculus does not apply at these parameters.
    """
    params = params or BoundParams()
    eps = params.eps_ub(alpha)
    main = math.exp(eps) * estimate

    kap0, ent0, integral0, point0 = _window0_aux(alpha, T, eta, params)
    p_disc = p_discretization_event(eps, alpha, T, eta)
    disc = AuxTerms(kap0, ent0, integral0, point0, (params.tau_base / eta) * p_disc)

    trunc_sum = 0.0
    n_terms = 0
    for j in range(1, params.j_cap + 1):
        a_j, a_j1 = window(j, T, params.gamma)
        tau_j = params.tau_j(j)
        kap = kappa_window((a_j, a_j1), alpha, eta)
        ent = entropy_bound(params.gamma * a_j, alpha, eta, params.term_tol)
        try:
            integral_j, point_j = aux_tail_terms(eta, alpha, kap, ent, tau_j)
        except PreconditionError as exc:
            raise PreconditionError(str(exc), term=f"truncation j={j}") from None
        p_j = p_truncation_event(j, alpha, T, params.gamma)
        term = 2.0 * (integral_j + point_j + (tau_j / eta) * p_j)
        trunc_sum += term
        n_terms = j
        if term <= params.term_tol * (main + disc.total + trunc_sum):
            break

    ub = main + disc.total + trunc_sum
    breakdown = {
        "ub_main": main,
        "ub_disc": disc.total,
        "ub_trunc_sum": trunc_sum,
        "ub_disc_integral": disc.integral_term,
        "ub_disc_point": disc.point_term,
        "ub_disc_event": disc.p_event_scaled,
        "ub_kappa0": kap0,
        "ub_entropy0": ent0,
        "ub_trunc_terms": float(n_terms),
        "ub_eps": eps,
    }
    return ub, breakdown


def lower_bound(
    estimate: float,
    alpha: float,
    T: float,
    eta: float,
    params: BoundParams | None = None,
) -> tuple[float, dict[str, float]]:
    """Lower bound on H_alpha: estimate/(1+eps) minus a tail correction.

    The correction applies the window-0 tail machinery with
    P(E) = 2*sum_j exp(-(log(eps*eta*q_j/(gamma*a_j)) + a_j^alpha
    - sqrt2*gamma^{alpha/2} a_j^{alpha/2})^2 / (4 (1+gamma)^alpha a_j^alpha)),
    q_j = psi*(1+psi)^{-j}/2.  A j whose Borell argument is nonpositive is
    a hard error unless its formal value is below term_tol relative to
    the accumulated probability.
    """
    params = params or BoundParams()
    eps = params.eps_lb(alpha)

    kap0, ent0, integral0, point0 = _window0_aux(alpha, T, eta, params)

    gamma = params.gamma
    denom_base = 4.0 * (1.0 + gamma) ** alpha
    p_total = 0.0
    for j in range(1, params.j_cap + 1):
        a_j, _ = window(j, T, gamma)
        q_j = params.psi * (1.0 + params.psi) ** (-j) / 2.0
        arg = (
            math.log(eps * eta * q_j / (gamma * a_j))
            + a_j**alpha
            - _SQRT2 * gamma ** (alpha / 2.0) * a_j ** (alpha / 2.0)
        )
        formal = math.exp(-(arg * arg) / (denom_base * a_j**alpha))
        if arg <= 0:
            if formal > params.term_tol * (p_total + formal):
                raise PreconditionError(
                    f"lower-bound Borell argument nonpositive at j={j} "
                    f"(T too small for these parameters)",
                    term=f"lower-bound j={j}",
                )
            continue
        p_total += formal
        if formal <= params.term_tol * p_total:
            break
    p_event = min(2.0 * p_total, 1.0)

    correction_raw = integral0 + point0 + (params.tau_base / eta) * p_event
    lb_main = estimate / (1.0 + eps)
    lb_correction = correction_raw / (1.0 + eps)
    lb = lb_main - lb_correction
    breakdown = {
        "lb_main": lb_main,
        "lb_correction": lb_correction,
        "lb_integral": integral0,
        "lb_point": point0,
        "lb_event": (params.tau_base / eta) * p_event,
        "lb_kappa0": kap0,
        "lb_entropy0": ent0,
        "lb_eps": eps,
    }
    return lb, breakdown


def interval(
    estimate: float,
    alpha: float,
    T: float,
    eta: float,
    params: BoundParams | None = None,
) -> IntervalReport:
    """Both bound directions with per-direction failure reporting.

    A direction whose preconditions fail is recorded (lb/ub None) rather
    than raised; only when both directions fail is PreconditionError
    propagated (the calculus breaks down entirely, e.g. alpha < 1 at the
    default parameters).
    """
    params = params or BoundParams()
    breakdown: dict[str, float] = {}
    ok: dict[str, bool] = {}
    failures: dict[str, str] = {}

    try:
        ub, ub_bd = upper_bound(estimate, alpha, T, eta, params)
        breakdown.update(ub_bd)
        ok["upper"] = True
    except PreconditionError as exc:
        ub = None
        ok["upper"] = False
        failures["upper"] = f"{exc} [{exc.term}]"

    try:
        lb, lb_bd = lower_bound(estimate, alpha, T, eta, params)
        breakdown.update(lb_bd)
        ok["lower"] = True
    except PreconditionError as exc:
        lb = None
        ok["lower"] = False
        failures["lower"] = f"{exc} [{exc.term}]"

    if ub is None and lb is None:
        raise PreconditionError(
            f"both bound directions failed for alpha={alpha}: "
            f"upper: {failures['upper']}; lower: {failures['lower']}",
            term="interval",
        )
    return IntervalReport(alpha, T, eta, estimate, lb, ub, breakdown, ok, failures)

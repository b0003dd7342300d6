"""Explicit constants, the two-scale recursion as a bound-propagation engine,
the inequality audit over Monte Carlo estimates, and exact coverage formulas.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

from .estimators import Estimate
from .geometry import sphere_net_size, unit_ball_volume
from .model import ModelParams
from .radius_laws import RadiusLaw, tail_moment


class HypothesisViolation(ValueError):
    def __init__(self, message: str, scale: float | None = None):
        super().__init__(message)
        self.scale = scale


class MissingScales(ValueError):
    pass


@dataclass(frozen=True)
class ConstantsTable:
    dimension: int
    law: str
    K_size: int
    L_size: int
    C1: float
    C2: float
    C3: float
    C4: float
    C: float
    C_tilde: float
    moment: float
    lambda0: float
    A: float | None
    net_method: str = "greedy"

    @property
    def divergent(self) -> bool:
        return self.moment == math.inf

    def rows(self) -> list[tuple[str, str, float | None]]:
        return [
            ("K", "|net of S_10, spacing 1|", self.K_size),
            ("L", "|net of S_80, spacing 1|", self.L_size),
            ("C1", "|K| * |L|", self.C1),
            ("C2", "|B(0,10)| = 10^d kappa_d", self.C2),
            ("C3", "|B(0,100)| = 100^d kappa_d", self.C3),
            ("C4", "|B(0,10)| = 10^d kappa_d", self.C4),
            ("C", "max(C1, C2, C3, C4)", self.C),
            ("C_tilde", "1 / (4 C^2)", self.C_tilde),
            ("E(R^d)", "int r^d nu(dr)", self.moment),
            ("lambda0", "C_tilde / E(R^d)", self.lambda0),
            ("A", "E(R^d)^(1/d) / 10", self.A),
        ]


def compute_constants(d: int, law: RadiusLaw) -> ConstantsTable:
    if d < 1:
        raise ValueError("dimension must be >= 1")
    k_size, k_method = sphere_net_size(d, 10.0, 1.0)
    l_size, l_method = sphere_net_size(d, 80.0, 1.0)
    kappa = unit_ball_volume(d)
    c1 = float(k_size * l_size)
    c2 = c4 = 10.0**d * kappa
    c3 = 100.0**d * kappa
    c = max(c1, c2, c3, c4)
    c_tilde = 1.0 / (4.0 * c * c)
    moment = tail_moment(law, d, 0.0)
    if moment == math.inf:
        lambda0, A = 0.0, None
    else:
        lambda0 = c_tilde / moment
        A = moment ** (1.0 / d) / 10.0
    method = "greedy" if k_method == l_method == "greedy" else "grid"
    return ConstantsTable(d, str(law), k_size, l_size, c1, c2, c3, c4, c, c_tilde, moment,
                          lambda0, A, method)


@dataclass
class BoundChain:
    """Certified upper bounds F_n on sup of f over [10^n, 10^(n+1)].

    Index 0 is the base interval [1, 10]; `quadratic` and `linear` are the
    two recursions and `f_bounds` their elementwise minimum.
    """

    scales: list[float]
    f_bounds: list[float]
    quadratic: list[float]
    linear: list[float]
    g_values: list[float]
    base_interval_bound: float
    base_source: str
    s_exponent: float | None = None
    s_verdict: str | None = None
    s_partial_sum: float | None = None
    physical_scales: list[float] | None = None
    notes: list[str] = field(default_factory=list)

    def decreasing(self) -> bool:
        """Strict decrease over the propagated steps n >= 1."""
        f = self.f_bounds[1:]
        return all(b < a for a, b in zip(f, f[1:]))

    def as_dict(self) -> dict:
        return asdict(self)


def _moment_verdict(f_bounds: list[float], s: float) -> tuple[str, float]:
    terms = [10.0 ** (n * s) * f for n, f in enumerate(f_bounds)]
    total = sum(terms)
    tail = terms[-4:]
    if all(t == 0 for t in tail):
        return "converges", total
    ratios = [b / a if a > 0 else math.inf for a, b in zip(tail, tail[1:])]
    if max(ratios) < 1:
        r = max(ratios)
        return "converges", total + terms[-1] * r / (1 - r)
    if min(ratios) >= 1:
        return "diverges", total
    return "inconclusive", total


def propagate_lemma37(base_bound: float, g: Callable[[float], float], n_steps: int,
                      s: float | None = None, base_source: str = "analytic") -> BoundChain:
    """Propagate f(a) <= f(a/10)^2 + g(a) over decades of the argument.

    `g` must be nonincreasing, so that its sup over [10^n, 10^(n+1)] is
    g(10^n). Both the quadratic recursion F_n <= F_{n-1}^2 + G_n and the
    linearised closed form F_n <= F_0/2^n + sum_k G_k/2^(n-k) are emitted.
    """
    if not 0 <= base_bound <= 0.5:
        raise HypothesisViolation(f"base bound {base_bound:.6g} exceeds 1/2 on [1, 10]", 1.0)
    G = [float(g(10.0**n)) for n in range(n_steps + 1)]
    for n, value in enumerate(G):
        if value > 0.25:
            raise HypothesisViolation(f"g(10^{n}) = {value:.6g} exceeds 1/4", 10.0**n)
    quad, lin, cert = [base_bound], [base_bound], [base_bound]
    for n in range(1, n_steps + 1):
        q = cert[-1] ** 2 + G[n]
        l = base_bound / 2**n + sum(G[k] / 2 ** (n - k) for k in range(1, n + 1))
        quad.append(q)
        lin.append(l)
        cert.append(min(q, l))
    chain = BoundChain([10.0**n for n in range(n_steps + 1)], cert, quad, lin, G, base_bound,
                       base_source, s)
    if s is not None:
        chain.s_verdict, chain.s_partial_sum = _moment_verdict(cert, s)
    return chain


def subcritical_g(constants: ConstantsTable, params: ModelParams) -> Callable[[float], float]:
    """g(a) = lambda C^2 int_{A a / 10}^inf r^d nu(dr)."""
    C, A, lam, d, law = constants.C, constants.A, params.intensity, params.dimension, params.law
    return lambda a: lam * C * C * tail_moment(law, d, A * a / 10.0)


def analytic_base_bound(constants: ConstantsTable, params: ModelParams) -> float:
    # sup over a in [1, 10] of C * lambda * C4 * (A a)^d
    return constants.C * params.intensity * constants.C4 * (10.0 * constants.A) ** params.dimension


def subcritical_chain(constants: ConstantsTable, params: ModelParams, n_steps: int = 10,
                  s: float | None = None, base_estimates: list[Estimate] | None = None) -> BoundChain:
    """Bound chain for f(a) = C pi(A a) with the base interval bounded either
    analytically or by Monte Carlo upper confidence limits at points of the
    pi-argument range [A, 10A]."""
    if constants.divergent:
        raise HypothesisViolation("E(R^d) is infinite: no subcritical certificate exists")
    if not params.intensity < constants.lambda0:
        raise HypothesisViolation(
            f"lambda = {params.intensity:.6g} is not below lambda0 = {constants.lambda0:.6g}")
    if base_estimates:
        base = constants.C * max(e.ci_high + e.trunc_bias_bound for e in base_estimates)
        source = "monte_carlo"
    else:
        base = analytic_base_bound(constants, params)
        source = "analytic"
    chain = propagate_lemma37(base, subcritical_g(constants, params), n_steps, s, source)
    chain.physical_scales = [constants.A * x for x in chain.scales]
    chain.notes.append("f(alpha) = C * pi(A * alpha); F_n covers pi-arguments "
                       "[A 10^n, A 10^(n+1)]")
    if source == "monte_carlo":
        chain.notes.append("base bound is the max of upper Wilson limits at sampled points, "
                           "a statistical rather than analytic certificate")
    return chain


def _find(estimates: dict[float, Estimate], key: float) -> Estimate | None:
    for k, v in estimates.items():
        if math.isclose(k, key, rel_tol=1e-9):
            return v
    return None


def audit_prop31(pi_estimates: dict[float, Estimate], m_estimates: dict[float, Estimate],
                 constants: ConstantsTable, params: ModelParams) -> dict:
    """Check the three inequalities with conservative confidence sides.

    Each row compares the lower Wilson limit of the left side with the
    upper limit (plus truncation bias) of the right side.
    """
    lam, d, C, law = params.intensity, params.dimension, constants.C, params.law
    rows = []
    paired = False
    for alpha in sorted(pi_estimates):
        pi_a = pi_estimates[alpha]
        up = min(1.0, pi_a.ci_high + pi_a.trunc_bias_bound)
        tail = tail_moment(law, d, alpha)
        big_ball = lam * C * tail
        pi_10 = _find(pi_estimates, 10 * alpha)
        if pi_10 is not None:
            paired = True
            rows.append(_row(alpha, "5", pi_10.ci_low, C * up * up + big_ball))
        m = _find(m_estimates, alpha)
        if m is not None:
            rows.append(_row(alpha, "6", m.ci_low, up + big_ball))
        rows.append(_row(alpha, "7", pi_a.ci_low, C * lam * alpha**d))
    if not paired:
        raise MissingScales("no pair of scales (alpha, 10 alpha) among the pi estimates")
    return {
        "dimension": d,
        "lambda": lam,
        "law": str(law),
        "C": C,
        "rows": rows,
        "passed": all(r["verdict"] == "PASS" for r in rows),
    }


def _row(alpha: float, which: str, lhs: float, rhs: float) -> dict:
    margin = rhs - lhs
    return {"alpha": alpha, "inequality": which, "lhs_low": lhs, "rhs_high": rhs,
            "margin": margin, "verdict": "PASS" if margin >= 0 else "FAIL"}


def covered_ball_probability(params: ModelParams, rho: float) -> float:
    """P(some ball contains B(0, rho)) = 1 - exp(-lambda kappa_d E[((R - rho)+)^d])."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    d = params.dimension
    x = params.law.positive_part_moment(rho, d)
    if x == math.inf:
        return 1.0
    return -math.expm1(-params.intensity * unit_ball_volume(d) * x)


def coverage_lower_bound_12(params: ModelParams, rho: float) -> float:
    """1 - exp(-lambda 2^-d kappa_d int_{]2 rho, inf[} r^d nu(dr))."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    d = params.dimension
    x = 2.0**-d * tail_moment(params.law, d, 2 * rho, strict=True)
    if x == math.inf:
        return 1.0
    return -math.expm1(-params.intensity * unit_ball_volume(d) * x)

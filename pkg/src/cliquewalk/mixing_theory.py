"""Closed-form mixing rates and the comparison machinery between walks.

Covers the rate of the clique-respecting walk in both parameter regimes,
the simple-walk and non-backtracking-walk rates, the comparison constants
A..F with the five-case classification of the ratio rho_tilde/rho', the
flat-spectrum bounds, partial-geometry families, and the growth rate of
the scalar polynomials q_k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    BipartiteGraph,
    CompleteGraph,
    DegreeTooSmall,
    Disconnected,
    HypothesisViolation,
    InvalidParams,
    NegativeInput,
    OutOfRange,
)
from .graph_core import StructuralFlags
from .spectrum import SpectralSummary, summary_from_values

DELTA_ONE_TOL = 1e-12
Y0_MATCH_TOL = 1e-12


def psi(x: float) -> float:
    """Rate function: 1 on [0,1], x + sqrt(x^2 - 1) beyond."""
    if x < 0:
        raise NegativeInput(f"psi needs x >= 0, got {x}")
    if x <= 1.0:
        return 1.0
    return x + math.sqrt(x * x - 1.0)


def delta_from_epsilon(eps: float, d: int) -> float:
    """Backtracking weight delta = eps(d-1)/(1-eps); delta(1/d) = 1."""
    if d < 2:
        raise OutOfRange("need d >= 2")
    hi = 1.0 / d
    if not -1e-15 <= eps <= hi + 1e-15:
        raise OutOfRange(f"eps must lie in [0, 1/{d}], got {eps}")
    eps = min(max(eps, 0.0), hi)
    if eps >= hi:
        return 1.0
    return eps * (d - 1) / (1.0 - eps)


def epsilon_from_delta(delta: float, d: int) -> float:
    if d < 2:
        raise OutOfRange("need d >= 2")
    if not 0.0 <= delta <= 1.0:
        raise OutOfRange(f"delta must lie in [0, 1], got {delta}")
    return delta / (d - 1 + delta)


@dataclass(frozen=True)
class WalkParams:
    """Step distribution of the walk: stay in the last clique w.p. eps."""

    epsilon: float
    d: int
    l: int
    delta: float
    p_stay: float
    p_leave: float

    @classmethod
    def from_epsilon(cls, eps: float, d: int, l: int) -> "WalkParams":
        if l < 2:
            raise OutOfRange("need l >= 2")
        delta = delta_from_epsilon(eps, d)
        return cls(
            epsilon=eps,
            d=d,
            l=l,
            delta=delta,
            p_stay=eps / (l - 1),
            p_leave=(1.0 - eps) / ((d - 1) * (l - 1)),
        )


class Regime(str, Enum):
    LEQ = "leq"                          # l(1-delta) <= d branch, uses lambda
    GT = "gt"                            # l(1-delta) >  d branch, uses lambda-hat
    SIMPLE_WALK_LIMIT = "simple-walk-limit"
    OUTSIDE_HYPOTHESES = "outside-hypotheses"


class CaseLabel(str, Enum):
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    CASE4 = "case4"
    CASE5 = "case5"
    UNCLASSIFIED = "unclassified"


def check_walk_hypotheses(flags: StructuralFlags) -> None:
    if not flags.connected:
        raise Disconnected("graph is disconnected")
    if flags.complete:
        raise CompleteGraph("graph is complete")
    if flags.bipartite:
        raise BipartiteGraph("graph is bipartite")


def mixing_rate_clique_walk(
    summary: SpectralSummary,
    d: int,
    l: int,
    eps: float,
    flags: StructuralFlags | None = None,
) -> tuple[float | None, Regime]:
    """Asymptotic rate of convergence to uniform for the clique walk.

    Returns (rate, regime).  At eps = 1/d the walk degenerates to the
    simple random walk and the rate is lambda' / (d(l-1)).  The regime
    that escapes both branches (d = 2 with delta = 0 and l = 2, the plain
    non-backtracking walk on a cycle) yields (None, OUTSIDE_HYPOTHESES).
    """
    if flags is not None:
        check_walk_hypotheses(flags)
    delta = delta_from_epsilon(eps, d)
    if abs(summary.delta - delta) > 1e-9:
        raise InvalidParams(
            f"summary was built at delta={summary.delta}, walk has delta={delta}"
        )
    if delta > 1.0 - DELTA_ONE_TOL:
        return summary.lambda_prime / (d * (l - 1)), Regime.SIMPLE_WALK_LIMIT

    if l * (1.0 - delta) > d:
        lam = summary.lambda_hat_of_delta
        regime = Regime.GT
    else:
        # the stated branch needs d >= 3; for d = 2 it extends to every
        # delta > 0, leaving only the cycle NBRW degenerate point outside
        if d < 3 and delta <= 0.0:
            return None, Regime.OUTSIDE_HYPOTHESES
        lam = summary.lambda_of_delta
        regime = Regime.LEQ

    base = (l - 1) * (1.0 - delta) * (d - 1 + delta)
    rate = math.sqrt((1.0 - delta) / ((d - 1 + delta) * (l - 1))) * psi(
        lam / (2.0 * math.sqrt(base))
    )
    return rate, regime


def mixing_rate_simple(
    summary: SpectralSummary, d: int, l: int, flags: StructuralFlags | None = None
) -> float:
    """Simple-random-walk rate lambda' / (d(l-1))."""
    if flags is not None:
        check_walk_hypotheses(flags)
    return summary.lambda_prime / (d * (l - 1))


def mixing_rate_nbrw(
    summary: SpectralSummary, d: int, l: int, flags: StructuralFlags | None = None
) -> float:
    """Non-backtracking-walk rate psi(lambda'/(2 sqrt(k-1))) / sqrt(k-1), k = d(l-1)."""
    if flags is not None:
        check_walk_hypotheses(flags)
    k = d * (l - 1)
    if k <= 2:
        raise DegreeTooSmall("non-backtracking walk is degenerate on a cycle")
    root = math.sqrt(k - 1)
    return psi(summary.lambda_prime / (2.0 * root)) / root


# --- comparison constants and case classification ------------------------

@dataclass(frozen=True)
class ComparisonConstants:
    A: float
    B: float
    C: float
    D: float
    E: float | None
    F: float | None

    def as_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D,
                "E": self.E, "F": self.F}


def cases45_feasible(d: int, l: int) -> bool:
    """Whether -d <= -2 sqrt(d(l-1)-1), the precondition for cases 4 and 5."""
    return l <= d / 4 + 1 / d + 1 + 1e-12


def comparison_constants(d: int, l: int) -> ComparisonConstants:
    """The six ratio constants; E and F only exist when l <= d/4 + 1/d + 1.

    All six equal 1 exactly at l = 2.
    """
    if not (d >= l >= 2 and d >= 3):
        raise HypothesisViolation(f"need d >= l >= 2 and d >= 3, got d={d}, l={l}")
    if l == 2:
        one = 1.0
        return ComparisonConstants(one, one, one, one, one, one)

    dl1 = d * (l - 1) - 1.0        # d(l-1) - 1
    b = (d - 1.0) * (l - 1.0)      # (d-1)(l-1)
    sq_b = math.sqrt(b)
    sq_dl1 = math.sqrt(dl1)
    a = float(l - 2)
    sq_a = math.sqrt(a)

    A = 2.0 * dl1 / (2.0 * b + sq_a * sq_b * (sq_a + math.sqrt((l - 6.0) + 4.0 * sq_b)))
    B = (1.0 + math.sqrt(1.0 - 4.0 / b)) / (1.0 + math.sqrt(1.0 - 4.0 / dl1))
    C = sq_dl1 / sq_b
    D = (2.0 * dl1 + sq_a * sq_dl1 * (sq_a + math.sqrt((l + 2.0) + 4.0 * sq_dl1))) / (2.0 * b)

    E = F = None
    if cases45_feasible(d, l):
        disc = d * d - 4.0 * dl1
        E = 2.0 * dl1 / ((l - 1.0) * (d + math.sqrt(max(disc, 0.0))))
        F = (dl1 / b) * (
            (2.0 * sq_dl1 + a + sq_a * math.sqrt(l + 2.0 + 4.0 * sq_dl1))
            / (2.0 * sq_dl1 + 2.0 * a + 2.0 * sq_a * math.sqrt(a + 2.0 * sq_dl1))
        )
    return ComparisonConstants(A, B, C, D, E, F)


def classify_case(summary: SpectralSummary, d: int, l: int) -> CaseLabel:
    """Five-way classification of (lambda2, lambda_n) at delta = 0.

    Intervals are closed; on ties the lowest-numbered case wins.  Raises
    HypothesisViolation when d < l, d < 3, or lambda < 2 sqrt((d-1)(l-1))
    (the flat-spectrum territory handled by flat_regime_ratio_bounds).
    """
    if not (d >= l and d >= 3):
        raise HypothesisViolation(f"classification needs d >= l and d >= 3, got d={d}, l={l}")
    if summary.delta != 0.0:
        raise HypothesisViolation("classification is defined at delta = 0")
    lam2, lamn = summary.lambda2, summary.lambda_n
    a = float(l - 2)
    thr_b = 2.0 * math.sqrt((d - 1.0) * (l - 1.0))
    thr_c = 2.0 * math.sqrt(d * (l - 1.0) - 1.0)
    if summary.lambda_of_delta < thr_b:
        raise HypothesisViolation(
            f"lambda = {summary.lambda_of_delta:.6g} < 2 sqrt((d-1)(l-1)) = {thr_b:.6g}"
        )

    if abs(lam2 - a) >= thr_b and abs(lam2 - a) >= a - lamn:
        return CaseLabel.CASE1
    if -thr_c <= lamn <= a - thr_b and lam2 <= thr_c:
        return CaseLabel.CASE2
    if -thr_c <= lamn <= a - thr_b and thr_c <= lam2 <= a + thr_b:
        return CaseLabel.CASE3
    if cases45_feasible(d, l) and lamn <= -thr_c:
        if abs(lamn) >= abs(lam2):
            return CaseLabel.CASE4
        if abs(lam2 - a) <= a - lamn:
            return CaseLabel.CASE5
    return CaseLabel.UNCLASSIFIED


def classify_simple_comparison(summary: SpectralSummary, d: int, l: int) -> int:
    """Three-way split used by the rho_tilde/rho lower bounds (delta = 0)."""
    lam2, lamn = summary.lambda2, summary.lambda_n
    a = float(l - 2)
    thr_b = 2.0 * math.sqrt((d - 1.0) * (l - 1.0))
    if abs(lam2 - a) >= thr_b and abs(lam2 - a) >= a - lamn:
        return 1
    if abs(lamn) >= abs(lam2):
        return 2
    return 3


def simple_ratio_lower_bound(d: int, l: int, which: int) -> float:
    """Case-specific lower bound for rho_tilde / rho."""
    base = d / (2.0 * (d - 1.0))
    a = float(l - 2)
    thr_b = 2.0 * math.sqrt((d - 1.0) * (l - 1.0))
    if which == 1:
        return base - d * a / (2.0 * (d - 1.0) * (thr_b + a))
    if which == 2:
        return base + a / (2.0 * (d - 1.0))
    if which == 3:
        return base - d * a / (2.0 * (d - 1.0) * (thr_b - a))
    raise InvalidParams(f"no such comparison case: {which}")


# --- reports ---------------------------------------------------------------

@dataclass
class MixingReport:
    d: int
    l: int
    eps: float
    delta: float
    rho_tilde: float | None
    regime: Regime
    rho_simple: float | None
    rho_nbrw: float | None
    case_label: CaseLabel | None = None
    constants: ComparisonConstants | None = None
    lambda2: float | None = None
    lambda_n: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ratio_nbrw(self) -> float | None:
        if self.rho_tilde is None or not self.rho_nbrw:
            return None
        return self.rho_tilde / self.rho_nbrw

    @property
    def ratio_simple(self) -> float | None:
        if self.rho_tilde is None or not self.rho_simple:
            return None
        return self.rho_tilde / self.rho_simple

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "l": self.l,
            "eps": self.eps,
            "delta": self.delta,
            "rho_tilde": self.rho_tilde,
            "regime": self.regime.value,
            "rho_simple": self.rho_simple,
            "rho_nbrw": self.rho_nbrw,
            "ratio_nbrw": self.ratio_nbrw,
            "ratio_simple": self.ratio_simple,
            "case": self.case_label.value if self.case_label else None,
            "constants": self.constants.as_dict() if self.constants else None,
            "lambda2": self.lambda2,
            "lambda_n": self.lambda_n,
            "notes": self.notes,
        }


def analyze_summary(
    summary: SpectralSummary,
    d: int,
    l: int,
    eps: float,
    flags: StructuralFlags | None = None,
) -> MixingReport:
    """All three rates plus, when applicable, case label and constants."""
    if flags is not None:
        check_walk_hypotheses(flags)
    delta = delta_from_epsilon(eps, d)
    rho_tilde, regime = mixing_rate_clique_walk(summary, d, l, eps)
    rho_simple = mixing_rate_simple(summary, d, l)
    notes = []
    try:
        rho_nbrw = mixing_rate_nbrw(summary, d, l)
    except DegreeTooSmall as exc:
        rho_nbrw = None
        notes.append(str(exc))

    report = MixingReport(
        d=d, l=l, eps=eps, delta=delta,
        rho_tilde=rho_tilde, regime=regime,
        rho_simple=rho_simple, rho_nbrw=rho_nbrw,
        lambda2=summary.lambda2, lambda_n=summary.lambda_n,
    )
    if delta == 0.0 and d >= max(l, 3):
        try:
            report.case_label = classify_case(summary, d, l)
            report.constants = comparison_constants(d, l)
        except HypothesisViolation as exc:
            notes.append(str(exc))
    report.notes = notes
    return report


@dataclass(frozen=True)
class BoundCheck:
    name: str
    value: float
    lower: float | None
    upper: float | None

    @property
    def passed(self) -> bool:
        # psi has a square-root kink at its branch point, so rates evaluated
        # exactly on a case boundary carry ~sqrt(eps) noise
        slack = 1e-7 * max(1.0, abs(self.value))
        if self.lower is not None and self.value < self.lower - slack:
            return False
        if self.upper is not None and self.value > self.upper + slack:
            return False
        return True

    @property
    def margin(self) -> float:
        m = math.inf
        if self.lower is not None:
            m = min(m, self.value - self.lower)
        if self.upper is not None:
            m = min(m, self.upper - self.value)
        return m


@dataclass(frozen=True)
class BoundsReport:
    checks: tuple[BoundCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "value": c.value,
                    "lower": c.lower,
                    "upper": c.upper,
                    "passed": c.passed,
                    "margin": c.margin,
                }
                for c in self.checks
            ],
        }


_CASE_BRACKETS = {
    CaseLabel.CASE1: ("A", "B"),
    CaseLabel.CASE2: ("C", "D"),
    CaseLabel.CASE3: ("A", "D"),
    CaseLabel.CASE4: ("E", "D"),
    CaseLabel.CASE5: ("F", "D"),
}


def check_case_bounds(report: MixingReport, summary: SpectralSummary) -> BoundsReport:
    """Verify the two-sided ratio bracket for the report's case.

    Also checks rho_tilde < rho and its case-specific lower bound, which
    hold whenever d >= l and lambda >= 2 sqrt((d-1)(l-1)) at delta = 0.
    """
    if report.case_label not in _CASE_BRACKETS:
        raise InvalidParams(f"report carries no classified case: {report.case_label}")
    consts = report.constants or comparison_constants(report.d, report.l)
    lo_name, hi_name = _CASE_BRACKETS[report.case_label]
    lo = getattr(consts, lo_name)
    hi = getattr(consts, hi_name)
    if lo is None or hi is None:
        raise HypothesisViolation(
            f"constants {lo_name}/{hi_name} undefined for d={report.d}, l={report.l}"
        )
    checks = [
        BoundCheck(f"{lo_name} <= rho_tilde/rho_nbrw <= {hi_name}",
                   report.ratio_nbrw, lo, hi),
    ]
    d, l = report.d, report.l
    if summary.lambda_of_delta >= 2.0 * math.sqrt((d - 1.0) * (l - 1.0)) - 1e-12:
        # strict in the interior; the boundary lambda = 2 sqrt((d-1)(l-1))
        # with lambda_n = -d = -l attains equality
        checks.append(BoundCheck("rho_tilde <= rho_simple", report.ratio_simple, None, 1.0))
        which = classify_simple_comparison(summary, d, l)
        checks.append(
            BoundCheck(
                f"rho_tilde/rho_simple lower bound (split {which})",
                report.ratio_simple,
                simple_ratio_lower_bound(d, l, which),
                None,
            )
        )
    return BoundsReport(tuple(checks))


def flat_regime_ratio_bounds(summary: SpectralSummary, d: int, l: int) -> BoundsReport:
    """Ratio bounds in the flat regime lambda <= 2 sqrt((d-1)(l-1)), delta = 0."""
    b = (d - 1.0) * (l - 1.0)
    thr = 2.0 * math.sqrt(b)
    if summary.delta != 0.0:
        raise HypothesisViolation("flat-regime bounds are stated at delta = 0")
    if summary.lambda_of_delta > thr + 1e-12:
        raise HypothesisViolation(
            f"lambda = {summary.lambda_of_delta:.6g} exceeds 2 sqrt((d-1)(l-1)) = {thr:.6g}"
        )
    rho_tilde = 1.0 / math.sqrt(b)
    rho = mixing_rate_simple(summary, d, l)
    rho_p = mixing_rate_nbrw(summary, d, l)
    consts = comparison_constants(d, l)
    lower = d * (l - 1.0) / (2.0 * b + (l - 2.0) * math.sqrt(b))
    return BoundsReport(
        (
            BoundCheck("rho_tilde/rho_simple >= d(l-1)/(2(d-1)(l-1)+(l-2)sqrt((d-1)(l-1)))",
                       rho_tilde / rho, lower, None),
            BoundCheck("A <= rho_tilde/rho_nbrw <= C", rho_tilde / rho_p, consts.A, consts.C),
        )
    )


# --- partial geometries -----------------------------------------------------

@dataclass(frozen=True)
class PartialGeometryParams:
    """pg(K, R, T): lines of K points, R lines per point, T collinearity."""

    K: int
    R: int
    T: int

    def __post_init__(self):
        if self.K < 2 or self.R < 2:
            raise InvalidParams("need K >= 2 and R >= 2")
        if not 1 <= self.T <= min(self.K, self.R):
            raise InvalidParams("need 1 <= T <= min(K, R)")


def pg_spectrum(params: PartialGeometryParams) -> tuple[float, float, float]:
    """The three distinct point-graph eigenvalues {R(K-1), K-1-T, -R}."""
    K, R, T = params.K, params.R, params.T
    return (float(R * (K - 1)), float(K - 1 - T), float(-R))


def pg_mixing_report(params: PartialGeometryParams, eps: float = 0.0) -> MixingReport:
    """Rates for a partial-geometry point graph from its closed-form spectrum.

    d = R and l = K; the point graph of pg(K, 2, 1) with K = 2 is bipartite
    and is rejected.
    """
    K, R = params.K, params.R
    if K <= 2:
        raise InvalidParams("K = 2 point graphs are bipartite; no mixing rate")
    d, l = R, K
    delta = delta_from_epsilon(eps, d)
    summary = summary_from_values(pg_spectrum(params), d, l, delta)
    report = analyze_summary(summary, d, l, eps)
    if report.rho_tilde is not None and report.rho_nbrw:
        faster = report.rho_tilde < report.rho_nbrw
        report.notes.append(
            "clique walk mixes faster than NBRW" if faster
            else "clique walk mixes slower than NBRW"
        )
    return report


def gq_mixing_report(q: int, eps: float = 0.0) -> MixingReport:
    """Grid generalized quadrangle GQ(q, 1) = pg(q+1, 2, 1)."""
    if q < 2:
        raise InvalidParams("need q >= 2")
    return pg_mixing_report(PartialGeometryParams(K=q + 1, R=2, T=1), eps)


def latin_crossover_report(l: int) -> MixingReport:
    """Rates for the Latin-square point geometry pg(l, 3, 2).

    rho_tilde = 1/sqrt(2l-2) for every l > 3; rho_nbrw switches from the
    flat to the curved branch around l = 9 + 2 sqrt(14).
    """
    if l <= 3:
        raise InvalidParams("need l > 3")
    return pg_mixing_report(PartialGeometryParams(K=l, R=3, T=2), eps=0.0)


# --- growth rate of the scalar recurrence ----------------------------------

def qk_exceptional_point(d: int, l: int, delta: float) -> float:
    """Argument where the dominant solution's coefficient vanishes.

    Lies below -1 exactly when l(1-delta) > d; this is where the image of
    the eigenvalue -d lands.
    """
    base = (l - 1) * (1.0 - delta) * (d - 1 + delta)
    return (-d - (l - 2) * (1.0 - delta)) / (2.0 * math.sqrt(base))


def qk_growth_rate_closed_form(y: float, d: int, l: int, delta: float) -> float:
    """limsup |q_k(y)|^(1/k): 1 inside [-1,1], |y|+sqrt(y^2-1) outside,
    except the single decaying point in the l(1-delta) > d regime."""
    if not 0.0 <= delta < 1.0:
        raise HypothesisViolation(f"need 0 <= delta < 1, got {delta}")
    if l < 2 or d < 2:
        raise HypothesisViolation("need d >= 2 and l >= 2")
    gt = l * (1.0 - delta) > d
    if not gt and d <= 2:
        raise HypothesisViolation("the l(1-delta) <= d branch needs d > 2")
    ay = abs(y)
    if ay <= 1.0:
        return 1.0
    if gt:
        y0 = qk_exceptional_point(d, l, delta)
        if abs(y - y0) <= Y0_MATCH_TOL:
            return math.sqrt((d - 1 + delta) / ((l - 1) * (1.0 - delta)))
    return ay + math.sqrt(ay * ay - 1.0)

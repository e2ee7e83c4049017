"""
Numerical verification of the limit J_B(2 sqrt(mu) x, iy) -> J_A(-x^2, y^2).

Sweeps evaluate the error E = |J_B(2 sqrt(mu) x, iy) - J_A(-x^2, y^2)| over a
grid of mu values and points, divide by the bound's point-dependent factor D
and report mu * E / D. The constant of the bound is only known to exist, so it
is estimated (empirical_constant) and checked against a frozen ceiling, and
the 1/mu rate is checked through the slope of log E against log mu.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from bessel import besselA, besselB_at_imag, besselB_scaled_diff, bessel_j
from errors import DomainError
from hypergeo import (
    in_ratio_bound_regime,
    lemma32_bound,
    pochhammer_ratio,
    pochhammer_ratio_minus_one,
    ratio_bound,
)
from jack import AlphaLike, EvalVector, VectorLike, as_alpha, as_vector, kernel_for
from models import (
    DEFAULT_MAX_NORM_PRODUCT,
    DEFAULT_POINT_BOX,
    DEFAULT_SMALL_FRACTION,
    DEFAULT_SMALL_NORM_PRODUCT,
    PROPOSITION12_K2,
    CheckReport,
    ConvergenceOrder,
    EvalPoint,
    MultiplicityB,
    PointPayload,
    SeriesPolicy,
    SeriesResult,
    SweepConfig,
    SweepRecord,
    VerificationReport,
)
from partitions import Partition, enumerate_partitions

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-10


class Evaluation(NamedTuple):
    """Error and bound factor of one (mu, point) pair."""
    error: float
    denominator: float
    converged: bool

    def ratio(self, mu: float) -> float:
        return 0.0 if self.denominator == 0.0 else mu * self.error / self.denominator


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    passed: bool


class Lemma32Check(NamedTuple):
    lhs: float
    rhs: float
    passed: bool
    ratio: float
    ratio_bound: float
    ratio_passed: bool


class OneDimCheck(NamedTuple):
    sup_ratio: float
    passed: bool


def generate_points(N: int, count: int, seed: int,
                    box: float = DEFAULT_POINT_BOX,
                    max_norm_product: float = DEFAULT_MAX_NORM_PRODUCT,
                    small_fraction: float = DEFAULT_SMALL_FRACTION,
                    small_norm_product: float = DEFAULT_SMALL_NORM_PRODUCT) -> List[EvalPoint]:
    """
    Seeded random points for a sweep.

    Coordinates are uniform on [-box, box]. Points with |x||y| above
    max_norm_product are scaled down into [max_norm_product/2, max_norm_product],
    and a fraction small_fraction of the points is scaled into
    [small_norm_product/20, small_norm_product] so that the small-argument
    regime is covered.

    Args:
        N: Dimension.
        count: Number of points.
        seed: Seed for numpy.random.default_rng.

    Returns:
        List of EvalPoint, identical for identical arguments.
    """
    if N < 1 or count < 1:
        raise DomainError(f"need N >= 1 and count >= 1, got N={N}, count={count}")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-box, box, size=(count, N))
    ys = rng.uniform(-box, box, size=(count, N))
    targets = rng.uniform(0.5, 1.0, size=count)
    small_targets = rng.uniform(0.05, 1.0, size=count)
    n_small = int(round(small_fraction * count))
    small = set(rng.choice(count, size=n_small, replace=False).tolist()) if n_small else set()

    points = []
    for i in range(count):
        x = xs[i]
        y = ys[i]
        p = float(np.linalg.norm(x) * np.linalg.norm(y))
        if i in small:
            target = small_norm_product * float(small_targets[i])
        elif p > max_norm_product:
            target = max_norm_product * float(targets[i])
        else:
            target = p
        if p > 0 and target != p:
            f = math.sqrt(target / p)
            x = x * f
            y = y * f
        points.append(EvalPoint(x=tuple(float(v) for v in x), y=tuple(float(v) for v in y)))
    return points


def _require_regime(mult: MultiplicityB) -> None:
    if not mult.in_proposition_regime:
        raise DomainError(f"k1={mult.k1} < k2(N-1)={mult.k2 * (mult.N - 1)}")


def _closed_form_difference(mult: MultiplicityB, pt: EvalPoint) -> float:
    """k2 = 0: both sides from the product and exponential formulas."""
    scale = 2.0 * math.sqrt(mult.mu)
    b = besselB_at_imag(mult, pt.vx.scaled(scale), pt.vy).value
    a = besselA(0.0, pt.x_squared.scaled(-1.0), pt.y_squared).value
    return b - a


def _difference(mult: MultiplicityB, pt: EvalPoint, policy: SeriesPolicy) -> Tuple[float, bool]:
    if mult.k2 == 0:
        return abs(_closed_form_difference(mult, pt)), True
    result = besselB_scaled_diff(mult, pt.vx, pt.vy, policy)
    return abs(result.value), result.converged


def evaluate_prop11(mult: MultiplicityB, pt: EvalPoint, policy: SeriesPolicy) -> Evaluation:
    if mult.k2 <= 0:
        raise DomainError("the locally uniform bound is stated for k2 > 0")
    _require_regime(mult)
    error, converged = _difference(mult, pt, policy)
    s = pt.norm_product ** 2
    return Evaluation(error, s * s * math.exp(s), converged)


def evaluate_prop12(mult: MultiplicityB, pt: EvalPoint, policy: SeriesPolicy,
                    restrict_k2: bool = True) -> Evaluation:
    if restrict_k2 and mult.k2 not in PROPOSITION12_K2:
        raise DomainError(f"the uniform bound is stated for k2 in {PROPOSITION12_K2}, got {mult.k2}")
    _require_regime(mult)
    error, converged = _difference(mult, pt, policy)
    s = pt.norm_product ** 2
    return Evaluation(error, min(s * s, 1.0), converged)


def prop11_ratio(mult: MultiplicityB, pt: EvalPoint, policy: Optional[SeriesPolicy] = None) -> float:
    """
    mu * E / (|x|^4 |y|^4 e^{|x|^2 |y|^2}), E from the single-series difference.

    Zero when x or y vanishes.
    """
    return evaluate_prop11(mult, pt, policy or SeriesPolicy()).ratio(mult.mu)


def prop12_ratio(mult: MultiplicityB, pt: EvalPoint, policy: Optional[SeriesPolicy] = None) -> float:
    """
    mu * E / min(|x|^4 |y|^4, 1) for k2 in {0, 1/2, 1, 2}; k2 = 0 runs on the
    closed forms.
    """
    return evaluate_prop12(mult, pt, policy or SeriesPolicy()).ratio(mult.mu)


def conjecture_ratio(mult: MultiplicityB, pt: EvalPoint, policy: Optional[SeriesPolicy] = None) -> float:
    """The uniform ratio of prop12_ratio at any k2 >= 0."""
    return evaluate_prop12(mult, pt, policy or SeriesPolicy(), restrict_k2=False).ratio(mult.mu)


def naive_difference(mult: MultiplicityB, pt: EvalPoint, policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    besselB_at_imag(2 sqrt(mu) x, y) - besselA(k2, -x^2, y^2) as two separate
    series; only stable for moderate mu.
    """
    policy = policy or SeriesPolicy()
    scale = 2.0 * math.sqrt(mult.mu)
    b = besselB_at_imag(mult, pt.vx.scaled(scale), pt.vy, policy)
    a = besselA(mult.k2, pt.x_squared.scaled(-1.0), pt.y_squared, policy)
    return SeriesResult(
        value=b.value - a.value,
        tail_bound=b.tail_bound + a.tail_bound,
        weights_summed=max(b.weights_summed, a.weights_summed),
        converged=b.converged and a.converged,
        rigorous=b.rigorous and a.rigorous,
    )


def lemma31_check(alpha: AlphaLike, x: VectorLike, y: VectorLike, m: int) -> BoundCheck:
    """
    sum_{|lambda| = m} C(x^2) C(y^2) / C(1) <= |x|^{2m} |y|^{2m}.
    """
    x = as_vector(x)
    y = as_vector(y)
    if x.N != y.N:
        raise DomainError(f"dimension mismatch: x has {x.N} coordinates, y has {y.N}")
    if m < 0:
        raise DomainError(f"weight must be nonnegative, got {m}")
    kernel = kernel_for(as_alpha(alpha), x.squared(), y.squared())
    lhs = math.fsum(kernel.ratio(lam) for lam in enumerate_partitions(m, x.N))
    rhs = (x.norm() * y.norm()) ** (2 * m)
    return BoundCheck(lhs, rhs, lhs <= rhs * (1 + BOUND_SLACK))


def lemma32_check(N: int, k1: float, k2: float, lam: Partition) -> Lemma32Check:
    """
    |1 - mu^|lambda| / (mu)_lambda| against its quadratic-in-|lambda| bound,
    together with mu^|lambda| / (mu)_lambda <= 2^{N(N-1)(k2+1)/2}.
    """
    if k2 <= 0 or k1 <= 0:
        raise DomainError(f"need k1 > 0 and k2 > 0, got k1={k1}, k2={k2}")
    if k1 < k2 * (N - 1) and not math.isclose(k1, k2 * (N - 1), rel_tol=1e-12):
        raise DomainError(f"k1={k1} < k2(N-1)={k2 * (N - 1)}")
    if lam.length > N:
        raise DomainError(f"partition {lam} has more than N={N} parts")
    mu = k1 + k2 * (N - 1) + 0.5
    alpha = 1.0 / k2
    lhs = abs(pochhammer_ratio_minus_one(mu, lam, alpha))
    rhs = lemma32_bound(N, k1, k2, lam.weight)
    ratio = pochhammer_ratio(mu, lam, alpha)
    cap = ratio_bound(N, k2)
    ratio_ok = ratio <= cap * (1 + BOUND_SLACK)
    return Lemma32Check(lhs, rhs, lhs <= rhs * (1 + BOUND_SLACK) and ratio_ok, ratio, cap, ratio_ok)


def onedim_error(mu: float, x: float) -> float:
    """|j_{mu-1}(sqrt(mu) x) - e^{-x^2/4}|."""
    return abs(bessel_j(mu - 1.0, math.sqrt(mu) * x) - math.exp(-x * x / 4.0))


def onedim_check(mu: float, xs: Sequence[float], ceiling: Optional[float] = None) -> OneDimCheck:
    """
    sup over xs of mu * |j_{mu-1}(sqrt(mu) x) - e^{-x^2/4}| / min(x^4, 1).

    Passes when the supremum is finite and, if a ceiling is given, below it.
    """
    if mu <= 2:
        raise DomainError(f"the one-dimensional estimate needs mu > 2, got {mu}")
    sup = 0.0
    for x in xs:
        if x == 0:
            continue
        d = min(x ** 4, 1.0)
        sup = max(sup, mu * onedim_error(mu, x) / d)
    passed = math.isfinite(sup) and (ceiling is None or sup <= ceiling)
    return OneDimCheck(sup, passed)


def fit_convergence_order(mus: Sequence[float], errors: Sequence[float]) -> Optional[float]:
    """
    Minus the slope of the least-squares line of log E on log mu.

    Pairs with a zero or non-finite error are dropped; None when fewer than two
    remain.
    """
    pairs = [(m, e) for m, e in zip(mus, errors) if e > 0 and math.isfinite(e)]
    if len(pairs) < 2 or len({m for m, _ in pairs}) < 2:
        return None
    log_mu = np.log([m for m, _ in pairs])
    log_e = np.log([e for _, e in pairs])
    slope, _ = np.polyfit(log_mu, log_e, 1)
    return float(-slope)


def _median(values: Iterable[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.median(present)) if present else None


_EVALUATORS = {
    "prop11": evaluate_prop11,
    "prop12": evaluate_prop12,
    "conjecture": lambda mult, pt, policy: evaluate_prop12(mult, pt, policy, restrict_k2=False),
}


def _evaluate_task(task: Tuple[str, MultiplicityB, EvalPoint, SeriesPolicy]) -> Evaluation:
    subject, mult, pt, policy = task
    return _EVALUATORS[subject](mult, pt, policy)


class VerificationHarness:
    """
    Runs proposition sweeps, sequentially or across worker processes.

    The report is assembled in (mu index, point index) order whatever the
    worker count, so the output bytes do not depend on it.
    """

    def __init__(self, workers: int = 1):
        """
        Args:
            workers: Number of worker processes; 1 evaluates in-process.
        """
        if workers < 1:
            raise DomainError(f"workers must be positive, got {workers}")
        self.workers = workers

    def _map(self, tasks: List[Tuple[str, MultiplicityB, EvalPoint, SeriesPolicy]],
             chunksize: int) -> List[Evaluation]:
        if self.workers == 1:
            return [_evaluate_task(t) for t in tasks]
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(_evaluate_task, tasks, chunksize=chunksize))

    def run(self, config: SweepConfig) -> VerificationReport:
        mus = config.mu_grid
        points = config.point_grid
        logger.info(
            f"Starting {config.subject} sweep: N={config.N} k2={config.k2:g}, {len(mus)} mu values x "
            f"{len(points)} points, policy {config.policy.policy_id}, {self.workers} worker(s)"
        )
        mults = [config.multiplicity(mu) for mu in mus]
        for mult in mults:
            if not series_regime(mult):
                logger.warning(f"mu={mult.mu:g}: tail bounds are advisory outside the ratio-bound regime")
        # point-major so one worker sees every mu of a point and reuses its Jack tables
        tasks = [
            (config.subject, mult, pt, config.policy)
            for pt in points
            for mult in mults
        ]
        results = self._map(tasks, chunksize=len(mults))
        by_point = [results[i * len(mults):(i + 1) * len(mults)] for i in range(len(points))]

        records: List[SweepRecord] = []
        failures: List[Dict[str, Any]] = []
        for mi, (mu, mult) in enumerate(zip(mus, mults)):
            for pi, pt in enumerate(points):
                ev = by_point[pi][mi]
                ratio = ev.ratio(mu)
                records.append(SweepRecord(
                    mu=mu,
                    point=PointPayload(x=list(pt.x), y=list(pt.y)),
                    error=ev.error,
                    denominator=ev.denominator,
                    ratio=ratio,
                    converged=ev.converged,
                    boundary_of_hypothesis=mult.on_boundary,
                ))
                if not ev.converged:
                    failures.append({"mu": mu, "point_index": pi, "reason": "series did not converge"})
                elif not math.isfinite(ratio):
                    failures.append({"mu": mu, "point_index": pi, "reason": "non-finite ratio"})

        finite = [r.ratio for r in records if math.isfinite(r.ratio)]
        empirical_constant = max(finite) if finite else 0.0

        convergence_order = None
        if len(mus) >= 2:
            per_point = [
                fit_convergence_order(mus, [ev.error for ev in by_point[pi]])
                for pi in range(len(points))
            ]
            convergence_order = ConvergenceOrder(per_point=per_point, median=_median(per_point))

        informational = config.subject == "conjecture"
        if config.ceiling is not None and empirical_constant > config.ceiling:
            failures.append({
                "reason": "empirical constant above ceiling",
                "empirical_constant": empirical_constant,
                "ceiling": config.ceiling,
            })
        passed = informational or not failures
        if informational and failures:
            logger.info(f"conjecture sweep: {len(failures)} finding(s) reported without failing")

        inputs = {
            "N": config.N,
            "k2": config.k2,
            "mu": list(mus),
            "points": len(points),
            "seed": config.seed,
            "ceiling": config.ceiling,
            "max_weight": config.policy.max_weight,
            "rel_tol": config.policy.rel_tol,
            "abs_tol": config.policy.abs_tol,
            "policy_id": config.policy.policy_id,
        }
        report = VerificationReport(
            command=f"verify {config.subject}",
            inputs=inputs,
            records=records,
            empirical_constant=empirical_constant,
            convergence_order=convergence_order,
            passed=passed,
            informational=informational,
            failures=[] if informational else failures,
        )
        median = None if convergence_order is None else convergence_order.median
        logger.info(
            f"{config.subject} sweep finished: empirical constant {empirical_constant:.6g}, "
            f"median order {median}, pass={passed}"
        )
        return report


def run_sweep(config: SweepConfig, workers: int = 1) -> VerificationReport:
    """Run one proposition sweep; see VerificationHarness."""
    return VerificationHarness(workers).run(config)


def lemma31_sweep(N: int, alpha: AlphaLike, max_weight: int, points: int, seed: int,
                  box: float = 2.0) -> CheckReport:
    """lemma31_check over seeded points in [-box, box]^N and every weight up to max_weight."""
    a = as_alpha(alpha)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-box, box, size=(points, N))
    ys = rng.uniform(-box, box, size=(points, N))
    records = []
    all_passed = True
    for m in range(max_weight + 1):
        worst = 0.0
        failures = 0
        for i in range(points):
            check = lemma31_check(a, EvalVector.of(xs[i]), EvalVector.of(ys[i]), m)
            if check.rhs > 0:
                worst = max(worst, check.lhs / check.rhs)
            if not check.passed:
                failures += 1
        all_passed = all_passed and failures == 0
        records.append({"m": m, "max_lhs_over_rhs": worst, "failures": failures})
    logger.info(f"lemma31 sweep N={N} alpha={a:g}: pass={all_passed}")
    return CheckReport(
        command="verify lemma31",
        inputs={"N": N, "alpha": a, "max_weight": max_weight, "points": points, "seed": seed, "box": box},
        records=records,
        summary={"max_lhs_over_rhs": max(r["max_lhs_over_rhs"] for r in records)},
        passed=all_passed,
    )


def default_k1_grid(N: int, k2: float) -> List[float]:
    """{k2(N-1), 2, 10, 100} without non-positive entries."""
    grid = []
    for k1 in (k2 * (N - 1), 2.0, 10.0, 100.0):
        if k1 > 0 and k1 >= k2 * (N - 1) and k1 not in grid:
            grid.append(k1)
    return grid


def lemma32_sweep(N: int, k2: float, max_weight: int,
                  k1_grid: Optional[Sequence[float]] = None) -> CheckReport:
    """lemma32_check for every partition with at most N parts up to max_weight."""
    k1_grid = list(k1_grid) if k1_grid is not None else default_k1_grid(N, k2)
    records = []
    all_passed = True
    for k1 in k1_grid:
        for m in range(max_weight + 1):
            worst = 0.0
            max_ratio = 0.0
            failures = 0
            for lam in enumerate_partitions(m, N):
                check = lemma32_check(N, k1, k2, lam)
                if check.rhs > 0:
                    worst = max(worst, check.lhs / check.rhs)
                max_ratio = max(max_ratio, check.ratio)
                if not check.passed:
                    failures += 1
            all_passed = all_passed and failures == 0
            records.append({
                "k1": k1,
                "weight": m,
                "max_lhs_over_rhs": worst,
                "max_ratio": max_ratio,
                "ratio_bound": ratio_bound(N, k2),
                "failures": failures,
            })
    logger.info(f"lemma32 sweep N={N} k2={k2:g}: pass={all_passed}")
    return CheckReport(
        command="verify lemma32",
        inputs={"N": N, "k2": k2, "max_weight": max_weight, "k1": k1_grid},
        records=records,
        summary={"max_lhs_over_rhs": max((r["max_lhs_over_rhs"] for r in records), default=0.0)},
        passed=all_passed,
    )


def default_onedim_grid(count: int = 200, upper: float = 10.0) -> List[float]:
    """count equally spaced points in (0, upper]."""
    return [float(v) for v in np.linspace(upper / count, upper, count)]


def onedim_sweep(mus: Sequence[float], xs: Optional[Sequence[float]] = None,
                 ceiling: Optional[float] = None, order_x: float = 1.0) -> CheckReport:
    """
    onedim_check for each mu, with the spread of the suprema across mu and the
    fitted order of E(mu) at x = order_x.
    """
    xs = list(xs) if xs is not None else default_onedim_grid()
    records = []
    for mu in mus:
        check = onedim_check(mu, xs, ceiling)
        records.append({"mu": mu, "sup_ratio": check.sup_ratio, "pass": check.passed})
    sups = [r["sup_ratio"] for r in records]
    spread = (max(sups) / min(sups) - 1.0) if sups and min(sups) > 0 else None
    order = fit_convergence_order(mus, [onedim_error(mu, order_x) for mu in mus])
    passed = all(r["pass"] for r in records)
    logger.info(f"onedim sweep over {len(mus)} mu values: spread={spread} order={order} pass={passed}")
    return CheckReport(
        command="verify onedim",
        inputs={"mu": list(mus), "points": len(xs), "ceiling": ceiling, "order_x": order_x},
        records=records,
        summary={"sup_ratio_spread": spread, "order_at_x": order, "max_sup_ratio": max(sups, default=0.0)},
        passed=passed,
    )


def series_regime(mult: MultiplicityB) -> bool:
    """True when the proposition series carry rigorous tail bounds for this multiplicity."""
    return mult.k2 == 0 or in_ratio_bound_regime(mult.alpha, mult.mu, mult.N)

"""Monte Carlo estimators, statistical checks and experiment configuration."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from swapsim.geometry import MeasurementDirection, agreement_probability, singlet_correlation
from swapsim.sampler import Counts, count, full_batches, protocol1_batches
from swapsim.streams import default_seed, derive_seed

Z_CI = 3.0  # Wald interval half-width, ~99.7%
Z_PASS = 4.5
CHI2_LEVEL = 1e-3
DEGENERATE_MAX_COUNT = 20


@dataclass(frozen=True)
class EstimatorResult:
    n: int
    estimate: float
    std_err: float
    ci_low: float
    ci_high: float
    kind: str = "probability"

    @classmethod
    def probability(cls, successes: int, n: int) -> EstimatorResult:
        p = successes / n
        se = math.sqrt(p * (1.0 - p) / n)
        return cls(n, p, se, p - Z_CI * se, p + Z_CI * se, "probability")

    @classmethod
    def correlation(cls, product_sum: int, n: int) -> EstimatorResult:
        e = product_sum / n
        se = math.sqrt(max(1.0 - e * e, 0.0) / n)
        return cls(n, e, se, e - Z_CI * se, e + Z_CI * se, "correlation")

    def z(self, target: float) -> float:
        """Standardised deviation; +-inf when the estimate is degenerate but off target."""
        diff = self.estimate - target
        if self.std_err == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / self.std_err


def agrees_with(result: EstimatorResult, target: float, z_max: float = Z_PASS) -> bool:
    """Per-estimate pass rule.

    Near a 0/1 target the normal approximation breaks down, so there the
    test is on the raw count of off-target outcomes instead.
    """
    if result.kind == "probability" and (target in (0.0, 1.0)):
        off = result.estimate if target == 0.0 else 1.0 - result.estimate
        return off * result.n <= DEGENERATE_MAX_COUNT
    return abs(result.z(target)) <= z_max


def chi_square_pvalue(z_scores) -> float:
    """P-value of sum(z^2) under chi^2 with len(z) degrees of freedom."""
    z = np.asarray(z_scores, dtype=float)
    return float(stats.chi2.sf(np.sum(z * z), df=z.size))


def full_counts(x, y, n: int, seed: int) -> Counts:
    return count(full_batches(x, y, n, seed))


def estimate_agreement(x, y, n: int, seed: int) -> EstimatorResult:
    """P(a = b | x, y) from n rounds of the 9-bit protocol; target (1 - x.y)/2."""
    if n < 100:
        raise ValueError("n must be at least 100")
    c = full_counts(x, y, n, seed)
    return EstimatorResult.probability(c.agree, c.n)


def estimate_correlation(x, y, n: int, seed: int) -> EstimatorResult:
    """E(x, y) = mean(a b); target -x.y."""
    if n < 100:
        raise ValueError("n must be at least 100")
    c = full_counts(x, y, n, seed)
    return EstimatorResult.correlation(c.product_sum, c.n)


def estimate_agreement_p1(phiA: float, phiB: float, n: int, seed: int) -> EstimatorResult:
    c = count(protocol1_batches(phiA, phiB, n, seed))
    return EstimatorResult.probability(c.agree, c.n)


def marginals(c: Counts) -> tuple[EstimatorResult, EstimatorResult]:
    return EstimatorResult.probability(c.a_plus, c.n), EstimatorResult.probability(c.b_plus, c.n)


# x1 = pi/2, x2 = 0 puts the odd-signed correlator in the E22 slot
CHSH_X = (math.pi / 2, 0.0)
CHSH_Y = (math.pi / 4, 3 * math.pi / 4)


@dataclass(frozen=True)
class ChshResult:
    S: float
    std_err: float
    correlators: tuple[EstimatorResult, ...]

    @property
    def target(self) -> float:
        return 2.0 * math.sqrt(2.0)


def chsh(n_per_setting: int, seed: int, offset: float = 0.0) -> ChshResult:
    """S = E11 + E12 + E21 - E22 with equatorial settings.

    ``offset`` rotates all four settings by a common angle, which leaves S
    unchanged for a rotation-invariant model.
    """
    if n_per_setting < 10_000:
        raise ValueError("n_per_setting must be at least 1e4")
    results = []
    for i, pa in enumerate(CHSH_X):
        for j, pb in enumerate(CHSH_Y):
            x = MeasurementDirection.equatorial(pa + offset)
            y = MeasurementDirection.equatorial(pb + offset)
            results.append(estimate_correlation(x, y, n_per_setting, derive_seed(seed, i, j)))
    e11, e12, e21, e22 = (r.estimate for r in results)
    s = e11 + e12 + e21 - e22
    se = math.sqrt(sum(r.std_err**2 for r in results))
    return ChshResult(s, se, tuple(results))


def random_pairs(count_: int, seed: int, equatorial: bool = False):
    """Reproducible list of (x, y) setting pairs."""
    rng = np.random.default_rng(derive_seed(seed, 0xC0FFEE))
    out = []
    for _ in range(count_):
        if equatorial:
            x = MeasurementDirection.equatorial(rng.uniform(0.0, 2 * math.pi))
            y = MeasurementDirection.equatorial(rng.uniform(0.0, 2 * math.pi))
        else:
            x = MeasurementDirection.random(rng)
            y = MeasurementDirection.random(rng)
        out.append((x, y))
    return out


@dataclass
class PairRow:
    phiA: float
    thetaA: float
    phiB: float
    thetaB: float
    p_hat: float
    target: float
    z: float
    std_err: float = field(default=0.0, repr=False)
    n: int = field(default=0, repr=False)
    passed: bool = field(default=True, repr=False)


def pair_study(pairs, n: int, seed: int, mode: str = "full") -> list[PairRow]:
    """Agreement estimate for every pair; each pair gets its own child seed."""
    rows = []
    for k, (x, y) in enumerate(pairs):
        s = derive_seed(seed, k)
        if mode == "p1":
            res = estimate_agreement_p1(x.phi, y.phi, n, s)
            target = math.sin((x.phi - y.phi) / 2.0) ** 2
        else:
            res = estimate_agreement(x, y, n, s)
            target = agreement_probability(x, y)
        rows.append(
            PairRow(x.phi, x.theta, y.phi, y.theta, res.estimate, target, res.z(target),
                    res.std_err, res.n, agrees_with(res, target))
        )
    return rows


def correlation_target(x, y) -> float:
    return singlet_correlation(x, y)


@dataclass
class ExperimentConfig:
    seed: int = field(default_factory=default_seed)
    n_rounds: int = 1_000_000
    mode: str = "full"
    pairs: int = 50
    fmt: str = "csv"
    transport: str = "inprocess"

    def __post_init__(self):
        if self.n_rounds < 1:
            raise ValueError("n_rounds must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.mode not in ("p1", "full"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")
        if self.transport not in ("inprocess", "tcp"):
            raise ValueError(f"unknown transport {self.transport!r}")

    def as_dict(self) -> dict:
        return asdict(self)

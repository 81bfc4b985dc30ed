"""Numerical studies: Poisson convergence, Bernoulli sweep, per-component
contribution curves, and the distributional Gini index.

Everything is seeded and deterministic: each (grid point, repeat) draws
from its own random stream derived from the experiment seed, so results do
not depend on evaluation order.  No plotting here; results are data tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DegenerateInput, InvalidParams, NonSeparableMeasure
from .measures import (
    MEASURE_ORDER,
    CoefficientVector,
    Measure,
    MeasureSpec,
    evaluate,
    gini,
)

__all__ = [
    "DistributionSpec",
    "ExperimentResult",
    "ContributionTable",
    "sample_vector",
    "poisson_convergence",
    "bernoulli_sweep",
    "contribution_curves",
    "distributional_gini",
    "sample_gini",
    "minmax_normalize",
    "SEPARABLE_MEASURES",
    "default_specs",
]


@dataclass(frozen=True)
class DistributionSpec:
    """A coefficient distribution: poisson, bernoulli01, uniform, or exponential."""

    kind: str
    lam: float = 5.0  # poisson rate
    p: float = 0.5  # bernoulli01: probability of a zero coefficient
    lo: float = 0.0  # uniform bounds
    hi: float = 1.0
    rate: float = 1.0  # exponential rate

    _KINDS = ("poisson", "bernoulli01", "uniform", "exponential")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise InvalidParams(f"unknown distribution kind {self.kind!r}")
        if self.kind == "poisson" and not self.lam > 0:
            raise InvalidParams("poisson requires lam > 0")
        if self.kind == "bernoulli01" and not 0 <= self.p <= 1:
            raise InvalidParams("bernoulli01 requires 0 <= p <= 1")
        if self.kind == "uniform" and not 0 <= self.lo < self.hi:
            raise InvalidParams("uniform requires 0 <= lo < hi")
        if self.kind == "exponential" and not self.rate > 0:
            raise InvalidParams("exponential requires rate > 0")

    @classmethod
    def poisson(cls, lam: float = 5.0) -> "DistributionSpec":
        return cls("poisson", lam=lam)

    @classmethod
    def bernoulli01(cls, p: float) -> "DistributionSpec":
        return cls("bernoulli01", p=p)

    @classmethod
    def uniform(cls, lo: float = 0.0, hi: float = 1.0) -> "DistributionSpec":
        return cls("uniform", lo=lo, hi=hi)

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "DistributionSpec":
        return cls("exponential", rate=rate)


def _poisson_cdf(lam: float) -> np.ndarray:
    """Cumulative pmf table, long enough that the tail mass is < 1e-15."""
    pmf = math.exp(-lam)
    cdf = [pmf]
    k = 0
    while 1.0 - cdf[-1] > 1e-15 and k < max(200, int(20 * lam)):
        k += 1
        pmf *= lam / k
        cdf.append(cdf[-1] + pmf)
    return np.asarray(cdf)


def sample_vector(
    dist: DistributionSpec, n: int, seed: int | np.random.Generator = 0
) -> CoefficientVector:
    """Draw ``n`` coefficients; deterministic in (dist, n, seed).

    Poisson values come from inversion of the cumulative pmf, so the draw
    does not depend on any library's Poisson sampler.
    """
    if n < 1:
        raise InvalidParams("n must be >= 1")
    rng = (
        seed
        if isinstance(seed, np.random.Generator)
        else np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    )
    u = rng.random(n)
    if dist.kind == "poisson":
        values = np.searchsorted(_poisson_cdf(dist.lam), u, side="right").astype(float)
    elif dist.kind == "bernoulli01":
        values = np.where(u < dist.p, 0.0, 1.0)
    elif dist.kind == "uniform":
        values = dist.lo + (dist.hi - dist.lo) * u
    else:  # exponential
        values = -np.log1p(-u) / dist.rate
    return CoefficientVector(values)


def minmax_normalize(series) -> np.ndarray:
    """Rescale to [0, 1]; a constant series maps to all zeros."""
    arr = np.asarray(series, dtype=float)
    if arr.size == 0:
        raise InvalidParams("cannot normalize an empty series")
    if not np.all(np.isfinite(arr)):
        raise InvalidParams("cannot normalize a series with non-finite values")
    span = arr.max() - arr.min()
    if span == 0.0:
        return np.zeros_like(arr)
    return (arr - arr.min()) / span


def default_specs(**overrides) -> dict[Measure, MeasureSpec]:
    """One spec per measure, with optional parameter overrides."""
    return {m: MeasureSpec(m, **overrides) for m in MEASURE_ORDER}


@dataclass
class ExperimentResult:
    """Raw values, per-point summaries, and min-max normalized mean series."""

    name: str
    sweep_name: str
    sweep_values: list[float]
    measures: list[Measure]
    raw: dict[Measure, np.ndarray]  # shape (len(sweep_values), repeats)
    metadata: dict = field(default_factory=dict)

    def mean(self, measure: Measure) -> np.ndarray:
        return self.raw[measure].mean(axis=1)

    def std(self, measure: Measure) -> np.ndarray:
        return self.raw[measure].std(axis=1, ddof=1)

    def normalized(self, measure: Measure) -> np.ndarray:
        return minmax_normalize(self.mean(measure))

    def summary_rows(self):
        """Rows of (sweep value, measure, mean, std, normalized mean)."""
        for m in self.measures:
            mean, std, norm = self.mean(m), self.std(m), self.normalized(m)
            for i, x in enumerate(self.sweep_values):
                yield (x, m.value, float(mean[i]), float(std[i]), float(norm[i]))

    def raw_rows(self):
        """Rows of (sweep value, measure, repeat index, raw value)."""
        for m in self.measures:
            for i, x in enumerate(self.sweep_values):
                for r, v in enumerate(self.raw[m][i]):
                    yield (x, m.value, r, float(v))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "sweep": self.sweep_name,
            "metadata": self.metadata,
            "summary": [
                {
                    self.sweep_name: row[0],
                    "measure": row[1],
                    "mean": row[2],
                    "std": row[3],
                    "normalized": row[4],
                }
                for row in self.summary_rows()
            ],
        }


def _evaluate_all(
    specs: dict[Measure, MeasureSpec],
    draw,
    stream_key: tuple,
    max_retries: int = 20,
) -> dict[Measure, float]:
    """Evaluate every measure on one draw, resampling degenerate draws."""
    for attempt in range(max_retries):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(stream_key + (attempt,)))
        )
        vec = draw(rng)
        try:
            return {m: evaluate(spec, vec) for m, spec in specs.items()}
        except DegenerateInput:
            continue
    raise DegenerateInput(
        f"draw for {stream_key} stayed degenerate after {max_retries} resamples"
    )


DEFAULT_SIZES = (10, 30, 100, 300, 1000, 3000)


def poisson_convergence(
    lam: float = 5.0,
    sizes=DEFAULT_SIZES,
    repeats: int = 50,
    seed: int = 0,
    specs: dict[Measure, MeasureSpec] | None = None,
) -> ExperimentResult:
    """All fifteen measures on Poisson draws, as a function of set size."""
    sizes = [int(n) for n in sizes]
    if any(n < 2 for n in sizes) or sorted(sizes) != sizes:
        raise InvalidParams("sizes must be ascending and each >= 2")
    if repeats < 2:
        raise InvalidParams("repeats must be >= 2")
    specs = specs or default_specs()
    dist = DistributionSpec.poisson(lam)
    raw = {m: np.empty((len(sizes), repeats)) for m in specs}
    for i, n in enumerate(sizes):
        for r in range(repeats):
            values = _evaluate_all(
                specs, lambda rng: sample_vector(dist, n, rng), (seed, i, r)
            )
            for m, v in values.items():
                raw[m][i, r] = v
    return ExperimentResult(
        name="poisson-convergence",
        sweep_name="n",
        sweep_values=[float(n) for n in sizes],
        measures=list(specs),
        raw=raw,
        metadata={
            "lam": lam,
            "repeats": repeats,
            "seed": seed,
            "measure_params": {m.value: vars(s) for m, s in specs.items()},
        },
    )


DEFAULT_BERNOULLI_GRID = tuple(k / 20 for k in range(1, 20))  # 0.05 .. 0.95

#: The module-default epsilon of 1 counts every coefficient of a 0/1 vector,
#: which degenerates the l0-eps series to a constant; the sweep therefore
#: defaults to epsilon=0.5 (counting the zeros) and records the override.
BERNOULLI_EPSILON = 0.5


def bernoulli_sweep(
    grid=DEFAULT_BERNOULLI_GRID,
    n: int = 1000,
    repeats: int = 20,
    seed: int = 0,
    specs: dict[Measure, MeasureSpec] | None = None,
) -> ExperimentResult:
    """All fifteen measures on 0/1 draws as the zero-probability p sweeps."""
    grid = [float(p) for p in grid]
    if any(not 0 < p < 1 for p in grid):
        raise InvalidParams("grid values must lie strictly inside (0, 1)")
    if n < 2:
        raise InvalidParams("n must be >= 2")
    if specs is None:
        specs = default_specs(epsilon=BERNOULLI_EPSILON)
    raw = {m: np.empty((len(grid), repeats)) for m in specs}
    for i, p in enumerate(grid):
        dist = DistributionSpec.bernoulli01(p)
        for r in range(repeats):
            values = _evaluate_all(
                specs, lambda rng: sample_vector(dist, n, rng), (seed, i, r)
            )
            for m, v in values.items():
                raw[m][i, r] = v
    return ExperimentResult(
        name="bernoulli-sweep",
        sweep_name="p",
        sweep_values=grid,
        measures=list(specs),
        raw=raw,
        metadata={
            "n": n,
            "repeats": repeats,
            "seed": seed,
            "measure_params": {m.value: vars(s) for m, s in specs.items()},
        },
    )


#: Measures with an additive per-component term.
SEPARABLE_MEASURES = (
    Measure.L0,
    Measure.L0_EPS,
    Measure.NEG_L1,
    Measure.NEG_LP,
    Measure.NEG_TANH,
    Measure.NEG_LOG,
    Measure.HG,
    Measure.HS_PRIME,
    Measure.NEG_LP_NEG,
)


def _component_term(spec: MeasureSpec, x: float) -> float:
    m = spec.id
    if m is Measure.L0:
        return 1.0 if x == 0 else 0.0
    if m is Measure.L0_EPS:
        return 1.0 if x <= spec.epsilon else 0.0
    if m is Measure.NEG_L1:
        return -x
    if m is Measure.NEG_LP:
        return -(x**spec.p_frac)  # the power term inside the norm
    if m is Measure.NEG_TANH:
        return -math.tanh((spec.a * x) ** spec.b)
    if m is Measure.NEG_LOG:
        return -math.log1p(x * x)
    if m is Measure.HG:
        return -2.0 * math.log(x) if x > 0 else 0.0
    if m is Measure.HS_PRIME:
        return -2.0 * x * math.log(x) if x > 0 else 0.0
    if m is Measure.NEG_LP_NEG:
        return -(x**spec.p_neg) if x > 0 else 0.0
    raise NonSeparableMeasure(
        f"{m.value} has no additive per-component term (ratio or order-statistic measure)"
    )


@dataclass
class ContributionTable:
    """Per-component contribution of separable measures over an amplitude grid."""

    amplitudes: np.ndarray
    terms: dict[Measure, np.ndarray]

    def rows(self):
        for m, t in self.terms.items():
            for x, v in zip(self.amplitudes, t):
                yield (m.value, float(x), float(v))


def contribution_curves(amplitudes, specs=None) -> ContributionTable:
    """Additive per-component terms at each amplitude; separable measures only."""
    xs = np.asarray(list(amplitudes), dtype=float)
    if xs.size == 0 or np.any(xs < 0):
        raise InvalidParams("amplitude grid must be non-empty and non-negative")
    if specs is None:
        specs = [MeasureSpec(m) for m in SEPARABLE_MEASURES]
    terms = {}
    for spec in specs:
        if spec.id not in SEPARABLE_MEASURES:
            raise NonSeparableMeasure(
                f"{spec.id.value} has no additive per-component term"
            )
        terms[spec.id] = np.array([_component_term(spec, float(x)) for x in xs])
    return ContributionTable(xs, terms)


def _density_and_quantile(dist: DistributionSpec):
    if dist.kind == "uniform":
        lo, hi = dist.lo, dist.hi
        width = hi - lo

        def f(x):
            return 1.0 / width if lo <= x <= hi else 0.0

        return f, lambda q: lo + q * width, lo
    if dist.kind == "exponential":
        rate = dist.rate

        def f(x):
            return rate * math.exp(-rate * x) if x >= 0 else 0.0

        return f, lambda q: -math.log1p(-q) / rate, 0.0
    raise InvalidParams(
        f"distributional gini by quadrature needs a continuous distribution, got {dist.kind!r}"
    )


def distributional_gini(dist: DistributionSpec, tol: float = 1e-8) -> float:
    """Gini index of a distribution by nested adaptive quadrature.

    Integrates 1 - 2 * int (int_0^x t f(t) dt / mean) dF(x) over
    x in [lower, Q(1 - 1e-9)].
    """
    f, quantile, lower = _density_and_quantile(dist)
    upper = quantile(1.0 - 1e-9)

    def tf(t):
        return t * f(t)

    mean, _ = integrate.quad(tf, lower, upper, epsabs=tol * 1e-2, limit=200)
    if not mean > 0:
        raise InvalidParams("distribution must have positive mean")

    def outer(x):
        inner, _ = integrate.quad(tf, lower, x, epsabs=tol * 1e-2, limit=200)
        return (inner / mean) * f(x)

    area, _ = integrate.quad(outer, lower, upper, epsabs=tol, limit=400)
    return 1.0 - 2.0 * area


def sample_gini(dist: DistributionSpec, n: int, seed: int = 0) -> float:
    """Gini index of ``n`` seeded draws from the distribution."""
    return gini(sample_vector(dist, n, seed))

"""The six criterion transformations as explicit (before, after) pairs.

Each constructor validates its preconditions, records the parameters used,
and states the relation a compliant measure must exhibit between the two
vectors.  ``sample_trial`` draws random valid trials for the compliance
engine.

The generator draws coefficients on a dyadic grid (multiples of 2**-20)
and snaps transfer amounts to the same grid.  Sums of such values up to
the configured ranges are exact in float64, so Robin Hood and Babies
conserve the l1 mass bit-exactly under any summation order.

Everything here is pure construction; random state is caller-supplied and
never shared, so independent seeds are safe to use concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import GenerationFailure, InvalidTransform
from .measures import CoefficientVector

__all__ = [
    "Criterion",
    "Relation",
    "CriterionTrial",
    "TrialConfig",
    "robin_hood",
    "scale",
    "rising_tide",
    "clone",
    "bill_gates",
    "babies",
    "reapply",
    "sample_trial",
    "draw_trial",
    "draw_vector",
]

#: Grid resolution for generated coefficients and transfer amounts.
TICK = 2.0**-20
_TICKS_PER_UNIT = 2**20


class Criterion(str, Enum):
    """The six criteria: four Dalton laws plus Bill Gates and Babies."""

    D1 = "D1"  # Robin Hood: transfer from rich to poor must decrease sparsity
    D2 = "D2"  # Scaling: positive rescaling must leave sparsity unchanged
    D3 = "D3"  # Rising Tide: adding a constant must decrease sparsity
    D4 = "D4"  # Cloning: concatenating copies must leave sparsity unchanged
    P1 = "P1"  # Bill Gates: growing one coefficient must increase sparsity
    P2 = "P2"  # Babies: appending zeros must increase sparsity

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


CRITERION_ORDER: tuple[Criterion, ...] = tuple(Criterion)


class Relation(str, Enum):
    AFTER_STRICTLY_LESS = "after<before"
    EQUAL = "after==before"
    AFTER_STRICTLY_GREATER = "after>before"


REQUIRED_RELATION: dict[Criterion, Relation] = {
    Criterion.D1: Relation.AFTER_STRICTLY_LESS,
    Criterion.D2: Relation.EQUAL,
    Criterion.D3: Relation.AFTER_STRICTLY_LESS,
    Criterion.D4: Relation.EQUAL,
    Criterion.P1: Relation.AFTER_STRICTLY_GREATER,
    Criterion.P2: Relation.AFTER_STRICTLY_GREATER,
}


@dataclass(frozen=True)
class CriterionTrial:
    """One (before, after) comparison produced by a criterion transformation.

    For P1 the ``before`` vector already carries the +beta offset; ``after``
    adds alpha on top, matching the criterion's two perturbed vectors.
    """

    criterion: Criterion
    before: CoefficientVector
    after: CoefficientVector
    params: dict = field(default_factory=dict)

    @property
    def expected_relation(self) -> Relation:
        return REQUIRED_RELATION[self.criterion]


def robin_hood(c: CoefficientVector, i: int, j: int, alpha: float) -> CriterionTrial:
    """Move ``alpha`` from coefficient ``i`` to the smaller coefficient ``j``."""
    v = c.values
    if not v[i] > v[j]:
        raise InvalidTransform(f"robin hood requires c[i] > c[j], got {v[i]} <= {v[j]}")
    if not 0 < alpha < (v[i] - v[j]) / 2:
        raise InvalidTransform(
            f"robin hood requires 0 < alpha < (c[i]-c[j])/2, got alpha={alpha}"
        )
    out = v.copy()
    out[i] -= alpha
    out[j] += alpha
    return CriterionTrial(
        Criterion.D1, c, CoefficientVector(out), {"i": int(i), "j": int(j), "alpha": float(alpha)}
    )


def scale(c: CoefficientVector, alpha: float) -> CriterionTrial:
    """Multiply every coefficient by ``alpha`` (positive, not the trivial 1)."""
    if not alpha > 0:
        raise InvalidTransform(f"scaling requires alpha > 0, got {alpha}")
    if alpha == 1.0:
        raise InvalidTransform("scaling by exactly 1 is the trivial case")
    return CriterionTrial(
        Criterion.D2, c, CoefficientVector(alpha * c.values), {"alpha": float(alpha)}
    )


def rising_tide(c: CoefficientVector, alpha: float) -> CriterionTrial:
    """Add ``alpha`` to every coefficient; constant vectors are excluded."""
    if not alpha > 0:
        raise InvalidTransform(f"rising tide requires alpha > 0, got {alpha}")
    v = c.values
    if v.max() == v.min():
        raise InvalidTransform("rising tide excludes constant vectors")
    return CriterionTrial(Criterion.D3, c, CoefficientVector(v + alpha), {"alpha": float(alpha)})


def clone(c: CoefficientVector, m: int) -> CriterionTrial:
    """Concatenate ``m`` copies of the vector (total length m*N)."""
    if not (isinstance(m, (int, np.integer)) and m >= 2):
        raise InvalidTransform(f"cloning requires an integer m >= 2, got {m}")
    return CriterionTrial(
        Criterion.D4, c, CoefficientVector(np.tile(c.values, int(m))), {"m": int(m)}
    )


def bill_gates(c: CoefficientVector, i: int, beta: float, alpha: float) -> CriterionTrial:
    """Compare coefficient ``i`` grown by beta against grown by beta + alpha."""
    if not beta > 0:
        raise InvalidTransform(f"bill gates requires beta > 0, got {beta}")
    if not alpha > 0:
        raise InvalidTransform(f"bill gates requires alpha > 0, got {alpha}")
    bv = c.values.copy()
    bv[i] += beta
    av = bv.copy()
    av[i] += alpha
    return CriterionTrial(
        Criterion.P1,
        CoefficientVector(bv),
        CoefficientVector(av),
        {"i": int(i), "beta": float(beta), "alpha": float(alpha)},
    )


def babies(c: CoefficientVector, k: int = 1) -> CriterionTrial:
    """Append ``k`` zero coefficients; requires nonzero total mass."""
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise InvalidTransform(f"babies requires an integer k >= 1, got {k}")
    v = c.values
    if not v.any():
        raise InvalidTransform("babies requires nonzero total mass")
    return CriterionTrial(
        Criterion.P2, c, CoefficientVector(np.concatenate([v, np.zeros(int(k))])), {"k": int(k)}
    )


def reapply(trial: CriterionTrial) -> CoefficientVector:
    """Rebuild the after vector from the before vector and recorded params."""
    p = trial.params
    crit = trial.criterion
    if crit is Criterion.D1:
        return robin_hood(trial.before, p["i"], p["j"], p["alpha"]).after
    if crit is Criterion.D2:
        return scale(trial.before, p["alpha"]).after
    if crit is Criterion.D3:
        return rising_tide(trial.before, p["alpha"]).after
    if crit is Criterion.D4:
        return clone(trial.before, p["m"]).after
    if crit is Criterion.P1:
        # before already carries +beta; re-adding alpha reproduces after
        av = trial.before.values.copy()
        av[p["i"]] += p["alpha"]
        return CoefficientVector(av)
    if crit is Criterion.P2:
        return babies(trial.before, p["k"]).after
    raise InvalidTransform(f"unknown criterion {crit}")


@dataclass(frozen=True)
class TrialConfig:
    """Coefficient distribution and sampling policy for random trials.

    Defaults: lengths 2..64, values uniform on a dyadic grid over (0, 10],
    each entry zeroed with probability 0.2.  ``strictly_positive`` disables
    zeroing and keeps values at or above ``positive_floor`` (for measures
    with zero singularities).  ``value_cap`` shrinks the amplitude range
    (used for the tanh measure, which is numerically flat far from zero).

    ``min_gap_frac`` sets the smallest Robin Hood pair gap, and the
    smallest rising-tide spread, as a fraction of the largest coefficient;
    draws below it are not informative at the compliance tolerance and are
    redrawn.
    """

    n_min: int = 2
    n_max: int = 64
    value_max: float = 10.0
    zero_prob: float = 0.2
    strictly_positive: bool = False
    positive_floor: float = 0.01
    value_cap: float | None = None
    min_gap_frac: float = 0.01
    max_retries: int = 200

    @property
    def effective_max(self) -> float:
        return self.value_cap if self.value_cap is not None else self.value_max


def draw_vector(config: TrialConfig, rng: np.random.Generator) -> CoefficientVector:
    """Draw one coefficient vector on the dyadic grid."""
    n = int(rng.integers(config.n_min, config.n_max + 1))
    hi = int(round(config.effective_max * _TICKS_PER_UNIT))
    if config.strictly_positive:
        lo = max(1, int(math.ceil(config.positive_floor * _TICKS_PER_UNIT)))
        ticks = rng.integers(lo, hi + 1, size=n)
    else:
        ticks = rng.integers(0, hi + 1, size=n)
        ticks[rng.random(n) < config.zero_prob] = 0
    return CoefficientVector(ticks.astype(np.float64) * TICK)


def _min_gap_ticks(config: TrialConfig, values: np.ndarray) -> int:
    max_ticks = int(round(float(values.max()) * _TICKS_PER_UNIT))
    return max(3, int(math.ceil(config.min_gap_frac * max_ticks)))


def _draw_robin_hood(config: TrialConfig, rng: np.random.Generator) -> CriterionTrial | None:
    c = draw_vector(config, rng)
    v = c.values
    gap = _min_gap_ticks(config, v) * TICK if v.max() > 0 else None
    if gap is None:
        return None
    receivers = np.flatnonzero(v <= v.max() - gap)
    if receivers.size == 0:
        return None
    j = int(rng.choice(receivers))
    donors = np.flatnonzero(v >= v[j] + gap)
    i = int(rng.choice(donors))
    gap_ticks = int(round((v[i] - v[j]) * _TICKS_PER_UNIT))
    hi_alpha = (gap_ticks - 1) // 2
    if hi_alpha < 1:
        return None
    alpha_ticks = int(round(rng.uniform(0.2, 0.8) * gap_ticks / 2))
    alpha_ticks = min(max(alpha_ticks, 1), hi_alpha)
    return robin_hood(c, i, j, alpha_ticks * TICK)


def _draw_rising_tide(config: TrialConfig, rng: np.random.Generator) -> CriterionTrial | None:
    c = draw_vector(config, rng)
    v = c.values
    if v.max() == 0 or (v.max() - v.min()) < _min_gap_ticks(config, v) * TICK:
        return None
    alpha_ticks = max(
        1, int(round((rng.uniform(0.05, 0.5) * float(v.max()) + 0.01) * _TICKS_PER_UNIT))
    )
    return rising_tide(c, alpha_ticks * TICK)


def _draw_scale(config: TrialConfig, rng: np.random.Generator) -> CriterionTrial:
    c = draw_vector(config, rng)
    while True:
        alpha = math.exp(rng.uniform(math.log(0.1), math.log(10.0)))
        if abs(alpha - 1.0) > 0.01:
            return scale(c, alpha)


def _draw_p1_vector(
    config: TrialConfig, rng: np.random.Generator
) -> tuple[CoefficientVector, int, int] | None:
    """Vector, target index, and the policy beta (in ticks) for a P1 probe.

    The policy beta is 10 * (l1 + max - c_i), large enough that the grown
    coefficient dominates the rest of the vector.
    """
    c = draw_vector(config, rng)
    ticks = np.round(c.values * _TICKS_PER_UNIT).astype(np.int64)
    if ticks.sum() == 0:
        return None
    i = int(rng.integers(ticks.size))
    beta_ticks = 10 * int(ticks.sum() + ticks.max() - ticks[i])
    return c, i, beta_ticks


def draw_trial(
    criterion: Criterion, config: TrialConfig, rng: np.random.Generator
) -> CriterionTrial:
    """Draw one valid trial for ``criterion``, redrawing ineligible vectors."""
    for _ in range(config.max_retries):
        if criterion is Criterion.D1:
            trial = _draw_robin_hood(config, rng)
        elif criterion is Criterion.D2:
            trial = _draw_scale(config, rng)
        elif criterion is Criterion.D3:
            trial = _draw_rising_tide(config, rng)
        elif criterion is Criterion.D4:
            trial = clone(draw_vector(config, rng), int(rng.integers(2, 5)))
        elif criterion is Criterion.P1:
            drawn = _draw_p1_vector(config, rng)
            if drawn is None:
                trial = None
            else:
                c, i, beta_ticks = drawn
                l1_ticks = int(np.round(c.values * _TICKS_PER_UNIT).astype(np.int64).sum())
                mult = float(rng.choice([1e-3, 1.0, 1e3]))
                alpha_ticks = max(1, int(round(mult * l1_ticks)))
                trial = bill_gates(c, i, beta_ticks * TICK, alpha_ticks * TICK)
        elif criterion is Criterion.P2:
            c = draw_vector(config, rng)
            trial = babies(c, int(rng.integers(1, 4))) if c.values.any() else None
        else:  # pragma: no cover - exhaustive enum
            raise InvalidTransform(f"unknown criterion {criterion}")
        if trial is not None:
            return trial
    raise GenerationFailure(
        f"could not draw an eligible {criterion.value} trial in {config.max_retries} attempts"
    )


def sample_trial(
    criterion: Criterion, config: TrialConfig | None = None, seed: int = 0
) -> CriterionTrial:
    """Seeded convenience wrapper around :func:`draw_trial`."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return draw_trial(criterion, config or TrialConfig(), rng)

"""The fifteen sparsity measures and the Lorenz curve.

Every measure maps a vector of non-negative coefficient magnitudes to a
single real number that grows with sparsity (count and norm measures are
negated accordingly).  All evaluations sort the coefficients ascending
first, which makes permutation invariance bit-exact.

Conventions that the formulas leave open:

* natural logarithm everywhere;
* ``0 * log 0 == 0`` for the normalized Shannon entropy;
* the Gaussian entropy and the modified Shannon entropy sum over nonzero
  coefficients only, mirroring the explicit ``c_j != 0`` restriction of
  the negative-exponent power sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateInput, InvalidParams

__all__ = [
    "Measure",
    "MeasureSpec",
    "CoefficientVector",
    "LorenzCurve",
    "MEASURE_ORDER",
    "evaluate",
    "count_measures",
    "norm_measures",
    "ratio_measures",
    "separable_measures",
    "u_theta",
    "gini",
    "lorenz_curve",
    "measure_max",
]


class Measure(str, Enum):
    """Identifiers for the fifteen measures, in canonical table order."""

    L0 = "l0"
    L0_EPS = "l0-eps"
    NEG_L1 = "neg-l1"
    NEG_LP = "neg-lp"
    L2_OVER_L1 = "l2-over-l1"
    NEG_TANH = "neg-tanh"
    NEG_LOG = "neg-log"
    KAPPA4 = "kappa4"
    U_THETA = "u-theta"
    NEG_LP_NEG = "neg-lp-neg"
    HG = "hg"
    HS = "hs"
    HS_PRIME = "hs-prime"
    HOYER = "hoyer"
    GINI = "gini"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


#: Row order used by compliance tables and reports.
MEASURE_ORDER: tuple[Measure, ...] = tuple(Measure)


@dataclass(frozen=True)
class MeasureSpec:
    """A measure id plus its free parameters.

    Parameters irrelevant to ``id`` are ignored.  Defaults: ``epsilon=1``,
    ``p_frac=0.5``, ``p_neg=-1``, ``a=1``, ``b=1``, ``theta=0.5``.
    """

    id: Measure
    epsilon: float = 1.0
    p_frac: float = 0.5
    p_neg: float = -1.0
    a: float = 1.0
    b: float = 1.0
    theta: float = 0.5

    def __post_init__(self) -> None:
        if self.id is Measure.L0_EPS and not self.epsilon > 0:
            raise InvalidParams(f"l0-eps requires epsilon > 0, got {self.epsilon}")
        if self.id is Measure.NEG_LP and not 0 < self.p_frac < 1:
            raise InvalidParams(f"neg-lp requires 0 < p < 1, got {self.p_frac}")
        if self.id is Measure.NEG_LP_NEG and not self.p_neg < 0:
            raise InvalidParams(f"neg-lp-neg requires p < 0, got {self.p_neg}")
        if self.id is Measure.NEG_TANH and not (self.a > 0 and self.b > 0):
            raise InvalidParams(f"neg-tanh requires a, b > 0, got a={self.a} b={self.b}")
        if self.id is Measure.U_THETA and not 0 < self.theta < 1:
            raise InvalidParams(f"u-theta requires 0 < theta < 1, got {self.theta}")


class CoefficientVector:
    """An immutable vector of non-negative coefficient magnitudes.

    Construction takes absolute values, so signed or complex input reduces
    to magnitudes.  Empty or non-finite input is rejected.
    """

    __slots__ = ("_values", "_sorted")

    def __init__(self, values) -> None:
        arr = np.asarray(values)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidParams("coefficient vector must be one-dimensional and non-empty")
        mags = np.abs(arr).astype(np.float64, copy=False)
        if not np.all(np.isfinite(mags)):
            raise InvalidParams("coefficient magnitudes must be finite")
        mags = np.array(mags, copy=True)
        mags.setflags(write=False)
        self._values = mags
        srt = np.sort(mags, kind="stable")
        srt.setflags(write=False)
        self._sorted = srt

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def sorted_values(self) -> np.ndarray:
        """Coefficients sorted ascending; all measures evaluate on this."""
        return self._sorted

    def __len__(self) -> int:
        return int(self._values.size)

    def __repr__(self) -> str:
        return f"CoefficientVector({self._values.tolist()!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, CoefficientVector) and np.array_equal(
            self._values, other._values
        )

    def __hash__(self) -> int:
        return hash(self._values.tobytes())


def _as_sorted(c: CoefficientVector) -> np.ndarray:
    if not isinstance(c, CoefficientVector):
        c = CoefficientVector(c)
    return c.sorted_values


def count_measures(spec: MeasureSpec, c: CoefficientVector) -> float:
    """Zero count (l0) or below-threshold count (l0-eps), as a real."""
    s = _as_sorted(c)
    if spec.id is Measure.L0:
        return float(np.count_nonzero(s == 0.0))
    if spec.id is Measure.L0_EPS:
        return float(np.count_nonzero(s <= spec.epsilon))
    raise InvalidParams(f"not a count measure: {spec.id}")


def norm_measures(spec: MeasureSpec, c: CoefficientVector) -> float:
    """Negated l1 norm, negated fractional-p norm, or negated negative-p power sum."""
    s = _as_sorted(c)
    if spec.id is Measure.NEG_L1:
        return -float(np.sum(s))
    if spec.id is Measure.NEG_LP:
        return -float(np.sum(s**spec.p_frac) ** (1.0 / spec.p_frac))
    if spec.id is Measure.NEG_LP_NEG:
        nz = s[s > 0]
        if nz.size == 0:
            raise DegenerateInput("neg-lp-neg needs at least one nonzero coefficient")
        return -float(np.sum(nz**spec.p_neg))
    raise InvalidParams(f"not a norm measure: {spec.id}")


def ratio_measures(spec: MeasureSpec, c: CoefficientVector) -> float:
    """l2/l1 ratio, kurtosis, or the Hoyer-normalized l1/l2 ratio."""
    s = _as_sorted(c)
    l1 = float(np.sum(s))
    if l1 == 0.0:
        raise DegenerateInput(f"{spec.id.value} is undefined for the all-zero vector")
    sq = float(np.sum(s * s))
    if spec.id is Measure.L2_OVER_L1:
        return math.sqrt(sq) / l1
    if spec.id is Measure.KAPPA4:
        return float(np.sum(s**4)) / (sq * sq)
    if spec.id is Measure.HOYER:
        n = s.size
        if n < 2:
            raise DegenerateInput("hoyer needs at least two coefficients")
        rn = math.sqrt(n)
        return (rn - l1 / math.sqrt(sq)) / (rn - 1.0)
    raise InvalidParams(f"not a ratio measure: {spec.id}")


def separable_measures(spec: MeasureSpec, c: CoefficientVector) -> float:
    """The coordinate-wise sums: neg-tanh, neg-log and the three entropies."""
    s = _as_sorted(c)
    if spec.id is Measure.NEG_TANH:
        return -float(np.sum(np.tanh((spec.a * s) ** spec.b)))
    if spec.id is Measure.NEG_LOG:
        return -float(np.sum(np.log1p(s * s)))
    if spec.id is Measure.HG:
        nz = s[s > 0]
        if nz.size == 0:
            raise DegenerateInput("hg is undefined for the all-zero vector")
        return -2.0 * float(np.sum(np.log(nz)))
    if spec.id is Measure.HS:
        sq = s * s
        total = float(np.sum(sq))
        if total == 0.0:
            raise DegenerateInput("hs is undefined for the all-zero vector")
        ct = sq / total
        nz = ct[ct > 0]
        return -2.0 * float(np.sum(nz * np.log(nz))) + 0.0
    if spec.id is Measure.HS_PRIME:
        nz = s[s > 0]
        if nz.size == 0:
            return 0.0
        return -2.0 * float(np.sum(nz * np.log(nz))) + 0.0
    raise InvalidParams(f"not a separable measure: {spec.id}")


def u_theta(spec: MeasureSpec, c: CoefficientVector) -> float:
    """One minus the narrowest sorted window holding ceil(theta*N) points,
    as a fraction of the total range."""
    s = _as_sorted(c)
    n = s.size
    w = math.ceil(spec.theta * n)
    if w == n:
        raise DegenerateInput(f"u-theta requires ceil(theta*N) != N (theta={spec.theta}, N={n})")
    rng = float(s[-1] - s[0])
    if rng == 0.0:
        raise DegenerateInput("u-theta is undefined for constant vectors")
    widths = s[w - 1 :] - s[: n - w + 1]
    return 1.0 - float(widths.min()) / rng


def gini(c: CoefficientVector) -> float:
    """Gini index of the sorted coefficients, in [0, 1 - 1/N].

    Evaluates ``sum(c_(k) * (2k - N - 1)) / (N * ||c||_1)``, an exact
    rearrangement of the usual ``1 - 2 sum(...)`` form.  The antisymmetric
    integer weights make constant vectors come out exactly zero under
    ``math.fsum``.
    """
    s = _as_sorted(c)
    n = s.size
    total = math.fsum(s)
    if total == 0.0:
        raise DegenerateInput("gini is undefined for the all-zero vector")
    weights = 2.0 * np.arange(1, n + 1) - (n + 1)
    return math.fsum(s * weights) / (n * total)


@dataclass(frozen=True)
class LorenzCurve:
    """Cumulative share of coefficient mass versus share of coefficients.

    ``points[k] = (k/N, sum of the k smallest coefficients / total)``.
    """

    points: np.ndarray  # shape (N+1, 2)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def twice_area_above(self) -> float:
        """Twice the trapezoid area between the diagonal and the curve.

        Coincides with the closed-form Gini index.
        """
        x, y = self.x, self.y
        trapezoid = float(np.sum((y[1:] + y[:-1]) * np.diff(x))) / 2.0
        return 1.0 - 2.0 * trapezoid


def lorenz_curve(c: CoefficientVector) -> LorenzCurve:
    s = _as_sorted(c)
    cum = np.cumsum(s)
    total = float(cum[-1])
    if total == 0.0:
        raise DegenerateInput("lorenz curve is undefined for the all-zero vector")
    n = s.size
    x = np.arange(n + 1) / n
    # dividing by the accumulated total pins the endpoint at exactly (1, 1)
    y = np.concatenate(([0.0], cum / total))
    pts = np.column_stack((x, y))
    pts.setflags(write=False)
    return LorenzCurve(pts)


_DISPATCH = {
    Measure.L0: count_measures,
    Measure.L0_EPS: count_measures,
    Measure.NEG_L1: norm_measures,
    Measure.NEG_LP: norm_measures,
    Measure.NEG_LP_NEG: norm_measures,
    Measure.L2_OVER_L1: ratio_measures,
    Measure.KAPPA4: ratio_measures,
    Measure.HOYER: ratio_measures,
    Measure.NEG_TANH: separable_measures,
    Measure.NEG_LOG: separable_measures,
    Measure.HG: separable_measures,
    Measure.HS: separable_measures,
    Measure.HS_PRIME: separable_measures,
    Measure.U_THETA: u_theta,
}


def evaluate(spec: MeasureSpec, c: CoefficientVector) -> float:
    """Evaluate the measure named by ``spec`` on ``c``."""
    with np.errstate(over="ignore", invalid="ignore"):
        if spec.id is Measure.GINI:
            value = gini(c)
        else:
            value = _DISPATCH[spec.id](spec, c)
    if not math.isfinite(value):
        raise DegenerateInput(
            f"{spec.id.value} overflowed in float64 on this input (got {value})"
        )
    return value


def measure_max(measure: Measure, n: int) -> float | None:
    """Attainable maximum of a measure over vectors of length ``n``.

    ``None`` for measures without a finite scale-free maximum.  Used by the
    compliance engine to recognize saturated strict-increase trials.
    """
    if measure in (Measure.L2_OVER_L1, Measure.KAPPA4, Measure.HOYER, Measure.U_THETA):
        return 1.0
    if measure is Measure.GINI:
        return 1.0 - 1.0 / n
    return None

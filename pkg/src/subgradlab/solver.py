"""The projected subgradient method and its step-size schedules.

One iteration from x^k with step size h_k and subgradient g^k at x^k is

    x^{k+1} = P_X(x^k - h_k g^k).

``run`` executes N such iterations, evaluates the final point once more for
its value, and returns the whole trajectory as a :class:`RunTrace`.  The
solver treats the instance as a black box: it never reads ``f_star`` or
``x_star``; gaps are measured afterwards by the ``*_gap`` helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FEASIBLE_TOL, ProblemInstance, as_point
from .errors import (
    EmptySchedule,
    IncompatibleLength,
    InfeasibleReference,
    ScheduleExhausted,
    StepOutOfRange,
)


@dataclass(frozen=True)
class StepSchedule:
    """A rule producing the step size h_k for each iteration k = 1..N.

    Kinds:

    ``custom``          user-supplied raw step sizes, used verbatim
    ``constant``        h_k = h * R / B for a dimensionless parameter h
    ``length``          h_k = t * R / ||g^k||: every step has length t * R
    ``optimal``         h_k = R (N+1-k) / (B (N+1)^{3/2})
    ``optimal_length``  step length t_k = R (N+1-k) / (N+1)^{3/2} along -g/||g||
    """

    kind: str
    h: float | None = None
    t: float | None = None
    N: int | None = None
    steps: tuple[float, ...] | None = None

    @classmethod
    def custom(cls, steps: Sequence[float]) -> "StepSchedule":
        steps = tuple(float(v) for v in steps)
        if not steps:
            raise EmptySchedule("a custom schedule needs at least one step")
        if any(not math.isfinite(v) or v <= 0 for v in steps):
            raise StepOutOfRange("custom steps must be finite and positive")
        return cls(kind="custom", steps=steps)

    @classmethod
    def constant_normalized(cls, h: float) -> "StepSchedule":
        return cls(kind="constant", h=_positive(h, "h"))

    @classmethod
    def constant_length(cls, t: float) -> "StepSchedule":
        return cls(kind="length", t=_positive(t, "t"))

    @classmethod
    def optimal_last_iterate(cls, N: int) -> "StepSchedule":
        return cls(kind="optimal", N=_horizon(N))

    @classmethod
    def optimal_length(cls, N: int) -> "StepSchedule":
        return cls(kind="optimal_length", N=_horizon(N))

    def check_supports(self, N: int) -> None:
        """Raise unless this schedule can drive N iterations."""
        if self.kind == "custom" and len(self.steps) < N:
            raise ScheduleExhausted(
                f"custom schedule has {len(self.steps)} steps, need {N}"
            )
        if self.kind in ("optimal", "optimal_length") and self.N != N:
            raise IncompatibleLength(
                f"schedule was planned for horizon {self.N}, asked to run {N}"
            )

    def step_size(self, k: int, p: ProblemInstance, g_norm: float) -> float:
        """The step size multiplying g^k at iteration k (1-based)."""
        if self.kind == "custom":
            return self.steps[k - 1]
        if self.kind == "constant":
            return self.h * p.R / p.B
        if self.kind == "length":
            return self.t * p.R / g_norm
        if self.kind == "optimal":
            return p.R * (self.N + 1 - k) / (p.B * (self.N + 1) ** 1.5)
        if self.kind == "optimal_length":
            t_k = p.R * (self.N + 1 - k) / (self.N + 1) ** 1.5
            return t_k / g_norm
        raise ValueError(f"unknown schedule kind {self.kind!r}")

    def nominal_step(self, k: int, p: ProblemInstance) -> float:
        """A positive stand-in for h_k when no subgradient is available.

        Used only to pad the trace after an early stop at a zero
        subgradient; the padded entries multiply a zero vector, so any
        positive value preserves the trace identities.  Length-based kinds
        report the intended step length.
        """
        if self.kind == "length":
            return self.t * p.R
        if self.kind == "optimal_length":
            return p.R * (self.N + 1 - k) / (self.N + 1) ** 1.5
        return self.step_size(k, p, 1.0)


def _positive(v: float, name: str) -> float:
    v = float(v)
    if not math.isfinite(v) or v <= 0:
        raise StepOutOfRange(f"{name} must be a finite positive number, got {v}")
    return v


def _horizon(N: int) -> int:
    if int(N) != N or N < 1:
        raise ValueError(f"horizon must be an integer >= 1, got {N}")
    return int(N)


@dataclass
class RunTrace:
    """Everything the method produced over one run of N iterations.

    ``values`` holds f(x^1) .. f(x^{N+1}) and ``steps`` the N step sizes
    actually applied.  In ``full`` record mode ``points`` is the
    (N+1) x dim array of iterates and ``subgradients`` the N x dim array of
    oracle answers; ``values_only`` mode drops both and keeps just the final
    iterate.
    """

    values: np.ndarray
    steps: np.ndarray
    last_point: np.ndarray
    points: np.ndarray | None
    subgradients: np.ndarray | None
    terminated_early: bool
    record_mode: str

    @property
    def horizon(self) -> int:
        return len(self.steps)


def run(
    p: ProblemInstance,
    schedule: StepSchedule,
    x1=None,
    N: int | None = None,
    record_mode: str = "full",
) -> RunTrace:
    """Run N projected subgradient iterations from x1.

    ``x1`` defaults to the instance's canonical start.  ``N`` defaults to
    the schedule's planned horizon when it has one.  When the oracle returns
    a (numerically) zero subgradient the method has nothing to move along:
    the current point is replicated through x^{N+1}, the remaining step
    slots are padded with nominal positive values, and the trace is flagged
    ``terminated_early``.
    """
    if record_mode not in ("full", "values_only"):
        raise ValueError(f"unknown record mode {record_mode!r}")
    if N is None:
        if schedule.N is None:
            raise ValueError("N is required for schedules without a planned horizon")
        N = schedule.N
    N = _horizon(N)
    schedule.check_supports(N)
    if x1 is None:
        if p.x_start is None:
            raise ValueError("instance has no canonical start; pass x1 explicitly")
        x1 = p.x_start
    x = as_point(x1, p.dimension)
    if float(np.linalg.norm(p.projection(x) - x)) > FEASIBLE_TOL * max(
        1.0, float(np.linalg.norm(x))
    ):
        raise InfeasibleReference("initial point is not in the feasible set")

    full = record_mode == "full"
    values = np.empty(N + 1)
    steps = np.empty(N)
    points = np.empty((N + 1, p.dimension)) if full else None
    subgradients = np.empty((N, p.dimension)) if full else None
    if full:
        points[0] = x
    terminated_early = False

    for k in range(1, N + 1):
        sample = p.evaluate(x, k)
        values[k - 1] = sample.value
        g = sample.subgradient
        if full:
            subgradients[k - 1] = g
        if sample.is_zero:
            terminated_early = True
            values[k - 1 :] = sample.value
            for j in range(k, N + 1):
                steps[j - 1] = schedule.nominal_step(j, p)
            if full:
                points[k - 1 :] = x
                subgradients[k - 1 :] = g
            break
        h_k = schedule.step_size(k, p, float(np.linalg.norm(g)))
        steps[k - 1] = h_k
        x = p.projection(x - h_k * g)
        if full:
            points[k] = x

    if not terminated_early:
        values[N] = p.evaluate(x, N + 1).value

    return RunTrace(
        values=values,
        steps=steps,
        last_point=x.copy(),
        points=points,
        subgradients=subgradients,
        terminated_early=terminated_early,
        record_mode=record_mode,
    )


def _settle_gap(raw: float, p: ProblemInstance) -> float:
    """Clamp the tiny negative gaps float arithmetic can produce to zero."""
    tol = 1e-12 * max(1.0, p.B * p.R)
    if raw < -tol:
        raise ValueError(
            f"gap {raw} is more negative than rounding can explain; "
            f"the instance's f_star = {p.f_star} looks wrong"
        )
    return max(raw, 0.0)


def last_gap(trace: RunTrace, p: ProblemInstance) -> float:
    """f(x^{N+1}) - f_star."""
    return _settle_gap(float(trace.values[-1]) - p.f_star, p)


def best_gap(trace: RunTrace, p: ProblemInstance) -> float:
    """min_k f(x^k) - f_star over k = 1..N+1."""
    return _settle_gap(float(np.min(trace.values)) - p.f_star, p)


def avg_gap(trace: RunTrace, p: ProblemInstance, h: Sequence[float]) -> float:
    """Gap at the step-weighted average of the iterates.

    ``h`` must contain N+1 values: the N realized steps extended by one more
    positive h_{N+1}; the average uses weights h_k / sum(h) over x^1..x^{N+1}.
    Requires a full-mode trace (the averaged point must be reconstructed).
    """
    if trace.record_mode != "full":
        raise ValueError("avg_gap needs a trace recorded in full mode")
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 1 or len(h) != trace.horizon + 1:
        raise IncompatibleLength(
            f"need {trace.horizon + 1} step values (including h_(N+1)), got {h.shape}"
        )
    if np.any(h <= 0):
        raise StepOutOfRange("averaging weights need positive steps")
    weights = h / h.sum()
    x_avg = weights @ trace.points
    return _settle_gap(float(p.evaluate(x_avg).value) - p.f_star, p)


def best_iterate_bound(h: Sequence[float], B: float, R: float) -> float:
    """Classical guarantee for the best iterate seen in N+1 evaluations:

        min_{1<=k<=N+1} f(x^k) - f_star <= (R^2 + B^2 sum h_k^2) / (2 sum h_k)

    where ``h`` lists h_1 .. h_{N+1}.  Valid for every positive step
    sequence, so callers are free to extend a realized schedule by any
    positive h_{N+1}.
    """
    h = np.asarray(h, dtype=np.float64)
    if h.size == 0:
        raise EmptySchedule("the best-iterate bound needs at least one step")
    if np.any(h <= 0) or not np.all(np.isfinite(h)):
        raise StepOutOfRange("steps must be finite and positive")
    B = float(B)
    R = float(R)
    if B <= 0 or R <= 0:
        raise ValueError(f"B and R must be positive, got B={B}, R={R}")
    return float((R * R + B * B * np.sum(h * h)) / (2.0 * np.sum(h)))

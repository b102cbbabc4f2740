"""Instances on which the rate formulas hold with equality.

Each generator returns a normalized :class:`ProblemInstance` (B = R = 1
unless stated otherwise) whose canonical run -- from ``x_start`` with the
intended schedule -- realizes the corresponding worst-case bound exactly.
The adversarial constructions rely on scripted tie-breaking: along the
canonical trajectory several affine pieces are active simultaneously, and
the script picks the one that keeps the method pessimal.  Pass
``scripted=False`` to lift the script when running other schedules on the
same function (the default tie-break then applies and the instance is just
an ordinary convex function).
"""

from __future__ import annotations

import math

import numpy as np

from .core import PiecewiseLinearMax, ProblemInstance, instance_from_pieces
from .errors import StepOutOfRange, StepTooSmall
from .rates import (
    TWO_STEP_FIRST,
    TWO_STEP_KNEE,
    RateReport,
    constant_step_rate,
)
from .sequences import s
from .solver import StepSchedule, last_gap, run


def abs_instance(B: float = 1.0, R: float = 1.0) -> ProblemInstance:
    """f(x) = B |x| on the line, started at x = R.

    The short-step worst case: with constant normalized step h <= 1/N the
    iterates walk straight toward 0 and the final gap is exactly
    B R (1 - N h).
    """
    B = float(B)
    R = float(R)
    if B <= 0 or R <= 0:
        raise ValueError(f"B and R must be positive, got B={B}, R={R}")
    pieces = PiecewiseLinearMax(
        slopes=np.array([[B], [-B]]), intercepts=np.zeros(2)
    )
    return instance_from_pieces(
        pieces,
        f_star=0.0,
        x_star=[0.0],
        x_start=[R],
        B=B,
        R=R,
        name=f"abs(B={B},R={R})",
    )


def long_step_instance(N: int, h: float, scripted: bool = True) -> ProblemInstance:
    """The long-step worst case for N constant normalized steps h.

    Defined for h past the knee 1 / s_{N+1}^2.  The function is the maximum
    of 0 and N+1 unit-slope affine pieces through the origin whose mutual
    angles are tuned so that, along the scripted trajectory from e_1, every
    remaining piece stays active and the final value lands exactly on
    ``constant_step_rate(N, h)``.
    """
    if int(N) != N or N < 1:
        raise ValueError(f"horizon must be an integer >= 1, got {N}")
    N = int(N)
    h = float(h)
    sN1 = s(1.0, N + 1)
    if not math.isfinite(h) or h <= 0:
        raise StepOutOfRange(f"h must be a finite positive number, got {h}")
    if h <= 1.0 / sN1**2:
        raise StepTooSmall(
            f"h={h} is at or below the knee {1.0 / sN1 ** 2:.6g} for N={N}; "
            "the long-step construction needs h strictly past the knee"
        )
    lead = 1.0 / (h * sN1**2)
    root = math.sqrt(1.0 - lead * lead)

    # gamma_1 = 1, gamma_k^2 = prod_{i<k} (1 - 1/s_{N+1-i}^4), defined to k = N
    gammas = np.ones(N)
    for k in range(2, N + 1):
        gammas[k - 1] = gammas[k - 2] * math.sqrt(1.0 - 1.0 / s(1.0, N + 2 - k) ** 4)

    xi = np.zeros((N + 1, N + 1))
    for k in range(1, N + 1):
        xi[k - 1, 0] = lead
        for i in range(2, k + 1):
            xi[k - 1, i - 1] = root * gammas[i - 2] / s(1.0, N + 2 - i) ** 2
        xi[k - 1, k] = -root * gammas[k - 1]
    xi[N] = xi[N - 1]
    xi[N, N] = root * gammas[N - 1]

    norms = np.linalg.norm(xi, axis=1)
    assert np.all(np.abs(norms - 1.0) <= 1e-12), norms

    slopes = np.vstack([np.zeros(N + 1), xi])
    intercepts = np.zeros(N + 2)  # every piece passes through the origin
    choices = {k: k for k in range(1, N + 2)} if scripted else None
    pieces = PiecewiseLinearMax(slopes, intercepts, scripted_choices=choices)

    x_start = np.zeros(N + 1)
    x_start[0] = 1.0
    instance = instance_from_pieces(
        pieces,
        f_star=0.0,
        x_star=np.zeros(N + 1),
        x_start=x_start,
        B=1.0,
        R=1.0,
        name=f"longstep(N={N},h={h})",
    )
    assert abs(instance.evaluate(np.zeros(N + 1)).value) <= 1e-12
    return instance


def two_step_schedule(h2: float) -> StepSchedule:
    """The canonical two-iteration schedule (1/(2 sqrt 2), h2)."""
    return StepSchedule.custom([TWO_STEP_FIRST, float(h2)])


def two_step_worst_small(h2: float, scripted: bool = True) -> ProblemInstance:
    """Worst case for the two-step schedule when the second step is small.

    f(x) = max(x_1 - 1, x_2 - 1, -1) on the plane, started at
    (1,1)/sqrt(2).  Scripting makes the first iteration follow the x_1
    piece, after which the second step h2 <= 1/(8 sqrt 2) can only shave h2
    off the gap: the final gap is exactly 1/sqrt(2) - h2.
    """
    h2 = float(h2)
    if not math.isfinite(h2) or not 0.0 < h2 <= TWO_STEP_KNEE:
        raise StepOutOfRange(
            f"this construction covers 0 < h2 <= {TWO_STEP_KNEE:.6g}, got {h2}"
        )
    pieces = PiecewiseLinearMax(
        slopes=np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]),
        intercepts=np.array([-1.0, -1.0, -1.0]),
        scripted_choices={1: 0, 2: 1} if scripted else None,
    )
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    return instance_from_pieces(
        pieces,
        f_star=-1.0,
        x_star=[0.0, 0.0],
        x_start=[inv_sqrt2, inv_sqrt2],
        B=1.0,
        R=1.0,
        name=f"two-step-small(h2={h2})",
    )


def two_step_worst_long(h2: float, scripted: bool = True) -> ProblemInstance:
    """Worst case for the two-step schedule when the second step is long.

    Three tilted unit-slope pieces plus the zero piece in dimension 3,
    started at e_1.  After the scripted two steps the gap is exactly

        h2 + 1/(64 h2) + 16 h2 / (1 + 8 sqrt(2) h2)^2,

    the long branch of ``two_step_worst_gap``.
    """
    h2 = float(h2)
    if not math.isfinite(h2) or h2 <= TWO_STEP_KNEE:
        raise StepOutOfRange(
            f"this construction covers h2 > {TWO_STEP_KNEE:.6g}, got {h2}"
        )
    sqrt2 = math.sqrt(2.0)
    gamma = 32.0 * h2 / (1.0 + 8.0 * sqrt2 * h2) ** 2
    assert 0.0 <= gamma <= 1.0
    assert 1.0 - 1.0 / (128.0 * h2 * h2) >= 0.0
    sin = math.sqrt(1.0 - gamma * gamma)
    deep = math.sqrt((1.0 - gamma * gamma) * (1.0 - 1.0 / (128.0 * h2 * h2)))

    xi1 = np.array([gamma, -sin, 0.0])
    xi2 = np.array([gamma, sin / (8.0 * sqrt2 * h2), -deep])
    xi3 = np.array([gamma, sin / (8.0 * sqrt2 * h2), deep])
    for v in (xi1, xi2, xi3):
        assert abs(np.linalg.norm(v) - 1.0) <= 1e-12

    z1 = np.array([1.0, 0.0, 0.0])
    z2 = z1 - xi1 / (2.0 * sqrt2)
    z3 = z2 - h2 * xi2

    c1 = gamma
    c2 = gamma + (1.0 - gamma * gamma) / (32.0 * h2) - gamma * gamma / (2.0 * sqrt2)
    c3 = h2 + 1.0 / (64.0 * h2) + 16.0 * h2 / (1.0 + 8.0 * sqrt2 * h2) ** 2

    slopes = np.vstack([np.zeros(3), xi1, xi2, xi3])
    intercepts = np.array(
        [
            0.0,
            c1 - float(np.dot(xi1, z1)),
            c2 - float(np.dot(xi2, z2)),
            c3 - float(np.dot(xi3, z3)),
        ]
    )
    # all pieces must stay at or below zero at the minimizer
    assert np.max(intercepts) <= 1e-12, intercepts

    pieces = PiecewiseLinearMax(
        slopes,
        intercepts,
        scripted_choices={1: 1, 2: 2} if scripted else None,
    )
    return instance_from_pieces(
        pieces,
        f_star=0.0,
        x_star=np.zeros(3),
        x_start=z1,
        B=1.0,
        R=1.0,
        name=f"two-step-long(h2={h2})",
    )


def random_instance(
    dimension: int, directions: int, seed=0
) -> ProblemInstance:
    """A random normalized test instance: a max of pieces through the origin.

    Draws ``directions`` unit slopes and includes their antipodes, so the
    origin lies in the convex hull of the slopes and is a genuine minimizer
    with f_star = 0.  The start point is a random unit vector, giving
    B = R = 1 by construction.  ``seed`` may be anything accepted by
    ``numpy.random.default_rng``, including an existing generator.
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    if directions < 1:
        raise ValueError(f"need at least one direction, got {directions}")
    rng = np.random.default_rng(seed)
    slopes = rng.standard_normal((directions, dimension))
    norms = np.linalg.norm(slopes, axis=1)
    while np.any(norms < 1e-12):  # essentially impossible, but cheap to guard
        slopes = rng.standard_normal((directions, dimension))
        norms = np.linalg.norm(slopes, axis=1)
    slopes /= norms[:, None]
    x_start = rng.standard_normal(dimension)
    x_start /= np.linalg.norm(x_start)
    pieces = PiecewiseLinearMax(
        slopes=np.vstack([slopes, -slopes]), intercepts=np.zeros(2 * directions)
    )
    return instance_from_pieces(
        pieces,
        f_star=0.0,
        x_star=np.zeros(dimension),
        x_start=x_start,
        B=1.0,
        R=1.0,
        name=f"random(dim={dimension},directions={directions})",
    )


def tightness_report(N: int, h: float) -> RateReport:
    """Run the branch-appropriate worst case and compare with the formula.

    Picks the straight-line instance for h at or below the knee and the
    long-step construction past it, runs N constant normalized steps h from
    the canonical start, and reports predicted versus observed final gap.
    The two numbers agree to rounding; any daylight between them means a
    bug in either the formula or the construction.
    """
    predicted = constant_step_rate(N, h)  # validates N and h
    knee = 1.0 / s(1.0, N + 1) ** 2
    if h <= knee:
        instance = abs_instance()
        regime = "short_step"
    else:
        instance = long_step_instance(N, h)
        regime = "long_step"
    trace = run(instance, StepSchedule.constant_normalized(h), N=N)
    return RateReport(
        N=N,
        regime=regime,
        predicted_bound=predicted,
        observed_gap=last_gap(trace, instance),
    )

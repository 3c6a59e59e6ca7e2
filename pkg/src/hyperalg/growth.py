"""Growth diagnostics and geometric searches on symbols.

Everything here is numerical evidence, not proof: the true order, type and
indicator are limsups over r -> infinity, which no finite computation
decides.  The stand-ins are documented per function (typically a maximum
over the top half of the sampled window) and downstream verdicts built on
them are tagged accordingly.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationRangeError, HypothesisError, SearchFailureError
from .symbols import SymbolSpec, eval_symbol_array, taylor_coeffs_at

#: "|phi| < 1" is enforced as |phi| <= 1 - MODULUS_MARGIN (and ">" dually).
MODULUS_MARGIN = 1e-6

#: Samples with |phi| below this are skipped when taking logs on a ray.
LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class RayScan:
    """Moduli of a symbol along the ray ``t -> t * exp(i * direction)``."""

    direction: float
    t_grid: tuple[float, ...]
    moduli: tuple[float, ...]

    def __post_init__(self):
        if list(self.t_grid) != sorted(set(self.t_grid)):
            raise ValueError("t_grid must be strictly increasing")
        if len(self.t_grid) != len(self.moduli):
            raise ValueError("t_grid and moduli lengths differ")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["t", "modulus"])
        for t, m in zip(self.t_grid, self.moduli):
            writer.writerow([repr(t), repr(m)])
        return buf.getvalue()


@dataclass(frozen=True)
class GrowthEstimate:
    """Least-squares order estimate with a type estimate when the order is
    compatible with exponential growth.

    ``order`` is the slope of log log M(r) against log r over the top half
    of the window; ``type_`` is max log M(r) / r over the same half, only
    meaningful when ``order`` is within 0.2 of 1.  ``degenerate`` flags
    windows where M(r) never exceeded 1.
    """

    order: float
    type_: float
    r_window: tuple[float, float]
    quality: float
    degenerate: bool
    samples: tuple[tuple[float, float], ...]  # (r, log M(r)) pairs

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["r", "log_max_modulus"])
        for r, logm in self.samples:
            writer.writerow([repr(r), repr(logm)])
        return buf.getvalue()


@dataclass(frozen=True)
class ConvexRay:
    """A segment from ``w0`` toward ``w1`` on which ``log |phi|`` is strictly
    increasing with strictly positive second differences."""

    w0: complex
    w1: complex
    theta: float
    eta: float
    domain: tuple[float, float]
    t_grid: tuple[float, ...]
    profile: tuple[float, ...]


def max_modulus(spec: SymbolSpec, r: float, samples: int = 256) -> float:
    """Max of |phi| over equispaced points on the circle |z| = r."""
    if r <= 0:
        raise ValueError("radius must be positive")
    if samples < 16:
        raise ValueError("need at least 16 samples")
    angles = 2 * np.pi * np.arange(samples) / samples
    vals = eval_symbol_array(spec, r * np.exp(1j * angles))
    return float(np.max(np.abs(vals)))


def estimate_order_type(
    spec: SymbolSpec, r_grid, samples: int = 256
) -> GrowthEstimate:
    r_grid = [float(r) for r in r_grid]
    if len(r_grid) < 8 or r_grid != sorted(set(r_grid)):
        raise ValueError("r_grid must be strictly increasing with >= 8 points")
    pairs: list[tuple[float, float]] = []
    for r in r_grid:
        try:
            m = max_modulus(spec, r, samples)
        except EvaluationRangeError:
            break  # window truncated where evaluation overflows
        pairs.append((r, math.log(max(m, LOG_FLOOR))))
    if len(pairs) < 4:
        raise EvaluationRangeError(
            "symbol overflows on almost the entire requested window"
        )
    top = pairs[len(pairs) // 2 :]
    usable = [(r, lm) for r, lm in top if lm > 0]
    window = (pairs[0][0], pairs[-1][0])
    if not usable:
        return GrowthEstimate(0.0, 0.0, window, 0.0, True, tuple(pairs))
    xs = np.log([r for r, _ in usable])
    ys = np.log([lm for _, lm in usable])
    if len(usable) >= 2 and xs[-1] > xs[0]:
        slope, intercept = np.polyfit(xs, ys, 1)
        resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    else:
        slope, resid = 0.0, math.inf
    order = max(float(slope), 0.0)
    type_ = 0.0
    if abs(order - 1.0) <= 0.2:
        type_ = max(lm / r for r, lm in top)
        type_ = max(type_, 0.0)
    return GrowthEstimate(order, type_, window, resid, False, tuple(pairs))


def scan_ray(spec: SymbolSpec, theta: float, t_grid) -> RayScan:
    ts = np.asarray([float(t) for t in t_grid], dtype=float)
    vals = eval_symbol_array(spec, ts * cmath.exp(1j * theta))
    return RayScan(float(theta), tuple(ts), tuple(float(a) for a in np.abs(vals)))


def indicator(spec: SymbolSpec, theta: float, r_grid) -> float:
    """Directional growth rate: max of log|phi(t e^{i theta})| / t over the
    top half of the window.  Samples where |phi| < 1e-300 are skipped (log
    singularities at zeros on the ray do not affect the limsup)."""
    scan = scan_ray(spec, theta, r_grid)
    top = list(zip(scan.t_grid, scan.moduli))[len(scan.t_grid) // 2 :]
    rates = [math.log(m) / t for t, m in top if m >= LOG_FLOOR]
    if not rates:
        raise HypothesisError("symbol vanished at every sampled point of the ray")
    return max(rates)


def tau0(
    spec: SymbolSpec, z1: complex, r_grid, subexponential: bool = False
) -> float:
    """Exponential growth rate along the ray through ``z1``, clamped at 0.

    ``subexponential=True`` short-circuits to exactly 0 (the rate is 0 for
    every direction in that growth class)."""
    z1 = complex(z1)
    if z1 == 0:
        raise ValueError("z1 must be nonzero")
    if subexponential:
        return 0.0
    return max(0.0, indicator(spec, cmath.phase(z1), r_grid))


def ray_below_one(
    spec: SymbolSpec, theta: float, t_max: float, samples: int = 256
) -> float | None:
    """Largest sampled r with |phi| <= 1 - margin on all of (0, r]; None when
    the first sample already fails."""
    if samples < 64:
        raise ValueError("need at least 64 samples")
    ts = t_max * np.arange(1, samples + 1) / samples
    vals = np.abs(eval_symbol_array(spec, ts * cmath.exp(1j * theta)))
    below = vals <= 1 - MODULUS_MARGIN
    if not below[0]:
        return None
    bad = np.nonzero(~below)[0]
    last = (bad[0] - 1) if bad.size else samples - 1
    return float(ts[last])


def find_arith_progression(
    spec: SymbolSpec,
    m: int,
    directions: int = 360,
    a_grid=None,
    margin: float = MODULUS_MARGIN,
) -> complex | None:
    """First step ``a`` (smallest |a| first, then by direction) such that
    |phi(j a)| < 1 - margin for every j = 1..m; None when the grid is
    exhausted."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if a_grid is None:
        a_grid = np.geomspace(1e-3, 10.0, 512)
    rays = np.exp(2j * np.pi * np.arange(directions) / directions)
    js = np.arange(1, m + 1)
    for t in a_grid:
        # points[j-1, k] = j * t * e^{i theta_k}
        points = np.multiply.outer(js * float(t), rays)
        try:
            mods = np.abs(eval_symbol_array(spec, points))
        except EvaluationRangeError:
            continue
        ok = np.all(mods <= 1 - margin, axis=0)
        hits = np.nonzero(ok)[0]
        if hits.size:
            return complex(float(t) * rays[hits[0]])
    return None


def convex_direction(a1: complex, a2: complex) -> float:
    """An angle theta with Re(a1 e^{i theta}) >= 0 (strict when a1 != 0) and
    Re(a2 e^{2 i theta}) > 0.

    For a1 = 0 the closed form theta = -Arg(a2)/2 is exact; otherwise the
    admissible set is a nonempty open arc and a dense scan picks the angle
    maximizing the smaller of the two normalized margins.
    """
    a1, a2 = complex(a1), complex(a2)
    if a2 == 0:
        raise ValueError("a2 must be nonzero")
    if a1 == 0:
        return -cmath.phase(a2) / 2
    thetas = 2 * np.pi * np.arange(4096) / 4096
    m1 = np.real(a1 * np.exp(1j * thetas)) / abs(a1)
    m2 = np.real(a2 * np.exp(2j * thetas)) / abs(a2)
    scores = np.minimum(m1, m2)
    best = int(np.argmax(scores))
    if scores[best] <= 0:
        raise SearchFailureError(
            "no direction satisfied both half-plane constraints"
        )
    return float(thetas[best])


def find_convex_ray(
    spec: SymbolSpec,
    w0: complex,
    delta: float,
    points: int = 64,
    max_halvings: int = 40,
    hyp_margin: float = 1e-9,
) -> ConvexRay:
    """A short segment out of ``w0`` on which log|phi| is strictly increasing
    and strictly convex (checked on a ``points``-sample grid).

    Requires phi(w0) != 0 and phi''(w0) phi(w0) != phi'(w0)^2 with margin
    ``hyp_margin`` (after normalizing by |phi(w0)|^2).  The segment direction
    comes from :func:`convex_direction` applied to the first two nonconstant
    log-derivative coefficients; its length is halved from ``delta / 2``
    until the discrete profile validates.  When additionally phi'(w0) != 0
    the validated domain extends through ``w0`` to [-1, 1].
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    w0 = complex(w0)
    coeffs, _ = taylor_coeffs_at(spec, w0, 2)
    phi0, phi1, phi2 = coeffs[0], coeffs[1], 2 * coeffs[2]
    if abs(phi0) < 1e-12:
        raise HypothesisError("symbol vanishes (numerically) at the base point")
    curvature = (phi2 * phi0 - phi1 * phi1) / (phi0 * phi0)
    if abs(curvature) <= hyp_margin:
        raise HypothesisError(
            "second-derivative condition fails: "
            f"|phi'' phi - phi'^2| / |phi|^2 = {abs(curvature):.3e}"
        )
    slope = phi1 / phi0
    if abs(slope) < 1e-12:
        slope = 0j
    theta = convex_direction(slope, curvature / 2)
    two_sided = slope != 0
    lo = -1.0 if two_sided else 0.0

    eta = delta / 2
    for _ in range(max_halvings):
        w1 = w0 + eta * cmath.exp(1j * theta)
        ts = np.linspace(lo, 1.0, points)
        zs = w0 + np.multiply.outer(ts, w1 - w0)
        mods = np.abs(eval_symbol_array(spec, zs))
        if np.min(mods) >= LOG_FLOOR:
            profile = np.log(mods)
            d1 = np.diff(profile)
            d2 = np.diff(d1)
            if np.all(d1 > 0) and np.all(d2 > 0):
                return ConvexRay(
                    w0=w0,
                    w1=complex(w1),
                    theta=float(theta),
                    eta=float(eta),
                    domain=(lo, 1.0),
                    t_grid=tuple(float(t) for t in ts),
                    profile=tuple(float(v) for v in profile),
                )
        eta /= 2
        if two_sided and eta < delta / 2 ** (max_halvings // 2):
            # a vanishing first derivative estimate can make the two-sided
            # profile non-monotone at every scale; retreat to one-sided
            two_sided = False
            lo = 0.0
    raise SearchFailureError(
        "no segment length validated the convex increasing profile"
    )


def check_Tma_conditions(
    spec: SymbolSpec, theta: float, t_max: float, R_grid
) -> tuple[float, float] | None:
    """Looks for the pair (r, R): |phi| < 1 on (0, r] along the ray, and a
    later radius R where |phi| strictly exceeds both 1 and the directional
    growth envelope exp(h(theta) R) estimated from the same window."""
    r = ray_below_one(spec, theta, t_max)
    if r is None:
        return None
    R_grid = [float(R) for R in R_grid]
    try:
        h_hat = indicator(spec, theta, R_grid)
    except HypothesisError:
        return None
    direction = cmath.exp(1j * theta)
    for R in R_grid:
        try:
            vals = eval_symbol_array(spec, np.asarray([R * direction]))
        except EvaluationRangeError:
            break
        mod = float(np.abs(vals[0]))
        if mod < LOG_FLOOR:
            continue
        if math.log(mod) > max(0.0, h_hat * R) + MODULUS_MARGIN:
            return (r, R)
    return None

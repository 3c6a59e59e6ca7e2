"""Explicit witness construction.

Builds concrete pairs (f, q) — a generator (or generator tuple) and an
iterate count — such that the q-th operator power sends the prescribed
power(s) of f onto a target exponential polynomial while sending the other
powers near zero.  Two constructions are provided:

* single generator: f = A + R_N, with A a free "seed" whose frequencies sit
  in a small disk inside the sublevel set |phi| < 1 and R_N a correction
  whose coefficients are solved so the m-th power hits the target exactly
  on its surviving frequencies;
* multiple generators with a free exponent set: f_1 = L_1 + R_n and
  f_i = L_i + n^{-k_i}, where the weights k_i make the monomial exponents
  separable and a distinguished exponent beta receives the target.

Everything chosen (windows, radii, margins, iterate counts) is recorded in
the returned report, and every contraction ratio Theta of the expansion is
tabulated so the decay argument can be audited term by term.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    HypothesisError,
    IterationLimitError,
    SearchFailureError,
    TargetPlacementError,
    ThetaMarginError,
)
from .exppoly import DiskGrid, ExpPoly, mul_exppoly, pow_exppoly
from .growth import (
    MODULUS_MARGIN,
    ConvexRay,
    find_arith_progression,
    find_convex_ray,
    ray_below_one,
)
from .symbols import SymbolSpec, eval_symbol, symbol_to_dict
from .dynamics import apply_symbol_power, sup_distance

#: Iterate counts are doubled from 8 up to this cap.
N_MAX_DEFAULT = 2**20

#: Non-survivor contraction ratios must stay below 1 by this much (unless
#: the tuple decays through an explicit negative power of the iterate count).
THETA_MARGIN = 1e-4

#: Total degree cap for the multinomial weight computation.
GAMMA_DEGREE_CAP = 64


def _cx(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


def _exppoly_dict(f: ExpPoly) -> list:
    return [[_cx(c), _cx(freq)] for c, freq in f.terms]


# ---------------------------------------------------------------------------
# Coefficient equation and lattice combinatorics
# ---------------------------------------------------------------------------


def solve_coeff(b: complex, m: int, phi_val: complex, N: int) -> complex:
    """Principal solution c of ``c**m * phi_val**N = b``.

    Magnitudes are handled in log space so the answer stays finite for N up
    to 2**20; requires |phi_val| > 1 so that |c| decreases in N.
    """
    b, phi_val = complex(b), complex(phi_val)
    if b == 0:
        raise ValueError("target coefficient must be nonzero")
    if m < 1:
        raise ValueError("m must be >= 1")
    if abs(phi_val) <= 1 + MODULUS_MARGIN:
        raise HypothesisError(
            f"|phi| = {abs(phi_val):.9f} at the survivor frequency; need > 1"
        )
    log_mag = (math.log(abs(b)) - N * math.log(abs(phi_val))) / m
    arg = (cmath.phase(b) - N * cmath.phase(phi_val)) / m
    return cmath.exp(complex(log_mag, arg))


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_lattice(p: int, m: int):
    """Index tuples (u, v) in N_0^p x N_0^p of the m-th power expansion.

    Returns ``(L_m_star, lower)`` where ``L_m_star`` is the total-degree-m
    layer minus the p survivors (|u| = 0, v = m e_j) and ``lower`` lists the
    full layers of total degree 1..m-1.
    """
    if p < 1 or m < 2:
        raise ValueError("need p >= 1 and m >= 2")

    def layer(n):
        return [(c[:p], c[p:]) for c in _compositions(n, 2 * p)]

    survivors = {
        ((0,) * p, tuple(m if i == j else 0 for i in range(p)))
        for j in range(p)
    }
    l_m_star = [t for t in layer(m) if t not in survivors]
    lower = [layer(n) for n in range(1, m)]
    return l_m_star, lower


def multinomial_gamma(u, v, a) -> complex:
    """Expansion weight ``(|u|+|v|)! * prod a_i^{u_i} / (u_i! v_i!)``."""
    u, v = tuple(int(x) for x in u), tuple(int(x) for x in v)
    total = sum(u) + sum(v)
    if total > GAMMA_DEGREE_CAP:
        raise ValueError(f"total degree {total} beyond supported cap")
    denom = 1
    for x in list(u) + list(v):
        denom *= math.factorial(x)
    weight = complex(math.factorial(total) / denom)
    for ai, ui in zip(a, u):
        weight *= complex(ai) ** ui
    return weight


def theta_ratio(spec: SymbolSpec, u, v, lam, alpha_freqs, m: int):
    """Contraction ratio of one expansion term and its decay-case tag.

    case 2: |u| >= 1 (frequency lands in the sublevel set |phi| < 1);
    case 3: |u| = 0, |v| < m (convex combination through the origin);
    case 1: |u| = 0, |v| = m (combination of the survivor frequencies;
            ratio is exactly 1 on the survivors themselves).
    """
    freq = sum(ui * af for ui, af in zip(u, alpha_freqs)) + sum(
        vi * li for vi, li in zip(v, lam)
    )
    log_num = math.log(max(abs(eval_symbol(spec, freq)), 1e-300))
    log_den = sum(
        (vi / m) * math.log(abs(eval_symbol(spec, m * li)))
        for vi, li in zip(v, lam)
        if vi
    )
    theta = math.exp(log_num - log_den)
    if sum(u) >= 1:
        case = 2
    elif sum(v) < m:
        case = 3
    else:
        case = 1
    return theta, case


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaEntry:
    u: tuple
    v: tuple
    ell: tuple | None
    alpha: tuple | None
    theta: float
    case: int
    magnitude: float
    bound: float

    def to_dict(self) -> dict:
        return {
            "u": list(self.u) if not self.u or isinstance(self.u[0], int) else [list(x) for x in self.u],
            "v": list(self.v),
            "ell": None if self.ell is None else list(self.ell),
            "alpha": None if self.alpha is None else list(self.alpha),
            "theta": self.theta,
            "case": self.case,
            "magnitude": self.magnitude,
            "bound": self.bound,
        }


@dataclass(frozen=True)
class WitnessReport:
    kind: str  # "single" | "multi"
    generators: tuple[ExpPoly, ...]
    q: int
    m: int
    residuals: dict
    theta_table: tuple[ThetaEntry, ...]
    params: dict
    coefficients: tuple[complex, ...]
    trace: tuple[tuple[int, float], ...]
    bound_sum: float
    targets: dict
    exponents: tuple[tuple[int, ...], ...] | None = None
    weights: tuple[float, ...] | None = None
    beta: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "generators": [_exppoly_dict(g) for g in self.generators],
            "q": self.q,
            "m": self.m,
            "residuals": {str(k): v for k, v in self.residuals.items()},
            "theta_table": [e.to_dict() for e in self.theta_table],
            "params": self.params,
            "coefficients": [_cx(c) for c in self.coefficients],
            "trace": [[q, r] for q, r in self.trace],
            "bound_sum": self.bound_sum,
            "targets": {
                ",".join(str(int(x)) for x in k): _exppoly_dict(v)
                for k, v in self.targets.items()
            },
            "exponents": None
            if self.exponents is None
            else [list(a) for a in self.exponents],
            "weights": None if self.weights is None else list(self.weights),
            "beta": None if self.beta is None else list(self.beta),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


@dataclass(frozen=True)
class WitnessParams:
    """Everything the single-generator construction chose before seeing N."""

    w: complex
    delta: float
    w_star: complex
    w0: complex
    m: int
    lambda_window: tuple[complex, complex]
    margins: dict
    N_max: int
    grid: DiskGrid
    epsilon: float
    ray: ConvexRay = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "w": _cx(self.w),
            "delta": self.delta,
            "w_star": _cx(self.w_star),
            "w0": _cx(self.w0),
            "m": self.m,
            "lambda_window": [_cx(self.lambda_window[0]), _cx(self.lambda_window[1])],
            "margins": self.margins,
            "N_max": self.N_max,
            "grid": self.grid.to_dict(),
            "epsilon": self.epsilon,
        }


# ---------------------------------------------------------------------------
# Single-generator construction
# ---------------------------------------------------------------------------


def _check_progression(spec: SymbolSpec, w: complex, m: int) -> float:
    """Worst |phi(j w)| over j = 1..m (must be < 1)."""
    return max(abs(eval_symbol(spec, j * w)) for j in range(1, m + 1))


def _segment_convex(spec: SymbolSpec, end: complex, points: int = 64) -> bool:
    """Discrete strict convexity and monotonicity of log|phi| on [0, end]."""
    ts = np.linspace(0.0, 1.0, points)
    mods = np.abs(
        np.asarray([eval_symbol(spec, complex(t) * end) for t in ts])
    )
    if np.min(mods) <= 0:
        return False
    prof = np.log(mods)
    d1 = np.diff(prof)
    return bool(np.all(d1 > 0) and np.all(np.diff(d1) > 0))


def derive_witness_params(
    spec: SymbolSpec,
    m: int,
    grid: DiskGrid | None = None,
    epsilon: float = 1e-6,
    N_max: int = N_MAX_DEFAULT,
) -> WitnessParams:
    """Chooses the geometry for :func:`construct_witness_T2`.

    The progression step is searched with a comfortable modulus margin
    first (|phi(jw)| <= 0.5, then 0.9) because the smallest admissible step
    tends to sit right at the |phi| = 1 boundary, where the contraction
    ratios approach 1 and the required iterate count explodes.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    grid = grid or DiskGrid(3.0)
    w = None
    for margin in (0.5, 0.1, MODULUS_MARGIN):
        w = find_arith_progression(spec, m, margin=margin)
        if w is not None:
            break
    if w is None:
        raise HypothesisError(
            "no arithmetic progression found inside the sublevel set |phi| < 1"
        )
    ray = find_convex_ray(spec, 0j, delta=min(abs(w) / 2, 0.5))
    w_star = ray.w1
    progression_worst = _check_progression(spec, w, m)

    delta = abs(w) / 4
    w0 = 0.75 * w_star
    ok = False
    for _ in range(30):
        ok = True
        # every frequency the expansion can produce with at least one seed
        # factor must stay inside |phi| < 1: sample disk corners around
        # s*w plus the extreme correction shifts
        for s in range(1, m + 1):
            shifts = [0j, (m - s) * w0 / m] if s < m else [0j]
            corners = [0j] + [
                s * delta * cmath.exp(1j * math.pi * k / 2) for k in range(4)
            ]
            for shift in shifts:
                for corner in corners:
                    z = s * w + corner + shift
                    if abs(eval_symbol(spec, z)) > 1 - MODULUS_MARGIN:
                        ok = False
        if ok:
            break
        delta /= 2
        w0 /= 2
    if not ok:
        raise SearchFailureError(
            "could not validate the seed/correction frequency windows"
        )
    if not _segment_convex(spec, w_star):
        raise HypothesisError(
            "log|phi| is not strictly convex increasing on [0, w*]"
        )
    return WitnessParams(
        w=complex(w),
        delta=float(delta),
        w_star=complex(w_star),
        w0=complex(w0),
        m=m,
        lambda_window=(w0 / (2 * m), w0 / m),
        margins={
            "progression_worst_modulus": progression_worst,
            "modulus": MODULUS_MARGIN,
            "theta": THETA_MARGIN,
        },
        N_max=N_max,
        grid=grid,
        epsilon=epsilon,
        ray=ray,
    )


def default_targets_T2(
    params: WitnessParams, p: int = 1, seed_coeff: complex = 1, target_coeff: complex = 1
) -> tuple[ExpPoly, ExpPoly]:
    """Admissible (seed, target) pair with p terms each: seed frequencies
    spread inside the disk around w, target frequencies on the segment
    [w0/2, w0] of the convex ray."""
    alphas = [
        params.w + (i * params.delta / (2 * p)) * cmath.exp(1j * i)
        for i in range(p)
    ]
    betas = [params.w0 * (0.5 + 0.5 * (i + 1) / (p + 1)) for i in range(p)]
    seed = ExpPoly.of([(seed_coeff, a) for a in alphas])
    target = ExpPoly.of([(target_coeff, b) for b in betas])
    return seed, target


def fit_target_exppoly(
    params: WitnessParams, values_fn, grid: DiskGrid, n_freqs: int = 8
) -> tuple[ExpPoly, float]:
    """Least-squares fit of an arbitrary target by exponentials with
    frequencies auto-placed in the admissible segment [w0/2, w0].

    The fit error is the caller's responsibility to tolerate; it is
    returned separately and is NOT part of the dynamics residual.
    """
    betas = [
        params.w0 * (0.5 + 0.5 * (i + 1) / (n_freqs + 1)) for i in range(n_freqs)
    ]
    pts = grid.points()
    rhs = np.asarray([complex(values_fn(z)) for z in pts])
    design = np.exp(np.multiply.outer(pts, np.asarray(betas)))
    coeffs, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    fit = ExpPoly.of(list(zip(coeffs, betas)))
    err = float(np.max(np.abs(design @ coeffs - rhs)))
    return fit, err


def _validate_targets_T2(params: WitnessParams, seed: ExpPoly, target: ExpPoly):
    if seed.is_zero or target.is_zero:
        raise TargetPlacementError("seed and target must be nonzero")
    if len(seed.terms) != len(target.terms):
        raise TargetPlacementError(
            "seed and target must have the same number of terms "
            f"(got {len(seed.terms)} and {len(target.terms)})"
        )
    for _, a in seed.terms:
        if abs(a - params.w) > params.delta * (1 + 1e-12):
            raise TargetPlacementError(
                f"seed frequency {a} outside the disk of radius "
                f"{params.delta} around {params.w}"
            )
    for _, b in target.terms:
        ratio = b / params.w0
        if abs(ratio.imag) > 1e-9 or not (0.5 - 1e-12 <= ratio.real <= 1 + 1e-12):
            raise TargetPlacementError(
                f"target frequency {b} outside the segment [w0/2, w0]"
            )


def construct_witness_T2(
    spec: SymbolSpec,
    m: int,
    seed: ExpPoly,
    target: ExpPoly,
    epsilon: float = 1e-6,
    grid: DiskGrid | None = None,
    N_max: int = N_MAX_DEFAULT,
    params: WitnessParams | None = None,
) -> WitnessReport:
    """Single-generator witness: finds N with f = seed + R_N such that the
    N-th operator power takes f^m within epsilon of the target and f^j
    (1 <= j < m) within epsilon of zero, in sup norm on the grid."""
    params = params or derive_witness_params(
        spec, m, grid=grid, epsilon=epsilon, N_max=N_max
    )
    grid = grid or params.grid
    _validate_targets_T2(params, seed, target)

    a_coeffs = [c for c, _ in seed.terms]
    alpha_freqs = [a for _, a in seed.terms]
    b_coeffs = [c for c, _ in target.terms]
    beta_freqs = [b for _, b in target.terms]
    p = len(b_coeffs)
    lam = [b / m for b in beta_freqs]
    phi_at_survivors = [eval_symbol(spec, m * l) for l in lam]
    for val, l in zip(phi_at_survivors, lam):
        if abs(val) <= 1 + MODULUS_MARGIN:
            raise HypothesisError(
                f"|phi({m * l})| = {abs(val):.9f}; survivor frequencies need "
                "|phi| > 1 on the convex ray"
            )

    l_m_star, lower = enumerate_lattice(p, m)
    table_index: list[tuple[tuple, tuple]] = list(l_m_star)
    for layer in lower:
        table_index.extend(layer)
    survivors = [
        ((0,) * p, tuple(m if i == j else 0 for i in range(p)))
        for j in range(p)
    ]

    theta_by_tuple = {}
    violations = []
    for u, v in table_index:
        theta, case = theta_ratio(spec, u, v, lam, alpha_freqs, m)
        theta_by_tuple[(u, v)] = (theta, case)
        if theta > 1 - THETA_MARGIN:
            violations.append({"u": u, "v": v, "theta": theta, "case": case})
    if violations:
        raise ThetaMarginError(
            f"{len(violations)} expansion tuples have contraction ratio "
            f"above {1 - THETA_MARGIN}",
            entries=violations,
        )

    R = grid.radius
    log_b = [math.log(abs(b)) for b in b_coeffs]
    trace: list[tuple[int, float]] = []
    N = 8
    while N <= N_max:
        c = [
            solve_coeff(b, m, phi_val, N)
            for b, phi_val in zip(b_coeffs, phi_at_survivors)
        ]
        f = seed + ExpPoly.of(list(zip(c, lam)))
        residuals = {}
        worst = 0.0
        for j in range(1, m + 1):
            image = apply_symbol_power(spec, pow_exppoly(f, j), N)
            tgt = target if j == m else ExpPoly.zero()
            residuals[j] = sup_distance(image, tgt, grid)
            worst = max(worst, residuals[j])
        # sound per-tuple budget: the exact term magnitude
        # |gamma| * prod |b_i|^{v_i/m} * Theta^N times the sup of the
        # exponential on the grid
        bound_sum = 0.0
        for u, v in table_index:
            theta, _ = theta_by_tuple[(u, v)]
            gamma = multinomial_gamma(u, v, a_coeffs)
            if gamma == 0:
                continue
            freq = sum(ui * af for ui, af in zip(u, alpha_freqs)) + sum(
                vi * li for vi, li in zip(v, lam)
            )
            log_s = (
                math.log(abs(gamma))
                + sum((vi / m) * lb for vi, lb in zip(v, log_b))
                + N * math.log(theta)
            )
            bound_sum += math.exp(min(log_s + abs(freq) * R, 700.0))
        trace.append((N, worst))
        if worst <= epsilon and bound_sum <= epsilon:
            theta_table = []
            for u, v in table_index + survivors:
                if (u, v) in theta_by_tuple:
                    theta, case = theta_by_tuple[(u, v)]
                else:
                    theta, case = theta_ratio(spec, u, v, lam, alpha_freqs, m)
                gamma = multinomial_gamma(u, v, a_coeffs)
                cv = 1 + 0j
                for ci, vi in zip(c, v):
                    cv *= ci**vi
                freq = sum(ui * af for ui, af in zip(u, alpha_freqs)) + sum(
                    vi * li for vi, li in zip(v, lam)
                )
                phi_freq = eval_symbol(spec, freq)
                log_mag = (
                    math.log(max(abs(gamma * cv), 1e-300))
                    + N * math.log(max(abs(phi_freq), 1e-300))
                )
                magnitude = math.exp(min(log_mag, 700.0))
                bound = math.exp(min(log_mag + abs(freq) * R, 700.0))
                theta_table.append(
                    ThetaEntry(
                        u=u,
                        v=v,
                        ell=None,
                        alpha=None,
                        theta=theta,
                        case=case,
                        magnitude=magnitude,
                        bound=bound,
                    )
                )
            targets = {(j,): ExpPoly.zero() for j in range(1, m)}
            targets[(m,)] = target
            return WitnessReport(
                kind="single",
                generators=(f,),
                q=N,
                m=m,
                residuals={str(j): r for j, r in residuals.items()},
                theta_table=tuple(theta_table),
                params={
                    **params.to_dict(),
                    "symbol": symbol_to_dict(spec),
                    "seed": _exppoly_dict(seed),
                    "target": _exppoly_dict(target),
                },
                coefficients=tuple(c),
                trace=tuple(trace),
                bound_sum=bound_sum,
                targets=targets,
            )
        N *= 2
    raise IterationLimitError(
        f"residual target {epsilon} not met by N_max = {N_max}", trace=trace
    )


# ---------------------------------------------------------------------------
# Multi-generator construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentSet:
    """Finite set of monomial exponent tuples, zero tuple excluded."""

    exponents: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(exponents) -> "ExponentSet":
        exps = sorted({tuple(int(x) for x in a) for a in exponents})
        return ExponentSet(tuple(exps))

    def __post_init__(self):
        if not self.exponents:
            raise ValueError("exponent set must be nonempty")
        sizes = {len(a) for a in self.exponents}
        if len(sizes) != 1:
            raise ValueError("all exponent tuples must have the same length")
        if any(min(a) < 0 for a in self.exponents):
            raise ValueError("exponents must be non-negative")
        if any(max(a) == 0 for a in self.exponents):
            raise ValueError("the zero tuple is not allowed")

    @property
    def n_generators(self) -> int:
        return len(self.exponents[0])

    @property
    def max_inf_norm(self) -> int:
        return max(max(a) for a in self.exponents)

    @property
    def max_total(self) -> int:
        return max(sum(a) for a in self.exponents)


def select_weights(A: ExponentSet):
    """Weights, distinguished exponent, and coordinate permutation.

    Weights k_i = (d+1)^{i-1} (d = the largest coordinate) are a positional
    encoding, hence injective on the exponent box.  Coordinates are permuted
    so some exponent attains the maximal infinity norm in slot 1, and beta
    is the strict minimizer of the weight functional among those."""
    m = A.max_inf_norm
    d = A.max_inf_norm
    star = next(
        i for i in range(A.n_generators) if any(a[i] == m for a in A.exponents)
    )
    perm = tuple([star] + [i for i in range(A.n_generators) if i != star])
    permuted = [tuple(a[i] for i in perm) for a in A.exponents]
    k = tuple(float((d + 1) ** i) for i in range(A.n_generators))

    values = [sum(ki * ai for ki, ai in zip(k, a)) for a in permuted]
    if len(set(values)) != len(values):
        raise AssertionError("weight functional failed to separate exponents")

    a1 = [a for a in permuted if a[0] == m]
    beta = min(a1, key=lambda a: sum(ki * ai for ki, ai in zip(k, a)))
    for a in a1:
        if a != beta:
            gap = sum(k[i] * (beta[i] - a[i]) for i in range(1, len(k)))
            if not gap < 0:
                raise AssertionError(
                    "distinguished exponent is not the strict minimizer"
                )
    return k, beta, perm


@dataclass(frozen=True)
class MultiParams:
    """Geometry for the multi-generator construction: the decay window
    Lambda (generator seed frequencies) and growth window Gamma (target
    frequencies), both segments anchored at the origin."""

    w_minus: complex  # Lambda = [-2a w_minus, -a w_minus]
    w_plus: complex  # Gamma = [b w_plus, 2b w_plus]
    a: float
    b: float
    d_A: int
    m: int
    same_ray: bool
    margins: dict

    @property
    def lambda_window(self) -> tuple[complex, complex]:
        return (-2 * self.a * self.w_minus, -self.a * self.w_minus)

    @property
    def gamma_window(self) -> tuple[complex, complex]:
        return (self.b * self.w_plus, 2 * self.b * self.w_plus)

    def to_dict(self) -> dict:
        return {
            "w_minus": _cx(self.w_minus),
            "w_plus": _cx(self.w_plus),
            "a": self.a,
            "b": self.b,
            "d_A": self.d_A,
            "m": self.m,
            "same_ray": self.same_ray,
            "margins": self.margins,
            "lambda_window": [_cx(x) for x in self.lambda_window],
            "gamma_window": [_cx(x) for x in self.gamma_window],
        }


def derive_multi_params(
    spec: SymbolSpec, A: ExponentSet, ray_delta: float = 2.0
) -> MultiParams:
    """Window selection for :func:`construct_witness_multi`.

    When phi'(0) != 0 both windows sit on the single two-sided convex ray
    through the origin, as the decay argument assumes.  When phi'(0) = 0
    (an even symbol, say) no two-sided ray exists; the growth window still
    comes from a one-sided convex ray, and the decay window is placed on an
    independently found ray where |phi| < 1, with the cross-window sums
    re-verified directly.
    """
    phi0 = eval_symbol(spec, 0)
    if abs(phi0 - 1) > 1e-9:
        raise HypothesisError(f"phi(0) = {phi0}; the construction needs phi(0) = 1")
    d_A = A.max_total
    m = A.max_inf_norm
    ray = find_convex_ray(spec, 0j, delta=ray_delta)
    w_plus = ray.w1
    same_ray = ray.domain[0] < 0  # two-sided: phi'(0) != 0
    a = 0.9 / (2 * d_A)
    if same_ray:
        w_minus = w_plus
    else:
        w_minus = None
        scale = abs(w_plus)
        for k in range(360):
            theta = 2 * math.pi * k / 360
            r = ray_below_one(spec, theta, t_max=2 * a * d_A * scale * 1.05)
            if r is not None and r >= 2 * a * d_A * scale:
                w_minus = scale * cmath.exp(1j * theta)
                break
        if w_minus is None:
            raise SearchFailureError(
                "no direction keeps |phi| < 1 across the decay window"
            )

    b = 0.9 * a / (2 * d_A)
    ok = False
    for _ in range(25):
        ok = True
        for s in range(1, d_A + 1):
            d_cnt_max = d_A if s < d_A else 0
            for d_cnt in range(0, d_cnt_max + 1):
                for t in (a * s, 2 * a * s):
                    for rr in (b * d_cnt, 2 * b * d_cnt):
                        z = -t * w_minus + rr * w_plus
                        if s >= 1 and abs(eval_symbol(spec, z)) > 1 - MODULUS_MARGIN:
                            ok = False
        if ok:
            break
        b /= 2
    if not ok:
        raise SearchFailureError(
            "could not validate the combined window memberships"
        )
    return MultiParams(
        w_minus=complex(w_minus),
        w_plus=complex(w_plus),
        a=a,
        b=b,
        d_A=d_A,
        m=m,
        same_ray=same_ray,
        margins={"modulus": MODULUS_MARGIN, "theta": THETA_MARGIN},
    )


def default_multi_targets(
    params: MultiParams, N: int, p: int = 1
) -> tuple[ExpPoly, list[ExpPoly]]:
    """An admissible target B (frequencies m*gamma_j with gamma_j in
    Gamma/m) and per-generator seeds L_i (frequencies in Lambda)."""
    gammas = [
        (params.b + params.b * (j + 1) / (p + 1)) * params.w_plus / params.m
        for j in range(p)
    ]
    B = ExpPoly.of([(1 + 0j, params.m * g) for g in gammas])
    seeds = []
    for i in range(N):
        lams = [
            -(params.a + params.a * (j + 1 + i / (N + 1)) / (p + 1))
            * params.w_minus
            for j in range(p)
        ]
        seeds.append(ExpPoly.of([(1 + 0j, l) for l in lams]))
    return B, seeds


def _multi_lattice(alpha, p, n_gen):
    """All (u, v, ell): u a tuple of N vectors in N_0^p, v in N_0^p,
    ell in N_0^{N-1}, with |u_1| + |v| = alpha_1 and |u_i| + ell_i = alpha_i."""
    first_splits = []
    for v_total in range(alpha[0] + 1):
        u1_total = alpha[0] - v_total
        for u1 in _compositions(u1_total, p):
            for v in _compositions(v_total, p):
                first_splits.append((u1, v))
    rest_options = []
    for i in range(1, n_gen):
        opts = []
        for u_total in range(alpha[i] + 1):
            ell_i = alpha[i] - u_total
            for ui in _compositions(u_total, p):
                opts.append((ui, ell_i))
        rest_options.append(opts)

    def product(idx, acc_u, acc_ell):
        if idx == len(rest_options):
            yield tuple(acc_u), tuple(acc_ell)
            return
        for ui, ell_i in rest_options[idx]:
            yield from product(idx + 1, acc_u + [ui], acc_ell + [ell_i])

    out = []
    for u1, v in first_splits:
        for rest_u, ell in product(0, [], []):
            out.append(((u1,) + rest_u, v, ell))
    return out


def _multinom(n: int, parts) -> int:
    denom = 1
    for x in parts:
        denom *= math.factorial(x)
    return math.factorial(n) // denom


def construct_witness_multi(
    spec: SymbolSpec,
    A: ExponentSet,
    B: ExpPoly,
    seeds: list[ExpPoly] | None = None,
    epsilon: float = 1e-5,
    grid: DiskGrid | None = None,
    n_max: int = N_MAX_DEFAULT,
    params: MultiParams | None = None,
) -> WitnessReport:
    """Multi-generator witness for a free exponent set.

    Returns generators f_1..f_N and an iterate count n such that the n-th
    operator power takes the monomial f^beta within epsilon of B and every
    other monomial f^alpha (alpha in A) within epsilon of zero.  ``seeds``
    are the L_i parts of the generators (defaulted admissibly when None).
    """
    grid = grid or DiskGrid(3.0)
    params = params or derive_multi_params(spec, A)
    k, beta, perm = select_weights(A)
    n_gen = A.n_generators
    exps_perm = [tuple(a[i] for i in perm) for a in A.exponents]
    m = params.m

    if seeds is None:
        B_default, seeds_perm = default_multi_targets(params, n_gen, p=len(B.terms))
        del B_default
    else:
        if len(seeds) != n_gen:
            raise TargetPlacementError("need one seed per generator")
        seeds_perm = [seeds[perm[i]] for i in range(n_gen)]

    p = len(B.terms)
    b_coeffs = [c for c, _ in B.terms]
    gammas = [f / m for _, f in B.terms]
    lo, hi = params.gamma_window
    for _, f in B.terms:
        t = (f - lo) / (hi - lo) if hi != lo else 0
        if abs(t.imag) > 1e-9 or not (-1e-9 <= t.real <= 1 + 1e-9):
            raise TargetPlacementError(
                f"target frequency {f} outside the growth window"
            )
    llo, lhi = params.lambda_window
    for L in seeds_perm:
        if len(L.terms) != p:
            raise TargetPlacementError(
                "each seed needs as many terms as the target"
            )
        for _, f in L.terms:
            t = (f - llo) / (lhi - llo) if lhi != llo else 0
            if abs(t.imag) > 1e-9 or not (-1e-9 <= t.real <= 1 + 1e-9):
                raise TargetPlacementError(
                    f"seed frequency {f} outside the decay window"
                )

    phi_surv = [eval_symbol(spec, m * g) for g in gammas]
    for g, val in zip(gammas, phi_surv):
        if abs(val) <= 1 + MODULUS_MARGIN:
            raise HypothesisError(
                f"|phi({m * g})| = {abs(val):.9f}; need > 1 on the growth window"
            )

    K_beta = sum(k[i] * beta[i] for i in range(1, n_gen))
    a_freqs = [[f for _, f in L.terms] for L in seeds_perm]
    a_coefs = [[c for c, _ in L.terms] for L in seeds_perm]

    lattices = {alpha: _multi_lattice(alpha, p, n_gen) for alpha in exps_perm}

    def tuple_data(alpha, u, v, ell):
        freq = sum(
            uij * a_freqs[i][j]
            for i in range(n_gen)
            for j, uij in enumerate(u[i])
        ) + sum(vj * g for vj, g in zip(v, gammas))
        log_num = math.log(max(abs(eval_symbol(spec, freq)), 1e-300))
        log_den = sum(
            (vj / m) * math.log(abs(pv)) for vj, pv in zip(v, phi_surv) if vj
        )
        theta = math.exp(log_num - log_den)
        usum = sum(sum(ui) for ui in u)
        if 1 <= usum < params.d_A:
            case = 1
        elif usum == params.d_A:
            case = 2
        elif max(v) < m:
            case = 3
        else:
            case = 4
        # n-exponent of |X|: (|v|/m) K_beta - sum k_s ell_s
        n_exp = (sum(v) / m) * K_beta - sum(
            k[i] * ell[i - 1] for i in range(1, n_gen)
        )
        return freq, theta, case, n_exp

    info = {}
    violations = []
    for alpha in exps_perm:
        for u, v, ell in lattices[alpha]:
            freq, theta, case, n_exp = tuple_data(alpha, u, v, ell)
            survivor_shaped = (
                sum(sum(ui) for ui in u) == 0
                and sorted(v, reverse=True)[0] == m
                and sum(1 for x in v if x) == 1
            )
            info[(alpha, u, v, ell)] = (freq, theta, case, n_exp, survivor_shaped)
            if survivor_shaped:
                if alpha != beta:
                    gap = sum(
                        k[i] * (beta[i] - alpha[i]) for i in range(1, n_gen)
                    )
                    if not gap < 0:
                        violations.append(
                            {"alpha": alpha, "u": u, "v": v, "why": "no n-decay"}
                        )
                continue
            if theta > 1 - THETA_MARGIN and not (
                theta <= 1 + 1e-12 and n_exp < 0
            ):
                violations.append(
                    {"alpha": alpha, "u": u, "v": v, "theta": theta, "case": case}
                )
    if violations:
        raise ThetaMarginError(
            f"{len(violations)} expansion tuples neither contract nor decay",
            entries=violations,
        )

    R = grid.radius
    trace: list[tuple[int, float]] = []
    n = 8
    while n <= n_max:
        c = [
            solve_coeff(b * n**K_beta, m, pv, n)
            for b, pv in zip(b_coeffs, phi_surv)
        ]
        f_perm = [seeds_perm[0] + ExpPoly.of(list(zip(c, gammas)))]
        for i in range(1, n_gen):
            f_perm.append(seeds_perm[i] + ExpPoly.of([(n ** -k[i], 0j)]))

        residuals = {}
        worst = 0.0
        for alpha_orig, alpha in zip(A.exponents, exps_perm):
            g = ExpPoly.one()
            for fi, ai in zip(f_perm, alpha):
                if ai:
                    g = mul_exppoly(g, pow_exppoly(fi, ai))
            image = apply_symbol_power(spec, g, n)
            tgt = B if alpha == beta else ExpPoly.zero()
            r = sup_distance(image, tgt, grid)
            residuals[alpha_orig] = r
            worst = max(worst, r)

        bound_sum = 0.0
        log_c = [
            (math.log(abs(b)) + K_beta * math.log(n) - n * math.log(abs(pv))) / m
            for b, pv in zip(b_coeffs, phi_surv)
        ]
        for alpha in exps_perm:
            for u, v, ell in lattices[alpha]:
                freq, theta, case, n_exp, survivor_shaped = info[
                    (alpha, u, v, ell)
                ]
                if survivor_shaped and alpha == beta:
                    continue
                coef = _multinom(alpha[0], list(u[0]) + list(v))
                for i in range(1, n_gen):
                    coef *= _multinom(alpha[i], list(u[i]) + [ell[i - 1]])
                log_x = math.log(coef)
                for i in range(n_gen):
                    for j, uij in enumerate(u[i]):
                        if uij:
                            log_x += uij * math.log(abs(a_coefs[i][j]))
                for j, vj in enumerate(v):
                    if vj:
                        log_x += vj * log_c[j]
                log_x += n * math.log(
                    max(abs(eval_symbol(spec, freq)), 1e-300)
                )
                log_x -= sum(
                    k[i] * ell[i - 1] for i in range(1, n_gen)
                ) * math.log(n)
                bound_sum += math.exp(min(log_x + abs(freq) * R, 700.0))
        trace.append((n, worst))
        if worst <= epsilon and bound_sum <= epsilon:
            theta_table = []
            for alpha in exps_perm:
                for u, v, ell in lattices[alpha]:
                    freq, theta, case, n_exp, survivor_shaped = info[
                        (alpha, u, v, ell)
                    ]
                    coef = _multinom(alpha[0], list(u[0]) + list(v))
                    for i in range(1, n_gen):
                        coef *= _multinom(alpha[i], list(u[i]) + [ell[i - 1]])
                    log_x = math.log(coef)
                    for i in range(n_gen):
                        for j, uij in enumerate(u[i]):
                            if uij:
                                log_x += uij * math.log(abs(a_coefs[i][j]))
                    for j, vj in enumerate(v):
                        if vj:
                            log_x += vj * log_c[j]
                    log_x += n * math.log(
                        max(abs(eval_symbol(spec, freq)), 1e-300)
                    )
                    log_x -= sum(
                        k[i] * ell[i - 1] for i in range(1, n_gen)
                    ) * math.log(n)
                    magnitude = math.exp(min(log_x, 700.0))
                    bound = math.exp(min(log_x + abs(freq) * R, 700.0))
                    theta_table.append(
                        ThetaEntry(
                            u=u,
                            v=v,
                            ell=ell,
                            alpha=alpha,
                            theta=theta,
                            case=case,
                            magnitude=magnitude,
                            bound=bound,
                        )
                    )
            # undo the coordinate permutation for the returned generators
            generators = [None] * n_gen
            for i in range(n_gen):
                generators[perm[i]] = f_perm[i]
            targets = {
                alpha_orig: (B if alpha == beta else ExpPoly.zero())
                for alpha_orig, alpha in zip(A.exponents, exps_perm)
            }
            survivor_values = [
                c_j**m
                * cmath.exp(
                    complex(
                        n * math.log(abs(pv)), n * cmath.phase(pv)
                    )
                )
                / n**K_beta
                for c_j, pv in zip(c, phi_surv)
            ]
            return WitnessReport(
                kind="multi",
                generators=tuple(generators),
                q=n,
                m=m,
                residuals={
                    ",".join(map(str, a)): r for a, r in residuals.items()
                },
                theta_table=tuple(theta_table),
                params={
                    **params.to_dict(),
                    "symbol": symbol_to_dict(spec),
                    "weights": list(k),
                    "beta_permuted": list(beta),
                    "permutation": list(perm),
                    "K_beta": K_beta,
                    "survivor_values": [_cx(sv) for sv in survivor_values],
                    "target": _exppoly_dict(B),
                    "seeds": [_exppoly_dict(L) for L in seeds_perm],
                    "grid": grid.to_dict(),
                    "epsilon": epsilon,
                },
                coefficients=tuple(c),
                trace=tuple(trace),
                bound_sum=bound_sum,
                targets=targets,
                exponents=A.exponents,
                weights=k,
                beta=beta,
            )
        n *= 2
    raise IterationLimitError(
        f"residual target {epsilon} not met by n_max = {n_max}", trace=trace
    )

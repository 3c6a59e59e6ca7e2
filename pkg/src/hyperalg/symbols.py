"""Symbol specifications: the entire functions that drive the dynamics.

A symbol is described structurally rather than as a black-box callable, so
classification can read off zeros, exponents and polynomial parts.  Four
variants are supported:

* :class:`CatalogSymbol` -- named closed forms (``cos``, ``sin+exp(-z)``,
  ``sinc-pi``, ``exp``, ``exp-poly``, ``exp-quadratic``);
* :class:`ExpPolySymbol` -- an exponential polynomial;
* :class:`PolyTimesExp` -- ``exp(a z + b) * p(z)`` with ``p(0) = 1``;
* :class:`HadamardTrunc` -- ``exp(a z + b)`` times a truncated canonical
  product over a supplied zero list.

All variants evaluate pointwise and on numpy arrays, serialize to a JSON
dict with a ``kind`` discriminator (complex numbers as ``[re, im]`` pairs,
bit-exact round trip), and admit contour-integral derivatives at any point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DerivativeConvergenceError, EvaluationRangeError
from .exppoly import EXP_GUARD, ExpPoly, TaylorPoly, _require_finite

CATALOG_COS = "cos"
CATALOG_SIN_PLUS_EXP = "sin+exp(-z)"
CATALOG_SINC_PI = "sinc-pi"
CATALOG_EXP = "exp"
CATALOG_EXP_POLY = "exp-poly"
CATALOG_EXP_QUADRATIC = "exp-quadratic"

_CATALOG_NAMES = (
    CATALOG_COS,
    CATALOG_SIN_PLUS_EXP,
    CATALOG_SINC_PI,
    CATALOG_EXP,
    CATALOG_EXP_POLY,
    CATALOG_EXP_QUADRATIC,
)


class SymbolSpec:
    """Marker base class for symbol variants."""


@dataclass(frozen=True)
class CatalogSymbol(SymbolSpec):
    """Named closed form, evaluated at ``scale * z`` (homothety rescaling)."""

    name: str
    a: complex = 1 + 0j
    poly: tuple[complex, ...] = (1 + 0j,)
    scale: complex = 1 + 0j

    def __post_init__(self):
        if self.name not in _CATALOG_NAMES:
            raise ValueError(f"unknown catalog symbol {self.name!r}")
        object.__setattr__(self, "a", _require_finite(self.a, "parameter a"))
        object.__setattr__(self, "scale", _require_finite(self.scale, "scale"))
        object.__setattr__(
            self, "poly", tuple(_require_finite(c, "poly coeff") for c in self.poly)
        )


@dataclass(frozen=True)
class ExpPolySymbol(SymbolSpec):
    poly: ExpPoly = field(default_factory=ExpPoly.one)


@dataclass(frozen=True)
class PolyTimesExp(SymbolSpec):
    """``exp(a z + b) * p(z)`` with ``p(z) = 1 + a1 z + ... + ar z^r``."""

    poly: tuple[complex, ...]
    a: complex
    b: complex = 0j

    def __post_init__(self):
        poly = tuple(_require_finite(c, "poly coeff") for c in self.poly)
        if not poly or poly[0] != 1:
            raise ValueError("polynomial part must have constant term 1")
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "a", _require_finite(self.a, "exponent slope"))
        b = _require_finite(self.b, "exponent constant")
        if abs(b.real) > 1e-12:
            raise ValueError("exponent constant must be purely imaginary")
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class HadamardTrunc(SymbolSpec):
    """``exp(a z + b)`` times a truncated canonical product over ``zeros``."""

    a: complex
    b: complex
    zeros: tuple[complex, ...]
    genus: int
    truncation: int

    def __post_init__(self):
        if self.genus not in (0, 1):
            raise ValueError("genus must be 0 or 1")
        zeros = tuple(_require_finite(z, "zero") for z in self.zeros)
        if any(z == 0 for z in zeros):
            raise ValueError("zeros must be nonzero")
        object.__setattr__(self, "zeros", zeros)
        b = _require_finite(self.b, "exponent constant")
        if abs(b.real) > 1e-12:
            raise ValueError("exponent constant must be purely imaginary")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", _require_finite(self.a, "exponent slope"))
        if not (0 <= self.truncation <= len(zeros)):
            raise ValueError("truncation must lie within the zero list")


def weierstrass_factor(p: int, z: complex) -> complex:
    """Canonical factor: ``1 - z`` for p=0, ``(1 - z) exp(z)`` for p=1."""
    if p == 0:
        return 1 - complex(z)
    if p == 1:
        return (1 - complex(z)) * cmath.exp(complex(z))
    raise ValueError("only genus 0 and 1 are supported")


def suggest_truncation(
    zeros: Sequence[complex], radius: float, genus: int, tail: float = 1e-8
) -> int:
    """Smallest prefix length whose canonical-product tail bound on the disk
    of the given radius is below ``tail``; the classical estimate sums
    ``|z / z_n| ** (genus + 1)`` over the discarded zeros."""
    mags = sorted(abs(z) for z in zeros)
    power = genus + 1
    total = sum((radius / m) ** power for m in mags)
    for count, m in enumerate(mags):
        if total < tail:
            return count
        total -= (radius / m) ** power
    return len(mags)


def _polyval(coeffs: Sequence[complex], z):
    total = 0.0 * z if isinstance(z, np.ndarray) else 0j
    for c in reversed(list(coeffs)):
        total = total * z + c
    return total


def _sinc_pi(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    out = np.ones(w.shape, dtype=complex)
    small = np.abs(w) < 1e-5
    x = np.pi * w
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(small, 1 - x * x / 6 + x**4 / 120, np.sin(x) / np.where(small, 1, x))
    return out


def eval_symbol_array(spec: SymbolSpec, zs) -> np.ndarray:
    """Vectorized evaluation; raises :class:`EvaluationRangeError` on overflow."""
    zs = np.asarray(zs, dtype=complex)

    def guard(exponents):
        if exponents.size and np.max(np.abs(np.real(exponents))) > EXP_GUARD:
            raise EvaluationRangeError("exp argument exceeds the overflow guard")

    if isinstance(spec, CatalogSymbol):
        w = spec.scale * zs
        if spec.name == CATALOG_COS:
            guard(1j * w)
            return np.cos(w)
        if spec.name == CATALOG_SIN_PLUS_EXP:
            guard(1j * w)
            guard(-w)
            return np.sin(w) + np.exp(-w)
        if spec.name == CATALOG_SINC_PI:
            guard(1j * np.pi * w)
            return _sinc_pi(w)
        if spec.name == CATALOG_EXP:
            guard(spec.a * w)
            return np.exp(spec.a * w)
        if spec.name == CATALOG_EXP_POLY:
            guard(spec.a * w)
            return np.exp(spec.a * w) * _polyval(spec.poly, w)
        if spec.name == CATALOG_EXP_QUADRATIC:
            guard(spec.a * w * w)
            return np.exp(spec.a * w * w)
        raise AssertionError(spec.name)
    if isinstance(spec, ExpPolySymbol):
        return spec.poly.evaluate_array(zs)
    if isinstance(spec, PolyTimesExp):
        w = spec.a * zs + spec.b
        guard(w)
        return np.exp(w) * _polyval(spec.poly, zs)
    if isinstance(spec, HadamardTrunc):
        w = spec.a * zs + spec.b
        guard(w)
        out = np.exp(w)
        used = np.asarray(spec.zeros[: spec.truncation], dtype=complex)
        if used.size:
            ratios = zs[..., None] / used
            factors = 1 - ratios
            if spec.genus == 1:
                guard(ratios)
                factors = factors * np.exp(ratios)
            out = out * np.prod(factors, axis=-1)
        return out
    raise TypeError(f"not a SymbolSpec: {spec!r}")


def eval_symbol(spec: SymbolSpec, z: Union[complex, float]) -> complex:
    return complex(eval_symbol_array(spec, np.asarray([complex(z)]))[0])


# ---------------------------------------------------------------------------
# Contour derivatives (trapezoid rule on a circle; spectrally accurate for
# entire functions, with the doubled-sample difference as error estimate).
# ---------------------------------------------------------------------------


def _contour_coeffs(
    spec: SymbolSpec, center: complex, n_max: int, radius: float, samples: int
) -> np.ndarray:
    angles = 2 * np.pi * np.arange(samples) / samples
    ring = radius * np.exp(1j * angles)
    vals = eval_symbol_array(spec, center + ring)
    ks = np.arange(n_max + 1)
    phases = np.exp(-1j * np.outer(ks, angles))
    return (phases @ vals) / samples / radius**ks


def taylor_coeffs_at(
    spec: SymbolSpec,
    center: complex,
    n_max: int,
    radius: float = 0.5,
    samples: int = 64,
    tol: float = 1e-6,
) -> tuple[np.ndarray, np.ndarray]:
    """Taylor coefficients of the symbol around ``center`` with error estimates.

    Raises :class:`DerivativeConvergenceError` when the estimates at
    ``samples`` and ``2 * samples`` points disagree beyond ``tol`` (relative
    to ``max(1, |coeff|)``).
    """
    samples = max(samples, 2 * (n_max + 1))
    coarse = _contour_coeffs(spec, center, n_max, radius, samples)
    fine = _contour_coeffs(spec, center, n_max, radius, 2 * samples)
    errors = np.abs(fine - coarse)
    scale = np.maximum(1.0, np.abs(fine))
    if np.any(errors > tol * scale):
        raise DerivativeConvergenceError(
            "contour derivative estimates did not converge",
            values=fine,
            errors=errors,
        )
    return fine, errors


def derivs_at(
    spec: SymbolSpec,
    center: complex,
    n_max: int,
    radius: float = 0.5,
    samples: int = 64,
    tol: float = 1e-6,
) -> tuple[tuple[complex, ...], tuple[float, ...]]:
    coeffs, errors = taylor_coeffs_at(spec, center, n_max, radius, samples, tol)
    facts = np.array([math.factorial(k) for k in range(n_max + 1)], dtype=float)
    return tuple(complex(v) for v in coeffs * facts), tuple(
        float(e) for e in errors * facts
    )


def derivs_at_zero(
    spec: SymbolSpec,
    n_max: int,
    radius: float = 0.5,
    samples: int = 64,
    tol: float = 1e-6,
) -> tuple[tuple[complex, ...], tuple[float, ...]]:
    """Derivatives at the origin with per-entry error estimates."""
    return derivs_at(spec, 0j, n_max, radius, samples, tol)


def to_taylor(
    spec: SymbolSpec,
    cap: int,
    radius: float = 2.0,
    samples: int | None = None,
    tol: float = 1e-6,
) -> TaylorPoly:
    """Truncated Taylor expansion at 0.

    The default contour radius is 2 rather than the small circle used for
    low-order derivatives: high-order coefficients on a sub-unit circle lose
    one bit of accuracy per order to roundoff amplification ``radius**-n``.
    """
    if samples is None:
        samples = max(64, 4 * (cap + 1))
    coeffs, _ = taylor_coeffs_at(spec, 0j, cap, radius, samples, tol)
    return TaylorPoly(tuple(complex(c) for c in coeffs), cap)


# ---------------------------------------------------------------------------
# Serialization: JSON-compatible dicts, complex numbers as [re, im].
# ---------------------------------------------------------------------------


def _cx(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


def _uncx(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def symbol_to_dict(spec: SymbolSpec) -> dict:
    if isinstance(spec, CatalogSymbol):
        return {
            "kind": "catalog",
            "name": spec.name,
            "a": _cx(spec.a),
            "poly": [_cx(c) for c in spec.poly],
            "scale": _cx(spec.scale),
        }
    if isinstance(spec, ExpPolySymbol):
        return {
            "kind": "exppoly",
            "terms": [[_cx(c), _cx(f)] for c, f in spec.poly.terms],
        }
    if isinstance(spec, PolyTimesExp):
        return {
            "kind": "poly-times-exp",
            "poly": [_cx(c) for c in spec.poly],
            "a": _cx(spec.a),
            "b": _cx(spec.b),
        }
    if isinstance(spec, HadamardTrunc):
        return {
            "kind": "hadamard",
            "a": _cx(spec.a),
            "b": _cx(spec.b),
            "zeros": [_cx(z) for z in spec.zeros],
            "genus": spec.genus,
            "truncation": spec.truncation,
        }
    raise TypeError(f"not a SymbolSpec: {spec!r}")


def symbol_from_dict(d: dict) -> SymbolSpec:
    def opt(key, default):
        value = d.get(key)
        return default if value is None else value

    kind = d.get("kind")
    if kind == "catalog":
        return CatalogSymbol(
            name=d["name"],
            a=_uncx(opt("a", [1.0, 0.0])),
            poly=tuple(_uncx(c) for c in opt("poly", [[1.0, 0.0]])),
            scale=_uncx(opt("scale", [1.0, 0.0])),
        )
    if kind == "exppoly":
        return ExpPolySymbol(
            ExpPoly.of([(_uncx(c), _uncx(f)) for c, f in d["terms"]])
        )
    if kind == "poly-times-exp":
        return PolyTimesExp(
            poly=tuple(_uncx(c) for c in d["poly"]),
            a=_uncx(d["a"]),
            b=_uncx(opt("b", [0.0, 0.0])),
        )
    if kind == "hadamard":
        return HadamardTrunc(
            a=_uncx(d["a"]),
            b=_uncx(opt("b", [0.0, 0.0])),
            zeros=tuple(_uncx(z) for z in d["zeros"]),
            genus=int(d["genus"]),
            truncation=int(d["truncation"]),
        )
    raise ValueError(f"unknown symbol kind {kind!r}")


# ---------------------------------------------------------------------------
# Known zero sets of the catalog entries (used by the classifier).
# ---------------------------------------------------------------------------


def catalog_zeros(spec: CatalogSymbol, count: int) -> tuple[complex, ...] | None:
    """First ``count`` zeros (by modulus, with multiplicity) of a catalog
    symbol, or None when the symbol is zero-free or has no closed-form list."""
    if spec.name == CATALOG_COS:
        base = []
        k = 0
        while len(base) < count:
            z = (k + 0.5) * math.pi
            base.extend([z, -z])
            k += 1
        return tuple(z / spec.scale for z in base[:count])
    if spec.name == CATALOG_SINC_PI:
        base = []
        k = 1
        while len(base) < count:
            base.extend([k, -k])
            k += 1
        return tuple(z / spec.scale for z in base[:count])
    if spec.name == CATALOG_EXP or spec.name == CATALOG_EXP_QUADRATIC:
        return ()
    if spec.name == CATALOG_EXP_POLY:
        roots = np.roots(list(reversed(spec.poly)))
        return tuple(sorted((complex(r) / spec.scale for r in roots), key=abs))
    return None

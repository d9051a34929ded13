"""Weight functions for sup-norm extremal problems on finite-gap sets.

All weights are nonnegative and upper semi-continuous by construction.
Structured variants expose w(x)^2 as a rational function of x, which the
solver uses to locate extrema of the weighted error by root finding.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as P

from .realset import FiniteGapSet


def _poly_to_cheb_y(coeffs, center: float, half: float) -> np.ndarray:
    """Monomial coefficients in t -> Chebyshev coefficients in y = (t-center)/half."""
    p_t = P.Polynomial(np.asarray(coeffs, dtype=float))
    p_y = p_t(P.Polynomial([center, half]))
    return C.poly2cheb(p_y.coef)


def _real_zeros_on(E: FiniteGapSet, zeros, tol: float = 0.0):
    out = []
    for z in zeros:
        z = complex(z)
        if abs(z.imag) <= 1e-12 * max(1.0, E.diameter) and E.contains(z.real, tol):
            out.append(z.real)
    return tuple(out)


class Weight:
    """Base weight; subclasses evaluate pointwise and describe structure."""

    kind = "weight"
    is_unit = False

    def __call__(self, x):
        raise NotImplementedError

    def recip_data(self):
        """(m, zeros, lead) when w = 1/|P_m|, else None.  Unit weight is m = 0."""
        return None

    def square_rational(self, center: float, half: float):
        """w^2 as (num, den) Chebyshev coefficient arrays in y, or None."""
        return None

    def log_singularities(self, E: FiniteGapSet):
        """Points of E where log w diverges to -inf (quadrature breakpoints)."""
        return ()

    def tail_lower_qualified(self, E: FiniteGapSet) -> bool:
        """True when w >= |P| on E for some nonzero polynomial P."""
        return False

    def scaled(self, lam: float) -> "Weight":
        if lam <= 0:
            raise ValueError("scale must be positive")
        return ProductWeight((AbsPolyWeight([lam]), self))

    def to_dict(self):
        return {"kind": self.kind}


class UnitWeight(Weight):
    kind = "unit"
    is_unit = True

    def __call__(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def recip_data(self):
        return (0, (), 1.0)

    def square_rational(self, center, half):
        return (np.array([1.0]), np.array([1.0]))

    def tail_lower_qualified(self, E):
        return True

    def scaled(self, lam):
        if lam <= 0:
            raise ValueError("scale must be positive")
        return AbsPolyWeight([lam])


class AbsPolyWeight(Weight):
    """w(x) = |A(x)| for a real polynomial A given by monomial coefficients."""

    kind = "abs_poly"

    def __init__(self, coeffs):
        coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
        if coeffs.size == 0:
            raise ValueError("abs_poly weight is identically zero")
        self.coeffs = coeffs

    def __call__(self, x):
        return np.abs(P.polyval(np.asarray(x, dtype=float), self.coeffs))

    @property
    def zeros(self):
        if self.coeffs.size <= 1:
            return ()
        return tuple(np.roots(self.coeffs[::-1]))

    def square_rational(self, center, half):
        a = _poly_to_cheb_y(self.coeffs, center, half)
        return (C.chebmul(a, a), np.array([1.0]))

    def log_singularities(self, E):
        return _real_zeros_on(E, self.zeros, tol=1e-12 * E.diameter)

    def tail_lower_qualified(self, E):
        return True

    def scaled(self, lam):
        if lam <= 0:
            raise ValueError("scale must be positive")
        return AbsPolyWeight(self.coeffs * lam)

    def to_dict(self):
        return {"kind": self.kind, "coeffs": list(self.coeffs)}


class RecipPolyWeight(Weight):
    """w(x) = 1/|P_m(x)| for a real polynomial P_m with zeros off the set."""

    kind = "recip_poly"

    def __init__(self, coeffs):
        coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
        if coeffs.size == 0:
            raise ValueError("recip_poly weight needs a nonzero polynomial")
        self.coeffs = coeffs
        self.degree = coeffs.size - 1
        self.lead = float(coeffs[-1])
        if self.degree == 0:
            self._zeros: tuple[complex, ...] = ()
        else:
            self._zeros = tuple(sorted(np.roots(coeffs[::-1]), key=lambda z: (z.real, z.imag)))

    def __call__(self, x):
        vals = np.abs(P.polyval(np.asarray(x, dtype=float), self.coeffs))
        with np.errstate(divide="ignore"):
            return np.where(vals > 0, 1.0 / np.where(vals > 0, vals, 1.0), np.inf)

    @property
    def zeros(self):
        return self._zeros

    def recip_data(self):
        return (self.degree, self._zeros, self.lead)

    def square_rational(self, center, half):
        p = _poly_to_cheb_y(self.coeffs, center, half)
        return (np.array([1.0]), C.chebmul(p, p))

    def tail_lower_qualified(self, E):
        return True

    def scaled(self, lam):
        if lam <= 0:
            raise ValueError("scale must be positive")
        return RecipPolyWeight(self.coeffs / lam)

    def to_dict(self):
        return {"kind": self.kind, "coeffs": list(self.coeffs)}


class SemicircleWeight(Weight):
    """w(x) = prod_j sqrt((b_j - x)(x - a_j)), one factor per pair."""

    kind = "semicircle"

    def __init__(self, pairs):
        self.pairs = tuple((float(a), float(b)) for a, b in pairs)
        if not self.pairs or any(a >= b for a, b in self.pairs):
            raise ValueError("semicircle weight needs nonempty pairs with a < b")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        prod = np.ones_like(x)
        for a, b in self.pairs:
            prod = prod * np.clip((b - x) * (x - a), 0.0, None)
        return np.sqrt(prod)

    def square_rational(self, center, half):
        num = np.array([1.0])
        for a, b in self.pairs:
            fac = _poly_to_cheb_y([-a * b, a + b, -1.0], center, half)
            num = C.chebmul(num, fac)
        return (num, np.array([1.0]))

    def log_singularities(self, E):
        pts = [p for a, b in self.pairs for p in (a, b)]
        return tuple(p for p in pts if E.contains(p, 1e-12 * E.diameter))

    def tail_lower_qualified(self, E):
        # eps*(x-a)(b-x) is a polynomial minorant of each factor on [a, b]
        return True

    def to_dict(self):
        return {"kind": self.kind, "pairs": [list(p) for p in self.pairs]}


class SampledWeight(Weight):
    """Piecewise-linear interpolant of sampled values, clipped at zero."""

    kind = "sampled"

    def __init__(self, grid, values):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise ValueError("sampled weight needs matching 1-d grid and values")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("sampled weight grid must be strictly increasing")
        self.grid = grid
        self.values = np.clip(values, 0.0, None)

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.grid, self.values)

    def log_singularities(self, E):
        mask = self.values <= 0
        return tuple(t for t in self.grid[mask] if E.contains(t, 1e-12 * E.diameter))

    def tail_lower_qualified(self, E):
        return bool(np.all(self.values > 0))

    def to_dict(self):
        return {"kind": self.kind, "grid": list(self.grid), "values": list(self.values)}


class CallableWeight(Weight):
    """Arbitrary nonnegative callable; used for weights outside the structured
    families (e.g. essential-singularity test weights)."""

    kind = "callable"

    def __init__(self, fn, singularities=(), label="callable", qualified=False):
        self.fn = fn
        self.singularities = tuple(float(s) for s in singularities)
        self.label = label
        self.qualified = qualified

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip(np.asarray(self.fn(x), dtype=float), 0.0, None)

    def log_singularities(self, E):
        return tuple(s for s in self.singularities if E.contains(s, 1e-12 * E.diameter))

    def tail_lower_qualified(self, E):
        return self.qualified

    def to_dict(self):
        return {"kind": self.kind, "label": self.label}


class ProductWeight(Weight):
    kind = "product"

    def __init__(self, factors):
        self.factors = tuple(factors)
        if not self.factors:
            raise ValueError("product weight needs at least one factor")

    def __call__(self, x):
        out = np.ones_like(np.asarray(x, dtype=float))
        for w in self.factors:
            out = out * w(x)
        return out

    def square_rational(self, center, half):
        num, den = np.array([1.0]), np.array([1.0])
        for w in self.factors:
            part = w.square_rational(center, half)
            if part is None:
                return None
            num = C.chebmul(num, part[0])
            den = C.chebmul(den, part[1])
        return (num, den)

    def log_singularities(self, E):
        pts: list[float] = []
        for w in self.factors:
            pts.extend(w.log_singularities(E))
        return tuple(sorted(set(pts)))

    def tail_lower_qualified(self, E):
        return all(w.tail_lower_qualified(E) for w in self.factors)

    def to_dict(self):
        return {"kind": self.kind, "factors": [w.to_dict() for w in self.factors]}


def exp_inv_abs_weight(center: float, scale: float = 1.0) -> CallableWeight:
    """w(x) = exp(-scale/|x - center|): continuous, vanishing to all orders.

    The canonical example of a weight outside the Szego class.
    """

    def fn(x):
        d = np.abs(x - center)
        with np.errstate(divide="ignore"):
            return np.where(d > 0, np.exp(-scale / np.where(d > 0, d, 1.0)), 0.0)

    return CallableWeight(fn, singularities=(center,), label=f"exp(-{scale}/|x-{center}|)")

"""Logarithmic potential theory on finite-gap subsets of the real line.

Everything reduces to the pole-at-infinity case.  For a set E with bands
(a_j, b_j) and R(t) = prod_j (t - a_j)(t - b_j), the equilibrium density is

    rho(t) = |Q(t)| / (pi * sqrt(|R(t)|)),

with Q monic of degree p-1 fixed by vanishing period integrals of
Q/sqrt(R) over the bounded gaps.  The Green function with pole at
infinity is g(z) = int log|z-t| drho(t) - log cap(E); its critical points
are the zeros of Q, one per bounded gap.

Finite poles are handled by the Moebius substitution s = 1/(t - x0),
which maps E to another finite union of closed intervals and turns
g_E(. , x0) into the pole-at-infinity Green function of the image set.
Harmonic measure at a finite base transforms the same way.  For a base
at a conjugate pair {c, conj(c)} off the real line (needed when rational
weights have complex zeros) the pair measure omega(. , c) + omega(. , conj(c))
has density |M(t)| / (pi |t - c|^2 sqrt(|R(t)|)) with M of degree p fixed
by a residue condition at c plus the gap period conditions.

Quadrature: the substitution t = m - r*cos(theta) per band/gap removes
the inverse-square-root endpoint singularities; Gauss-Legendre in theta
then converges geometrically.  One-dimensional Green values at real
points use int Q/sqrt(R) from the nearest band edge with a u^2
substitution at the edge.  All computations run in coordinates
normalized to the convex hull for conditioning.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate
from scipy.optimize import brentq

from .errors import BothComplexError, IllConditionedError, PoleOnSetError, ZeroOnSetError
from .realset import FiniteGapSet, Gap, make_set
from .weights import Weight

_XREF = 3.0  # reference point in normalized coordinates (hull is [-1, 1])
_NEAR_DIST = 0.05


@lru_cache(maxsize=32)
def _leggauss01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=32)
def _leggauss0pi(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * np.pi * (x + 1.0), 0.5 * np.pi * w


class _Core:
    """Equilibrium data of one finite-gap set, in hull-normalized coordinates."""

    def __init__(self, E: FiniteGapSet, order: int = 256, max_order: int = 2048):
        self.E = E
        lo, hi = E.hull
        self.center = 0.5 * (lo + hi)
        self.half = 0.5 * (hi - lo)
        self.bands = [
            ((a - self.center) / self.half, (b - self.center) / self.half)
            for a, b in E.bands
        ]
        self.p = len(self.bands)
        self.ends = np.array([e for ab in self.bands for e in ab])
        self._near_nodes = None

        prev_logcap = None
        n = order
        while True:
            self._build(n)
            ok = abs(self.mass - 1.0) < 5e-13
            if prev_logcap is not None and ok and abs(self.logcap - prev_logcap) < 5e-14:
                break
            if n >= max_order:
                if not ok:
                    raise IllConditionedError(
                        f"equilibrium mass off by {self.mass - 1.0:.3e} at order {n}"
                    )
                break
            prev_logcap = self.logcap
            n *= 2
        self.order = n
        self.capacity = self.half * math.exp(self.logcap)

    # -- construction ------------------------------------------------------

    def _sqrt_excl(self, tau, skip=()):
        """sqrt(prod over endpoints not in `skip` (by index) of |tau - e|)."""
        out = np.ones_like(np.asarray(tau, dtype=float))
        for i, e in enumerate(self.ends):
            if i in skip:
                continue
            out = out * np.abs(tau - e)
        return np.sqrt(out)

    def _build(self, n: int):
        theta, v = _leggauss0pi(n)
        cos = np.cos(theta)

        # period conditions fix the p-1 free coefficients of monic Q
        if self.p == 1:
            self.qh = np.array([1.0])
        else:
            A = np.empty((self.p - 1, self.p - 1))
            rhs = np.empty(self.p - 1)
            for k in range(self.p - 1):
                glo, ghi = self.bands[k][1], self.bands[k + 1][0]
                m, r = 0.5 * (glo + ghi), 0.5 * (ghi - glo)
                tau = m - r * cos
                base = v / self._sqrt_excl(tau, skip=(2 * k + 1, 2 * k + 2))
                pw = np.ones_like(tau)
                for i in range(self.p - 1):
                    A[k, i] = np.dot(base, pw)
                    pw = pw * tau
                rhs[k] = -np.dot(base, pw)
            if np.linalg.cond(A) > 1e13:
                raise IllConditionedError("gap period system is numerically singular")
            self.qh = np.append(np.linalg.solve(A, rhs), 1.0)

        # per-band equilibrium quadrature rule
        nodes, weights = [], []
        self._band_slices = []
        pos = 0
        for j, (a, b) in enumerate(self.bands):
            m, r = 0.5 * (a + b), 0.5 * (b - a)
            tau = m - r * cos
            s = self._sqrt_excl(tau, skip=(2 * j, 2 * j + 1))
            w = v * np.abs(P.polyval(tau, self.qh)) / (np.pi * s)
            nodes.append(tau)
            weights.append(w)
            self._band_slices.append((pos, pos + n))
            pos += n
        self.nodes = np.concatenate(nodes)
        self.weights = np.concatenate(weights)
        self.mass = float(self.weights.sum())

        g_ref = self._edge_integral(1.0, _XREF, skip_index=2 * self.p - 1)
        self.logcap = float(
            np.dot(self.weights, np.log(np.abs(_XREF - self.nodes))) - g_ref
        )

        self._criticals_hat = self._find_criticals()

    def _edge_integral(self, edge: float, x: float, skip_index: int) -> float:
        """int_edge^x Q/sqrt(|R|) dtau with the sqrt singularity at `edge` removed."""
        u, w = _leggauss01(256)
        tau = edge + (x - edge) * u * u
        f = (
            2.0
            * math.sqrt(abs(x - edge))
            * P.polyval(tau, self.qh)
            / self._sqrt_excl(tau, skip=(skip_index,))
        )
        return float(np.dot(w, f))

    def _find_criticals(self):
        out = []
        for k in range(self.p - 1):
            glo, ghi = self.bands[k][1], self.bands[k + 1][0]
            fn = lambda t: P.polyval(t, self.qh)
            zk = brentq(fn, glo, ghi, xtol=1e-15, rtol=8.9e-16)
            out.append((k, zk, self.g_gap(zk)))
        return out

    # -- evaluation --------------------------------------------------------

    def band_index_hat(self, x: float) -> int:
        for j, (a, b) in enumerate(self.bands):
            if a <= x <= b:
                return j
        return -1

    def dist_hat(self, z: complex) -> float:
        x, y = z.real, z.imag
        best = math.inf
        for a, b in self.bands:
            dx = max(a - x, x - b, 0.0)
            best = min(best, math.hypot(dx, y))
        return best

    def g_gap(self, x: float) -> float:
        """Green value at a real point off the set via the edge integral."""
        edges = self.ends
        right_of = np.searchsorted(edges, x)
        if right_of == 0:
            e, idx = edges[0], 0
        elif right_of == len(edges):
            e, idx = edges[-1], len(edges) - 1
        else:
            lo_e, hi_e = edges[right_of - 1], edges[right_of]
            if x - lo_e <= hi_e - x:
                e, idx = lo_e, right_of - 1
            else:
                e, idx = hi_e, right_of
        return abs(self._edge_integral(float(e), x, skip_index=int(idx)))

    def _near_rule(self):
        if self._near_nodes is None:
            theta, v = _leggauss0pi(2048)
            cos = np.cos(theta)
            nodes, weights = [], []
            for j, (a, b) in enumerate(self.bands):
                m, r = 0.5 * (a + b), 0.5 * (b - a)
                tau = m - r * cos
                s = self._sqrt_excl(tau, skip=(2 * j, 2 * j + 1))
                nodes.append(tau)
                weights.append(v * np.abs(P.polyval(tau, self.qh)) / (np.pi * s))
            self._near_nodes = (np.concatenate(nodes), np.concatenate(weights))
        return self._near_nodes

    def g_hat(self, z) -> float:
        """Green function with pole at infinity, normalized coordinates."""
        z = complex(z)
        if math.isinf(abs(z)):
            return math.inf
        if z.imag == 0.0:
            x = z.real
            if self.band_index_hat(x) >= 0:
                return 0.0
            if abs(x) <= _XREF:
                return self.g_gap(x)
            return float(
                np.dot(self.weights, np.log(np.abs(x - self.nodes))) - self.logcap
            )
        if self.dist_hat(z) < _NEAR_DIST:
            nodes, weights = self._near_rule()
        else:
            nodes, weights = self.nodes, self.weights
        return float(np.dot(weights, np.log(np.abs(z - nodes))) - self.logcap)

    @staticmethod
    def _theta_of(a: float, b: float, x: float) -> float:
        # ((a-x)+(b-x))/(b-a) is exactly +-1 when x hits an endpoint
        ratio = ((a - x) + (b - x)) / (b - a)
        return math.acos(min(1.0, max(-1.0, ratio)))

    def mass_hat(self, lo: float, hi: float, order: int = 160) -> float:
        """Equilibrium mass of [lo, hi] (normalized coordinates)."""
        if hi <= lo:
            return 0.0
        total = 0.0
        u, w = np.polynomial.legendre.leggauss(order)
        for j, (a, b) in enumerate(self.bands):
            c, d = max(lo, a), min(hi, b)
            if d <= c:
                continue
            m, r = 0.5 * (a + b), 0.5 * (b - a)
            th1 = self._theta_of(a, b, c)
            th2 = self._theta_of(a, b, d)
            theta = 0.5 * (th2 + th1) + 0.5 * (th2 - th1) * u
            ww = 0.5 * (th2 - th1) * w
            tau = m - r * np.cos(theta)
            s = self._sqrt_excl(tau, skip=(2 * j, 2 * j + 1))
            total += float(
                np.dot(ww, np.abs(P.polyval(tau, self.qh)) / (np.pi * s))
            )
        return total

    def density_hat(self, tau):
        """Equilibrium density in normalized coordinates (inf at band edges)."""
        tau = np.asarray(tau, dtype=float)
        r = np.ones_like(tau)
        for e in self.ends:
            r = r * np.abs(tau - e)
        with np.errstate(divide="ignore"):
            return np.abs(P.polyval(tau, self.qh)) / (np.pi * np.sqrt(r))

    # -- coordinate helpers --------------------------------------------------

    def to_hat(self, t):
        return (t - self.center) / self.half

    def from_hat(self, tau):
        return self.center + self.half * tau


@lru_cache(maxsize=64)
def _core(E: FiniteGapSet) -> _Core:
    return _Core(E)


@lru_cache(maxsize=128)
def _inverted_set(E: FiniteGapSet, x0: float) -> FiniteGapSet:
    """Image of E under t -> 1/(t - x0); again a finite union of intervals."""
    if E.contains(x0):
        raise PoleOnSetError(f"point {x0} lies on the set")
    ivals = []
    for a, b in E.bands:
        u, v = 1.0 / (b - x0), 1.0 / (a - x0)
        ivals.append((min(u, v), max(u, v)))
    return make_set(ivals, merge_tol=0.0)


# -- equilibrium ------------------------------------------------------------


@dataclass(frozen=True)
class EquilibriumData:
    """Equilibrium measure of a finite-gap set.

    Q holds monomial coefficients (low to high) of the monic degree-(p-1)
    polynomial in the original variable; robin = -log capacity.
    """

    E: FiniteGapSet
    Q: tuple[float, ...]
    capacity: float
    robin: float
    _core: _Core = field(repr=False, compare=False)

    def density(self, t):
        return self._core.density_hat(self._core.to_hat(np.asarray(t, dtype=float))) / self._core.half

    def mass(self, lo: float, hi: float) -> float:
        return self._core.mass_hat(self._core.to_hat(lo), self._core.to_hat(hi))

    def band_masses(self) -> np.ndarray:
        w = self._core.weights
        return np.array([w[i:j].sum() for i, j in self._core._band_slices])


@lru_cache(maxsize=64)
def equilibrium(E: FiniteGapSet) -> EquilibriumData:
    core = _core(E)
    # Q(t) = half^(p-1) * Qhat((t - center)/half), monic in t
    q_t = P.Polynomial(core.qh)(P.Polynomial([-core.center / core.half, 1.0 / core.half]))
    coeffs = q_t.coef * core.half ** (core.p - 1)
    return EquilibriumData(
        E=E,
        Q=tuple(float(c) for c in coeffs),
        capacity=core.capacity,
        robin=-math.log(core.capacity),
        _core=core,
    )


# -- Green functions ---------------------------------------------------------


@dataclass(frozen=True)
class CriticalPoint:
    """Critical point of a Green function inside one gap of the base set."""

    gap: Gap
    location: float  # may be +-inf when the critical point sits at infinity
    value: float


@dataclass(frozen=True)
class GreenEvaluator:
    """Green function g_E(., pole) of the complement of a finite-gap set."""

    E: FiniteGapSet
    pole: float
    critical_points: tuple[CriticalPoint, ...]
    pw_sum: float
    _core: _Core = field(repr=False, compare=False)

    def _one(self, z) -> float:
        if math.isinf(self.pole):
            return self._core.g_hat(self._core.to_hat(complex(z)))
        z = complex(z)
        if z == self.pole:
            return math.inf
        s = 0.0 if math.isinf(abs(z)) else 1.0 / (z - self.pole)
        return self._core.g_hat(self._core.to_hat(s))

    def __call__(self, z):
        if np.isscalar(z) or isinstance(z, complex):
            return self._one(z)
        arr = np.asarray(z)
        return np.array([self._one(v) for v in arr.ravel()]).reshape(arr.shape)


@lru_cache(maxsize=128)
def green(E: FiniteGapSet, pole: float = math.inf) -> GreenEvaluator:
    """Green function with pole at infinity or at a finite real point off E."""
    pole = float(pole)
    if math.isnan(pole):
        raise ValueError("pole must be a real number or +-inf")
    if math.isinf(pole):
        core = _core(E)
        crits = []
        for k, zhat, gval in core._criticals_hat:
            crits.append(CriticalPoint(E.gaps()[k], core.from_hat(zhat), gval))
        return GreenEvaluator(E, pole, tuple(crits), sum(c.value for c in crits), core)
    if E.contains(pole):
        raise PoleOnSetError(f"pole {pole} lies on the set")
    Einv = _inverted_set(E, pole)
    core = _core(Einv)
    crits = []
    for _, zhat, gval in core._criticals_hat:
        s = core.from_hat(zhat)
        loc = math.inf if abs(s) < 1e-14 / max(E.diameter, 1.0) else pole + 1.0 / s
        crits.append(CriticalPoint(E.locate(loc), loc, gval))
    return GreenEvaluator(E, pole, tuple(crits), sum(c.value for c in crits), core)


def critical_points(gev: GreenEvaluator):
    """(gap, location, value) triples, one per gap not containing the pole."""
    return [(c.gap, c.location, c.value) for c in gev.critical_points]


def pw_sum(gev: GreenEvaluator) -> float:
    """Parreau-Widom sum: total Green value over the critical points."""
    return gev.pw_sum


# -- harmonic measure --------------------------------------------------------


@dataclass(frozen=True)
class HarmonicMeasure:
    """Harmonic measure omega_E(., base) for base infinity or real off E."""

    E: FiniteGapSet
    base: float
    _core: _Core = field(repr=False, compare=False)

    @property
    def _finite(self) -> bool:
        return not math.isinf(self.base)

    def nodes_weights(self):
        """Quadrature rule on E integrating smooth f against the measure."""
        core = self._core
        s = core.from_hat(core.nodes)
        t = self.base + 1.0 / s if self._finite else s
        return t, core.weights.copy()

    def density(self, t):
        t = np.asarray(t, dtype=float)
        core = self._core
        if not self._finite:
            return core.density_hat(core.to_hat(t)) / core.half
        s = 1.0 / (t - self.base)
        rho_s = core.density_hat(core.to_hat(s)) / core.half
        return rho_s / (t - self.base) ** 2

    def mass(self, lo: float, hi: float) -> float:
        if hi < lo:
            lo, hi = hi, lo
        core = self._core
        if not self._finite:
            return core.mass_hat(core.to_hat(lo), core.to_hat(hi))
        total = 0.0
        for a, b in self.E.bands:
            c, d = max(lo, a), min(hi, b)
            if d <= c:
                continue
            u, v = 1.0 / (d - self.base), 1.0 / (c - self.base)
            lo_s, hi_s = min(u, v), max(u, v)
            total += core.mass_hat(core.to_hat(lo_s), core.to_hat(hi_s))
        return total

    def _pull(self, tau):
        s = self._core.from_hat(tau)
        return self.base + 1.0 / s if self._finite else s

    def log_integral_once(self, w: Weight, floor: float) -> float:
        """int max(log w, -floor) d(omega) by adaptive quadrature per band."""
        core = self._core
        sings = w.log_singularities(self.E)
        total = 0.0
        for j, (a, b) in enumerate(core.bands):
            m, r = 0.5 * (a + b), 0.5 * (b - a)

            def integrand(theta):
                tau = m - r * math.cos(theta)
                t = self._pull(tau)
                wval = float(w(np.array([t]))[0])
                lw = math.log(wval) if wval > 0 else -math.inf
                lw = max(lw, -floor)
                s = float(core._sqrt_excl(np.array([tau]), skip=(2 * j, 2 * j + 1))[0])
                dens = abs(float(P.polyval(tau, core.qh))) / (math.pi * s)
                return lw * dens

            points = []
            for ts in sings:
                if self._finite:
                    if ts == self.base:
                        continue
                    s_img = 1.0 / (ts - self.base)
                    tau_s = core.to_hat(s_img)
                else:
                    tau_s = core.to_hat(ts)
                if a < tau_s < b:
                    arg = min(1.0, max(-1.0, (m - tau_s) / r))
                    points.append(math.acos(arg))
            with warnings.catch_warnings():
                # endpoint log singularities are expected; QUADPACK extrapolates
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, _ = integrate.quad(
                    integrand,
                    0.0,
                    np.pi,
                    points=sorted(points) if points else None,
                    limit=300,
                    epsabs=1e-13,
                    epsrel=1e-12,
                )
            total += val
        return total


@lru_cache(maxsize=128)
def harmonic_measure(E: FiniteGapSet, base: float = math.inf) -> HarmonicMeasure:
    base = float(base)
    if math.isnan(base):
        raise ValueError("base must be a real number or +-inf")
    if math.isinf(base):
        return HarmonicMeasure(E, base, _core(E))
    if E.contains(base):
        raise PoleOnSetError(f"base {base} lies on the set")
    return HarmonicMeasure(E, base, _core(_inverted_set(E, base)))


# -- pole-shift identity ------------------------------------------------------


def _split_point(z):
    """Return (value, kind) with kind in {'inf', 'real', 'complex'}."""
    if isinstance(z, complex) and z.imag != 0.0:
        if math.isnan(z.imag) or math.isnan(z.real):
            raise ValueError("nan argument")
        return z, "complex"
    x = z.real if isinstance(z, complex) else float(z)
    if math.isnan(x):
        raise ValueError("nan argument")
    if math.isinf(x):
        return math.inf, "inf"
    return x, "real"


def green_cross(E: FiniteGapSet, z, pole) -> float:
    """g_E(z, pole) for mixed real/complex arguments via the pole-shift identity

        g_E(z, x0) = g_E(z, inf) - log|z - x0| + int log|zeta - x0| d omega_E(zeta, z),

    with the harmonic measure based at whichever of the two points is real.
    At least one of z, pole must be real or infinite.
    """
    zv, zk = _split_point(z)
    pv, pk = _split_point(pole)
    if zk == "complex" and pk == "complex":
        raise BothComplexError("at least one of z, pole must be real or infinite")
    if pk != "complex" and E.contains(pv):
        raise PoleOnSetError(f"pole {pv} lies on the set")
    if zk != "complex" and E.contains(zv):
        return 0.0
    if zv == pv:
        return math.inf

    if pk == "inf":
        return green(E, math.inf)(zv)
    if zk == "complex":
        # symmetry: evaluate g(., z) at the real point `pole`
        return green_cross(E, pv, zv)
    if zk == "inf":
        # g(inf, pole) = g(pole, inf); equilibrium formula handles complex poles
        core = _core(E)
        return core.g_hat(core.to_hat(complex(pv)))

    meas = harmonic_measure(E, zv)
    t, w = meas.nodes_weights()
    integral = float(np.dot(w, np.log(np.abs(t - pv))))
    return green(E, math.inf)(zv) - math.log(abs(zv - pv)) + integral


# -- Szego factors ------------------------------------------------------------


@dataclass(frozen=True)
class SzegoIntegral:
    """Result of int log w d omega with divergence detection.

    The integral is computed with the integrand floored at -F for
    F = 1e6, 1e9, 1e12; a strictly decreasing sequence marks divergence
    to -inf (the floored value keeps dropping as the floor recedes).
    """

    value: float
    divergent: bool
    floor_values: tuple[float, ...]


def szego_integral(E: FiniteGapSet, w: Weight, x_star: float = math.inf) -> SzegoIntegral:
    meas = harmonic_measure(E, x_star)
    t, ww = meas.nodes_weights()
    wt = np.asarray(w(t), dtype=float)
    wmin = float(wt.min(initial=math.inf))
    if wmin > 0 and math.log(wmin) > -1e5 and not w.log_singularities(E):
        val = meas.log_integral_once(w, 1e6)
        return SzegoIntegral(val, False, (val,))
    floors = (1e6, 1e9, 1e12)
    vals = tuple(meas.log_integral_once(w, f) for f in floors)
    drops = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
    divergent = all(d < -1e-6 * max(1.0, abs(vals[i])) for i, d in enumerate(drops))
    value = -math.inf if divergent else vals[-1]
    return SzegoIntegral(value, divergent, vals)


def szego_factor(E: FiniteGapSet, w: Weight, x_star: float = math.inf) -> float:
    """exp(int log w d omega_E(., x_star)); zero when the integral diverges."""
    res = szego_integral(E, w, x_star)
    if res.divergent:
        return 0.0
    return math.exp(res.value) if res.value > -745.0 else 0.0


def szego_recip_poly(E: FiniteGapSet, zeros, x_star: float = math.inf, lead: float = 1.0) -> float:
    """Szego factor of w = 1/|P_m| in closed form from Green values:

        S = exp(m g(x*, inf) - sum_j g(x*, c_j)) / |P_m(x*)|,

    extended by limits to x* = inf and to x* at a zero of P_m.
    """
    zeros = [complex(c) for c in zeros]
    diam = E.diameter
    for c in zeros:
        if abs(c.imag) <= 1e-14 * diam and E.contains(c.real):
            raise ZeroOnSetError(f"zero {c} lies on the set")
    m = len(zeros)
    lead = abs(float(lead))
    cap = equilibrium(E).capacity

    if math.isinf(x_star):
        total = sum(green_cross(E, c, math.inf) for c in zeros)
        return math.exp(-total) / (lead * cap**m)

    x_star = float(x_star)
    if E.contains(x_star):
        raise PoleOnSetError(f"normalization point {x_star} lies on the set")
    match_tol = 1e-12 * diam
    matched = [c for c in zeros if abs(c - x_star) <= match_tol]
    others = [c for c in zeros if abs(c - x_star) > match_tol]
    g_inf = green(E, math.inf)(x_star)
    total = sum(green_cross(E, x_star, c) for c in others)
    pm_reduced = lead * abs(np.prod([x_star - c for c in others])) if others else lead
    val = math.exp(m * g_inf - total) / pm_reduced
    if matched:
        # Robin-type constant of the pole: g(z, x*) + log|z - x*| -> -log cap(1/(E - x*))
        gamma = -math.log(equilibrium(_inverted_set(E, x_star)).capacity)
        val *= math.exp(-len(matched) * gamma)
    return val


# -- conjugate-pair harmonic measure ------------------------------------------


@dataclass(frozen=True)
class PairMeasure:
    """omega_E(., c) + omega_E(., conj(c)) for a base pair off the real line."""

    E: FiniteGapSet
    base: complex
    _core: _Core = field(repr=False, compare=False)
    _M: tuple[float, ...] = ()

    def _density_hat(self, tau):
        tau = np.asarray(tau, dtype=float)
        core = self._core
        ch = complex((self.base - core.center) / core.half)
        r = np.ones_like(tau)
        for e in core.ends:
            r = r * np.abs(tau - e)
        with np.errstate(divide="ignore"):
            return np.abs(P.polyval(tau, np.asarray(self._M))) / (
                np.pi * np.abs(tau - ch) ** 2 * np.sqrt(r)
            )

    def density(self, t):
        core = self._core
        return self._density_hat(core.to_hat(np.asarray(t, dtype=float))) / core.half

    def mass(self, lo: float, hi: float, order: int = 200) -> float:
        if hi < lo:
            lo, hi = hi, lo
        core = self._core
        ch = complex((self.base - core.center) / core.half)
        M = np.asarray(self._M)
        lo, hi = core.to_hat(lo), core.to_hat(hi)
        u, w = np.polynomial.legendre.leggauss(order)
        total = 0.0
        for j, (a, b) in enumerate(core.bands):
            c, d = max(lo, a), min(hi, b)
            if d <= c:
                continue
            m, r = 0.5 * (a + b), 0.5 * (b - a)
            th1 = core._theta_of(a, b, c)
            th2 = core._theta_of(a, b, d)
            theta = 0.5 * (th2 + th1) + 0.5 * (th2 - th1) * u
            ww = 0.5 * (th2 - th1) * w
            tau = m - r * np.cos(theta)
            s = core._sqrt_excl(tau, skip=(2 * j, 2 * j + 1))
            f = np.abs(P.polyval(tau, M)) / (np.pi * np.abs(tau - ch) ** 2 * s)
            total += float(np.dot(ww, f))
        return total

    def total(self) -> float:
        lo, hi = self.E.hull
        return self.mass(lo, hi)


def _sqrt_R_branch(core: _Core, z: complex) -> complex:
    """Branch of sqrt(R) with cuts on the bands only, ~ z^p at +infinity."""
    out = complex(1.0)
    for e in core.ends:
        out *= cmath.sqrt(z - e)
    return out


@lru_cache(maxsize=64)
def conjugate_pair_measure(E: FiniteGapSet, base: complex) -> PairMeasure:
    """Construct the pair measure; `base` must have nonzero imaginary part."""
    base = complex(base)
    if base.imag == 0.0:
        raise ValueError("base must be non-real; use harmonic_measure for real bases")
    core = _core(E)
    ch = (base - core.center) / core.half
    p = core.p

    # M of degree p: residue condition at the base pair + gap period conditions
    A = np.zeros((p + 1, p + 1))
    rhs = np.zeros(p + 1)
    pw = np.ones(1, dtype=complex)
    powers = [ch**i for i in range(p + 1)]
    A[0, :] = [x.real for x in powers]
    A[1, :] = [x.imag for x in powers]
    target = -(ch - ch.conjugate()) * _sqrt_R_branch(core, ch)
    rhs[0], rhs[1] = target.real, target.imag

    theta, v = _leggauss0pi(max(256, core.order))
    cos = np.cos(theta)
    for k in range(p - 1):
        glo, ghi = core.bands[k][1], core.bands[k + 1][0]
        m, r = 0.5 * (glo + ghi), 0.5 * (ghi - glo)
        tau = m - r * cos
        s = core._sqrt_excl(tau, skip=(2 * k + 1, 2 * k + 2))
        base_w = v / (np.abs(tau - ch) ** 2 * s)
        pw = np.ones_like(tau)
        for i in range(p + 1):
            A[2 + k, i] = np.dot(base_w, pw)
            pw = pw * tau
    if np.linalg.cond(A) > 1e13:
        raise IllConditionedError("pair-measure system is numerically singular")
    M = np.linalg.solve(A, rhs)

    meas = PairMeasure(E, base, core, tuple(float(x) for x in M))
    if abs(meas.total() - 2.0) > 1e-8:
        raise IllConditionedError(
            f"pair measure mass {meas.total():.12f} deviates from 2"
        )
    return meas

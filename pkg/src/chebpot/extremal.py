"""Remez exchange for weighted minimax polynomials on finite-gap sets.

Solves min ||w P|| over polynomials of degree at most n normalized at a
point x*: monic of degree n when x* is infinite, P(x*) = 1 when x* is
finite.  The optimum is characterized by n+1 alternation points with the
sign pattern sigma_j = (-1)^(k*-j) sgn(x* - x_j), where k* indexes the
consecutive pair straddling x* (cyclically, with sgn(inf - x) = 1).

The solver works on the flipped error f(x) = sgn(x* - x) w(x) P(x),
whose optimal values alternate strictly; each iteration solves the
linear system f(x_j) = (-1)^j h and re-selects extrema.  For weights
with rational square (unit, |A|, 1/|P_m|, semicircle factors, products)
the extrema of |f| per band are located exactly as roots of

    H = 2 P' N D + P (N' D - N D'),      w^2 = N/D,

so the converged norm is grid-independent; sampled/callable weights fall
back to a refined grid with parabolic polishing.  A normalization point
in the unbounded gap reduces to the monic problem by rescaling, which is
exact by the gap-continuity of the extremal polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import (
    DifferentGapError,
    NoConvergenceError,
    PoleOnSetError,
    WeightDegenerateError,
    ZeroAtPointError,
)
from .potential import equilibrium
from .realset import FiniteGapSet, sample_grid
from .weights import Weight

_DEGENERATE_LEAD = 1e-10


@dataclass(frozen=True)
class RemezOptions:
    tol: float = 1e-11  # relative equioscillation defect
    grid: int = 2048  # cosine nodes per band for candidate supply
    max_grid: int = 32768  # refinement ceiling (sampled/callable weights)
    max_iter: int = 80


@dataclass(frozen=True)
class ExtremalPoly:
    """Weighted minimax polynomial with its alternation certificate.

    cheb_coeffs are Chebyshev coefficients in y = (x - center)/half with
    (center, half) the hull map of E.  k_star is the 1-based index of the
    alternation pair straddling the normalization point.
    """

    E: FiniteGapSet
    n: int
    x_star: float
    center: float
    half: float
    cheb_coeffs: tuple[float, ...]
    t: float
    alternation: tuple[float, ...]
    signs: tuple[int, ...]
    k_star: int
    defect: float
    degree: int

    def __call__(self, x):
        y = (np.asarray(x) - self.center) / self.half
        val = C.chebval(y, np.asarray(self.cheb_coeffs))
        return float(val) if np.isscalar(x) else val

    def coefficients(self) -> np.ndarray:
        """Monomial coefficients in x, low to high, length n+1."""
        poly_y = C.cheb2poly(np.asarray(self.cheb_coeffs))
        comp = np.polynomial.polynomial.Polynomial(poly_y)(
            np.polynomial.polynomial.Polynomial(
                [-self.center / self.half, 1.0 / self.half]
            )
        )
        out = np.zeros(self.n + 1)
        out[: comp.coef.size] = comp.coef
        return out

    def zeros(self) -> np.ndarray:
        coeffs = C.chebtrim(np.asarray(self.cheb_coeffs), tol=0.0)
        roots_y = C.chebroots(coeffs)
        return self.center + self.half * roots_y

    def leading_coefficient(self) -> float:
        c = self.cheb_coeffs[self.n] if len(self.cheb_coeffs) == self.n + 1 else 0.0
        return c * 2.0 ** (self.n - 1) / self.half**self.n if self.n >= 1 else c


@dataclass(frozen=True)
class AlternationReport:
    t: float
    audit_max: float
    audit_excess: float  # (audit_max - t)/t
    sign_residuals: tuple[float, ...]
    pattern_ok: bool
    passed: bool


def _sign_factor(x, x_star: float):
    if math.isinf(x_star):
        return np.ones_like(np.asarray(x, dtype=float))
    return np.sign(x_star - np.asarray(x, dtype=float))


def _pattern_signs(points, x_star: float, k_star: int) -> np.ndarray:
    j = np.arange(1, len(points) + 1)
    s = np.ones(len(points)) if math.isinf(x_star) else np.sign(x_star - np.asarray(points))
    return ((-1.0) ** (k_star - j)) * s


def _k_star_of(points, x_star: float) -> int:
    if math.isinf(x_star):
        return len(points)
    pts = np.asarray(points)
    inside = np.nonzero((pts[:-1] < x_star) & (x_star < pts[1:]))[0]
    if inside.size:
        return int(inside[0]) + 1
    return len(points)  # x* in the wrap-around pair through infinity


class _Workspace:
    def __init__(self, E: FiniteGapSet, w: Weight, x_star: float, n: int, opts: RemezOptions):
        self.E, self.w, self.x_star, self.n, self.opts = E, w, x_star, n, opts
        lo, hi = E.hull
        self.center, self.half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        self.structural = w.square_rational(self.center, self.half)
        self.grid_n = opts.grid
        self._set_grid(self.grid_n)

    def _set_grid(self, grid_n: int):
        self.grid_n = grid_n
        self.grid = sample_grid(self.E, grid_n)
        self.wg = np.asarray(self.w(self.grid), dtype=float)
        if not np.any(self.wg > 0):
            raise WeightDegenerateError("weight vanishes on the whole grid")
        self.sg = _sign_factor(self.grid, self.x_star)

    # -- linear solve on a reference ------------------------------------

    def solve_system(self, ref: np.ndarray):
        n, x_star = self.n, self.x_star
        y = (ref - self.center) / self.half
        wr = np.asarray(self.w(ref), dtype=float)
        sr = _sign_factor(ref, x_star)
        alt = (-1.0) ** np.arange(n + 1)
        V = C.chebvander(y, n)
        if math.isinf(x_star):
            kappa = self.half**n * 2.0 ** (1 - n)
            A = np.empty((n + 1, n + 1))
            A[:, :n] = (wr * sr)[:, None] * V[:, :n]
            A[:, n] = -alt
            b = -(wr * sr) * kappa * V[:, n]
        else:
            y_star = (x_star - self.center) / self.half
            A = np.zeros((n + 2, n + 2))
            A[: n + 1, : n + 1] = (wr * sr)[:, None] * V
            A[: n + 1, n + 1] = -alt
            A[n + 1, : n + 1] = C.chebvander(np.array([y_star]), n)[0]
            b = np.zeros(n + 2)
            b[n + 1] = 1.0
        scale = np.max(np.abs(A), axis=1)
        scale[scale == 0] = 1.0
        A /= scale[:, None]
        b = b / scale
        try:
            sol = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        if math.isinf(x_star):
            coeffs = np.append(sol[:n], kappa)
            h = sol[n]
        else:
            coeffs = sol[: n + 1]
            h = sol[n + 1]
        return coeffs, h

    # -- candidate extrema of |f| ----------------------------------------

    def f_of(self, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
        y = (np.asarray(x, dtype=float) - self.center) / self.half
        return (
            _sign_factor(x, self.x_star)
            * np.asarray(self.w(x), dtype=float)
            * C.chebval(y, coeffs)
        )

    def _root_candidates(self, coeffs: np.ndarray) -> np.ndarray:
        N, D = self.structural
        Pd = C.chebder(coeffs)
        H = 2.0 * _chebmul3(Pd, N, D)
        H = _chebadd(H, _chebmul3(coeffs, C.chebder(N), D))
        if D.size > 1:
            H = _chebadd(H, -_chebmul3(coeffs, N, C.chebder(D)))
        scale = np.max(np.abs(H)) if H.size else 0.0
        if scale == 0.0:
            return np.empty(0)
        H = C.chebtrim(H, tol=1e-13 * scale)
        if H.size <= 1:
            return np.empty(0)
        roots = C.chebroots(H)
        roots = roots[np.abs(roots.imag) < 1e-7].real
        x = self.center + self.half * roots
        tol = 1e-9 * self.E.diameter
        out = []
        for xi in x:
            j = self.E.band_index(xi, tol)
            if j >= 0:
                a, b = self.E.bands[j]
                out.append(min(max(xi, a), b))
        return np.asarray(out)

    def _grid_candidates(self, coeffs: np.ndarray):
        fg = self.f_of(coeffs, self.grid)
        af = np.abs(fg)
        idx = np.nonzero(
            (af >= np.roll(af, 1)) & (af >= np.roll(af, -1)) & (af > 0)
        )[0]
        idx = idx[(idx > 0) & (idx < af.size - 1)]
        xs = self.grid[idx]
        if self.structural is None and idx.size:
            xs = self._parabolic(xs, idx, af)
        return xs

    def _parabolic(self, xs, idx, af):
        out = []
        for i in idx:
            x0, x1, x2 = self.grid[i - 1], self.grid[i], self.grid[i + 1]
            f0, f1, f2 = af[i - 1], af[i], af[i + 1]
            num = (x1 - x0) ** 2 * (f1 - f2) - (x1 - x2) ** 2 * (f1 - f0)
            den = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0)
            xv = x1 if den == 0 else x1 - 0.5 * num / den
            j = self.E.band_index(x1, 0.0)
            a, b = self.E.bands[j]
            if not (a <= xv <= b) or not (x0 <= xv <= x2):
                xv = x1
            out.append(xv)
        return np.asarray(out)

    def candidates(self, coeffs: np.ndarray):
        pieces = [np.asarray([e for ab in self.E.bands for e in ab])]
        pieces.append(self._grid_candidates(coeffs))
        if self.structural is not None:
            pieces.append(self._root_candidates(coeffs))
        x = np.concatenate([p for p in pieces if p.size])
        x = np.sort(x)
        f = self.f_of(coeffs, x)
        # dedupe: keep the larger |f| among points closer than 1e-12*diam
        tol = 1e-12 * self.E.diameter
        keep_x, keep_f = [], []
        for xi, fi in zip(x, f):
            if keep_x and xi - keep_x[-1] <= tol:
                if abs(fi) > abs(keep_f[-1]):
                    keep_x[-1], keep_f[-1] = xi, fi
            else:
                keep_x.append(xi)
                keep_f.append(fi)
        return np.asarray(keep_x), np.asarray(keep_f)

    def alternating(self, x, f, prev_ref):
        """Merge same-sign runs keeping per-run maxima; ties break to spread."""
        mask = f != 0
        x, f = x[mask], f[mask]
        out_x, out_f = [], []
        for xi, fi in zip(x, f):
            if out_f and np.sign(fi) == np.sign(out_f[-1]):
                if abs(fi) > abs(out_f[-1]) * (1 + 1e-15):
                    out_x[-1], out_f[-1] = xi, fi
                elif abs(fi) >= abs(out_f[-1]) * (1 - 1e-15) and prev_ref is not None:
                    d_new = np.min(np.abs(prev_ref - xi))
                    d_old = np.min(np.abs(prev_ref - out_x[-1]))
                    if d_new > d_old:
                        out_x[-1], out_f[-1] = xi, fi
            else:
                out_x.append(xi)
                out_f.append(fi)
        return np.asarray(out_x), np.asarray(out_f)

    def select_window(self, x, f):
        m = self.n + 1
        if x.size < m:
            return None
        gmax = int(np.argmax(np.abs(f)))
        best, best_sum = None, -np.inf
        for i in range(max(0, gmax - m + 1), min(gmax, x.size - m) + 1):
            s = float(np.sum(np.abs(f[i : i + m])))
            if s > best_sum:
                best_sum, best = s, i
        return x[best : best + m]


def _chebadd(a, b):
    n = max(a.size, b.size)
    out = np.zeros(n)
    out[: a.size] += a
    out[: b.size] += b
    return out


def _chebmul3(a, b, c):
    return C.chebmul(C.chebmul(a, b), c)


def _initial_reference(ws: _Workspace) -> np.ndarray:
    """Equilibrium-proportional cosine points, snapped to live-weight nodes.

    A reference point where the weight is (numerically) dead pins the
    levelled error at zero and starves the exchange, so every point is
    moved to the nearest grid node carrying a workable weight value.
    """
    E, w, n = ws.E, ws.w, ws.n
    masses = equilibrium(E).band_masses()
    total = n + 1
    raw = masses * total
    counts = np.floor(raw).astype(int)
    rem = total - counts.sum()
    order = np.argsort(-(raw - counts))
    for i in range(rem):
        counts[order[i % len(order)]] += 1
    pts = []
    for (a, b), k in zip(E.bands, counts):
        if k == 0:
            continue
        m, r = 0.5 * (a + b), 0.5 * (b - a)
        if k == 1:
            pts.append(m)
        else:
            pts.extend(m - r * np.cos(np.pi * np.arange(k) / (k - 1)))
    pts = np.sort(np.asarray(pts))
    floor = 1e-6 * float(ws.wg.max())
    live = np.nonzero(ws.wg >= floor)[0]
    if live.size < total:
        raise WeightDegenerateError("too few grid nodes carry a usable weight value")
    live_x = ws.grid[live]
    taken: set[int] = set()
    snapped = []
    for x in pts:
        if w(np.array([x]))[0] >= floor and E.band_index(x, 0.0) >= 0:
            snapped.append(x)
            continue
        order_near = np.argsort(np.abs(live_x - x))
        for j in order_near:
            if j not in taken:
                taken.add(int(j))
                snapped.append(live_x[j])
                break
    snapped = np.unique(np.asarray(snapped))
    k = 0
    while snapped.size < total and k < live_x.size:
        if live_x[k] not in snapped:
            snapped = np.sort(np.append(snapped, live_x[k]))
        k += 1
    return snapped[:total] if snapped.size >= total else snapped


def _run_exchange(ws: _Workspace):
    opts = ws.opts
    ref = _initial_reference(ws)
    if ref.size != ws.n + 1:
        raise NoConvergenceError("could not build an initial reference")
    best = None
    since_improvement = 0
    for it in range(opts.max_iter):
        coeffs, h = ws.solve_system(ref)
        x, f = ws.candidates(coeffs)
        ax, af = ws.alternating(x, f, ref)
        window = ws.select_window(ax, af)
        if window is None:
            # starved candidate supply: blend in the current reference
            merged = np.sort(np.concatenate([ax, ref]))
            fm = ws.f_of(coeffs, merged)
            ax, af = ws.alternating(merged, fm, ref)
            window = ws.select_window(ax, af)
            if window is None:
                raise NoConvergenceError(
                    f"fewer than {ws.n + 1} alternating extrema", iterations=it
                )
        M = float(np.max(np.abs(af)))
        defect = (M - abs(h)) / M if M > 0 else math.inf
        defect = max(defect, 0.0)
        if best is None or defect < 0.8 * best[0]:
            best = (defect, coeffs, window, M)
            since_improvement = 0
        else:
            since_improvement += 1
        if defect < opts.tol:
            return coeffs, window, M, defect
        if since_improvement >= 12:
            break  # stagnating at the floating-point noise floor
        ref = window
    defect, coeffs, window, M = best
    # the noise floor scales with the polynomial's growth into the gaps,
    # so tiny-norm solutions on multi-band sets cannot reach tol itself
    if defect < 1e-6:
        return coeffs, window, M, defect
    raise NoConvergenceError(
        f"Remez defect {defect:.3e} after {opts.max_iter} iterations",
        iterations=opts.max_iter,
    )


def _assemble(ws: _Workspace, coeffs, window, M, defect) -> ExtremalPoly:
    n, x_star = ws.n, ws.x_star
    pts = np.sort(window)
    y = (pts - ws.center) / ws.half
    e_vals = np.asarray(ws.w(pts), dtype=float) * C.chebval(y, coeffs)
    signs = np.sign(e_vals).astype(int)
    k_star = _k_star_of(pts, x_star)
    cmax = np.max(np.abs(coeffs))
    degree = n
    if n >= 1 and abs(coeffs[-1]) < _DEGENERATE_LEAD * cmax:
        coeffs = coeffs.copy()
        coeffs[-1] = 0.0
        degree = n - 1
    return ExtremalPoly(
        E=ws.E,
        n=n,
        x_star=x_star,
        center=ws.center,
        half=ws.half,
        cheb_coeffs=tuple(float(c) for c in coeffs),
        t=M,
        alternation=tuple(float(p) for p in pts),
        signs=tuple(int(s) for s in signs),
        k_star=k_star,
        defect=float(defect),
        degree=degree,
    )


def solve_extremal(
    E: FiniteGapSet, w: Weight, x_star: float, n: int, opts: RemezOptions | None = None
) -> ExtremalPoly:
    """Weighted minimax polynomial of degree <= n normalized at x_star."""
    if n < 1:
        raise ValueError("degree bound n must be >= 1")
    opts = opts or RemezOptions()
    x_star = float(x_star)
    if math.isnan(x_star):
        raise ValueError("x_star must be real or +-inf")
    if not math.isinf(x_star):
        if E.contains(x_star):
            raise PoleOnSetError(f"normalization point {x_star} lies on the set")
        if not E.locate(x_star).bounded:
            base = solve_extremal(E, w, math.inf, n, opts)
            return renormalize(base, x_star)

    ws = _Workspace(E, w, x_star, n, opts)
    coeffs, window, M, defect = _run_exchange(ws)
    if ws.structural is None:
        # grid-limited extrema: refine until the norm stabilizes
        while ws.grid_n * 2 <= opts.max_grid:
            ws._set_grid(ws.grid_n * 2)
            coeffs2, window2, M2, defect2 = _run_exchange(ws)
            stable = abs(M2 - M) <= 1e-10 * max(M, M2)
            coeffs, window, M, defect = coeffs2, window2, M2, defect2
            if stable:
                break
    sol = _assemble(ws, coeffs, window, M, defect)
    expected = _pattern_signs(sol.alternation, sol.x_star, sol.k_star)
    if not np.array_equal(np.sign(expected).astype(int), np.asarray(sol.signs)):
        raise NoConvergenceError("converged solution violates the alternation pattern")
    return sol


def verify_alternation(
    sol: ExtremalPoly, E: FiniteGapSet, w: Weight, audit_per_band: int = 4096, tol: float = 1e-8
) -> AlternationReport:
    """Audit a candidate solution against the alternation characterization."""
    ws = _Workspace(E, w, sol.x_star, sol.n, RemezOptions(grid=audit_per_band))
    coeffs = np.asarray(sol.cheb_coeffs)
    x, f = ws.candidates(coeffs)
    audit_max = float(np.max(np.abs(f)))
    pts = np.asarray(sol.alternation)
    e_vals = np.asarray(w(pts), dtype=float) * sol(pts)
    expected = _pattern_signs(pts, sol.x_star, sol.k_star) * sol.t
    residuals = np.abs(e_vals - expected) / sol.t
    pattern_ok = bool(np.all(np.sign(e_vals) == np.sign(expected)))
    excess = (audit_max - sol.t) / sol.t
    passed = pattern_ok and excess <= tol and bool(np.all(residuals <= tol))
    return AlternationReport(
        t=sol.t,
        audit_max=audit_max,
        audit_excess=float(excess),
        sign_residuals=tuple(float(r) for r in residuals),
        pattern_ok=pattern_ok,
        passed=passed,
    )


def renormalize(sol: ExtremalPoly, x_new: float) -> ExtremalPoly:
    """Rescale a solution to a new normalization point in the same gap."""
    x_new = float(x_new)
    same_gap = (
        sol.E.locate(sol.x_star) if not math.isinf(sol.x_star) else sol.E.gaps()[-1]
    )
    if math.isinf(x_new):
        if not same_gap.bounded:
            return _renorm_to_monic(sol)
        raise DifferentGapError("infinity is not in the gap of the current x_star")
    if sol.E.contains(x_new):
        raise PoleOnSetError(f"{x_new} lies on the set")
    if not same_gap.contains(x_new):
        raise DifferentGapError(f"{x_new} is not in the same gap as {sol.x_star}")
    if x_new == sol.x_star:
        return sol
    val = sol(x_new)
    if abs(val) < 1e-300:
        raise ZeroAtPointError(f"polynomial vanishes at {x_new}")
    coeffs = np.asarray(sol.cheb_coeffs) / val
    signs = tuple(int(s * np.sign(val)) for s in sol.signs)
    k_star = _k_star_of(sol.alternation, x_new)
    return replace(
        sol,
        x_star=x_new,
        cheb_coeffs=tuple(float(c) for c in coeffs),
        t=sol.t / abs(val),
        signs=signs,
        k_star=k_star,
    )


def _renorm_to_monic(sol: ExtremalPoly) -> ExtremalPoly:
    lead = sol.leading_coefficient()
    if abs(lead) < 1e-300:
        raise ZeroAtPointError("degree dropped below n; no monic rescaling")
    coeffs = np.asarray(sol.cheb_coeffs) / lead
    signs = tuple(int(s * np.sign(lead)) for s in sol.signs)
    return replace(
        sol,
        x_star=math.inf,
        cheb_coeffs=tuple(float(c) for c in coeffs),
        t=sol.t / abs(lead),
        signs=signs,
        k_star=sol.n + 1,
    )

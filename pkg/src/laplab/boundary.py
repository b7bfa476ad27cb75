"""Boundary values of the free resolvent on the positive half-axis.

The pairing < R_0^m(lambda +- i0) f, g > is evaluated by a one-variable radial
reduction: with rho = |xi| and I(rho) the angular integral of fhat conj(ghat)
over the unit sphere,

    (2 pi)^d < R_0 f, g > = p.v. integral_0^inf  rho^{d-1} I(rho)
                            / (rho^{2m} - lambda) d rho
                            +- i pi F(r),
    F(rho) = rho^{d-1} I(rho) (rho - r) / (rho^{2m} - lambda),
    F(r)   = r^{d - 2m} I(r) / (2m),

where r = lambda^{1/(2m)}.  F has a removable singularity at rho = r, so the
principal value is the symmetric-window subtraction of F(r); the surface
(delta) term is pi F(r) with the coarea weight 1/(2m r^{2m-1}) built in.  The
normalization was fixed against the epsilon -> 0 limit, which is the
normalization-free ground truth.

The epsilon-limit backend integrates the same radial integrand with the
resolved Lorentzian denominator and Richardson-extrapolates over a geometric
epsilon sequence.

The oscillatory kernel of the singular part near the north pole,

    K(x', x_d) = (2 pi)^{-(d-1)} i H(x_d)
                 integral exp(i (x_d phi(xi') + x'.xi')) Q(xi') d xi',

with phi(xi') = sqrt(r^2 - |xi'|^2) and Q the graph weight tapered to a
compact north-pole patch, is evaluated by refined product quadrature and
feeds the (1+|x|)^{-(d-1)/2} decay scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .lattice import (
    Field,
    GridSpec,
    PHYSICAL,
    SpectralInterpolator,
    forward_transform,
    inverse_transform,
)
from .multiplier import pm_values

__all__ = [
    "SphereQuadrature",
    "BoundarySpec",
    "KernelSample",
    "BoundaryField",
    "DecayScan",
    "unit_sphere_rule",
    "sphere_quadrature",
    "boundary_pairing",
    "epsilon_pairing",
    "richardson_limit",
    "boundary_apply",
    "graph_and_weight",
    "kernel_k_plus",
    "decay_scan",
]


def unit_sphere_rule(d: int, n_polar: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature on the unit sphere S^{d-1}: directions (K, d) and weights
    summing to the sphere area.  d=2: uniform trapezoid in angle (spectrally
    accurate); d=3: Gauss-Legendre in the polar cosine x uniform azimuth."""
    if d == 2:
        K = 2 * n_polar
        th = 2.0 * np.pi * np.arange(K) / K
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
        wts = np.full(K, 2.0 * np.pi / K)
        return dirs, wts
    if d == 3:
        c, wc = leggauss(n_polar)
        n_az = 2 * n_polar
        ph = 2.0 * np.pi * np.arange(n_az) / n_az
        s = np.sqrt(1.0 - c**2)
        dirs = np.stack(
            [
                np.outer(s, np.cos(ph)).ravel(),
                np.outer(s, np.sin(ph)).ravel(),
                np.repeat(c, n_az),
            ],
            axis=1,
        )
        wts = np.repeat(wc, n_az) * (2.0 * np.pi / n_az)
        return dirs, wts
    raise ValueError(f"sphere quadrature implemented for d in {{2, 3}}, got {d}")


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes/weights for the surface measure on the radius-r sphere; the
    coarea factor 1/(2m r^{2m-1}) is kept separate via ``coarea_included``."""

    radius: float
    nodes: np.ndarray
    weights: np.ndarray
    coarea_included: bool = False

    def total_weight(self) -> float:
        return float(np.sum(self.weights))


def sphere_quadrature(d: int, r: float, m: int, n_polar: int = 64,
                      include_coarea: bool = False) -> SphereQuadrature:
    dirs, wts = unit_sphere_rule(d, n_polar)
    w = wts * r ** (d - 1)
    if include_coarea:
        w = w / (2.0 * m * r ** (2 * m - 1))
    return SphereQuadrature(r, r * dirs, w, include_coarea)


def sphere_restriction_norm(f: Field, r: float, n_polar: int = 64,
                            pad_factor: int = 4) -> float:
    """L^2(dsigma) norm of fhat restricted to the radius-r sphere."""
    if r <= 0:
        raise ValueError("radius must be positive")
    d = f.grid.dimension
    quad = sphere_quadrature(d, r, m=1, n_polar=n_polar)
    fh = SpectralInterpolator(f, pad_factor=pad_factor)(quad.nodes)
    return float(np.sqrt(np.sum(quad.weights * np.abs(fh) ** 2)))


@dataclass(frozen=True)
class BoundarySpec:
    """Parameters of a boundary-value evaluation at lambda +- i0."""

    lam: float
    sign: int = +1
    m: int = 1
    backend: str = "plemelj"
    delta: float = 0.5
    n_polar: int = 48
    pad_factor: int = 4
    pv_window_frac: float = 0.25    # radial half-width of the p.v. window, as a fraction of r
    eps_start: float = 0.1
    eps_count: int = 6
    rel_tol: float = 1e-7
    cross_tol: float = 1e-3         # plemelj vs epsilon-limit field cross-check

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.backend not in ("plemelj", "epsilon_limit"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if not self.delta <= self.lam <= 1.0 / self.delta:
            raise ValueError(
                f"lambda = {self.lam} outside [{self.delta}, {1 / self.delta}]"
            )

    @property
    def r(self) -> float:
        return self.lam ** (1.0 / (2 * self.m))

    def eps_sequence(self) -> np.ndarray:
        return self.eps_start * 0.5 ** np.arange(self.eps_count)


class _RadialReduction:
    """Shared machinery: I(rho) = angular integral of fhat conj(ghat)."""

    def __init__(self, f: Field, g: Field, spec: BoundarySpec):
        d = f.grid.dimension
        self.d = d
        self.m = spec.m
        self.interp_f = SpectralInterpolator(f, pad_factor=spec.pad_factor)
        self.interp_g = (
            self.interp_f
            if g is f
            else SpectralInterpolator(g, pad_factor=spec.pad_factor)
        )
        self.same = g is f
        self.dirs, self.wts = unit_sphere_rule(d, spec.n_polar)
        self.rho_max = 0.999 * f.grid.max_inscribed_freq

    def angular(self, rho: np.ndarray) -> np.ndarray:
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        pts = (rho[:, None, None] * self.dirs[None]).reshape(-1, self.d)
        vf = self.interp_f(pts)
        vg = vf if self.same else self.interp_g(pts)
        prod = (vf * np.conj(vg)).reshape(len(rho), -1)
        return prod @ self.wts

    def F(self, rho: np.ndarray, r: float, lam: float) -> np.ndarray:
        """rho^{d-1} I(rho) (rho - r)/(rho^{2m} - lam), with the removable
        singularity at rho = r filled by the coarea limit."""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        I = self.angular(rho)
        num = rho ** (self.d - 1) * I
        out = np.empty_like(I)
        close = np.abs(rho - r) < 1e-9 * r
        denom = rho ** (2 * self.m) - lam
        out[~close] = num[~close] * (rho[~close] - r) / denom[~close]
        out[close] = num[close] / (2 * self.m * r ** (2 * self.m - 1))
        return out


def _panel_nodes(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def _geometric_edges(edge: float, far: float, scale: float) -> list[float]:
    """Panel edges marching geometrically away from ``edge`` toward ``far``."""
    out = [edge]
    step = scale
    pos = edge
    direction = 1.0 if far > edge else -1.0
    while (far - pos) * direction > 1e-14:
        pos = pos + direction * step
        if (far - pos) * direction <= 0:
            pos = far
        out.append(pos)
        step *= 2.0
    return out


def _pv_radial(red: _RadialReduction, spec: BoundarySpec,
               n_nodes: int) -> complex:
    """p.v. integral of F(rho)/(rho - r) over (0, rho_max)."""
    r, lam = spec.r, spec.lam
    w = min(spec.pv_window_frac * r, 0.45 * (red.rho_max - r), 0.45 * r)
    Fr = complex(red.F(np.array([r]), r, lam)[0])

    # symmetric window: integrand (F - F(r))/(rho - r) is Hoelder
    x, wx = _panel_nodes(r - w, r + w, 2 * n_nodes)
    vals = (red.F(x, r, lam) - Fr) / (x - r)
    total = np.sum(wx * vals)

    # outer parts, geometric panels toward the window edges
    for a, b in ((1e-12, r - w), (r + w, red.rho_max)):
        edge, far = (b, a) if b == r - w else (a, b)
        edges = _geometric_edges(edge, far, w)
        for lo, hi in zip(edges[:-1], edges[1:]):
            x, wx = _panel_nodes(min(lo, hi), max(lo, hi), n_nodes)
            total += np.sum(wx * red.F(x, r, lam) / (x - r))
    return complex(total)


def _refine(fn: Callable[[int], complex], start: int, rel_tol: float,
            max_doublings: int = 4) -> tuple[complex, float]:
    prev = fn(start)
    n = start
    for _ in range(max_doublings):
        n *= 2
        cur = fn(n)
        err = abs(cur - prev)
        if err <= rel_tol * max(abs(cur), 1e-300):
            return cur, err
        prev = cur
    return prev, abs(err)


def boundary_pairing(f: Field, g: Field, spec: BoundarySpec) -> complex:
    """< R_0^m(lambda + i 0 sign) f, g > via the surface + principal-value split."""
    _check_pair(f, g)
    red = _RadialReduction(f, g, spec)
    pv, _ = _refine(lambda n: _pv_radial(red, spec, n), 16, spec.rel_tol)
    Fr = complex(red.F(np.array([spec.r]), spec.r, spec.lam)[0])
    d = f.grid.dimension
    return ((2.0 * np.pi) ** (-d)) * (pv + spec.sign * 1j * np.pi * Fr)


def surface_pairing_term(f: Field, g: Field, spec: BoundarySpec) -> complex:
    """The delta-measure term alone: +- i pi (2pi)^{-d} integral over the
    sphere with the coarea weight."""
    _check_pair(f, g)
    red = _RadialReduction(f, g, spec)
    Fr = complex(red.F(np.array([spec.r]), spec.r, spec.lam)[0])
    d = f.grid.dimension
    return ((2.0 * np.pi) ** (-d)) * spec.sign * 1j * np.pi * Fr


def _eps_quadrature(red: _RadialReduction, spec: BoundarySpec, eps: float,
                    n_nodes: int) -> complex:
    r, lam, m = spec.r, spec.lam, spec.m
    drho = eps / (2.0 * m * r ** (2 * m - 1))
    z = lam + 1j * spec.sign * eps
    half = min(0.5 * drho, 0.1 * r)
    edges_left = _geometric_edges(r - half, 1e-12, half)[::-1]
    edges_right = _geometric_edges(r + half, red.rho_max, half)
    total = 0.0 + 0.0j
    segs = list(zip(edges_left[:-1], edges_left[1:]))
    segs.append((r - half, r + half))
    segs += list(zip(edges_right[:-1], edges_right[1:]))
    for lo, hi in segs:
        x, wx = _panel_nodes(lo, hi, n_nodes)
        I = red.angular(x)
        total += np.sum(wx * x ** (red.d - 1) * I / (x ** (2 * m) - z))
    return complex(total)


def epsilon_pairing(f: Field, g: Field, spec: BoundarySpec,
                    eps: float) -> complex:
    """< R_0^m(lambda + i sign eps) f, g > by resolved radial quadrature."""
    _check_pair(f, g)
    red = _RadialReduction(f, g, spec)
    val, _ = _refine(lambda n: _eps_quadrature(red, spec, eps, n), 16,
                     spec.rel_tol)
    d = f.grid.dimension
    return ((2.0 * np.pi) ** (-d)) * val


def richardson_limit(values: Sequence[complex],
                     ratio: float = 0.5) -> tuple[complex, bool]:
    """Second-order Richardson extrapolation to eps -> 0 along a geometric
    sequence eps_k = eps_0 ratio^k.  Returns (limit, diverged flag)."""
    v = list(values)
    if len(v) < 3:
        raise ValueError("need at least 3 values for order-2 extrapolation")
    # first order: kill the eps term
    v1 = [(v[k + 1] - ratio * v[k]) / (1.0 - ratio) for k in range(len(v) - 1)]
    r2 = ratio**2
    v2 = [(v1[k + 1] - r2 * v1[k]) / (1.0 - r2) for k in range(len(v1) - 1)]
    steps = [abs(v2[k + 1] - v2[k]) for k in range(len(v2) - 1)]
    diverged = len(steps) >= 2 and steps[-1] > 4.0 * steps[-2] and \
        steps[-1] > 1e-12 * max(abs(v2[-1]), 1e-300)
    return v2[-1], diverged


def epsilon_limit_pairing(f: Field, g: Field, spec: BoundarySpec) -> complex:
    vals = [epsilon_pairing(f, g, spec, e) for e in spec.eps_sequence()]
    limit, diverged = richardson_limit(vals)
    if diverged:
        raise ArithmeticError("epsilon extrapolation of the pairing diverged")
    return limit


def _check_pair(f: Field, g: Field):
    if f.domain_tag != PHYSICAL or g.domain_tag != PHYSICAL:
        raise ValueError("boundary pairings expect physical fields")
    if f.grid != g.grid:
        raise ValueError("f and g must share a grid")


# ---------------------------------------------------------------------------
# full-field boundary operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryField:
    """Result of applying R_0^m(lambda +- i0) to a field.

    ``pv_part`` is the lattice principal-value multiplier image, ``surface_part``
    the sphere-extension (delta term) sampled on the physical lattice; ``total``
    is their sum.  ``diagnostics`` records backend cross-checks.
    """

    spec: BoundarySpec
    source: Field
    pv_part: Field
    surface_part: Field
    total: Field
    diagnostics: dict

    def weak_residual(self, g: Field) -> complex:
        """< u, (P_m(D) - lambda) g > - < f, g >: the distributional residual
        of (P_m(D) - lambda) u = f tested against g."""
        grid = self.source.grid
        d, m, lam = grid.dimension, self.spec.m, self.spec.lam
        Gh = forward_transform(g)
        Fh = forward_transform(self.source)
        pm = pm_values(grid, m)
        wspec = grid.freq_cell_volume / (2.0 * np.pi) ** d
        # lattice p.v. part pairs exactly: (pm - lam) cancels
        pv_term = wspec * np.sum(Fh.values * np.conj((pm - lam) * Gh.values)
                                 / (pm - lam))
        # surface part: (pm - lam) vanishes identically on the sphere nodes
        interp_g = SpectralInterpolator(g, pad_factor=self.spec.pad_factor)
        interp_f = SpectralInterpolator(self.source,
                                        pad_factor=self.spec.pad_factor)
        dirs, wts = unit_sphere_rule(d, self.spec.n_polar)
        r = self.spec.r
        pts = r * dirs
        coef = (self.spec.sign * 1j * np.pi / (2.0 * np.pi) ** d
                * r ** (d - 1) / (2 * m * r ** (2 * m - 1)))
        pm_on_nodes = np.sum(pts**2, axis=1) ** m
        surf_term = coef * np.sum(
            wts * interp_f(pts) * np.conj(interp_g(pts)) * (pm_on_nodes - lam)
        )
        f_pair = wspec * np.sum(Fh.values * np.conj(Gh.values))
        return complex(pv_term + surf_term - f_pair)


def _surface_extension(f: Field, spec: BoundarySpec, chunk: int = 64) -> Field:
    """The delta-term field: +- i pi (2pi)^{-d} (coarea) integral over the
    r-sphere of exp(-i xi.x) fhat(xi), sampled on the physical lattice."""
    grid = f.grid
    d, m, r = grid.dimension, spec.m, spec.r
    dirs, wts = unit_sphere_rule(d, spec.n_polar)
    pts = r * dirs
    fh = SpectralInterpolator(f, pad_factor=spec.pad_factor)(pts)
    coef = (spec.sign * 1j * np.pi / (2.0 * np.pi) ** d
            * r ** (d - 1) / (2 * m * r ** (2 * m - 1)))
    x = grid.axis_coords()
    out = np.zeros(grid.shape, dtype=np.complex128)
    amps = coef * wts * fh
    for lo in range(0, len(pts), chunk):
        sub = pts[lo:lo + chunk]
        phase = np.exp(-1j * np.multiply.outer(sub[:, 0], x))
        for ax in range(1, d):
            e = np.exp(-1j * np.multiply.outer(sub[:, ax], x))
            phase = phase[..., None] * e.reshape((len(sub),) + (1,) * ax + (len(x),))
        out += np.tensordot(amps[lo:lo + chunk], phase, axes=(0, 0))
    return Field(grid, out, PHYSICAL)


def boundary_apply(f: Field, spec: BoundarySpec) -> BoundaryField:
    """u = R_0^m(lambda +- i0) f on the lattice.

    plemelj backend: lattice principal-value multiplier plus the sphere
    extension.  epsilon_limit backend: Richardson extrapolation of the lattice
    resolvent multiplier (radially limited by the lattice step; its agreement
    with plemelj is reported in the diagnostics, not asserted).
    """
    if f.domain_tag != PHYSICAL:
        raise ValueError("boundary_apply expects a physical field")
    grid = f.grid
    pm = pm_values(grid, spec.m)
    gap = np.min(np.abs(pm - spec.lam))
    if gap < 1e-10 * spec.lam:
        raise ValueError(
            f"lambda = {spec.lam} collides with a lattice symbol value"
        )
    F = forward_transform(f)
    pv = inverse_transform(F.with_values(F.values / (pm - spec.lam)))
    surf = _surface_extension(f, spec)
    total = f.with_values(pv.values + surf.values)

    diagnostics = {"lattice_gap": float(gap)}
    if spec.backend == "epsilon_limit":
        eps = spec.eps_sequence()
        stack = [
            inverse_transform(
                F.with_values(F.values / (pm - (spec.lam + 1j * spec.sign * e)))
            ).values
            for e in eps
        ]
        ratio = 0.5
        v1 = [(stack[k + 1] - ratio * stack[k]) / (1 - ratio)
              for k in range(len(stack) - 1)]
        v2 = [(v1[k + 1] - ratio**2 * v1[k]) / (1 - ratio**2)
              for k in range(len(v1) - 1)]
        eps_field = f.with_values(v2[-1])
        scale = np.sqrt(np.sum(np.abs(total.values) ** 2))
        diff = np.sqrt(np.sum(np.abs(eps_field.values - total.values) ** 2))
        rel = float(diff / max(scale, 1e-300))
        diagnostics["backend_disagreement"] = rel
        diagnostics["backend_flag"] = rel > spec.cross_tol
        if diagnostics["backend_flag"]:
            # disagreement above tolerance: surface both results
            diagnostics["epsilon_field"] = eps_field
    return BoundaryField(spec, f, pv, surf, total, diagnostics)


# ---------------------------------------------------------------------------
# graph weight and oscillatory kernel
# ---------------------------------------------------------------------------

def _patch_profile(s: np.ndarray, s0: float = 0.5, s1: float = 0.8) -> np.ndarray:
    """Smooth angular taper: 1 for |xi'|/r <= s0, 0 beyond s1.  The radial shell
    cutoff is identically 1 on the graph, so this north-pole patch is what gives
    the kernel weight compact support."""
    u = (s1 - np.asarray(s, dtype=float)) / (s1 - s0)
    from .multiplier import _smooth_ramp
    return _smooth_ramp(u)


def graph_and_weight(lam: float, m: int, xi_prime: np.ndarray,
                     s0: float = 0.5, s1: float = 0.8):
    """Graph height phi(xi') = sqrt(r^2 - |xi'|^2) and the kernel weight
    Q(xi') = patch(|xi'|/r) / (2m |xi|^{2m-2} phi); on the graph |xi| = r."""
    xi_prime = np.atleast_2d(np.asarray(xi_prime, dtype=float))
    r = lam ** (1.0 / (2 * m))
    s = np.sqrt(np.sum(xi_prime**2, axis=1))
    if np.any(s >= r):
        raise ValueError("graph exists only for |xi'| < r")
    phi = np.sqrt(r**2 - s**2)
    q = _patch_profile(s / r, s0, s1) / (2.0 * m * r ** (2 * m - 2) * phi)
    if phi.size == 1:
        return float(phi[0]), float(q[0])
    return phi, q


@dataclass(frozen=True)
class KernelSample:
    x: np.ndarray
    value: complex
    error_estimate: float
    flagged: bool = False


def _kernel_quad(lam: float, m: int, d: int, x: np.ndarray, n_rad: int,
                 s0: float, s1: float) -> complex:
    r = lam ** (1.0 / (2 * m))
    if d == 2:
        xi, w = _panel_nodes(-s1 * r * 0.9999, s1 * r * 0.9999, n_rad)
        phi, q = graph_and_weight(lam, m, xi[:, None], s0, s1)
        phase = np.exp(1j * (x[1] * phi + x[0] * xi))
        return complex(np.sum(w * q * phase) * 1j / (2.0 * np.pi))
    if d == 3:
        rho, w = _panel_nodes(1e-9, s1 * r * 0.9999, n_rad)
        n_az = max(16, n_rad)
        alpha = 2.0 * np.pi * np.arange(n_az) / n_az
        phi, q = graph_and_weight(lam, m, rho[:, None] * np.array([[1.0, 0.0]]),
                                  s0, s1)
        radial = w * rho * q * np.exp(1j * x[2] * phi)
        xp = np.hypot(x[0], x[1])
        beta = math.atan2(x[1], x[0])
        ang = np.exp(1j * np.outer(rho, xp * np.cos(alpha - beta))).sum(axis=1)
        ang *= 2.0 * np.pi / n_az
        return complex(np.sum(radial * ang) * 1j / (2.0 * np.pi) ** 2)
    raise ValueError(f"kernel implemented for d in {{2, 3}}, got {d}")


def kernel_k_plus(lam: float, m: int, d: int, x: Sequence[float],
                  tol: float = 1e-8, s0: float = 0.5, s1: float = 0.8,
                  node_budget: int = 6000) -> KernelSample:
    """One sample of the outgoing kernel; exactly 0 for x_d < 0 (Heaviside)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise ValueError(f"x must have {d} components")
    if x[-1] < 0:
        return KernelSample(x, 0.0 + 0.0j, 0.0)
    r = lam ** (1.0 / (2 * m))
    n = max(48, int(4 * r * (abs(x[-1]) + np.linalg.norm(x[:-1]))))
    prev = _kernel_quad(lam, m, d, x, n, s0, s1)
    while True:
        n2 = 2 * n
        cur = _kernel_quad(lam, m, d, x, n2, s0, s1)
        err = abs(cur - prev)
        if err <= tol * max(abs(cur), 1e-12):
            return KernelSample(x, cur, err)
        if n2 > node_budget:
            return KernelSample(x, cur, err, flagged=True)
        n, prev = n2, cur


@dataclass(frozen=True)
class DecayScan:
    lam: float
    m: int
    d: int
    rows: list          # (x, |K|, |K| (1+|x|)^{(d-1)/2}, flagged)
    max_normalized: float
    median_normalized: float


def decay_scan(lam: float, m: int, d: int, radii: Sequence[float],
               directions: Sequence[Sequence[float]],
               tol: float = 1e-6) -> DecayScan:
    """Tabulates |K| (1 + |x|)^{(d-1)/2} along rays; the max of the normalized
    column is the empirical decay constant."""
    rows = []
    for direction in directions:
        u = np.asarray(direction, dtype=float)
        u = u / np.linalg.norm(u)
        for R in radii:
            s = kernel_k_plus(lam, m, d, R * u, tol=tol)
            mag = abs(s.value)
            rows.append((s.x, mag, mag * (1.0 + R) ** ((d - 1) / 2.0),
                         s.flagged))
    if rows:
        norm_col = [row[2] for row in rows]
        mx, med = float(np.max(norm_col)), float(np.median(norm_col))
    else:
        mx = med = 0.0
    return DecayScan(lam, m, d, rows, mx, med)

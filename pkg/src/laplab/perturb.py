"""Perturbations V of the high-order Laplacian: admissibility diagnostics,
the Birman-Schwinger solve (Id + R_0(z) V)^{-1} R_0(z), eigenvalue scans, and
resolvent sweeps for H = (-Delta)^m + V.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh, lgmres

from .lattice import (Field, GridSpec, PHYSICAL, SPECTRAL, forward_transform,
                      inverse_transform)
from .multiplier import free_resolvent, pm_values
from .spaces import (
    CompositeNormConfig,
    LorentzExponents,
    WeightParams,
    lorentz_norm,
    mu_weight_field,
    x_norm_upper,
    xstar_norm,
)

__all__ = [
    "Potential",
    "AdmissibilityConfig",
    "AdmissibilityReport",
    "BsSolve",
    "example_potential",
    "admissibility_check",
    "bs_solve",
    "apply_hamiltonian",
    "direct_eigs",
    "EigenScanResult",
    "eigen_scan",
    "SweepRow",
    "lap_perturbed_sweep",
    "radial_average",
]


@dataclass(frozen=True)
class Potential:
    """Real-valued multiplication perturbation with weak-Lorentz metadata."""

    field: Field
    kind: str = "custom"            # weak_lorentz | bounded_compact | custom
    q: Optional[float] = None
    support_radius: Optional[float] = None

    def __post_init__(self):
        vals = self.field.values
        if not np.all(np.isfinite(vals)):
            raise ValueError("potential values must be finite")
        if np.max(np.abs(vals.imag)) > 0:
            raise ValueError("potential must be real-valued")

    @property
    def grid(self) -> GridSpec:
        return self.field.grid

    def real_values(self) -> np.ndarray:
        return self.field.values.real

    def is_zero(self) -> bool:
        return not np.any(self.real_values())

    def apply(self, u: Field) -> Field:
        return u.with_values(self.real_values() * u.values)

    def weak_norm(self, q: Optional[float] = None) -> float:
        q = q if q is not None else self.q
        if q is None:
            raise ValueError("no weak-Lorentz exponent declared")
        return lorentz_norm(self.field, LorentzExponents(q, math.inf))


def example_potential(q: float, J: int, grid: GridSpec,
                      measure_tol: float = 0.01) -> Potential:
    """The weak-L^q staircase sum_{j<=J} j^{-1/q} 1_{E_j} with disjoint
    concentric shells E_j of grid measure 1/ln(1+j).

    Shells are contiguous runs of lattice nodes ordered by radius, so each
    measure is exact up to one cell; construction fails if the rounding error
    of any shell exceeds ``measure_tol`` relative or the box cannot host the
    total measure.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if J < 1:
        raise ValueError(f"J must be >= 1, got {J}")
    h = grid.cell_volume
    measures = [1.0 / math.log(1 + j) for j in range(1, J + 1)]
    counts = [round(mj / h) for mj in measures]
    for j, (mj, cj) in enumerate(zip(measures, counts), start=1):
        if cj == 0 or abs(cj * h - mj) > measure_tol * mj:
            raise ValueError(
                f"grid too coarse to realize |E_{j}| = {mj:.4f} within "
                f"{measure_tol:.0%} (cell volume {h:.2e})"
            )
    total = sum(counts)
    if total > grid.points_per_axis**grid.dimension:
        raise ValueError("box cannot host the requested shell measures")
    order = np.argsort(grid.radius_grid().ravel(), kind="stable")
    vals = np.zeros(grid.points_per_axis**grid.dimension)
    pos = 0
    for j, cj in enumerate(counts, start=1):
        vals[order[pos:pos + cj]] = j ** (-1.0 / q)
        pos += cj
    radius = float(grid.radius_grid().ravel()[order[pos - 1]])
    if radius > 0.95 * grid.half_width:
        raise ValueError("shells reach the box boundary; enlarge the box")
    f = Field(grid, vals.reshape(grid.shape), PHYSICAL)
    return Potential(f, kind="weak_lorentz", q=q, support_radius=radius)


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibilityConfig:
    norm_cfg: CompositeNormConfig
    N_values: Sequence[float] = (0.0, 1.0)
    gammas: Sequence[float] = (1.0, 0.1, 0.01)
    eps_grid: Sequence[float] = (0.01, 0.03, 0.1, 0.3, 1.0)
    cutoff_radius: Optional[float] = None   # R in the L2 compensator; default L/2
    a_cap: float = 1e4


@dataclass(frozen=True)
class AdmissibilityReport:
    symmetry_defect: float
    factorization_defect: float
    smallness: list        # rows (N, gamma, eps, A, R); eps smallest on the grid
    family_size: int

    @property
    def factorization_ok(self) -> bool:
        return self.factorization_defect <= 1e-10


def admissibility_check(V: Potential, cfg: AdmissibilityConfig,
                        family: Sequence[Field]) -> AdmissibilityReport:
    """Measured admissibility properties over a declared test family.

    (1) symmetry defect of the pairing; (2) for each (N, gamma) the smallest
    grid epsilon making the weighted smallness inequality hold with compensator
    A <= a_cap at radius R; (3) the |V|^{1/2} factorization identity.
    The report makes no universal claim: only the supplied family is tested.
    """
    grid = V.grid
    w = grid.cell_volume
    vals = V.real_values()

    sym = 0.0
    fac = 0.0
    rootV = np.sqrt(np.abs(vals))
    sgn = np.sign(vals)
    for i in range(min(4, len(family))):
        for j in range(min(4, len(family))):
            phi, psi = family[i], family[j]
            a = w * np.sum(vals * phi.values * np.conj(psi.values))
            b = w * np.sum(phi.values * np.conj(vals * psi.values))
            sym = max(sym, abs(a - b))
            # <V f, g> = <B1 f, A1 g>, A1 = |V|^{1/2}, B1 = sgn(V)|V|^{1/2}
            c = w * np.sum((sgn * rootV * phi.values)
                           * np.conj(rootV * psi.values))
            fac = max(fac, abs(a - c))

    R = cfg.cutoff_radius if cfg.cutoff_radius is not None else grid.half_width / 2
    ball = grid.radius_grid() <= R
    rows = []
    for N in cfg.N_values:
        for gamma in cfg.gammas:
            mu = mu_weight_field(grid, WeightParams(N, gamma))
            needed_A = {eps: 0.0 for eps in cfg.eps_grid}
            for u in family:
                Vu = u.with_values(vals * u.values)
                lhs = x_norm_upper(Vu.with_values(mu * Vu.values), cfg.norm_cfg)
                rhs1 = xstar_norm(u.with_values(mu * u.values), cfg.norm_cfg)
                rhs2 = float(np.sqrt(w * np.sum(np.abs(u.values[ball]) ** 2)))
                for eps in cfg.eps_grid:
                    deficit = lhs - eps * rhs1
                    if deficit > 0:
                        if rhs2 <= 0:
                            needed_A[eps] = math.inf
                        else:
                            needed_A[eps] = max(needed_A[eps], deficit / rhs2)
            chosen = None
            for eps in sorted(cfg.eps_grid):
                if needed_A[eps] <= cfg.a_cap:
                    chosen = (N, gamma, eps, needed_A[eps], R)
                    break
            if chosen is None:
                chosen = (N, gamma, math.inf, math.inf, R)
            rows.append(chosen)
    return AdmissibilityReport(sym, fac, rows, len(family))


# ---------------------------------------------------------------------------
# Birman-Schwinger solve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BsSolve:
    z: complex
    u: Field
    residual: float          # relative residual of (Id + R_0 V) u = R_0 f
    pde_residual: float      # relative residual of (P_m(D) + V - z) u = f
    iterations: int
    converged: bool
    near_singular: bool = False


def bs_solve(z: complex, m: int, V: Potential, f: Field, tol: float = 1e-10,
             maxiter: int = 400) -> BsSolve:
    """Solve (Id + R_0(z) V) u = R_0(z) f; the perturbed resolvent applied to f.

    The only operator primitive is application of R_0(z) V to a field; the
    linear system is solved by preconditioned GMRES-type iteration (lgmres).
    """
    grid = f.grid
    rhs_field = free_resolvent(z, m, f)
    if V.is_zero():
        return BsSolve(z, rhs_field, 0.0, _pde_residual(z, m, V, rhs_field, f),
                       0, True)
    vvals = V.real_values()
    shape = grid.shape

    def matvec(w):
        u = Field(grid, w.reshape(shape), PHYSICAL)
        out = free_resolvent(z, m, u.with_values(vvals * u.values))
        return w + out.values.ravel()

    n_tot = int(np.prod(shape))
    op = LinearOperator((n_tot, n_tot), matvec=matvec, dtype=np.complex128)
    rhs = rhs_field.values.ravel()
    counter = {"n": 0}

    def cb(_):
        counter["n"] += 1

    sol, info = lgmres(op, rhs, rtol=tol, atol=0.0, maxiter=maxiter,
                       callback=cb)
    u = Field(grid, sol.reshape(shape), PHYSICAL)
    resid = float(np.linalg.norm(matvec(sol) - rhs)
                  / max(np.linalg.norm(rhs), 1e-300))
    converged = info == 0 and resid <= max(tol * 10, 1e-12)
    return BsSolve(z, u, resid, _pde_residual(z, m, V, u, f),
                   counter["n"], converged, near_singular=info != 0)


def _pde_residual(z, m, V, u, f) -> float:
    grid = f.grid
    U = forward_transform(u)
    pm = pm_values(grid, m)
    pmu = inverse_transform(U.with_values(pm * U.values))
    lhs = pmu.values + V.real_values() * u.values - z * u.values
    return float(np.linalg.norm(lhs - f.values)
                 / max(np.linalg.norm(f.values), 1e-300))


def apply_hamiltonian(m: int, V: Potential, u: Field) -> Field:
    U = forward_transform(u)
    pm = pm_values(u.grid, m)
    out = inverse_transform(U.with_values(pm * U.values))
    return u.with_values(out.values + V.real_values() * u.values)


def direct_eigs(m: int, V: Potential, k: int = 4) -> np.ndarray:
    """Lowest eigenvalues of the discrete H = P_m(D) + V (Lanczos on the real
    subspace; the operator commutes with conjugation for real V)."""
    grid = V.grid
    shape = grid.shape
    pm = pm_values(grid, m)
    vvals = V.real_values()

    def matvec(w):
        u = w.reshape(shape)
        out = np.fft.fftn(np.fft.ifftshift(
            pm * np.fft.fftshift(np.fft.ifftn(u))))
        return (out.real + vvals * u).ravel()

    n_tot = int(np.prod(shape))
    op = LinearOperator((n_tot, n_tot), matvec=matvec, dtype=np.float64)
    vals = eigsh(op, k=k, which="SA", return_eigenvectors=False, tol=1e-9)
    return np.sort(vals)


# ---------------------------------------------------------------------------
# eigenvalue scan via the Birman-Schwinger determinant surrogate
# ---------------------------------------------------------------------------

class _BirmanSchwingerScanner:
    """Smallest singular value of Id + R_0(z) V restricted to the support
    of V.

    u + R_0(z) V u = 0 with u != 0 forces w = V u != 0 and
    w + V R_0(z) w = 0 on supp V, and conversely; on the lattice the
    restriction is exact, so dips of the restricted operator locate the
    discrete eigenvalues without any basis truncation error.  Per z this
    costs one FFT (the resolvent kernel on all offsets) plus a small SVD.
    """

    def __init__(self, V: Potential, m: int, max_nodes: int = 1500):
        grid = V.grid
        vals = V.real_values()
        idx = np.flatnonzero(np.abs(vals.ravel()) > 0)
        self.truncated = len(idx) > max_nodes
        if self.truncated:
            # keep the strongest nodes; deterministic tie-break by index
            mag = np.abs(vals.ravel()[idx])
            order = np.lexsort((idx, -mag))
            idx = np.sort(idx[order[:max_nodes]])
        self.grid, self.m = grid, m
        self.idx = idx
        self.v_at = vals.ravel()[idx]
        n, d = grid.points_per_axis, grid.dimension
        coords = np.stack(np.unravel_index(idx, grid.shape), axis=1)
        self.offsets = tuple(
            ((coords[:, None, ax] - coords[None, :, ax]) + n // 2) % n
            for ax in range(d)
        )
        self.pm = np.broadcast_to(pm_values(grid, m), grid.shape)

    def matrix(self, z: complex) -> np.ndarray:
        grid = self.grid
        mult = Field(grid, 1.0 / (self.pm - z), SPECTRAL)
        kernel = inverse_transform(mult).values * grid.cell_volume
        G = kernel[self.offsets]
        return np.eye(len(self.idx)) + self.v_at[None, :] * G

    def sigma_min(self, z: complex) -> float:
        return float(np.linalg.svd(self.matrix(z), compute_uv=False)[-1])


@dataclass(frozen=True)
class EigenScanResult:
    lambdas: np.ndarray
    sigma_min: np.ndarray
    candidates: list               # (lambda, dip depth relative to median)
    eps_probe: float
    sign: int
    support_nodes: int
    warning: Optional[str] = None


def eigen_scan(V: Potential, m: int, interval: tuple[float, float],
               eps_probe: float = 1e-3, steps: int = 120,
               max_support_nodes: int = 1500, sign: int = +1,
               dip_threshold: float = 0.5) -> EigenScanResult:
    """Scan lambda in [a, b] for near-singularity of Id + R_0(lambda + i
    sign eps) V restricted to the support of V.

    Local minima of the smallest singular value below ``dip_threshold`` times
    the scan median are eigenvalue candidates.  The scan reports positive-axis
    dips without classifying them.
    """
    a, b = interval
    if a >= b:
        raise ValueError("interval must satisfy a < b")
    if a <= 0 <= b:
        raise ValueError("interval must avoid 0")
    lam = np.linspace(a, b, steps)
    if V.is_zero():
        return EigenScanResult(lam, np.ones(steps), [], eps_probe, sign, 0)
    scanner = _BirmanSchwingerScanner(V, m, max_support_nodes)
    sig = np.array([scanner.sigma_min(l + 1j * sign * eps_probe) for l in lam])
    med = float(np.median(sig))
    candidates = []
    for i in range(1, steps - 1):
        if sig[i] <= sig[i - 1] and sig[i] <= sig[i + 1] \
                and sig[i] < dip_threshold * med:
            candidates.append((float(lam[i]), float(sig[i] / med)))
    warning = None
    if scanner.truncated:
        warning = (
            f"support truncated to {len(scanner.idx)} strongest nodes; "
            "dips may be unresolved"
        )
    return EigenScanResult(lam, sig, candidates, eps_probe, sign,
                           len(scanner.idx), warning)


# ---------------------------------------------------------------------------
# perturbed LAP sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    lam: float
    eps: float
    proxy: float
    worst_label: str
    residual: float
    ok: bool


def lap_perturbed_sweep(V: Potential, m: int, lambdas: Sequence[float],
                        epsilons: Sequence[float],
                        family: Sequence[tuple[str, Field]],
                        norm_cfg: CompositeNormConfig,
                        sign: int = +1,
                        solver_tol: float = 1e-10) -> dict:
    """Proxy for sup ||R^m(lambda + i sign eps)||_{X -> X*}.

    For each cell, maximizes xstar_norm(R^m f) / x_norm_upper(f) over the test
    family.  The proxy lower-bounds the operator norm; uniformity is reported
    as the drift of the epsilon-wise sup over the last decade of epsilon.
    """
    rows: list[SweepRow] = []
    denom = [(label, f, x_norm_upper(f, norm_cfg)) for label, f in family]
    for lam in lambdas:
        for eps in epsilons:
            z = lam + 1j * sign * eps
            best, best_label, worst_res, ok = 0.0, "", 0.0, True
            for label, f, xb in denom:
                sol = bs_solve(z, m, V, f, tol=solver_tol)
                worst_res = max(worst_res, sol.residual)
                if not sol.converged:
                    ok = False
                    continue
                ratio = xstar_norm(sol.u, norm_cfg) / xb
                if ratio > best:
                    best, best_label = ratio, label
            rows.append(SweepRow(lam, eps, best, best_label, worst_res, ok))
    sup_by_eps = {}
    for row in rows:
        if row.ok:
            sup_by_eps[row.eps] = max(sup_by_eps.get(row.eps, 0.0), row.proxy)
    drift = _last_decade_drift(sup_by_eps)
    return {
        "rows": rows,
        "sup_by_eps": sup_by_eps,
        "sup": max(sup_by_eps.values()) if sup_by_eps else math.nan,
        "last_decade_drift": drift,
        "holes": sum(1 for row in rows if not row.ok),
    }


def _last_decade_drift(sup_by_eps: dict) -> float:
    if not sup_by_eps:
        return math.nan
    eps = sorted(sup_by_eps)
    lo = eps[0]
    decade = [e for e in eps if e <= 10.0 * lo]
    vals = [sup_by_eps[e] for e in decade]
    if min(vals) <= 0:
        return math.nan
    return max(vals) / min(vals)


def radial_average(u: Field, R: float) -> float:
    """(1/R) integral_{|x| <= R} |u|^2: the Rellich-condition functional."""
    mask = u.grid.radius_grid() <= R
    return float(u.grid.cell_volume * np.sum(np.abs(u.values[mask]) ** 2) / R)

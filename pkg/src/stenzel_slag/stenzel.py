"""Calabi-Yau data on M: Kahler potential f(N), Liouville form, Kahler form
and holomorphic volume form.

The potential is encoded through ``h = f'(N)``.  Two ODE variants are
available:

``"ricci_flat"`` (default)
    ``(2N - 1) N^(n-1) h^(2n) + 2 (N - 1) N^n h^(2n-1) h' = 1``, ``h(1) = 1``.
    This is the equation for which ``det dd-bar f(N) = |B|^(-2(n+1))`` holds in
    affine coordinates.

``"legacy"``
    ``2N N^(n-1) h^(2n) + 2 (N - 1) N^n h^(2n) h' = 1``, ``h(1) = 2^(-1/(2n))``.
    Kept for comparison only; its determinant ratio is not constant.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.interpolate import BPoly, CubicHermiteSpline
from scipy.linalg import expm

from .errors import FrameSizeMismatch, NonPositive, OutOfTable, StepTooLarge
from .projective import (
    ProjectivePair,
    TangentRep,
    chart_B,
    chart_tangent,
    choose_chart,
    eval_A,
    eval_B,
    from_inhomogeneous,
    push_tangent_to_chart,
    to_inhomogeneous,
)

VARIANTS = ("ricci_flat", "legacy")

# ---------------------------------------------------------------------------
# potential ODE
# ---------------------------------------------------------------------------


def _lhs_coeffs(n: int, variant: str):
    """Return callables giving (c0(N), c1(N)) such that the ODE reads
    ``c0 h^(2n) + c1 h^k h' = 1`` with k = 2n-1 (ricci_flat) or 2n (legacy)."""
    if variant == "ricci_flat":
        return (lambda N: (2 * N - 1) * N ** (n - 1)), (lambda N: 2 * (N - 1) * N**n), 2 * n - 1
    if variant == "legacy":
        return (lambda N: 2 * N * N ** (n - 1)), (lambda N: 2 * (N - 1) * N**n), 2 * n
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def ode_residual(N, h, hp, n: int, variant: str = "ricci_flat"):
    """Pointwise residual of the potential ODE."""
    c0, c1, k = _lhs_coeffs(n, variant)
    N = np.asarray(N, dtype=float)
    h = np.asarray(h, dtype=float)
    return c0(N) * h ** (2 * n) + c1(N) * h**k * np.asarray(hp, dtype=float) - 1.0


def seed_value(n: int, variant: str = "ricci_flat") -> float:
    """Value of h at N = 1 forced by regularity of h'."""
    return 1.0 if variant == "ricci_flat" else 2.0 ** (-1.0 / (2 * n))


def series_coefficients(n: int, variant: str = "ricci_flat", order: int = 40) -> np.ndarray:
    """Taylor coefficients of the regular solution in ``u = N - 1``.

    N = 1 is a regular singular point; the coefficient of ``u^k`` in the
    residual is affine in ``a_k`` with nonzero slope, so the series is
    determined order by order.
    """
    c0_fn, c1_fn, k_pow = _lhs_coeffs(n, variant)
    # c0, c1 are polynomials in N = 1 + u
    one_plus_u = np.array([1.0, 1.0])
    if variant == "ricci_flat":
        c0 = P.polymul(np.array([1.0, 2.0]), P.polypow(one_plus_u, n - 1))
        c1 = 2 * P.polymul(np.array([0.0, 1.0]), P.polypow(one_plus_u, n))
    else:
        c0 = 2 * P.polypow(one_plus_u, n)
        c1 = 2 * P.polymul(np.array([0.0, 1.0]), P.polypow(one_plus_u, n))

    def trunc(c):
        out = np.zeros(order + 1)
        m = min(len(c), order + 1)
        out[:m] = c[:m]
        return out

    def mul(a, b):
        return trunc(P.polymul(a, b))

    def power(a, e):
        out = np.zeros(order + 1)
        out[0] = 1.0
        for _ in range(e):
            out = mul(out, a)
        return out

    def residual(a):
        hp = trunc(P.polyder(a)) if len(a) > 1 else np.zeros(order + 1)
        return trunc(P.polyadd(mul(c0, power(a, 2 * n)), mul(mul(c1, power(a, k_pow)), hp))) - trunc(
            np.array([1.0])
        )

    a = np.zeros(order + 1)
    a[0] = seed_value(n, variant)
    for k in range(1, order + 1):
        a[k] = 0.0
        r0 = residual(a)[k]
        a[k] = 1.0
        r1 = residual(a)[k]
        a[k] = -r0 / (r1 - r0)
    return a


def _series_radius(coeffs: np.ndarray, cap: float = 0.25) -> float:
    """Largest u <= cap whose last few series terms are below 1e-17."""
    k = np.arange(coeffs.size)
    tail = slice(-4, None)
    for u in np.linspace(cap, 0.0, 26)[:-1]:
        if np.max(np.abs(coeffs[tail]) * u ** k[tail]) < 1e-17:
            return float(u)
    return 0.0


def ode_rhs(N: float, h: float, n: int, variant: str = "ricci_flat", series=None) -> float:
    """``h'`` from the rearranged ODE; uses the series slope exactly at N = 1."""
    c0, c1, k = _lhs_coeffs(n, variant)
    if N == 1.0:
        if series is None:
            series = series_coefficients(n, variant, order=3)
        return float(series[1])
    return (1.0 - c0(N) * h ** (2 * n)) / (c1(N) * h**k)


def fd_derivative(y: np.ndarray, dx: float) -> np.ndarray:
    """Fourth-order finite-difference derivative on a uniform grid."""
    y = np.asarray(y, dtype=float)
    m = y.size
    if m < 5:
        raise StepTooLarge(f"grid has only {m} points; need at least 5 for the residual audit")
    d = np.empty(m)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * dx)
    fwd = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12 * dx)
    mid = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12 * dx)
    d[0] = fwd @ y[:5]
    d[1] = mid @ y[:5]
    d[-1] = -(fwd @ y[-1:-6:-1])
    d[-2] = -(mid @ y[-1:-6:-1])
    return d


@dataclass(frozen=True)
class PotentialTable:
    """Tabulated ``h = f'(N)`` and ``h' = f''(N)`` on a uniform grid."""

    n: int
    grid: np.ndarray
    h: np.ndarray
    hprime: np.ndarray
    variant: str = "ricci_flat"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def n_max(self) -> float:
        return float(self.grid[-1])

    def _interp(self):
        if "h" not in self._cache:
            dx = np.diff(self.grid)
            # Hermite-corrected trapezoid: exact for cubic h, f(1) = 0
            inc = dx * (self.h[:-1] + self.h[1:]) / 2 + dx**2 * (self.hprime[:-1] - self.hprime[1:]) / 12
            f = np.concatenate([[0.0], np.cumsum(inc)])
            self._cache["f_nodes"] = f
            self._cache["h"] = CubicHermiteSpline(self.grid, self.h, self.hprime)
            self._cache["f"] = BPoly.from_derivatives(self.grid, np.column_stack([f, self.h, self.hprime]))
        return self._cache

    def _check(self, N):
        N = np.asarray(N, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        if np.any(N < lo - 1e-9) or np.any(N > hi):
            raise OutOfTable(f"N outside tabulated range [{lo}, {hi}]")
        return np.clip(N, lo, hi)

    def fprime(self, N):
        return self._interp()["h"](self._check(N))

    def fsecond(self, N):
        return self._interp()["h"](self._check(N), 1)

    def f(self, N):
        return self._interp()["f"](self._check(N))

    def residuals(self) -> np.ndarray:
        """ODE residual using an independent 4th-order FD derivative of h."""
        return ode_residual(self.grid, self.h, fd_derivative(self.h, self.step), self.n, self.variant)

    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals())))

    def perturbed(self, factor: float) -> "PotentialTable":
        """Copy with h and h' scaled (a non-solution, for negative controls)."""
        return PotentialTable(self.n, self.grid, self.h * factor, self.hprime * factor, self.variant)

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["N", "h", "hprime"])
        for row in zip(self.grid, self.h, self.hprime):
            writer.writerow([repr(float(x)) for x in row])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            self.write_csv(fh)

    @classmethod
    def from_csv(cls, path, n: int, variant: str = "ricci_flat") -> "PotentialTable":
        data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        return cls(n, data[:, 0], data[:, 1], data[:, 2], variant)


def solve_potential(
    n: int,
    n_max: float,
    step: float,
    variant: str = "ricci_flat",
    tol: float = 1e-9,
    audit: bool = True,
    series_radius: float | None = None,
) -> PotentialTable:
    """Tabulate the regular solution of the potential ODE on ``[1, n_max]``.

    Grid points with ``N - 1 <= series_radius`` come from the Taylor series
    at the regular singular point; the rest by fixed-step RK4.  The default
    radius is the largest (up to 0.25) at which the truncated series has
    converged to rounding; RK4 alone is stiff there since ``dh'/dh ~ -n/(N-1)``.
    With ``audit`` the table must pass ``max |residual| < tol``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not n_max > 1:
        raise ValueError("n_max must exceed 1")
    if not step > 0:
        raise ValueError("step must be positive")
    _lhs_coeffs(n, variant)
    count = max(int(math.ceil((n_max - 1.0) / step - 1e-9)), 1)
    grid = np.linspace(1.0, n_max, count + 1)
    dx = grid[1] - grid[0]
    series = series_coefficients(n, variant)
    if series_radius is None:
        series_radius = _series_radius(series)
    h = np.empty_like(grid)
    u = grid - 1.0
    in_series = u <= series_radius
    h[in_series] = P.polyval(u[in_series], series)
    start = int(np.count_nonzero(in_series)) - 1

    def rhs(N, y):
        return ode_rhs(N, y, n, variant, series)

    for i in range(start, count):
        N0, y = grid[i], h[i]
        k1 = rhs(N0, y)
        k2 = rhs(N0 + dx / 2, y + dx * k1 / 2)
        k3 = rhs(N0 + dx / 2, y + dx * k2 / 2)
        k4 = rhs(N0 + dx, y + dx * k3)
        h[i + 1] = y + dx * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        if not np.isfinite(h[i + 1]) or h[i + 1] <= 0:
            raise NonPositive(f"h left the positive range at N = {grid[i + 1]:.6g}")
    hp = np.array([ode_rhs(N, y, n, variant, series) for N, y in zip(grid, h)])
    hp[in_series] = P.polyval(u[in_series], P.polyder(series))
    table = PotentialTable(n, grid, h, hp, variant)
    if audit:
        res = table.max_residual()
        if not res < tol:
            raise StepTooLarge(f"max ODE residual {res:.3e} exceeds {tol:.1e}; reduce step")
    return table


# ---------------------------------------------------------------------------
# Liouville form, Kahler form
# ---------------------------------------------------------------------------


def _h_at(N: float, table: PotentialTable | None) -> float:
    return 1.0 if table is None else float(table.fprime(N))


def dbar_N(v: TangentRep) -> complex:
    """``(dbar N)(v)`` at the base point of ``v``."""
    p = v.base
    z, w = p.z, p.w
    b = eval_B(p)
    nz2 = float(np.vdot(z, z).real)
    nw2 = float(np.vdot(w, w).real)
    b2 = abs(b) ** 2
    N = nz2 * nw2 / b2
    cz = z * nw2 / b2 - N * w.conj() / b.conjugate()
    cw = nz2 * w / b2 - N * z.conj() / b.conjugate()
    return complex(cz @ v.dz.conj() + cw @ v.dw.conj())


def liouville(v: TangentRep, table: PotentialTable | None = None) -> float:
    """Liouville 1-form ``Im(dbar f(N))`` evaluated on ``v``.

    With ``table=None`` the factor ``f'(N)`` is replaced by 1 (unit-scalar
    mode); zero sets are unchanged because ``f' > 0``.
    """
    N = eval_A(v.base) / abs(eval_B(v.base)) ** 2
    return _h_at(N, table) * dbar_N(v).imag


def induced_of(X) -> np.ndarray:
    return np.asarray(getattr(X, "induced", X), dtype=complex)


def fundamental_field(X, p: ProjectivePair) -> TangentRep:
    """``X*`` at ``p``: ``(X z; conj(X) w)`` for the induced operator X."""
    M = induced_of(X)
    return TangentRep(p, M @ p.z, M.conj() @ p.w)


def _flow(M: np.ndarray, t: float, p: ProjectivePair) -> ProjectivePair:
    return p.act(expm(t * M))


def kahler_two_form(X, Y, p: ProjectivePair, table: PotentialTable | None = None, step: float = 1e-5) -> float:
    """``omega(X*, Y*)`` with ``omega = -d alpha`` on fundamental fields.

    Uses ``d alpha(X*, Y*) = X*(alpha(Y*)) - Y*(alpha(X*)) - alpha([X*, Y*])``
    with ``[X*, Y*] = -[X, Y]*``; the directional derivatives are central
    differences along the one-parameter flows.
    """
    MX, MY = induced_of(X), induced_of(Y)

    def alpha_field(M, q):
        return liouville(fundamental_field(M, q), table)

    def along(Mflow, Mfield):
        plus = alpha_field(Mfield, _flow(Mflow, step, p))
        minus = alpha_field(Mfield, _flow(Mflow, -step, p))
        return (plus - minus) / (2 * step)

    bracket = MX @ MY - MY @ MX
    d_alpha = along(MX, MY) - along(MY, MX) + alpha_field(bracket, p)
    return -d_alpha


def kahler_matrix(elements, p: ProjectivePair, table: PotentialTable | None = None, step: float = 1e-5) -> np.ndarray:
    """Matrix ``omega(X_i*, X_j*)`` for a list of k elements.

    Same formula as :func:`kahler_two_form`, with each flow computed once.
    """
    mats = [induced_of(X) for X in elements]
    k = len(mats)
    flows = [(_flow(M, step, p), _flow(M, -step, p)) for M in mats]
    # D[i, j] = derivative of alpha(X_j*) along X_i*
    D = np.empty((k, k))
    for i, (plus, minus) in enumerate(flows):
        for j, M in enumerate(mats):
            D[i, j] = (liouville(fundamental_field(M, plus), table) - liouville(fundamental_field(M, minus), table)) / (
                2 * step
            )
    W = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            bracket = mats[i] @ mats[j] - mats[j] @ mats[i]
            d_alpha = D[i, j] - D[j, i] + liouville(fundamental_field(bracket, p), table)
            W[i, j] = -d_alpha
            W[j, i] = d_alpha
    return W


def omega_tangent(
    u: TangentRep,
    v: TangentRep,
    table: PotentialTable | None = None,
    chart: int | None = None,
    step: float = 1e-5,
) -> float:
    """``omega(u, v)`` from a two-direction finite-difference stencil of alpha.

    ``u`` and ``v`` are extended as constant vector fields in an affine
    chart, so their bracket vanishes and ``d alpha(u, v) = u(alpha(v)) -
    v(alpha(u))``.
    """
    p = u.base
    c = choose_chart(p, chart)
    x_z, x_w = to_inhomogeneous(p, c)
    U = push_tangent_to_chart(u, c)
    V = push_tangent_to_chart(v, c)

    def alpha_const(field, dz_shift, dw_shift, t):
        q = from_inhomogeneous(x_z + t * dz_shift, x_w + t * dw_shift, c)
        return liouville(chart_tangent(q, field[0], field[1], c), table)

    def deriv(direction, field):
        return (alpha_const(field, *direction, step) - alpha_const(field, *direction, -step)) / (2 * step)

    return -(deriv(U, V) - deriv(V, U))


# ---------------------------------------------------------------------------
# holomorphic volume form
# ---------------------------------------------------------------------------


def frame_matrix(frame: Sequence[TangentRep], chart: int) -> np.ndarray:
    rows = []
    for v in frame:
        dzt, dwt = push_tangent_to_chart(v, chart)
        rows.append(np.concatenate([dzt, dwt]))
    return np.array(rows)


def holomorphic_volume(frame: Sequence[TangentRep], chart: int | None = None) -> complex:
    """``B^-(n+1) dzt_1 ^ ... ^ dzt_n ^ dwt_1 ^ ... ^ dwt_n`` on 2n vectors.

    ``B`` is the pairing of the chart-normalised representative, which makes
    the value independent of the chart and of homogeneous rescaling.
    """
    frame = list(frame)
    if not frame:
        raise FrameSizeMismatch("empty frame")
    p = frame[0].base
    n = p.dim
    if len(frame) != 2 * n:
        raise FrameSizeMismatch(f"need {2 * n} vectors, got {len(frame)}")
    for v in frame[1:]:
        if v.base is not p and not (np.array_equal(v.base.z, p.z) and np.array_equal(v.base.w, p.w)):
            raise FrameSizeMismatch("frame vectors have different base points")
    c = choose_chart(p, chart)
    det = np.linalg.det(frame_matrix(frame, c))
    return complex(det / chart_B(p, c) ** (n + 1))


# ---------------------------------------------------------------------------
# Calabi-Yau determinant identity
# ---------------------------------------------------------------------------


def _batch_N(zt: np.ndarray, wt: np.ndarray) -> np.ndarray:
    """N for many affine points (rows)."""
    a = (1 + np.sum(np.abs(zt) ** 2, axis=1)) * (1 + np.sum(np.abs(wt) ** 2, axis=1))
    b = 1 + np.sum(zt * wt, axis=1)
    return a / np.abs(b) ** 2


def complex_hessian_fd(F: Callable[[np.ndarray], np.ndarray], x0: np.ndarray, step: float) -> np.ndarray:
    """``d_a dbar_b F`` at ``x0`` from second central differences.

    ``F`` maps an array of complex points (rows) to real values.
    """
    m = x0.size
    r = 2 * m
    basis = np.concatenate([np.eye(m), 1j * np.eye(m)]).astype(complex)
    pts = [x0]
    index = {}
    for a in range(r):
        for sa in (1, -1):
            index[(a, sa)] = len(pts)
            pts.append(x0 + sa * step * basis[a])
    for a in range(r):
        for b in range(a + 1, r):
            for sa in (1, -1):
                for sb in (1, -1):
                    index[(a, sa, b, sb)] = len(pts)
                    pts.append(x0 + step * (sa * basis[a] + sb * basis[b]))
    vals = F(np.array(pts))
    f0 = vals[0]
    Hr = np.empty((r, r))
    for a in range(r):
        Hr[a, a] = (vals[index[(a, 1)]] - 2 * f0 + vals[index[(a, -1)]]) / step**2
        for b in range(a + 1, r):
            Hr[a, b] = Hr[b, a] = (
                vals[index[(a, 1, b, 1)]]
                - vals[index[(a, 1, b, -1)]]
                - vals[index[(a, -1, b, 1)]]
                + vals[index[(a, -1, b, -1)]]
            ) / (4 * step**2)
    uu, vv, uv, vu = Hr[:m, :m], Hr[m:, m:], Hr[:m, m:], Hr[m:, :m]
    return 0.25 * (uu + vv + 1j * (uv - vu))


def potential_hessian(p: ProjectivePair, table: PotentialTable, chart: int | None = None, step: float = 2e-3):
    """Complex Hessian of ``f(N)`` in the affine chart.

    Second central differences at ``step`` and ``step / 2`` combined by one
    Richardson extrapolation (affine-chart metrics are ill-conditioned, so
    small steps lose to rounding).
    """
    c = choose_chart(p, chart)
    zt, wt = to_inhomogeneous(p, c)
    n = zt.size
    x0 = np.concatenate([zt, wt])

    def F(X):
        return table.f(_batch_N(X[:, :n], X[:, n:]))

    coarse = complex_hessian_fd(F, x0, step)
    fine = complex_hessian_fd(F, x0, step / 2)
    return (4 * fine - coarse) / 3, chart_B(p, c)


def cy_ratio(p: ProjectivePair, table: PotentialTable, chart: int | None = None, step: float = 2e-3) -> float:
    """``det dd-bar f(N) * |B|^(2(n+1))``; equal to 1 when the identity holds."""
    H, b = potential_hessian(p, table, chart, step)
    n = p.dim
    return float(np.linalg.det(H).real * abs(b) ** (2 * (n + 1)))


def check_cy_condition(p: ProjectivePair, table: PotentialTable, chart: int | None = None, step: float = 2e-3) -> float:
    """Relative residual ``|det - |B|^(-2(n+1))| / |B|^(-2(n+1))``."""
    if table.n != p.dim:
        raise ValueError(f"table is for n = {table.n}, point has n = {p.dim}")
    return abs(cy_ratio(p, table, chart, step) - 1.0)

"""Homogeneous coordinates on CP^n x CP^n and the embedding of T CP^n.

A point of M is stored as a pair of homogeneous vectors ``(z; w)`` with
``B(z, w) = sum_j z_j w_j != 0``.  Tangent vectors are stored as velocity
vectors ``(dz, dw)`` of homogeneous representatives; directions of the form
``(lam * z, nu * w)`` are pure gauge and project to zero on CP^n x CP^n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartSingular, DegeneratePoint, DimensionMismatch, NotInBundle

#: relative threshold for |B| and chart pivots
EPS = 1e-12

#: below this, sinh(mu)/mu is evaluated from its Taylor series
_SINHC_SERIES = 1e-4


def as_cvector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


@dataclass(frozen=True)
class ProjectivePair:
    """A point ``(z; w)`` of M inside CP^n x CP^n."""

    z: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        z = as_cvector(self.z)
        w = as_cvector(self.w)
        if z.shape != w.shape:
            raise DimensionMismatch(f"z has length {z.size}, w has length {w.size}")
        if not np.any(z) or not np.any(w):
            raise DegeneratePoint("zero homogeneous vector")
        z.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)

    @property
    def dim(self) -> int:
        """Complex dimension n of each CP^n factor."""
        return self.z.size - 1

    def rescaled(self, lam: complex, nu: complex) -> "ProjectivePair":
        return ProjectivePair(lam * self.z, nu * self.w)

    def act(self, g: np.ndarray) -> "ProjectivePair":
        """Image under ``(z; w) -> (g z; conj(g) w)``."""
        return ProjectivePair(g @ self.z, g.conj() @ self.w)


@dataclass(frozen=True)
class TangentRep:
    """Tangent vector at ``base`` given by homogeneous velocities."""

    base: ProjectivePair
    dz: np.ndarray
    dw: np.ndarray

    def __post_init__(self):
        dz = as_cvector(self.dz)
        dw = as_cvector(self.dw)
        if dz.shape != self.base.z.shape or dw.shape != self.base.w.shape:
            raise DimensionMismatch("tangent components do not match base dimension")
        object.__setattr__(self, "dz", dz)
        object.__setattr__(self, "dw", dw)

    def __add__(self, other: "TangentRep") -> "TangentRep":
        return TangentRep(self.base, self.dz + other.dz, self.dw + other.dw)

    def scale(self, c: complex) -> "TangentRep":
        """Multiply by a scalar acting holomorphically on both factors."""
        return TangentRep(self.base, c * self.dz, c * self.dw)

    def real_scale(self, a: float) -> "TangentRep":
        return TangentRep(self.base, a * self.dz, a * self.dw)

    def push(self, g: np.ndarray) -> "TangentRep":
        """Differential of ``(z; w) -> (g z; conj(g) w)`` applied to this vector."""
        return TangentRep(self.base.act(g), g @ self.dz, g.conj() @ self.dw)


def _norms(p: ProjectivePair) -> tuple[float, float]:
    return float(np.linalg.norm(p.z)), float(np.linalg.norm(p.w))


def eval_A(p: ProjectivePair) -> float:
    """``A = sum_{j,k} |z_j w_k|^2 = |z|^2 |w|^2``."""
    nz, nw = _norms(p)
    return (nz * nw) ** 2


def eval_B(p: ProjectivePair, check: bool = True) -> complex:
    """Complex bilinear pairing ``sum_j z_j w_j``.

    Raises DegeneratePoint when ``|B| < EPS * |z| |w|`` unless ``check`` is
    false.
    """
    b = complex(p.z @ p.w)
    if check:
        nz, nw = _norms(p)
        if abs(b) < EPS * nz * nw:
            raise DegeneratePoint(f"|B| = {abs(b):.3e} is below threshold; point is off M")
    return b


def eval_N(p: ProjectivePair) -> float:
    """``N = A / |B|^2``, which is >= 1 with equality on the zero section."""
    b = eval_B(p)
    return eval_A(p) / abs(b) ** 2


def sinhc(mu: float) -> float:
    """``sinh(mu)/mu`` with the removable singularity filled in."""
    if abs(mu) < _SINHC_SERIES:
        m2 = mu * mu
        return 1.0 + m2 / 6.0 + m2 * m2 / 120.0
    return float(np.sinh(mu) / mu)


def phi_hat(zeta, xi, tol: float = 1e-10) -> ProjectivePair:
    """Embed ``(zeta, xi)`` with ``xi . conj(zeta) = 0`` into CP^n x CP^n.

    Returns ``(cosh(mu) zeta + i sinhc(mu) xi ; cosh(mu) conj(zeta) + i
    sinhc(mu) conj(xi))`` with ``mu = |xi| / |zeta|``.
    """
    zeta = as_cvector(zeta)
    xi = as_cvector(xi)
    if zeta.shape != xi.shape:
        raise DimensionMismatch("zeta and xi differ in length")
    nzeta = np.linalg.norm(zeta)
    if nzeta == 0:
        raise NotInBundle("zeta must be nonzero")
    nxi = np.linalg.norm(xi)
    if abs(xi @ zeta.conj()) > tol * nzeta * max(nxi, 1.0):
        raise NotInBundle(f"xi . conj(zeta) = {xi @ zeta.conj():.3e}")
    mu = nxi / nzeta
    c = np.cosh(mu)
    s = sinhc(mu)
    return ProjectivePair(c * zeta + 1j * s * xi, c * zeta.conj() + 1j * s * xi.conj())


def zero_section(z) -> ProjectivePair:
    """The point ``(z; conj(z))`` on the image of the zero section."""
    z = as_cvector(z)
    return ProjectivePair(z, z.conj())


def _check_chart(p: ProjectivePair, chart: int) -> None:
    n1 = p.z.size
    if not 0 <= chart < n1:
        raise ChartSingular(f"chart index {chart} out of range for length {n1}")
    nz, nw = _norms(p)
    if abs(p.z[chart]) < EPS * nz or abs(p.w[chart]) < EPS * nw:
        raise ChartSingular(f"pivot coordinate {chart} vanishes")


def choose_chart(p: ProjectivePair, chart: int | None = None) -> int:
    """Return ``chart`` if valid; ``None`` means chart 0 with automatic fallback.

    The fallback picks the index maximising ``min(|z_j|/|z|, |w_j|/|w|)``.
    """
    if chart is not None:
        _check_chart(p, chart)
        return chart
    try:
        _check_chart(p, 0)
        return 0
    except ChartSingular:
        nz, nw = _norms(p)
        score = np.minimum(np.abs(p.z) / nz, np.abs(p.w) / nw)
        best = int(np.argmax(score))
        _check_chart(p, best)
        return best


def _drop(v: np.ndarray, chart: int) -> np.ndarray:
    return np.delete(v, chart)


def to_inhomogeneous(p: ProjectivePair, chart: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Affine coordinates ``(z_i / z_c, w_i / w_c)`` for ``i != c``."""
    _check_chart(p, chart)
    return _drop(p.z / p.z[chart], chart), _drop(p.w / p.w[chart], chart)


def from_inhomogeneous(zt, wt, chart: int = 0) -> ProjectivePair:
    """Inverse of :func:`to_inhomogeneous` (inserts a 1 at the pivot)."""
    zt = as_cvector(zt)
    wt = as_cvector(wt)
    return ProjectivePair(np.insert(zt, chart, 1.0), np.insert(wt, chart, 1.0))


def push_tangent_to_chart(v: TangentRep, chart: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Chain rule for the affine chart: ``d(z_i/z_c) = (z_c dz_i - z_i dz_c)/z_c^2``."""
    p = v.base
    _check_chart(p, chart)
    zc, wc = p.z[chart], p.w[chart]
    dzt = (zc * v.dz - p.z * v.dz[chart]) / zc**2
    dwt = (wc * v.dw - p.w * v.dw[chart]) / wc**2
    return _drop(dzt, chart), _drop(dwt, chart)


def chart_tangent(p: ProjectivePair, dzt, dwt, chart: int = 0) -> TangentRep:
    """Homogeneous representative of the chart vector ``(dzt, dwt)``.

    The base is normalised so that its pivot coordinates equal one.
    """
    zt, wt = to_inhomogeneous(p, chart)
    base = from_inhomogeneous(zt, wt, chart)
    return TangentRep(base, np.insert(as_cvector(dzt), chart, 0.0), np.insert(as_cvector(dwt), chart, 0.0))


def chart_B(p: ProjectivePair, chart: int = 0) -> complex:
    """``1 + zt . wt``, the pairing of the chart-normalised representative."""
    _check_chart(p, chart)
    return complex(p.z @ p.w / (p.z[chart] * p.w[chart]))

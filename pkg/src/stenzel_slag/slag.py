"""Moment map, profile ODEs and special Lagrangian checks.

Two frame functions are available for the profile ODE
``Im(exp(i psi) G(tau) tau') = 0``:

``"printed"``
    the closed forms :func:`closed_form_G`.
``"frame"``
    :func:`frame_G`, the closed form rescaled so that ``Omega(frame) =
    c * frame_G * dtau`` with a real constant ``c``.  It differs from
    :func:`closed_form_G` by the pairing factor ``Btilde(sigma)^-(n+1)`` for
    every case except BDI.  That factor is real on the real axis, so both
    models give the same real-axis curves.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import PoleProximity, StagnationAtZeroOfG
from .projective import ProjectivePair, TangentRep, eval_B
from .stenzel import PotentialTable, holomorphic_volume, kahler_matrix, liouville, omega_tangent
from .symmetric_pairs import LieAlgebraElement, SymmetricPairCase, fundamental_vector

MODELS = ("printed", "frame")
BDI_POWERS = ("proof", "theorem")

#: guards for profile integration
EDGE_MARGIN = 1e-3
POLE_TOL = 1e-6
ZERO_TOL = 1e-10


# ---------------------------------------------------------------------------
# moment map
# ---------------------------------------------------------------------------


def moment_value(X: LieAlgebraElement, p: ProjectivePair, table: PotentialTable | None = None) -> float:
    """``mu_X(p) = alpha(X*)``."""
    return liouville(fundamental_vector(X, p), table)


def moment_residual(case: SymmetricPairCase, p: ProjectivePair) -> float:
    """``max_X |alpha(X*)|`` over the basis of k, with ``f' = 1``."""
    eval_B(p)
    return max(abs(liouville(fundamental_vector(X, p))) for X in case.basis_k())


# ---------------------------------------------------------------------------
# frame functions
# ---------------------------------------------------------------------------


def _tan_checked(tau: complex) -> complex:
    if abs(np.cos(tau)) < POLE_TOL:
        raise PoleProximity(f"cos(tau) = {abs(np.cos(tau)):.2e} near a pole of tan")
    return np.tan(tau)


def _G_parts(case: SymmetricPairCase, tau: complex, bdi_power: str = "proof") -> tuple[int, complex]:
    """``(e, core)`` with ``G = i^e * core``; ``core`` is real on the real axis."""
    tau = complex(tau)
    if case.kind == "bdi":
        if bdi_power not in BDI_POWERS:
            raise ValueError(f"bdi_power must be one of {BDI_POWERS}")
        m = case.m
        e = m - 1 if bdi_power == "proof" else m - 2
        return e, np.sin(2 * tau) ** (m - 3) * np.sin(4 * tau)
    t = _tan_checked(tau)
    if case.kind == "aiii-aiii":
        return case.p + case.q - 1, (1 + t * t) * t ** (2 * case.q - 1)
    if case.kind == "aiii":
        m = case.m
        return 2 * m - 1, t ** (2 * m - 3) * (1 + t * t) ** 3 * np.cos(2 * tau) ** 2
    return 1, (1 - t * t) ** 4 * (1 + t * t) * t**5


def closed_form_G(case: SymmetricPairCase, tau: complex, bdi_power: str = "proof") -> complex:
    """Printed frame function of the profile ODE, powers of ``i`` included.

    ``bdi_power`` selects ``i^(m-1)`` ("proof") or ``i^(m-2)`` ("theorem")
    for BDI and is ignored otherwise.
    """
    e, core = _G_parts(case, tau, bdi_power)
    return 1j ** (e % 4) * core


def frame_constant(case: SymmetricPairCase) -> float:
    """Real constant ``c`` with ``frame_volume = c * frame_G * dtau``."""
    if case.kind == "aiii-aiii":
        return (-1) ** (case.p * case.q - 1) * 2.0 ** (case.p + case.q)
    if case.kind == "aiii":
        return 2.0 ** (2 * case.m - 1)
    if case.kind == "bdi":
        return 1.0
    return 2.0**10


def _pairing_factor(case: SymmetricPairCase, tau: complex) -> complex:
    # Btilde at sigma(tau) is 1 / cos(tau)^2; the BDI closed form already carries it
    if case.kind == "bdi":
        return 1.0
    return np.cos(complex(tau)) ** (2 * (case.n + 1))


def frame_G(case: SymmetricPairCase, tau: complex, bdi_power: str = "proof") -> complex:
    """Frame function matching :func:`holomorphic_volume` on the proof frames."""
    return closed_form_G(case, tau, bdi_power) * _pairing_factor(case, tau)


def profile_G(case: SymmetricPairCase, tau: complex, model: str = "printed", bdi_power: str = "proof") -> complex:
    if model == "printed":
        return closed_form_G(case, tau, bdi_power)
    if model == "frame":
        return frame_G(case, tau, bdi_power)
    raise ValueError(f"model must be one of {MODELS}")


def _phased_G(case, psi: float, tau: complex, model: str, bdi_power: str) -> complex:
    """``exp(i psi) G``, with ``psi`` and the power of ``i`` added before exponentiating."""
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}")
    e, core = _G_parts(case, tau, bdi_power)
    if model == "frame":
        core = core * _pairing_factor(case, tau)
    angle = math.remainder(psi + (e % 4) * (np.pi / 2), 2 * np.pi)
    return complex(np.cos(angle), np.sin(angle)) * core


def frame_vectors(case: SymmetricPairCase, tau: complex, dtau: complex = 1.0) -> list[TangentRep]:
    """``[sigma' dtau, X_1*, ..., X_(2n-1)*]`` at ``sigma(tau)``."""
    base = case.sigma_curve(tau)
    tangent = case.sigma_tangent(tau, dtau)
    tangent = TangentRep(base, tangent.dz, tangent.dw)
    return [tangent] + [fundamental_vector(X, base) for X in case.frame_elements()]


def frame_volume(case: SymmetricPairCase, tau: complex, dtau: complex = 1.0) -> complex:
    """Holomorphic volume of the proof frame at ``sigma(tau)``."""
    return holomorphic_volume(frame_vectors(case, tau, dtau))


# ---------------------------------------------------------------------------
# profile integration
# ---------------------------------------------------------------------------


@dataclass
class ProfileCurve:
    """Samples ``(s, tau(s))`` of an integrated profile curve."""

    case: SymmetricPairCase
    psi: float
    samples: list[tuple[float, complex]]
    step: float
    halt_reason: str = "max-steps"
    model: str = "printed"
    bdi_power: str = "proof"

    @property
    def taus(self) -> np.ndarray:
        return np.array([t for _, t in self.samples], dtype=complex)

    @property
    def s(self) -> np.ndarray:
        return np.array([s for s, _ in self.samples])

    def velocity(self, tau: complex) -> complex:
        return profile_velocity(self.case, self.psi, tau, self.model, self.bdi_power)

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["s", "re_tau", "im_tau"])
        for s, t in self.samples:
            writer.writerow([repr(float(s)), repr(float(t.real)), repr(float(t.imag))])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            self.write_csv(fh)


def profile_velocity(case, psi: float, tau: complex, model: str = "printed", bdi_power: str = "proof") -> complex:
    """Unit-speed ``tau'`` with ``exp(i psi) G tau'`` real and positive."""
    g = np.conj(_phased_G(case, psi, tau, model, bdi_power))
    return complex(g / abs(g))


def _halt_reason(case: SymmetricPairCase, tau: complex, model: str, bdi_power: str) -> str | None:
    r = abs(tau.real)
    if not np.isfinite(tau) or r < EDGE_MARGIN or r > case.strip_halfwidth - EDGE_MARGIN:
        return "boundary"
    if abs(np.cos(tau)) < POLE_TOL:
        return "pole"
    if abs(profile_G(case, tau, model, bdi_power)) < ZERO_TOL:
        return "zero-of-G"
    return None


def integrate_profile(
    case: SymmetricPairCase,
    psi: float,
    tau0: complex,
    step: float = 1e-3,
    max_steps: int = 1000,
    model: str = "printed",
    bdi_power: str = "proof",
) -> ProfileCurve:
    """Integrate the profile ODE by fixed-step RK4 in arc length.

    Stops at the strip edge, near a pole of ``tan``, on the zero locus of
    ``G`` or after ``max_steps`` steps.
    """
    tau0 = complex(tau0)
    case.check_strip(tau0)
    if abs(np.cos(tau0)) < POLE_TOL:
        raise PoleProximity("tau0 is at a pole of tan")
    if abs(profile_G(case, tau0, model, bdi_power)) < ZERO_TOL:
        raise StagnationAtZeroOfG(f"G vanishes at tau0 = {tau0}")
    if not step > 0:
        raise ValueError("step must be positive")

    def f(t):
        return profile_velocity(case, psi, t, model, bdi_power)

    samples = [(0.0, tau0)]
    tau, reason = tau0, "max-steps"
    for i in range(max_steps):
        try:
            k1 = f(tau)
            k2 = f(tau + step * k1 / 2)
            k3 = f(tau + step * k2 / 2)
            k4 = f(tau + step * k3)
        except (PoleProximity, ZeroDivisionError, FloatingPointError):
            reason = "pole"
            break
        nxt = tau + step * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        stop = _halt_reason(case, nxt, model, bdi_power)
        if 0 < abs(nxt.real) < case.strip_halfwidth and stop != "pole":
            samples.append(((i + 1) * step, nxt))
        tau = nxt
        if stop is not None:
            reason = stop
            break
    return ProfileCurve(case, psi, samples, step, reason, model, bdi_power)


def matched_psi(case: SymmetricPairCase, bdi_power: str = "proof") -> float:
    """Phase making ``exp(i psi) G`` real on the real axis (in ``(-pi, pi]``)."""
    if case.kind == "aiii-aiii":
        e = case.p + case.q - 1
    elif case.kind == "aiii":
        e = 2 * case.m - 1
    elif case.kind == "bdi":
        e = case.m - 1 if bdi_power == "proof" else case.m - 2
    else:
        e = 1
    return (0.0, -np.pi / 2, np.pi, np.pi / 2)[e % 4]


# ---------------------------------------------------------------------------
# special Lagrangian verification
# ---------------------------------------------------------------------------


@dataclass
class SlagReport:
    case: str
    params: dict
    psi: float
    n_samples: int
    residual_moment: float
    residual_imomega: float
    residual_omega: float
    tolerances: tuple = field(default=(1e-9, 1e-8, 1e-5))

    @property
    def passed(self) -> bool:
        tm, ti, to = self.tolerances
        return self.residual_moment < tm and self.residual_imomega < ti and self.residual_omega < to

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("tolerances")
        d["pass"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def sample_indices(count: int, n_points: int) -> np.ndarray:
    if count <= n_points:
        return np.arange(count)
    return np.unique(np.linspace(0, count - 1, n_points).round().astype(int))


def transported_frame(case: SymmetricPairCase, tau: complex, dtau: complex, g_induced: np.ndarray):
    """Point ``k.sigma(tau)`` with the pushed tangent and the frame elements ``Ad(k) X``."""
    base = case.sigma_curve(tau)
    tangent = case.sigma_tangent(tau, dtau)
    tangent = TangentRep(base, tangent.dz, tangent.dw).push(g_induced)
    point = tangent.base
    gi = g_induced.conj().T
    elems = [LieAlgebraElement(X.label, X.matrix, g_induced @ X.induced @ gi) for X in case.frame_elements()]
    return point, tangent, elems


def _verify_point(args):
    """Worst residuals at one curve sample; seeded by ``(seed, index)``."""
    curve, idx, n_orbit_samples, seed, table, psi, perturb, omega_step = args
    case = curve.case
    rng = np.random.default_rng([seed, int(idx)])
    tau = curve.samples[idx][1]
    dtau = curve.velocity(tau)
    worst = [0.0, 0.0, 0.0]
    for j in range(n_orbit_samples):
        if j == 0:
            g = np.eye(case.ambient, dtype=complex)
        else:
            g = case.group_element(case.random_element(rng))[1]
        point, tangent, elems = transported_frame(case, tau, dtau, g)
        if perturb:
            noise = rng.standard_normal(case.ambient) + 1j * rng.standard_normal(case.ambient)
            w = point.w + perturb * np.linalg.norm(point.w) * noise / np.linalg.norm(noise)
            point = ProjectivePair(point.z, w)
            tangent = TangentRep(point, tangent.dz, tangent.dw)
        frame = [tangent] + [fundamental_vector(X, point) for X in elems]
        worst[0] = max(worst[0], moment_residual(case, point))
        vol = holomorphic_volume(frame)
        worst[1] = max(worst[1], abs((np.exp(1j * psi) * vol).imag) / abs(vol))
        W = kahler_matrix(elems, point, table, omega_step)
        om = float(np.abs(W).max()) if W.size else 0.0
        for v in frame[1:]:
            om = max(om, abs(omega_tangent(tangent, v, table, step=omega_step)))
        worst[2] = max(worst[2], om)
    return worst


def verify_special_on_curve(
    curve: ProfileCurve,
    n_orbit_samples: int = 10,
    tol: tuple[float, float, float] = (1e-9, 1e-8, 1e-5),
    n_points: int = 20,
    seed: int = 0,
    table: PotentialTable | None = None,
    psi: float | None = None,
    perturb: float = 0.0,
    omega_step: float = 1e-5,
    jobs: int = 1,
) -> SlagReport:
    """Check that ``K . curve`` is special Lagrangian with phase ``psi``.

    At ``n_points`` curve samples and ``n_orbit_samples`` group elements
    (the first one is the identity), checks (a) the moment residual, (b)
    ``|Im(exp(i psi) Omega(frame))| / |Omega(frame)|`` and (c) the largest
    ``|omega(v_i, v_j)|`` over frame pairs.  ``psi`` defaults to the curve's
    phase.  ``perturb`` adds a seeded random displacement of that relative
    size to ``w`` (a negative control).  Results do not depend on ``jobs``.
    """
    if not curve.samples:
        raise ValueError("empty curve")
    psi = curve.psi if psi is None else psi
    idx = sample_indices(len(curve.samples), n_points)
    tasks = [(curve, i, n_orbit_samples, seed, table, psi, perturb, omega_step) for i in idx]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_verify_point, tasks))
    else:
        parts = [_verify_point(t) for t in tasks]
    worst = np.max(np.array(parts), axis=0)
    case = curve.case
    return SlagReport(
        case.kind, case.params, float(psi), len(idx) * n_orbit_samples, *map(float, worst), tolerances=tuple(tol)
    )

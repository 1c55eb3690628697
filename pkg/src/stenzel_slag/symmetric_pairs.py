"""Matrix models of four classical rank-two Hermitian symmetric pairs.

Each :class:`SymmetricPairCase` carries an ambient matrix model of
``u = k + p``, a real-linear identification of ``p`` with ``C^(n+1)`` in
which ``ad(J0)`` acts as multiplication by ``i``, a named basis of ``k`` and
the slice ``a`` used to build profile curves.

Induced operators on ``C^(n+1)`` are not hand-written: they are obtained as
``project_p o ad(X) o embed_p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import expm

from .errors import ChartSingular, DegenerateSlice, DimensionMismatch, NotInP, OutOfStrip
from .projective import ProjectivePair, TangentRep, as_cvector, choose_chart, push_tangent_to_chart

KINDS = ("aiii-aiii", "aiii", "bdi", "diii")

_TOL = 1e-12


def _E(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit E_ij of order n (1-based indices)."""
    m = np.zeros((n, n), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


def _place(size: int, offset: int, block: np.ndarray) -> np.ndarray:
    out = np.zeros((size, size), dtype=complex)
    k = block.shape[0]
    out[offset : offset + k, offset : offset + k] = block
    return out


def _diag_block(first: int, rest: np.ndarray) -> np.ndarray:
    """``diag(0_first, rest)``."""
    k = rest.shape[0]
    out = np.zeros((first + k, first + k), dtype=complex)
    out[first:, first:] = rest
    return out


def _so_units(k: int):
    """Yield (i, j, -E_ij + E_ji) for 1 <= i < j <= k."""
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            yield i, j, -_E(k, i, j) + _E(k, j, i)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


@dataclass(frozen=True)
class LieAlgebraElement:
    """Element of ``k``: its ambient matrix and induced operator on ``C^(n+1)``."""

    label: str
    matrix: np.ndarray
    induced: np.ndarray

    def __add__(self, other: "LieAlgebraElement") -> "LieAlgebraElement":
        return LieAlgebraElement(f"{self.label}+{other.label}", self.matrix + other.matrix, self.induced + other.induced)

    def scaled(self, a: float) -> "LieAlgebraElement":
        return LieAlgebraElement(f"{a:g}*{self.label}", a * self.matrix, a * self.induced)

    def conjugated(self, g_ambient: np.ndarray, g_induced: np.ndarray) -> "LieAlgebraElement":
        """``Ad(k) X`` given k in both representations."""
        return LieAlgebraElement(
            f"Ad.{self.label}",
            g_ambient @ self.matrix @ np.linalg.inv(g_ambient),
            g_induced @ self.induced @ g_induced.conj().T,
        )


def combine(coeffs, basis) -> LieAlgebraElement:
    """Real linear combination of basis elements."""
    mat = sum(c * X.matrix for c, X in zip(coeffs, basis))
    ind = sum(c * X.induced for c, X in zip(coeffs, basis))
    return LieAlgebraElement("combo", mat, ind)


@dataclass(frozen=True)
class SymmetricPairCase:
    """One of AIII+AIII(p, q), AIII(m), BDI(m), DIII.

    Parameter ranges: p >= q >= 1 with p > 1; m >= 3.
    """

    kind: str
    p: int = 0
    q: int = 0
    m: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown case {self.kind!r}; expected one of {KINDS}")
        if self.kind == "aiii-aiii":
            if not (self.p >= self.q >= 1 and self.p > 1):
                raise ValueError(f"aiii-aiii needs p >= q >= 1 and p > 1, got p={self.p}, q={self.q}")
        elif self.kind in ("aiii", "bdi"):
            if self.m < 3:
                raise ValueError(f"{self.kind} needs m >= 3, got m={self.m}")

    # -- constructors ---------------------------------------------------

    @classmethod
    def aiii_aiii(cls, p: int, q: int) -> "SymmetricPairCase":
        return cls("aiii-aiii", p=p, q=q)

    @classmethod
    def aiii(cls, m: int) -> "SymmetricPairCase":
        return cls("aiii", m=m)

    @classmethod
    def bdi(cls, m: int) -> "SymmetricPairCase":
        return cls("bdi", m=m)

    @classmethod
    def diii(cls) -> "SymmetricPairCase":
        return cls("diii")

    @classmethod
    def from_name(cls, name: str, p: int | None = None, q: int | None = None, m: int | None = None):
        if name == "aiii-aiii":
            if p is None or q is None:
                raise ValueError("aiii-aiii requires --p and --q")
            return cls.aiii_aiii(p, q)
        if name in ("aiii", "bdi"):
            if m is None:
                raise ValueError(f"{name} requires --m")
            return cls(name, m=m)
        if name == "diii":
            return cls.diii()
        raise ValueError(f"unknown case {name!r}; expected one of {KINDS}")

    # -- descriptive data -------------------------------------------------

    @property
    def params(self) -> dict:
        if self.kind == "aiii-aiii":
            return {"p": self.p, "q": self.q}
        if self.kind in ("aiii", "bdi"):
            return {"m": self.m}
        return {}

    @property
    def name(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}({args})" if args else self.kind

    @property
    def ambient(self) -> int:
        """Complex dimension n + 1 of p."""
        return {"aiii-aiii": self.p + self.q, "aiii": 2 * self.m, "bdi": self.m, "diii": 10}[self.kind]

    @property
    def n(self) -> int:
        return self.ambient - 1

    @property
    def matrix_size(self) -> int:
        return {"aiii-aiii": self.p + self.q + 2, "aiii": self.m + 2, "bdi": self.m + 2, "diii": 10}[self.kind]

    @property
    def strip_halfwidth(self) -> float:
        return np.pi / 2 if self.kind == "aiii-aiii" else np.pi / 4

    @property
    def lattice(self) -> float:
        """Slice angles in ``lattice * Z`` give singular orbits."""
        return self.strip_halfwidth

    @property
    def dim_k(self) -> int:
        return {
            "aiii-aiii": self.p**2 + self.q**2,
            "aiii": self.m**2 + 3,
            "bdi": self.m * (self.m - 1) // 2 + 1,
            "diii": 25,
        }[self.kind]

    # -- involution and p <-> C^(n+1) -------------------------------------

    @cached_property
    def _sigma_matrix(self) -> np.ndarray:
        """S with theta(X) = S X S^-1."""
        s = self.matrix_size
        if self.kind == "aiii-aiii":
            d = np.ones(s)
            d[1 : self.p + 1] = -1
            d[self.p + 2 :] = -1
            return np.diag(d).astype(complex)
        if self.kind in ("aiii", "bdi"):
            d = -np.ones(s)
            d[:2] = 1
            return np.diag(d).astype(complex)
        J = np.zeros((10, 10), dtype=complex)
        J[:5, 5:] = np.eye(5)
        J[5:, :5] = -np.eye(5)
        return J

    def involution(self, X: np.ndarray) -> np.ndarray:
        S = self._sigma_matrix
        return S @ X @ np.linalg.inv(S)

    def in_u(self, X: np.ndarray, tol: float = 1e-10) -> bool:
        X = np.asarray(X, dtype=complex)
        scale = max(1.0, np.abs(X).max())
        ok = np.abs(X + X.conj().T).max() <= tol * scale
        if self.kind in ("bdi", "diii"):
            ok = ok and np.abs(X.imag).max() <= tol * scale
        if self.kind == "aiii":
            ok = ok and abs(np.trace(X)) <= tol * scale
        if self.kind == "aiii-aiii":
            a = self.p + 1
            ok = ok and abs(np.trace(X[:a, :a])) <= tol * scale and abs(np.trace(X[a:, a:])) <= tol * scale
            ok = ok and np.abs(X[:a, a:]).max() <= tol * scale and np.abs(X[a:, :a]).max() <= tol * scale
        return bool(ok)

    def in_k(self, X: np.ndarray, tol: float = 1e-10) -> bool:
        scale = max(1.0, np.abs(X).max())
        return self.in_u(X, tol) and np.abs(self.involution(X) - X).max() <= tol * scale

    def in_p(self, X: np.ndarray, tol: float = 1e-10) -> bool:
        scale = max(1.0, np.abs(X).max())
        return self.in_u(X, tol) and np.abs(self.involution(X) + X).max() <= tol * scale

    @cached_property
    def _diii_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(5) for j in range(i + 1, 5)]

    def embed_p(self, v) -> np.ndarray:
        """Matrix in p with coordinates ``v``."""
        v = as_cvector(v)
        if v.size != self.ambient:
            raise DimensionMismatch(f"{self.name}: expected length {self.ambient}, got {v.size}")
        s = self.matrix_size
        M = np.zeros((s, s), dtype=complex)
        if self.kind == "aiii-aiii":
            p = self.p
            M[0, 1 : p + 1] = v[:p]
            M[1 : p + 1, 0] = -v[:p].conj()
            M[p + 1, p + 2 :] = v[p:]
            M[p + 2 :, p + 1] = -v[p:].conj()
        elif self.kind == "aiii":
            X = v.reshape(2, self.m)
            M[:2, 2:] = X
            M[2:, :2] = -X.conj().T
        elif self.kind == "bdi":
            M[0, 2:] = v.real
            M[1, 2:] = v.imag
            M[2:, 0] = -v.real
            M[2:, 1] = -v.imag
        else:
            Z = np.zeros((5, 5), dtype=complex)
            for k, (i, j) in enumerate(self._diii_pairs):
                Z[i, j] = v[k]
                Z[j, i] = -v[k]
            M[:5, :5] = Z.imag
            M[:5, 5:] = Z.real
            M[5:, :5] = Z.real
            M[5:, 5:] = -Z.imag
        return M

    def project_p(self, X, check: bool = True) -> np.ndarray:
        """Coordinates of ``X`` in p; raises NotInP if ``X`` is not in p."""
        X = np.asarray(X, dtype=complex)
        s = self.matrix_size
        if X.shape != (s, s):
            raise DimensionMismatch(f"{self.name}: expected {s}x{s} matrix")
        if check and not self.in_p(X):
            raise NotInP(f"matrix is not in p for {self.name}")
        if self.kind == "aiii-aiii":
            p = self.p
            return np.concatenate([X[0, 1 : p + 1], X[p + 1, p + 2 :]])
        if self.kind == "aiii":
            return X[:2, 2:].reshape(-1).copy()
        if self.kind == "bdi":
            return X[0, 2:].real + 1j * X[1, 2:].real
        Z = X[:5, 5:].real + 1j * X[:5, :5].real
        return np.array([Z[i, j] for i, j in self._diii_pairs])

    def induced_operator(self, K: np.ndarray) -> np.ndarray:
        """``project_p o ad(K) o embed_p`` as a complex matrix."""
        cols = [self.project_p(commutator(K, self.embed_p(e))) for e in np.eye(self.ambient)]
        return np.array(cols).T

    def element(self, label: str, K: np.ndarray) -> LieAlgebraElement:
        return LieAlgebraElement(label, K, self.induced_operator(K))

    # -- basis of k -------------------------------------------------------

    @property
    def J0_matrix(self) -> np.ndarray:
        if self.kind == "aiii-aiii":
            return self._J_aiii_aiii(+1)
        if self.kind == "aiii":
            m = self.m
            return 1j / (m + 2) * np.diag([m, m] + [-2] * m).astype(complex)
        if self.kind == "bdi":
            J = np.zeros((self.m + 2,) * 2, dtype=complex)
            J[0, 1], J[1, 0] = -1, 1
            return J
        J = np.zeros((10, 10), dtype=complex)
        J[:5, 5:] = 0.5 * np.eye(5)
        J[5:, :5] = -0.5 * np.eye(5)
        return J

    def _J_aiii_aiii(self, sign: int) -> np.ndarray:
        p, q = self.p, self.q
        Jp = 1j / (p + 1) * np.diag([p] + [-1] * p)
        Jq = 1j / (q + 1) * np.diag([q] + [-1] * q)
        out = np.zeros((p + q + 2,) * 2, dtype=complex)
        out[: p + 1, : p + 1] = Jp
        out[p + 1 :, p + 1 :] = sign * Jq
        return out

    def basis_k(self) -> list[LieAlgebraElement]:
        """Named basis of k, central elements included."""
        if "basis" in self._cache:
            return self._cache["basis"]
        mats: list[tuple[str, np.ndarray]] = []
        s = self.matrix_size
        if self.kind == "aiii-aiii":
            p, q = self.p, self.q
            for block, k, off, prime in ((0, p, 0, ""), (1, q, p + 1, "'")):
                if k < 2:
                    continue
                for i, j, U in _so_units(k):
                    mats.append((f"Z{prime}[{i},{j}]", _place(s, off, _diag_block(1, U))))
                for i, j, _ in _so_units(k):
                    mats.append((f"W{prime}[{i},{j}]", _place(s, off, _diag_block(1, 1j * (_E(k, i, j) + _E(k, j, i))))))
                for a in range(1, k):
                    mats.append((f"W{prime}[{a}]", _place(s, off, _diag_block(1, 1j * (_E(k, a, a) - _E(k, a + 1, a + 1))))))
            mats.append(("J0", self._J_aiii_aiii(+1)))
            mats.append(("J1", self._J_aiii_aiii(-1)))
        elif self.kind == "aiii":
            m = self.m
            X1 = np.array([[0, -1], [1, 0]], dtype=complex)
            X2 = np.array([[0, 1j], [1j, 0]])
            X3 = np.array([[1j, 0], [0, -1j]])
            for lab, B in (("X[1]", X1), ("X[2]", X2), ("X[3]", X3)):
                mats.append((lab, _place(s, 0, B)))
            for i, j, U in _so_units(m):
                mats.append((f"Z[{i},{j}]", _diag_block(2, U)))
            for i, j, _ in _so_units(m):
                mats.append((f"W[{i},{j}]", _diag_block(2, 1j * (_E(m, i, j) + _E(m, j, i)))))
            for a in range(1, m):
                mats.append((f"W[{a}]", _diag_block(2, 1j * (_E(m, a, a) - _E(m, a + 1, a + 1)))))
            mats.append(("J0", self.J0_matrix))
        elif self.kind == "bdi":
            for i, j, U in _so_units(self.m):
                mats.append((f"Y[{i},{j}]", _diag_block(2, U)))
            mats.append(("J0", self.J0_matrix))
        else:
            for i, j, U in _so_units(5):
                Z = np.zeros((10, 10), dtype=complex)
                Z[:5, :5] = U
                Z[5:, 5:] = U
                mats.append((f"Zt[{i},{j}]", Z))
            for i, j, _ in _so_units(5):
                T = _E(5, i, j) + _E(5, j, i)
                W = np.zeros((10, 10), dtype=complex)
                W[:5, 5:] = T
                W[5:, :5] = -T
                mats.append((f"Wt[{i},{j}]", W))
            for a in range(1, 5):
                D = _E(5, a, a) - _E(5, a + 1, a + 1)
                W = np.zeros((10, 10), dtype=complex)
                W[:5, 5:] = D
                W[5:, :5] = -D
                mats.append((f"Wt[{a}]", W))
            mats.append(("J0", self.J0_matrix))
        basis = [self.element(lab, M) for lab, M in mats]
        self._cache["basis"] = basis
        return basis

    def basis_element(self, label: str) -> LieAlgebraElement:
        for X in self.basis_k():
            if X.label == label:
                return X
        raise KeyError(label)

    # -- slice and profile curve ------------------------------------------

    @cached_property
    def _slots(self) -> tuple[int, int, complex, complex]:
        """(index_cos, index_sin, coefficient_cos, coefficient_sin)."""
        if self.kind == "aiii-aiii":
            return 0, self.p, 1.0, 1.0
        if self.kind == "aiii":
            return 0, self.m + 1, 1.0, 1.0
        if self.kind == "bdi":
            return 0, 1, 1.0, 1j
        return self._diii_pairs.index((0, 1)), self._diii_pairs.index((2, 3)), 1j, 1j

    def _pair_vector(self, a: complex, b: complex, conj_coeff: bool = False) -> np.ndarray:
        ia, ib, ca, cb = self._slots
        if conj_coeff:
            ca, cb = np.conj(ca), np.conj(cb)
        v = np.zeros(self.ambient, dtype=complex)
        v[ia] = ca * a
        v[ib] = cb * b
        return v

    def slice_point(self, theta: float) -> np.ndarray:
        """Unit vector of the slice at angle ``theta``."""
        return self._pair_vector(np.cos(theta), np.sin(theta))

    def slice_matrix(self, theta: float) -> np.ndarray:
        return self.embed_p(self.slice_point(theta))

    def check_strip(self, tau: complex) -> None:
        r = abs(complex(tau).real)
        if not 0 < r < self.strip_halfwidth:
            raise OutOfStrip(f"|Re tau| = {r:.6g} not in (0, {self.strip_halfwidth:.6g})")

    def sigma_curve(self, tau: complex, check: bool = True, variant: str = "proof") -> ProjectivePair:
        """Point of M over the complexified slice.

        ``variant="display"`` (BDI only) uses the alternative assignment
        ``(cos, sin; cos, i sin)``, kept for the membership experiment.
        """
        if check:
            self.check_strip(tau)
        c, s = np.cos(tau), np.sin(tau)
        if variant == "display" and self.kind == "bdi":
            z = np.zeros(self.ambient, dtype=complex)
            w = np.zeros(self.ambient, dtype=complex)
            z[0], z[1] = c, s
            w[0], w[1] = c, 1j * s
            return ProjectivePair(z, w)
        return ProjectivePair(self._pair_vector(c, s), self._pair_vector(c, s, conj_coeff=True))

    def sigma_tangent(self, tau: complex, dtau: complex = 1.0) -> TangentRep:
        """``d sigma / d tau * dtau`` (sigma is holomorphic in tau)."""
        base = self.sigma_curve(tau, check=False)
        c, s = np.cos(tau), np.sin(tau)
        dz = self._pair_vector(-s, c) * dtau
        dw = self._pair_vector(-s, c, conj_coeff=True) * dtau
        return TangentRep(base, dz, dw)

    # -- fibre data solving the moment equations --------------------------

    def fiber_vector(self, theta: float, alpha: complex) -> np.ndarray:
        """Normal vector xi at the slice point with scalar ``alpha``."""
        ia, ib, _, _ = self._slots
        v = np.zeros(self.ambient, dtype=complex)
        if self.kind == "bdi":
            v[ia] = alpha * 1j * np.sin(theta)
            v[ib] = alpha * np.cos(theta)
        else:
            v[ia] = alpha * np.sin(theta)
            v[ib] = -alpha * np.cos(theta)
        return v

    def is_degenerate(self, theta: float, tol: float = 1e-9) -> bool:
        k = theta / self.lattice
        return abs(k - round(k)) < tol

    def bundle_fiber_solution(self, theta: float, lam: float) -> tuple[np.ndarray, np.ndarray]:
        """``(zeta, xi)`` solving the zero-moment equations at the slice.

        The free scalar is real for the AIII families and imaginary for BDI
        and DIII.
        """
        if self.is_degenerate(theta):
            raise DegenerateSlice(f"theta = {theta} lies on {self.lattice:.6g} * Z")
        alpha = lam if self.kind in ("aiii-aiii", "aiii") else 1j * lam
        return self.slice_point(theta), self.fiber_vector(theta, alpha)

    # -- frames -------------------------------------------------------------

    def frame_labels(self) -> list[str]:
        """Basis labels whose fundamental fields complete sigma' to a frame of L."""
        if self.kind == "aiii-aiii":
            p, q = self.p, self.q
            labels = [f"Z[1,{j}]" for j in range(2, p + 1)]
            labels += [f"W[1,{j}]" for j in range(2, p + 1)]
            labels += ["J1"]
            labels += [f"Z'[1,{t}]" for t in range(2, q + 1)]
            labels += [f"W'[1,{t}]" for t in range(2, q + 1)]
            return labels
        if self.kind == "aiii":
            m = self.m
            pairs = [(i, j) for i in (1, 2) for j in range(i + 1, m + 1)]
            labels = ["X[1]", "X[2]"]
            labels += [f"Z[{i},{j}]" for i, j in pairs]
            labels += [f"W[{i},{j}]" for i, j in pairs]
            labels += ["W[2]"]
            return labels
        if self.kind == "bdi":
            return [f"Y[{i},{j}]" for i in (1, 2) for j in range(i + 1, self.m + 1)]
        pairs = [(1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 5), (4, 5)]
        return [f"Zt[{i},{j}]" for i, j in pairs] + [f"Wt[{i},{j}]" for i, j in pairs] + ["Wt[2]"]

    def frame_elements(self) -> list[LieAlgebraElement]:
        return [self.basis_element(lab) for lab in self.frame_labels()]

    # -- group action -------------------------------------------------------

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> LieAlgebraElement:
        """Gaussian combination of the basis, normalised to operator norm ``scale``."""
        basis = self.basis_k()
        X = combine(rng.standard_normal(len(basis)), basis)
        norm = np.linalg.norm(X.induced, 2)
        return LieAlgebraElement("random", X.matrix * scale / norm, X.induced * scale / norm)

    def group_element(self, X: LieAlgebraElement) -> tuple[np.ndarray, np.ndarray]:
        """``exp(X)`` in the ambient and induced representations."""
        return expm(X.matrix), expm(X.induced)


def fundamental_vector(X: LieAlgebraElement, p: ProjectivePair) -> TangentRep:
    """``X*`` at ``p``: ``(rho(X) z; conj(rho(X)) w)``."""
    M = X.induced
    if M.shape != (p.z.size, p.z.size):
        raise DimensionMismatch(f"operator of size {M.shape} does not act on length {p.z.size}")
    return TangentRep(p, M @ p.z, M.conj() @ p.w)


def real_frame_rows(vectors, chart: int) -> np.ndarray:
    rows = []
    for v in vectors:
        dzt, dwt = push_tangent_to_chart(v, chart)
        c = np.concatenate([dzt, dwt])
        rows.append(np.concatenate([c.real, c.imag]))
    return np.array(rows)


def orbit_tangent_rank(case: SymmetricPairCase, p: ProjectivePair, rel_tol: float = 1e-8, chart: int | None = None) -> int:
    """Real rank of the span of all fundamental vectors at ``p``.

    Equals ``2n - 1`` when the orbit through a point of the zero section is a
    real hypersurface of CP^n.  Singular values count when they exceed
    ``rel_tol * max(s_max, 1)``.
    """
    try:
        c = choose_chart(p, chart)
    except ChartSingular:
        raise
    rows = real_frame_rows([fundamental_vector(X, p) for X in case.basis_k()], c)
    sv = np.linalg.svd(rows, compute_uv=False)
    # basis operators and chart coordinates are O(1), so the scale is floored at 1
    return int(np.count_nonzero(sv > rel_tol * max(sv[0], 1.0)))

"""Homogeneous coordinates, invariants A, B, N and the bundle embedding."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stenzel_slag.errors import ChartSingular, DegeneratePoint, DimensionMismatch, NotInBundle
from stenzel_slag.projective import (
    ProjectivePair,
    TangentRep,
    chart_B,
    choose_chart,
    eval_A,
    eval_B,
    eval_N,
    from_inhomogeneous,
    phi_hat,
    push_tangent_to_chart,
    sinhc,
    to_inhomogeneous,
    zero_section,
)

from conftest import random_cvec

complex_entries = st.complex_numbers(min_magnitude=0.0, max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def bundle_pair(rng, d, scale=1.0):
    zeta = random_cvec(rng, d)
    xi = random_cvec(rng, d)
    xi -= (xi @ zeta.conj()) / (zeta @ zeta.conj()) * zeta
    return zeta, scale * xi


class TestInvariants:
    def test_A_B_on_small_example(self):
        p = ProjectivePair([1, 1j, 0], [1, 0, 2])
        assert eval_A(p) == pytest.approx(2 * 5)
        assert eval_B(p) == pytest.approx(1)
        assert eval_N(p) == pytest.approx(10)

    def test_zero_section_has_N_one(self, rng):
        for _ in range(20):
            assert eval_N(zero_section(random_cvec(rng, 5))) == pytest.approx(1.0, abs=1e-13)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(complex_entries, min_size=6, max_size=6))
    def test_N_at_least_one(self, entries):
        z = np.array(entries[:3])
        w = np.array(entries[3:])
        if np.linalg.norm(z) < 1e-3 or np.linalg.norm(w) < 1e-3:
            return
        p = ProjectivePair(z, w)
        if abs(p.z @ p.w) < 1e-6 * np.linalg.norm(z) * np.linalg.norm(w):
            return
        assert eval_N(p) >= 1 - 1e-12

    def test_N_is_projectively_invariant(self, rng):
        p = ProjectivePair(random_cvec(rng, 4), random_cvec(rng, 4))
        q = p.rescaled(2 - 3j, 0.1 + 0.4j)
        assert eval_N(q) == pytest.approx(eval_N(p), rel=1e-13)

    def test_degenerate_pairing(self):
        with pytest.raises(DegeneratePoint):
            eval_N(ProjectivePair([1, 0], [0, 1]))

    def test_zero_vector_rejected(self):
        with pytest.raises(DegeneratePoint):
            ProjectivePair([0, 0], [1, 1])

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ProjectivePair([1, 0, 0], [1, 0])


class TestPhiHat:
    def test_zero_fibre_is_zero_section(self, rng):
        zeta = random_cvec(rng, 4)
        p = phi_hat(zeta, np.zeros(4))
        assert np.allclose(p.z, zeta) and np.allclose(p.w, zeta.conj())

    def test_image_lies_in_M(self, rng):
        for scale in (1e-6, 0.3, 2.0):
            p = phi_hat(*bundle_pair(rng, 5, scale))
            assert abs(eval_B(p)) > 0
            assert eval_N(p) >= 1.0

    def test_N_depends_on_fibre_length_only(self, rng):
        # N = cosh^2(2 mu) for mu = |xi| / |zeta|
        for _ in range(10):
            zeta, xi = bundle_pair(rng, 4, rng.uniform(0.05, 1.0))
            mu = np.linalg.norm(xi) / np.linalg.norm(zeta)
            assert eval_N(phi_hat(zeta, xi)) == pytest.approx(np.cosh(2 * mu) ** 2, rel=1e-11)

    def test_rejects_non_orthogonal(self):
        with pytest.raises(NotInBundle):
            phi_hat([1, 0], [1, 0])

    def test_sinhc_small_argument(self):
        for mu in (0.0, 1e-8, 1e-5, 2e-4, 0.3):
            expected = 1.0 if mu == 0 else np.sinh(mu) / mu
            assert sinhc(mu) == pytest.approx(expected, rel=1e-14)


class TestCharts:
    def test_round_trip(self, rng):
        p = ProjectivePair(random_cvec(rng, 4), random_cvec(rng, 4))
        for c in range(4):
            zt, wt = to_inhomogeneous(p, c)
            q = from_inhomogeneous(zt, wt, c)
            assert np.allclose(q.z * p.z[c], p.z) and np.allclose(q.w * p.w[c], p.w)

    def test_chart_B_is_rescaled_pairing(self, rng):
        p = ProjectivePair(random_cvec(rng, 3), random_cvec(rng, 3))
        assert chart_B(p, 1) == pytest.approx(eval_B(p) / (p.z[1] * p.w[1]))

    def test_singular_chart(self):
        p = ProjectivePair([0, 1, 0], [0, 1, 1])
        with pytest.raises(ChartSingular):
            to_inhomogeneous(p, 0)
        assert choose_chart(p) == 1

    def test_gauge_direction_pushes_to_zero(self, rng):
        p = ProjectivePair(random_cvec(rng, 4), random_cvec(rng, 4))
        v = TangentRep(p, (0.3 - 1j) * p.z, 2j * p.w)
        dzt, dwt = push_tangent_to_chart(v, 0)
        assert np.allclose(dzt, 0, atol=1e-13) and np.allclose(dwt, 0, atol=1e-13)

    def test_tangent_push_matches_difference_quotient(self, rng):
        p = ProjectivePair(random_cvec(rng, 3), random_cvec(rng, 3))
        v = TangentRep(p, random_cvec(rng, 3), random_cvec(rng, 3))
        h = 1e-6
        a = to_inhomogeneous(ProjectivePair(p.z + h * v.dz, p.w + h * v.dw), 0)
        b = to_inhomogeneous(ProjectivePair(p.z - h * v.dz, p.w - h * v.dw), 0)
        dzt, dwt = push_tangent_to_chart(v, 0)
        assert np.allclose((a[0] - b[0]) / (2 * h), dzt, atol=1e-8)
        assert np.allclose((a[1] - b[1]) / (2 * h), dwt, atol=1e-8)

"""Tests for the Gaussian-geometry verification checks."""

import math

import numpy as np
import pytest

from capcover.bounds import SQRT5_8, threshold_caps, zone_bound
from capcover.caps import cap_from_mass, cone_geometry, mass_upper_limit
from capcover.errors import DomainError
from capcover.sampling import RngSpec, ZoneSpec, in_zone, sample_uniform_sphere
from capcover.verify import (
    Slab,
    cone_bound_check,
    cone_mass_suite,
    cone_measure_identity_mc,
    cone_suite,
    run_suite,
    scalar_inequalities,
    sidak_mc,
    sidak_suite,
    truncated_cone_measure,
    zone_chain_check,
    zone_quadrature,
    zone_suite,
)

SPEC = RngSpec(master_seed=77123)


def axis_cap(d, mass):
    center = np.zeros(d)
    center[0] = 1.0
    return cap_from_mass(center, mass)


class TestConeMeasureIdentity:
    def test_hemisphere(self):
        rep = cone_measure_identity_mc(axis_cap(4, 0.5), SPEC, 50_000)
        assert rep.passed
        assert abs(rep.lhs - 0.5) <= rep.tolerance

    def test_small_cap_high_dim(self):
        rep = cone_measure_identity_mc(axis_cap(8, 0.05), SPEC.derive(1), 100_000)
        assert rep.passed

    def test_whole_sphere_exact(self):
        rep = cone_measure_identity_mc(axis_cap(3, 1.0), SPEC, 10_000)
        assert rep.passed and rep.lhs == 1.0

    def test_sample_floor(self):
        with pytest.raises(DomainError):
            cone_measure_identity_mc(axis_cap(3, 0.1), SPEC, 5000)


class TestTruncatedCone:
    def test_bound_on_acceptance_grid(self):
        for d in (5, 10, 20, 50, 100):
            for f in (1e-12, 1e-9, 1e-6, 0.5 * mass_upper_limit(d)):
                geom = cone_geometry(d, f)
                val = truncated_cone_measure(geom)
                bound = (SQRT5_8 / d) * f ** ((d - 3.0) / (d - 1.0))
                assert 0.0 <= val <= bound

    def test_vanishes_with_mass(self):
        vals = [truncated_cone_measure(cone_geometry(8, f)) for f in (1e-4, 1e-8, 1e-12)]
        assert vals[0] > vals[1] > vals[2] >= 0.0
        assert vals[2] < 1e-10

    def test_monotone_in_mass(self):
        f0 = 1e-6
        vals = [truncated_cone_measure(cone_geometry(12, f)) for f in (f0, 2 * f0, 4 * f0)]
        assert vals[0] < vals[1] < vals[2]

    def test_check_wrapper(self):
        rep = cone_bound_check(cone_geometry(20, 1e-6))
        assert rep.passed and rep.lhs <= rep.rhs

    def test_domain(self):
        with pytest.raises(DomainError):
            cone_geometry(10, mass_upper_limit(10) * 2)


class TestSidak:
    def test_single_slab_equality(self):
        slab = Slab(normal=np.array([1.0, 0.0, 0.0]), half_width=1.0)
        rep = sidak_mc([slab], SPEC.derive(2), 200_000)
        assert rep.passed
        assert abs(rep.lhs - slab.gaussian_mass) <= rep.tolerance

    def test_repeated_slab_idempotent(self):
        slab = Slab(normal=np.array([0.0, 1.0]), half_width=0.8)
        rep = sidak_mc([slab] * 4, SPEC.derive(3), 200_000)
        # intersection of identical slabs is the slab itself, far above the product
        assert rep.passed
        assert rep.lhs >= slab.gaussian_mass - 4 * rep.tolerance

    def test_eight_random_slabs(self):
        normals = sample_uniform_sphere(10, SPEC.derive(4), 8)
        slabs = [Slab(normal=n, half_width=1.0) for n in normals]
        rep = sidak_mc(slabs, SPEC.derive(5), 200_000)
        assert rep.passed

    def test_suite_deterministic(self):
        a = sidak_suite(SPEC, n_families=3, n_samples=100_000)
        b = sidak_suite(SPEC, n_families=3, n_samples=100_000)
        assert [r.lhs for r in a] == [r.lhs for r in b]

    def test_worker_invariance(self):
        spec = RngSpec(master_seed=5150, chunk_size=8192)
        normals = sample_uniform_sphere(6, spec, 5)
        slabs = [Slab(normal=n, half_width=1.2) for n in normals]
        r1 = sidak_mc(slabs, spec, 120_000, n_workers=1)
        r4 = sidak_mc(slabs, spec, 120_000, n_workers=4)
        assert r1.lhs == r4.lhs

    def test_validation(self):
        slab = Slab(normal=np.array([1.0, 0.0]), half_width=1.0)
        with pytest.raises(DomainError):
            sidak_mc([slab], SPEC, 1000)
        with pytest.raises(DomainError):
            sidak_mc([], SPEC, 200_000)
        with pytest.raises(DomainError):
            Slab(normal=np.array([2.0, 0.0]), half_width=1.0)


class TestZoneQuadrature:
    def test_dim3_archimedes(self):
        for n in (4, 100, 10**6):
            assert zone_quadrature(3, n) == pytest.approx(n**-0.5, rel=1e-12)

    def test_vanishes_large_n(self):
        assert zone_quadrature(6, 10**12) < 1e-2

    def test_chain_on_grid(self):
        for d in (5, 6, 7):
            thr = threshold_caps(d)
            for n in (int(math.ceil(thr)), int(math.ceil(10 * thr)), 10**6):
                q = zone_quadrature(d, n)
                zb = zone_bound(d, n)
                assert q <= zb.full <= zb.simplified
                assert zone_chain_check(d, n).passed

    def test_matches_mc_zone_fraction(self):
        d, n_caps = 5, 50
        zone = ZoneSpec(d=d, n_caps=n_caps)
        pts = sample_uniform_sphere(d, SPEC.derive(6), 200_000)
        frac = float(in_zone(pts, zone).mean())
        target = zone_quadrature(d, n_caps)
        se = math.sqrt(target * (1 - target) / 200_000)
        assert abs(frac - target) <= 4 * se


class TestScalarInequalities:
    def test_report_names(self):
        reports = scalar_inequalities()
        names = [r.name for r in reports]
        assert names == [
            "arcsin-lower",
            "arcsin-upper",
            "quintic-polynomial",
            "binomial-quadratic",
            "gauss-tail-sandwich",
        ]

    def test_arcsin_and_quintic_and_tail_pass(self):
        by_name = {r.name: r for r in scalar_inequalities()}
        assert by_name["arcsin-lower"].passed
        assert by_name["arcsin-upper"].passed
        assert by_name["quintic-polynomial"].passed
        assert by_name["gauss-tail-sandwich"].passed

    def test_binomial_quadratic_fails_honestly_at_three_halves(self):
        # the bound is false for exponents in (1, 2): witness k=3/2, u=0.1
        k, u = 1.5, 0.1
        lhs = (1 - u) ** k
        rhs = 1 - k * u + 0.5 * k * (k - 1) * u * u
        assert lhs > rhs + 1e-6  # violation ~6.5e-5, far beyond 1 ulp
        rep = {r.name: r for r in scalar_inequalities()}["binomial-quadratic"]
        assert not rep.passed
        assert "k=1.5" in rep.detail or "k in (1,2)" in rep.detail

    def test_deterministic(self):
        a = scalar_inequalities()
        b = scalar_inequalities()
        assert [(r.lhs, r.rhs) for r in a] == [(r.lhs, r.rhs) for r in b]

    def test_arcsin_endpoints(self):
        assert 7.0 / 6.0 <= math.pi / 2 <= 7.0 / 6.0 + 1.0
        assert (1 + 1 / 6 + 1) ** 5 <= 1 + 5 / 6 + 47


class TestSuites:
    def test_cone_suite_shape(self):
        reports = cone_suite()
        assert len(reports) == 20
        assert all(r.passed for r in reports)

    def test_zone_suite(self):
        reports = zone_suite()
        assert len(reports) == 9
        assert all(r.passed for r in reports)

    def test_cone_mass_suite(self):
        reports = cone_mass_suite(SPEC, n_samples=50_000)
        assert len(reports) == 12
        assert all(r.passed for r in reports)

    def test_run_suite_dispatch(self):
        assert len(run_suite("scalar", SPEC)) == 5
        with pytest.raises(DomainError):
            run_suite("nope", SPEC)

    def test_record_schema(self):
        rec = scalar_inequalities()[0].to_record()
        assert set(rec) == {"name", "passed", "lhs", "rhs", "tolerance", "detail"}

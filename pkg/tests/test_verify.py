"""Tests for measure certification and negativity witnesses."""

import json
import math
from fractions import Fraction

import pytest

from binomoment.closedform import measure_model
from binomoment.core import (
    DomainError,
    Params,
    RegionError,
    gen_binomial,
    support_endpoint,
)
from binomoment.freeconv import MomentVector, binomial_moment_vector
from binomoment.verify import (
    InconclusiveWitnessError,
    QuadratureSpec,
    Witness,
    certify_measure,
    find_negativity_witness,
    hankel_matrix_min_eig,
    integrate_density,
    scan_for_witness,
)


F = Fraction
SPEC = QuadratureSpec(target_abs_tol=1e-10)

IN_REGION = (
    (F(2), F(0)),
    (F(2), F(1)),
    (F(2), F(-1)),
    (F(2), F(-1, 2)),
    (F(3), F(0)),
    (F(3), F(1)),
    (F(3), F(2)),
    (F(3, 2), F(1, 2)),
    (F(3, 2), F(-1, 2)),
    (F(5, 3), F(1, 3)),
)

OUT_OF_REGION = (
    (F(3, 2), F(1)),
    (F(2), F(3, 2)),
    (F(3), F(-3, 2)),
    (F(3, 2), F(-5, 4)),
    (F(5, 2), F(2)),
    (F(7, 4), F(1)),
    (F(3), F(5, 2)),
    (F(2), F(-5, 4)),
    (F(4), F(-3, 2)),
    (F(5, 3), F(-9, 8)),
)


class TestIntegrateDensity:
    def test_arcsine_third_moment(self):
        m = measure_model(Params(F(2), F(0)))
        res = integrate_density(m, 3, SPEC)
        assert res.converged
        assert abs(res.value - 20.0) <= 1e-8

    def test_cubic_row_mass(self):
        m = measure_model(Params(F(3), F(0)))
        res = integrate_density(m, 0, SPEC)
        assert abs(res.value - 1.0) <= 1e-10

    def test_fractional_row_second_moment(self):
        m = measure_model(Params(F(3, 2), F(-1, 2)))
        res = integrate_density(m, 2, SPEC)
        assert abs(res.value - 15 / 8) <= 1e-10

    def test_atom_not_included(self):
        # the boundary row splits off an atom of mass 1/p; the density
        # part alone carries the rest
        m = measure_model(Params(F(3), F(-1)))
        res = integrate_density(m, 0, SPEC)
        assert abs(res.value - 2 / 3) <= 1e-10

    def test_rejects_negative_order(self):
        m = measure_model(Params(F(2), F(0)))
        with pytest.raises(DomainError):
            integrate_density(m, -1, SPEC)

    @pytest.mark.parametrize(
        "p,r,n",
        [(F(2), F(0), 4), (F(3), F(1), 3), (F(5, 3), F(1, 3), 2)],
    )
    def test_tolerance_halving_self_consistency(self, p, r, n):
        m = measure_model(Params(p, r))
        coarse = integrate_density(m, n, QuadratureSpec(target_abs_tol=1e-8))
        fine = integrate_density(m, n, QuadratureSpec(target_abs_tol=5e-9))
        scale = max(1.0, abs(coarse.value))
        assert abs(coarse.value - fine.value) <= coarse.error_estimate + 1e-15 * scale


class TestCertifyMeasure:
    def test_arcsine_row(self):
        report = certify_measure(Params(F(2), F(0)), 10)
        assert report["passed"]
        assert len(report["moments"]) == 11
        for row in report["moments"]:
            assert row["abs_error"] <= row["tolerance"]

    def test_atom_row(self):
        report = certify_measure(Params(F(3), F(-1)), 8)
        assert report["passed"]
        assert abs(report["atom_at_zero"] - 1 / 3) <= 1e-12
        assert report["moments"][0]["atom"] == report["atom_at_zero"]
        assert report["moments"][1]["atom"] == 0.0

    def test_generic_expansion_row(self):
        report = certify_measure(Params(F(5, 3), F(1, 3)), 8)
        assert report["passed"]

    def test_report_is_json_serializable(self):
        report = certify_measure(Params(F(2), F(1)), 4)
        decoded = json.loads(json.dumps(report))
        assert decoded["params"] == {"p": "2", "r": "1"}

    def test_worker_count_does_not_change_report(self, monkeypatch):
        def run():
            report = certify_measure(Params(F(3), F(1)), 6)
            report.pop("runtime_seconds")
            return report

        monkeypatch.setenv("BINOMOMENT_THREADS", "1")
        serial = run()
        monkeypatch.setenv("BINOMOMENT_THREADS", "4")
        parallel = run()
        assert serial == parallel

    def test_outside_region_rejected(self):
        with pytest.raises(RegionError):
            certify_measure(Params(F(3, 2), F(1)), 4)

    def test_integer_boundary_p_rejected(self):
        with pytest.raises(DomainError):
            certify_measure(Params(F(1), F(0)), 4)

    def test_negative_n_max_rejected(self):
        with pytest.raises(DomainError):
            certify_measure(Params(F(2), F(0)), -1)


class TestHankelMinEig:
    def test_arcsine_positive(self):
        mv = binomial_moment_vector(F(2), F(0), 8)
        assert hankel_matrix_min_eig(mv, 4) > 0

    def test_two_by_two_closed_form(self):
        # min eigenvalue of [[1, a], [a, b]] is ((1+b) - sqrt((1-b)^2+4a^2))/2
        p, r = F(9, 10), F(-1, 2)
        mv = binomial_moment_vector(p, r, 2)
        a, b = float(mv[1]), float(mv[2])
        want = 0.5 * ((1 + b) - math.sqrt((1 - b) ** 2 + 4 * a * a))
        got = hankel_matrix_min_eig(mv, 1)
        assert abs(got - want) <= 1e-12
        # this shallow probe is positive here; the sequence first fails
        # positive definiteness at its sixth moment
        assert got > 0
        assert float(gen_binomial(p, r, 6)) < 0

    def test_point_mass_at_zero_is_psd_boundary(self):
        mv = MomentVector((F(1),) + (F(0),) * 8)
        for d in range(1, 5):
            assert abs(hankel_matrix_min_eig(mv, d)) <= 1e-12

    def test_needs_enough_moments(self):
        mv = binomial_moment_vector(F(2), F(0), 5)
        with pytest.raises(DomainError):
            hankel_matrix_min_eig(mv, 3)

    def test_in_region_rows_stay_nonnegative(self):
        for p, r in ((F(2), F(1)), (F(3), F(2)), (F(3, 2), F(1, 2))):
            mv = binomial_moment_vector(p, r, 10)
            for d in range(1, 6):
                assert hankel_matrix_min_eig(mv, d) >= -1e-9


class TestWitness:
    def test_kind_is_validated(self):
        with pytest.raises(DomainError):
            Witness("NegativeThing", 0.5, -1.0)

    def test_value_must_clear_tolerance(self):
        with pytest.raises(DomainError):
            Witness("NegativeDensityPoint", 0.5, -1e-12)
        with pytest.raises(DomainError):
            Witness("NegativeHankel", 2, 0.25)

    @pytest.mark.parametrize(
        "p,r", [(F(3, 2), F(1)), (F(2), F(3, 2)), (F(3), F(-3, 2))]
    )
    def test_documented_pairs_give_density_witnesses(self, p, r):
        w = find_negativity_witness(Params(p, r))
        assert w.kind == "NegativeDensityPoint"
        assert w.value < -1e-9
        assert 0.0 < w.location < float(support_endpoint(p))

    def test_all_out_of_region_pairs_yield_witnesses(self):
        for p, r in OUT_OF_REGION:
            w = find_negativity_witness(Params(p, r))
            assert w.value < -1e-9, (p, r)

    def test_in_region_scan_finds_nothing(self):
        for p, r in IN_REGION:
            assert scan_for_witness(Params(p, r)) is None, (p, r)

    def test_in_region_request_rejected(self):
        with pytest.raises(RegionError):
            find_negativity_witness(Params(F(2), F(0)))

    def test_empty_scan_is_reported_not_swallowed(self, monkeypatch):
        monkeypatch.setattr("binomoment.verify.scan_for_witness", lambda p: None)
        with pytest.raises(InconclusiveWitnessError):
            find_negativity_witness(Params(F(3, 2), F(1)))


class TestReflectionCoherence:
    def test_certified_rows_reflect_exactly(self):
        # alternating-sign moments of a certified row are exactly the
        # moments at the reflected parameter pair
        for p, r in ((F(2), F(0)), (F(3), F(-1)), (F(5, 3), F(1, 3))):
            for n in range(21):
                assert (-1) ** n * gen_binomial(p, r, n) == gen_binomial(
                    1 - p, -1 - r, n
                )

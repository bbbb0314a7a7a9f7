import json
import math

import numpy as np
import pytest

from spconvex import (
    DomainError,
    ParameterError,
    PreconditionError,
    QuantumChannel,
    SQUARE,
    check_bcl,
    check_fp_lemma,
    check_integral_rep,
    check_key,
    check_midpoint_convexity,
    check_monotonicity,
    check_operator_monotone,
    fd_oracle,
    g_alpha,
    pinching_of,
    power_abs,
    run_suite,
    sample_matrix,
    schatten_norm,
    tightness_scan,
    trace_second_derivative,
    unitary_mixture,
)
from spconvex.divdiff import div_diff1, power
from spconvex.verify import (
    GapRecord,
    TrialConfig,
    _run_task_safe,
    check_hlog_integral,
    derive_trial_seed,
    monotone_increment_min_eig,
)
from spconvex.serialize import records_to_csv
from conftest import ginibre, posdef, selfadjoint


class TestSampling:
    def test_deterministic(self):
        a = sample_matrix("complex-ginibre", 4, 123)
        b = sample_matrix("complex-ginibre", 4, 123)
        assert np.array_equal(a, b)

    def test_selfadjoint_invariant(self):
        M = sample_matrix("self-adjoint", 5, 9)
        assert np.linalg.norm(M - M.conj().T) <= 1e-12 * max(1.0, np.linalg.norm(M))

    def test_posdef_floor(self):
        from spconvex import eigvalsh

        M = sample_matrix("positive-definite", 5, 9)
        assert eigvalsh(M)[0] >= 1e-3 - 1e-12

    def test_indefinite_pushed_off_zero(self):
        from spconvex import eigvalsh

        M = sample_matrix("indefinite-invertible", 5, 9)
        assert np.min(np.abs(eigvalsh(M))) >= 1e-2 - 1e-10

    def test_unknown_tag(self):
        with pytest.raises(ParameterError):
            sample_matrix("butterfly", 3, 0)

    def test_seed_derivation_stable(self):
        assert derive_trial_seed(42, "bcl:1.5", 0) == derive_trial_seed(42, "bcl:1.5", 0)
        assert derive_trial_seed(42, "bcl:1.5", 0) != derive_trial_seed(42, "bcl:1.5", 1)
        assert derive_trial_seed(42, "bcl:1.5", 0) != derive_trial_seed(43, "bcl:1.5", 0)


class TestCheckBcl:
    def test_parallelogram_at_p2(self, rng):
        for _ in range(20):
            rec = check_bcl(ginibre(rng, 4), ginibre(rng, 4), 2.0)
            assert abs(rec.normalized_gap) <= 1e-10
            assert abs(rec.extra_gaps["embedded"]) <= 1e-10

    def test_disjoint_diagonal_pair(self):
        A = np.diag([1.0, 0.0]).astype(complex)
        B = np.diag([0.0, 1.0]).astype(complex)
        rec = check_bcl(A, B, 1.5)
        assert rec.gap == pytest.approx(2.0 ** (7.0 / 3.0) - 3.0, rel=1e-12)

    def test_zero_direction(self, rng):
        A = ginibre(rng, 3)
        rec = check_bcl(A, np.zeros((3, 3)), 1.5)
        assert rec.gap == pytest.approx(0.0, abs=1e-12)

    def test_embedding_consistency(self, rng):
        for p in (1.3, 1.8, 3.0):
            rec = check_bcl(ginibre(rng, 3), ginibre(rng, 3), p)
            assert rec.info["embedding_consistency"] <= 1e-9

    def test_embedding_homogeneous_rescale(self, rng):
        # ||M'||_p^2 = 2^(2/p) ||M||_p^2, so gap and normalizer scale alike
        for p in (1.2, 1.7):
            rec = check_bcl(ginibre(rng, 3), ginibre(rng, 3), p)
            scale = 2.0 ** (2.0 / p)
            assert rec.info["embedded_gap"] == pytest.approx(scale * rec.gap, rel=1e-9)
            assert rec.info["embedded_normalizer"] == pytest.approx(
                scale * rec.normalizer, rel=1e-10)

    def test_reversed_branch_sign(self, rng):
        # for p >= 2 the recorded gap flips the expression's sign
        A, B = ginibre(rng, 3), ginibre(rng, 3)
        p = 3.0
        lhs = schatten_norm(A + B, p) ** 2 + schatten_norm(A - B, p) ** 2
        rhs = 2 * schatten_norm(A, p) ** 2 + 2 * (p - 1) * schatten_norm(B, p) ** 2
        rec = check_bcl(A, B, p)
        assert rec.gap == pytest.approx(rhs - lhs, rel=1e-12)
        assert rec.gap >= -1e-10

    def test_p_validation(self, rng):
        with pytest.raises(ParameterError):
            check_bcl(ginibre(rng, 2), ginibre(rng, 2), 0.9)


class TestCheckKey:
    def test_commuting_example(self):
        rec = check_key(np.diag([1.0, 4.0]).astype(complex), np.eye(2, dtype=complex), 1.5)
        assert rec.info["lhs"] == pytest.approx(1.125, rel=1e-12)
        p = 1.5
        expected_rhs = p * (p - 1) * 9.0 ** ((2.0 / 3.0) * (p - 2.0)) * 2.0 ** (4.0 / 3.0)
        assert rec.info["rhs"] == pytest.approx(expected_rhs, rel=1e-12)
        assert rec.gap == pytest.approx(1.125 - expected_rhs, rel=1e-10)

    def test_zero_direction(self, rng):
        A = posdef(rng, 3)
        rec = check_key(A, np.zeros((3, 3)), 1.5)
        assert rec.gap == pytest.approx(0.0, abs=1e-12)
        assert rec.normalizer == 1.0

    def test_identity_equality_case(self):
        # A = I, B = I: Hoelder holds with equality
        n = 3
        rec = check_key(np.eye(n, dtype=complex), np.eye(n, dtype=complex), 1.5)
        assert abs(rec.normalized_gap) <= 1e-10

    def test_chain_links_nonnegative(self, rng):
        for p in (1.2, 1.5, 1.8):
            for ensemble in ("pd", "indef"):
                if ensemble == "pd":
                    A = posdef(rng, 4)
                else:
                    A = sample_matrix("indefinite-invertible", 4, int(rng.integers(2**31)))
                B = selfadjoint(rng, 4)
                rec = check_key(A, B, p)
                assert rec.worst() >= -1e-9
                assert abs(rec.info["commuting_residual"]) <= 1e-9

    def test_chain_sums_to_total(self, rng):
        rec = check_key(posdef(rng, 3), selfadjoint(rng, 3), 1.5)
        total = sum(rec.extra_gaps.values())
        assert total == pytest.approx(rec.normalized_gap, rel=1e-9, abs=1e-12)

    def test_near_singular_rejected(self):
        with pytest.raises(PreconditionError):
            check_key(np.diag([1e-8, 1.0]).astype(complex), np.eye(2), 1.5)

    def test_p_validation(self):
        with pytest.raises(ParameterError):
            check_key(np.eye(2), np.eye(2), 2.0)


class TestCheckFpLemma:
    def test_same_sign_gap_is_exactly_zero(self):
        assert check_fp_lemma(1.5, 0.7, 2.2).gap == 0.0
        assert check_fp_lemma(1.5, -2.0, -3.0).gap == 0.0

    def test_worked_mixed_sign_value(self):
        rec = check_fp_lemma(1.5, 1.0, -1.0)
        assert abs(rec.gap - 0.75) <= 1e-12

    def test_mixed_sign_formula(self):
        p = 1.5
        rec = check_fp_lemma(p, 1.0, -1.0)
        assert rec.gap == pytest.approx(p * (2.0 - p), rel=1e-12)

    def test_part1_exact(self):
        for r in (-3.0, -1.0, 0.5, 2.0):
            rec = check_fp_lemma(1.5, r, 2.0 * r)
            assert rec.info["part1_residual"] == 0.0

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            check_fp_lemma(1.5, 0.0, 1.0)


class TestCheckMonotonicity:
    def _inputs(self, rng, n=3):
        return posdef(rng, n), posdef(rng, n), ginibre(rng, n)

    def test_identity_channel_zero_gap(self, rng):
        A, B, X = self._inputs(rng)
        ident = QuantumChannel(kraus=(np.eye(3, dtype=complex),), weights=(1.0,),
                               kind="unitary-mixture")
        rec = check_monotonicity("f_alpha", A, B, X, ident, alpha=0.5)
        assert abs(rec.gap) <= 1e-10

    def test_pinching_on_metric_form(self, rng):
        A = posdef(rng, 3)
        X = ginibre(rng, 3)
        beta = pinching_of(selfadjoint(rng, 3))
        rec = check_monotonicity("f_alpha", A, A, X, beta, alpha=0.5)
        assert rec.normalized_gap >= -1e-9

    def test_unitality_fixes_identity(self, rng):
        # X = I, A = B = I: both sides equal n * F(1,1)
        n = 3
        I = np.eye(n, dtype=complex)
        beta = unitary_mixture(n, 4, seed=21)
        rec = check_monotonicity("f_alpha", I, I, I, beta, alpha=0.5)
        assert abs(rec.gap) <= 1e-10

    def test_log_kernel(self, rng):
        A, B, X = self._inputs(rng)
        rec = check_monotonicity("log_dd", A, B, X, unitary_mixture(3, 4, seed=3))
        assert rec.normalized_gap >= -1e-9
        assert rec.param == "log"

    def test_quasi_kernel_matches_log_at_theta_one(self, rng):
        A, B, X = self._inputs(rng)
        beta = unitary_mixture(3, 4, seed=5)
        rec_log = check_monotonicity("log_dd", A, B, X, beta)
        rec_quasi = check_monotonicity("quasi_h", A, B, X, beta, theta=1.0)
        assert rec_quasi.gap == pytest.approx(rec_log.gap, rel=1e-9)

    def test_quasi_kernel_fractional_theta(self, rng):
        A, B, X = self._inputs(rng)
        rec = check_monotonicity("quasi_h", A, B, X, unitary_mixture(3, 4, seed=6), theta=0.5)
        assert rec.normalized_gap >= -1e-9

    def test_invalid_channel_rejected(self, rng):
        A, B, X = self._inputs(rng)
        bad = QuantumChannel(kraus=(np.eye(3, dtype=complex) / 2.0,))
        with pytest.raises(PreconditionError):
            check_monotonicity("f_alpha", A, B, X, bad, alpha=0.5)

    def test_requires_positive_definite(self, rng):
        X = ginibre(rng, 3)
        beta = unitary_mixture(3, 2, seed=1)
        with pytest.raises(PreconditionError):
            check_monotonicity("f_alpha", np.diag([1.0, -1.0, 2.0]), posdef(rng, 3), X,
                               beta, alpha=0.5)

    def test_unknown_kernel(self, rng):
        A, B, X = self._inputs(rng)
        with pytest.raises(ParameterError):
            check_monotonicity("exotic", A, B, X, unitary_mixture(3, 2, seed=1))


class TestCheckMidpointConvexity:
    def test_identical_triples(self, rng):
        t = (posdef(rng, 3), posdef(rng, 3), ginibre(rng, 3))
        rec = check_midpoint_convexity(0.5, t, t)
        assert abs(rec.gap) <= 1e-10

    def test_scaled_pair(self, rng):
        A, B, X = posdef(rng, 3), posdef(rng, 3), ginibre(rng, 3)
        rec = check_midpoint_convexity(0.5, (A, B, X), (2.0 * A, 2.0 * B, X))
        assert rec.normalized_gap >= -1e-9

    def test_scalar_case_matches_hessian_oracle(self):
        # 1x1: phi(a, b) = |x|^2 dd1[t^alpha](a, b); midpoint convexity by scalars
        alpha, x = 0.5, 1.3
        f = power(alpha)

        def phi(a, b):
            return x * x * div_diff1(f, a, b)

        a1, b1, a2, b2 = 0.7, 2.0, 1.9, 0.4
        expected = 0.5 * (phi(a1, b1) + phi(a2, b2)) - phi(0.5 * (a1 + a2), 0.5 * (b1 + b2))
        t1 = (np.array([[a1]]), np.array([[b1]]), np.array([[x]]))
        t2 = (np.array([[a2]]), np.array([[b2]]), np.array([[x]]))
        rec = check_midpoint_convexity(alpha, t1, t2)
        assert rec.gap == pytest.approx(expected, rel=1e-10)
        assert rec.gap >= 0.0

    def test_alpha_validation(self, rng):
        t = (posdef(rng, 2), posdef(rng, 2), ginibre(rng, 2))
        with pytest.raises(ParameterError):
            check_midpoint_convexity(1.2, t, t)


class TestOperatorMonotone:
    def test_identity_function_never_violates(self):
        report = check_operator_monotone(lambda x: x, "identity", 3, 50, master_seed=1)
        assert report.summaries["opmono"].violations == 0
        assert report.summaries["opmono"].min_normalized_gap >= -1e-12

    def test_square_hand_counterexample(self):
        A = np.array([[2.0, 1.0], [1.0, 1.0]], dtype=complex)
        B = np.array([[3.0, 1.0], [1.0, 1.0]], dtype=complex)
        # increment [[5,1],[1,0]] has negative determinant
        gap = monotone_increment_min_eig(lambda x: x * x, A, B)
        assert gap < -1e-3

    def test_square_detected_by_sampling(self):
        report = check_operator_monotone(lambda x: x * x, "square", 3, 100, master_seed=3)
        assert report.summaries["opmono"].violations > 0

    def test_g_alpha_sampled_monotone(self):
        report = check_operator_monotone(lambda x: g_alpha(0.5, x), "g(0.5)", 3, 100,
                                         master_seed=5)
        assert report.summaries["opmono"].violations == 0
        assert report.summaries["opmono"].min_normalized_gap >= -1e-8


class TestIntegralChecks:
    def test_half_alpha_reconstruction(self):
        rec = check_integral_rep(0.5, 1.0)
        assert rec.info["c2_relerr"] <= 1e-10
        assert rec.info["matched_prefactor"] == "sin(alpha*pi)/pi"
        assert not rec.info["printed_prefactor_matches"]
        assert rec.gap > 0

    def test_scaled_target(self):
        rec = check_integral_rep(0.5, 4.0)
        assert rec.info["c2_relerr"] <= 1e-6

    @pytest.mark.parametrize("alpha", [0.1, 0.9])
    def test_endpoint_stress(self, alpha):
        rec = check_integral_rep(alpha, 1.0)
        assert rec.info["c2_relerr"] <= 1e-6

    def test_hlog_records(self):
        for x in (0.5, 1.0, math.e, 10.0):
            rec = check_hlog_integral(x)
            assert rec.gap >= 0.0


class TestFdOracle:
    def test_square_is_exact(self, rng):
        A = selfadjoint(rng, 3)
        B = selfadjoint(rng, 3)
        exact = 2.0 * float(np.trace(B @ B).real)
        assert fd_oracle(SQUARE, A, B, order=2) == pytest.approx(exact, rel=1e-7)

    def test_commuting_value(self):
        A = np.diag([1.0, 4.0]).astype(complex)
        val = fd_oracle(power_abs(1.5), A, np.eye(2), order=2, step=1e-4)
        assert val == pytest.approx(1.125, abs=1e-6)

    def test_richardson_quartering(self, rng):
        # base step chosen so truncation dominates roundoff at both steps
        f = power_abs(1.5)
        A = posdef(rng, 3, shift=1e-2)
        B = selfadjoint(rng, 3)
        exact = trace_second_derivative(f, A, B)
        e1 = abs(fd_oracle(f, A, B, order=2, step=2e-3) - exact)
        e2 = abs(fd_oracle(f, A, B, order=2, step=1e-3) - exact)
        assert e1 / max(e2, 1e-300) == pytest.approx(4.0, rel=0.5)

    def test_order_validation(self, rng):
        with pytest.raises(ParameterError):
            fd_oracle(SQUARE, selfadjoint(rng, 2), selfadjoint(rng, 2), order=3)


class TestTightness:
    def test_ratio_converges(self):
        recs = tightness_scan(1.5, [1e-2, 1e-3])
        assert recs[1].info["rho"] == pytest.approx(0.5, abs=1e-4)

    def test_p2_exact(self):
        # parallelogram: exact up to cancellation noise amplified by 1/eps^2
        for rec in tightness_scan(2.0, [1e-2, 5e-2]):
            assert rec.info["rho"] == pytest.approx(1.0, abs=1e-10)

    def test_quadratic_decay(self):
        r1, r2 = tightness_scan(1.5, [1e-2, 5e-3])
        assert r1.gap / r2.gap == pytest.approx(4.0, rel=0.15)

    def test_eps_validation(self):
        with pytest.raises(ParameterError):
            tightness_scan(1.5, [0.5])


class TestRunSuite:
    def test_trials_must_be_positive(self):
        with pytest.raises(ParameterError):
            run_suite(TrialConfig(trials=0))

    def test_single_trial_monotone(self):
        cfg = TrialConfig(dim=3, trials=1, p_values=(1.5,), alpha_values=(0.5,))
        report = run_suite(cfg, checks=("monotone",))
        recs = [r for r in report.records if r.param == 0.5]
        assert len(recs) == 1
        assert report.violation_count == 0

    def test_reports_identical_across_runs(self):
        cfg = TrialConfig(dim=2, trials=5, p_values=(1.5,), alpha_values=(0.5,), master_seed=3)
        a = run_suite(cfg).to_json()
        b = run_suite(cfg).to_json()
        a.pop("wall_clock_seconds")
        b.pop("wall_clock_seconds")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_reports_identical_across_thread_counts(self):
        cfg = TrialConfig(dim=2, trials=4, p_values=(1.5,), alpha_values=(0.5,), master_seed=3)
        a = run_suite(cfg, checks=("bcl", "fp"), threads=1).to_json()
        b = run_suite(cfg, checks=("bcl", "fp"), threads=2).to_json()
        a.pop("wall_clock_seconds")
        b.pop("wall_clock_seconds")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_unknown_check_rejected(self):
        with pytest.raises(ParameterError):
            run_suite(TrialConfig(trials=1), checks=("bcl", "nonsense"))

    def test_negative_control_flagged_not_counted(self):
        cfg = TrialConfig(dim=3, trials=30, p_values=(1.5,), alpha_values=(0.5,), master_seed=1)
        report = run_suite(cfg, checks=("opmono",))
        summary = report.summaries["opmono"]
        assert summary.extra["negative_control_detected"] is True
        # square violations are excluded from the violation count
        assert summary.violations == 0
        assert report.violation_count == 0

    def test_task_failures_recorded(self):
        bad_task = ("opmono", "not_a_function", 0, {"dim": 2, "negative_control": False})
        out = _run_task_safe(bad_task)
        assert isinstance(out, dict) and "error" in out

    def test_violation_inputs_retained(self):
        # tolerance 0 turns p=2 rounding noise into violations with full inputs
        cfg = TrialConfig(dim=2, trials=10, p_values=(2.0,), alpha_values=(0.5,),
                          master_seed=5, tolerance=0.0)
        report = run_suite(cfg, checks=("bcl",))
        assert report.violation_count > 0
        for rec in report.violations:
            assert rec.inputs is not None and "A" in rec.inputs
        kept = [r for r in report.records if r not in report.violations]
        assert all(r.inputs is None for r in kept)


def test_records_csv_round_trip(tmp_path, rng):
    recs = [check_bcl(ginibre(rng, 2), ginibre(rng, 2), 1.5, trial_seed=7)]
    path = tmp_path / "records.csv"
    with open(path, "w", newline="") as fh:
        records_to_csv(recs, fh)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "check,param,trial_seed,gap,normalized_gap"
    fields = lines[1].split(",")
    assert fields[0] == "bcl"
    assert float(fields[3]) == pytest.approx(recs[0].gap)


def test_gap_record_worst_uses_extra_gaps():
    rec = GapRecord(check="x", param=1.0, trial_seed=0, gap=1.0, normalizer=1.0,
                    normalized_gap=1.0, extra_gaps={"chain": -2.0})
    assert rec.worst() == -2.0

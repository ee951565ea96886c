import math

import numpy as np
import pytest

from lorentz_encode import circuits as cc
from lorentz_encode import locfuncs as lf
from lorentz_encode import qara
from lorentz_encode import statevector as sv


class TestAmplifiedWeight:
    def test_zero_steps_is_identity(self):
        for w in (0.1, 0.5, 0.9):
            assert qara.amplified_weight(w, 0) == pytest.approx(w, abs=1e-15)

    def test_quarter_weight_one_step(self):
        assert qara.amplified_weight(math.sin(math.pi / 6) ** 2, 1) == pytest.approx(1.0, abs=1e-14)

    def test_matches_circuit_simulation(self):
        lc = lf.normalize_lc(lf.LCSpec.one_d(3, [(0.4, 1), (1.0, 5), (1.6, 3)], [0.8, -0.5, 0.6]))
        theta = 0.35
        u = cc.c_lc_ar(lc, theta, with_final_qft=False)
        q = cc.amplification_q(lc, theta)
        w_ar = math.cos(theta) ** 2 / lc.lam**2
        st = cc.simulate(u)
        anc = u.ancilla_qubits
        for m in (1, 2, 3):
            st = cc.simulate(q, st)
            sim = sv.project_ancilla(st, anc, [0] * len(anc)).probability
            assert abs(sim - qara.amplified_weight(w_ar, m)) < 1e-10

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            qara.amplified_weight(0.0, 1)
        with pytest.raises(ValueError):
            qara.amplified_weight(0.5, -1)


class TestPlanExact:
    def test_single_step_band(self):
        # anything in [1/4, 1) needs exactly one amplification
        for w in (0.25, 0.3, 0.6, 0.99):
            assert qara.plan_exact(w).m_opt == 1

    def test_half_weight(self):
        plan = qara.plan_exact(0.5)
        assert plan.m_opt == 1
        assert plan.theta_ar_opt == pytest.approx(math.pi / 4, abs=1e-14)

    def test_small_weight(self):
        plan = qara.plan_exact(0.01)
        assert plan.m_opt == 8

    def test_unit_weight_degenerates(self):
        plan = qara.plan_exact(1.0)
        assert plan.m_opt == 0 and plan.theta_ar_opt == 0.0

    def test_exact_lattice_point_needs_no_reduction(self):
        plan = qara.plan_exact(math.sin(math.pi / 6) ** 2)
        assert plan.m_opt == 1
        assert plan.theta_ar_opt == pytest.approx(0.0, abs=1e-7)

    def test_determinization_identity_over_grid(self):
        for w in np.geomspace(1e-4, 1.0, 200):
            plan = qara.plan_exact(float(w))
            reduced = plan.reduced_weight()
            if plan.m_opt >= 1:
                lattice = math.pi / (4 * plan.m_opt + 2)
                assert lattice <= plan.theta_w + 1e-15
                assert abs(reduced - math.sin(lattice) ** 2) < 1e-12
            assert qara.amplified_weight(reduced, plan.m_opt) == pytest.approx(1.0, abs=1e-12)

    def test_iteration_bound(self):
        for w in np.geomspace(1e-4, 0.25, 100):
            plan = qara.plan_exact(float(w))
            assert plan.m_opt <= math.ceil(math.pi / 4 * math.sqrt(1.0 / w)) + 1

    def test_rejects_out_of_range(self):
        for w in (0.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                qara.plan_exact(w)


class TestAnalyticSuccessWeight:
    def test_single_term(self):
        lc = lf.normalize_lc(lf.LCSpec.one_d(4, [(0.8, 2)], [3.0]))
        assert qara.analytic_success_weight(lc) == pytest.approx(1.0, abs=1e-14)

    def test_distant_narrow_pair_is_half(self):
        lc = lf.normalize_lc(lf.LCSpec.one_d(5, [(0.05, 0), (0.05, 16)], [1.0, 1.0]))
        assert qara.analytic_success_weight(lc) == pytest.approx(0.5, abs=0.01)

    def test_matches_simulated_projector(self):
        lc = lf.normalize_lc(lf.LCSpec.one_d(4, [(0.5, 0), (0.5, 8)], [1.0, 1.0]))
        prob, _ = cc.run_encoding(cc.c_lc_lorentzian(lc))
        assert abs(prob - qara.analytic_success_weight(lc)) < 1e-12

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            qara.analytic_success_weight(lf.LCSpec.one_d(4, [(0.5, 0), (0.5, 8)], [1.0, 1.0]))


class TestErroneousPlanning:
    def test_zero_error_reduces_to_exact(self):
        est = qara.ErroneousEstimate(0.03, 0.0)
        assert qara.plan_erroneous(est) == qara.plan_exact(0.03)

    def test_small_weight_estimate(self):
        est = qara.ErroneousEstimate(0.01, 0.001)
        plan = qara.plan_erroneous(est)
        theta_est = math.asin(math.sqrt(0.011))
        assert plan.m_opt == math.ceil(math.pi / (4 * theta_est) - 0.5)

    def test_underestimates_need_weakly_more_iterations(self):
        for w in np.geomspace(1e-4, 0.05, 30):
            up = qara.plan_erroneous(qara.ErroneousEstimate(float(w), 0.1 * w)).m_opt
            down = qara.plan_erroneous(qara.ErroneousEstimate(float(w), -0.1 * w)).m_opt
            assert down >= up

    def test_validation(self):
        with pytest.raises(ValueError):
            qara.ErroneousEstimate(0.01, 0.02)
        with pytest.raises(ValueError):
            qara.ErroneousEstimate(0.0, 0.0)
        with pytest.raises(ValueError):
            qara.ErroneousEstimate(0.9, 0.2)


class TestFailureWeights:
    def test_exact_estimate_gives_zero_failure(self):
        for w in (1e-4, 1e-2, 0.3):
            assert qara.failure_weight_after_qara(qara.ErroneousEstimate(w, 0.0)) < 1e-12

    def test_small_weight_tracks_epsilon(self):
        est = qara.ErroneousEstimate(1e-3, 1e-4)
        wf = qara.failure_weight_after_qara(est)
        eps = qara.epsilon_qara(0.1)
        assert eps == pytest.approx(6.156e-3, abs=1e-5)
        assert abs(wf - eps) <= 0.5 * eps

    def test_matches_full_circuit_simulation(self):
        lc = lf.normalize_lc(lf.LCSpec.one_d(4, [(0.5, 2), (0.9, 11), (1.5, 7)], [1.0, -0.7, 0.4]))
        w_true = qara.analytic_success_weight(lc)
        est = qara.ErroneousEstimate(w_true, 0.1 * w_true)
        plan = qara.plan_erroneous(est)
        u = cc.c_lc_ar(lc, plan.theta_ar_opt, with_final_qft=False)
        q = cc.amplification_q(lc, plan.theta_ar_opt)
        st = cc.simulate(u)
        for _ in range(plan.m_opt):
            st = cc.simulate(q, st)
        anc = u.ancilla_qubits
        sim_failure = 1.0 - sv.project_ancilla(st, anc, [0] * len(anc)).probability
        assert abs(sim_failure - qara.failure_weight_after_qara(est)) < 1e-9

    def test_epsilon_values(self):
        assert qara.epsilon_qara(0.0) == 0.0
        assert qara.epsilon_qara(0.1) == pytest.approx(6.156e-3, abs=1e-5)
        assert qara.epsilon_qara(0.04) == pytest.approx(9.866e-4, abs=1e-6)
        with pytest.raises(ValueError):
            qara.epsilon_qara(1.0)

    def test_qaa_only_resonant_weight_succeeds(self):
        est = qara.ErroneousEstimate(math.sin(math.pi / 6) ** 2, 0.0)
        assert qara.qaa_only_failure(est) < 1e-12

    def test_qaa_only_generic_weight_fails(self):
        failures = [
            qara.qaa_only_failure(qara.ErroneousEstimate(float(w), 0.0))
            for w in np.geomspace(1e-4, 0.3, 25)
        ]
        assert max(failures) > 0.01


class TestSweep:
    def test_rows_compose_pointwise(self):
        rows = qara.sweep_fig1c([0.1], [1e-3, 1e-2])
        for row in rows:
            est = qara.ErroneousEstimate(row.w, row.delta_ratio * row.w)
            assert row.wf_qara == qara.failure_weight_after_qara(est)
            assert row.wf_qaa == qara.qaa_only_failure(est)
            assert row.eps_qara == qara.epsilon_qara(row.delta_ratio)

    def test_structure_of_reference_figure(self):
        w_grid = list(np.geomspace(1e-4, 0.5, 40))
        for r in (0.01, 0.04, 0.1):
            rows = qara.sweep_fig1c([r], w_grid)
            eps = qara.epsilon_qara(r)
            small = [row.wf_qara for row in rows if row.w <= 0.01]
            assert all(abs(wf - eps) <= 0.5 * eps + 1e-6 for wf in small)
            assert max(row.wf_qara for row in rows) < 0.1 * max(row.wf_qaa for row in rows)

    def test_deterministic_output(self):
        grid = [1e-4, 1e-2]
        assert qara.sweep_fig1c([0.04], grid) == qara.sweep_fig1c([0.04], grid)


class TestReductionIdentity:
    def test_closed_form_and_circuit_agree(self):
        lc = lf.normalize_lc(lf.LCSpec.one_d(3, [(0.4, 1), (1.2, 6)], [1.0, 0.7]))
        w = qara.analytic_success_weight(lc)
        for theta in (0.1, 0.6, 1.3):
            p, _ = cc.run_encoding(cc.c_lc_ar(lc, theta))
            assert abs(p - w * math.cos(theta) ** 2) < 1e-12

use fwm_core::dynamics::steady_residual;
use fwm_core::*;

fn settings(p: &SystemParams) -> IntegrationSettings {
    IntegrationSettings::for_params(p)
}

#[test]
fn integrated_and_algebraic_steady_states_agree() {
    for preset in Preset::ALL {
        let params = preset.params();
        let integrated = steady_state_from_rest(&params, &settings(&params)).unwrap();
        let algebraic = fixed_point_solve(&params, None).unwrap();
        assert!(integrated.converged, "{preset}");
        let rel =
            (integrated.fwm_intensity - algebraic.fwm_intensity).abs() / algebraic.fwm_intensity;
        assert!(rel < 1e-6, "{preset}: {rel:e}");
        for (a, b) in integrated
            .state
            .emitters
            .iter()
            .zip(&algebraic.state.emitters)
        {
            assert!((a.rho_ge - b.rho_ge).norm() <= 1e-6 * b.rho_ge.norm());
        }
    }
}

#[test]
fn converged_results_satisfy_the_steady_equations() {
    for preset in Preset::ALL {
        let params = preset.params();
        let s = settings(&params);
        let r = steady_state_from_rest(&params, &s).unwrap();
        assert!(r.converged);
        assert_eq!(r.final_residual, steady_residual(&r.state, &params));
        assert!(
            r.final_residual < 10.0 * s.steady_residual_tol,
            "{preset}: {:e}",
            r.final_residual
        );
        assert!(r.relative_drift <= s.steady_residual_tol);
        assert!(r.elapsed_sim_time >= s.residual_window);
    }
}

#[test]
fn strongly_driven_emitter_stays_physical_and_agrees() {
    // Saturated regime, populations of order 0.1.
    let params = Preset::Fig3.params().with_pumps_scaled(60.0);
    let params = SweepTarget::OmegaEg.apply(&params, 1.5286).unwrap();
    let r = steady_state_from_rest(&params, &settings(&params)).unwrap();
    assert!(r.converged);
    assert!(r.state.emitters[0].rho_ee > 0.01);
    assert!(r.worst_positivity_excess <= 1e-9);
    let fp = fixed_point_solve(&params, Some(&r.state)).unwrap();
    let rel = (r.fwm_intensity - fp.fwm_intensity).abs() / fp.fwm_intensity;
    assert!(rel < 1e-4, "{rel:e}");
}

#[test]
fn frames_agree_on_a_preset() {
    let params = Preset::Fig4.params();
    let dev = lab_frame_check(
        &params,
        &HybridState::zero(2),
        &settings(&params),
        300.0,
        30,
    )
    .unwrap();
    assert!(dev < 1e-8, "{dev:e}");
}

#[test]
fn single_and_trivially_coupled_integrations_match() {
    let single = Preset::Fig3.params();
    let coupled = SystemParams::Coupled(single.as_single().unwrap().to_coupled());
    let a = steady_state_from_rest(&single, &settings(&single)).unwrap();
    let b = steady_state_from_rest(&coupled, &settings(&coupled)).unwrap();
    let rel = (a.fwm_intensity - b.fwm_intensity).abs() / a.fwm_intensity;
    assert!(rel < 1e-7, "{rel:e}");
    assert_eq!(b.state.emitters[1].rho_ee, 0.0);
}

#[test]
fn loose_tolerance_is_caught_by_cross_solver_check() {
    let suite = validation::Suite::new(validation::SuiteConfig {
        integrator_tolerance: Some(1e-3),
        ..Default::default()
    });
    let record = suite.check(5);
    assert!(!record.passed, "{record}");
}

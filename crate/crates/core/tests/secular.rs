//! Reduced model against the full joint Lindblad model.

use photodet_core::instrument::{integrate_instrument, Preparation, TimeGrid};
use photodet_core::oracle::{
    branch_residual, extract_instrument_oracle, max_oracle_dt, secular_residual,
};
use photodet_core::{ModelParams, Regime, TruncationMode};

const CLOSURE: TruncationMode = TruncationMode::AlgebraicClosure;

fn grid_for(p: &ModelParams, t_max: f64) -> TimeGrid {
    let dt = max_oracle_dt(p);
    TimeGrid::new(t_max, dt, ((0.05 / dt) as usize).max(1)).unwrap()
}

#[test]
fn published_strong_regime_residual_is_finite() {
    let p = Regime::Strong.params();
    let r = secular_residual(&p, 3, Preparation::Ground, grid_for(&p, 5.0), CLOSURE).unwrap();
    assert!(r.g.is_finite() && r.e.is_finite());
}

/// Adiabatic elimination of the atomic coherence gives an exchange rate of
/// `2|Ω|²Γ/(Γ²+Δ²)` and a level shift of opposite sign to the reduced
/// generator's `κΔ` term. A reduced model with `κ` doubled and `Δ` flipped
/// therefore converges to the joint model as `Γ/Ω` grows.
#[test]
fn joint_model_converges_to_rate_doubled_reduction() {
    let alpha = 0.2;
    let delta = 0.5;
    let mut last = f64::INFINITY;
    for ratio in [5.0, 10.0, 20.0] {
        let gamma = alpha * ratio * ratio;
        let omega = gamma / ratio;
        let p = ModelParams::new(omega, delta, gamma, 0.0, 2.0 * gamma).unwrap();
        let doubled = ModelParams {
            omega: omega * std::f64::consts::SQRT_2,
            delta: -delta,
            ..p
        };
        let grid = grid_for(&p, 5.0);
        let oracle = extract_instrument_oracle(&p, 3, Preparation::Ground, grid).unwrap();
        let reduced =
            integrate_instrument(&doubled, 3, Preparation::Ground, grid, CLOSURE).unwrap();
        let r = branch_residual(&oracle, &reduced).unwrap();
        assert!(r.g < last, "ratio {ratio}: {} after {last}", r.g);
        last = r.g;
    }
    assert!(last < 0.01, "{last}");
}

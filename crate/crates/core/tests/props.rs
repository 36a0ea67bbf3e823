use photodet_core::fock::{fock_state, matrix_unit};
use photodet_core::instrument::{conditional_state, InstrumentStepper, Preparation, P_FLOOR};
use photodet_core::metrics::{outcome_metrics, von_neumann_entropy, LogBase};
use photodet_core::{BlockGenerator, ModelParams, Operator, TruncationMode, C64};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (
        0.01..2.0f64,
        -3.0..3.0f64,
        0.0..0.5f64,
        0.0..2.0f64,
        0.0..2.0f64,
    )
        .prop_map(|(omega, delta, up, down, extra)| {
            let gamma_big = (up + down) / 2.0 + 0.1 + extra;
            ModelParams::new(omega, delta, gamma_big, up, down).unwrap()
        })
}

fn density(d: usize) -> impl Strategy<Value = Operator> {
    proptest::collection::vec(-1.0..1.0f64, 2 * d * d).prop_map(move |v| {
        let g = Operator::from_fn(d, d, |i, j| {
            C64::new(v[2 * (i + j * d)], v[2 * (i + j * d) + 1])
        });
        let p = &g * g.adjoint() + Operator::identity(d, d) * C64::new(1e-3, 0.0);
        let tr = p.trace();
        p / tr
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_is_trace_annihilating(p in params(), d in 1usize..6) {
        let gen = BlockGenerator::new(&p, d, TruncationMode::AlgebraicClosure).unwrap();
        for m in 0..d {
            for n in 0..d {
                let y = matrix_unit(d, m, n);
                for (into_g, into_e) in [(&gen.gg, &gen.eg), (&gen.ge, &gen.ee)] {
                    let t = into_g.trace_of_image(&y).unwrap() + into_e.trace_of_image(&y).unwrap();
                    prop_assert!(t.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn short_time_maps_are_a_valid_instrument(p in params(), d in 1usize..5, excited in any::<bool>()) {
        let prep = if excited { Preparation::Excited } else { Preparation::Ground };
        let mut s = InstrumentStepper::new(&p, d, prep, 0.01, TruncationMode::AlgebraicClosure).unwrap();
        for _ in 0..50 {
            s.step().unwrap();
        }
        for m in [s.m_g(), s.m_e()] {
            prop_assert!(m.choi_min_eigenvalue() > -1e-8);
        }
        let rho = fock_state(d, d - 1).unwrap();
        let (pg, pe) = s.probabilities(&rho).unwrap();
        prop_assert!((pg + pe - 1.0).abs() < 1e-10);
    }

    #[test]
    fn conditional_metrics_are_bounded(p in params(), rho in density(3)) {
        let mut s = InstrumentStepper::new(&p, 3, Preparation::Ground, 0.01, TruncationMode::AlgebraicClosure).unwrap();
        for _ in 0..100 {
            s.step().unwrap();
        }
        let before = von_neumann_entropy(&rho, LogBase::Two).unwrap();
        for m in [s.m_g(), s.m_e()] {
            let c = conditional_state(&m, &rho).unwrap();
            prop_assert!((0.0..=1.0 + 1e-9).contains(&c.p));
            prop_assert_eq!(c.state.is_some(), c.p > P_FLOOR);
            let o = outcome_metrics(&m, &rho, before, LogBase::Two).unwrap();
            if let Some(st) = o.state {
                prop_assert!((0.0..=1.0).contains(&st.fidelity));
                prop_assert!(st.entropy >= 0.0 && st.entropy <= 3f64.log2() + 1e-9);
            }
        }
    }
}

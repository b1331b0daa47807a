use num_complex::Complex64;
use proptest::prelude::*;

use vbent::basis::sector_basis;
use vbent::entanglement::{e2v, e2v_max, entropy, entropy_closed_form, iconcurrence, ic_max};
use vbent::homogenizer::verify_maximal;
use vbent::io::{read_state, state_to_string};
use vbent::phasor::{solve_phasor_system, PhasorSystem};
use vbent::state::PureState;
use vbent::vb::rumer_map;

fn coeffs(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
        .prop_filter("nonzero", |v: &Vec<Complex64>| v.iter().any(|z| z.norm() > 1e-3))
}

fn sector_state(n: usize) -> impl Strategy<Value = PureState> {
    let basis = sector_basis(n).unwrap();
    coeffs(basis.dim()).prop_map(move |c| PureState::new(basis.clone(), c).unwrap())
}

fn singlet_state(n: usize) -> impl Strategy<Value = PureState> {
    let map = rumer_map(n).unwrap();
    coeffs(map.columns().len())
        .prop_map(move |c| PureState::new(map.basis.clone(), map.combine(&c).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rdm_is_a_density_matrix(s in sector_state(6), i in 1usize..=6, j in 1usize..=6) {
        prop_assume!(i != j);
        let rho = s.rdm2(i, j).unwrap();
        let ev = rho.eigenvalues();
        prop_assert!(ev.iter().all(|&x| x > -1e-10));
        prop_assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let h = entropy(&rho).unwrap();
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&h));
    }

    #[test]
    fn singlet_states_are_isotropic_and_bounded(s in singlet_state(6)) {
        let cert = verify_maximal(&s);
        prop_assert!(cert.flags.is_isotropic);
        prop_assert!(e2v(&s).unwrap() <= e2v_max(6).unwrap() + 1e-10);
        prop_assert!(iconcurrence(&s).unwrap() <= ic_max(6).unwrap() + 1e-10);
        for (i, j) in [(1, 2), (2, 5), (3, 6)] {
            let c = s.szsz(i, j).unwrap();
            let h = entropy(&s.rdm2(i, j).unwrap()).unwrap();
            prop_assert!((h - entropy_closed_form(c).unwrap()).abs() < 1e-9);
        }
        let total: f64 = (2..=6).map(|j| s.szsz(1, j).unwrap()).sum();
        prop_assert!((total + 0.25).abs() < 1e-10);
    }

    #[test]
    fn state_json_round_trip(s in sector_state(4)) {
        let back = read_state(state_to_string(&s).as_bytes()).unwrap();
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn phasor_solutions_solve_the_system(pairs in prop::collection::vec((0usize..4, 0usize..4, any::<bool>()), 1..4)) {
        let eqs: Vec<Vec<(i8, usize)>> = pairs
            .iter()
            .filter(|(a, b, _)| a != b)
            .map(|&(a, b, s)| vec![(1, a), (if s { 1 } else { -1 }, b)])
            .collect();
        prop_assume!(!eqs.is_empty());
        let sys = PhasorSystem::new(4, eqs).unwrap();
        if let Ok(families) = solve_phasor_system(&sys) {
            for f in families {
                let phases: Vec<f64> = (0..f.components()).map(|k| 0.37 * (k + 1) as f64).collect();
                let z = f.evaluate(&phases).unwrap();
                prop_assert!(sys.residual(&z) < 1e-12);
                prop_assert!(f.contains(&z, 1e-12));
            }
        }
    }
}

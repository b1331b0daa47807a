use vbent::entanglement::{e2v, e2v_max};
use vbent::families::{six_c_alpha, Family};
use vbent::homogenizer::{solve_exact, Route};
use vbent::models::{
    full_space_commutators, ground_space_vs_rumer, is_ground_state, sector_multiplicity, spectrum,
    HamiltonianSpec, Model,
};
use vbent::torus::torus_search;

#[test]
fn iirhm_spectrum_up_to_ten_sites() {
    for n in [4, 6, 8, 10] {
        let spec = HamiltonianSpec::new(n, Model::Iirhm, 2.5).unwrap();
        let rep = spectrum(&spec).unwrap();
        let j = 2.5 / (n as f64 - 1.0);
        assert_eq!(rep.levels.len(), n / 2 + 1);
        for l in &rep.levels {
            let s = l.s_t as f64;
            assert!((l.energy - 0.5 * j * (s * (s + 1.0) - 0.75 * n as f64)).abs() < 1e-10);
            assert_eq!(l.multiplicity, sector_multiplicity(n, l.s_t));
        }
        assert!((rep.ground_energy + 3.0 * n as f64 * j / 8.0).abs() < 1e-10);
    }
}

#[test]
fn negative_coupling_flips_the_ground_sector() {
    let spec = HamiltonianSpec::new(6, Model::Iirhm, -1.0).unwrap();
    let rep = spectrum(&spec).unwrap();
    assert_eq!(rep.levels[0].s_t, 3);
    assert_eq!(rep.ground_degeneracy, 1);
}

#[test]
fn solver_outputs_are_ground_states() {
    for n in [4, 6] {
        let spec = HamiltonianSpec::new(n, Model::Iirhm, 1.0).unwrap();
        for route in [Route::HomogenizeIsotropic, Route::IsotropizeHomogeneous] {
            for s in solve_exact(n, route, 5).unwrap() {
                assert!(is_ground_state(&spec, &s).unwrap().is_ground);
            }
        }
        for f in Family::ALL.iter().filter(|f| f.n() == n) {
            assert!(is_ground_state(&spec, &f.state().unwrap()).unwrap().is_ground);
        }
    }
    let spec = HamiltonianSpec::new(6, Model::Iirhm, 1.0).unwrap();
    assert!(is_ground_state(&spec, &six_c_alpha(0.7).unwrap()).unwrap().is_ground);
}

#[test]
fn torus_states_are_ground_states() {
    let out = torus_search(8, 11, 3).unwrap();
    let spec = HamiltonianSpec::new(8, Model::Iirhm, 1.0).unwrap();
    for run in &out.runs {
        assert!(is_ground_state(&spec, &run.state).unwrap().is_ground);
        assert!(e2v(&run.state).unwrap() <= e2v_max(8).unwrap() + 1e-12);
    }
}

#[test]
fn ground_projector_matches_rumer_projector() {
    for n in [4, 6, 8] {
        let spec = HamiltonianSpec::new(n, Model::Iirhm, 1.0).unwrap();
        assert!(ground_space_vs_rumer(&spec).unwrap() <= 1e-9);
    }
}

#[test]
fn commutators_vanish() {
    for (n, model) in [(4, Model::Ring), (6, Model::Iirhm), (6, Model::Chain), (8, Model::Ring)] {
        let spec = HamiltonianSpec::new(n, model, 1.0).unwrap();
        let (a, b) = full_space_commutators(&spec).unwrap();
        assert!(a <= 1e-12 && b <= 1e-12, "{model:?} n = {n}: {a:e} {b:e}");
    }
}

#[test]
fn energy_per_site_is_bounded() {
    for n in (4..=12).step_by(2) {
        let spec = HamiltonianSpec::new(n, Model::Iirhm, 1.0).unwrap();
        let e0 = vbent::models::iirhm_energy(&spec, 0);
        assert!((e0 / n as f64).abs() <= 3.0 / 8.0);
    }
}

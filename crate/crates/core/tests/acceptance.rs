//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use vbent::basis::binomial;
use vbent::entanglement::{bound_comparison, e2v, e2v_max, entropy, werner_p, wootters_concurrence};
use vbent::families::Family;
use vbent::homogenizer::{same_span, solve_exact, state_set_rank, verify_maximal, Route};
use vbent::linalg::rank_of_columns;
use vbent::models::{is_ground_state, ring_baseline, spectrum, HamiltonianSpec, Model};
use vbent::optimality::{verify_homogeneity_optimal, Objective};
use vbent::state::PureState;
use vbent::torus::torus_search;
use vbent::vb::{crossing_identity_residual, enumerate_all_matchings, enumerate_rumer, rumer_map, vb_state, Orientation};

type Check = Result<Vec<String>, String>;

/// Id, title, check, runtime limit.
type Criterion = (&'static str, &'static str, fn() -> Check, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

/// −Σ λ log₂ λ of an isotropic pair with ⟨SᶻSᶻ⟩ = c: singlet weight 1/4 − 3c,
/// triplet weights 1/4 + c.
fn pair_entropy(c: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    h(0.25 - 3.0 * c) + 3.0 * h(0.25 + c)
}

fn oracle_e2v_max(n: usize) -> f64 {
    pair_entropy(-1.0 / (4.0 * (n as f64 - 1.0)))
}

fn pair_entropies(s: &PureState) -> Vec<f64> {
    let n = s.n();
    (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .map(|(i, j)| entropy(&s.rdm2(i, j).unwrap()).unwrap())
        .collect()
}

fn exact_states(n: usize) -> Result<Vec<PureState>, String> {
    let mut out = Vec::new();
    for route in [Route::HomogenizeIsotropic, Route::IsotropizeHomogeneous] {
        out.extend(solve_exact(n, route, 1).map_err(|e| format!("solve_exact({n}, {route:?}): {e}"))?);
    }
    Ok(out)
}

fn ac1() -> Check {
    let want = 1.0 + 0.5 * 3f64.log2();
    let got = e2v_max(4).map_err(|e| e.to_string())?;
    ensure((got - want).abs() <= 1e-6, || format!("e2v_max(4) = {got}, want {want}"))?;
    let states = exact_states(4)?;
    ensure(states.len() == 4, || format!("{} states from the two routes", states.len()))?;
    for s in &states {
        let ent = pair_entropies(s);
        ensure(ent.len() == 6, || "pair count".into())?;
        let spread = ent.iter().fold(0.0f64, |m, x| m.max((x - ent[0]).abs()));
        ensure(spread <= 1e-10, || format!("pair entropies spread {spread:e}"))?;
        ensure((ent[0] - want).abs() <= 1e-6, || format!("pair entropy {}", ent[0]))?;
    }
    Ok(vec![format!("e2v_max(4) = {got:.9}; 4 solver states, 6 equal pairs each")])
}

fn ac2() -> Check {
    let got = e2v_max(6).map_err(|e| e.to_string())?;
    let oracle = oracle_e2v_max(6);
    ensure((got - oracle).abs() <= 1e-12, || format!("e2v_max(6) = {got}, oracle {oracle}"))?;
    ensure((got - 1.9219281).abs() <= 1e-6, || format!("e2v_max(6) = {got}"))?;
    let rounded = 1.921964;
    ensure((rounded - got).abs() <= 5e-5, || format!("rounded value {rounded} is {:e} away", rounded - got))?;
    for f in [Family::SixA, Family::SixAConj, Family::SixB, Family::SixC, Family::SixCConj] {
        let v = e2v(&f.state().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure((v - got).abs() <= 1e-9, || format!("{}: e2v = {v}", f.name()))?;
    }
    Ok(vec![format!(
        "e2v_max(6) = {got:.9}; reference 1.921964 differs by {:.1e}; 5 named states match",
        rounded - got
    )])
}

fn ac3() -> Check {
    let mut prev = f64::NEG_INFINITY;
    for n in (4..=1000).step_by(2) {
        let v = e2v_max(n).map_err(|e| e.to_string())?;
        ensure(v > prev, || format!("not increasing at n = {n}"))?;
        ensure((v - oracle_e2v_max(n)).abs() <= 1e-12, || format!("oracle mismatch at n = {n}"))?;
        prev = v;
    }
    ensure(prev > 1.9999, || format!("e2v_max(1000) = {prev}"))?;
    Ok(vec![format!("monotone over n = 4..1000; e2v_max(1000) = {prev:.7}")])
}

fn ac4() -> Check {
    let mut notes = Vec::new();
    for (n, want) in [(4usize, 2usize), (6, 5)] {
        let a = solve_exact(n, Route::HomogenizeIsotropic, 3).map_err(|e| e.to_string())?;
        let b = solve_exact(n, Route::IsotropizeHomogeneous, 3).map_err(|e| e.to_string())?;
        for (name, set) in [("homogenize-isotropic", &a), ("isotropize-homogeneous", &b)] {
            ensure(set.len() == want, || format!("n = {n} {name}: {} states", set.len()))?;
            ensure(state_set_rank(set) == want, || format!("n = {n} {name}: rank {}", state_set_rank(set)))?;
            ensure(set.iter().all(|s| verify_maximal(s).is_valid()), || format!("n = {n} {name}: uncertified state"))?;
        }
        ensure(same_span(&a, &b), || format!("n = {n}: routes span different subspaces"))?;
        notes.push(format!("n = {n}: {want} certified states per route, identical span"));
    }
    Ok(notes)
}

fn ac5() -> Check {
    for (n, want) in [(4usize, 2usize), (6, 5), (8, 14)] {
        let c = enumerate_rumer(n).map_err(|e| e.to_string())?.len();
        ensure(c == want, || format!("n = {n}: {c} Rumer diagrams"))?;
        let catalan = binomial(n, n / 2) / (n / 2 + 1);
        ensure(c == catalan, || format!("n = {n}: Catalan {catalan}"))?;
        let r = rank_of_columns(&rumer_map(n).map_err(|e| e.to_string())?.columns(), 1e-8);
        ensure(r == want, || format!("n = {n}: Rumer map rank {r}"))?;
    }
    let res = crossing_identity_residual();
    ensure(res <= 1e-12, || format!("crossing identity residual {res:e}"))?;
    Ok(vec![format!("counts and ranks (2, 5, 14); crossing residual {res:.1e}")])
}

fn ac6() -> Check {
    let mut notes = Vec::new();
    for (n, want_g) in [(4usize, 2usize), (6, 5), (8, 14)] {
        let spec = HamiltonianSpec::new(n, Model::Iirhm, 1.0).map_err(|e| e.to_string())?;
        let rep = spectrum(&spec).map_err(|e| e.to_string())?;
        let j = 1.0 / (n as f64 - 1.0);
        let mut total = 0;
        for l in &rep.levels {
            let s = l.s_t as f64;
            let e = 0.5 * j * (s * (s + 1.0) - 0.75 * n as f64);
            ensure((l.energy - e).abs() <= 1e-10, || format!("n = {n} S = {}: E = {} vs {e}", l.s_t, l.energy))?;
            let k = n / 2 - l.s_t;
            let mult = binomial(n, k) - if k > 0 { binomial(n, k - 1) } else { 0 };
            ensure(l.multiplicity == mult, || format!("n = {n} S = {}: multiplicity {}", l.s_t, l.multiplicity))?;
            total += l.multiplicity;
        }
        ensure(total == binomial(n, n / 2), || format!("n = {n}: levels cover {total} states"))?;
        ensure(rep.ground_degeneracy == want_g, || format!("n = {n}: degeneracy {}", rep.ground_degeneracy))?;

        let mut checked = 0;
        for m in enumerate_all_matchings(n).map_err(|e| e.to_string())? {
            let s = vb_state(&m, Orientation::Ascending).map_err(|e| e.to_string())?;
            let g = is_ground_state(&spec, &s).map_err(|e| e.to_string())?;
            ensure(g.is_ground, || format!("n = {n}: VB product {m} residual {:e}", g.residual))?;
            checked += 1;
        }
        let mut maximal: Vec<PureState> = Family::ALL
            .iter()
            .filter(|f| f.n() == n)
            .map(|f| f.state().unwrap())
            .collect();
        if n <= 6 {
            maximal.extend(exact_states(n)?);
        }
        for s in maximal.iter().filter(|s| verify_maximal(s).is_valid()) {
            let g = is_ground_state(&spec, s).map_err(|e| e.to_string())?;
            ensure(g.is_ground, || format!("n = {n}: certified state residual {:e}", g.residual))?;
            checked += 1;
        }
        notes.push(format!("n = {n}: {} levels match, degeneracy {want_g}, {checked} ground-state checks", rep.levels.len()));
    }
    Ok(notes)
}

fn ac7() -> Check {
    let mut notes = Vec::new();
    for n in [4usize, 6, 8] {
        let mut states: Vec<PureState> = Family::ALL
            .iter()
            .filter(|f| f.n() == n)
            .map(|f| f.state().unwrap())
            .collect();
        if n <= 6 {
            states.extend(exact_states(n)?);
        } else {
            let out = torus_search(n, 7, 8).map_err(|e| e.to_string())?;
            if out.states.is_empty() {
                // Uncertified e2v-maximal runs, reported for context only.
                let p_dev = out
                    .runs
                    .iter()
                    .filter(|r| r.reached_max)
                    .flat_map(|r| {
                        let st = &r.state;
                        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| werner_p(st, i, j)))
                    })
                    .filter_map(|w| w.ok())
                    .map(|w| (w.p - 1.0 / 7.0).abs())
                    .fold(0.0f64, f64::max);
                notes.push(format!(
                    "n = 8: no certified state exists to analyse (see AC10); uncertified e2v-maximal runs give max |p - 1/7| = {p_dev:.1e}"
                ));
                return Err(notes.join("; "));
            }
            states.extend(out.states);
        }
        states.retain(|s| verify_maximal(s).is_valid());
        ensure(!states.is_empty(), || format!("n = {n}: no certified state to analyse"))?;
        let b = bound_comparison(n).map_err(|e| e.to_string())?;
        let p_want = 1.0 / (n as f64 - 1.0);
        for s in &states {
            for i in 1..=n {
                for j in i + 1..=n {
                    let w = werner_p(s, i, j).map_err(|e| format!("n = {n} ({i},{j}): {e}"))?;
                    ensure((w.p - p_want).abs() <= 1e-10, || format!("n = {n} ({i},{j}): p = {}", w.p))?;
                    let c = wootters_concurrence(&s.rdm2(i, j).unwrap()).map_err(|e| e.to_string())?;
                    ensure(c.abs() <= 1e-9, || format!("n = {n} ({i},{j}): concurrence {c}"))?;
                }
            }
        }
        ensure(b.p_exact < b.p_monogamy && b.p_exact < b.p_telecloning, || format!("n = {n}: bounds {b:?}"))?;
        notes.push(format!(
            "n = {n}: {} states, p = {p_want:.6} < bounds ({:.6}, {:.6}), concurrence 0",
            states.len(),
            b.p_telecloning,
            b.p_monogamy
        ));
    }
    Ok(notes)
}

fn ac8() -> Check {
    let b = ring_baseline(4).map_err(|e| e.to_string())?;
    ensure((b.szsz_nn + 1.0 / 6.0).abs() <= 1e-10, || format!("szsz_nn = {}", b.szsz_nn))?;
    ensure((b.nn_entropy - 1.2075).abs() <= 5e-3, || format!("nn entropy {}", b.nn_entropy))?;
    ensure((b.nn_entropy - pair_entropy(-1.0 / 6.0)).abs() <= 1e-9, || "nn entropy vs oracle".into())?;
    let cf = vbent::entanglement::entropy_closed_form(-0.443 / 3.0).map_err(|e| e.to_string())?;
    ensure((cf - pair_entropy(-0.443 / 3.0)).abs() <= 1e-12, || format!("closed form {cf} vs oracle"))?;
    ensure((cf - 1.376).abs() <= 5e-3, || format!("closed form at -0.443/3 = {cf}"))?;
    Ok(vec![format!(
        "szsz_nn = {:.10}, nn entropy = {:.4}, closed form(-0.443/3) = {cf:.4}, all-pair e2v = {:.4}",
        b.szsz_nn, b.nn_entropy, b.e2v_all_pairs
    )])
}

fn ac9() -> Check {
    let mut worst = f64::NEG_INFINITY;
    for n in [4usize, 6, 8] {
        for obj in [Objective::Entropy, Objective::IConcurrence] {
            let w = verify_homogeneity_optimal(n, 10_000, 2024 + n as u64, obj).map_err(|e| e.to_string())?;
            ensure(w.trials == 10_000, || "trial count".into())?;
            ensure(w.passed && w.max_excess <= 1e-9, || format!("n = {n} {obj:?}: excess {:e}", w.max_excess))?;
            worst = worst.max(w.max_excess);
        }
    }
    Ok(vec![format!("6 × 10^4 samples, largest excess over uniform {worst:.3e}")])
}

fn ac10() -> Check {
    let n = 8;
    let first = torus_search(n, 7, 100).map_err(|e| e.to_string())?;
    let second = torus_search(n, 7, 100).map_err(|e| e.to_string())?;
    let s = &first.summary;
    let stats = format!(
        "runs at e2v_max - 1e-7: {}/100, certified: {}, best e2v {:.12} (max {:.12}), best amplitude spread {:.3}",
        s.runs_at_max, s.certified_runs, s.best_e2v, s.e2v_max, s.best_spread
    );
    let same = first.runs.len() == second.runs.len()
        && first
            .runs
            .iter()
            .zip(&second.runs)
            .all(|(a, b)| a.e2v.to_bits() == b.e2v.to_bits() && a.state.amplitudes() == b.state.amplitudes());
    ensure(same, || "two runs with seed 7 differ".into())?;
    ensure(first.states.len() <= 14, || format!("{} states found", first.states.len()))?;
    let good = first
        .states
        .iter()
        .filter(|st| e2v(st).is_ok_and(|v| v >= s.e2v_max - 1e-7) && verify_maximal(st).is_valid())
        .count();
    ensure(good >= 1, || format!("no certified n = 8 state; {stats}"))?;
    Ok(vec![stats, format!("{good} certified states, seed-deterministic")])
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1", "four-qubit maximum and HS state", ac1, Duration::from_secs(1)),
        ("AC2", "six-qubit maximum and named states", ac2, Duration::from_secs(1)),
        ("AC3", "e2v_max monotone, approaches 2", ac3, Duration::from_secs(1)),
        ("AC4", "exact solver counts and spans", ac4, Duration::from_secs(10)),
        ("AC5", "Rumer combinatorics", ac5, Duration::from_secs(5)),
        ("AC6", "IIRHM spectra and ground states", ac6, Duration::from_secs(30)),
        ("AC7", "Werner analysis", ac7, Duration::from_secs(5)),
        ("AC8", "four-site ring baseline", ac8, Duration::from_secs(1)),
        ("AC9", "homogeneity optimality sampling", ac9, Duration::from_secs(60)),
        ("AC10", "torus search at n = 8", ac10, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (id, title, f, limit) in criteria {
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let result = match result {
            Ok(notes) if took > limit => Err(format!(
                "took {:.2} s, limit {} s ({})",
                took.as_secs_f64(),
                limit.as_secs(),
                notes.join("; ")
            )),
            r => r,
        };
        match result {
            Ok(notes) => {
                println!("{id:<5} PASS  {title} [{:.2} s]", took.as_secs_f64());
                for n in notes {
                    println!("        {n}");
                }
            }
            Err(why) => {
                failed += 1;
                println!("{id:<5} FAIL  {title} [{:.2} s]", took.as_secs_f64());
                println!("        {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

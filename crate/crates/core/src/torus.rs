//! Numerical search for maximal states beyond the exact constructions.
//!
//! Every state ψ = M x in the Rumer span is a total singlet, so its pair
//! matrices are isotropic and e2v follows from the closed form in ⟨SᶻSᶻ⟩.
//! Each restart runs projected gradient ascent on e2v over unit x, then a
//! damped Gauss-Newton polish of |ψ_k|² = ‖ψ‖²/d, and certifies the result.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{singlet_count, spin_z};
use crate::entanglement::{e2v_max, entropy_closed_form, entropy_closed_form_derivative};
use crate::error::{Error, Result};
use crate::homogenizer::{verify_maximal_with, MaximalityCertificate, Tolerances};
use crate::linalg::{self, rank_of_columns, CMatrix};
use crate::state::PureState;
use crate::vb::{rumer_map, RumerMap, RANK_TOL};

/// A run hands over to the polish once e2v is this close to the maximum.
pub const ASCENT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_ascent_steps: usize,
    pub max_polish_steps: usize,
    pub tolerances: Tolerances,
}

impl TorusOptions {
    pub fn new(seed: u64, restarts: usize) -> Self {
        Self {
            restarts,
            seed,
            max_ascent_steps: 20_000,
            max_polish_steps: 50,
            tolerances: Tolerances::default(),
        }
    }
}

/// e2v over Rumer coefficients for one n.
pub struct TorusProblem {
    map: RumerMap,
    /// s_i(k)·s_j(k) for every configuration k and pair (i < j), row-major by k.
    signs: Vec<f64>,
    pairs: usize,
}

impl TorusProblem {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) || n > 10 {
            return Err(Error::InvalidSize {
                n,
                reason: "torus search needs an even 4 <= n <= 10",
            });
        }
        let map = rumer_map(n)?;
        let mut signs = Vec::new();
        for &cfg in map.basis.states() {
            for i in 1..=n {
                for j in i + 1..=n {
                    signs.push(spin_z(cfg, i) * spin_z(cfg, j));
                }
            }
        }
        Ok(Self {
            map,
            signs,
            pairs: n * (n - 1) / 2,
        })
    }

    pub fn n(&self) -> usize {
        self.map.n
    }

    pub fn coefficients(&self) -> usize {
        self.map.m.cols()
    }

    pub fn amplitudes(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.map.m.mul_vec(x)
    }

    fn correlations(&self, p: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; self.pairs];
        for (k, &pk) in p.iter().enumerate() {
            let row = &self.signs[k * self.pairs..(k + 1) * self.pairs];
            c.iter_mut().zip(row).for_each(|(cij, s)| *cij += pk * s);
        }
        c
    }

    /// e2v of M x / ‖M x‖.
    pub fn value(&self, x: &[Complex64]) -> f64 {
        let y = self.amplitudes(x);
        let nrm: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        let p: Vec<f64> = y.iter().map(|z| z.norm_sqr() / nrm).collect();
        let c = self.correlations(&p);
        c.iter().map(|&cij| safe_entropy(cij)).sum::<f64>() / self.pairs as f64
    }

    /// e2v and its gradient with respect to (Re x, Im x), packed as a complex
    /// vector whose real and imaginary parts are the two gradient halves.
    pub fn value_and_gradient(&self, x: &[Complex64]) -> (f64, Vec<Complex64>) {
        let y = self.amplitudes(x);
        let nrm: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        let p: Vec<f64> = y.iter().map(|z| z.norm_sqr() / nrm).collect();
        let c = self.correlations(&p);
        let value = c.iter().map(|&cij| safe_entropy(cij)).sum::<f64>() / self.pairs as f64;
        let dc: Vec<f64> = c
            .iter()
            .map(|&cij| entropy_closed_form_derivative(cij) / self.pairs as f64)
            .collect();
        let g: Vec<f64> = (0..p.len())
            .map(|k| {
                let row = &self.signs[k * self.pairs..(k + 1) * self.pairs];
                row.iter().zip(&dc).map(|(s, d)| s * d).sum()
            })
            .collect();
        let gbar: f64 = g.iter().zip(&p).map(|(a, b)| a * b).sum();
        let weighted: Vec<Complex64> = y.iter().zip(&g).map(|(yk, gk)| yk * (gk - gbar)).collect();
        let grad = self
            .map
            .m
            .adjoint()
            .mul_vec(&weighted)
            .into_iter()
            .map(|z| z * (2.0 / nrm))
            .collect();
        (value, grad)
    }

    /// Gradient ascent from x (normalized in place); returns the final e2v.
    pub fn ascend(&self, x: &mut Vec<Complex64>, target: f64, max_steps: usize) -> f64 {
        normalize(x);
        let (mut f, mut grad) = self.value_and_gradient(x);
        let mut step = 1.0;
        for _ in 0..max_steps {
            if f >= target - 1e-13 {
                break;
            }
            let g2: f64 = grad.iter().map(|z| z.norm_sqr()).sum();
            if g2 < 1e-30 {
                break;
            }
            step *= 2.0;
            loop {
                let mut trial: Vec<Complex64> = x.iter().zip(&grad).map(|(a, g)| a + g * step).collect();
                normalize(&mut trial);
                let ft = self.value(&trial);
                if ft >= f + 1e-4 * step * g2 {
                    *x = trial;
                    break;
                }
                step *= 0.5;
                if step < 1e-14 {
                    return f;
                }
            }
            (f, grad) = self.value_and_gradient(x);
        }
        f
    }

    /// Largest | |y_k|²·d/‖y‖² − 1 |.
    pub fn magnitude_spread(&self, x: &[Complex64]) -> f64 {
        let y = self.amplitudes(x);
        let d = y.len() as f64;
        let nrm: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        y.iter()
            .map(|z| (z.norm_sqr() * d / nrm - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Levenberg-Marquardt on r_k = |y_k|² − ‖y‖²/d over (Re x, Im x).
    pub fn polish(&self, x: &mut Vec<Complex64>, max_steps: usize) -> f64 {
        let r_count = self.coefficients();
        let params = 2 * r_count;
        let residual = |x: &[Complex64]| -> Vec<f64> {
            let y = self.amplitudes(x);
            let d = y.len() as f64;
            let nrm: f64 = y.iter().map(|z| z.norm_sqr()).sum();
            y.iter().map(|z| z.norm_sqr() - nrm / d).collect()
        };
        let sq = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
        normalize(x);
        let mut r = residual(x);
        let mut cost = sq(&r);
        let mut mu = 1e-3;
        for _ in 0..max_steps {
            if self.magnitude_spread(x) < 1e-13 {
                break;
            }
            let y = self.amplitudes(x);
            let m = &self.map.m;
            let d = y.len();
            let mut jac = vec![0.0; d * params];
            for k in 0..d {
                for j in 0..r_count {
                    let t = y[k].conj() * m[(k, j)];
                    jac[k * params + j] = 2.0 * t.re;
                    jac[k * params + r_count + j] = -2.0 * t.im;
                }
            }
            for j in 0..params {
                let mean = (0..d).map(|k| jac[k * params + j]).sum::<f64>() / d as f64;
                (0..d).for_each(|k| jac[k * params + j] -= mean);
            }
            let mut jtj = CMatrix::zeros(params, params);
            let mut jtr = vec![Complex64::new(0.0, 0.0); params];
            for a in 0..params {
                for b in a..params {
                    let v: f64 = (0..d).map(|k| jac[k * params + a] * jac[k * params + b]).sum();
                    jtj[(a, b)] = Complex64::new(v, 0.0);
                    jtj[(b, a)] = Complex64::new(v, 0.0);
                }
                jtr[a] = Complex64::new(-(0..d).map(|k| jac[k * params + a] * r[k]).sum::<f64>(), 0.0);
            }
            let scale = (0..params).map(|a| jtj[(a, a)].re).fold(0.0, f64::max).max(1e-300);
            let mut improved = false;
            for _ in 0..30 {
                let mut damped = jtj.clone();
                for a in 0..params {
                    damped[(a, a)] += mu * scale;
                }
                let Ok(delta) = linalg::solve(&damped, &jtr) else {
                    mu *= 4.0;
                    continue;
                };
                let mut trial: Vec<Complex64> = (0..r_count)
                    .map(|j| x[j] + Complex64::new(delta[j].re, delta[r_count + j].re))
                    .collect();
                normalize(&mut trial);
                let rt = residual(&trial);
                let ct = sq(&rt);
                if ct < cost {
                    *x = trial;
                    r = rt;
                    cost = ct;
                    mu = (mu / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        self.magnitude_spread(x)
    }
}

fn safe_entropy(c: f64) -> f64 {
    entropy_closed_form(c.clamp(-0.25, 1.0 / 12.0)).expect("clamped into the domain")
}

fn normalize(x: &mut [Complex64]) {
    let n = linalg::norm(x);
    x.iter_mut().for_each(|z| *z /= n);
}

/// Result of one restart.
#[derive(Debug, Clone)]
pub struct TorusRun {
    pub restart: usize,
    /// e2v of `state`.
    pub e2v: f64,
    pub reached_max: bool,
    /// Relative |amplitude|² spread of `state`.
    pub spread: f64,
    /// Spread reached by the polish, when it ran.
    pub polished_spread: Option<f64>,
    /// The polished state when it certifies, otherwise the ascent output.
    pub state: PureState,
    pub certificate: Option<MaximalityCertificate>,
}

impl TorusRun {
    pub fn certified(&self) -> bool {
        self.certificate.as_ref().is_some_and(|c| c.is_valid())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TorusSummary {
    pub n: usize,
    pub seed: u64,
    pub restarts: usize,
    pub e2v_max: f64,
    /// Runs whose ascent reached e2v_max − 1e-7.
    pub runs_at_max: usize,
    /// Runs at the maximum whose pair correlations are all equal.
    pub correlation_homogeneous_runs: usize,
    pub certified_runs: usize,
    /// Linearly independent certified states kept.
    pub independent: usize,
    pub singlet_count: usize,
    pub best_e2v: f64,
    /// Smallest |amplitude|² spread the polish reached.
    pub best_spread: f64,
}

#[derive(Debug, Clone)]
pub struct TorusOutcome {
    pub summary: TorusSummary,
    /// Independent certified states, in restart order.
    pub states: Vec<PureState>,
    pub certificates: Vec<MaximalityCertificate>,
    pub runs: Vec<TorusRun>,
}

pub fn run_restart(problem: &TorusProblem, opts: &TorusOptions, restart: usize) -> TorusRun {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(restart as u64);
    let mut x: Vec<Complex64> = (0..problem.coefficients())
        .map(|_| {
            Complex64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    let target = e2v_max(problem.n()).expect("validated n");
    let e2v = problem.ascend(&mut x, target, opts.max_ascent_steps);
    let reached_max = e2v >= target - ASCENT_TOL;
    let to_state = |x: &[Complex64]| {
        PureState::new(problem.map.basis.clone(), problem.amplitudes(x))
            .expect("Rumer combination of a unit vector is nonzero")
            .gauge_fixed()
    };
    let mut run = TorusRun {
        restart,
        e2v,
        reached_max,
        spread: problem.magnitude_spread(&x),
        polished_spread: None,
        state: to_state(&x),
        certificate: None,
    };
    if reached_max {
        let mut polished = x.clone();
        let spread = problem.polish(&mut polished, opts.max_polish_steps);
        run.polished_spread = Some(spread);
        let state = to_state(&polished);
        let cert = verify_maximal_with(&state, &opts.tolerances);
        if cert.is_valid() {
            run.e2v = problem.value(&polished);
            run.spread = spread;
            run.state = state;
            run.certificate = Some(cert);
        } else {
            run.certificate = Some(verify_maximal_with(&run.state, &opts.tolerances));
        }
    }
    run
}

/// Runs the restarts in parallel and keeps the certified states that are
/// linearly independent, in restart order. Deterministic for a given seed.
pub fn torus_search(n: usize, seed: u64, restarts: usize) -> Result<TorusOutcome> {
    torus_search_with(n, &TorusOptions::new(seed, restarts))
}

pub fn torus_search_with(n: usize, opts: &TorusOptions) -> Result<TorusOutcome> {
    let problem = TorusProblem::new(n)?;
    let runs: Vec<TorusRun> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| run_restart(&problem, opts, r))
        .collect();
    let limit = singlet_count(n);
    let mut states = Vec::new();
    let mut certificates = Vec::new();
    let mut columns: Vec<Vec<Complex64>> = Vec::new();
    for run in runs.iter().filter(|r| r.certified()) {
        if states.len() == limit {
            break;
        }
        columns.push(run.state.amplitudes().to_vec());
        if rank_of_columns(&columns, RANK_TOL) == columns.len() {
            states.push(run.state.clone());
            certificates.push(run.certificate.clone().expect("certified run"));
        } else {
            columns.pop();
        }
    }
    let summary = TorusSummary {
        n,
        seed: opts.seed,
        restarts: opts.restarts,
        e2v_max: e2v_max(n)?,
        runs_at_max: runs.iter().filter(|r| r.reached_max).count(),
        correlation_homogeneous_runs: runs
            .iter()
            .filter(|r| r.certificate.as_ref().is_some_and(|c| c.flags.correlation_homogeneous))
            .count(),
        certified_runs: runs.iter().filter(|r| r.certified()).count(),
        independent: states.len(),
        singlet_count: limit,
        best_e2v: runs.iter().map(|r| r.e2v).fold(f64::NEG_INFINITY, f64::max),
        best_spread: runs
            .iter()
            .filter_map(|r| r.polished_spread)
            .fold(f64::INFINITY, f64::min),
    };
    Ok(TorusOutcome {
        summary,
        states,
        certificates,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::e2v;

    fn random_x(p: &TorusProblem, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..p.coefficients())
            .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect()
    }

    #[test]
    fn value_matches_partial_trace() {
        for n in [4, 6, 8] {
            let p = TorusProblem::new(n).unwrap();
            let x = random_x(&p, n as u64);
            let s = PureState::new(p.map.basis.clone(), p.amplitudes(&x)).unwrap();
            assert!((p.value(&x) - e2v(&s).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let p = TorusProblem::new(6).unwrap();
        let x = random_x(&p, 9);
        let (_, g) = p.value_and_gradient(&x);
        let h = 1e-6;
        for j in 0..p.coefficients() {
            for (dir, want) in [(Complex64::new(h, 0.0), g[j].re), (Complex64::new(0.0, h), g[j].im)] {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += dir;
                xm[j] -= dir;
                let fd = (p.value(&xp) - p.value(&xm)) / (2.0 * h);
                assert!((fd - want).abs() < 1e-6 * (1.0 + want.abs()), "j={j}: {fd} vs {want}");
            }
        }
    }

    #[test]
    fn four_sites_mostly_certified() {
        let out = torus_search(4, 5, 20).unwrap();
        assert!(out.summary.certified_runs >= 18, "{:?}", out.summary);
        assert_eq!(out.states.len(), 2);
    }

    #[test]
    fn deterministic() {
        let a = torus_search(4, 3, 6).unwrap();
        let b = torus_search(4, 3, 6).unwrap();
        for (x, y) in a.runs.iter().zip(&b.runs) {
            assert_eq!(x.state.amplitudes(), y.state.amplitudes());
        }
    }

    #[test]
    fn rejects_sizes() {
        assert!(TorusProblem::new(12).is_err());
        assert!(TorusProblem::new(5).is_err());
    }
}

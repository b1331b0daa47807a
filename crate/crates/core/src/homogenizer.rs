//! Maximal pair-entanglement states: certification and the two exact
//! constructions for n = 4 and n = 6.
//!
//! Route A starts from the Rumer span and asks for equal-magnitude
//! amplitudes. Route B starts from an equal-magnitude ansatz and asks for
//! annihilation by Σᵢ S⁺ᵢ. Both end in a [`PhasorSystem`].

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{is_up, sector_basis, singlet_count, SectorBasis};
use crate::entanglement::{e2v, e2v_max, homogeneous_correlation};
use crate::error::{Error, Result};
use crate::linalg::{self, rank_of_columns};
use crate::phasor::{solve_phasor_system, PhasorFamily, PhasorSystem};
use crate::state::PureState;
use crate::vb::{rumer_map, RumerMap, RANK_TOL};

/// Certificate thresholds; overridable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// ‖S±_tot ψ‖ for unit ψ.
    pub isotropy: f64,
    /// Relative spread of |amplitude| about its mean.
    pub homogeneity: f64,
    pub flip_parity: f64,
    /// |e2v − e2v_max|.
    pub e2v: f64,
    /// |⟨SᶻᵢSᶻⱼ⟩ + 1/(4(n − 1))|.
    pub correlation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            isotropy: 1e-10,
            homogeneity: 1e-9,
            flip_parity: 1e-9,
            e2v: 1e-9,
            correlation: 1e-9,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 5] =
        ["isotropy", "homogeneity", "flip_parity", "e2v", "correlation"];

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Parse(format!("tolerance {key}={value} must be positive")));
        }
        let slot = match key {
            "isotropy" => &mut self.isotropy,
            "homogeneity" => &mut self.homogeneity,
            "flip_parity" => &mut self.flip_parity,
            "e2v" => &mut self.e2v,
            "correlation" => &mut self.correlation,
            _ => {
                return Err(Error::Parse(format!(
                    "unknown tolerance '{key}' (expected one of {})",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFlags {
    pub is_sz0: bool,
    pub is_isotropic: bool,
    pub is_homogeneous: bool,
    pub flip_parity_ok: bool,
    pub e2v_equals_max: bool,
    /// Every pair at ⟨SᶻSᶻ⟩ = −1/(4(n − 1)); informational, not part of validity.
    pub correlation_homogeneous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateResiduals {
    pub sp_norm: f64,
    pub sm_norm: f64,
    pub amplitude_spread: f64,
    pub min_amplitude_ratio: f64,
    pub flip_parity: f64,
    pub e2v_gap: f64,
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalityCertificate {
    pub n: usize,
    pub flags: CertificateFlags,
    pub residuals: CertificateResiduals,
    pub e2v: Option<f64>,
    pub e2v_max: Option<f64>,
}

impl MaximalityCertificate {
    pub fn is_valid(&self) -> bool {
        let f = &self.flags;
        f.is_sz0 && f.is_isotropic && f.is_homogeneous && f.flip_parity_ok && f.e2v_equals_max
    }
}

pub fn verify_maximal(state: &PureState) -> MaximalityCertificate {
    verify_maximal_with(state, &Tolerances::default())
}

pub fn verify_maximal_with(state: &PureState, tol: &Tolerances) -> MaximalityCertificate {
    let n = state.n();
    let unit = state.normalized();
    let is_sz0 = state.basis().is_sz0();
    let amp = unit.amplitudes();

    let mags: Vec<f64> = amp.iter().map(|z| z.norm()).collect();
    let mean = mags.iter().sum::<f64>() / mags.len() as f64;
    let spread = mags.iter().map(|m| (m - mean).abs()).fold(0.0, f64::max) / mean;
    let min_ratio = mags.iter().copied().fold(f64::INFINITY, f64::min) / mean;

    let ladder = |raise: bool| {
        let v = unit.as_vector();
        let r = if raise { v.apply_sp_total() } else { v.apply_sm_total() };
        r.map_or(f64::INFINITY, |w| w.norm())
    };
    let (sp_norm, sm_norm) = if is_sz0 { (ladder(true), ladder(false)) } else { (f64::INFINITY, f64::INFINITY) };

    let flip = if is_sz0 { flip_parity_residual(&unit) } else { f64::INFINITY };
    let e2v_val = if is_sz0 { e2v(&unit).ok() } else { None };
    let e2v_max_val = if is_sz0 { e2v_max(n).ok() } else { None };
    let gap = match (e2v_val, e2v_max_val) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => f64::INFINITY,
    };
    let correlation = if is_sz0 && n >= 4 {
        let target = homogeneous_correlation(n);
        let mut worst: f64 = 0.0;
        for i in 1..=n {
            for j in i + 1..=n {
                worst = worst.max((unit.szsz(i, j).expect("valid pair") - target).abs());
            }
        }
        worst
    } else {
        f64::INFINITY
    };

    MaximalityCertificate {
        n,
        flags: CertificateFlags {
            is_sz0,
            is_isotropic: sp_norm <= tol.isotropy && sm_norm <= tol.isotropy,
            // Full support: no amplitude may vanish, so the spread bound alone decides.
            is_homogeneous: spread <= tol.homogeneity,
            flip_parity_ok: flip <= tol.flip_parity,
            e2v_equals_max: gap <= tol.e2v,
            correlation_homogeneous: correlation <= tol.correlation,
        },
        residuals: CertificateResiduals {
            sp_norm,
            sm_norm,
            amplitude_spread: spread,
            min_amplitude_ratio: min_ratio,
            flip_parity: flip,
            e2v_gap: gap,
            correlation,
        },
        e2v: e2v_val,
        e2v_max: e2v_max_val,
    }
}

/// max_k |a(flip k) − (−1)^{n/2} a(k)| relative to max |a|.
fn flip_parity_residual(state: &PureState) -> f64 {
    let basis = state.basis();
    let sign = flip_sign(basis.n());
    let scale = state.amplitudes().iter().map(|z| z.norm()).fold(0.0, f64::max);
    basis
        .states()
        .iter()
        .map(|&c| (state.amplitude(basis.flip(c)) - state.amplitude(c) * sign).norm())
        .fold(0.0, f64::max)
        / scale
}

fn flip_sign(n: usize) -> f64 {
    if (n / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Half of the sector: configurations with site 1 up. Their amplitudes fix
/// the rest through amplitude(flip k) = (−1)^{n/2} amplitude(k).
#[derive(Debug, Clone)]
pub struct FlipReduced {
    pub basis: Arc<SectorBasis>,
    pub reps: Vec<u32>,
}

impl FlipReduced {
    pub fn new(n: usize) -> Result<Self> {
        let basis = sector_basis(n)?;
        let reps = basis.states().iter().copied().filter(|&c| is_up(c, 1)).collect();
        Ok(Self { basis, reps })
    }

    /// Representative index and sign of a sector configuration.
    pub fn locate(&self, cfg: u32) -> (usize, f64) {
        let n = self.basis.n();
        let (rep, sign) = if is_up(cfg, 1) {
            (cfg, 1.0)
        } else {
            (self.basis.flip(cfg), flip_sign(n))
        };
        let k = self.reps.binary_search(&rep).expect("representative exists");
        (k, sign)
    }

    /// Full sector amplitudes from representative values.
    pub fn expand(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.basis
            .states()
            .iter()
            .map(|&c| {
                let (k, s) = self.locate(c);
                z[k] * s
            })
            .collect()
    }
}

/// The Σᵢ S⁺ᵢ annihilation conditions on the flip-paired unit-modulus ansatz:
/// one row per configuration of the (n/2 + 1)-up sector, integer coefficients
/// over the representatives.
pub fn isotropy_equations(n: usize) -> Result<(FlipReduced, Vec<Vec<i32>>)> {
    let red = FlipReduced::new(n)?;
    let target = SectorBasis::new(n, n / 2 + 1)?;
    let rows = target
        .states()
        .iter()
        .map(|&t| {
            let mut row = vec![0i32; red.reps.len()];
            for site in (1..=n).filter(|&s| is_up(t, s)) {
                let (k, s) = red.locate(t ^ (1 << (site - 1)));
                row[k] += s as i32;
            }
            row
        })
        .collect();
    Ok((red, rows))
}

/// Indices of a maximal linearly independent subset of rows, greedy in order.
pub fn independent_rows(rows: &[Vec<i32>]) -> Vec<usize> {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let mut v: Vec<f64> = row.iter().map(|&x| x as f64).collect();
        for (b, &p) in kept.iter().zip(&pivots) {
            let f = v[p] / b[p];
            if f != 0.0 {
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= f * y);
            }
        }
        if let Some((p, _)) = v
            .iter()
            .enumerate()
            .filter(|(_, x)| x.abs() > 1e-9)
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        {
            kept.push(v);
            pivots.push(p);
            out.push(r);
        }
    }
    out
}

fn phasor_system_from_rows(unknowns: usize, rows: &[Vec<i32>]) -> Result<PhasorSystem> {
    let equations = rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(k, &c)| {
                    if c.abs() != 1 {
                        Err(Error::Unsupported(format!("coefficient {c} in phasor equation")))
                    } else {
                        Ok((c as i8, k))
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PhasorSystem::new(unknowns, equations)
}

/// The reduced route-B system: independent rows of [`isotropy_equations`].
pub fn isotropy_phasor_system(n: usize) -> Result<(FlipReduced, PhasorSystem)> {
    let (red, rows) = isotropy_equations(n)?;
    let keep: Vec<Vec<i32>> = independent_rows(&rows).into_iter().map(|r| rows[r].clone()).collect();
    let sys = phasor_system_from_rows(red.reps.len(), &keep)?;
    Ok((red, sys))
}

fn check_exact_size(n: usize) -> Result<()> {
    if n == 4 || n == 6 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "exact construction covers n = 4 and n = 6, not n = {n}; use the torus search"
        )))
    }
}

/// Route B: equal-magnitude ansatz made isotropic.
pub fn isotropize_homogeneous(n: usize, seed: u64) -> Result<Vec<PureState>> {
    check_exact_size(n)?;
    let (red, sys) = isotropy_phasor_system(n)?;
    let families = solve_phasor_system(&sys)?;
    collect_certified(n, &families, seed, |z| Ok(Some(red.expand(z))))
}

/// Minimum-weight ±1 vectors y with yᵀM′ = 0, M′ the representative rows of
/// the Rumer map, kept while linearly independent.
pub fn rumer_left_null_rows(map: &RumerMap, red: &FlipReduced) -> Result<Vec<Vec<i32>>> {
    let rows: Vec<&[Complex64]> = red
        .reps
        .iter()
        .map(|&c| map.m.row(map.basis.index_of(c).expect("rep in sector")))
        .collect();
    let d = rows.len();
    let r = map.m.cols();
    let need = d - map.rank;
    let mut found: Vec<Vec<i32>> = Vec::new();
    for weight in 2..=d {
        for subset in combinations(d, weight) {
            // First coefficient fixed at +1; the rest range over signs.
            for signs in 0u32..(1 << (weight - 1)) {
                let mut y = vec![0i32; d];
                for (t, &k) in subset.iter().enumerate() {
                    y[k] = if t > 0 && signs >> (t - 1) & 1 == 1 { -1 } else { 1 };
                }
                let null = (0..r).all(|j| {
                    subset
                        .iter()
                        .map(|&k| rows[k][j] * y[k] as f64)
                        .sum::<Complex64>()
                        .norm()
                        < 1e-9
                });
                if !null {
                    continue;
                }
                let mut trial = found.clone();
                trial.push(y.clone());
                if independent_rows(&trial).len() == trial.len() {
                    found = trial;
                    if found.len() == need {
                        return Ok(found);
                    }
                }
            }
        }
        if weight > 4 {
            break;
        }
    }
    Err(Error::Unsupported(format!(
        "left null space of the n = {} Rumer map needs equations with more than four terms",
        map.n
    )))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Route A: Rumer-span superpositions made equal in magnitude.
pub fn homogenize_isotropic(n: usize, seed: u64) -> Result<Vec<PureState>> {
    check_exact_size(n)?;
    let map = rumer_map(n)?;
    let red = FlipReduced::new(n)?;
    let rows = rumer_left_null_rows(&map, &red)?;
    let sys = phasor_system_from_rows(red.reps.len(), &rows)?;
    let families = solve_phasor_system(&sys)?;
    let normal = map.m.adjoint().matmul(&map.m);
    collect_certified(n, &families, seed, |z| {
        let target = red.expand(z);
        let rhs = map.m.adjoint().mul_vec(&target);
        let x = linalg::solve(&normal, &rhs)?;
        let y = map.combine(&x)?;
        let miss = y.iter().zip(&target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        Ok((miss <= 1e-9).then_some(y))
    })
}

/// Rumer coefficients x with M x = ψ, by least squares.
pub fn rumer_coefficients(map: &RumerMap, state: &PureState) -> Result<Vec<Complex64>> {
    let normal = map.m.adjoint().matmul(&map.m);
    linalg::solve(&normal, &map.m.adjoint().mul_vec(state.amplitudes()))
}

/// Evaluates each family on a π/2 grid of free phases (first component fixed
/// at 0) and at one random phase set, certifies the states, and keeps a
/// linearly independent set up to the singlet count.
fn collect_certified<F>(n: usize, families: &[PhasorFamily], seed: u64, build: F) -> Result<Vec<PureState>>
where
    F: Fn(&[Complex64]) -> Result<Option<Vec<Complex64>>>,
{
    let basis = sector_basis(n)?;
    let limit = singlet_count(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept: Vec<PureState> = Vec::new();
    let mut columns: Vec<Vec<Complex64>> = Vec::new();
    for fam in families {
        let free = fam.parameters();
        let mut candidates: Vec<Vec<f64>> = (0..4usize.pow(free as u32))
            .map(|code| {
                let mut phases = vec![0.0];
                phases.extend((0..free).map(|t| (code / 4usize.pow(t as u32) % 4) as f64 * PI / 2.0));
                phases
            })
            .collect();
        if free > 0 {
            let mut phases = vec![0.0];
            phases.extend((0..free).map(|_| rng.random::<f64>() * 2.0 * PI));
            candidates.push(phases);
        }
        for phases in candidates {
            let z = fam.evaluate(&phases)?;
            let Some(amp) = build(&z)? else { continue };
            let state = PureState::new(basis.clone(), amp)?.gauge_fixed();
            if !verify_maximal(&state).is_valid() {
                continue;
            }
            columns.push(state.amplitudes().to_vec());
            if rank_of_columns(&columns, RANK_TOL) == columns.len() {
                kept.push(state);
                if kept.len() == limit {
                    return Ok(kept);
                }
            } else {
                columns.pop();
            }
        }
    }
    Ok(kept)
}

/// Numerical rank of a set of states' amplitude vectors.
pub fn state_set_rank(states: &[PureState]) -> usize {
    let cols: Vec<Vec<Complex64>> = states.iter().map(|s| s.amplitudes().to_vec()).collect();
    rank_of_columns(&cols, RANK_TOL)
}

/// Whether two state sets span the same subspace.
pub fn same_span(a: &[PureState], b: &[PureState]) -> bool {
    let ra = state_set_rank(a);
    let rb = state_set_rank(b);
    let both: Vec<PureState> = a.iter().chain(b).cloned().collect();
    ra == rb && state_set_rank(&both) == ra
}

/// Which exact construction to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    HomogenizeIsotropic,
    IsotropizeHomogeneous,
}

pub fn solve_exact(n: usize, route: Route, seed: u64) -> Result<Vec<PureState>> {
    match route {
        Route::HomogenizeIsotropic => homogenize_isotropic(n, seed),
        Route::IsotropizeHomogeneous => isotropize_homogeneous(n, seed),
    }
}

/// Checks the Rumer coefficients of a state reproduce it (span membership).
pub fn in_rumer_span(state: &PureState) -> Result<bool> {
    let map = rumer_map(state.n())?;
    let x = rumer_coefficients(&map, state)?;
    let y = map.combine(&x)?;
    let miss = y
        .iter()
        .zip(state.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(miss <= 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vb::{enumerate_rumer, vb_state, Orientation};

    #[test]
    fn isotropy_equation_shapes() {
        let (red, rows) = isotropy_equations(6).unwrap();
        assert_eq!(red.reps.len(), 10);
        assert_eq!(rows.len(), 15);
        assert!(rows.iter().all(|r| r.iter().filter(|&&c| c != 0).count() == 4));
        assert_eq!(independent_rows(&rows).len(), 5);
        let (red, rows) = isotropy_equations(4).unwrap();
        assert_eq!(red.reps.len(), 3);
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.iter().filter(|&&c| c != 0).count() == 3));
        assert_eq!(independent_rows(&rows).len(), 1);
    }

    #[test]
    fn four_site_routes() {
        let b = isotropize_homogeneous(4, 1).unwrap();
        let a = homogenize_isotropic(4, 1).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(b.len(), 2);
        assert!(same_span(&a, &b));
        // The pair is a state and its conjugate (up to phase).
        let ov = b[0].inner(&b[1].conj()).unwrap().norm();
        assert!((ov - 1.0).abs() < 1e-12);
    }

    #[test]
    fn six_site_routes() {
        let a = homogenize_isotropic(6, 2).unwrap();
        let b = isotropize_homogeneous(6, 2).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(b.len(), 5);
        assert_eq!(state_set_rank(&a), 5);
        assert!(same_span(&a, &b));
        for s in a.iter().chain(&b) {
            assert!(verify_maximal(s).is_valid());
            assert!(in_rumer_span(s).unwrap());
        }
    }

    #[test]
    fn left_null_rows_have_minimum_weight() {
        let map = rumer_map(6).unwrap();
        let red = FlipReduced::new(6).unwrap();
        let rows = rumer_left_null_rows(&map, &red).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.iter().filter(|&&c| c != 0).count() == 4));
    }

    #[test]
    fn vb_product_certificate() {
        let m = &enumerate_rumer(4).unwrap()[0];
        let s = vb_state(m, Orientation::Ascending).unwrap();
        let c = verify_maximal(&s);
        assert!(c.flags.is_isotropic && c.flags.is_sz0 && c.flags.flip_parity_ok);
        assert!(!c.flags.is_homogeneous && !c.is_valid());
        assert!((c.residuals.min_amplitude_ratio).abs() < 1e-15);
    }

    #[test]
    fn exact_routes_reject_other_sizes() {
        for n in [2, 8, 10] {
            assert!(matches!(homogenize_isotropic(n, 0), Err(Error::Unsupported(_))));
            assert!(matches!(isotropize_homogeneous(n, 0), Err(Error::Unsupported(_))));
        }
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("homogeneity", 1e-6).unwrap();
        assert_eq!(t.homogeneity, 1e-6);
        assert!(t.set("bogus", 1.0).is_err());
        assert!(t.set("e2v", -1.0).is_err());
    }
}

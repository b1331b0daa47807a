//! Heisenberg Hamiltonians on the Sᶻ = 0 sector: the infinite-range model
//! with J = J⋆/(n − 1), and nearest-neighbour rings and open chains.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{binomial, sector_basis, singlet_count, spin_z};
use crate::entanglement::{e2v, entropy};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_eigvals, CMatrix};
use crate::state::{PureState, SectorVector};
use crate::vb::vb_state_from_bonds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Iirhm,
    #[serde(rename = "heisenberg_ring")]
    Ring,
    Chain,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iirhm" => Ok(Model::Iirhm),
            "ring" | "heisenberg_ring" => Ok(Model::Ring),
            "chain" => Ok(Model::Chain),
            _ => Err(Error::Parse(format!("unknown model '{s}' (iirhm, ring, chain)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n: usize,
    pub model: Model,
    pub j_star: f64,
}

impl HamiltonianSpec {
    pub fn new(n: usize, model: Model, j_star: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) || n > 12 {
            return Err(Error::InvalidSize {
                n,
                reason: "Hamiltonians need an even 4 <= n <= 12",
            });
        }
        if !j_star.is_finite() || j_star == 0.0 {
            return Err(Error::Domain(format!("coupling J* = {j_star} must be finite and nonzero")));
        }
        Ok(Self { n, model, j_star })
    }

    /// Pair coupling: J⋆/(n − 1) for the infinite-range model, J⋆ otherwise.
    pub fn j(&self) -> f64 {
        match self.model {
            Model::Iirhm => self.j_star / (self.n as f64 - 1.0),
            Model::Ring | Model::Chain => self.j_star,
        }
    }

    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        match self.model {
            Model::Iirhm => (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect(),
            Model::Ring => (1..=n).map(|i| (i, i % n + 1)).collect(),
            Model::Chain => (1..n).map(|i| (i, i + 1)).collect(),
        }
    }

    /// H ψ without forming the matrix.
    pub fn apply(&self, state: &PureState) -> Result<SectorVector> {
        let mut v = state.as_vector().apply_bond_sum(&self.bonds())?;
        let j = self.j();
        v.amp.iter_mut().for_each(|z| *z *= j);
        Ok(v)
    }
}

/// (J/2)[S(S + 1) − 3n/4].
pub fn iirhm_energy(spec: &HamiltonianSpec, s_total: usize) -> f64 {
    let s = s_total as f64;
    0.5 * spec.j() * (s * (s + 1.0) - 0.75 * spec.n as f64)
}

/// Sᶻ = 0 sector multiplicity of total spin S: C(n, n/2 − S) − C(n, n/2 − S − 1).
pub fn sector_multiplicity(n: usize, s_total: usize) -> usize {
    let half = n / 2;
    if s_total > half {
        return 0;
    }
    let lower = if s_total < half { binomial(n, half - s_total - 1) } else { 0 };
    binomial(n, half - s_total) - lower
}

fn matrix_of(n: usize, bonds: &[(usize, usize)], weight: f64, diag: f64) -> Result<CMatrix> {
    let basis = sector_basis(n)?;
    let d = basis.dim();
    let mut h = CMatrix::zeros(d, d);
    for (k, &cfg) in basis.states().iter().enumerate() {
        h[(k, k)] += Complex64::new(diag, 0.0);
        for &(i, j) in bonds {
            h[(k, k)] += Complex64::new(weight * spin_z(cfg, i) * spin_z(cfg, j), 0.0);
            if (cfg >> (i - 1) & 1) != (cfg >> (j - 1) & 1) {
                let t = cfg ^ (1 << (i - 1)) ^ (1 << (j - 1));
                let idx = basis.index_of(t).expect("swap stays in sector");
                h[(idx, k)] += Complex64::new(0.5 * weight, 0.0);
            }
        }
    }
    Ok(h)
}

/// S²_tot on the Sᶻ = 0 sector.
pub fn s2_matrix(n: usize) -> Result<CMatrix> {
    let all: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    matrix_of(n, &all, 2.0, 0.75 * n as f64)
}

/// Sector matrix of the Hamiltonian. The infinite-range model is checked
/// against (J/2)(S²_tot − 3n/4).
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<CMatrix> {
    let h = matrix_of(spec.n, &spec.bonds(), spec.j(), 0.0)?;
    if spec.model == Model::Iirhm {
        let s2 = s2_matrix(spec.n)?;
        let d = s2.rows();
        let alt = s2
            .sub(&CMatrix::identity(d).scale(Complex64::new(0.75 * spec.n as f64, 0.0)))
            .scale(Complex64::new(0.5 * spec.j(), 0.0));
        let dev = h.sub(&alt).max_abs();
        if dev > 1e-12 * spec.j().abs().max(1.0) {
            return Err(Error::Internal(format!(
                "pair-sum Hamiltonian differs from (J/2)(S^2 - 3n/4) by {dev:e}"
            )));
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
    pub s_t: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub model: Model,
    pub n: usize,
    pub j_star: f64,
    pub levels: Vec<Level>,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
}

/// Full sector diagonalization with total-spin labels. Degenerate clusters
/// are split by diagonalizing S² inside the cluster, so accidental
/// degeneracies across different S still get correct labels.
pub fn spectrum(spec: &HamiltonianSpec) -> Result<SpectrumReport> {
    let h = build_hamiltonian(spec)?;
    let s2 = s2_matrix(spec.n)?;
    let eig = hermitian_eig(&h)?;
    let vecs = eig.eigenvectors.as_ref().expect("eigenvectors requested");
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let cluster_tol = 1e-8 * scale;

    let mut levels: Vec<Level> = Vec::new();
    let mut start = 0;
    let vals = &eig.eigenvalues;
    while start < vals.len() {
        let mut end = start + 1;
        while end < vals.len() && vals[end] - vals[end - 1] <= cluster_tol {
            end += 1;
        }
        let energy = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        let cols: Vec<Vec<Complex64>> = (start..end).map(|k| vecs.column(k)).collect();
        let v = CMatrix::from_columns(&cols);
        let inner = v.adjoint().matmul(&s2).matmul(&v);
        let mut labels: Vec<usize> = Vec::new();
        for ev in hermitian_eigvals(&inner)? {
            let s = ((-1.0 + (1.0 + 4.0 * ev.max(0.0)).sqrt()) / 2.0).round();
            if (s * (s + 1.0) - ev).abs() > 1e-6 {
                return Err(Error::Internal(format!("S^2 eigenvalue {ev} is not S(S+1)")));
            }
            labels.push(s as usize);
        }
        labels.sort_unstable();
        for s in labels {
            match levels.last_mut() {
                Some(l) if l.s_t == s && (l.energy - energy).abs() <= cluster_tol => l.multiplicity += 1,
                _ => levels.push(Level {
                    energy,
                    multiplicity: 1,
                    s_t: s,
                }),
            }
        }
        start = end;
    }

    if spec.model == Model::Iirhm {
        check_iirhm_levels(spec, &levels)?;
    }
    let ground_energy = vals[0];
    let ground_degeneracy = vals.iter().filter(|&&e| e - ground_energy <= cluster_tol).count();
    Ok(SpectrumReport {
        model: spec.model,
        n: spec.n,
        j_star: spec.j_star,
        levels,
        ground_energy,
        ground_degeneracy,
    })
}

fn check_iirhm_levels(spec: &HamiltonianSpec, levels: &[Level]) -> Result<()> {
    for l in levels {
        let want = iirhm_energy(spec, l.s_t);
        if (l.energy - want).abs() > 1e-10 * spec.j().abs().max(1.0) {
            return Err(Error::Internal(format!(
                "level S = {} at {} differs from the analytic {}",
                l.s_t, l.energy, want
            )));
        }
        if l.multiplicity != sector_multiplicity(spec.n, l.s_t) {
            return Err(Error::Internal(format!(
                "level S = {} has multiplicity {} instead of {}",
                l.s_t,
                l.multiplicity,
                sector_multiplicity(spec.n, l.s_t)
            )));
        }
    }
    let total: usize = levels.iter().map(|l| l.multiplicity).sum();
    if total != binomial(spec.n, spec.n / 2) {
        return Err(Error::Internal("levels do not cover the sector".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundCheck {
    pub is_ground: bool,
    pub residual: f64,
    pub energy: f64,
    pub ground_energy: f64,
}

/// ‖Hψ − E₀ψ‖ ≤ 1e-10·‖H‖ for unit ψ. The infinite-range ground energy is
/// −3nJ/8 and ‖H‖ its largest |level|; other models are diagonalized.
pub fn is_ground_state(spec: &HamiltonianSpec, state: &PureState) -> Result<GroundCheck> {
    if state.n() != spec.n || !state.basis().is_sz0() {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            got: state.n(),
        });
    }
    let (e0, op_norm) = match spec.model {
        Model::Iirhm => {
            let e0 = iirhm_energy(spec, 0);
            let top = iirhm_energy(spec, spec.n / 2);
            (e0, e0.abs().max(top.abs()))
        }
        _ => {
            let vals = hermitian_eigvals(&build_hamiltonian(spec)?)?;
            let norm = vals.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            (vals[0], norm)
        }
    };
    let unit = state.normalized();
    let hv = spec.apply(&unit)?;
    let energy = crate::linalg::dot(unit.amplitudes(), &hv.amp).re;
    let residual = hv
        .amp
        .iter()
        .zip(unit.amplitudes())
        .map(|(h, a)| (h - a * e0).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(GroundCheck {
        is_ground: residual <= 1e-10 * op_norm,
        residual,
        energy,
        ground_energy: e0,
    })
}

/// ‖(Σ_bonds Sᵢ·Sⱼ) ψ‖ for ψ the product of singlets on `singlets`.
pub fn bond_sum_residual(singlets: &[(usize, usize)], bonds: &[(usize, usize)]) -> Result<f64> {
    let n = 2 * singlets.len();
    let psi = vb_state_from_bonds(n, singlets)?;
    Ok(psi.as_vector().apply_bond_sum(bonds)?.norm())
}

/// The cross-bond sum S₁·S₃ + S₂·S₄ + S₁·S₄ + S₂·S₃ annihilates the singlet
/// product on (1,2),(3,4).
pub fn four_site_identity_check() -> bool {
    bond_sum_residual(&[(1, 2), (3, 4)], &[(1, 3), (2, 4), (1, 4), (2, 3)])
        .is_ok_and(|r| r <= 1e-12)
}

/// Ground state and correlations of the 4-site nearest-neighbour model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingBaseline {
    pub model: Model,
    pub ground_energy: f64,
    pub ground_state: Vec<(String, f64)>,
    pub szsz_nn: f64,
    pub szsz_nnn: f64,
    pub nn_entropy: f64,
    pub pair_entropies: Vec<((usize, usize), f64)>,
    pub e2v_all_pairs: f64,
    pub commutator_sz: f64,
    pub commutator_s2: f64,
}

pub fn ring_baseline(n: usize) -> Result<RingBaseline> {
    baseline(n, Model::Ring)
}

/// Same report for the open chain.
pub fn chain_baseline(n: usize) -> Result<RingBaseline> {
    baseline(n, Model::Chain)
}

fn baseline(n: usize, model: Model) -> Result<RingBaseline> {
    if n != 4 {
        return Err(Error::Unsupported("the baseline is defined for n = 4".into()));
    }
    let spec = HamiltonianSpec::new(n, model, 1.0)?;
    let h = build_hamiltonian(&spec)?;
    let eig = hermitian_eig(&h)?;
    if eig.eigenvalues[1] - eig.eigenvalues[0] < 1e-8 {
        return Err(Error::Internal("degenerate 4-site ground state".into()));
    }
    let basis = sector_basis(n)?;
    let v = eig.eigenvector(0).expect("eigenvectors requested");
    let ground = PureState::new(basis.clone(), v)?.gauge_fixed();
    let mut pair_entropies = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            pair_entropies.push(((i, j), entropy(&ground.rdm2(i, j)?)?));
        }
    }
    let (commutator_sz, commutator_s2) = full_space_commutators(&spec)?;
    Ok(RingBaseline {
        model,
        ground_energy: eig.eigenvalues[0],
        ground_state: basis
            .states()
            .iter()
            .zip(ground.amplitudes())
            .map(|(&c, a)| (crate::basis::config_to_string(c, n), a.re))
            .collect(),
        szsz_nn: ground.szsz(1, 2)?,
        szsz_nnn: ground.szsz(1, 3)?,
        nn_entropy: pair_entropies[0].1,
        pair_entropies,
        e2v_all_pairs: e2v(&ground)?,
        commutator_sz,
        commutator_s2,
    })
}

/// Max-entry norms of [H, Sᶻ_tot] and [H, S²_tot] on the full 2ⁿ space.
pub fn full_space_commutators(spec: &HamiltonianSpec) -> Result<(f64, f64)> {
    let n = spec.n;
    if n > 8 {
        return Err(Error::Unsupported("full-space checks are limited to n <= 8".into()));
    }
    let dim = 1usize << n;
    let heis = |bonds: &[(usize, usize)], w: f64, diag: f64| {
        let mut m = CMatrix::zeros(dim, dim);
        for cfg in 0..dim as u32 {
            let k = cfg as usize;
            m[(k, k)] += Complex64::new(diag, 0.0);
            for &(i, j) in bonds {
                m[(k, k)] += Complex64::new(w * spin_z(cfg, i) * spin_z(cfg, j), 0.0);
                if (cfg >> (i - 1) & 1) != (cfg >> (j - 1) & 1) {
                    let t = (cfg ^ (1 << (i - 1)) ^ (1 << (j - 1))) as usize;
                    m[(t, k)] += Complex64::new(0.5 * w, 0.0);
                }
            }
        }
        m
    };
    let h = heis(&spec.bonds(), spec.j(), 0.0);
    let all: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    let s2 = heis(&all, 2.0, 0.75 * n as f64);
    let sz = CMatrix::from_diag(
        &(0..dim as u32)
            .map(|c| (1..=n).map(|s| spin_z(c, s)).sum())
            .collect::<Vec<f64>>(),
    );
    let comm = |a: &CMatrix, b: &CMatrix| a.matmul(b).sub(&b.matmul(a)).max_abs();
    Ok((comm(&h, &sz), comm(&h, &s2)))
}

/// Projector onto the span of the given vectors (orthonormalized first).
pub fn span_projector(vectors: &[Vec<Complex64>]) -> CMatrix {
    let cs = crate::linalg::column_space(vectors);
    let basis = cs.basis(crate::vb::RANK_TOL);
    let d = vectors.first().map_or(0, |v| v.len());
    let mut p = CMatrix::zeros(d, d);
    for u in basis {
        for i in 0..d {
            for j in 0..d {
                p[(i, j)] += u[i] * u[j].conj();
            }
        }
    }
    p
}

/// Operator-norm distance between the exact ground-space projector and the
/// projector onto the Rumer states.
pub fn ground_space_vs_rumer(spec: &HamiltonianSpec) -> Result<f64> {
    let h = build_hamiltonian(spec)?;
    let eig = hermitian_eig(&h)?;
    let g = singlet_count(spec.n);
    let vecs: Vec<Vec<Complex64>> = (0..g).map(|k| eig.eigenvector(k).expect("vectors")).collect();
    let map = crate::vb::rumer_map(spec.n)?;
    let diff = span_projector(&vecs).sub(&span_projector(&map.columns()));
    Ok(hermitian_eigvals(&diff)?.iter().fold(0.0f64, |m, e| m.max(e.abs())))
}

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigvals, CMatrix};

/// Eigenvalues in [−CLAMP_TOL, 0) are treated as zero; below that the matrix
/// is not a density matrix.
pub const CLAMP_TOL: f64 = 1e-10;

/// Validated 4×4 two-site density matrix, basis |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩.
#[derive(Debug, Clone)]
pub struct TwoQubitRdm {
    m: CMatrix,
    sites: (usize, usize),
    eigenvalues: Vec<f64>,
}

impl TwoQubitRdm {
    pub fn new(m: CMatrix, sites: (usize, usize)) -> Result<Self> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected 4x4, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let dev = m.hermitian_deviation();
        if dev > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = m.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let eigenvalues = hermitian_eigvals(&m)?;
        if let Some(&lo) = eigenvalues.first() {
            if lo < -CLAMP_TOL {
                return Err(Error::InvalidDensityMatrix(format!(
                    "negative eigenvalue {lo:e}"
                )));
            }
        }
        Ok(Self {
            m,
            sites,
            eigenvalues,
        })
    }

    /// The rotationally invariant pair matrix of an Sᶻ eigenstate with
    /// ⟨Sᶻᵢ⟩ = 0, fixed by ⟨SᶻᵢSᶻⱼ⟩ and ⟨S⁺ᵢS⁻ⱼ⟩.
    pub fn from_correlations(szsz: f64, spsm: Complex64, sites: (usize, usize)) -> Result<Self> {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(0.25 + szsz, 0.0);
        m[(1, 1)] = Complex64::new(0.25 - szsz, 0.0);
        m[(2, 2)] = Complex64::new(0.25 - szsz, 0.0);
        m[(3, 3)] = Complex64::new(0.25 + szsz, 0.0);
        // ⟨↑↓|ρ|↓↑⟩ = Tr(ρ S⁻ᵢS⁺ⱼ) = ⟨S⁻ᵢS⁺ⱼ⟩ = conj⟨S⁺ᵢS⁻ⱼ⟩
        m[(1, 2)] = spsm.conj();
        m[(2, 1)] = spsm;
        Self::new(m, sites)
    }

    /// p·|singlet⟩⟨singlet| + (1 − p)/4·I.
    pub fn werner(p: f64, sites: (usize, usize)) -> Result<Self> {
        let singlet = singlet_projector();
        let m = singlet
            .scale(Complex64::new(p, 0.0))
            .add(&CMatrix::identity(4).scale(Complex64::new((1.0 - p) / 4.0, 0.0)));
        Self::new(m, sites)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn sites(&self) -> (usize, usize) {
        self.sites
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvalues with values in [−1e-10, 0) set to zero.
    pub fn clamped_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|&l| l.max(0.0)).collect()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += self.m[(i, j)].norm_sqr();
            }
        }
        acc
    }
}

/// |s⟩⟨s| for |s⟩ = (|↑↓⟩ − |↓↑⟩)/√2.
pub fn singlet_projector() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(1, 1)] = Complex64::new(0.5, 0.0);
    m[(2, 2)] = Complex64::new(0.5, 0.0);
    m[(1, 2)] = Complex64::new(-0.5, 0.0);
    m[(2, 1)] = Complex64::new(-0.5, 0.0);
    m
}

/// Reorders a (|↑⟩, |↓⟩) single-site matrix into (|↓⟩, |↑⟩) order.
pub fn to_down_up_order(m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            out[(1 - i, 1 - j)] = m[(i, j)];
        }
    }
    out
}

//! Pair entanglement measures: von Neumann entropy (numeric and closed form),
//! pair-averaged entropy and its maximum, i-concurrence, Wootters concurrence,
//! and the Werner-state reading of rotationally invariant pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix};
use crate::rdm::{TwoQubitRdm, CLAMP_TOL};
use crate::state::PureState;

/// x·log₂x with 0·log 0 = 0.
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// −Σ λ log₂ λ over clamped eigenvalues; errors below −1e-10.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    if let Some(&lo) = eigenvalues.iter().min_by(|a, b| a.total_cmp(b)) {
        if lo < -CLAMP_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {lo:e}"
            )));
        }
    }
    Ok(-eigenvalues.iter().map(|&l| xlog2x(l.max(0.0))).sum::<f64>())
}

/// Von Neumann entropy of a two-site density matrix, in bits.
pub fn entropy(rho: &TwoQubitRdm) -> Result<f64> {
    entropy_of_spectrum(rho.eigenvalues())
}

/// Entropy of the isotropic pair matrix as a function of c = ⟨SᶻᵢSᶻⱼ⟩:
/// 2 − ¼[3(1+4c)log₂(1+4c) + (1−12c)log₂(1−12c)].
///
/// Valid for c in [−1/4, 1/12], where both eigenvalue families
/// (1+4c)/4 (triplet, ×3) and (1−12c)/4 (singlet) are nonnegative.
pub fn entropy_closed_form(c: f64) -> Result<f64> {
    check_correlation_domain(c)?;
    Ok(2.0 - 0.25 * (3.0 * xlog2x(1.0 + 4.0 * c) + xlog2x(1.0 - 12.0 * c)))
}

/// d/dc of [`entropy_closed_form`]: 3·log₂((1 − 12c)/(1 + 4c)).
pub fn entropy_closed_form_derivative(c: f64) -> f64 {
    let tiny = 1e-300;
    3.0 * ((1.0 - 12.0 * c).max(tiny).log2() - (1.0 + 4.0 * c).max(tiny).log2())
}

/// √(2(1 − Tr ρ²)) of the isotropic pair matrix at c = ⟨SᶻᵢSᶻⱼ⟩,
/// using Tr ρ² = 1/4 + 12c².
pub fn iconcurrence_closed_form(c: f64) -> Result<f64> {
    check_correlation_domain(c)?;
    Ok((1.5 - 24.0 * c * c).max(0.0).sqrt())
}

fn check_correlation_domain(c: f64) -> Result<()> {
    const EPS: f64 = 1e-12;
    if !(-0.25 - EPS..=1.0 / 12.0 + EPS).contains(&c) {
        return Err(Error::Domain(format!(
            "<SzSz> = {c} outside [-1/4, 1/12]"
        )));
    }
    Ok(())
}

fn check_even_at_least_four(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) || n < 4 {
        return Err(Error::InvalidSize {
            n,
            reason: "needs an even n >= 4",
        });
    }
    Ok(())
}

/// Correlation −1/(4(n − 1)) shared by every pair of a homogeneous state.
pub fn homogeneous_correlation(n: usize) -> f64 {
    -1.0 / (4.0 * (n as f64 - 1.0))
}

/// Maximum pair-averaged entropy over isotropic Sᶻ = 0 states of n spins.
pub fn e2v_max(n: usize) -> Result<f64> {
    check_even_at_least_four(n)?;
    let inv = 1.0 / (n as f64 - 1.0);
    let triplet = 0.25 - 0.25 * inv;
    let singlet = 0.25 + 0.75 * inv;
    Ok(-3.0 * xlog2x(triplet) - xlog2x(singlet))
}

/// Maximum pair-averaged i-concurrence, attained at the same homogeneous point.
pub fn ic_max(n: usize) -> Result<f64> {
    check_even_at_least_four(n)?;
    iconcurrence_closed_form(homogeneous_correlation(n))
}

/// Mean entropy of rdm2 over all unordered pairs.
pub fn e2v(state: &PureState) -> Result<f64> {
    let n = state.n();
    let mut acc = 0.0;
    let mut count = 0usize;
    for i in 1..=n {
        for j in i + 1..=n {
            acc += entropy(&state.rdm2(i, j)?)?;
            count += 1;
        }
    }
    Ok(acc / count as f64)
}

/// √(2(1 − Tr ρ²)) for one pair.
pub fn iconcurrence_term(rho: &TwoQubitRdm) -> f64 {
    (2.0 * (1.0 - rho.purity())).max(0.0).sqrt()
}

/// [2/(N(N−1))] Σ_{i<j} √(2(1 − Tr ρᵢⱼ²)).
pub fn iconcurrence(state: &PureState) -> Result<f64> {
    let n = state.n();
    let mut acc = 0.0;
    for i in 1..=n {
        for j in i + 1..=n {
            acc += iconcurrence_term(&state.rdm2(i, j)?);
        }
    }
    Ok(2.0 * acc / (n * (n - 1)) as f64)
}

/// Positive square root of a positive semidefinite Hermitian matrix.
fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let s = hermitian_eig(m)?;
    let v = s.eigenvectors.as_ref().expect("requested eigenvectors");
    let roots: Vec<f64> = s.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let d = CMatrix::from_diag(&roots);
    Ok(v.matmul(&d).matmul(&v.adjoint()))
}

/// Wootters concurrence max(0, √μ₁ − √μ₂ − √μ₃ − √μ₄), μ the descending
/// eigenvalues of ρ(σʸ⊗σʸ)ρ*(σʸ⊗σʸ), computed through the Hermitian
/// similar form √ρ ρ̃ √ρ.
pub fn wootters_concurrence(rho: &TwoQubitRdm) -> Result<f64> {
    let m = rho.matrix();
    // σʸ⊗σʸ in |↑↑⟩,|↑↓⟩,|↓↑⟩,|↓↓⟩ order: antidiagonal (−1, 1, 1, −1).
    let mut yy = CMatrix::zeros(4, 4);
    for (k, s) in [-1.0, 1.0, 1.0, -1.0].into_iter().enumerate() {
        yy[(k, 3 - k)] = Complex64::new(s, 0.0);
    }
    let tilde = yy.matmul(&m.conj()).matmul(&yy);
    let root = psd_sqrt(m)?;
    let mut herm = root.matmul(&tilde).matmul(&root);
    // Re-symmetrize rounding noise before the Hermitian solver sees it.
    let adj = herm.adjoint();
    herm = herm.add(&adj).scale(Complex64::new(0.5, 0.0));
    let mut mu = crate::linalg::hermitian_eigvals(&herm)?;
    if mu.iter().any(|&x| x < -CLAMP_TOL) {
        return Err(Error::InvalidDensityMatrix(
            "negative eigenvalue in concurrence matrix".into(),
        ));
    }
    mu.sort_by(|a, b| b.total_cmp(a));
    let r: Vec<f64> = mu.iter().map(|&x| x.max(0.0).sqrt()).collect();
    Ok((r[0] - r[1] - r[2] - r[3]).max(0.0))
}

/// Rotational-invariance tolerance for the Werner reading.
pub const WERNER_TOL: f64 = 1e-9;

/// Deviation of a pair matrix from the rotationally invariant form fixed by
/// its own ⟨SᶻSᶻ⟩ with ⟨S⁺S⁻⟩ = 2⟨SᶻSᶻ⟩.
pub fn rotational_deviation(rho: &TwoQubitRdm) -> f64 {
    let m = rho.matrix();
    // ⟨SᶻSᶻ⟩ from the diagonal: (ρ₀₀ + ρ₃₃ − ρ₁₁ − ρ₂₂)/4.
    let c = 0.25 * (m[(0, 0)].re + m[(3, 3)].re - m[(1, 1)].re - m[(2, 2)].re);
    let ideal = TwoQubitRdm::from_correlations(c, Complex64::new(2.0 * c, 0.0), rho.sites())
        .map(|r| r.matrix().clone());
    match ideal {
        Ok(ideal) => m.sub(&ideal).max_abs(),
        Err(_) => f64::INFINITY,
    }
}

/// Werner parameter p = −(4/3)⟨Sᵢ·Sⱼ⟩ of a rotationally invariant pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerReading {
    pub p: f64,
    /// p ≤ 1/3
    pub separable: bool,
}

pub fn werner_p(state: &PureState, i: usize, j: usize) -> Result<WernerReading> {
    let rho = state.rdm2(i, j)?;
    let deviation = rotational_deviation(&rho);
    if deviation > WERNER_TOL {
        return Err(Error::NotRotationallyInvariant { deviation });
    }
    let p = -4.0 / 3.0 * state.sdots(i, j)?;
    Ok(WernerReading {
        p,
        separable: p <= 1.0 / 3.0 + WERNER_TOL,
    })
}

/// Exact Werner parameter of the homogeneous maximal states, 1/(n − 1).
pub fn werner_p_maximal(n: usize) -> f64 {
    1.0 / (n as f64 - 1.0)
}

/// Equal-amplitude bipartite VB superposition ("RVB gas"): 1/3 + 2/(3n).
pub fn werner_p_rvb_gas(n: usize) -> f64 {
    1.0 / 3.0 + 2.0 / (3.0 * n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub n: usize,
    pub p_exact: f64,
    pub p_monogamy: f64,
    pub p_telecloning: f64,
}

/// Exact p against the monogamy and telecloning upper bounds.
pub fn bound_comparison(n: usize) -> Result<BoundComparison> {
    if n < 4 {
        return Err(Error::InvalidSize {
            n,
            reason: "bound comparison needs n >= 4",
        });
    }
    let m = n as f64 - 1.0;
    let out = BoundComparison {
        n,
        p_exact: 1.0 / m,
        p_monogamy: 1.0 / 3.0 + 2.0 / (3.0 * m.sqrt()),
        p_telecloning: 1.0 / 3.0 + 2.0 / (3.0 * m),
    };
    if !(out.p_exact <= out.p_telecloning && out.p_telecloning <= out.p_monogamy) {
        return Err(Error::Internal(format!("bound ordering violated: {out:?}")));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Everything measured on one site pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMeasure {
    pub sites: (usize, usize),
    pub szsz: f64,
    pub spsm: ComplexValue,
    pub sdots: f64,
    /// bits
    pub entropy: f64,
    pub purity: f64,
    pub iconc_term: f64,
    pub wootters: f64,
    /// `None` when the pair is not rotationally invariant.
    pub werner_p: Option<f64>,
}

pub fn pair_measure(state: &PureState, i: usize, j: usize) -> Result<PairMeasure> {
    let rho = state.rdm2(i, j)?;
    let werner = match werner_p(state, i, j) {
        Ok(w) => Some(w.p),
        Err(Error::NotRotationallyInvariant { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(PairMeasure {
        sites: (i, j),
        szsz: state.szsz(i, j)?,
        spsm: state.spsm(i, j)?.into(),
        sdots: state.sdots(i, j)?,
        entropy: entropy(&rho)?,
        purity: rho.purity(),
        iconc_term: iconcurrence_term(&rho),
        wootters: wootters_concurrence(&rho)?,
        werner_p: werner,
    })
}

/// Pair table plus aggregates of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub n: usize,
    pub pairs: Vec<PairMeasure>,
    pub e2v: f64,
    pub e2v_max: Option<f64>,
    pub ic: f64,
    pub homogeneous: bool,
    pub isotropic: bool,
}

/// Measures every unordered pair.
pub fn report(state: &PureState) -> Result<EntanglementReport> {
    let n = state.n();
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    report_pairs(state, &pairs)
}

/// Measures the listed pairs; aggregates still run over every pair.
pub fn report_pairs(state: &PureState, pairs: &[(usize, usize)]) -> Result<EntanglementReport> {
    report_pairs_with(state, pairs, &crate::homogenizer::Tolerances::default())
}

pub fn report_pairs_with(
    state: &PureState,
    pairs: &[(usize, usize)],
    tol: &crate::homogenizer::Tolerances,
) -> Result<EntanglementReport> {
    let measures = pairs
        .iter()
        .map(|&(i, j)| pair_measure(state, i, j))
        .collect::<Result<Vec<_>>>()?;
    let cert = crate::homogenizer::verify_maximal_with(state, tol);
    Ok(EntanglementReport {
        n: state.n(),
        pairs: measures,
        e2v: e2v(state)?,
        e2v_max: e2v_max(state.n()).ok(),
        ic: iconcurrence(state)?,
        homogeneous: cert.flags.is_homogeneous,
        isotropic: cert.flags.is_isotropic,
    })
}

/// Which maximal quantity a curve row tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    E2vMax,
    IcMax,
}

impl CurveKind {
    /// Value approached as n → ∞ (2 bits, √(3/2)).
    pub fn limit(self) -> f64 {
        match self {
            CurveKind::E2vMax => 2.0,
            CurveKind::IcMax => 1.5f64.sqrt(),
        }
    }

    pub fn value(self, n: usize) -> Result<f64> {
        match self {
            CurveKind::E2vMax => e2v_max(n),
            CurveKind::IcMax => ic_max(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub value: f64,
    pub ratio: f64,
}

/// Rows for n = 4, 6, …, n_max.
pub fn curve(kind: CurveKind, n_max: usize) -> Result<Vec<CurveRow>> {
    if n_max < 4 || !n_max.is_multiple_of(2) || n_max > 10_000 {
        return Err(Error::InvalidSize {
            n: n_max,
            reason: "n-max must be even with 4 <= n-max <= 10000",
        });
    }
    (4..=n_max)
        .step_by(2)
        .map(|n| {
            let value = kind.value(n)?;
            Ok(CurveRow {
                n,
                value,
                ratio: value / kind.limit(),
            })
        })
        .collect()
}

/// Writes `n,e2v_max,ic_max` rows for n = 4 … n_max.
pub fn write_curve_csv<W: std::io::Write>(n_max: usize, out: W) -> Result<()> {
    let e = curve(CurveKind::E2vMax, n_max)?;
    let ic = curve(CurveKind::IcMax, n_max)?;
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["n", "e2v_max", "ic_max"]).map_err(io)?;
    for (a, b) in e.iter().zip(&ic) {
        w.write_record([a.n.to_string(), format!("{:.9}", a.value), format!("{:.9}", b.value)])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

//! Sector-resolved state vectors and the spin operators acting on them.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::{is_up, spin_z, SectorBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitudes over one magnetization sector. Operators that change Sᶻ
/// return a vector tagged with the target sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorVector {
    pub basis: Arc<SectorBasis>,
    pub amp: Vec<Complex64>,
}

impl SectorVector {
    pub fn new(basis: Arc<SectorBasis>, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: amp.len(),
            });
        }
        Ok(Self { basis, amp })
    }

    pub fn zeros(basis: Arc<SectorBasis>) -> Self {
        let amp = vec![ZERO; basis.dim()];
        Self { basis, amp }
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amp)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.amp.iter().all(|z| z.norm() <= tol)
    }

    /// Σᵢ S⁺ᵢ applied to this vector; lands in the sector with one more up-spin.
    pub fn apply_sp_total(&self) -> Result<SectorVector> {
        self.apply_ladder_total(true)
    }

    /// Σᵢ S⁻ᵢ applied to this vector.
    pub fn apply_sm_total(&self) -> Result<SectorVector> {
        self.apply_ladder_total(false)
    }

    fn apply_ladder_total(&self, raise: bool) -> Result<SectorVector> {
        let n = self.basis.n();
        let n_up = self.basis.n_up();
        let target_up = if raise {
            n_up + 1
        } else {
            n_up.checked_sub(1).ok_or(Error::InvalidSize {
                n,
                reason: "no up-spin to lower",
            })?
        };
        let target = Arc::new(SectorBasis::new(n, target_up)?);
        let mut out = vec![ZERO; target.dim()];
        for (k, &cfg) in self.basis.states().iter().enumerate() {
            let a = self.amp[k];
            if a == ZERO {
                continue;
            }
            for site in 1..=n {
                if is_up(cfg, site) != raise {
                    let t = cfg ^ (1 << (site - 1));
                    let idx = target.index_of(t).expect("ladder target in sector");
                    out[idx] += a;
                }
            }
        }
        Ok(SectorVector {
            basis: target,
            amp: out,
        })
    }

    /// Sᵢ·Sⱼ applied to this vector (stays in the sector).
    pub fn apply_sdot(&self, i: usize, j: usize) -> Result<SectorVector> {
        self.basis.check_pair(i, j)?;
        let mut out = vec![ZERO; self.amp.len()];
        self.accumulate_sdot(i, j, 1.0, &mut out);
        Ok(SectorVector {
            basis: self.basis.clone(),
            amp: out,
        })
    }

    fn accumulate_sdot(&self, i: usize, j: usize, weight: f64, out: &mut [Complex64]) {
        for (k, &cfg) in self.basis.states().iter().enumerate() {
            let a = self.amp[k];
            if a == ZERO {
                continue;
            }
            out[k] += a * (weight * spin_z(cfg, i) * spin_z(cfg, j));
            if is_up(cfg, i) != is_up(cfg, j) {
                let swapped = cfg ^ (1 << (i - 1)) ^ (1 << (j - 1));
                let idx = self.basis.index_of(swapped).expect("swap stays in sector");
                out[idx] += a * (0.5 * weight);
            }
        }
    }

    /// Σ over the given bonds of Sᵢ·Sⱼ applied to this vector.
    pub fn apply_bond_sum(&self, bonds: &[(usize, usize)]) -> Result<SectorVector> {
        let mut out = vec![ZERO; self.amp.len()];
        for &(i, j) in bonds {
            self.basis.check_pair(i, j)?;
            self.accumulate_sdot(i, j, 1.0, &mut out);
        }
        Ok(SectorVector {
            basis: self.basis.clone(),
            amp: out,
        })
    }

    /// S²_tot applied to this vector.
    pub fn apply_s2(&self) -> SectorVector {
        let n = self.basis.n();
        let mut out: Vec<Complex64> = self.amp.iter().map(|&a| a * (0.75 * n as f64)).collect();
        for i in 1..=n {
            for j in i + 1..=n {
                self.accumulate_sdot(i, j, 2.0, &mut out);
            }
        }
        SectorVector {
            basis: self.basis.clone(),
            amp: out,
        }
    }
}

/// First and second moments of S²_tot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S2Moments {
    pub mean: f64,
    pub variance: f64,
}

/// A pure state of N spin-1/2 sites restricted to one Sᶻ sector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    basis: Arc<SectorBasis>,
    amp: Vec<Complex64>,
    normalized: bool,
}

/// Relative amplitude below which a coefficient is treated as zero.
pub const ZERO_AMPLITUDE: f64 = 1e-12;

impl PureState {
    /// Normalizes on construction.
    pub fn new(basis: Arc<SectorBasis>, amp: Vec<Complex64>) -> Result<Self> {
        Self::unnormalized(basis, amp).map(|s| s.normalized())
    }

    /// Keeps the coefficients exactly as given.
    pub fn unnormalized(basis: Arc<SectorBasis>, amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: amp.len(),
            });
        }
        if amp.iter().all(|z| *z == ZERO) {
            return Err(Error::ZeroState);
        }
        let normalized = (linalg::norm(&amp) - 1.0).abs() <= 1e-12;
        Ok(Self {
            basis,
            amp,
            normalized,
        })
    }

    /// Builds a state from (configuration, amplitude) entries; unlisted
    /// configurations get amplitude zero.
    pub fn from_entries(
        basis: Arc<SectorBasis>,
        entries: &[(u32, Complex64)],
        normalize: bool,
    ) -> Result<Self> {
        let mut amp = vec![ZERO; basis.dim()];
        for &(cfg, a) in entries {
            let k = basis.index_of(cfg).ok_or_else(|| {
                Error::Parse(format!(
                    "configuration {} is not in the sector",
                    crate::basis::config_to_string(cfg, basis.n())
                ))
            })?;
            amp[k] += a;
        }
        if normalize {
            Self::new(basis, amp)
        } else {
            Self::unnormalized(basis, amp)
        }
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn amplitude(&self, config: u32) -> Complex64 {
        self.basis.index_of(config).map_or(ZERO, |k| self.amp[k])
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amp)
    }

    fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let nrm = self.norm();
        Self {
            basis: self.basis.clone(),
            amp: self.amp.iter().map(|z| z / nrm).collect(),
            normalized: true,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            amp: self.amp.iter().map(|z| z.conj()).collect(),
            normalized: self.normalized,
        }
    }

    /// Multiplies by the phase that makes the first nonzero amplitude
    /// positive real.
    pub fn gauge_fixed(&self) -> Self {
        let max = self.amp.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lead = self
            .amp
            .iter()
            .find(|z| z.norm() > ZERO_AMPLITUDE * max)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = lead.conj() / lead.norm();
        let amp = self
            .amp
            .iter()
            .map(|z| {
                let w = z * phase;
                // Exact zeros in the imaginary part keep serialization stable.
                Complex64::new(clean(w.re, max), clean(w.im, max))
            })
            .collect();
        Self {
            basis: self.basis.clone(),
            amp,
            normalized: self.normalized,
        }
    }

    pub fn as_vector(&self) -> SectorVector {
        SectorVector {
            basis: self.basis.clone(),
            amp: self.amp.clone(),
        }
    }

    /// ⟨self|other⟩ of the stored (not renormalized) coefficients.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch {
                expected: self.basis.dim(),
                got: other.basis.dim(),
            });
        }
        Ok(linalg::dot(&self.amp, &other.amp))
    }

    /// Coefficients of every spin flipped: amplitude of k moves to flip(k).
    pub fn spin_flipped(&self) -> Result<Self> {
        if !self.basis.is_sz0() {
            return Err(Error::Unsupported(
                "spin flip only maps the Sz = 0 sector to itself".into(),
            ));
        }
        let mut amp = vec![ZERO; self.amp.len()];
        for (k, &cfg) in self.basis.states().iter().enumerate() {
            let idx = self.basis.index_of(self.basis.flip(cfg)).expect("flip in sector");
            amp[idx] = self.amp[k];
        }
        Ok(Self {
            basis: self.basis.clone(),
            amp,
            normalized: self.normalized,
        })
    }

    /// Expands into the full 2ᴺ-dimensional Hilbert space, indexed by configuration.
    pub fn to_full(&self) -> Vec<Complex64> {
        let mut full = vec![ZERO; 1 << self.n()];
        let nrm = self.norm();
        for (k, &cfg) in self.basis.states().iter().enumerate() {
            full[cfg as usize] = self.amp[k] / nrm;
        }
        full
    }

    pub fn sz(&self, i: usize) -> Result<f64> {
        self.basis.check_site(i)?;
        let w = self.norm_sqr();
        Ok(self
            .basis
            .states()
            .iter()
            .zip(&self.amp)
            .map(|(&c, a)| a.norm_sqr() * spin_z(c, i))
            .sum::<f64>()
            / w)
    }

    /// ⟨Sᶻᵢ Sᶻⱼ⟩.
    pub fn szsz(&self, i: usize, j: usize) -> Result<f64> {
        self.basis.check_pair(i, j)?;
        let w = self.norm_sqr();
        Ok(self
            .basis
            .states()
            .iter()
            .zip(&self.amp)
            .map(|(&c, a)| a.norm_sqr() * spin_z(c, i) * spin_z(c, j))
            .sum::<f64>()
            / w)
    }

    /// ⟨S⁺ᵢ S⁻ⱼ⟩ by hopping an up-spin from j to i.
    pub fn spsm(&self, i: usize, j: usize) -> Result<Complex64> {
        self.basis.check_pair(i, j)?;
        let w = self.norm_sqr();
        let mut acc = ZERO;
        for (k, &cfg) in self.basis.states().iter().enumerate() {
            if is_up(cfg, j) && !is_up(cfg, i) {
                let hopped = cfg ^ (1 << (i - 1)) ^ (1 << (j - 1));
                let idx = self.basis.index_of(hopped).expect("hop stays in sector");
                acc += self.amp[idx].conj() * self.amp[k];
            }
        }
        Ok(acc / w)
    }

    /// ⟨Sᵢ·Sⱼ⟩ = ⟨SᶻᵢSᶻⱼ⟩ + Re⟨S⁺ᵢS⁻ⱼ⟩.
    pub fn sdots(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.szsz(i, j)? + self.spsm(i, j)?.re)
    }

    /// Exact two-site reduced density matrix; rows/columns ordered
    /// |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ of (site i, site j).
    pub fn rdm2(&self, i: usize, j: usize) -> Result<crate::rdm::TwoQubitRdm> {
        self.basis.check_pair(i, j)?;
        let mask = (1u32 << (i - 1)) | (1u32 << (j - 1));
        let mut blocks: HashMap<u32, [Complex64; 4]> = HashMap::new();
        for (k, &cfg) in self.basis.states().iter().enumerate() {
            let local = (usize::from(!is_up(cfg, i)) << 1) | usize::from(!is_up(cfg, j));
            blocks.entry(cfg & !mask).or_insert([ZERO; 4])[local] = self.amp[k];
        }
        let mut m = CMatrix::zeros(4, 4);
        for v in blocks.values() {
            for x in 0..4 {
                for y in 0..4 {
                    m[(x, y)] += v[x] * v[y].conj();
                }
            }
        }
        let m = m.scale(Complex64::new(1.0 / self.norm_sqr(), 0.0));
        crate::rdm::TwoQubitRdm::new(m, (i, j))
    }

    /// Single-site reduced density matrix in (|↑⟩, |↓⟩) order, by partial trace.
    pub fn rdm1(&self, i: usize) -> Result<CMatrix> {
        self.basis.check_site(i)?;
        let mask = 1u32 << (i - 1);
        let mut blocks: HashMap<u32, [Complex64; 2]> = HashMap::new();
        for (k, &cfg) in self.basis.states().iter().enumerate() {
            let local = usize::from(!is_up(cfg, i));
            blocks.entry(cfg & !mask).or_insert([ZERO; 2])[local] = self.amp[k];
        }
        let mut m = CMatrix::zeros(2, 2);
        for v in blocks.values() {
            for x in 0..2 {
                for y in 0..2 {
                    m[(x, y)] += v[x] * v[y].conj();
                }
            }
        }
        Ok(m.scale(Complex64::new(1.0 / self.norm_sqr(), 0.0)))
    }

    /// Single-site matrix rebuilt from ⟨Sᶻᵢ⟩ and ⟨S±ᵢ⟩, (|↑⟩, |↓⟩) order.
    /// Within a fixed-Sᶻ sector ⟨S±ᵢ⟩ vanishes identically.
    pub fn rdm1_from_moments(&self, i: usize) -> Result<CMatrix> {
        let sz = self.sz(i)?;
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.5 + sz, 0.0);
        m[(1, 1)] = Complex64::new(0.5 - sz, 0.0);
        Ok(m)
    }

    pub fn apply_sp_total(&self) -> Result<SectorVector> {
        self.as_vector().apply_sp_total()
    }

    pub fn apply_sm_total(&self) -> Result<SectorVector> {
        self.as_vector().apply_sm_total()
    }

    /// ⟨S²_tot⟩ and its variance; zero variance certifies an S_T eigenstate.
    pub fn s2_total(&self) -> S2Moments {
        let w = self.norm_sqr();
        let s2 = self.as_vector().apply_s2();
        let mean = linalg::dot(&self.amp, &s2.amp).re / w;
        let second = s2.amp.iter().map(|z| z.norm_sqr()).sum::<f64>() / w;
        S2Moments {
            mean,
            variance: (second - mean * mean).max(0.0),
        }
    }

    /// Σ_{i≠j} ⟨Sᵢ·Sⱼ⟩ + 3N/4, the pair-sum route to ⟨S²_tot⟩.
    pub fn s2_from_pairs(&self) -> f64 {
        let n = self.n();
        let mut acc = 0.75 * n as f64;
        for i in 1..=n {
            for j in i + 1..=n {
                acc += 2.0 * self.sdots(i, j).expect("valid pair");
            }
        }
        acc
    }
}

fn clean(x: f64, scale: f64) -> f64 {
    if x.abs() <= 1e-15 * scale.max(1e-300) {
        0.0
    } else {
        x
    }
}

/// Reduced density matrix of the kept sites from a full 2ᴺ state vector.
/// The first kept site is the most significant local index bit; |↑⟩ is 0.
pub fn partial_trace_full(full: &[Complex64], n: usize, keep: &[usize]) -> CMatrix {
    assert_eq!(full.len(), 1 << n);
    let k = keep.len();
    let dim = 1 << k;
    let keep_mask: u32 = keep.iter().map(|&s| 1u32 << (s - 1)).sum();
    let local_index = |cfg: u32| -> usize {
        keep.iter()
            .enumerate()
            .map(|(m, &s)| usize::from(!is_up(cfg, s)) << (k - 1 - m))
            .sum()
    };
    let mut blocks: HashMap<u32, Vec<Complex64>> = HashMap::new();
    for (cfg, &a) in full.iter().enumerate() {
        if a == ZERO {
            continue;
        }
        let cfg = cfg as u32;
        blocks
            .entry(cfg & !keep_mask)
            .or_insert_with(|| vec![ZERO; dim])[local_index(cfg)] = a;
    }
    let mut m = CMatrix::zeros(dim, dim);
    for v in blocks.values() {
        for x in 0..dim {
            if v[x] == ZERO {
                continue;
            }
            for y in 0..dim {
                m[(x, y)] += v[x] * v[y].conj();
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{config_from_str, sector_basis};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn singlet_product_12_34() -> PureState {
        let b = sector_basis(4).unwrap();
        let e = |s: &str| config_from_str(s).unwrap();
        PureState::from_entries(
            b,
            &[
                (e("udud"), c(1.0)),
                (e("uddu"), c(-1.0)),
                (e("duud"), c(-1.0)),
                (e("dudu"), c(1.0)),
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn singlet_product_correlations() {
        let s = singlet_product_12_34();
        assert!((s.szsz(1, 2).unwrap() + 0.25).abs() < 1e-14);
        assert!(s.szsz(1, 3).unwrap().abs() < 1e-14);
        assert!((s.spsm(1, 2).unwrap() - c(-0.5)).norm() < 1e-14);
        assert!((s.sdots(1, 2).unwrap() + 0.75).abs() < 1e-14);
        assert!(s.sdots(2, 4).unwrap().abs() < 1e-14);
    }

    #[test]
    fn equal_site_pairs_rejected() {
        let s = singlet_product_12_34();
        assert_eq!(s.szsz(2, 2), Err(Error::InvalidPair { i: 2, j: 2 }));
        assert!(matches!(s.spsm(3, 3), Err(Error::InvalidPair { .. })));
        assert!(matches!(s.sdots(1, 1), Err(Error::InvalidPair { .. })));
        assert!(matches!(s.rdm2(4, 4), Err(Error::InvalidPair { .. })));
        assert!(matches!(s.szsz(1, 5), Err(Error::SiteOutOfRange { .. })));
    }

    #[test]
    fn rdm2_of_singlet_product() {
        let s = singlet_product_12_34();
        let bonded = s.rdm2(1, 2).unwrap();
        let m = bonded.matrix();
        assert!((m[(1, 1)] - c(0.5)).norm() < 1e-14);
        assert!((m[(2, 2)] - c(0.5)).norm() < 1e-14);
        assert!((m[(1, 2)] - c(-0.5)).norm() < 1e-14);
        assert!(m[(0, 0)].norm() < 1e-14 && m[(3, 3)].norm() < 1e-14);
        let cross = s.rdm2(1, 3).unwrap();
        let quarter = CMatrix::identity(4).scale(c(0.25));
        assert!(cross.matrix().sub(&quarter).max_abs() < 1e-14);
    }

    #[test]
    fn rdm1_product_state() {
        let b = sector_basis(4).unwrap();
        let s = PureState::from_entries(b, &[(config_from_str("udud").unwrap(), c(1.0))], true)
            .unwrap();
        let m = s.rdm1(1).unwrap();
        assert!((m[(0, 0)] - c(1.0)).norm() < 1e-14);
        assert!(m[(1, 1)].norm() < 1e-14);
        assert!(m.sub(&s.rdm1_from_moments(1).unwrap()).max_abs() < 1e-12);
    }

    #[test]
    fn ladder_operators() {
        let s = singlet_product_12_34();
        assert!(s.apply_sp_total().unwrap().is_zero(1e-14));
        assert!(s.apply_sm_total().unwrap().is_zero(1e-14));
        let b = sector_basis(4).unwrap();
        let p = PureState::from_entries(b, &[(config_from_str("udud").unwrap(), c(1.0))], true)
            .unwrap();
        let raised = p.apply_sp_total().unwrap();
        assert_eq!(raised.basis.n_up(), 3);
        assert!(!raised.is_zero(1e-3));
    }

    #[test]
    fn s2_moments() {
        let s = singlet_product_12_34();
        let m = s.s2_total();
        assert!(m.mean.abs() < 1e-13 && m.variance < 1e-13);

        let full_up = Arc::new(SectorBasis::new(4, 4).unwrap());
        let p = PureState::new(full_up, vec![c(1.0)]).unwrap();
        let m = p.s2_total();
        assert!((m.mean - 6.0).abs() < 1e-13, "S = 2 gives 6, got {}", m.mean);
        assert!(m.variance < 1e-12);
        assert!((p.s2_from_pairs() - 6.0).abs() < 1e-13);

        let b = sector_basis(4).unwrap();
        // The symmetric Dicke state is pure S = 2; a Néel product is a mixture.
        let dicke = PureState::new(b.clone(), vec![c(1.0); b.dim()]).unwrap();
        assert!((dicke.s2_total().mean - 6.0).abs() < 1e-12);
        let mut amp = vec![ZERO; b.dim()];
        amp[b.index_of(0b0101).unwrap()] = c(1.0);
        let neel = PureState::new(b, amp).unwrap();
        let m = neel.s2_total();
        assert!(m.variance > 0.1, "mixture of S_T values: {m:?}");
        assert!((m.mean - 2.0).abs() < 1e-12);
        assert!((m.mean - neel.s2_from_pairs()).abs() < 1e-12);
    }

    #[test]
    fn zero_state_rejected() {
        let b = sector_basis(4).unwrap();
        assert_eq!(PureState::new(b.clone(), vec![ZERO; 6]), Err(Error::ZeroState));
        assert!(matches!(
            PureState::new(b, vec![ZERO; 5]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gauge_fix_makes_first_amplitude_real() {
        let b = sector_basis(4).unwrap();
        let amp: Vec<_> = (0..6).map(|k| Complex64::from_polar(1.0, 0.3 * k as f64 + 1.0)).collect();
        let g = PureState::new(b, amp).unwrap().gauge_fixed();
        assert!(g.amplitudes()[0].im == 0.0 && g.amplitudes()[0].re > 0.0);
    }
}

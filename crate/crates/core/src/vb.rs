//! Singlet coverings: Rumer (non-crossing) enumeration, VB product states,
//! and the map from Rumer coefficients to sector amplitudes.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{config_to_string, sector_basis, singlet_count, SectorBasis};
use crate::error::{Error, Result};
use crate::linalg::{column_space, CMatrix};
use crate::state::PureState;

/// Largest n for which all (n − 1)!! matchings are enumerated.
pub const MAX_ALL_MATCHINGS: usize = 10;

/// A perfect pairing of sites 1..=n, canonical: each pair ascending,
/// pairs sorted by first site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MatchingJson", into = "MatchingJson")]
pub struct Matching {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct MatchingJson {
    n: usize,
    pairs: Vec<[usize; 2]>,
}

impl TryFrom<MatchingJson> for Matching {
    type Error = Error;

    fn try_from(j: MatchingJson) -> Result<Self> {
        Matching::new(j.n, j.pairs.iter().map(|p| (p[0], p[1])).collect())
    }
}

impl From<Matching> for MatchingJson {
    fn from(m: Matching) -> Self {
        MatchingJson {
            n: m.n,
            pairs: m.pairs.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

impl Matching {
    /// Validates and canonicalizes.
    pub fn new(n: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if !n.is_multiple_of(2) || n == 0 {
            return Err(Error::InvalidSize {
                n,
                reason: "a perfect matching needs an even, nonzero site count",
            });
        }
        if pairs.len() * 2 != n {
            return Err(Error::InvalidMatching(format!(
                "{} pairs cannot cover {n} sites",
                pairs.len()
            )));
        }
        let mut seen = vec![false; n + 1];
        let mut canon = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            for s in [a, b] {
                if s == 0 || s > n {
                    return Err(Error::SiteOutOfRange { site: s, n });
                }
                if seen[s] {
                    return Err(Error::InvalidMatching(format!("site {s} covered twice")));
                }
                seen[s] = true;
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        Ok(Self { n, pairs: canon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_non_crossing(&self) -> bool {
        self.pairs
            .iter()
            .enumerate()
            .all(|(k, &p)| self.pairs[k + 1..].iter().all(|&q| !chords_cross(p, q)))
    }

    pub fn contains_pair(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i.min(j), i.max(j)))
    }

    /// Bonds oriented according to `orientation`.
    pub fn oriented_bonds(&self, orientation: Orientation) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .map(|&(a, b)| orientation.orient(self.n, a, b))
            .collect()
    }
}

impl std::fmt::Display for Matching {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let body: Vec<String> = self.pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "{{{}}}", body.join(","))
    }
}

/// Chords (a, b) and (c, d) of points on a circle cross iff exactly one
/// endpoint of one lies strictly between the endpoints of the other.
pub fn chords_cross(p: (usize, usize), q: (usize, usize)) -> bool {
    let (a, b) = (p.0.min(p.1), p.0.max(p.1));
    let (c, d) = (q.0.min(q.1), q.0.max(q.1));
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Which site of a bond carries the + sign of |↑↓⟩ − |↓↑⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Singlet (i, j) with i < j is |↑ᵢ↓ⱼ⟩ − |↓ᵢ↑ⱼ⟩.
    #[default]
    Ascending,
    /// Bond runs along the shorter clockwise arc of the circle 1 → 2 → … → n → 1;
    /// diametric bonds fall back to ascending.
    Cyclic,
}

impl Orientation {
    pub fn orient(self, n: usize, a: usize, b: usize) -> (usize, usize) {
        let (lo, hi) = (a.min(b), a.max(b));
        match self {
            Orientation::Ascending => (lo, hi),
            Orientation::Cyclic => {
                let forward = hi - lo;
                if 2 * forward <= n {
                    (lo, hi)
                } else {
                    (hi, lo)
                }
            }
        }
    }
}

/// Non-crossing perfect matchings of 1..=n on a circle; site 1's partner
/// ascends first, then the enclosed and outer blocks recursively.
pub fn enumerate_rumer(n: usize) -> Result<Vec<Matching>> {
    if !n.is_multiple_of(2) || n < 2 {
        return Err(Error::InvalidSize {
            n,
            reason: "Rumer diagrams need an even n >= 2",
        });
    }
    let sites: Vec<usize> = (1..=n).collect();
    Ok(non_crossing(&sites)
        .into_iter()
        .map(|pairs| Matching::new(n, pairs).expect("valid by construction"))
        .collect())
}

fn non_crossing(sites: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if sites.is_empty() {
        return vec![Vec::new()];
    }
    let first = sites[0];
    let mut out = Vec::new();
    for k in (1..sites.len()).step_by(2) {
        let inner = non_crossing(&sites[1..k]);
        let outer = non_crossing(&sites[k + 1..]);
        for i in &inner {
            for o in &outer {
                let mut m = Vec::with_capacity(sites.len() / 2);
                m.push((first, sites[k]));
                m.extend_from_slice(i);
                m.extend_from_slice(o);
                out.push(m);
            }
        }
    }
    out
}

/// All (n − 1)!! perfect matchings, crossing ones included.
pub fn enumerate_all_matchings(n: usize) -> Result<Vec<Matching>> {
    if !n.is_multiple_of(2) || !(2..=MAX_ALL_MATCHINGS).contains(&n) {
        return Err(Error::InvalidSize {
            n,
            reason: "all-matchings enumeration needs an even 2 <= n <= 10",
        });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n / 2);
    let mut free: Vec<usize> = (1..=n).collect();
    all_pairings(&mut free, &mut current, &mut out);
    Ok(out
        .into_iter()
        .map(|pairs| Matching::new(n, pairs).expect("valid by construction"))
        .collect())
}

fn all_pairings(
    free: &mut Vec<usize>,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if free.is_empty() {
        out.push(current.clone());
        return;
    }
    let first = free.remove(0);
    for k in 0..free.len() {
        let partner = free.remove(k);
        current.push((first, partner));
        all_pairings(free, current, out);
        current.pop();
        free.insert(k, partner);
    }
    free.insert(0, first);
}

/// Unnormalized ±1 amplitudes of the product of singlets
/// |↑ₐ↓_b⟩ − |↓ₐ↑_b⟩ over the oriented bonds (a, b).
pub fn vb_amplitudes(basis: &SectorBasis, bonds: &[(usize, usize)]) -> Result<Vec<Complex64>> {
    let n = basis.n();
    if !basis.is_sz0() || bonds.len() * 2 != n {
        return Err(Error::InvalidMatching(format!(
            "{} bonds do not cover the n = {n} Sz = 0 sector",
            bonds.len()
        )));
    }
    let mut covered = 0u32;
    for &(a, b) in bonds {
        basis.check_pair(a, b)?;
        let m = (1u32 << (a - 1)) | (1u32 << (b - 1));
        if covered & m != 0 {
            return Err(Error::InvalidMatching("site covered twice".into()));
        }
        covered |= m;
    }
    let mut amp = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for choice in 0u32..(1 << bonds.len()) {
        let mut cfg = 0u32;
        let mut sign = 1.0;
        for (k, &(a, b)) in bonds.iter().enumerate() {
            if choice >> k & 1 == 0 {
                cfg |= 1 << (a - 1);
            } else {
                cfg |= 1 << (b - 1);
                sign = -sign;
            }
        }
        let idx = basis.index_of(cfg).expect("singlet product lies in Sz = 0");
        amp[idx] += sign;
    }
    Ok(amp)
}

/// Normalized VB product state of a matching.
pub fn vb_state(matching: &Matching, orientation: Orientation) -> Result<PureState> {
    vb_state_from_bonds(matching.n(), &matching.oriented_bonds(orientation))
}

/// Normalized VB product state from explicitly oriented bonds.
pub fn vb_state_from_bonds(n: usize, bonds: &[(usize, usize)]) -> Result<PureState> {
    let basis = sector_basis(n)?;
    let amp = vb_amplitudes(&basis, bonds)?;
    PureState::new(basis, amp)
}

/// Checks |Φ₁₃⟩|Φ₂₄⟩ = |Φ₁₂⟩|Φ₃₄⟩ + |Φ₁₄⟩|Φ₂₃⟩ on unnormalized amplitudes.
pub fn crossing_identity_check() -> bool {
    crossing_identity_residual() <= 1e-12
}

pub fn crossing_identity_residual() -> f64 {
    let basis = sector_basis(4).expect("n = 4 is valid");
    let crossed = vb_amplitudes(&basis, &[(1, 3), (2, 4)]).expect("valid bonds");
    let a = vb_amplitudes(&basis, &[(1, 2), (3, 4)]).expect("valid bonds");
    let b = vb_amplitudes(&basis, &[(1, 4), (2, 3)]).expect("valid bonds");
    crossed
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(c, (x, y))| (c - x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest least-squares residual of a crossing matching's VB state
/// against the span of the Rumer states. Zero when there are no crossings.
pub fn crossing_span_residual(n: usize) -> Result<f64> {
    let map = rumer_map(n)?;
    let cs = column_space(&map.columns());
    let mut worst: f64 = 0.0;
    for m in enumerate_all_matchings(n)? {
        if m.is_non_crossing() {
            continue;
        }
        let v = vb_amplitudes(&map.basis, &m.oriented_bonds(Orientation::Ascending))?;
        worst = worst.max(cs.residual(&v, 1e-10));
    }
    Ok(worst)
}

/// Rank threshold used for Rumer maps and solution sets, relative to σ_max.
pub const RANK_TOL: f64 = 1e-8;

/// Sector amplitudes (rows) of every Rumer state (columns), unnormalized.
#[derive(Debug, Clone)]
pub struct RumerMap {
    pub n: usize,
    pub basis: Arc<SectorBasis>,
    pub matchings: Vec<Matching>,
    pub orientation: Orientation,
    pub m: CMatrix,
    pub rank: usize,
}

impl RumerMap {
    pub fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.m.cols()).map(|j| self.m.column(j)).collect()
    }

    /// Amplitudes of Σⱼ coeffs[j]·(Rumer state j).
    pub fn combine(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.m.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.m.cols(),
                got: coeffs.len(),
            });
        }
        Ok(self.m.mul_vec(coeffs))
    }

    pub fn to_json(&self) -> RumerMapJson {
        RumerMapJson {
            n: self.n,
            orientation: self.orientation,
            rank: self.rank,
            matchings: self.matchings.clone(),
            rows: self
                .basis
                .states()
                .iter()
                .map(|&c| config_to_string(c, self.n))
                .collect(),
            re: (0..self.m.rows())
                .map(|i| self.m.row(i).iter().map(|z| z.re).collect())
                .collect(),
            im: (0..self.m.rows())
                .map(|i| self.m.row(i).iter().map(|z| z.im).collect())
                .collect(),
        }
    }
}

/// JSON export of a Rumer map: one row per sector configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RumerMapJson {
    pub n: usize,
    pub orientation: Orientation,
    pub rank: usize,
    pub matchings: Vec<Matching>,
    pub rows: Vec<String>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

pub fn rumer_map(n: usize) -> Result<RumerMap> {
    rumer_map_oriented(n, Orientation::Ascending)
}

/// Rumer map with a chosen bond orientation; asserts the expected rank.
pub fn rumer_map_oriented(n: usize, orientation: Orientation) -> Result<RumerMap> {
    if n > MAX_ALL_MATCHINGS {
        return Err(Error::InvalidSize {
            n,
            reason: "Rumer maps are built for n <= 10",
        });
    }
    let matchings = enumerate_rumer(n)?;
    let basis = sector_basis(n)?;
    let cols = matchings
        .iter()
        .map(|m| vb_amplitudes(&basis, &m.oriented_bonds(orientation)))
        .collect::<Result<Vec<_>>>()?;
    let rank = column_space(&cols).rank(RANK_TOL);
    let expected = singlet_count(n);
    if rank != expected {
        return Err(Error::Internal(format!(
            "Rumer map rank {rank} != C(n,n/2) - C(n,n/2-1) = {expected}"
        )));
    }
    Ok(RumerMap {
        n,
        basis,
        m: CMatrix::from_columns(&cols),
        matchings,
        orientation,
        rank,
    })
}

/// ⟨SᶻᵢSᶻⱼ⟩ of a VB product state: −1/4 on bonds, 0 elsewhere.
pub fn vb_szsz(matching: &Matching, i: usize, j: usize) -> f64 {
    if matching.contains_pair(i, j) {
        -0.25
    } else {
        0.0
    }
}

/// True when amplitude(flip k) = (−1)^{n/2} amplitude(k) for every k.
pub fn has_flip_parity(state: &PureState, tol: f64) -> bool {
    let basis = state.basis();
    if !basis.is_sz0() {
        return false;
    }
    let sign = if (basis.n() / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = state.amplitudes().iter().map(|z| z.norm()).fold(0.0, f64::max);
    basis.states().iter().all(|&cfg| {
        let a = state.amplitude(cfg);
        let b = state.amplitude(basis.flip(cfg));
        (b - a * sign).norm() <= tol * scale
    })
}

/// Human-readable bond list such as "(1,2)(3,4)".
pub fn format_bonds(bonds: &[(usize, usize)]) -> String {
    bonds.iter().map(|(a, b)| format!("({a},{b})")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::config_from_str;

    fn m(n: usize, pairs: &[(usize, usize)]) -> Matching {
        Matching::new(n, pairs.to_vec()).unwrap()
    }

    #[test]
    fn rumer_four_sites() {
        let r = enumerate_rumer(4).unwrap();
        assert_eq!(r, vec![m(4, &[(1, 2), (3, 4)]), m(4, &[(1, 4), (2, 3)])]);
    }

    #[test]
    fn rumer_six_sites_contains_named_diagrams() {
        let r = enumerate_rumer(6).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.contains(&m(6, &[(1, 2), (3, 6), (4, 5)])));
        assert!(r.contains(&m(6, &[(1, 6), (2, 5), (3, 4)])));
        assert!(r.iter().all(Matching::is_non_crossing));
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_rumer(8).unwrap().len(), 14);
        assert_eq!(enumerate_all_matchings(2).unwrap().len(), 1);
        assert_eq!(enumerate_all_matchings(4).unwrap().len(), 3);
        assert_eq!(enumerate_all_matchings(6).unwrap().len(), 15);
        assert_eq!(enumerate_all_matchings(10).unwrap().len(), 945);
        assert!(enumerate_rumer(5).is_err());
        assert!(enumerate_all_matchings(12).is_err());
    }

    #[test]
    fn crossing_detection() {
        assert!(chords_cross((1, 3), (2, 4)));
        assert!(!chords_cross((1, 4), (2, 3)));
        assert!(!chords_cross((1, 2), (3, 4)));
        assert!(!m(4, &[(1, 3), (2, 4)]).is_non_crossing());
    }

    #[test]
    fn matching_validation() {
        assert!(Matching::new(4, vec![(1, 2), (2, 3)]).is_err());
        assert!(Matching::new(4, vec![(1, 2)]).is_err());
        assert!(Matching::new(4, vec![(1, 2), (3, 5)]).is_err());
        assert_eq!(m(4, &[(4, 3), (2, 1)]).pairs(), &[(1, 2), (3, 4)]);
    }

    #[test]
    fn singlet_product_expansion() {
        let s = vb_state(&m(4, &[(1, 2), (3, 4)]), Orientation::Ascending).unwrap();
        let e = |x: &str| s.amplitude(config_from_str(x).unwrap()) * 2.0;
        assert!((e("udud").re - 1.0).abs() < 1e-14);
        assert!((e("uddu").re + 1.0).abs() < 1e-14);
        assert!((e("duud").re + 1.0).abs() < 1e-14);
        assert!((e("dudu").re - 1.0).abs() < 1e-14);
        assert!(e("uudd").norm() < 1e-14 && e("dduu").norm() < 1e-14);
    }

    #[test]
    fn two_site_singlet() {
        let s = vb_state(&m(2, &[(1, 2)]), Orientation::Ascending).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0b01).re - h).abs() < 1e-15);
        assert!((s.amplitude(0b10).re + h).abs() < 1e-15);
    }

    #[test]
    fn crossing_identity() {
        assert!(crossing_identity_check());
        assert_eq!(crossing_span_residual(2).unwrap(), 0.0);
        assert!(crossing_span_residual(6).unwrap() <= 1e-10);
    }

    #[test]
    fn cyclic_orientation() {
        assert_eq!(Orientation::Cyclic.orient(4, 1, 4), (4, 1));
        assert_eq!(Orientation::Cyclic.orient(4, 2, 3), (2, 3));
        assert_eq!(Orientation::Cyclic.orient(6, 1, 4), (1, 4));
        assert_eq!(Orientation::Cyclic.orient(6, 1, 6), (6, 1));
    }

    #[test]
    fn rumer_map_four_sites_table_pattern() {
        let map = rumer_map(4).unwrap();
        assert_eq!((map.m.rows(), map.m.cols(), map.rank), (6, 2, 2));
        // Row udud carries r1 − r2, uddu carries −r1, uudd carries +r2.
        let row = |s: &str| map.m.row(map.basis.index_of(config_from_str(s).unwrap()).unwrap()).to_vec();
        assert_eq!(row("udud").iter().map(|z| z.re).collect::<Vec<_>>(), vec![1.0, -1.0]);
        assert_eq!(row("uddu").iter().map(|z| z.re).collect::<Vec<_>>(), vec![-1.0, 0.0]);
        assert_eq!(row("uudd").iter().map(|z| z.re).collect::<Vec<_>>(), vec![0.0, 1.0]);
        assert_eq!(row("dduu").iter().map(|z| z.re).collect::<Vec<_>>(), vec![0.0, 1.0]);
    }

    #[test]
    fn matching_json_round_trip() {
        let x = m(6, &[(1, 2), (3, 6), (4, 5)]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"n":6,"pairs":[[1,2],[3,6],[4,5]]}"#);
        let back: Matching = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<Matching>(r#"{"n":4,"pairs":[[1,2],[2,3]]}"#).is_err());
    }
}

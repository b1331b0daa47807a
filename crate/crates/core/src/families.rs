//! Named maximal states: the four-qubit HS state and the six-qubit
//! solutions, assembled from oriented singlet bonds.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{config_from_str, sector_basis};
use crate::error::{Error, Result};
use crate::state::PureState;
use crate::vb::vb_amplitudes;

const B_12_36_45: [(usize, usize); 3] = [(1, 2), (3, 6), (4, 5)];
const B_23_14_56: [(usize, usize); 3] = [(2, 3), (1, 4), (5, 6)];
const B_16_25_34: [(usize, usize); 3] = [(1, 6), (2, 5), (3, 4)];
const B_12_34_56: [(usize, usize); 3] = [(1, 2), (3, 4), (5, 6)];
const B_12_34_65: [(usize, usize); 3] = [(1, 2), (3, 4), (6, 5)];
const B_14_25_36: [(usize, usize); 3] = [(1, 4), (2, 5), (3, 6)];
const B_61_23_45: [(usize, usize); 3] = [(6, 1), (2, 3), (4, 5)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Hs,
    HsConj,
    SixA,
    SixAConj,
    SixB,
    SixC,
    SixCConj,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Hs,
        Family::HsConj,
        Family::SixA,
        Family::SixAConj,
        Family::SixB,
        Family::SixC,
        Family::SixCConj,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hs => "hs",
            Family::HsConj => "hs-conj",
            Family::SixA => "six-a",
            Family::SixAConj => "six-a-conj",
            Family::SixB => "six-b",
            Family::SixC => "six-c",
            Family::SixCConj => "six-c-conj",
        }
    }

    pub fn n(self) -> usize {
        match self {
            Family::Hs | Family::HsConj => 4,
            _ => 6,
        }
    }

    /// Unnormalized state with the defining coefficients.
    pub fn raw(self) -> Result<PureState> {
        match self {
            Family::Hs => hs_raw(),
            Family::HsConj => hs_raw().map(|s| s.conj()),
            Family::SixA => six_a_raw(),
            Family::SixAConj => six_a_raw().map(|s| s.conj()),
            Family::SixB => six_b_raw(),
            Family::SixC => six_c_raw(),
            Family::SixCConj => six_c_raw().map(|s| s.conj()),
        }
    }

    /// Normalized, gauge-fixed state.
    pub fn state(self) -> Result<PureState> {
        Ok(self.raw()?.normalized().gauge_fixed())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::Parse(format!("unknown family '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Σ weight·(product of singlets over oriented bonds), unnormalized.
pub fn superpose(n: usize, terms: &[(Complex64, &[(usize, usize)])]) -> Result<PureState> {
    let basis = sector_basis(n)?;
    let mut amp = vec![c(0.0, 0.0); basis.dim()];
    for (w, bonds) in terms {
        let v = vb_amplitudes(&basis, bonds)?;
        amp.iter_mut().zip(&v).for_each(|(a, x)| *a += w * x);
    }
    PureState::unnormalized(basis, amp)
}

/// (udud + dudu) + ω₃(uddu + duud) + ω₃²(uudd + dduu).
fn hs_raw() -> Result<PureState> {
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let entries: Vec<(u32, Complex64)> = [
        ("udud", c(1.0, 0.0)),
        ("dudu", c(1.0, 0.0)),
        ("uddu", w),
        ("duud", w),
        ("uudd", w * w),
        ("dduu", w * w),
    ]
    .iter()
    .map(|&(b, a)| Ok((config_from_str(b)?, a)))
    .collect::<Result<_>>()?;
    PureState::from_entries(sector_basis(4)?, &entries, false)
}

/// i·V(12,36,45) + i²·V(23,14,56) + i³·V(16,25,34).
fn six_a_raw() -> Result<PureState> {
    superpose(
        6,
        &[
            (c(0.0, 1.0), &B_12_36_45),
            (c(-1.0, 0.0), &B_23_14_56),
            (c(0.0, -1.0), &B_16_25_34),
        ],
    )
}

/// −V(12,36,45) + V(23,14,56) − V(16,25,34).
fn six_b_raw() -> Result<PureState> {
    superpose(
        6,
        &[
            (c(-1.0, 0.0), &B_12_36_45),
            (c(1.0, 0.0), &B_23_14_56),
            (c(-1.0, 0.0), &B_16_25_34),
        ],
    )
}

/// i·V(12,34,65) + i²·V(14,25,36) + i³·V(61,23,45); the middle term has
/// crossing bonds.
fn six_c_raw() -> Result<PureState> {
    superpose(
        6,
        &[
            (c(0.0, 1.0), &B_12_34_65),
            (c(-1.0, 0.0), &B_14_25_36),
            (c(0.0, -1.0), &B_61_23_45),
        ],
    )
}

/// The one-parameter six-qubit family
/// (−1 + e^{iα})V(12,34,56) + (1 + e^{iα})V(61,23,45)
/// − V(12,36,45) − V(23,14,56) − V(16,25,34).
pub fn six_c_alpha(alpha: f64) -> Result<PureState> {
    let e = Complex64::from_polar(1.0, alpha);
    superpose(
        6,
        &[
            (e - 1.0, &B_12_34_56),
            (e + 1.0, &B_61_23_45),
            (c(-1.0, 0.0), &B_12_36_45),
            (c(-1.0, 0.0), &B_23_14_56),
            (c(-1.0, 0.0), &B_16_25_34),
        ],
    )
}

//! Zero-sum equations over unit-modulus unknowns.
//!
//! Four unit vectors sum to zero only as two antipodal pairs, and three only
//! as a rotated set of cube roots of unity. The solver branches over those
//! pairings for each equation and keeps the consistent combinations in a
//! union-find whose edges carry exact phase offsets in twelfths of a turn.
//! Each surviving combination is a family: one free phase per component.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phase offsets are kept modulo one turn in units of 2π/12.
const TURN: u8 = 12;
const HALF: u8 = 6;
const THIRD: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhasorSystem {
    pub unknowns: usize,
    /// Each equation: Σ sign·z[index] = 0, sign = ±1.
    pub equations: Vec<Vec<(i8, usize)>>,
}

impl PhasorSystem {
    pub fn new(unknowns: usize, equations: Vec<Vec<(i8, usize)>>) -> Result<Self> {
        for eq in &equations {
            if eq.len() < 2 {
                return Err(Error::Unsupported(
                    "phasor equations need at least two terms".into(),
                ));
            }
            let distinct: BTreeSet<usize> = eq.iter().map(|t| t.1).collect();
            if distinct.len() != eq.len() {
                return Err(Error::Unsupported(
                    "repeated unknown within one phasor equation".into(),
                ));
            }
            for &(s, k) in eq {
                if k >= unknowns {
                    return Err(Error::DimensionMismatch {
                        expected: unknowns,
                        got: k + 1,
                    });
                }
                if s != 1 && s != -1 {
                    return Err(Error::Unsupported(format!("term sign {s} is not ±1")));
                }
            }
        }
        Ok(Self {
            unknowns,
            equations,
        })
    }

    /// Largest |Σ sign·z| over the equations.
    pub fn residual(&self, z: &[Complex64]) -> f64 {
        self.equations
            .iter()
            .map(|eq| {
                eq.iter()
                    .map(|&(s, k)| z[k] * s as f64)
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }
}

/// A solution family: zₖ = exp(i(θ_{component(k)} + offset(k)·π/6)) for any
/// choice of the component phases θ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhasorFamily {
    /// Component of each unknown, numbered by first appearance.
    pub component: Vec<usize>,
    /// Offset of each unknown from its component phase, in twelfths of a turn.
    pub offset: Vec<u8>,
}

impl PhasorFamily {
    pub fn components(&self) -> usize {
        self.component.iter().max().map_or(0, |&c| c + 1)
    }

    /// Free phases left after removing the global phase.
    pub fn parameters(&self) -> usize {
        self.components().saturating_sub(1)
    }

    pub fn evaluate(&self, phases: &[f64]) -> Result<Vec<Complex64>> {
        if phases.len() != self.components() {
            return Err(Error::DimensionMismatch {
                expected: self.components(),
                got: phases.len(),
            });
        }
        Ok(self
            .component
            .iter()
            .zip(&self.offset)
            .map(|(&c, &o)| Complex64::from_polar(1.0, phases[c] + o as f64 * PI / 6.0))
            .collect())
    }

    /// Whether unit-modulus values lie in this family within `tol`.
    pub fn contains(&self, z: &[Complex64], tol: f64) -> bool {
        if z.len() != self.component.len() {
            return false;
        }
        let mut anchor: Vec<Option<Complex64>> = vec![None; self.components()];
        for (k, (&c, &o)) in self.component.iter().zip(&self.offset).enumerate() {
            if (z[k].norm() - 1.0).abs() > tol {
                return false;
            }
            let base = z[k] * Complex64::from_polar(1.0, -(o as f64) * PI / 6.0);
            match anchor[c] {
                None => anchor[c] = Some(base),
                Some(a) if (a - base).norm() > tol => return false,
                _ => {}
            }
        }
        true
    }
}

/// Union-find over unknowns with offset(k) = phase(k) − phase(parent(k)).
#[derive(Clone)]
struct PhaseUnion {
    parent: Vec<usize>,
    offset: Vec<u8>,
}

impl PhaseUnion {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            offset: vec![0; n],
        }
    }

    /// Root of k and phase(k) − phase(root).
    fn find(&self, mut k: usize) -> (usize, u8) {
        let mut acc = 0u8;
        while self.parent[k] != k {
            acc = (acc + self.offset[k]) % TURN;
            k = self.parent[k];
        }
        (k, acc)
    }

    /// Imposes phase(b) = phase(a) + d; false on contradiction.
    fn relate(&mut self, a: usize, b: usize, d: u8) -> bool {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        if ra == rb {
            return (oa + d) % TURN == ob;
        }
        // phase(rb) = phase(ra) + oa + d − ob
        self.parent[rb] = ra;
        self.offset[rb] = (oa + d + TURN - ob) % TURN;
        true
    }

    fn family(&self) -> PhasorFamily {
        let n = self.parent.len();
        let mut label: Vec<Option<usize>> = vec![None; n];
        let mut lead: Vec<u8> = vec![0; n];
        let mut next = 0;
        let mut component = vec![0; n];
        let mut offset = vec![0; n];
        for k in 0..n {
            let (r, o) = self.find(k);
            let c = *label[r].get_or_insert_with(|| {
                lead[r] = o;
                next += 1;
                next - 1
            });
            component[k] = c;
            offset[k] = (o + TURN - lead[r]) % TURN;
        }
        PhasorFamily { component, offset }
    }
}

/// Effective term phase: sign −1 adds half a turn.
fn term_shift(sign: i8) -> u8 {
    if sign < 0 {
        HALF
    } else {
        0
    }
}

/// The ways one equation can vanish, as lists of (a, b, d) meaning
/// phase(z_b) = phase(z_a) + d.
fn branches(eq: &[(i8, usize)]) -> Result<Vec<Vec<(usize, usize, u8)>>> {
    // w = s·z = −w' gives phase(z') = phase(z) + π + shift(s) − shift(s').
    let anti = |x: (i8, usize), y: (i8, usize)| {
        let d = (HALF + term_shift(x.0) + TURN - term_shift(y.0)) % TURN;
        (x.1, y.1, d)
    };
    let rot = |x: (i8, usize), y: (i8, usize), r: u8| {
        let d = (r + term_shift(x.0) + TURN - term_shift(y.0)) % TURN;
        (x.1, y.1, d)
    };
    match *eq {
        [a, b] => Ok(vec![vec![anti(a, b)]]),
        [a, b, c] => Ok([THIRD, 2 * THIRD]
            .into_iter()
            .map(|r| vec![rot(a, b, r), rot(a, c, 2 * r % TURN)])
            .collect()),
        [a, b, c, d] => Ok(vec![
            vec![anti(a, b), anti(c, d)],
            vec![anti(a, c), anti(b, d)],
            vec![anti(a, d), anti(b, c)],
        ]),
        _ => Err(Error::Unsupported(format!(
            "phasor equations with {} terms",
            eq.len()
        ))),
    }
}

/// All solution families of the system, sorted. Families that are special
/// cases of another family are dropped.
pub fn solve_phasor_system(sys: &PhasorSystem) -> Result<Vec<PhasorFamily>> {
    let options = sys
        .equations
        .iter()
        .map(|eq| branches(eq))
        .collect::<Result<Vec<_>>>()?;
    let mut found = BTreeSet::new();
    descend(&options, 0, PhaseUnion::new(sys.unknowns), &mut found);
    if found.is_empty() {
        return Err(Error::NoSolution);
    }
    let all: Vec<PhasorFamily> = found.into_iter().collect();
    let families = maximal_families(&all);
    // Substitution check at a generic point of each family.
    for f in &families {
        let phases: Vec<f64> = (0..f.components()).map(|c| 0.37 + 1.13 * c as f64).collect();
        let r = sys.residual(&f.evaluate(&phases)?);
        if r > 1e-12 {
            return Err(Error::Internal(format!("phasor family residual {r:e}")));
        }
    }
    Ok(families)
}

/// One way to satisfy an equation: links (a, b, offset of b from a).
type Branch = Vec<(usize, usize, u8)>;

fn descend(
    options: &[Vec<Branch>],
    depth: usize,
    uf: PhaseUnion,
    out: &mut BTreeSet<PhasorFamily>,
) {
    let Some(choices) = options.get(depth) else {
        out.insert(uf.family());
        return;
    };
    for branch in choices {
        let mut next = uf.clone();
        if branch.iter().all(|&(a, b, d)| next.relate(a, b, d)) {
            descend(options, depth + 1, next, out);
        }
    }
}

fn maximal_families(families: &[PhasorFamily]) -> Vec<PhasorFamily> {
    families
        .iter()
        .filter(|f| {
            !families
                .iter()
                .any(|g| g != *f && g.components() > f.components() && refines(g, f))
        })
        .cloned()
        .collect()
}

/// True when every member of `small` is also a member of `big`.
fn refines(big: &PhasorFamily, small: &PhasorFamily) -> bool {
    // Unknowns together in a component of `big` must be together in `small`
    // with the same relative offset.
    let mut anchor: Vec<Option<(usize, u8, usize, u8)>> = vec![None; big.components()];
    for k in 0..big.component.len() {
        let (bc, bo) = (big.component[k], big.offset[k]);
        let (sc, so) = (small.component[k], small.offset[k]);
        match anchor[bc] {
            None => anchor[bc] = Some((k, bo, sc, so)),
            Some((_, bo0, sc0, so0)) => {
                if sc != sc0 || (so + TURN - so0) % TURN != (bo + TURN - bo0) % TURN {
                    return false;
                }
            }
        }
    }
    true
}

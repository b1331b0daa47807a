//! Numeric witness that equal pair correlations maximize the summed pair
//! entropy (or i-concurrence) under the Sᶻ = 0 sum rule Σⱼ cⱼ = −1/4.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::entanglement::{entropy_closed_form, homogeneous_correlation, iconcurrence_closed_form};
use crate::error::{Error, Result};

/// Allowed excess of a sampled assignment over the uniform one.
pub const OPTIMALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Entropy,
    IConcurrence,
}

impl Objective {
    fn term(self, c: f64) -> Result<f64> {
        match self {
            Objective::Entropy => entropy_closed_form(c),
            Objective::IConcurrence => iconcurrence_closed_form(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityWitness {
    pub n: usize,
    pub objective: Objective,
    pub trials: usize,
    pub uniform_value: f64,
    /// Largest (sampled − uniform); negative when every sample is worse.
    pub max_excess: f64,
    /// Assignment attaining `max_excess`.
    pub worst: Vec<f64>,
    pub passed: bool,
}

/// Samples correlation assignments {cⱼ}, j ≠ i, with cⱼ ∈ [−1/4, 1/12] and
/// Σ cⱼ = −1/4, and checks that none beats cⱼ = −1/(4(n − 1)).
///
/// Even trials draw Dirichlet points of the constraint simplex (shrunk toward
/// the uniform point when they leave the box); odd trials perturb the uniform
/// point along a random zero-sum direction at a random log scale.
pub fn verify_homogeneity_optimal(
    n: usize,
    trials: usize,
    seed: u64,
    objective: Objective,
) -> Result<OptimalityWitness> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidSize {
            n,
            reason: "needs an even n >= 4",
        });
    }
    let m = n - 1;
    // Shifted variables xⱼ = cⱼ + 1/4 live in [0, 1/3] with Σ xⱼ = (n − 2)/4.
    let total = (n as f64 - 2.0) / 4.0;
    let upper = 1.0 / 3.0;
    let centre = homogeneous_correlation(n) + 0.25;

    let value = |x: &[f64]| -> Result<f64> {
        x.iter().map(|&xj| objective.term(xj - 0.25)).sum()
    };
    let uniform_value = value(&vec![centre; m])?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_excess = 0.0;
    let mut worst = vec![centre - 0.25; m];
    let mut x = vec![0.0; m];
    for t in 0..trials {
        if t % 2 == 0 {
            let w: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let s: f64 = w.iter().sum();
            for (xj, wj) in x.iter_mut().zip(&w) {
                *xj = total * wj / s;
            }
            shrink_into_box(&mut x, centre, upper, rng.random::<f64>());
        } else {
            x.iter_mut().for_each(|xj| *xj = centre);
            let mut dir: Vec<f64> = (0..m).map(|_| rng.random::<f64>() - 0.5).collect();
            let mean = dir.iter().sum::<f64>() / m as f64;
            dir.iter_mut().for_each(|d| *d -= mean);
            let scale = 10f64.powf(-6.0 + 5.0 * rng.random::<f64>());
            for (xj, d) in x.iter_mut().zip(&dir) {
                *xj += scale * d;
            }
            shrink_into_box(&mut x, centre, upper, 1.0);
        }
        let excess = value(&x)? - uniform_value;
        if t == 0 || excess > max_excess {
            max_excess = excess;
            worst = x.iter().map(|xj| xj - 0.25).collect();
        }
    }
    Ok(OptimalityWitness {
        n,
        objective,
        trials,
        uniform_value,
        max_excess,
        worst,
        passed: max_excess <= OPTIMALITY_TOL,
    })
}

/// Pulls x toward the centre until every coordinate lies in [0, upper];
/// `keep` in (0, 1] scales the largest feasible step. Preserves Σ x.
fn shrink_into_box(x: &mut [f64], centre: f64, upper: f64, keep: f64) {
    let mut t: f64 = 1.0;
    for &xj in x.iter() {
        let d = xj - centre;
        if xj > upper {
            t = t.min((upper - centre) / d);
        } else if xj < 0.0 {
            t = t.min(-centre / d);
        }
    }
    if t < 1.0 {
        let t = t * keep;
        x.iter_mut().for_each(|xj| *xj = centre + t * (*xj - centre));
    }
}

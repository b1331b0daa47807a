//! Fixed-magnetization bases of N spin-1/2 sites.
//!
//! A configuration is an N-bit word; bit `i` (0-based, site `i + 1`) set means
//! the spin at that site points up. Sites are 1-based in every public API.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_SITES: usize = 12;

/// Configurations of `n` sites with exactly `n_up` up-spins, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n: usize,
    n_up: usize,
    states: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl SectorBasis {
    /// Any magnetization sector; used for vectors that leave Sᶻ = 0.
    pub fn new(n: usize, n_up: usize) -> Result<Self> {
        if n == 0 || n > MAX_SITES {
            return Err(Error::InvalidSize {
                n,
                reason: "site count must be in 1..=12",
            });
        }
        if n_up > n {
            return Err(Error::InvalidSize {
                n,
                reason: "more up-spins than sites",
            });
        }
        let states: Vec<u32> = (0u32..(1 << n))
            .filter(|c| c.count_ones() as usize == n_up)
            .collect();
        let index = states.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        Ok(Self {
            n,
            n_up,
            states,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    /// Twice the total Sᶻ of every configuration in the sector.
    pub fn two_sz(&self) -> i32 {
        2 * self.n_up as i32 - self.n as i32
    }

    pub fn is_sz0(&self) -> bool {
        2 * self.n_up == self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn config(&self, k: usize) -> u32 {
        self.states[k]
    }

    pub fn index_of(&self, config: u32) -> Option<usize> {
        self.index.get(&config).copied()
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n {
            return Err(Error::SiteOutOfRange { site, n: self.n });
        }
        Ok(())
    }

    pub fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::InvalidPair { i, j });
        }
        Ok(())
    }

    /// All-spins-flipped configuration.
    pub fn flip(&self, config: u32) -> u32 {
        !config & ((1u32 << self.n) - 1)
    }
}

/// The Sᶻ = 0 sector for an even number of sites, 2 ≤ n ≤ 12.
pub fn sector_basis(n: usize) -> Result<Arc<SectorBasis>> {
    if !n.is_multiple_of(2) || !(2..=MAX_SITES).contains(&n) {
        return Err(Error::InvalidSize {
            n,
            reason: "n must be even with 2 <= n <= 12",
        });
    }
    SectorBasis::new(n, n / 2).map(Arc::new)
}

/// Spin value ±1/2 at a 1-based site.
#[inline]
pub fn spin_z(config: u32, site: usize) -> f64 {
    if config >> (site - 1) & 1 == 1 {
        0.5
    } else {
        -0.5
    }
}

#[inline]
pub fn is_up(config: u32, site: usize) -> bool {
    config >> (site - 1) & 1 == 1
}

/// "u"/"d" string with site 1 leftmost.
pub fn config_to_string(config: u32, n: usize) -> String {
    (1..=n)
        .map(|s| if is_up(config, s) { 'u' } else { 'd' })
        .collect()
}

pub fn config_from_str(bits: &str) -> Result<u32> {
    if bits.is_empty() || bits.len() > MAX_SITES {
        return Err(Error::Parse(format!("configuration '{bits}' has bad length")));
    }
    bits.chars().enumerate().try_fold(0u32, |acc, (k, ch)| match ch {
        'u' | 'U' | '1' => Ok(acc | 1 << k),
        'd' | 'D' | '0' => Ok(acc),
        other => Err(Error::Parse(format!(
            "unexpected character '{other}' in configuration '{bits}'"
        ))),
    })
}

/// Binomial coefficient; exact for the sizes used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// C(n, n/2) − C(n, n/2 − 1): dimension of the total-singlet space.
pub fn singlet_count(n: usize) -> usize {
    let half = n / 2;
    binomial(n, half) - if half == 0 { 0 } else { binomial(n, half - 1) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_sizes() {
        assert_eq!(sector_basis(4).unwrap().dim(), 6);
        assert_eq!(sector_basis(6).unwrap().dim(), 20);
        assert_eq!(sector_basis(8).unwrap().dim(), 70);
        assert_eq!(sector_basis(12).unwrap().dim(), 924);
    }

    #[test]
    fn rejects_bad_sizes() {
        for n in [0, 3, 5, 14] {
            assert!(matches!(sector_basis(n), Err(Error::InvalidSize { .. })));
        }
    }

    #[test]
    fn ordering_and_index_are_inverse() {
        let b = sector_basis(8).unwrap();
        assert!(b.states().windows(2).all(|w| w[0] < w[1]));
        for (k, &c) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(c), Some(k));
            assert_eq!(c.count_ones(), 4);
        }
    }

    #[test]
    fn string_round_trip() {
        let c = config_from_str("uddu").unwrap();
        assert_eq!(c, 0b1001);
        assert_eq!(config_to_string(c, 4), "uddu");
        assert!(config_from_str("udxu").is_err());
    }

    #[test]
    fn singlet_counts() {
        let got: Vec<_> = [2, 4, 6, 8, 10].iter().map(|&n| singlet_count(n)).collect();
        assert_eq!(got, vec![1, 2, 5, 14, 42]);
    }
}

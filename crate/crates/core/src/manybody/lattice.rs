use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_HILBERT_CAP: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Interaction {
    /// On-site `(U/2) n (n - 1)`.
    Contact { u: f64 },
    /// At most one boson per site.
    HardCore,
    /// `C6 / d^6` between sites up to `cutoff_sites` apart; the on-site value
    /// is capped at `C6` (contact convention).
    VdWTail { c6: f64, cutoff_sites: usize },
}

fn default_cap() -> usize {
    DEFAULT_HILBERT_CAP
}

fn default_hopping() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_sites: usize,
    pub n_bosons: usize,
    #[serde(default = "default_hopping")]
    pub hopping: f64,
    #[serde(default)]
    pub boundary: Boundary,
    pub interaction: Interaction,
    #[serde(default = "default_cap")]
    pub hilbert_cap: usize,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, n_bosons: usize, boundary: Boundary, interaction: Interaction) -> Self {
        Self {
            n_sites,
            n_bosons,
            hopping: 1.0,
            boundary,
            interaction,
            hilbert_cap: DEFAULT_HILBERT_CAP,
        }
    }

    pub fn max_occupancy(&self) -> usize {
        match self.interaction {
            Interaction::HardCore => 1,
            _ => self.n_bosons,
        }
    }

    pub fn filling(&self) -> f64 {
        self.n_bosons as f64 / self.n_sites as f64
    }

    /// Site separation, using the minimum image on rings.
    pub fn distance(&self, i: usize, j: usize) -> usize {
        let d = i.abs_diff(j);
        match self.boundary {
            Boundary::Open => d,
            Boundary::Periodic => d.min(self.n_sites - d),
        }
    }

    /// Number of fixed-N states with occupancies bounded by `max_occupancy`.
    pub fn dimension(&self) -> u128 {
        let (l, n, m) = (self.n_sites, self.n_bosons, self.max_occupancy());
        // ways[k] = states of the sites seen so far holding k bosons
        let mut ways = vec![0u128; n + 1];
        ways[0] = 1;
        for _ in 0..l {
            let mut next = vec![0u128; n + 1];
            for (k, &w) in ways.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for add in 0..=m.min(n - k) {
                    next[k + add] = next[k + add].saturating_add(w);
                }
            }
            ways = next;
        }
        ways[n]
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::validation("n_sites", "must be >= 2"));
        }
        if self.n_bosons == 0 {
            return Err(Error::validation("n_bosons", "must be >= 1"));
        }
        if !(self.hopping.is_finite() && self.hopping > 0.0) {
            return Err(Error::validation("hopping", "must be finite and > 0"));
        }
        if self.n_bosons > self.n_sites * self.max_occupancy() {
            return Err(Error::validation("n_bosons", "exceeds n_sites * max occupancy"));
        }
        match self.interaction {
            Interaction::Contact { u } if !(u.is_finite() && u >= 0.0) => {
                return Err(Error::validation("interaction.u", "must be finite and >= 0"))
            }
            Interaction::VdWTail { c6, .. } if !(c6.is_finite() && c6 >= 0.0) => {
                return Err(Error::validation("interaction.c6", "must be finite and >= 0"))
            }
            _ => {}
        }
        let dim = self.dimension();
        if dim > self.hilbert_cap as u128 {
            return Err(Error::HilbertCap {
                dim: dim.min(usize::MAX as u128) as usize,
                cap: self.hilbert_cap,
            });
        }
        let bits = bits_per_site(self.max_occupancy());
        if bits * self.n_sites > 128 {
            return Err(Error::validation("n_sites", "occupation key exceeds 128 bits"));
        }
        Ok(())
    }
}

fn bits_per_site(max_occ: usize) -> usize {
    (usize::BITS - max_occ.leading_zeros()).max(1) as usize
}

/// Fixed-N occupation basis, ordered by packed occupation key.
#[derive(Debug, Clone)]
pub struct Basis {
    pub n_sites: usize,
    bits: usize,
    keys: Vec<u128>,
}

impl Basis {
    pub fn new(spec: &LatticeSpec) -> Result<Self> {
        spec.validate()?;
        let bits = bits_per_site(spec.max_occupancy());
        let mut keys = Vec::with_capacity(spec.dimension() as usize);
        let mut occ = vec![0usize; spec.n_sites];
        fill(&mut occ, 0, spec.n_bosons, spec.max_occupancy(), bits, &mut keys);
        keys.sort_unstable();
        Ok(Self {
            n_sites: spec.n_sites,
            bits,
            keys,
        })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, idx: usize) -> u128 {
        self.keys[idx]
    }

    pub fn occupation(&self, key: u128, site: usize) -> usize {
        ((key >> (site * self.bits)) & ((1u128 << self.bits) - 1)) as usize
    }

    pub fn occupations(&self, idx: usize) -> Vec<usize> {
        (0..self.n_sites).map(|s| self.occupation(self.keys[idx], s)).collect()
    }

    /// Key with one boson moved from `from` to `to`.
    pub fn hop(&self, key: u128, from: usize, to: usize) -> u128 {
        key - (1u128 << (from * self.bits)) + (1u128 << (to * self.bits))
    }

    pub fn index(&self, key: u128) -> Option<usize> {
        self.keys.binary_search(&key).ok()
    }
}

fn fill(occ: &mut [usize], site: usize, left: usize, max: usize, bits: usize, out: &mut Vec<u128>) {
    if site == occ.len() {
        if left == 0 {
            out.push(occ.iter().enumerate().fold(0u128, |k, (s, &n)| k | ((n as u128) << (s * bits))));
        }
        return;
    }
    let remaining_sites = occ.len() - site - 1;
    for n in 0..=max.min(left) {
        if left - n > remaining_sites * max {
            continue;
        }
        occ[site] = n;
        fill(occ, site + 1, left - n, max, bits, out);
    }
    occ[site] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let hc = LatticeSpec::new(12, 3, Boundary::Periodic, Interaction::HardCore);
        assert_eq!(hc.dimension(), 220);
        assert_eq!(Basis::new(&hc).unwrap().len(), 220);
        let soft = LatticeSpec::new(4, 2, Boundary::Open, Interaction::Contact { u: 1.0 });
        assert_eq!(soft.dimension(), 10);
        assert_eq!(Basis::new(&soft).unwrap().len(), 10);
    }

    #[test]
    fn cap_is_enforced() {
        let mut s = LatticeSpec::new(30, 15, Boundary::Open, Interaction::HardCore);
        s.hilbert_cap = 1000;
        match s.validate() {
            Err(Error::HilbertCap { dim, cap }) => assert_eq!((dim, cap), (155_117_520, 1000)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let s = LatticeSpec::new(8, 2, Boundary::Periodic, Interaction::VdWTail { c6: 5.0, cutoff_sites: 3 });
        let back: LatticeSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn minimum_image() {
        let s = LatticeSpec::new(10, 1, Boundary::Periodic, Interaction::HardCore);
        assert_eq!(s.distance(0, 9), 1);
        assert_eq!(s.distance(2, 7), 5);
    }
}

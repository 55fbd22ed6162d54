use serde::Serialize;

use crate::error::Result;
use crate::exec::Exec;

use super::correlation::CorrelationData;
use super::hamiltonian::build_hamiltonian;
use super::lanczos::{lowest_eigenpair, LanczosOptions};
use super::lattice::{Basis, Boundary, LatticeSpec};

#[derive(Debug, Clone, Serialize)]
pub struct GroundStateResult {
    pub spec: LatticeSpec,
    pub dimension: usize,
    pub energy: f64,
    pub residual: f64,
    pub norm_estimate: f64,
    pub matvecs: usize,
    pub density: Vec<f64>,
    /// `<n_i (n_j - delta_ij)>` for every site pair.
    pub pair_density: Vec<Vec<f64>>,
    pub g2: CorrelationData,
    #[serde(skip)]
    pub state: Vec<f64>,
}

impl GroundStateResult {
    /// `g2(i, j) = <b_i^+ b_j^+ b_j b_i> / (<n_i> <n_j>)`.
    pub fn g2_pair(&self, i: usize, j: usize) -> f64 {
        self.pair_density[i][j] / (self.density[i] * self.density[j])
    }
}

fn densities(basis: &Basis, state: &[f64], exec: Exec) -> (Vec<f64>, Vec<Vec<f64>>) {
    let l = basis.n_sites;
    // per-site-row accumulation keeps a fixed summation order
    let pair: Vec<Vec<f64>> = exec.map_range(l, |i| {
        let mut row = vec![0.0; l];
        for (s, &a) in state.iter().enumerate() {
            let w = a * a;
            if w == 0.0 {
                continue;
            }
            let key = basis.key(s);
            let ni = basis.occupation(key, i);
            if ni == 0 {
                continue;
            }
            for (j, r) in row.iter_mut().enumerate() {
                let nj = basis.occupation(key, j);
                let nj = if i == j { nj - 1 } else { nj };
                *r += w * (ni * nj) as f64;
            }
        }
        row
    });
    let density = exec.map_range(l, |i| {
        state
            .iter()
            .enumerate()
            .map(|(s, a)| a * a * basis.occupation(basis.key(s), i) as f64)
            .sum()
    });
    (density, pair)
}

/// Average `g2(i, j)` over all site pairs at each separation.
pub fn distance_averaged_g2(spec: &LatticeSpec, density: &[f64], pair: &[Vec<f64>]) -> CorrelationData {
    let l = spec.n_sites;
    let r_max = match spec.boundary {
        Boundary::Open => l - 1,
        Boundary::Periodic => l / 2,
    };
    let mut sums = vec![0.0; r_max + 1];
    let mut counts = vec![0usize; r_max + 1];
    for i in 0..l {
        for j in 0..l {
            let d = spec.distance(i, j);
            let den = density[i] * density[j];
            if den > 0.0 {
                sums[d] += pair[i][j] / den;
                counts[d] += 1;
            }
        }
    }
    let (r, values): (Vec<f64>, Vec<f64>) = (0..=r_max)
        .filter(|&d| counts[d] > 0)
        .map(|d| (d as f64, sums[d] / counts[d] as f64))
        .unzip();
    CorrelationData::new(
        r,
        values,
        spec.filling(),
        (spec.boundary == Boundary::Periodic).then_some(l as f64),
    )
}

pub fn ground_state(spec: &LatticeSpec, opts: &LanczosOptions, exec: Exec) -> Result<GroundStateResult> {
    let (basis, h) = build_hamiltonian(spec, exec)?;
    let pair = lowest_eigenpair(&h, opts)?;
    let (density, pair_density) = densities(&basis, &pair.vector, exec);
    let g2 = distance_averaged_g2(spec, &density, &pair_density);
    Ok(GroundStateResult {
        spec: *spec,
        dimension: basis.len(),
        energy: pair.energy,
        residual: pair.residual,
        norm_estimate: pair.norm_estimate,
        matvecs: pair.matvecs,
        density,
        pair_density,
        g2,
        state: pair.vector,
    })
}

/// Sum of the lowest `n` single-particle levels `-2J cos(pi j / (L + 1))` of an
/// open chain: the hard-core ground energy via the fermion mapping.
pub fn free_fermion_energy(n_sites: usize, n_bosons: usize, hopping: f64) -> f64 {
    let mut levels: Vec<f64> = (1..=n_sites)
        .map(|j| -2.0 * hopping * (std::f64::consts::PI * j as f64 / (n_sites + 1) as f64).cos())
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.iter().take(n_bosons).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manybody::lattice::Interaction;

    #[test]
    fn hard_core_open_chain_is_free_fermions() {
        let spec = LatticeSpec::new(4, 2, Boundary::Open, Interaction::HardCore);
        let r = ground_state(&spec, &LanczosOptions::default(), Exec::Parallel).unwrap();
        assert!((r.energy + 5f64.sqrt()).abs() < 1e-10);
        assert_eq!(r.g2.values[0], 0.0);
    }

    #[test]
    fn sum_rules() {
        let spec = LatticeSpec::new(8, 3, Boundary::Periodic, Interaction::Contact { u: 1.0 });
        let r = ground_state(&spec, &LanczosOptions::default(), Exec::Parallel).unwrap();
        let n = 3.0;
        assert!((r.density.iter().sum::<f64>() - n).abs() < 1e-8);
        let total: f64 = r.pair_density.iter().flatten().sum();
        assert!((total - n * (n - 1.0)).abs() < 1e-8);
        for i in 0..8 {
            for j in 0..8 {
                assert!((r.pair_density[i][j] - r.pair_density[j][i]).abs() < 1e-12);
            }
            assert!((r.density[i] - n / 8.0).abs() < 1e-8);
        }
    }

    #[test]
    fn non_interacting_condensation() {
        let spec = LatticeSpec::new(6, 3, Boundary::Open, Interaction::Contact { u: 0.0 });
        let r = ground_state(&spec, &LanczosOptions::default(), Exec::Parallel).unwrap();
        assert!((r.energy - 3.0 * free_fermion_energy(6, 1, 1.0)).abs() < 1e-9);
    }

    #[test]
    fn energy_rises_with_repulsion() {
        let mut last = f64::INFINITY;
        for u in [100.0, 30.0, 10.0, 3.0, 1.0] {
            let spec = LatticeSpec::new(8, 3, Boundary::Open, Interaction::Contact { u });
            let e = ground_state(&spec, &LanczosOptions::default(), Exec::Parallel).unwrap().energy;
            assert!(e < last);
            last = e;
        }
    }
}

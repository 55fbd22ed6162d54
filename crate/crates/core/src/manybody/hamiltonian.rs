use crate::error::Result;
use crate::exec::Exec;

use super::lattice::{Basis, Boundary, Interaction, LatticeSpec};

/// Real symmetric matrix in compressed-row form.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    pub dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    exec: Exec,
}

impl SparseHamiltonian {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = H x`. Each row is summed in a fixed order, so the result does not
    /// depend on the thread count.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.exec.fill(y, |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(|k| self.vals[k] * x[self.cols[k]])
                .sum()
        });
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_estimate(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.vals[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }
}

pub(crate) fn bonds(spec: &LatticeSpec) -> Vec<(usize, usize)> {
    let l = spec.n_sites;
    let mut b: Vec<(usize, usize)> = (0..l - 1).map(|i| (i, i + 1)).collect();
    if spec.boundary == Boundary::Periodic && l > 2 {
        b.push((l - 1, 0));
    }
    b
}

pub(crate) fn diagonal(spec: &LatticeSpec, occ: &[usize]) -> f64 {
    let onsite = |u: f64| occ.iter().map(|&n| 0.5 * u * (n * n.saturating_sub(1)) as f64).sum::<f64>();
    match spec.interaction {
        Interaction::HardCore => 0.0,
        Interaction::Contact { u } => onsite(u),
        Interaction::VdWTail { c6, cutoff_sites } => {
            let mut e = onsite(c6);
            for i in 0..occ.len() {
                if occ[i] == 0 {
                    continue;
                }
                for j in i + 1..occ.len() {
                    let d = spec.distance(i, j);
                    if occ[j] > 0 && d <= cutoff_sites {
                        e += c6 / (d as f64).powi(6) * (occ[i] * occ[j]) as f64;
                    }
                }
            }
            e
        }
    }
}

/// Bose-Hubbard style Hamiltonian `-J sum (b_i^+ b_j + h.c.)` plus the
/// density-density interaction of `spec`.
pub fn build_hamiltonian(spec: &LatticeSpec, exec: Exec) -> Result<(Basis, SparseHamiltonian)> {
    let basis = Basis::new(spec)?;
    let bonds = bonds(spec);
    let max = spec.max_occupancy();
    let j = spec.hopping;
    let rows: Vec<Vec<(usize, f64)>> = exec.map_range(basis.len(), |r| {
        let key = basis.key(r);
        let occ = basis.occupations(r);
        let mut row = Vec::with_capacity(2 * bonds.len() + 1);
        let d = diagonal(spec, &occ);
        if d != 0.0 {
            row.push((r, d));
        }
        for &(a, b) in &bonds {
            for (from, to) in [(a, b), (b, a)] {
                if occ[from] == 0 || occ[to] >= max {
                    continue;
                }
                let amp = -j * ((occ[from] * (occ[to] + 1)) as f64).sqrt();
                let c = basis.index(basis.hop(key, from, to)).expect("hop stays in basis");
                row.push((c, amp));
            }
        }
        row.sort_by_key(|&(c, _)| c);
        // merge duplicates (two-site rings)
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for (c, v) in row {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        merged
    });
    let mut row_ptr = Vec::with_capacity(basis.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for row in rows {
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    let h = SparseHamiltonian {
        dim: basis.len(),
        row_ptr,
        cols,
        vals,
        exec,
    };
    Ok((basis, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn spectrum(spec: &LatticeSpec) -> Vec<f64> {
        let (_, h) = build_hamiltonian(spec, Exec::Sequential).unwrap();
        let mut e: Vec<f64> = SymmetricEigen::new(h.to_dense()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn single_particle_ring() {
        for u in [0.0, 3.0] {
            let spec = LatticeSpec::new(4, 1, Boundary::Periodic, Interaction::Contact { u });
            let e = spectrum(&spec);
            for (a, b) in e.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_and_row_sparse() {
        let spec = LatticeSpec::new(6, 3, Boundary::Periodic, Interaction::Contact { u: 2.0 });
        let (_, h) = build_hamiltonian(&spec, Exec::Parallel).unwrap();
        let d = h.to_dense();
        assert_eq!(d.clone(), d.transpose());
        assert!(h.nnz() < h.dim * h.dim / 2);
    }

    #[test]
    fn vdw_diagonal() {
        let spec = LatticeSpec::new(6, 2, Boundary::Open, Interaction::VdWTail { c6: 64.0, cutoff_sites: 3 });
        assert_eq!(diagonal(&spec, &[1, 0, 1, 0, 0, 0]), 1.0);
        assert_eq!(diagonal(&spec, &[2, 0, 0, 0, 0, 0]), 64.0);
        assert_eq!(diagonal(&spec, &[1, 0, 0, 0, 1, 0]), 0.0);
    }

    #[test]
    fn parallel_build_matches_sequential() {
        let spec = LatticeSpec::new(8, 4, Boundary::Periodic, Interaction::Contact { u: 1.5 });
        let (_, a) = build_hamiltonian(&spec, Exec::Sequential).unwrap();
        let (_, b) = build_hamiltonian(&spec, Exec::Parallel).unwrap();
        assert_eq!(a.to_dense(), b.to_dense());
    }
}

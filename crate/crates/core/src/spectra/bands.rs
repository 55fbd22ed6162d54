use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::MomentumGrid;
use crate::linalg::{eigen, Eigen};
use crate::params::PhysicalParams;
use crate::spectra::{scheme_matrix, Scheme};
use crate::C64;

/// Eigenpairs at one momentum, indexed by tracked branch.
#[derive(Debug, Clone, Serialize)]
pub struct BandPoint {
    pub k: f64,
    pub eigenvalues: Vec<C64>,
    /// `vectors[b][f]`: amplitude of field `f` in branch `b`.
    pub vectors: Vec<Vec<C64>>,
}

/// Continuity-ordered dispersion branches over a momentum window.
#[derive(Debug, Clone, Serialize)]
pub struct BandStructure {
    pub scheme: Scheme,
    pub params: PhysicalParams,
    pub k_grid: MomentumGrid,
    pub field_labels: Vec<String>,
    pub points: Vec<BandPoint>,
    /// Index of the dark branch.
    pub dark_branch: usize,
}

impl BandStructure {
    pub fn n_branches(&self) -> usize {
        self.scheme.dimension()
    }

    pub fn branch(&self, b: usize) -> Vec<C64> {
        self.points.iter().map(|p| p.eigenvalues[b]).collect()
    }

    pub fn dark(&self) -> Vec<C64> {
        self.branch(self.dark_branch)
    }

    pub fn at_zero(&self) -> &BandPoint {
        &self.points[self.k_grid.zero_index()]
    }

    /// One CSV row per (k, branch):
    /// `k,branch_index,re_eigenvalue,im_eigenvalue,|amp_E_R|^2,...,|amp_P_L|^2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "k,branch_index,re_eigenvalue,im_eigenvalue,|amp_E_R|^2,|amp_E_L|^2,|amp_S|^2,|amp_P_R|^2,|amp_P_L|^2\n",
        );
        for p in &self.points {
            for (b, (ev, v)) in p.eigenvalues.iter().zip(&p.vectors).enumerate() {
                let w = self.scheme.weights5(v);
                out.push_str(&format!(
                    "{:e},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                    p.k, b, ev.re, ev.im, w[0], w[1], w[2], w[3], w[4]
                ));
            }
        }
        out
    }
}

pub(crate) fn overlap(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
}

fn p_weight(scheme: Scheme, v: &[C64]) -> f64 {
    scheme.p_indices().iter().map(|&i| v[i].norm_sqr()).sum()
}

fn columns(e: &Eigen) -> Vec<Vec<C64>> {
    (0..e.values.len())
        .map(|j| e.vectors.column(j).iter().copied().collect())
        .collect()
}

/// Index of the dark eigenvector at k = 0: the one with the least weight on
/// the intermediate-state fields, ties broken by |eigenvalue|.
pub(crate) fn dark_index(scheme: Scheme, values: &[C64], vectors: &[Vec<C64>]) -> usize {
    (0..values.len())
        .min_by(|&a, &b| {
            let wa = p_weight(scheme, &vectors[a]);
            let wb = p_weight(scheme, &vectors[b]);
            if (wa - wb).abs() > 1e-12 {
                wa.total_cmp(&wb)
            } else {
                values[a].norm().total_cmp(&values[b].norm())
            }
        })
        .expect("non-empty spectrum")
}

/// Permutation `perm[branch] = column` maximizing the summed overlap.
fn best_assignment(prev: &[Vec<C64>], next: &[Vec<C64>]) -> (Vec<usize>, f64) {
    let n = prev.len();
    let ov: Vec<Vec<f64>> = prev
        .iter()
        .map(|a| next.iter().map(|b| overlap(a, b)).collect())
        .collect();
    let mut best = (Vec::new(), f64::NEG_INFINITY, 0.0);
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let score: f64 = (0..n).map(|i| ov[i][p[i]]).sum();
        if score > best.1 {
            let worst = (0..n).map(|i| ov[i][p[i]]).fold(f64::INFINITY, f64::min);
            best = (p.to_vec(), score, worst);
        }
    });
    (best.0, best.2)
}

fn permute(p: &mut Vec<usize>, start: usize, f: &mut impl FnMut(&[usize])) {
    if start == p.len() {
        f(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, f);
        p.swap(start, i);
    }
}

/// Diagonalize the scheme matrix over `k_grid` and order branches by
/// eigenvector continuity, starting from k = 0 (sorted by real part) and
/// walking outward in both directions.
pub fn band_structure(
    p: &PhysicalParams,
    k_grid: &MomentumGrid,
    scheme: Scheme,
    exec: Exec,
) -> Result<BandStructure> {
    for (name, v) in [("g", p.g), ("delta", p.delta), ("c", p.c), ("gamma_e", p.gamma_e)] {
        if !v.is_finite() {
            return Err(Error::validation(name, "must be finite"));
        }
    }
    let raw: Vec<Eigen> = exec.try_map(k_grid.values(), |&k| eigen(&scheme_matrix(scheme, p, k)?))?;
    let n = scheme.dimension();
    let z = k_grid.zero_index();

    let mut points: Vec<Option<BandPoint>> = vec![None; k_grid.len()];
    let zero_vecs = columns(&raw[z]);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw[z].values[a].re.total_cmp(&raw[z].values[b].re));
    points[z] = Some(BandPoint {
        k: 0.0,
        eigenvalues: order.iter().map(|&i| raw[z].values[i]).collect(),
        vectors: order.iter().map(|&i| zero_vecs[i].clone()).collect(),
    });

    let walk = |indices: Vec<usize>, points: &mut Vec<Option<BandPoint>>| -> Result<()> {
        let mut prev = z;
        for i in indices {
            let prev_vecs = points[prev].as_ref().expect("walk is ordered").vectors.clone();
            let cols = columns(&raw[i]);
            let (perm, worst) = best_assignment(&prev_vecs, &cols);
            if worst < 0.5 {
                return Err(Error::BranchTracking {
                    k: k_grid.values()[i],
                    overlap: worst,
                });
            }
            points[i] = Some(BandPoint {
                k: k_grid.values()[i],
                eigenvalues: perm.iter().map(|&c| raw[i].values[c]).collect(),
                vectors: perm.iter().map(|&c| cols[c].clone()).collect(),
            });
            prev = i;
        }
        Ok(())
    };
    walk((z + 1..k_grid.len()).collect(), &mut points)?;
    walk((0..z).rev().collect(), &mut points)?;

    let points: Vec<BandPoint> = points.into_iter().map(|p| p.expect("all k visited")).collect();
    let zp = &points[z];
    let dark_branch = dark_index(scheme, &zp.eigenvalues, &zp.vectors);
    Ok(BandStructure {
        scheme,
        params: *p,
        k_grid: k_grid.clone(),
        field_labels: scheme.field_labels().iter().map(|s| s.to_string()).collect(),
        points,
        dark_branch,
    })
}

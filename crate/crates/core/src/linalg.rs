//! Small dense complex eigenproblems and matrix exponentials.
//!
//! Hermitian matrices go through `SymmetricEigen` (orthonormal vectors, real
//! eigenvalues). Everything else uses a complex Schur factorization followed
//! by back-substitution on the triangular factor.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues with unit-norm eigenvectors stored as matrix columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
    pub hermitian: bool,
}

impl Eigen {
    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
}

pub fn is_hermitian(m: &CMatrix) -> bool {
    hermitian_defect(m) <= 1e-14
}

/// Diagonalize `m`, picking the Hermitian path when possible.
pub fn eigen(m: &CMatrix) -> Result<Eigen> {
    if is_hermitian(m) {
        Ok(hermitian_eigen(m))
    } else {
        general_eigen(m)
    }
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> Eigen {
    // symmetrize away rounding noise so the solver sees an exact Hermitian input
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let se = SymmetricEigen::new(h);
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| C64::new(se.eigenvalues[i], 0.0)).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Eigen {
        values,
        vectors,
        hermitian: true,
    }
}

/// General complex eigendecomposition via Schur form.
pub fn general_eigen(m: &CMatrix) -> Result<Eigen> {
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    // the QR iteration occasionally stalls on structured input; a complex
    // diagonal shift leaves the eigenvectors unchanged and breaks the symmetry
    let shift = C64::new(0.37, 0.23) * scale;
    let (q, mut t, applied) = [
        (C64::new(0.0, 0.0), f64::EPSILON),
        (C64::new(0.0, 0.0), 8.0 * f64::EPSILON),
        (shift, f64::EPSILON),
        (shift, 8.0 * f64::EPSILON),
    ]
    .into_iter()
    .find_map(|(s, eps)| {
        let shifted = m + CMatrix::identity(n, n) * s;
        Schur::try_new(shifted, eps, 10_000).map(|sc| {
            let (q, t) = sc.unpack();
            (q, t, s)
        })
    })
    .ok_or_else(|| Error::Linalg("complex Schur iteration did not converge".into()))?;
    for j in 0..n {
        t[(j, j)] -= applied;
    }
    let tiny = f64::EPSILON * scale;

    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    for j in 0..n {
        let lambda = t[(j, j)];
        let mut y = CVector::zeros(n);
        y[j] = C64::new(1.0, 0.0);
        for i in (0..j).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for l in (i + 1)..=j {
                acc += t[(i, l)] * y[l];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < tiny {
                d = C64::new(tiny, 0.0);
            }
            y[i] = -acc / d;
        }
        let mut v = &q * y;
        let norm = v.norm();
        v /= C64::new(norm, 0.0);
        vectors.set_column(j, &v);
        values.push(lambda);
    }
    Ok(Eigen {
        values,
        vectors,
        hermitian: false,
    })
}

/// `exp(-i m dt)` via eigendecomposition.
///
/// For Hermitian `m` the result is unitary to rounding. For non-Hermitian
/// input the eigenvector matrix is inverted; when that is ill-conditioned
/// (near an exceptional point) a Padé exponential is used instead.
pub fn propagator(m: &CMatrix, dt: f64) -> CMatrix {
    let mi = C64::new(0.0, -dt);
    if is_hermitian(m) {
        let e = hermitian_eigen(m);
        let n = m.nrows();
        let mut scaled = e.vectors.clone();
        for j in 0..n {
            let phase = (mi * e.values[j]).exp();
            for i in 0..n {
                scaled[(i, j)] *= phase;
            }
        }
        return scaled * e.vectors.adjoint();
    }
    if let Ok(e) = general_eigen(m) {
        if let Some(inv) = e.vectors.clone().try_inverse() {
            let cond = inv.iter().map(|z| z.norm()).fold(0.0, f64::max)
                * e.vectors.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if cond < 1e8 {
                let n = m.nrows();
                let mut scaled = e.vectors.clone();
                for j in 0..n {
                    let f = (mi * e.values[j]).exp();
                    for i in 0..n {
                        scaled[(i, j)] *= f;
                    }
                }
                return scaled * inv;
            }
        }
    }
    (m * mi).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitian_eigenpairs() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[c(0.3, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(5.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
        );
        let e = eigen(&m).unwrap();
        assert!(e.hermitian);
        for i in 0..3 {
            let v = e.vector(i);
            let r = &m * &v - &v * e.values[i];
            assert!(r.norm() < 1e-12);
        }
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!((gram - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn general_eigenpairs() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[c(0.3, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(5.0, -1.0), c(2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
        );
        let e = eigen(&m).unwrap();
        assert!(!e.hermitian);
        for i in 0..3 {
            let v = e.vector(i);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            let r = &m * &v - &v * e.values[i];
            assert!(r.norm() < 1e-12, "residual {}", r.norm());
        }
    }

    #[test]
    fn propagator_matches_pade() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.2, -0.3)],
        );
        let a = propagator(&m, 0.7);
        let b = (&m * c(0.0, -0.7)).exp();
        assert!((a - b).norm() < 1e-12);

        let h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.2, 0.0)]);
        let u = propagator(&h, 3.1);
        assert!((u.adjoint() * &u - CMatrix::identity(2, 2)).norm() < 1e-13);
    }
}

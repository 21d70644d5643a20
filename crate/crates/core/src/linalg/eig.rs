//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation, so the
//! combined transform is a 2x2 complex unitary acting on columns `p, q`.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Sweeps stop once the off-diagonal Frobenius norm drops below this times `‖A‖_F`.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `V f(Λ) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must satisfy `‖A − A*‖_F ≤ tol·‖A‖_F`; its Hermitian part is
/// diagonalized.
pub fn eig_hermitian(a: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    let scale = a.frobenius_norm();
    let deviation = a.hermitian_deviation();
    if deviation > tol * scale {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.dim();
    let mut m = a.hermitian_part();
    for k in 0..n {
        m[(k, k)] = Complex64::new(m[(k, k)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_THRESHOLD * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&k| m[(k, k)].re).collect();
    let columns: Vec<Vec<Complex64>> = order.iter().map(|&k| v.column(k)).collect();
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(&columns),
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = m.dim();
    // M <- M J
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * jpp + mkq * jqp;
        m[(k, q)] = mkp * jpq + mkq * jqq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
    // M <- J* M
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = jpp.conj() * mpk + jqp.conj() * mqk;
        m[(q, k)] = jpq.conj() * mpk + jqq.conj() * mqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

/// Spectral norm. Hermitian inputs use the largest eigenvalue modulus,
/// everything else the square root of the largest eigenvalue of `A*A`.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    if a.hermitian_deviation() <= 1e-14 * scale {
        let e = eig_hermitian(a, 1e-14)?;
        return Ok(e.min().abs().max(e.max().abs()));
    }
    let gram = &a.adjoint() * a;
    let e = eig_hermitian(&gram, 1e-9)?;
    Ok(e.max().max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &ComplexMatrix, e: &HermitianEig) -> f64 {
        a.distance(&e.reconstruct()) / a.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn diagonal_is_sorted() {
        let a = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let e = eig_hermitian(&a, 1e-9).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert!(residual(&a, &e) < 1e-15);
    }

    #[test]
    fn pauli_x() {
        let a = ComplexMatrix::from_real_rows(&[vec![0., 1.], vec![1., 0.]]).unwrap();
        let e = eig_hermitian(&a, 1e-9).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2f64.sqrt();
        let minus = [Complex64::new(s, 0.), Complex64::new(-s, 0.)];
        let plus = [Complex64::new(s, 0.), Complex64::new(s, 0.)];
        // up to phase: |<expected, v>| = 1
        let v0 = e.eigenvector(0);
        let v1 = e.eigenvector(1);
        assert!((super::super::vdot(&minus, &v0).norm() - 1.0).abs() < 1e-14);
        assert!((super::super::vdot(&plus, &v1).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let e = eig_hermitian(&ComplexMatrix::identity(4), 1e-9).unwrap();
        assert!(e.eigenvalues.iter().all(|&x| x == 1.0));
        let v = &e.eigenvectors;
        assert!((&v.adjoint() * v).distance(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn complex_hermitian_2x2() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let a = ComplexMatrix::from_rows(&[
            vec![Complex64::new(1., 0.), Complex64::new(0., 1.)],
            vec![Complex64::new(0., -1.), Complex64::new(1., 0.)],
        ])
        .unwrap();
        let e = eig_hermitian(&a, 1e-9).unwrap();
        assert!(e.eigenvalues[0].abs() < 1e-14);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!(residual(&a, &e) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[vec![0., 1.], vec![0., 0.]]).unwrap();
        assert!(matches!(eig_hermitian(&a, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn zero_matrix() {
        let e = eig_hermitian(&ComplexMatrix::zeros(3), 1e-9).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn operator_norms() {
        let d = ComplexMatrix::from_real_diagonal(&[0.2, 0.9]);
        assert!((operator_norm(&d).unwrap() - 0.9).abs() < 1e-15);
        let n = ComplexMatrix::from_real_rows(&[vec![0., 3.], vec![0., 0.]]).unwrap();
        assert!((operator_norm(&n).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(operator_norm(&ComplexMatrix::zeros(2)).unwrap(), 0.0);
    }
}

//! Seeded random matrices: Haar unitaries, effects, projections, Hermitian matrices.

use num_complex::Complex64;

use super::matrix::{vnorm, ComplexMatrix};
use super::rng::CounterRng;
use crate::effects::{Effect, Projection};
use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// Haar-distributed unitary from a fresh stream keyed by `seed`.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    haar_unitary_with(dim, &mut CounterRng::new(seed))
}

/// Householder QR of a complex Ginibre matrix, with `Q ← Q·diag(R_kk / |R_kk|)`.
pub fn haar_unitary_with(dim: usize, rng: &mut CounterRng) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::DimensionTooSmall { dim, min: 1 });
    }
    let mut r = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            r[(i, j)] = rng.complex_gaussian();
        }
    }
    let mut q = ComplexMatrix::identity(dim);
    for k in 0..dim {
        let x: Vec<Complex64> = (k..dim).map(|i| r[(i, k)]).collect();
        let norm = vnorm(&x);
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * norm;
        let mut v = x;
        v[0] -= alpha;
        let vn = vnorm(&v);
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // R <- H R on rows k.., H = I - 2 v v*
        for j in k..dim {
            let s: Complex64 = (k..dim).map(|i| v[i - k].conj() * r[(i, j)]).sum();
            for i in k..dim {
                r[(i, j)] -= v[i - k] * s * 2.0;
            }
        }
        // Q <- Q H on columns k..
        for i in 0..dim {
            let s: Complex64 = (k..dim).map(|j| q[(i, j)] * v[j - k]).sum();
            for j in k..dim {
                q[(i, j)] -= s * v[j - k].conj() * 2.0;
            }
        }
    }
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    Ok(q)
}

/// `V diag(λ) V*` with `V` Haar and each `λ` uniform on `[0, 1]`.
pub fn random_effect(dim: usize, seed: u64) -> Result<Effect> {
    random_effect_with(dim, &mut CounterRng::new(seed))
}

pub fn random_effect_with(dim: usize, rng: &mut CounterRng) -> Result<Effect> {
    let v = haar_unitary_with(dim, rng)?;
    let lambdas: Vec<f64> = (0..dim).map(|_| rng.uniform()).collect();
    let m = conjugate_diagonal(&v, &lambdas);
    Effect::new(m, DEFAULT_TOL)
}

/// `V diag(d) V*`.
pub fn conjugate_diagonal(v: &ComplexMatrix, diag: &[f64]) -> ComplexMatrix {
    let n = v.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (k, &w) in diag.iter().enumerate() {
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
    // exact Hermitian symmetry
    out.hermitian_part()
}

/// `G + G*` with complex standard-normal `G`.
pub fn random_hermitian_with(dim: usize, rng: &mut CounterRng) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = rng.complex_gaussian();
        }
    }
    &g + &g.adjoint()
}

pub fn random_unit_vector_with(dim: usize, rng: &mut CounterRng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
        let n = vnorm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Projection onto the span of the first `rank` columns of a Haar unitary.
pub fn random_projection_with(dim: usize, rank: usize, rng: &mut CounterRng) -> Result<Projection> {
    let v = haar_unitary_with(dim, rng)?;
    Ok(Projection::onto_columns(&v, 0..rank.min(dim)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_hermitian;

    fn unitarity_error(u: &ComplexMatrix) -> f64 {
        (&u.adjoint() * u).distance(&ComplexMatrix::identity(u.dim()))
    }

    #[test]
    fn haar_is_deterministic() {
        let a = haar_unitary(3, 7).unwrap();
        let b = haar_unitary(3, 7).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert_ne!(a, haar_unitary(3, 8).unwrap());
    }

    #[test]
    fn haar_is_unitary() {
        for dim in 1..=16 {
            for seed in 0..20 {
                let u = haar_unitary(dim, seed).unwrap();
                assert!(unitarity_error(&u) <= 1e-12 * dim as f64, "dim {dim} seed {seed}");
            }
        }
    }

    #[test]
    fn haar_dim_one_is_phase() {
        for seed in 0..10 {
            let u = haar_unitary(1, seed).unwrap();
            assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn haar_rejects_zero_dim() {
        assert!(haar_unitary(0, 1).is_err());
        assert!(random_effect(0, 1).is_err());
    }

    #[test]
    fn haar_first_entry_phase_is_spread() {
        // The R-diagonal fix makes U_00 phase uniform; without it the
        // Householder sign convention would bias it.
        let n = 4000;
        let mut mean = Complex64::new(0.0, 0.0);
        for seed in 0..n {
            let u = haar_unitary(2, seed).unwrap();
            let z = u[(0, 0)];
            mean += z / z.norm();
        }
        assert!((mean / n as f64).norm() < 0.05);
    }

    #[test]
    fn random_effect_spectrum_in_unit_interval() {
        for seed in 0..50 {
            let a = random_effect(5, seed).unwrap();
            let e = eig_hermitian(a.matrix(), 1e-9).unwrap();
            assert!(e.min() >= -1e-12 && e.max() <= 1.0 + 1e-12);
        }
        assert_eq!(
            random_effect(4, 3).unwrap().matrix().as_slice(),
            random_effect(4, 3).unwrap().matrix().as_slice()
        );
    }

    #[test]
    fn random_projection_rank() {
        let mut rng = CounterRng::new(4);
        let p = random_projection_with(5, 2, &mut rng).unwrap();
        assert_eq!(p.rank().unwrap(), 2);
    }
}

use effsym::effects::{
    are_orthogonal, decompose_unit_ball, positive_negative_parts, rank_one_projection, Effect,
    Projection,
};
use effsym::linalg::{
    eig_hermitian, haar_unitary, haar_unitary_with, operator_norm, random_effect, random_effect_with,
    random_hermitian_with, random_projection_with, random_unit_vector_with, Complex64,
    ComplexMatrix, CounterRng,
};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    random_hermitian_with(dim, &mut CounterRng::new(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigen_reconstruction(dim in 2usize..=8, seed in any::<u64>()) {
        let a = hermitian(dim, seed);
        let e = eig_hermitian(&a, 1e-9).unwrap();
        // rebuild V Λ V* column by column, independently of `reconstruct`
        let mut rebuilt = ComplexMatrix::zeros(dim);
        for k in 0..dim {
            let v = e.eigenvector(k);
            rebuilt = &rebuilt + &ComplexMatrix::outer(&v, &v).scale_real(e.eigenvalues[k]);
        }
        prop_assert!(a.distance(&rebuilt) <= 1e-10 * a.frobenius_norm());
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigen_shift(dim in 2usize..=8, seed in any::<u64>(), shift in -5.0f64..5.0) {
        let a = hermitian(dim, seed);
        let shifted = &a + &ComplexMatrix::identity(dim).scale_real(shift);
        let ea = eig_hermitian(&a, 1e-9).unwrap();
        let eb = eig_hermitian(&shifted, 1e-9).unwrap();
        for (x, y) in ea.eigenvalues.iter().zip(&eb.eigenvalues) {
            prop_assert!((x + shift - y).abs() <= 1e-10 * (1.0 + a.frobenius_norm()));
        }
    }

    #[test]
    fn haar_is_unitary(dim in 1usize..=16, seed in any::<u64>()) {
        let u = haar_unitary(dim, seed).unwrap();
        let gram = &u.adjoint() * &u;
        prop_assert!(gram.distance(&ComplexMatrix::identity(dim)) <= 1e-12 * dim as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn positive_negative_decomposition(dim in 2usize..=8, seed in any::<u64>()) {
        let a = hermitian(dim, seed);
        let (p, n) = positive_negative_parts(&a).unwrap();
        prop_assert!(a.distance(&(&p - &n)) <= 1e-10 * a.frobenius_norm());
        prop_assert!((&p * &n).frobenius_norm() <= 1e-9 * a.frobenius_norm().powi(2));
        prop_assert!(eig_hermitian(&p, 1e-9).unwrap().min() >= -1e-10);
        prop_assert!(eig_hermitian(&n, 1e-9).unwrap().min() >= -1e-10);
    }

    #[test]
    fn orthocomplement_reverses_order(dim in 2usize..=6, seed in any::<u64>(), nested in any::<bool>()) {
        let mut rng = CounterRng::new(seed);
        let a = random_effect_with(dim, &mut rng).unwrap();
        let b = if nested {
            // A ≤ A + (I − A)/2
            let gap = a.orthocomplement().matrix().scale_real(0.5);
            Effect::new(a.matrix() + &gap, 1e-9).unwrap()
        } else {
            random_effect_with(dim, &mut rng).unwrap()
        };
        let forward = a.leq(&b).unwrap();
        let backward = b.orthocomplement().leq(&a.orthocomplement()).unwrap();
        prop_assert_eq!(forward, backward);
        if nested {
            prop_assert!(forward);
        }
    }

    #[test]
    fn unit_ball_decomposition(dim in 1usize..=6, seed in any::<u64>()) {
        let mut rng = CounterRng::new(seed);
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = rng.complex_gaussian();
            }
        }
        let m = m.scale_real(0.999 / operator_norm(&m).unwrap());
        let [a1, a2, a3, a4] = decompose_unit_ball(&m, 1e-9).unwrap();
        let re = a1.matrix() - a2.matrix();
        let im = a3.matrix() - a4.matrix();
        let back = &re + &im.scale(c(0.0, 1.0));
        prop_assert!(back.distance(&m) <= 1e-12);
    }
}

#[test]
fn non_hermitian_idempotents_are_not_contractive() {
    let mut rng = CounterRng::new(3);
    let mut checked = 0;
    for _ in 0..200 {
        let dim = rng.index_range(2, 7);
        let x = random_unit_vector_with(dim, &mut rng);
        let y = random_unit_vector_with(dim, &mut rng);
        let overlap: Complex64 = y.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
        if overlap.norm() < 0.05 {
            continue;
        }
        // rank-one oblique projection onto x along y⊥
        let e = ComplexMatrix::outer(&x, &y).scale(overlap.inv());
        assert!((&e * &e).distance(&e) < 1e-10);
        if e.distance(&e.adjoint()) > 0.1 {
            assert!(operator_norm(&e).unwrap() > 1.0);
            checked += 1;
        }
    }
    assert!(checked > 100);
    for seed in 0..50 {
        let mut rng = CounterRng::new(seed);
        let dim = rng.index_range(2, 7);
        let rank = rng.index_range(0, dim + 1);
        let p = random_projection_with(dim, rank, &mut rng).unwrap();
        assert!(operator_norm(p.matrix()).unwrap() <= 1.0 + 1e-12);
    }
}

#[test]
fn interior_eigenvalue_gives_a_proper_convex_split() {
    let mut rng = CounterRng::new(11);
    for _ in 0..100 {
        let dim = rng.index_range(2, 6);
        let a = random_effect_with(dim, &mut rng).unwrap();
        let e = eig_hermitian(a.matrix(), 1e-9).unwrap();
        let Some(k) = e.eigenvalues.iter().position(|l| (0.1..=0.9).contains(l)) else {
            continue;
        };
        let v = e.eigenvector(k);
        let bump = ComplexMatrix::outer(&v, &v).scale_real(0.05);
        let plus = Effect::new(a.matrix() + &bump, 1e-9).unwrap();
        let minus = Effect::new(a.matrix() - &bump, 1e-9).unwrap();
        let mid = Effect::convex_combine(0.5, &plus, &minus).unwrap();
        assert!(mid.matrix().distance(a.matrix()) < 1e-14);
        assert!(!a.is_extreme());
    }
    // a projection has only 0/1 eigenvalues, so the same bump leaves [0, I]
    let mut rng = CounterRng::new(12);
    for _ in 0..20 {
        let p = random_projection_with(4, 2, &mut rng).unwrap().as_effect();
        assert!(p.is_extreme());
        let e = eig_hermitian(p.matrix(), 1e-9).unwrap();
        let v = e.eigenvector(3);
        let bump = ComplexMatrix::outer(&v, &v).scale_real(0.05);
        assert!(Effect::new(p.matrix() + &bump, 1e-9).is_err());
    }
}

#[test]
fn order_matches_pinching_on_projections() {
    let mut rng = CounterRng::new(5);
    for k in 0..300 {
        let dim = 2 + k % 5;
        let v = haar_unitary_with(dim, &mut rng).unwrap();
        let r1 = rng.index_range(1, dim);
        let p = Projection::onto_columns(&v, 0..r1);
        let q = if k % 2 == 0 {
            Projection::onto_columns(&v, 0..rng.index_range(r1, dim + 1))
        } else {
            random_projection_with(dim, rng.index_range(1, dim + 1), &mut rng).unwrap()
        };
        let pqp = &(p.matrix() * q.matrix()) * p.matrix();
        let pinch = pqp.distance(p.matrix()) <= 1e-9;
        assert_eq!(p.as_effect().leq(&q.as_effect()).unwrap(), pinch);
        if k % 2 == 0 {
            assert!(pinch);
        }
    }
}

#[test]
fn rank_one_projections_of_orthogonal_vectors() {
    let mut rng = CounterRng::new(9);
    let v = haar_unitary_with(5, &mut rng).unwrap();
    let p = rank_one_projection(&v.column(0)).unwrap();
    let q = rank_one_projection(&v.column(3)).unwrap();
    assert!(are_orthogonal(&p, &q, 1e-12));
    assert_eq!(p.rank().unwrap(), 1);
    assert_eq!(p.complement().rank().unwrap(), 4);
}

#[test]
fn random_effect_golden() {
    let e = random_effect(4, 1).unwrap();
    let m = e.matrix();
    let expected = [
        ((0, 0), c(0.4197404937483328, 0.0)),
        ((0, 1), c(0.03634549901817086, -0.04133309357716614)),
        ((1, 3), c(-0.02430148018710166, 0.007296599323916471)),
        ((2, 3), c(0.010426220275672755, 0.020200329846215108)),
        ((3, 3), c(0.5026616882529524, 0.0)),
    ];
    for ((i, j), z) in expected {
        assert!((m[(i, j)] - z).norm() < 1e-13, "entry ({i},{j}) = {}", m[(i, j)]);
    }
}

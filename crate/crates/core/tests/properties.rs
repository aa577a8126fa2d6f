use proptest::prelude::*;

use hstiefel::morse::gradient_field;
use hstiefel::random::{gaussian_matrix, random_symplectic, rng_from_seed};
use hstiefel::stiefel::tangency_residual;
use hstiefel::{
    closed_form_flow, height, normal_project, qmul, random_point, relative_svd, svd,
    tangent_project, QMatrix, Quaternion, StiefelPoint, DEFAULT_TOL,
};

const PAIRS: [(usize, usize); 7] = [(2, 1), (3, 1), (3, 2), (4, 2), (5, 2), (5, 3), (6, 3)];

fn quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(Quaternion::from_array)
}

fn pair() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(PAIRS.to_vec())
}

fn point() -> impl Strategy<Value = StiefelPoint> {
    (pair(), any::<u64>()).prop_map(|((n, k), seed)| random_point(n, k, seed).unwrap())
}

fn matrix(rows: usize, cols: usize, seed: u64) -> QMatrix {
    gaussian_matrix(&mut rng_from_seed(seed), rows, cols)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn norm_is_multiplicative(a in quaternion(), b in quaternion()) {
        let lhs = qmul(a, b).norm();
        prop_assert!((lhs - a.norm() * b.norm()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn conjugate_reverses_products(a in quaternion(), b in quaternion()) {
        let d = (a * b).conj() - b.conj() * a.conj();
        prop_assert!(d.norm() < 1e-12);
    }

    #[test]
    fn associativity(a in quaternion(), b in quaternion(), c in quaternion()) {
        let d = (a * b) * c - a * (b * c);
        prop_assert!(d.norm() < 1e-10);
    }

    #[test]
    fn adjoint_of_product(m in 1usize..5, k in 1usize..5, n in 1usize..5, seed in any::<u64>()) {
        let a = matrix(m, k, seed);
        let b = matrix(k, n, seed ^ 1);
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        prop_assert!(lhs.dist(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn real_trace_is_cyclic(m in 1usize..5, n in 1usize..5, seed in any::<u64>()) {
        let a = matrix(m, n, seed);
        let b = matrix(n, m, seed ^ 2);
        let lhs = (&a * &b).re_trace().unwrap();
        let rhs = (&b * &a).re_trace().unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn frobenius_inner_is_symplectic_invariant(m in 1usize..5, n in 1usize..5, seed in any::<u64>()) {
        let a = matrix(m, n, seed);
        let b = matrix(m, n, seed ^ 3);
        let mut rng = rng_from_seed(seed ^ 4);
        let u = random_symplectic(&mut rng, m);
        let v = random_symplectic(&mut rng, n);
        let ta = &(&u * &a) * &v;
        let tb = &(&u * &b) * &v;
        let lhs = ta.frobenius_inner(&tb).unwrap();
        let rhs = a.frobenius_inner(&b).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn svd_reconstructs(m in 1usize..7, n in 1usize..7, seed in any::<u64>()) {
        let a = matrix(m, n, seed);
        let f = svd(&a).unwrap();
        prop_assert!(f.reconstruct().dist(&a).unwrap() < 1e-10);
        prop_assert!(f.u.orthonormality_residual() < 1e-10);
        prop_assert!(f.v.orthonormality_residual() < 1e-10);
        prop_assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn projectors_split_ambient_space(x in point(), seed in any::<u64>()) {
        let u = matrix(x.n(), x.k(), seed);
        let t = tangent_project(&x, &u).unwrap();
        let nrm = normal_project(&x, &u).unwrap();
        prop_assert!((t.mat() + &nrm).dist(&u).unwrap() < 1e-12);
        prop_assert!(tangency_residual(&x, t.mat()) < 1e-12);
        let tt = tangent_project(&x, t.mat()).unwrap();
        prop_assert!(tt.mat().dist(t.mat()).unwrap() < 1e-12);
        prop_assert!(t.mat().frobenius_inner(&nrm).unwrap().abs() < 1e-11);
    }

    #[test]
    fn relative_svd_reconstructs(x in point()) {
        let d = relative_svd(&x).unwrap();
        prop_assert_eq!(d.p + d.q + d.r, x.k());
        prop_assert!(d.reconstruct().dist(x.mat()).unwrap() < 1e-9);
        for f in [&d.m, &d.a, &d.b] {
            prop_assert!(f.orthonormality_residual() < 1e-10);
        }
        prop_assert!(d.c.iter().all(|&c| c > 0.0 && c < 1.0));
        let sum: f64 = d.c.iter().map(|c| c * c).sum();
        prop_assert!((height(&x) - d.p as f64 - sum).abs() < 1e-10);
    }

    #[test]
    fn relative_svd_classes_are_stable(x in point(), seed in any::<u64>()) {
        let d = relative_svd(&x).unwrap();
        let u = tangent_project(&x, &matrix(x.n(), x.k(), seed)).unwrap();
        let y = hstiefel::polar_retract(&(x.mat() + &u.mat().scale(1e-13 / u.norm()))).unwrap();
        let e = relative_svd(&y).unwrap();
        prop_assert_eq!((d.p, d.q, d.r), (e.p, e.q, e.r));
    }

    #[test]
    fn flow_is_a_semigroup(x in point(), s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let two_step = closed_form_flow(&closed_form_flow(&x, s).unwrap(), t).unwrap();
        let one_step = closed_form_flow(&x, s + t).unwrap();
        prop_assert!(two_step.dist(&one_step) < 1e-8);
    }

    #[test]
    fn flow_height_increases(x in point(), s in -2.0f64..2.0, dt in 0.01f64..1.0) {
        let a = height(&closed_form_flow(&x, s).unwrap());
        let b = height(&closed_form_flow(&x, s + dt).unwrap());
        prop_assert!(b > a);
    }

    #[test]
    fn flow_solves_the_gradient_equation(x in point(), t in -1.0f64..1.0) {
        let h = 1e-5;
        let xp = closed_form_flow(&x, t + h).unwrap();
        let xm = closed_form_flow(&x, t - h).unwrap();
        let fd = (xp.mat() - xm.mat()).scale(0.5 / h);
        let rhs = gradient_field(closed_form_flow(&x, t).unwrap().mat());
        prop_assert!(fd.dist(&rhs).unwrap() <= 1e-6 * rhs.norm().max(1e-3));
    }

    #[test]
    fn flow_stays_on_manifold(x in point(), t in -60.0f64..60.0) {
        let y = closed_form_flow(&x, t).unwrap();
        prop_assert!(y.residual() < 1e-9);
        prop_assert!(StiefelPoint::new(y.mat().clone(), DEFAULT_TOL).is_ok());
    }
}

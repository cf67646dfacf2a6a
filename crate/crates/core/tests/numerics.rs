use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use poppe::numerics::*;
use poppe::Error;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_vec(stream: &mut RandomStream, n: usize) -> Vec<Complex64> {
    gaussian_increments(stream, n, 1.0)
}

fn to_na(m: &Matrix<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

#[test]
fn constant_and_pure_mode() {
    let grid = Grid1D::periodic(-1.5, 2.5, 8).unwrap();
    let l = grid.length();
    let f = dft_forward(&[c(0.7, -0.2); 8], &grid).unwrap();
    assert!((f.modes[0] - c(0.7, -0.2) * l).norm() < 1e-14);
    assert!(f.modes[1..].iter().all(|m| m.norm() < 1e-14));
    let pure: Vec<Complex64> = grid.nodes().iter().map(|x| Complex64::from_polar(1.0, std::f64::consts::TAU * x / l)).collect();
    let f = dft_forward(&pure, &grid).unwrap();
    let k = f.wavenumbers();
    for (m, mode) in f.modes.iter().enumerate() {
        if m == 1 {
            assert!((k[1] - 1.0 / l).abs() < 1e-15);
            assert!((mode - c(l, 0.0)).norm() < 1e-13);
        } else {
            assert!(mode.norm() < 1e-13);
        }
    }
}

#[test]
fn round_trip_and_parseval_up_to_4096() {
    let mut s = RandomStream::new(5, 9);
    for p in 1..=12 {
        let n = 1usize << p;
        let grid = Grid1D::periodic(-3.0, 5.0, n).unwrap();
        let v = random_vec(&mut s, n);
        let f = dft_forward(&v, &grid).unwrap();
        let back = dft_inverse(&f).unwrap();
        let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = v.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-12 * scale, "n = {n}: {err}");
        let physical: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.spacing();
        let spectral: f64 = f.modes.iter().map(|z| z.norm_sqr()).sum::<f64>() / grid.length();
        assert!((physical - spectral).abs() <= 1e-10 * physical);
    }
}

#[test]
fn round_trip_in_single_precision() {
    let grid: Grid1D<f32> = Grid1D::periodic(0.0, 1.0, 64).unwrap();
    let v: Vec<Complex<f32>> = (0..64).map(|i| Complex::new((i as f32 * 0.3).sin(), (i as f32 * 0.7).cos())).collect();
    let back = dft_inverse(&dft_forward(&v, &grid).unwrap()).unwrap();
    assert!(v.iter().zip(&back).all(|(a, b)| (a - b).norm() < 1e-5));
}

#[test]
fn non_power_of_two_rejected() {
    let grid = Grid1D::periodic(0.0, 1.0, 12).unwrap();
    assert!(matches!(dft_forward(&[c(1.0, 0.0); 12], &grid), Err(Error::Config(_))));
    let closed = Grid1D::closed(0.0, 1.0, 16).unwrap();
    assert!(dft_forward(&vec![c(1.0, 0.0); 16], &closed).is_err());
}

#[test]
fn grid_and_quadrature_contracts() {
    let closed: Grid1D<f64> = Grid1D::closed(-2.0, 3.0, 11).unwrap();
    assert_eq!(closed.spacing(), 0.5);
    assert_eq!(closed.node(4), 0.0);
    let periodic: Grid1D<f64> = Grid1D::periodic(-2.0, 3.0, 10).unwrap();
    assert_eq!(periodic.spacing(), 0.5);
    assert!(Grid1D::closed(1.0, 1.0, 4).is_err());
    assert!(Grid1D::closed(0.0, 1.0, 1).is_err());
    for scheme in [QuadratureScheme::RiemannLeft, QuadratureScheme::Trapezoid, QuadratureScheme::Gregory] {
        let rule = QuadratureRule::on_grid(&closed, scheme).unwrap();
        let total: f64 = rule.weights().iter().sum();
        assert!(rule.weights().iter().all(|&w| w > 0.0));
        let tol = if scheme == QuadratureScheme::RiemannLeft { closed.spacing() } else { 1e-12 };
        assert!((total - 5.0).abs() <= tol, "{scheme:?}");
    }
}

#[test]
fn dense_solve_cases() {
    let b = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0)];
    let x = solve_dense(&DenseSystem::with_vector(Matrix::identity(3), &b).unwrap()).unwrap();
    assert_eq!(x.as_slice(), b.as_slice());
    let singular = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
    let r = solve_dense(&DenseSystem::with_vector(singular, &[1.0, 1.0]).unwrap());
    assert!(matches!(r, Err(Error::SingularSystem { .. })));
    assert!(DenseSystem::with_vector(Matrix::<f64>::zeros(2, 3), &[1.0, 1.0]).is_err());
}

#[test]
fn rank_one_regularised_determinant() {
    let grid = Grid1D::closed(-1.0, 0.0, 9).unwrap();
    let rule = QuadratureRule::on_grid(&grid, QuadratureScheme::Trapezoid).unwrap();
    let zero = KernelMatrix::from_fn(rule.clone(), |_, _| c(0.0, 0.0));
    assert_eq!(det_reg(&zero).regularised, c(1.0, 0.0));
    let kernel = KernelMatrix::from_fn(rule.clone(), |y, z| c((y).exp(), 0.3) * (2.0 * z).cos());
    let vu: Complex64 = rule.nodes().iter().zip(rule.weights()).map(|(&z, &w)| c(z.exp(), 0.3) * (2.0 * z).cos() * w).sum();
    let want = (c(1.0, 0.0) + vu) * (-vu).exp();
    assert!((det_reg(&kernel).regularised - want).norm() < 1e-13);
}

#[test]
fn regularised_determinant_is_multiplicative() {
    let mut s = RandomStream::new(21, 3);
    for _ in 0..20 {
        let a = Matrix::from_fn(8, 8, |_, _| gaussian_increments(&mut s, 1, 0.02)[0]);
        let b = Matrix::from_fn(8, 8, |_, _| gaussian_increments(&mut s, 1, 0.02)[0]);
        // (I + A)(I + B) = I + (A + B + AB)
        let ab = &a * &b;
        let combined = &(&a + &b) + &ab;
        let lhs = det_reg_matrix(&combined).regularised;
        let rhs = det_reg_matrix(&a).regularised * det_reg_matrix(&b).regularised * (-ab.trace()).exp();
        assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm());
        let oracle = (DMatrix::identity(8, 8) + to_na(&combined)).determinant();
        assert!((det_reg_matrix(&combined).plain - oracle).norm() <= 1e-10 * oracle.norm());
    }
}

#[test]
fn gaussian_stream_contracts() {
    let mut a = RandomStream::new(99, 4);
    let mut b = RandomStream::new(99, 4);
    assert_eq!(gaussian_increments(&mut a, 16, 2.0), gaussian_increments(&mut b, 16, 2.0));
    let mut other = RandomStream::new(99, 5);
    assert_ne!(gaussian_increments(&mut other, 16, 2.0), gaussian_increments(&mut RandomStream::new(99, 4), 16, 2.0));
    let mut s = RandomStream::new(1, 0);
    let draws = gaussian_increments(&mut s, 100_000, 1.0);
    let mean_re = draws.iter().map(|z| z.re).sum::<f64>() / 1e5;
    let var_re = draws.iter().map(|z| (z.re - mean_re).powi(2)).sum::<f64>() / (1e5 - 1.0);
    let var_im = draws.iter().map(|z| z.im * z.im).sum::<f64>() / 1e5;
    assert!((var_re - 1.0).abs() < 0.03 && (var_im - 1.0).abs() < 0.03, "{var_re} {var_im}");
}

#[test]
fn streams_are_schedule_independent() {
    use rayon::prelude::*;
    let serial: Vec<Vec<f64>> = (0..8).map(|id| RandomStream::new(3, id).normals(32, 1.0)).collect();
    let parallel: Vec<Vec<f64>> = (0..8u64).into_par_iter().map(|id| RandomStream::new(3, id).normals(32, 1.0)).collect();
    assert_eq!(serial, parallel);
}

#[test]
fn expm_matches_nalgebra() {
    let mut s = RandomStream::new(8, 8);
    let a = Matrix::from_fn(4, 4, |_, _| gaussian_increments(&mut s, 1, 0.5)[0]);
    let ours = a.expm();
    let theirs = to_na(&a).exp();
    for i in 0..4 {
        for j in 0..4 {
            assert!((ours[(i, j)] - theirs[(i, j)]).norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solve_residual_bound(seed in 0u64..10_000, n in 1usize..17) {
        let mut s = RandomStream::new(seed, 0);
        let mut a = Matrix::from_fn(n, n, |_, _| gaussian_increments(&mut s, 1, 1.0)[0]);
        for i in 0..n {
            a[(i, i)] += c(n as f64, 0.0);
        }
        let b = random_vec(&mut s, n);
        let x = solve_dense(&DenseSystem::with_vector(a.clone(), &b).unwrap()).unwrap();
        let xs = x.col(0);
        let r = a.matvec(&xs);
        let resid = r.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        let xn = xs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let bn = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(resid <= 1e-10 * (a.norm_inf() * xn + bn));
    }

    #[test]
    fn round_trip_any_data(values in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 32)) {
        let grid = Grid1D::periodic(0.0, 7.0, 32).unwrap();
        let v: Vec<Complex64> = values.iter().map(|&(a, b)| c(a, b)).collect();
        let back = dft_inverse(&dft_forward(&v, &grid).unwrap()).unwrap();
        let scale = v.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        prop_assert!(v.iter().zip(&back).all(|(a, b)| (a - b).norm() <= 1e-12 * scale));
    }
}

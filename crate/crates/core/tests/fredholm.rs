use num_complex::Complex64;
use poppe::fredholm::*;
use poppe::numerics::{Grid1D, KernelMatrix, Matrix, QuadratureRule, QuadratureScheme, RandomStream};
use poppe::Error;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn random_matrix(s: &mut RandomStream, n: usize, m: usize, scale: f64) -> Matrix<f64> {
    Matrix::from_fn(n, m, |_, _| scale * s.standard_normal())
}

fn random_system(s: &mut RandomStream, n: usize) -> (CanonicalCoefficients<f64>, BaseState<f64>) {
    let co = CanonicalCoefficients::new(
        random_matrix(s, n, n, 0.5),
        random_matrix(s, n, n, 0.5),
        random_matrix(s, n, n, 0.5),
        random_matrix(s, n, n, 0.5),
    )
    .unwrap();
    let init = BaseState { q: Matrix::identity(n), p: random_matrix(s, n, n, 0.5), t: 0.0 };
    (co, init)
}

/// Riccati samples `G(m dt)`, `m = 0..=steps`, stepping the base equations by one RK4 step per sample.
fn trajectory(co: &CanonicalCoefficients<f64>, init: &BaseState<f64>, dt: f64, steps: usize) -> (Vec<Matrix<f64>>, f64) {
    let mut state = init.clone();
    let mut gs = vec![riccati_project(&state).unwrap()];
    let mut worst = 0.0f64;
    for m in 1..=steps {
        state = integrate_base(co, &state, m as f64 * dt, 1).unwrap();
        let g = riccati_project(&state).unwrap();
        worst = worst.max((&(&g * &state.q) - &state.p).max_abs());
        gs.push(g);
    }
    (gs, worst)
}

#[test]
fn base_equation_cases() {
    let zero = Matrix::<f64>::zeros(1, 1);
    let one = Matrix::<f64>::identity(1);
    let still = CanonicalCoefficients::new(zero.clone(), zero.clone(), zero.clone(), zero.clone()).unwrap();
    let s0 = BaseState { q: one.scaled(2.0), p: one.scaled(-0.5), t: 0.0 };
    assert_eq!(integrate_base(&still, &s0, 3.0, 7).unwrap().q, s0.q);
    let linear = CanonicalCoefficients::new(zero.clone(), one.clone(), zero.clone(), zero.clone()).unwrap();
    let init = BaseState { q: one.clone(), p: one.clone(), t: 0.0 };
    let s = integrate_base(&linear, &init, 0.7, 3).unwrap();
    assert!((s.q[(0, 0)] - 1.7).abs() < 1e-14 && (s.p[(0, 0)] - 1.0).abs() < 1e-14);
    assert!((riccati_project(&s).unwrap()[(0, 0)] - 1.0 / 1.7).abs() < 1e-14);
    assert!(integrate_base(&linear, &init, 0.7, 0).is_err());
    assert!(CanonicalCoefficients::new(Matrix::<f64>::zeros(2, 2), zero.clone(), zero.clone(), zero).is_err());
}

#[test]
fn rk4_matches_block_exponential() {
    let mut s = RandomStream::new(17, 0);
    for _ in 0..10 {
        let (co, init) = random_system(&mut s, 2);
        let rk = integrate_base(&co, &init, 0.5, 50).unwrap();
        let ex = exact_base_solution(&co, &init, 0.5);
        assert!((&rk.q - &ex.q).max_abs() <= 1e-6 && (&rk.p - &ex.p).max_abs() <= 1e-6);
    }
}

#[test]
fn projection_cases() {
    let p = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
    let g = riccati_project(&BaseState { q: Matrix::identity(2), p: p.clone(), t: 0.0 }).unwrap();
    assert_eq!(g, p);
    let mut s = RandomStream::new(4, 1);
    for _ in 0..20 {
        let q = &Matrix::identity(3) + &random_matrix(&mut s, 3, 3, 0.3);
        let p = random_matrix(&mut s, 3, 3, 1.0);
        let g = riccati_project(&BaseState { q: q.clone(), p: p.clone(), t: 0.0 }).unwrap();
        assert!((&(&g * &q) - &p).max_abs() <= 1e-10);
    }
}

#[test]
fn chart_breakdown_at_the_threshold() {
    let state = |d: f64| BaseState { q: Matrix::from_diagonal(&[d, 1.0]), p: Matrix::identity(2), t: 1.5 };
    assert!(riccati_project(&state(1.01 * CHART_THRESHOLD)).is_ok());
    match riccati_project(&state(0.99 * CHART_THRESHOLD)) {
        Err(Error::ChartBreakdown { at, det }) => {
            assert_eq!(at, 1.5);
            assert!(det < CHART_THRESHOLD);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn scalar_riccati_residual() {
    // A = 0, B = 1, C = D = 0: G = 1/(1 + t) solves Ġ = −G²
    let zero = Matrix::<f64>::zeros(1, 1);
    let co = CanonicalCoefficients::new(zero.clone(), Matrix::identity(1), zero.clone(), zero).unwrap();
    let dt = 1e-3;
    let gs: Vec<Matrix<f64>> = (0..100).map(|m| Matrix::from_rows(&[vec![1.0 / (1.0 + m as f64 * dt)]])).collect();
    assert!(riccati_residual(&co, &gs, dt).unwrap() <= 1e-4);
    let still = CanonicalCoefficients::new(
        Matrix::<f64>::zeros(2, 2),
        Matrix::zeros(2, 2),
        Matrix::zeros(2, 2),
        Matrix::zeros(2, 2),
    )
    .unwrap();
    let constant = vec![Matrix::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0]]); 5];
    assert_eq!(riccati_residual(&still, &constant, 0.1).unwrap(), 0.0);
    assert!(matches!(riccati_residual(&still, &constant[..2], 0.1), Err(Error::Config(_))));
}

#[test]
fn riccati_residual_is_second_order() {
    let mut s = RandomStream::new(2024, 2);
    let mut ratios = Vec::new();
    for trial in 0..100 {
        let n = 1 + trial % 4;
        let (co, init) = random_system(&mut s, n);
        let (coarse, drift) = trajectory(&co, &init, 1e-3, 100);
        let (fine, _) = trajectory(&co, &init, 5e-4, 200);
        let r1 = riccati_residual(&co, &coarse, 1e-3).unwrap();
        let r2 = riccati_residual(&co, &fine, 5e-4).unwrap();
        assert!(drift <= 1e-8);
        assert!(r1 <= 1e-4, "trial {trial}: {r1}");
        ratios.push(r1 / r2);
    }
    let worst = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let best = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(worst >= 3.5 && best <= 4.5, "{worst} {best}");
}

fn gaussian_trace(lower: f64, upper: f64, n: usize, centre: f64) -> AdditiveKernelTrace {
    let grid = Grid1D::closed(lower, upper, n).unwrap();
    AdditiveKernelTrace::from_fn(grid, TraceExtension::Zero, |s| c((-(s - centre) * (s - centre)).exp())).unwrap()
}

#[test]
fn fredholm_solve_and_residual() {
    let zgrid = Grid1D::closed(-4.0, 0.0, 65).unwrap();
    let rule = QuadratureRule::on_grid(&zgrid, QuadratureScheme::RiemannLeft).unwrap();
    let trace = gaussian_trace(-10.0, 2.0, 193, -0.5);
    let zero = solve_additive_fredholm(&trace, &|_, _| c(0.0), &rule, 0.25).unwrap();
    for (g, &z) in zero.g.iter().zip(rule.nodes()) {
        assert_eq!(*g, trace.eval(z + 0.25).unwrap());
    }
    let qhat = |y: f64, z: f64| Complex64::new((-(y * y + z * z)).exp(), 0.2 * (y - z));
    let row = solve_additive_fredholm(&trace, &qhat, &rule, 0.25).unwrap();
    assert!(fredholm_residual(&row, &trace, &qhat, &rule).unwrap() <= 1e-10);
    let full = solve_additive_fredholm_full(&trace, &qhat, &rule, 0.25).unwrap();
    let top = rule.len() - 1;
    for j in 0..rule.len() {
        let mut lhs = full[(top, j)];
        for (k, &xi) in rule.nodes().iter().enumerate() {
            lhs += full[(top, k)] * qhat(xi, rule.nodes()[j]) * rule.weights()[k];
        }
        let want = trace.eval(rule.nodes()[top] + rule.nodes()[j] + 0.25).unwrap();
        assert!((lhs - want).norm() <= 1e-10);
    }
}

#[test]
fn two_node_hand_solve() {
    // riemann-left on {-1, 0}: single node -1 with weight 1
    let grid = Grid1D::closed(-1.0, 0.0, 2).unwrap();
    let rule = QuadratureRule::on_grid(&grid, QuadratureScheme::RiemannLeft).unwrap();
    assert_eq!(rule.nodes(), &[-1.0]);
    let trace = AdditiveKernelTrace::new(grid, vec![c(1.0), c(0.5)], TraceExtension::Zero).unwrap();
    let row = solve_additive_fredholm(&trace, &|_, _| c(0.25), &rule, 0.0).unwrap();
    // (1 + 1/4) g = p(-1) = 1, observed = p(0) - g q̂ w
    assert!((row.g[0] - c(0.8)).norm() < 1e-15);
    assert!((row.observed - c(0.5 - 0.2)).norm() < 1e-15);
    assert!((row.det.plain - c(1.25)).norm() < 1e-15);
}

fn product_rule_at(n: usize) -> f64 {
    let rule_grid = Grid1D::closed(-4.0, 0.0, n).unwrap();
    let rule = QuadratureRule::on_grid(&rule_grid, QuadratureScheme::Trapezoid).unwrap();
    let h = rule_grid.spacing();
    let m = rule.len();
    let o = m - 1;
    let delta = Matrix::from_fn(m, m, |i, j| if i == o && j == o { c(1.0 / rule.weights()[o]) } else { c(0.0) });
    let f = KernelMatrix::new(rule.clone(), delta).unwrap();
    let trace_n = ((10.0 / h).round() as usize) + 1;
    let r = gaussian_trace(-9.0, 1.0, trace_n, -0.5);
    let rp = gaussian_trace(-9.0, 1.0, trace_n, -1.0);
    product_rule_check(&f, &r, &rp, &f, 0.0, h).unwrap()
}

#[test]
fn product_rule_converges() {
    let (coarse, fine) = (product_rule_at(257), product_rule_at(513));
    assert!(coarse <= 1e-3, "{coarse}");
    assert!(coarse / fine >= 3.5, "{coarse} {fine}");
    let rule_grid = Grid1D::closed(-4.0, 0.0, 65).unwrap();
    let rule = QuadratureRule::on_grid(&rule_grid, QuadratureScheme::Trapezoid).unwrap();
    let f = KernelMatrix::from_fn(rule, |y, z| c((y + z).exp()));
    let zero = AdditiveKernelTrace::zero(Grid1D::closed(-9.0, 1.0, 161).unwrap());
    let r = gaussian_trace(-9.0, 1.0, 161, 0.0);
    assert_eq!(product_rule_check(&f, &zero, &r, &f, 0.0, 1.0 / 16.0).unwrap(), 0.0);
    let strict = AdditiveKernelTrace { extension: TraceExtension::Error, ..gaussian_trace(-1.0, 0.5, 25, 0.0) };
    assert!(matches!(product_rule_check(&f, &strict, &r, &f, 0.0, 1.0 / 16.0), Err(Error::TraceRange { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_tracks_base_flow(seed in 0u64..100_000, n in 1usize..5) {
        let mut s = RandomStream::new(seed, 7);
        let (co, init) = random_system(&mut s, n);
        let state = integrate_base(&co, &init, 0.2, 40).unwrap();
        let g = riccati_project(&state).unwrap();
        prop_assert!((&(&g * &state.q) - &state.p).max_abs() <= 1e-8 * state.p.max_abs().max(1.0));
    }

    #[test]
    fn zero_kernel_is_identity(shift in -1.0f64..1.0, centre in -2.0f64..0.0) {
        let zgrid = Grid1D::closed(-2.0, 0.0, 17).unwrap();
        let rule = QuadratureRule::on_grid(&zgrid, QuadratureScheme::Trapezoid).unwrap();
        let trace = gaussian_trace(-6.0, 2.0, 65, centre);
        let row = solve_additive_fredholm(&trace, &|_, _| c(0.0), &rule, shift).unwrap();
        prop_assert_eq!(row.observed, trace.eval(shift).unwrap());
        prop_assert_eq!(row.det.plain, c(1.0));
    }
}

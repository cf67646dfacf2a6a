use std::sync::Arc;

use poppe::numerics::{Grid1D, QuadratureScheme};
use poppe::smoluchowski::*;
use poppe::Error;
use proptest::prelude::*;

const GREGORY: QuadratureScheme = QuadratureScheme::Gregory;

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Constant-kernel solution from `g₀ = e^{−x}`: `e^{−2x/(2+t)} / (1 + t/2)²`.
fn exact(x: f64, t: f64) -> f64 {
    let den = 1.0 + 0.5 * t;
    (-2.0 * x / (2.0 + t)).exp() / (den * den)
}

fn exponential_data(n: usize, x_max: f64) -> MassDensity {
    MassDensity::from_fn(Grid1D::closed(0.0, x_max, n).unwrap(), |x| (-x).exp()).unwrap()
}

#[test]
fn m0_law_values() {
    assert_eq!(m0_constant_kernel(2.0, 1.0).unwrap(), 1.0);
    assert_eq!(m0_constant_kernel(1.0, 2.0).unwrap(), 0.5);
    assert_eq!(m0_constant_kernel(0.7, 0.0).unwrap(), 0.7);
    assert!(matches!(m0_constant_kernel(1.0, -2.0), Err(Error::Domain(_))));
}

#[test]
fn constant_kernel_matches_closed_form() {
    let g0 = exponential_data(1024, 40.0);
    let nodes = g0.grid.nodes();
    for &t in &[0.5, 1.0, 2.0] {
        let g = constant_kernel_solve(&g0, t, GREGORY).unwrap();
        let want: Vec<f64> = nodes.iter().map(|&x| exact(x, t)).collect();
        assert!(sup(&g.values, &want) < 1e-6, "t = {t}");
        let m = g.moments(GREGORY);
        assert!(((m.m1 - 1.0) / 1.0).abs() < 1e-6);
        assert!((m.m0 / m0_constant_kernel(1.0, t).unwrap() - 1.0).abs() < 1e-6);
    }
    let same = constant_kernel_solve(&g0, 0.0, GREGORY).unwrap();
    assert!(sup(&same.values, &g0.values) < 1e-14);
}

#[test]
fn oracle_matches_closed_form_at_half() {
    let g0 = exponential_data(1024, 40.0);
    let model = OracleModel::Coagulation { kernel: CoagulationKernel::Constant, gain_only: false };
    let run = direct_smol_oracle(&g0, model, 0.5, 1e-3, GREGORY).unwrap();
    let want: Vec<f64> = g0.grid.nodes().iter().map(|&x| exact(x, 0.5)).collect();
    assert!(sup(&run.density.values, &want) < 1e-3);
    let m10 = run.track[0].m1;
    for m in &run.track {
        assert!(((m.m1 - m10) / m10).abs() < 1e-4);
        assert!((m.m0 / m0_constant_kernel(run.track[0].m0, m.t).unwrap() - 1.0).abs() < 1e-4);
    }
}

#[test]
fn general_reduces_to_constant_kernel() {
    let g0 = exponential_data(513, 40.0);
    let gen = general_smol_solve(&SmolCoefficients::constant_kernel(), &g0, 1.0, &GeneralSmolOptions::default()).unwrap();
    let direct = constant_kernel_solve(&g0, 1.0, GREGORY).unwrap();
    assert!(sup(&gen.density.values, &direct.values) < 1e-8);
    let last = gen.m0_track.last().unwrap();
    assert!((last.1 - m0_constant_kernel(g0.m0(GREGORY), 1.0).unwrap()).abs() < 1e-10);
    for (s, v) in gen.laplace.grid.nodes().iter().zip(&gen.laplace.values) {
        let den = 1.5;
        let want = 1.0 / (den * den * (s + 1.0 - 1.0 / (2.0 * den)));
        assert!((v.re - want).abs() < 1e-4, "s = {s}: {}", v.re - want);
    }
}

#[test]
fn general_with_source_matches_oracle() {
    let grid = Grid1D::closed(0.0, 20.0, 401).unwrap();
    let g0 = MassDensity::from_fn(grid, |x| x * (-x).exp()).unwrap();
    let coeffs = SmolCoefficients {
        d: vec![-0.2],
        b: vec![0.5],
        a: Some(Arc::new(|x: f64, t: f64| 0.3 * (-x).exp() * (1.0 + t))),
        b0: Some(Arc::new(|x: f64| 0.1 * (-2.0 * x).exp())),
        loss_rate: 1.0,
    };
    let t = 0.4;
    let sol = general_smol_solve(&coeffs, &g0, t, &GeneralSmolOptions::default()).unwrap();
    let oracle = direct_smol_oracle(&g0, OracleModel::General(&coeffs), t, 2e-3, GREGORY).unwrap();
    let gap = sup(&sol.density.values, &oracle.density.values);
    assert!(gap < 1e-5, "gap {gap}");
}

#[test]
fn general_advection_residual_and_boundary() {
    let coeffs = SmolCoefficients { d: vec![0.0, -1.0], b: vec![0.5], loss_rate: 1.0, ..Default::default() };
    let t = 0.5;
    let residual = |n: usize| {
        let grid = Grid1D::closed(0.0, 20.0, n).unwrap();
        let g0 = MassDensity::from_fn(grid, |x| x * x * (-x).exp()).unwrap();
        let dt = grid.spacing();
        let snaps: Vec<MassDensity> = [t - dt, t, t + dt]
            .iter()
            .map(|&s| general_smol_solve(&coeffs, &g0, s, &GeneralSmolOptions::default()).unwrap().density)
            .collect();
        assert!(snaps[1].values[0].abs() < 1e-12, "boundary value {}", snaps[1].values[0]);
        let mut cur = snaps[1].clone();
        cur.t = t;
        general_smol_residual(&coeffs, &snaps[0], &cur, &snaps[2], dt, GREGORY)
    };
    let (r1, r2) = (residual(201), residual(401));
    assert!(r1 / r2 >= 2.0, "{r1} {r2}");
}

#[test]
fn blowup_is_reported() {
    // growth d₀ = 3 with strong coagulation blows up in finite time
    let coeffs = SmolCoefficients { d: vec![3.0], b: vec![2.0], loss_rate: 0.0, ..Default::default() };
    let g0 = exponential_data(257, 20.0);
    let r = general_smol_solve(&coeffs, &g0, 5.0, &GeneralSmolOptions::default());
    assert!(matches!(r, Err(Error::BlowupAtTime { .. })), "{r:?}");
}

#[test]
fn prelaplace_small_nu_and_residual_order() {
    let qhat0 = |n: usize| MassDensity::from_fn(Grid1D::closed(0.0, 4.0, n).unwrap(), |x| (-x).exp()).unwrap();
    let q = qhat0(257);
    let d1 = {
        let s = pre_laplace_burgers_solve(&q, 1e-3, 0.5, GREGORY).unwrap();
        sup(&s.g.values, &s.g0.values)
    };
    let d2 = {
        let s = pre_laplace_burgers_solve(&q, 5e-4, 0.5, GREGORY).unwrap();
        sup(&s.g.values, &s.g0.values)
    };
    assert!(d1 / d2 >= 2.0, "{d1} {d2}");
    let residual = |n: usize| {
        let q = qhat0(n);
        let dt = q.spacing();
        let (t, nu) = (0.5, 0.1);
        let s: Vec<MassDensity> = [t - dt, t, t + dt].iter().map(|&s| pre_laplace_burgers_solve(&q, nu, s, GREGORY).unwrap().g).collect();
        prelaplace_residual(&s[0], &s[1], &s[2], dt, nu, GREGORY)
    };
    let (r1, r2) = (residual(129), residual(257));
    assert!(r1 / r2 >= 2.0, "{r1} {r2}");
    let huge = pre_laplace_burgers_solve(&q, 100.0, 10.0, GREGORY);
    assert!(matches!(huge, Err(Error::Domain(_))));
}

#[test]
fn exponential_kernel_by_rescaling() {
    let alpha = 0.05;
    let grid = Grid1D::closed(0.0, 10.0, 257).unwrap();
    let target0 = MassDensity::from_fn(grid, |x| (-x).exp()).unwrap();
    let exp_model = OracleModel::Coagulation { kernel: CoagulationKernel::Exponential { alpha }, gain_only: true };
    let direct = direct_smol_oracle(&target0, exp_model, 0.3, 1e-2, GREGORY).unwrap();
    let const_model = OracleModel::Coagulation { kernel: CoagulationKernel::Constant, gain_only: true };
    let lifted = exp_kernel_unscale(&target0, alpha).unwrap();
    let via = direct_smol_oracle(&lifted, const_model, 0.3, 1e-2, GREGORY).unwrap();
    let back = exp_kernel_rescale(&via.density, alpha).unwrap();
    for (a, b) in back.values.iter().zip(&direct.density.values) {
        assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
    }
}

#[test]
fn volterra_hand_and_zero() {
    let p = vec![0.3, -1.0, 2.0, 0.5];
    let g = volterra_project(&p, &[0.0; 4], 0.1, GREGORY).unwrap();
    assert_eq!(g, p);
}

proptest! {
    #[test]
    fn volterra_round_trip(values in prop::collection::vec(-1.0f64..1.0, 8..80), scale in 0.0f64..2.0, scheme_id in 0usize..3) {
        let scheme = [QuadratureScheme::RiemannLeft, QuadratureScheme::Trapezoid, QuadratureScheme::Gregory][scheme_id];
        let n = values.len();
        let h = 0.1;
        let qhat: Vec<f64> = (0..n).map(|i| scale * (-(i as f64) * h).exp() * (1.0 + (i as f64).sin())).collect();
        let p = volterra_assemble(&values, &qhat, h, scheme);
        let back = volterra_project(&p, &qhat, h, scheme).unwrap();
        let norm = p.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(sup(&back, &values) <= 1e-12 * norm);
    }

    #[test]
    fn convolution_is_symmetric(f in prop::collection::vec(-1.0f64..1.0, 12..40)) {
        let g: Vec<f64> = f.iter().rev().map(|v| v * 0.5 + 0.1).collect();
        for scheme in [QuadratureScheme::Trapezoid, QuadratureScheme::Gregory] {
            let a = convolve(&f, &g, 0.2, scheme);
            let b = convolve(&g, &f, 0.2, scheme);
            prop_assert!(sup(&a, &b) < 1e-12);
        }
    }
}

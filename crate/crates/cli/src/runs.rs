//! One runner per equation family.

use num_complex::Complex64;
use poppe::elliptic::{elliptic_quotient_solve, EllipticCoefficients};
use poppe::graph_flows::{inviscid_burgers_eval, InitialProfile};
use poppe::integrable::{PoppeConfig, PoppeField, PoppeSolver, SplitStepKdv, SplitStepNls};
use poppe::numerics::{Grid1D, Matrix};
use poppe::quotient::{quotient_odd_degree_solve, quotient_residual, quotient_solve, QuotientCoefficients};
use poppe::smoluchowski::{
    constant_kernel_solve, direct_smol_oracle, general_smol_solve, m0_constant_kernel, pre_laplace_burgers_solve,
    CoagulationKernel, GeneralSmolOptions, MassDensity, OracleModel,
};
use poppe::spde::{
    noisy_initial_field, sech_ridge_profile, physical_gap, spde_direct_run, spde_poppe_run, BrownianSheetModes, Field2D,
};

use crate::config::{Equation, RunConfig};
use crate::error::CliError;
use crate::output::{RunOutput, Table};

type Run = Result<RunOutput, CliError>;

pub fn run(cfg: &RunConfig) -> Run {
    match cfg.equation {
        Equation::Kdv => kdv(cfg),
        Equation::Nls => nls(cfg),
        Equation::SmolConst => smol_const(cfg),
        Equation::SmolGeneral => smol_general(cfg),
        Equation::Prelaplace => prelaplace(cfg),
        Equation::Burgers => burgers(cfg),
        Equation::Spde => spde(cfg),
        Equation::Quotient => quotient(cfg),
        Equation::Elliptic => elliptic(cfg),
    }
}

fn box_grid(cfg: &RunConfig) -> Result<Grid1D<f64>, CliError> {
    let l = cfg.f64("domain-l");
    Ok(Grid1D::periodic(-l / 2.0, l / 2.0, cfg.usize("grid-n"))?)
}

fn closed_grid(cfg: &RunConfig, lo: f64) -> Result<Grid1D<f64>, CliError> {
    Ok(Grid1D::closed(lo, lo + cfg.f64("domain-l"), cfg.usize("grid-n"))?)
}

fn checkpoint_times(cfg: &RunConfig) -> Vec<f64> {
    let c = cfg.usize("checkpoints").max(1);
    let t = cfg.f64("t-final");
    (0..=c).map(|k| t * k as f64 / c as f64).collect()
}

fn poppe_config(cfg: &RunConfig) -> PoppeConfig {
    let mut p = PoppeConfig::new(cfg.f64("domain-l"), cfg.usize("grid-n"));
    p.scheme = cfg.scheme();
    p
}

fn sup(a: impl IntoIterator<Item = f64>) -> f64 {
    a.into_iter().fold(0.0, f64::max)
}

fn note_breakdowns(out: &mut RunOutput, f: &PoppeField) {
    for b in &f.breakdowns {
        out.breakdowns.push(format!("t={:e} x={:e} det={:e}", f.t, b.x, b.det));
    }
}

fn poppe_tables(out: &mut RunOutput, fields: &[PoppeField], complex: bool) {
    let mut values = if complex {
        Table::new("poppe", &["x", "t", "value_re", "value_im"])
    } else {
        Table::new("poppe", &["x", "t", "value"])
    };
    let mut det = Table::new("det", &["x", "t", "det_re", "det_im"]);
    let mut min_det = f64::INFINITY;
    for f in fields {
        note_breakdowns(out, f);
        for ((x, v), d) in f.x.iter().zip(&f.values).zip(&f.det) {
            if complex {
                values.push(vec![*x, f.t, v.re, v.im]);
            } else {
                values.push(vec![*x, f.t, v.re]);
            }
            det.push(vec![*x, f.t, d.re, d.im]);
            min_det = min_det.min(d.norm());
        }
    }
    out.tables.push(values);
    out.tables.push(det);
    out.summarise("min_abs_det", min_det);
}

fn kdv(cfg: &RunConfig) -> Run {
    let grid = box_grid(cfg)?;
    let amp = cfg.f64("amplitude");
    let p0: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|x| match cfg.str("profile") {
            "gaussian" => amp * (-x * x).exp(),
            _ => -0.5 * (x / 20.0).cosh(),
        })
        .collect();
    let solver = PoppeSolver::kdv(&p0, poppe_config(cfg))?;
    let fields = checkpoint_times(cfg).into_iter().map(|t| solver.solve(t)).collect::<Result<Vec<_>, _>>()?;
    let mut out = RunOutput::default();
    poppe_tables(&mut out, &fields, false);
    if cfg.flag("compare-oracle") && out.breakdowns.is_empty() {
        let dt = cfg.f64("dt");
        let per = cfg.steps() / (fields.len() - 1);
        let mut direct = Table::new("direct", &["x", "t", "value"]);
        let mut diff = Table::new("difference", &["x", "t", "abs_diff"]);
        let mut ss = SplitStepKdv::new(&fields[0].real(), &grid, dt)?;
        let mut worst = 0.0f64;
        for (k, f) in fields.iter().enumerate() {
            if k > 0 {
                ss.advance(per)?;
            }
            let u = ss.field();
            for ((x, a), b) in f.x.iter().zip(&u).zip(&f.values) {
                direct.push(vec![*x, f.t, *a]);
                diff.push(vec![*x, f.t, (a - b.re).abs()]);
                worst = worst.max((a - b.re).abs());
            }
        }
        out.tables.push(direct);
        out.tables.push(diff);
        out.summarise("max_difference", worst);
    }
    Ok(out)
}

fn nls(cfg: &RunConfig) -> Run {
    let grid = box_grid(cfg)?;
    let amp = cfg.f64("amplitude");
    let p0: Vec<Complex64> = grid
        .nodes()
        .iter()
        .map(|x| {
            Complex64::new(
                match cfg.str("profile") {
                    "sech" => amp / x.cosh(),
                    _ => 0.5 * (x / 40.0).cosh(),
                },
                0.0,
            )
        })
        .collect();
    let solver = PoppeSolver::nls(&p0, poppe_config(cfg))?;
    let fields = checkpoint_times(cfg).into_iter().map(|t| solver.solve(t)).collect::<Result<Vec<_>, _>>()?;
    let mut out = RunOutput::default();
    poppe_tables(&mut out, &fields, true);
    if cfg.flag("compare-oracle") && out.breakdowns.is_empty() {
        let dt = cfg.f64("dt");
        let per = cfg.steps() / (fields.len() - 1);
        let mut direct = Table::new("direct", &["x", "t", "value_re", "value_im"]);
        let mut diff = Table::new("difference", &["x", "t", "abs_diff"]);
        let mut ss = SplitStepNls::new(&fields[0].values, &grid, dt)?;
        let mass0 = ss.mass();
        let mut worst = 0.0f64;
        for (k, f) in fields.iter().enumerate() {
            if k > 0 {
                ss.advance(per)?;
            }
            for ((x, a), b) in f.x.iter().zip(ss.field()).zip(&f.values) {
                direct.push(vec![*x, f.t, a.re, a.im]);
                diff.push(vec![*x, f.t, (a - b).norm()]);
                worst = worst.max((a - b).norm());
            }
        }
        out.tables.push(direct);
        out.tables.push(diff);
        out.summarise("max_difference", worst);
        out.summarise("direct_mass_drift", (ss.mass() - mass0).abs());
    }
    Ok(out)
}

/// `e^{−2x/(2+t)} / (1 + t/2)²`, the constant-kernel evolution of `e^{−x}`.
fn smol_exact(x: f64, t: f64) -> f64 {
    let den = 1.0 + 0.5 * t;
    (-2.0 * x / (2.0 + t)).exp() / (den * den)
}

fn exp_density(cfg: &RunConfig) -> Result<MassDensity, CliError> {
    Ok(MassDensity::from_fn(closed_grid(cfg, 0.0)?, |x| (-x).exp())?)
}

fn smol_const(cfg: &RunConfig) -> Run {
    let scheme = cfg.scheme();
    let g0 = exp_density(cfg)?;
    let m00 = g0.m0(scheme);
    let mut out = RunOutput::default();
    let mut density = Table::new("density", &["x", "t", "poppe", "exact"]);
    let mut moments = Table::new("moments", &["t", "m0", "m1", "m0_law"]);
    let mut last = g0.clone();
    let mut worst = 0.0f64;
    for t in checkpoint_times(cfg) {
        let g = constant_kernel_solve(&g0, t, scheme)?;
        for (x, v) in g.grid.nodes().into_iter().zip(&g.values) {
            let e = smol_exact(x, t);
            density.push(vec![x, t, *v, e]);
            worst = worst.max((v - e).abs());
        }
        let m = g.moments(scheme);
        moments.push(vec![t, m.m0, m.m1, m0_constant_kernel(m00, t)?]);
        last = g;
    }
    out.tables.push(density);
    out.tables.push(moments);
    out.summarise("max_exact_difference", worst);
    if cfg.flag("compare-oracle") {
        let model = OracleModel::Coagulation { kernel: CoagulationKernel::Constant, gain_only: false };
        let run = direct_smol_oracle(&g0, model, cfg.f64("t-final"), cfg.f64("dt"), scheme)?;
        let mut oracle = Table::new("oracle", &["x", "oracle", "poppe", "abs_diff"]);
        for ((x, a), b) in last.grid.nodes().into_iter().zip(&run.density.values).zip(&last.values) {
            oracle.push(vec![x, *a, *b, (a - b).abs()]);
        }
        let mut track = Table::new("oracle_moments", &["t", "m0", "m1"]);
        for m in &run.track {
            track.push(vec![m.t, m.m0, m.m1]);
        }
        out.summarise("max_oracle_difference", sup(oracle.rows.iter().map(|r| r[3])));
        out.tables.push(oracle);
        out.tables.push(track);
    }
    Ok(out)
}

fn smol_general(cfg: &RunConfig) -> Run {
    let co = cfg.smol_coefficients();
    let g0 = exp_density(cfg)?;
    let t = cfg.f64("t-final");
    let opts = GeneralSmolOptions { scheme: cfg.scheme(), time_steps: cfg.steps().max(1), ..Default::default() };
    let sol = general_smol_solve(&co, &g0, t, &opts)?;
    let mut out = RunOutput::default();
    let mut density = Table::new("density", &["x", "value"]);
    for (x, v) in sol.density.grid.nodes().into_iter().zip(&sol.density.values) {
        density.push(vec![x, *v]);
    }
    let mut m0 = Table::new("m0", &["t", "m0"]);
    for &(s, m) in &sol.m0_track {
        m0.push(vec![s, m]);
    }
    let mut laplace = Table::new("laplace", &["s", "value_re", "value_im"]);
    for (s, v) in sol.laplace.grid.nodes().into_iter().zip(&sol.laplace.values) {
        laplace.push(vec![s, v.re, v.im]);
    }
    out.tables.extend([density, m0, laplace]);
    if cfg.flag("compare-oracle") && co.d1() == 0.0 {
        let run = direct_smol_oracle(&g0, OracleModel::General(&co), t, cfg.f64("dt"), opts.scheme)?;
        let mut oracle = Table::new("oracle", &["x", "oracle", "poppe", "abs_diff"]);
        for ((x, a), b) in g0.grid.nodes().into_iter().zip(&run.density.values).zip(&sol.density.values) {
            oracle.push(vec![x, *a, *b, (a - b).abs()]);
        }
        out.summarise("max_oracle_difference", sup(oracle.rows.iter().map(|r| r[3])));
        out.tables.push(oracle);
    }
    Ok(out)
}

fn prelaplace(cfg: &RunConfig) -> Run {
    let qhat0 = exp_density(cfg)?;
    let sol = pre_laplace_burgers_solve(&qhat0, cfg.f64("nu"), cfg.f64("t-final"), cfg.scheme())?;
    let mut table = Table::new("density", &["x", "qhat", "g0", "g"]);
    for (i, x) in qhat0.grid.nodes().into_iter().enumerate() {
        table.push(vec![x, sol.qhat[i], sol.g0.values[i], sol.g.values[i]]);
    }
    let mut out = RunOutput::default();
    out.summarise("m0", sol.g.m0(cfg.scheme()));
    out.tables.push(table);
    Ok(out)
}

fn burgers(cfg: &RunConfig) -> Run {
    let grid = closed_grid(cfg, -cfg.f64("domain-l") / 2.0)?;
    let xs = grid.nodes();
    let profile = match cfg.str("profile") {
        "linear" => InitialProfile::linear(Matrix::identity(1)),
        "neg-tanh" => InitialProfile::neg_tanh(),
        _ => InitialProfile::sine(),
    };
    let exact = cfg.str("profile") == "linear" && cfg.flag("compare-oracle");
    let mut field = Table::new("field", &["x", "t", "value", "flagged"]);
    let mut diff = Table::new("difference", &["x", "t", "exact", "abs_diff"]);
    let mut out = RunOutput::default();
    for t in checkpoint_times(cfg) {
        let f = inviscid_burgers_eval(&xs, t, &profile)?;
        for &(i, det) in &f.flagged {
            out.breakdowns.push(format!("t={t:e} x={:e} det={det:e}", f.x[i]));
        }
        for (i, (x, v)) in f.x.iter().zip(&f.values).enumerate() {
            let flagged = f.flagged.iter().any(|&(j, _)| j == i);
            field.push(vec![*x, t, *v, if flagged { 1.0 } else { 0.0 }]);
            if exact {
                let e = x / (1.0 + t);
                diff.push(vec![*x, t, e, (v - e).abs()]);
            }
        }
    }
    out.tables.push(field);
    if exact {
        out.summarise("max_exact_difference", sup(diff.rows.iter().map(|r| r[3])));
        out.tables.push(diff);
    }
    Ok(out)
}

fn field_rows(table: &mut Table, f: &Field2D) {
    let n = f.n();
    let s = f.samples();
    for i in 0..n {
        for j in 0..n {
            let v = s[(i, j)];
            table.push(vec![Field2D::node(n, i), Field2D::node(n, j), f.t, v.re, v.im]);
        }
    }
}

fn spde(cfg: &RunConfig) -> Run {
    let n = cfg.usize("grid-n");
    let seed = cfg.u64("seed");
    let params = cfg.spde_params();
    let steps = cfg.steps();
    let panels = cfg.usize("panels");
    let t = cfg.f64("t-final");
    let g0 = noisy_initial_field(n, cfg.f64("noise"), seed, sech_ridge_profile)?;
    let sheet = BrownianSheetModes::generate(seed, n, t, steps.max(panels))?;
    let poppe = spde_poppe_run(&g0, &params, &sheet, panels)?;
    let mut out = RunOutput::default();
    let mut pt = Table::new("poppe", &["x", "y", "t", "value_re", "value_im"]);
    field_rows(&mut pt, &poppe.field);
    let mut det = Table::new("det", &["t", "abs_det"]);
    for &(s, d) in &poppe.det_track {
        det.push(vec![s, d]);
    }
    out.tables.extend([pt, det]);
    out.summarise("poppe_residual", poppe.residual);
    if cfg.flag("compare-oracle") {
        let every = steps / cfg.usize("checkpoints").max(1);
        let traj = spde_direct_run(&g0, &params, &sheet, steps, every)?;
        let mut dt = Table::new("direct", &["x", "y", "t", "value_re", "value_im"]);
        for f in &traj.fields {
            field_rows(&mut dt, f);
        }
        let mut diff = Table::new("difference", &["x", "y", "t", "abs_diff"]);
        let (a, b) = (traj.last().samples(), poppe.field.samples());
        for i in 0..n {
            for j in 0..n {
                diff.push(vec![Field2D::node(n, i), Field2D::node(n, j), t, (a[(i, j)] - b[(i, j)]).norm()]);
            }
        }
        out.summarise("sup_gap", physical_gap(traj.last(), &poppe.field));
        out.tables.extend([dt, diff]);
    }
    Ok(out)
}

fn quotient(cfg: &RunConfig) -> Run {
    let grid = box_grid(cfg)?;
    let n = grid.len();
    let nodes = grid.nodes();
    let g0 = Matrix::from_fn(n, n, |i, j| Complex64::new((-nodes[i] * nodes[i] - 0.5 * nodes[j] * nodes[j]).exp(), 0.0));
    let amp = cfg.f64("amplitude");
    let mut co = QuotientCoefficients::heat(nodes.iter().map(|y| Complex64::new(amp * (-y * y).exp(), 0.0)).collect());
    let odd = cfg.str("profile") == "odd";
    if odd {
        co.odd = vec![0.0, 1.0];
    }
    let dt = cfg.f64("dt");
    let solve = |s: f64| {
        if odd {
            quotient_odd_degree_solve(&g0, &grid, &co, s, ((s / dt).round() as usize).max(1))
        } else {
            quotient_solve(&g0, &grid, &co, s)
        }
    };
    let mut field = Table::new("field", &["x", "y", "t", "value_re", "value_im"]);
    let mut q = Table::new("q", &["y", "t", "q_re", "q_im"]);
    for t in checkpoint_times(cfg) {
        let f = solve(t)?;
        for i in 0..n {
            for j in 0..n {
                let v = f.g[(i, j)];
                field.push(vec![nodes[i], nodes[j], t, v.re, v.im]);
            }
        }
        for (y, v) in nodes.iter().zip(&f.q) {
            q.push(vec![*y, t, v.re, v.im]);
        }
    }
    let mut out = RunOutput::default();
    out.tables.extend([field, q]);
    let t = cfg.f64("t-final");
    if cfg.flag("compare-oracle") && t >= dt {
        let r = quotient_residual(&solve(t - dt)?, &solve(t)?, &solve(t + dt)?, dt, &co, odd)?;
        out.summarise("residual", r);
    }
    Ok(out)
}

fn elliptic(cfg: &RunConfig) -> Run {
    let grid = closed_grid(cfg, 0.0)?;
    let tanh = cfg.str("profile") == "tanh";
    let co = EllipticCoefficients::from_fn(grid, |_| if tanh { [0.0, 1.0, 1.0, 0.0] } else { [0.0, 1.0, 0.0, 0.0] })?;
    let sol = if tanh { elliptic_quotient_solve(&co, 1.0, 0.0)? } else { elliptic_quotient_solve(&co, 1.0, 1.0)? };
    let mut table = Table::new("solution", &["x", "q", "p", "g", "exact", "abs_diff"]);
    for i in 0..sol.x.len() {
        let x = sol.x[i];
        let e = if tanh { x.tanh() } else { 1.0 / (1.0 + x) };
        table.push(vec![x, sol.q[i], sol.p[i], sol.g[i], e, (sol.g[i] - e).abs()]);
    }
    let mut out = RunOutput::default();
    out.summarise("residual", sol.residual);
    out.summarise("max_exact_difference", sup(table.rows.iter().map(|r| r[5])));
    out.tables.push(table);
    Ok(out)
}

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde_json::json;

use threebody4d::dynamics::{
    compare_full_vs_reduced, format_number, integrate, IntegratorConfig, ReducedSystem, Termination,
};
use threebody4d::equilibria::{
    general_equilibrium_pair, isosceles_equilibrium, isosceles_scan, general_scan, linear_grid, log_grid, region_map,
    region_map_csv, EquilibriumReport, IsoscelesParams, ScanRow, ScanTable,
};
use threebody4d::sampling::seeded_rng;
use threebody4d::verify::{
    composition_check, invariant_set_check, restriction_check, symplecticity_check, CheckOutcome,
};
use threebody4d::{ReducedState, ThreeBody};

use crate::config::*;

pub fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let g = Globals::merge(&cli, &file)?;
    match cli.command {
        Command::Verify(a) => verify(&g, a, file),
        Command::Equilibrium(a) => equilibrium(&g, a, file),
        Command::Scan(a) => scan(&g, a, file),
        Command::Integrate(a) => integrate_cmd(&g, a, file),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn verify(g: &Globals, a: VerifyArgs, f: RunConfig) -> CliResult<()> {
    let masses = parse_masses(a.masses.or(f.masses))?;
    if let (Some(mu1), Some(mu2)) = (a.mu1.or(f.mu1), a.mu2.or(f.mu2)) {
        check_momenta(mu1, mu2)?;
    }
    let checks = a.checks.or(f.checks).unwrap_or_else(|| {
        vec![Check::Symplectic, Check::Composition, Check::Invariant, Check::Amatrix]
    });
    if checks.is_empty() {
        return Err(CliError::Config("no checks selected".into()));
    }
    let points = a.points.or(f.points);
    if points == Some(0) {
        return Err(CliError::Config("points must be positive".into()));
    }
    let steps = a.steps.or(f.steps).unwrap_or(1000);
    let mut outcomes: Vec<CheckOutcome> = Vec::new();
    for check in checks {
        match check {
            Check::Symplectic => outcomes.push(symplecticity_check(&masses, g.seed, points.unwrap_or(100))?),
            Check::Composition => outcomes.extend(composition_check(&masses, g.seed, points.unwrap_or(100))?),
            Check::Invariant => outcomes.extend(invariant_set_check(&masses, g.seed, points.unwrap_or(20), steps)?),
            Check::Amatrix => outcomes.extend(restriction_check(&masses, g.seed, points.unwrap_or(20))?),
        }
    }
    if let Some(tol) = g.tol {
        for o in &mut outcomes {
            o.tolerance = tol;
            o.passed = o.max_error < tol;
        }
    }
    for o in &outcomes {
        let verdict = if o.passed { "ok" } else { "FAILED" };
        eprintln!("{}: max error {:.3e} (tol {:.0e}, {} points) {verdict}", o.name, o.max_error, o.tolerance, o.points);
    }
    let text = match g.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&outcomes),
        Format::Csv => {
            let mut s = String::from("check,points,max_error,tolerance,passed\n");
            for o in &outcomes {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    o.name,
                    o.points,
                    format_number(o.max_error),
                    format_number(o.tolerance),
                    o.passed
                ));
            }
            s
        }
    };
    emit(g.out.as_deref(), &text)?;
    match outcomes.iter().find(|o| !o.passed) {
        Some(o) => Err(CliError::Check(o.name.clone())),
        None => Ok(()),
    }
}

fn equilibrium(g: &Globals, a: EquilibriumArgs, f: RunConfig) -> CliResult<()> {
    let general = if a.general || a.isosceles {
        a.general
    } else {
        match f.mode.as_deref() {
            Some("general") => true,
            Some("isosceles") => false,
            Some(other) => return Err(CliError::Config(format!("unknown mode {other:?}"))),
            None => return Err(CliError::Config("choose --isosceles or --general".into())),
        }
    };
    let (param, report) = if general {
        let masses = parse_masses(a.masses.or(f.masses))?;
        let pair = parse_pair(a.pair.or(f.pair))?;
        let u = positive("u", required("u", a.u.or(f.u))?)?;
        (u, general_equilibrium_pair(&masses, u, pair)?)
    } else {
        let n = required("n", a.n.or(f.n))?;
        let t = required("t", a.t.or(f.t))?;
        (t, isosceles_equilibrium(&IsoscelesParams::new(n, t)?)?)
    };
    eprintln!(
        "{}: h = {}, b = {}, omega = ({}, {})",
        report.classification,
        format_number(report.h),
        format_number(report.b),
        format_number(report.frequencies.omega1),
        format_number(report.frequencies.omega2)
    );
    let text = match g.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => single_row(param, &report),
    };
    emit(g.out.as_deref(), &text)
}

fn single_row(param: f64, report: &EquilibriumReport) -> String {
    ScanTable { rows: vec![ScanRow { param, values: Some(report.into()), error: None }] }.to_csv()
}

fn scan(g: &Globals, a: ScanArgs, f: RunConfig) -> CliResult<()> {
    let kind = required("scan kind (isosceles, general or region)", a.kind.or(f.kind))?;
    let count = a.count.or(f.count);
    let format = g.format.unwrap_or(Format::Csv);
    if kind == ScanKind::Region {
        let n_max = positive("n_max", a.n_max.or(f.n_max).unwrap_or(5.0))?;
        let k = count.unwrap_or(50);
        let ns: Vec<f64> = (1..=k).map(|i| n_max * i as f64 / k as f64).collect();
        let ts: Vec<f64> = (0..k).map(|i| (i as f64 + 0.5) / k as f64).collect();
        let rows = region_map(&ns, &ts)?;
        let text = match format {
            Format::Csv => region_map_csv(&rows),
            Format::Json => to_json(&rows),
        };
        return emit(g.out.as_deref(), &text);
    }
    let (lo_default, hi_default) = if kind == ScanKind::Isosceles { (1e-3, 0.99) } else { (1e-3, 0.1) };
    let lo = a.lo.or(f.lo).unwrap_or(lo_default);
    let hi = a.hi.or(f.hi).unwrap_or(hi_default);
    let count = count.unwrap_or(100);
    let grid = match a.spacing.or(f.spacing).unwrap_or(Spacing::Log) {
        Spacing::Log => log_grid(lo, hi, count)?,
        Spacing::Linear => linear_grid(lo, hi, count)?,
    };
    let table = match kind {
        ScanKind::Isosceles => isosceles_scan(required("n", a.n.or(f.n))?, &grid)?,
        _ => {
            let masses = parse_masses(a.masses.or(f.masses))?;
            general_scan(&masses, parse_pair(a.pair.or(f.pair))?, &grid)?
        }
    };
    for row in table.failures() {
        eprintln!("point {}: {}", format_number(row.param), row.error.as_deref().unwrap_or(""));
    }
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&table),
    };
    emit(g.out.as_deref(), &text)
}

fn integrate_cmd(g: &Globals, a: IntegrateArgs, f: RunConfig) -> CliResult<()> {
    let (body, mut start, period) = match a.isosceles.or(f.isosceles) {
        Some(nt) => {
            let [n, t]: [f64; 2] = nt
                .try_into()
                .map_err(|_| CliError::Config("isosceles start takes n,t".into()))?;
            let r = isosceles_equilibrium(&IsoscelesParams::new(n, t)?)?;
            let omega = r.frequencies.omega1.min(r.frequencies.omega2);
            (ThreeBody::newtonian(r.masses), ReducedState::at_rest(r.q, r.mu1, r.mu2)?, Some(2.0 * PI / omega))
        }
        None => {
            let masses = parse_masses(a.masses.or(f.masses))?;
            let q = four("q", required("q", a.q.or(f.q))?)?;
            let p = match a.p.or(f.p) {
                Some(p) => four("p", p)?,
                None => [0.0; 4],
            };
            let (mu1, mu2) = (required("mu1", a.mu1.or(f.mu1))?, required("mu2", a.mu2.or(f.mu2))?);
            check_momenta(mu1, mu2)?;
            (ThreeBody::newtonian(masses), ReducedState::new(q, p, mu1, mu2)?, None)
        }
    };
    if let Some(eps) = a.perturb.or(f.perturb) {
        let eps = positive("perturb", eps)?;
        let mut rng = seeded_rng(g.seed);
        for q in &mut start.q {
            *q += rng.random_range(-eps..eps);
        }
    }
    let t_end = positive("t_end", required("t_end", a.t_end.or(f.t_end).or(period))?)?;
    let mut cfg = match a.method.or(f.method).unwrap_or(MethodArg::Dp) {
        MethodArg::Dp => IntegratorConfig::adaptive(g.tol.unwrap_or(1e-10)),
        MethodArg::Midpoint => {
            IntegratorConfig::midpoint(positive("step", required("step (midpoint)", a.step.or(f.step))?)?)
        }
    };
    if let Some(m) = a.max_steps.or(f.max_steps) {
        cfg.max_steps = m;
    }
    cfg.validate()?;
    let sys = ReducedSystem { body, mu1: start.mu1, mu2: start.mu2 };
    let record = integrate(&sys, &start.to_array(), t_end, &cfg)?;
    match &record.termination {
        Termination::DomainExit { reason, time } => {
            eprintln!("termination: domain exit ({reason}) at t = {}", format_number(*time))
        }
        Termination::StepLimit => eprintln!("termination: step limit"),
        Termination::Completed => {}
    }
    let comparison = if a.compare || f.compare.unwrap_or(false) {
        let samples = a.samples.or(f.samples).unwrap_or(20);
        let rep = compare_full_vs_reduced(&body, &start, t_end, samples, &cfg)?;
        eprintln!("comparison: max deviation {:.3e} over {} samples", rep.max_deviation(), rep.samples);
        Some(rep)
    } else {
        None
    };
    match g.format.unwrap_or(Format::Csv) {
        Format::Json => emit(g.out.as_deref(), &to_json(&json!({ "trajectory": record, "comparison": comparison }))),
        Format::Csv => {
            emit(g.out.as_deref(), &record.to_csv())?;
            if let Some(rep) = comparison {
                match &g.out {
                    Some(path) => std::fs::write(comparison_path(path), to_json(&rep))?,
                    None => eprint!("{}", to_json(&rep)),
                }
            }
            Ok(())
        }
    }
}

/// `run.csv` -> `run.comparison.json`.
pub fn comparison_path(out: &Path) -> PathBuf {
    out.with_extension("comparison.json")
}

//! `emlab` — batch experiment runner for the elliptic measure-data lab.
//!
//! Exit codes: 0 all declared checks pass, 1 usage/config error, 2 check
//! failure. Outputs are plain CSV, byte-identical for identical configs and
//! seeds.

mod config;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use config::Config;
use emlab_core::capacity::{
    cap_equivalence_check, capacitary_level_estimate, capacitary_potential,
};
use emlab_core::geom::{
    frostman_check, greedy_decompose, hausdorff_outer, verify_decomposition, CoverMode,
    HausdorffTarget, SubsetHausdorff,
};
use emlab_core::io::write_grid_function;
use emlab_core::linear::{
    check_boundary_decay, check_interpolation, check_stampacchia, check_weak_lp, check_weak_max,
    solve_linear, SolverOptions,
};
use emlab_core::reduced::{
    refinement_diagnostics, threshold_scan_exponential, threshold_scan_polynomial, ReducedOptions,
};
use emlab_core::semilinear::{
    contraction_solve, minimize_energy, sub_super_solve, SemilinearProblem,
};

#[derive(Parser)]
#[command(name = "emlab", about = "elliptic measure-data laboratory", version)]
struct Cli {
    /// experiment config (key = value lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// output directory for CSV artifacts
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// seed for randomized property suites
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// worker threads for parallel scans
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// solve -Δu = μ and record the estimate checks
    SolveLinear,
    /// solve -Δu + g(u) = μ by a chosen route
    SolveNonlinear {
        #[arg(long, value_parser = ["energy", "bracket", "contraction"])]
        route: String,
    },
    /// truncation ladder and the μ = μ* + γ split across a spacing family
    ReducedMeasure,
    /// existence-threshold scans (exponential or polynomial family)
    ThresholdScan,
    /// Hausdorff outer measure of a point cloud
    Hausdorff,
    /// Frostman density check of a point measure
    Frostman,
    /// greedy decomposition of a point measure against α·H⁰_δ
    Decompose,
    /// capacitary potential / capacity of a node set
    Capacity,
    /// seeded property suite: linear|semilinear|reduced|geom|capacity|all
    Suite { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 1 {
        // deterministic merge order is preserved by collecting in input order
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let path = cli
        .config
        .as_ref()
        .context("this subcommand needs --config")?;
    Config::load(path)
}

fn write_out(cli: &Cli, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let path = cli.out.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

/// Returns Ok(true) when all declared checks pass.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Cmd::SolveLinear => {
            let cfg = load_config(cli)?;
            let h = cfg.spacings()?[0];
            let dom = cfg.domain(h)?;
            let mu = cfg.measure(&dom)?;
            let mut rep = solve_linear(&dom, &mu, &SolverOptions::default())?;
            check_stampacchia(&mut rep, &mu);
            if dom.dim() == 3 {
                check_weak_lp(&mut rep, &mu)?;
            }
            check_boundary_decay(&mut rep, &mu, 4.0);
            let wm_tol = 1e-8 * (1.0 + rep.u.norms().linf);
            check_weak_max(&mut rep, &mu, wm_tol);
            let kappa = 0.5 * rep.u.norms().linf;
            if kappa > 0.0 {
                check_interpolation(&mut rep, &mu, kappa, 1e-12)?;
            }

            write_out(cli, "u.csv", &write_grid_function(&rep.u))?;
            let mut csv = String::from("check,lhs,rhs,pass\n");
            let mut all = true;
            for (name, c) in &rep.estimates {
                csv.push_str(&format!(
                    "{name},{},{},{}\n",
                    fmt(c.lhs),
                    fmt(c.rhs),
                    c.pass
                ));
                all &= c.pass;
            }
            write_out(cli, "checks.csv", &csv)?;
            Ok(all)
        }
        Cmd::SolveNonlinear { route } => {
            let cfg = load_config(cli)?;
            let h = cfg.spacings()?[0];
            let dom = cfg.domain(h)?;
            let mu = cfg.measure(&dom)?;
            let g = cfg.nonlinearity()?;
            let mut prob = SemilinearProblem::new(&dom, g, mu.clone());
            if let Some(t) = cfg.get("tol") {
                prob.tol = t.parse().context("bad `tol`")?;
            }
            if let Some(m) = cfg.get("max_iter") {
                prob.max_iter = m.parse().context("bad `max_iter`")?;
            }
            if let Some(th) = cfg.get("theta") {
                prob.theta = th.parse().context("bad `theta`")?;
            }
            let trace = match route.as_str() {
                "contraction" => contraction_solve(&prob)?,
                "energy" => minimize_energy(&prob)?,
                "bracket" => {
                    let v_lo = solve_linear(&dom, &mu.negative_part(), &prob.solver)?.u;
                    let v_hi = solve_linear(&dom, &mu.positive_part(), &prob.solver)?.u;
                    sub_super_solve(&prob, &v_lo, &v_hi)?
                }
                _ => unreachable!(),
            };
            write_out(cli, "u.csv", &write_grid_function(&trace.u))?;
            let mut csv = String::from("iter,residual,energy\n");
            for (k, r, e) in &trace.iterates {
                let e = e.map(fmt).unwrap_or_default();
                csv.push_str(&format!("{k},{},{e}\n", fmt(*r)));
            }
            write_out(cli, "trace.csv", &csv)?;
            Ok(trace.converged)
        }
        Cmd::ReducedMeasure => {
            let cfg = load_config(cli)?;
            let g = cfg.nonlinearity()?;
            let spacings = cfg.spacings()?;
            let opts = ReducedOptions::default();
            let rows = refinement_diagnostics(
                &spacings,
                &g,
                |h| cfg.domain(h).map_err(to_core_err),
                |dom| cfg.measure(dom).map_err(to_core_err),
                &opts,
            )?;
            let mut csv = String::from("h,level,l1_u,tv_mu_star,tv_gamma\n");
            for (h, level, l1, tvs, tvg) in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt(*h),
                    fmt(*level),
                    fmt(*l1),
                    fmt(*tvs),
                    fmt(*tvg)
                ));
            }
            write_out(cli, "ladder.csv", &csv)?;
            Ok(true)
        }
        Cmd::ThresholdScan => {
            let cfg = load_config(cli)?;
            let spacings = cfg.spacings()?;
            // parallel across the parameter axis, merged in input order
            let rows = match cfg.require("family")? {
                "exp" => {
                    let masses = cfg.f64_list("masses")?;
                    let chunks: Vec<_> = masses
                        .par_iter()
                        .map(|&c| {
                            threshold_scan_exponential(&[c], &spacings, &SolverOptions::default())
                        })
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    chunks.into_iter().flatten().collect()
                }
                "poly" => {
                    let powers = cfg.f64_list("powers")?;
                    let chunks: Vec<_> = powers
                        .par_iter()
                        .map(|&p| {
                            threshold_scan_polynomial(&[p], &spacings, &ReducedOptions::default())
                        })
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    chunks.into_iter().flatten().collect::<Vec<_>>()
                }
                other => bail!("unknown family `{other}`"),
            };
            let mut csv = String::from("param,h,statistic,classification\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt(r.param),
                    fmt(r.h),
                    fmt(r.statistic),
                    r.classification
                ));
            }
            write_out(cli, "scan.csv", &csv)?;
            Ok(true)
        }
        Cmd::Hausdorff => {
            let cfg = load_config(cli)?;
            let pm = cfg.point_measure()?;
            let s: f64 = cfg.f64_or("s", 0.0)?;
            let delta: f64 = cfg.f64_or("delta", f64::INFINITY)?;
            let mode = match cfg.get("mode").unwrap_or("exact") {
                "exact" => CoverMode::Exact,
                "greedy" => CoverMode::Greedy,
                other => bail!("unknown mode `{other}`"),
            };
            let (value, cover) = hausdorff_outer(
                &HausdorffTarget::Points(pm.points()),
                pm.dim(),
                s,
                delta,
                mode,
            )?;
            let mut csv = String::from("cx,cy,cz,r\n");
            for (c, r) in &cover.balls {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt(c[0]),
                    fmt(c[1]),
                    fmt(c[2]),
                    fmt(*r)
                ));
            }
            write_out(cli, "cover.csv", &csv)?;
            write_out(
                cli,
                "value.csv",
                &format!("s,delta,value\n{},{},{}\n", fmt(s), fmt(delta), fmt(value)),
            )?;
            Ok(cover.covers(pm.points()))
        }
        Cmd::Frostman => {
            let cfg = load_config(cli)?;
            let pm = cfg.point_measure()?;
            let s: f64 = cfg.f64_or("s", 0.0)?;
            let delta: f64 = cfg.f64_or("delta", 1.0)?;
            let alpha: f64 = cfg.f64_or("alpha", 1.0)?;
            let ok = frostman_check(&pm, alpha, s, delta)?;
            write_out(
                cli,
                "frostman.csv",
                &format!(
                    "alpha,s,delta,pass\n{},{},{},{}\n",
                    fmt(alpha),
                    fmt(s),
                    fmt(delta),
                    ok
                ),
            )?;
            Ok(ok)
        }
        Cmd::Decompose => {
            let cfg = load_config(cli)?;
            let pm = cfg.point_measure()?;
            let s: f64 = cfg.f64_or("s", 0.0)?;
            let delta: f64 = cfg.f64_or("delta", 1.0)?;
            let alpha: f64 = cfg.f64_or("alpha", 1.0)?;
            let theta: f64 = cfg.f64_or("theta", 0.5)?;
            let sh = SubsetHausdorff::build(pm.points(), s, delta)?;
            let mut t = |mask: u64| alpha * sh.value(mask);
            let kept = greedy_decompose(&pm, &mut t, theta)?;
            let ok = verify_decomposition(&pm, &mut t, kept);
            let mut csv = String::from("index,x,y,z,w,kept\n");
            for i in 0..pm.len() {
                let p = pm.points()[i];
                csv.push_str(&format!(
                    "{i},{},{},{},{},{}\n",
                    fmt(p[0]),
                    fmt(p[1]),
                    fmt(p[2]),
                    fmt(pm.weights()[i]),
                    kept & (1 << i) != 0
                ));
            }
            write_out(cli, "decompose.csv", &csv)?;
            Ok(ok)
        }
        Cmd::Capacity => {
            let cfg = load_config(cli)?;
            let h = cfg.spacings()?[0];
            let dom = cfg.domain(h)?;
            // node set: explicit `k_index` lists, nearest nodes of
            // `k_point` entries, and/or a `k_box` predicate
            let mut k = Vec::new();
            for entry in cfg.get_all("k_index") {
                for tok in entry.split_whitespace() {
                    let idx: usize = tok.parse().context("bad `k_index`")?;
                    if idx >= dom.interior_count() {
                        bail!("k_index {idx} out of range (touches the boundary)");
                    }
                    k.push(idx);
                }
            }
            for entry in cfg.get_all("k_point") {
                let nums: Vec<f64> = entry
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .context("bad `k_point`")?;
                if !dom.contains_strict(&nums) {
                    bail!("k_point touches or leaves the boundary");
                }
                k.push(dom.nearest_interior_node(&nums));
            }
            if let Some(entry) = cfg.get("k_box") {
                let b: Vec<f64> = entry
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .context("bad `k_box`")?;
                if b.len() != 2 * dom.dim() {
                    bail!("`k_box` needs {} numbers", 2 * dom.dim());
                }
                for i in 0..dom.interior_count() {
                    let p = dom.node_pos(i);
                    let inside = (0..dom.dim()).all(|a| p[a] >= b[2 * a] && p[a] <= b[2 * a + 1]);
                    if inside {
                        k.push(i);
                    }
                }
            }
            let r = capacitary_potential(&dom, &k)?;
            write_out(cli, "potential.csv", &write_grid_function(&r.potential))?;
            let eps: f64 = cfg.f64_or("epsilon", 0.5)?;
            let chk = cap_equivalence_check(&r, eps, cfg.f64_or("equivalence_tol", 0.2)?)?;
            let mut csv = String::from("quantity,value\n");
            csv.push_str(&format!("cap,{}\n", fmt(r.cap)));
            csv.push_str(&format!("nu_mass,{}\n", fmt(r.nu.total_mass())));
            csv.push_str(&format!("equiv_mass,{}\n", fmt(chk.mass)));
            csv.push_str(&format!("equiv_rel_err,{}\n", fmt(chk.ratio_error)));
            write_out(cli, "capacity.csv", &csv)?;

            if let Some(entry) = cfg.get("levels") {
                let levels: Vec<f64> = entry
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .context("bad `levels`")?;
                let mu = cfg.measure(&dom)?;
                let rep = solve_linear(&dom, &mu, &SolverOptions::default())?;
                let rows = capacitary_level_estimate(&rep.u, &mu, &levels)?;
                let mut csv = String::from("s,statistic\n");
                for (s, v) in rows {
                    csv.push_str(&format!("{},{}\n", fmt(s), fmt(v)));
                }
                write_out(cli, "levels.csv", &csv)?;
            }
            Ok(chk.pass)
        }
        Cmd::Suite { name } => {
            let report = suites::run_suite(name, cli.seed)?;
            write_out(cli, "suite.csv", &report.to_csv())?;
            for (s, p, ok) in &report.rows {
                println!("{s}/{p}: {}", if *ok { "pass" } else { "FAIL" });
            }
            Ok(report.all_pass())
        }
    }
}

fn to_core_err(err: anyhow::Error) -> emlab_core::Error {
    emlab_core::Error::InvalidArgument(err.to_string())
}

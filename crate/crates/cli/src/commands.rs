//! The four subcommands. Each reads a config, writes its files into the
//! output directory and embeds the config under `inputs` in its JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fsa_core::asymptotics::{
    convergence_verdict, limsup_inv_norm, limsup_kappa, limsup_norm, limsup_pseudospectrum, pollution_attribution,
    Settings,
};
use fsa_core::format::ExperimentConfig;
use fsa_core::parallel::Parallelism;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::RunArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// Some sections are not uniformly invertible. Files are still written.
    Unstable,
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let path = &args.config;
    let text = fs::read_to_string(path).map_err(|source| CliError::ReadConfig { path: path.clone(), source })?;
    ExperimentConfig::from_json_str(&text)
        .and_then(|c| c.with_overrides(args.n_max, args.tol))
        .map_err(|source| CliError::Config { path: path.clone(), source })
}

fn settings(cfg: &ExperimentConfig, args: &RunArgs) -> Settings {
    Settings { tol: cfg.tol, m_max: cfg.m_max, parallelism: Parallelism::from_flag(args.parallel) }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Write { path, source })
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).expect("reports serialize");
    text.push('\n');
    write(dir, name, &text)
}

fn out_dir(args: &RunArgs) -> Result<&Path, CliError> {
    fs::create_dir_all(&args.out).map_err(|source| CliError::Write { path: args.out.clone(), source })?;
    Ok(&args.out)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// `report.json` with the three scalar reports, `samples.csv` with one
/// `quantity,n,value` row per sample.
pub fn analyze(args: &RunArgs) -> Result<Outcome, CliError> {
    let cfg = load(args)?;
    let s = settings(&cfg, args);
    let reports = [
        ("norm", limsup_norm(&cfg.expression, cfg.n_range, &s)?),
        ("inv_norm", limsup_inv_norm(&cfg.expression, cfg.n_range, &s)?),
        ("kappa", limsup_kappa(&cfg.expression, cfg.n_range, &s)?),
    ];
    let stable = reports[1].1.stable;
    let dir = out_dir(args)?;

    let mut csv = String::from("quantity,n,value\n");
    for (name, r) in &reports {
        for (n, v) in &r.sequence_samples {
            writeln!(csv, "{name},{n},{v}").unwrap();
        }
    }
    write(dir, "samples.csv", &csv)?;

    let body: serde_json::Map<String, Value> = reports.iter().map(|(k, r)| (k.to_string(), to_value(r))).collect();
    let doc = json!({
        "command": "analyze",
        "name": cfg.name,
        "inputs": cfg.source,
        "stable": stable,
        "reports": body,
    });
    write_json(dir, "report.json", &doc)?;
    Ok(if stable == Some(false) { Outcome::Unstable } else { Outcome::Done })
}

/// Per-`n` grids of the tail, the indicator-union grid and `summary.json`.
/// Grid values are `μ` and do not depend on ε, so they are written once.
pub fn pseudo(args: &RunArgs) -> Result<Outcome, CliError> {
    let cfg = load(args)?;
    let pc = cfg.pseudo.as_ref().ok_or_else(|| CliError::MissingSection {
        path: args.config.clone(),
        section: "pseudo",
        command: "pseudo",
    })?;
    let par = Parallelism::from_flag(args.parallel);
    let analyses = pc
        .epsilons
        .iter()
        .map(|&eps| limsup_pseudospectrum(&cfg.expression, eps, &pc.grid, cfg.n_range, par))
        .collect::<Result<Vec<_>, _>>()?;
    let dir = out_dir(args)?;

    let first = &analyses[0];
    let mut files = Vec::new();
    for (n, g) in &first.sequence_grids {
        let name = format!("grid_n{n}.csv");
        write(dir, &name, &g.to_csv())?;
        files.push(name);
    }
    write(dir, "indicator_union.csv", &first.union_grid.to_csv())?;
    files.push("indicator_union.csv".into());

    let summaries: Vec<Value> = analyses.iter().map(|a| to_value(&a.summary)).collect();
    let labels: Vec<&str> = first.indicator_grids.iter().map(|(l, _)| l.as_str()).collect();
    let doc = json!({
        "command": "pseudo",
        "name": cfg.name,
        "inputs": cfg.source,
        "indicators": labels,
        "files": files,
        "summaries": summaries,
    });
    write_json(dir, "summary.json", &doc)?;
    Ok(Outcome::Done)
}

/// `verdicts.json`: one verdict per configured quantity, pseudospectra
/// included when a grid is configured.
pub fn converge(args: &RunArgs) -> Result<Outcome, CliError> {
    let cfg = load(args)?;
    let s = settings(&cfg, args);
    let grid = cfg.pseudo.as_ref().map(|p| &p.grid);
    let verdicts = cfg
        .verdict_quantities()
        .into_iter()
        .map(|q| convergence_verdict(&cfg.expression, q, &s, grid).map(|r| to_value(&r)))
        .collect::<Result<Vec<_>, _>>()?;
    let dir = out_dir(args)?;
    let doc = json!({
        "command": "converge",
        "name": cfg.name,
        "inputs": cfg.source,
        "verdicts": verdicts,
    });
    write_json(dir, "verdicts.json", &doc)?;
    Ok(Outcome::Done)
}

/// `pollution.json`: the culprit list for every configured λ.
pub fn pollution(args: &RunArgs) -> Result<Outcome, CliError> {
    let cfg = load(args)?;
    let pc = cfg.pollution.as_ref().ok_or_else(|| CliError::MissingSection {
        path: args.config.clone(),
        section: "pollution",
        command: "pollution",
    })?;
    let results = pc
        .lambdas
        .iter()
        .map(|&l| pollution_attribution(&cfg.expression, l, pc.epsilon, pc.window).map(|r| to_value(&r)))
        .collect::<Result<Vec<_>, _>>()?;
    let dir = out_dir(args)?;
    let doc = json!({
        "command": "pollution",
        "name": cfg.name,
        "inputs": cfg.source,
        "results": results,
    });
    write_json(dir, "pollution.json", &doc)?;
    Ok(Outcome::Done)
}

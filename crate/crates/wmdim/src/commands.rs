//! Command implementations. Each returns its report as text.

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use wmdim_core::counting::{packing_number, spanning_number, CountBounds, CoverMode, FiniteMetricInstance, SearchMode};
use wmdim_core::covers::{d_bounds, mdim_upper_estimate, DEFAULT_DIMENSION_CAP};
use wmdim_core::invariants::{
    assemble_mmdim, check_mmdim_inputs, compute_cell, entropy_estimate, mmdim_cells, power_rule_probe, Sampling,
};
use wmdim_core::ocap::{is_small, orbit_capacity, orbit_capacity_bruteforce};
use wmdim_core::tower::{validate_tower, Tower, TowerKind};
use wmdim_core::wmetric::bowen_distance;
use wmdim_core::{ln_biguint, Rational};

use crate::config::{parse_rational, RunConfig};
use crate::error::{CliError, CliResult, Lines};
use crate::example51::{run_example51, Example51Options};
use crate::report::{cell_row, decimal, float, mmdim_report, rational, CELL_HEADER};

/// Subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Structural validation of the tower.
    Validate,
    /// Window lengths per `n`.
    Windows,
    /// Pairwise distance enclosures of the configured points.
    Distance,
    /// Counts per `(n, eps)`.
    Count,
    /// Weighted entropy estimate (and power-rule probe).
    Entropy,
    /// Metric mean dimension bracket.
    Mmdim,
    /// Cover order, mesh and `D` bounds.
    CoverBounds,
    /// Orbit capacity of the configured graph.
    Ocap,
    /// The two-level cube example pipeline.
    Example51,
}

/// Parameters after merging the config file with command line overrides.
#[derive(Debug, Clone)]
pub struct Params {
    /// Times.
    pub n: Vec<u64>,
    /// Scales.
    pub eps: Vec<Rational>,
    /// Cover mode.
    pub mode: CoverMode,
    /// Sampling for cover cells.
    pub sampling: Sampling,
    /// Exact or greedy search on finite instances.
    pub search: SearchMode,
    /// Power for the power-rule probe.
    pub power: Option<u64>,
    /// Cap on the weighted join's dimension.
    pub dimension_cap: usize,
}

/// Command line overrides; `None` keeps the config value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// `--n`.
    pub n: Option<Vec<u64>>,
    /// `--eps`.
    pub eps: Option<Vec<String>>,
    /// `--mode`.
    pub mode: Option<String>,
    /// `--seed`.
    pub seed: Option<u64>,
    /// `--samples`.
    pub samples: Option<usize>,
    /// `--power`.
    pub power: Option<u64>,
}

fn parse_mode(text: &str) -> CliResult<CoverMode> {
    match text {
        "faithful" => Ok(CoverMode::Faithful),
        "tight" => Ok(CoverMode::Tight),
        other => Err(CliError::Parameters(format!("mode must be faithful or tight, got {other:?}"))),
    }
}

impl Params {
    /// Merges config values with overrides and checks list shapes.
    pub fn resolve(config: &RunConfig, overrides: &Overrides) -> CliResult<Params> {
        let n = overrides.n.clone().or_else(|| config.n.clone()).unwrap_or_default();
        if n.contains(&0) || n.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Parameters("n list must be positive and strictly increasing".into()));
        }
        let eps = overrides
            .eps
            .clone()
            .or_else(|| config.eps.clone())
            .unwrap_or_default()
            .iter()
            .map(|e| parse_rational(e, "eps"))
            .collect::<CliResult<Vec<_>>>()?;
        if eps.iter().any(|e| *e <= Rational::zero()) || eps.windows(2).any(|w| w[0] <= w[1]) {
            return Err(CliError::Parameters("eps list must be positive and strictly decreasing".into()));
        }
        let mode = parse_mode(overrides.mode.as_deref().or(config.mode.as_deref()).unwrap_or("tight"))?;
        let search = match config.search.as_deref().unwrap_or("exact") {
            "exact" => SearchMode::Exact,
            "greedy" => SearchMode::Greedy,
            other => return Err(CliError::Parameters(format!("search must be exact or greedy, got {other:?}"))),
        };
        Ok(Params {
            n,
            eps,
            mode,
            sampling: Sampling {
                samples: overrides.samples.or(config.samples).unwrap_or(1),
                seed: overrides.seed.or(config.seed).unwrap_or(0),
            },
            search,
            power: overrides.power.or(config.power),
            dimension_cap: config.dimension_cap.unwrap_or(DEFAULT_DIMENSION_CAP),
        })
    }
}

fn require<'a, T>(value: &'a Option<T>, what: &str) -> CliResult<&'a T> {
    value.as_ref().ok_or_else(|| CliError::Parameters(format!("config has no `{what}`")))
}

fn require_list<'a, T>(list: &'a [T], what: &str) -> CliResult<&'a [T]> {
    if list.is_empty() {
        Err(CliError::Parameters(format!("no `{what}` values given")))
    } else {
        Ok(list)
    }
}

/// Builds the tower and refuses it unless validation passes.
pub fn checked_tower(config: &RunConfig) -> CliResult<Tower> {
    let tower = require(&config.tower, "tower")?.build()?;
    let report = validate_tower(&tower);
    if !report.is_ok() {
        let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Validation(Lines(&lines).to_string()));
    }
    Ok(tower)
}

/// Runs one command in the current rayon pool.
pub fn run(command: Command, config: &RunConfig, params: &Params) -> CliResult<String> {
    match command {
        Command::Validate => validate(config),
        Command::Windows => windows(config, params),
        Command::Distance => distance(config, params),
        Command::Count => count(config, params),
        Command::Entropy => entropy(config, params),
        Command::Mmdim => mmdim(config, params),
        Command::CoverBounds => cover_bounds(config, params),
        Command::Ocap => ocap(config),
        Command::Example51 => example51(params),
    }
}

/// Runs one command on a dedicated pool of `threads` workers.
pub fn run_with_threads(command: Command, config: &RunConfig, params: &Params, threads: usize) -> CliResult<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Parameters(format!("thread pool: {e}")))?;
    pool.install(|| run(command, config, params))
}

fn validate(config: &RunConfig) -> CliResult<String> {
    let tower = require(&config.tower, "tower")?.build()?;
    let report = validate_tower(&tower);
    let mut out = String::new();
    for note in &report.notes {
        out.push_str(&format!("note: {note}\n"));
    }
    if !report.is_ok() {
        let mut lines: Vec<String> = report.notes.iter().map(|n| format!("note: {n}")).collect();
        lines.extend(report.violations.iter().map(|v| v.to_string()));
        return Err(CliError::Validation(Lines(&lines).to_string()));
    }
    let kind = match tower.kind() {
        TowerKind::Symbolic => "symbolic",
        TowerKind::Cube => "cube",
        TowerKind::Mixed => "mixed",
    };
    out.push_str(&format!("ok: {kind} tower of depth {}\n", tower.depth()));
    Ok(out)
}

fn windows(config: &RunConfig, params: &Params) -> CliResult<String> {
    let tower = checked_tower(config)?;
    let n_list = require_list(&params.n, "n")?;
    let mut out = String::from("n");
    for i in 1..=tower.depth() {
        out.push_str(&format!(",L{i}"));
    }
    out.push('\n');
    for &n in n_list {
        let row: Vec<String> = tower.windows(n).iter().map(u64::to_string).collect();
        out.push_str(&format!("{n},{}\n", row.join(",")));
    }
    Ok(out)
}

fn distance(config: &RunConfig, params: &Params) -> CliResult<String> {
    let tower = checked_tower(config)?;
    let points = require(&config.points, "points")?
        .iter()
        .map(|p| p.build())
        .collect::<CliResult<Vec<_>>>()?;
    let mut out = String::from("n,i,j,lo,hi,lo_decimal,hi_decimal\n");
    for &n in require_list(&params.n, "n")? {
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let d = bowen_distance(&tower, &points[i], &points[j], n)?;
                out.push_str(&format!(
                    "{n},{i},{j},{},{},{},{}\n",
                    rational(&d.lo),
                    rational(&d.hi),
                    decimal(&d.lo),
                    decimal(&d.hi)
                ));
            }
        }
    }
    Ok(out)
}

fn bounds_row(n: u64, eps: &Rational, what: &str, b: &CountBounds) -> String {
    let upper = b.upper.as_ref().map_or("inf".to_string(), |u| u.to_string());
    let log_upper = b.upper.as_ref().map_or(f64::INFINITY, ln_biguint);
    format!(
        "{n},{},{},{},{what},{},{},{},{}\n",
        rational(eps),
        float(b.log_lower()),
        float(log_upper),
        decimal(eps),
        b.lower,
        upper,
        b.exact
    )
}

fn count(config: &RunConfig, params: &Params) -> CliResult<String> {
    let tower = checked_tower(config)?;
    let n_list = require_list(&params.n, "n")?;
    let eps_list = require_list(&params.eps, "eps")?;
    if let Some(points) = &config.points {
        let points = points.iter().map(|p| p.build()).collect::<CliResult<Vec<_>>>()?;
        let mut out = String::from("n,eps,log_lower,log_upper,mode,eps_decimal,count_lower,count_upper,exact\n");
        for &n in n_list {
            let instance = FiniteMetricInstance::from_points(&tower, &points, n)?;
            for eps in eps_list {
                out.push_str(&bounds_row(n, eps, "spanning", &spanning_number(&instance, eps, params.search)?));
                out.push_str(&bounds_row(n, eps, "packing", &packing_number(&instance, eps, params.search)?));
            }
        }
        return Ok(out);
    }
    let specs = mmdim_cells(&tower, eps_list, n_list, params.mode)?;
    let cells = specs
        .par_iter()
        .map(|spec| compute_cell(&tower, spec, params.sampling))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from(CELL_HEADER);
    out.push('\n');
    for cell in &cells {
        out.push_str(&cell_row(cell));
        out.push('\n');
    }
    Ok(out)
}

fn entropy(config: &RunConfig, params: &Params) -> CliResult<String> {
    let tower = checked_tower(config)?;
    let n_list = require_list(&params.n, "n")?;
    let report = entropy_estimate(&tower, n_list)?;
    let closed = report.closed_form.as_ref();
    let mut out = String::from("n,count,value,value_decimal,cauchy_gap,closed_form,matches_closed_form\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.n,
            row.count,
            row.value.render(),
            float(row.value.value()),
            float(row.cauchy_gap),
            closed.map_or_else(|| "none".into(), |c| c.render()),
            closed.map_or_else(|| "none".into(), |c| (row.value == *c).to_string()),
        ));
    }
    if let Some(m) = params.power {
        let probe = power_rule_probe(&tower, m, n_list)?;
        out.push_str("\nm,n,power_value,scaled_value,deviation,gap,block_identity\n");
        for row in &probe.rows {
            out.push_str(&format!(
                "{m},{},{},{},{},{},{}\n",
                row.n,
                row.power_value.render(),
                row.scaled_value.render(),
                float(row.deviation),
                float(row.gap),
                row.block_identity
            ));
        }
        out.push_str(&format!("\nmax_deviation\n{}\n", float(probe.max_deviation)));
    }
    Ok(out)
}

fn mmdim(config: &RunConfig, params: &Params) -> CliResult<String> {
    let tower = checked_tower(config)?;
    check_mmdim_inputs(&params.eps, &params.n)?;
    let specs = mmdim_cells(&tower, &params.eps, &params.n, params.mode)?;
    let cells = specs
        .par_iter()
        .map(|spec| compute_cell(&tower, spec, params.sampling))
        .collect::<Result<Vec<_>, _>>()?;
    let report = assemble_mmdim(&tower, &params.eps, cells)?;
    Ok(mmdim_report(&report))
}

fn cover_bounds(config: &RunConfig, params: &Params) -> CliResult<String> {
    let covers = require(&config.covers, "covers")?
        .iter()
        .map(|c| c.build())
        .collect::<CliResult<Vec<_>>>()?;
    let mut out = String::from("cover,members,dims,ord,mesh_sup,mesh_sup_decimal,d_lower,d_upper,weak_lower,exact\n");
    let rows: Vec<String> = covers
        .par_iter()
        .enumerate()
        .map(|(k, cover)| {
            let b = d_bounds(cover);
            let mesh = cover.mesh_sup();
            format!(
                "{k},{},{},{},{},{},{},{},{},{}\n",
                cover.members().len(),
                cover.coords().len(),
                cover.ord(),
                rational(&mesh),
                decimal(&mesh),
                b.lower,
                b.upper,
                b.weak_lower,
                b.is_exact()
            )
        })
        .collect();
    rows.iter().for_each(|r| out.push_str(r));
    if config.tower.is_some() && !params.n.is_empty() {
        let tower = checked_tower(config)?;
        let est = mdim_upper_estimate(&tower, &covers, &params.n, params.dimension_cap)?;
        out.push_str("\nn,effective_dim,d_upper,ratio\n");
        for row in &est.rows {
            out.push_str(&format!("{},{},{},{}\n", row.n, row.effective_dim, row.d_upper, float(row.ratio)));
        }
        out.push_str(&format!("\ntrend\n{}\n", float(est.trend)));
    }
    Ok(out)
}

fn ocap(config: &RunConfig) -> CliResult<String> {
    let graph = require(&config.graph, "graph")?.build()?;
    let cap = orbit_capacity(&graph);
    let mut out = String::from("vertices,orbit_capacity,orbit_capacity_decimal,is_small,bruteforce\n");
    let brute = if graph.vertices() <= 10 {
        let b = orbit_capacity_bruteforce(&graph, graph.vertices())?;
        format!("{}/{}", b.numer(), b.denom())
    } else {
        "skipped".into()
    };
    out.push_str(&format!(
        "{},{}/{},{},{},{}\n",
        graph.vertices(),
        cap.numer(),
        cap.denom(),
        float(cap.to_f64().unwrap_or(f64::NAN)),
        is_small(&graph),
        brute
    ));
    Ok(out)
}

fn example51(params: &Params) -> CliResult<String> {
    let mut opts = Example51Options { sampling: params.sampling, ..Example51Options::default() };
    if !params.n.is_empty() {
        opts.faithful_n = params.n.clone();
    }
    if !params.eps.is_empty() {
        opts.faithful_eps = params.eps.clone();
    }
    Ok(run_example51(&opts)?.render())
}

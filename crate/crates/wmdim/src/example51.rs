//! The two-level cube tower `([0,1]^2)^Z -> [0,1]^Z` with weights `(1, 1)`:
//! reproduction of the published cover count and slope, and an audit of
//! the separated family used for the matching lower bound.

use num_bigint::BigUint;
use rayon::prelude::*;
use wmdim_core::counting::{
    cube_cover_count, full_window_grid_sample, verify_separated, CoverMode, Separation,
};
use wmdim_core::invariants::{assemble_mmdim, compute_cell, mmdim_cells, MmdimReport, Sampling};
use wmdim_core::tower::{CubeSystem, ForgetfulFactor, Level, Tower, WeightVector};
use wmdim_core::wmetric::{bowen_distance, DistanceInterval};
use wmdim_core::{dyadic, floor_ratio, Rational};

use crate::error::CliResult;
use crate::report::{decimal, float, rational};

/// The value of the weighted metric mean dimension claimed for this tower.
pub const CLAIMED_VALUE: f64 = 4.0;

/// `([0,1]^2)^Z` with the shift, projected to its first component.
pub fn example51_tower() -> Tower {
    Tower::new(
        vec![Level::Cube(CubeSystem::shift(2)), Level::Cube(CubeSystem::shift(1))],
        vec![ForgetfulFactor::Project { keep: 1 }],
        WeightVector::from_ints(&[1, 1]).expect("positive weights"),
    )
}

/// Parameters of the pipeline.
#[derive(Debug, Clone)]
pub struct Example51Options {
    /// Times for the faithful reproduction.
    pub faithful_n: Vec<u64>,
    /// Scales for the faithful reproduction.
    pub faithful_eps: Vec<Rational>,
    /// Times for the audited bracket.
    pub bracket_n: Vec<u64>,
    /// Scales for the audited bracket.
    pub bracket_eps: Vec<Rational>,
    /// Time of the separation audit.
    pub audit_n: u64,
    /// Scale of the separation audit.
    pub audit_eps: Rational,
    /// Sampled pairs per cover cell.
    pub sampling: Sampling,
}

impl Default for Example51Options {
    fn default() -> Self {
        Example51Options {
            faithful_n: vec![2, 4, 8, 16],
            faithful_eps: (2..=6).map(|k| dyadic(-k)).collect(),
            bracket_n: vec![4, 8, 16],
            bracket_eps: (4..=9).map(|k| dyadic(-k)).collect(),
            audit_n: 3,
            audit_eps: dyadic(-2),
            sampling: Sampling { samples: 1, seed: 0 },
        }
    }
}

/// One faithful cover count next to the published formula.
#[derive(Debug, Clone, PartialEq)]
pub struct FaithfulLine {
    /// Time.
    pub n: u64,
    /// Scale.
    pub eps: Rational,
    /// Padding `l`.
    pub pad: u64,
    /// `1 + floor(12/eps)`.
    pub base: BigUint,
    /// Exponent of the constructed cover.
    pub exponent: u64,
    /// `4n + 4l + 2`.
    pub formula_exponent: u64,
    /// Exponent of the tight cover.
    pub tight_exponent: u64,
    /// Cell diameter bound of the faithful cover.
    pub diameter_bound: Rational,
    /// Whether the diameter bound is at most `eps`.
    pub certified: bool,
}

/// Outcome of checking the published separated family.
#[derive(Debug, Clone, PartialEq)]
pub struct Audit {
    /// Time.
    pub n: u64,
    /// Scale.
    pub eps: Rational,
    /// Coordinates `(m, c)` along which one grid step moves by less than
    /// `eps` in `d_n^a`.
    pub failing_coords: Vec<(i64, usize)>,
    /// Coordinates along which one grid step moves by exactly `eps`.
    pub boundary_coords: Vec<(i64, usize)>,
    /// Failing pair with the smallest distance (see [`verify_separated`]).
    pub counterexample: Option<(usize, usize, (i64, usize), DistanceInterval)>,
}

/// Everything the pipeline produces.
#[derive(Debug, Clone)]
pub struct Example51Report {
    /// Faithful reproduction rows.
    pub faithful: Vec<FaithfulLine>,
    /// Slopes from the faithful construction.
    pub faithful_slopes: MmdimReport,
    /// Slopes from the tight cover and the packing grid.
    pub audited_slopes: MmdimReport,
    /// Separation audit.
    pub audit: Audit,
}

/// Padding and exponent of the published count, from the formula alone.
pub fn published_exponent(n: u64, eps: &Rational) -> (u64, u64) {
    let four = Rational::from_integer(4.into());
    let mut l = 0u64;
    while dyadic(l as i64 + 1) <= &four / eps {
        l += 1;
    }
    (l, 4 * n + 4 * l + 2)
}

fn slopes(tower: &Tower, eps: &[Rational], n: &[u64], mode: CoverMode, sampling: Sampling) -> CliResult<MmdimReport> {
    wmdim_core::invariants::check_mmdim_inputs(eps, n)?;
    let specs = mmdim_cells(tower, eps, n, mode)?;
    let cells = specs
        .par_iter()
        .map(|spec| compute_cell(tower, spec, sampling))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble_mmdim(tower, eps, cells)?)
}

/// Runs the pipeline.
pub fn run_example51(opts: &Example51Options) -> CliResult<Example51Report> {
    let tower = example51_tower();
    let grid: Vec<(u64, Rational)> = opts
        .faithful_n
        .iter()
        .flat_map(|&n| opts.faithful_eps.iter().map(move |e| (n, e.clone())))
        .collect();
    let faithful = grid
        .par_iter()
        .enumerate()
        .map(|(k, (n, eps))| {
            let seed = opts.sampling.seed.wrapping_add(k as u64);
            let cover = cube_cover_count(&tower, *n, eps, CoverMode::Faithful, opts.sampling.samples, seed)?;
            let tight = cube_cover_count(&tower, *n, eps, CoverMode::Tight, 0, seed)?;
            let (_, formula_exponent) = published_exponent(*n, eps);
            Ok(FaithfulLine {
                n: *n,
                eps: eps.clone(),
                pad: cover.pad,
                base: cover.base,
                exponent: cover.exponent,
                formula_exponent,
                tight_exponent: tight.exponent,
                diameter_bound: cover.diameter_bound,
                certified: cover.certified,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;

    let faithful_slopes = slopes(&tower, &opts.faithful_eps, &opts.faithful_n, CoverMode::Faithful, opts.sampling)?;
    let audited_slopes = slopes(&tower, &opts.bracket_eps, &opts.bracket_n, CoverMode::Tight, opts.sampling)?;

    let family = full_window_grid_sample(&tower, opts.audit_n, &opts.audit_eps)?;
    let components = 2usize;
    let coord_of = |j: usize| -> (i64, usize) { (((j - 1) / components) as i64, (j - 1) % components) };
    let counterexample = match verify_separated(&family, &tower, opts.audit_n, &opts.audit_eps)? {
        Separation::Separated => None,
        Separation::Counterexample { i, j, distance } => Some((i, j, coord_of(j), distance)),
    };
    let mut failing_coords = Vec::new();
    let mut boundary_coords = Vec::new();
    for j in 1..family.len() {
        let d = bowen_distance(&tower, &family[0], &family[j], opts.audit_n)?;
        if d.hi < opts.audit_eps {
            failing_coords.push(coord_of(j));
        } else if d.hi == opts.audit_eps {
            boundary_coords.push(coord_of(j));
        }
    }
    let audit = Audit { n: opts.audit_n, eps: opts.audit_eps.clone(), failing_coords, boundary_coords, counterexample };
    Ok(Example51Report { faithful, faithful_slopes, audited_slopes, audit })
}

impl Example51Report {
    /// Plain-text report.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("[faithful-exponents]\n");
        for line in &self.faithful {
            out.push_str(&format!("n={},eps={},exponent={}\n", line.n, rational(&line.eps), line.exponent));
        }
        out.push_str("\n[faithful-detail]\n");
        out.push_str("n,eps,l,base,exponent,formula_exponent,matches_formula,tight_exponent,diameter_bound,diameter_bound_decimal,certified\n");
        for line in &self.faithful {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                line.n,
                rational(&line.eps),
                line.pad,
                line.base,
                line.exponent,
                line.formula_exponent,
                line.exponent == line.formula_exponent,
                line.tight_exponent,
                rational(&line.diameter_bound),
                decimal(&line.diameter_bound),
                line.certified
            ));
        }
        out.push_str("\n[separation-audit]\n");
        out.push_str(&format!("n={},eps={}\n", self.audit.n, rational(&self.audit.eps)));
        match &self.audit.counterexample {
            Some((i, j, (m, c), d)) => out.push_str(&format!(
                "counterexample,i={i},j={j},coord=({m},{c}),distance_lo={},distance_hi={}\n",
                rational(&d.lo),
                rational(&d.hi)
            )),
            None => out.push_str("separated\n"),
        }
        let list = |coords: &[(i64, usize)]| -> String {
            coords.iter().map(|(m, c)| format!("({m},{c})")).collect::<Vec<_>>().join(" ")
        };
        out.push_str(&format!("below_eps_coords={}\n", list(&self.audit.failing_coords)));
        out.push_str(&format!("at_eps_coords={}\n", list(&self.audit.boundary_coords)));

        let f = &self.faithful_slopes;
        let a = &self.audited_slopes;
        out.push_str("\n[slopes]\n");
        out.push_str(&format!("faithful_slope_hi={}\n", float(f.upper_fit.slope)));
        out.push_str(&format!("tight_slope_hi={}\n", float(a.upper_fit.slope)));
        if let Some(lower) = &a.lower_fit {
            out.push_str(&format!("packing_slope_lo={}\n", float(lower.slope)));
        }
        out.push_str(&format!("bracket_crossed={}\n", a.crossed));

        out.push_str("\n[discrepancy]\n");
        out.push_str(&format!("paper_value={}\n", CLAIMED_VALUE));
        out.push_str(&format!("faithful_reproduction={}\n", float(f.upper_fit.slope)));
        out.push_str(&format!(
            "audited_bracket=[{},{}]\n",
            float(a.slope_lo),
            float(a.slope_hi)
        ));
        let verdict = if self.audit.counterexample.is_some() { "refuted" } else { "not refuted" };
        out.push_str(&format!(
            "separated_family={verdict} at n={},eps={}\n",
            self.audit.n,
            rational(&self.audit.eps)
        ));
        out
    }
}

/// `1 + floor(12/eps)`.
pub fn published_base(eps: &Rational) -> BigUint {
    let twelve = Rational::from_integer(12.into());
    (floor_ratio(&(twelve / eps)) + 1u32).to_biguint().unwrap_or_default()
}

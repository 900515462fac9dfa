//! Asymptotic invariants from certified counts: weighted entropy,
//! `S^a(X, eps)` estimates, the weighted metric mean dimension bracket and
//! the power-rule probe.
//!
//! Limits are never claimed. Every report carries the per-`n` sequence,
//! the value at the largest `n`, and an intercept extrapolated in `1/n`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::counting::{
    cube_cover_count, cube_packing_grid, itinerary_count, symbolic_margin, CoverMode,
};
use crate::covers::inverse_n_intercept;
use crate::exact::{floor_log2, ln_biguint, LogCount, Rational};
use crate::tower::{Level, Tower, TowerKind};
use crate::{Error, Result};

/// `base^exponent`, kept factored so logarithms stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerCount {
    /// Base.
    pub base: BigUint,
    /// Exponent.
    pub exponent: u64,
}

impl PowerCount {
    /// `count^1`.
    pub fn plain(count: BigUint) -> Self {
        PowerCount { base: count, exponent: 1 }
    }

    /// The integer itself.
    pub fn value(&self) -> BigUint {
        Pow::pow(&self.base, self.exponent)
    }

    /// Natural logarithm.
    pub fn ln(&self) -> f64 {
        self.exponent as f64 * ln_biguint(&self.base)
    }

    /// `ln(49)`, `26*ln(49)` or `0`.
    pub fn render(&self) -> String {
        if self.exponent == 0 || self.base.is_one() {
            "0".into()
        } else if self.exponent == 1 {
            format!("ln({})", self.base)
        } else {
            format!("{}*ln({})", self.exponent, self.base)
        }
    }
}

/// Which construction a table cell comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CellMode {
    /// Faithful box cover (upper bound).
    Faithful,
    /// Tight box cover (upper bound).
    Tight,
    /// Certified packing grid (lower bound).
    Packing,
    /// Exact symbolic itinerary count.
    Itinerary,
}

impl CellMode {
    /// Lowercase name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            CellMode::Faithful => "faithful",
            CellMode::Tight => "tight",
            CellMode::Packing => "packing",
            CellMode::Itinerary => "itinerary",
        }
    }
}

/// One `(n, eps, construction)` entry of a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    /// Time.
    pub n: u64,
    /// Scale.
    pub eps: Rational,
    /// Construction.
    pub mode: CellMode,
    /// Certified lower bound on the count.
    pub lower: PowerCount,
    /// Certified upper bound, if the construction gives one.
    pub upper: Option<PowerCount>,
}

/// Identifies a cell before it is computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSpec {
    /// Time.
    pub n: u64,
    /// Position of the scale in the `eps` list.
    pub eps_index: usize,
    /// Scale.
    pub eps: Rational,
    /// Construction.
    pub mode: CellMode,
}

/// Sampled same-cell pairs per cover cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    /// Pairs per cell.
    pub samples: usize,
    /// Base seed; each cell derives its own from its coordinates.
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { samples: 1, seed: 0 }
    }
}

fn cell_seed(seed: u64, spec: &CellSpec) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (spec.n << 20)
        ^ ((spec.eps_index as u64) << 8)
        ^ spec.mode as u64
}

/// Computes one cell. Cells are independent and deterministic, so callers
/// may evaluate them in any order or in parallel.
pub fn compute_cell(tower: &Tower, spec: &CellSpec, sampling: Sampling) -> Result<Cell> {
    let (lower, upper) = match spec.mode {
        CellMode::Faithful | CellMode::Tight => {
            let mode = if spec.mode == CellMode::Faithful { CoverMode::Faithful } else { CoverMode::Tight };
            let cover = cube_cover_count(
                tower,
                spec.n,
                &spec.eps,
                mode,
                sampling.samples,
                cell_seed(sampling.seed, spec),
            )?;
            if !cover.certified {
                return Err(Error::CrossCheck(format!(
                    "cover cell diameter bound {} exceeds eps {}",
                    cover.diameter_bound, spec.eps
                )));
            }
            let upper = PowerCount { base: cover.base, exponent: cover.exponent };
            (PowerCount::plain(BigUint::one()), Some(upper))
        }
        CellMode::Packing => {
            let grid = cube_packing_grid(tower, spec.n, &spec.eps)?;
            let family = grid.family;
            let lower = PowerCount {
                base: BigUint::from(family.points_per_coord),
                exponent: family.coords.len() as u64,
            };
            (lower, None)
        }
        CellMode::Itinerary => {
            let margin = symbolic_margin(&spec.eps)?;
            let count = itinerary_count(tower, spec.n, margin)?;
            let exact = PowerCount::plain(count.lower);
            (exact.clone(), Some(exact))
        }
    };
    Ok(Cell { n: spec.n, eps: spec.eps.clone(), mode: spec.mode, lower, upper })
}

/// One row of an entropy report.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRow {
    /// Time.
    pub n: u64,
    /// Itinerary count `N^a(n)`.
    pub count: BigUint,
    /// `ln(N^a(n)) / n`, exact.
    pub value: LogCount,
    /// `|value(n) - value(previous n)|`; 0 on the first row.
    pub cauchy_gap: f64,
}

/// Weighted entropy estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    /// One row per `n`.
    pub rows: Vec<EntropyRow>,
    /// Value at the largest `n`.
    pub estimate: LogCount,
    /// `sum_i a_i ln|A_i|` when every level is a full shift.
    pub closed_form: Option<LogCount>,
}

impl EntropyReport {
    /// Whether every row equals the closed form exactly.
    pub fn matches_closed_form(&self) -> Option<bool> {
        self.closed_form.as_ref().map(|c| self.rows.iter().all(|r| r.value == *c))
    }
}

fn check_n_list(n_list: &[u64]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::OutOfRange("n list is empty".into()));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange("n list must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// `sum_i a_i ln|A_i|` as one exact `LogCount`, for towers of full shifts.
pub fn full_shift_closed_form(tower: &Tower) -> Option<LogCount> {
    let mut alphabets = Vec::new();
    for level in &tower.levels {
        match level {
            Level::Symbolic(s) if s.is_full() => alphabets.push(s.alphabet()),
            _ => return None,
        }
    }
    let weights = tower.weights.entries();
    let denom = weights.iter().fold(num_bigint::BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scale = denom.to_u64()?;
    let mut count = BigUint::one();
    for (w, &a) in weights.iter().zip(&alphabets) {
        let power = (w * Rational::from_integer(denom.clone())).to_integer().to_u64()?;
        count *= Pow::pow(&BigUint::from(a), power);
    }
    Some(LogCount::new(count, scale))
}

/// Per-`n` values `ln(N^a(n)) / n` of a symbolic tower (margin 0), with
/// Cauchy gaps and, for full-shift towers, the closed form.
pub fn entropy_estimate(tower: &Tower, n_list: &[u64]) -> Result<EntropyReport> {
    check_n_list(n_list)?;
    tower.base_symbolic()?;
    let mut rows: Vec<EntropyRow> = Vec::new();
    for &n in n_list {
        let count = itinerary_count(tower, n, 0)?.lower;
        let value = LogCount::new(count.clone(), n);
        let cauchy_gap = rows.last().map_or(0.0, |r| (value.value() - r.value.value()).abs());
        rows.push(EntropyRow { n, count, value, cauchy_gap });
    }
    let estimate = rows.last().map(|r| r.value.clone()).ok_or_else(|| Error::OutOfRange("n list is empty".into()))?;
    Ok(EntropyReport { rows, estimate, closed_form: full_shift_closed_form(tower) })
}

/// `S^a` estimate at one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SEstimate {
    /// Scale.
    pub eps: Rational,
    /// `(n, ln(best upper count) / n)`.
    pub upper_by_n: Vec<(u64, f64)>,
    /// `(n, ln(certified lower count) / n)`, when a lower construction exists.
    pub lower_by_n: Vec<(u64, f64)>,
    /// Upper value at the largest `n` (limsup proxy).
    pub upper_at_largest_n: f64,
    /// Intercept of `S_n ≈ a + b/n` fitted to the upper values.
    pub upper_extrapolated: f64,
    /// Same for the lower values (`None` without a lower construction).
    pub lower_extrapolated: Option<f64>,
}

fn cell_modes(kind: TowerKind, cover: CoverMode) -> Result<Vec<CellMode>> {
    match kind {
        TowerKind::Symbolic => Ok(Vec::from([CellMode::Itinerary])),
        TowerKind::Cube => Ok(match cover {
            CoverMode::Faithful => Vec::from([CellMode::Faithful, CellMode::Packing]),
            CoverMode::Tight => Vec::from([CellMode::Faithful, CellMode::Tight, CellMode::Packing]),
        }),
        TowerKind::Mixed => Err(Error::KindMismatch("mixed towers have no count constructions".into())),
    }
}

/// Cells needed by [`mmdim_estimate`], ordered by `(n, eps, mode)`.
pub fn mmdim_cells(tower: &Tower, eps_list: &[Rational], n_list: &[u64], cover: CoverMode) -> Result<Vec<CellSpec>> {
    let modes = cell_modes(tower.kind(), cover)?;
    let mut out = Vec::new();
    for &n in n_list {
        for (eps_index, eps) in eps_list.iter().enumerate() {
            for &mode in &modes {
                out.push(CellSpec { n, eps_index, eps: eps.clone(), mode });
            }
        }
    }
    Ok(out)
}

fn s_estimate_from_cells(eps: &Rational, cells: &[&Cell]) -> SEstimate {
    let mut ns: Vec<u64> = cells.iter().map(|c| c.n).collect();
    ns.dedup();
    let mut upper_by_n = Vec::new();
    let mut lower_by_n = Vec::new();
    for &n in &ns {
        let here: Vec<&&Cell> = cells.iter().filter(|c| c.n == n).collect();
        let upper = here
            .iter()
            .filter_map(|c| c.upper.as_ref().map(PowerCount::ln))
            .fold(f64::INFINITY, f64::min);
        let lower = here
            .iter()
            .filter(|c| matches!(c.mode, CellMode::Packing | CellMode::Itinerary))
            .map(|c| c.lower.ln())
            .fold(f64::NEG_INFINITY, f64::max);
        upper_by_n.push((n, upper / n as f64));
        if lower.is_finite() {
            lower_by_n.push((n, lower / n as f64));
        }
    }
    SEstimate {
        eps: eps.clone(),
        upper_at_largest_n: upper_by_n.last().map_or(0.0, |p| p.1),
        upper_extrapolated: inverse_n_intercept(&upper_by_n),
        lower_extrapolated: if lower_by_n.is_empty() { None } else { Some(inverse_n_intercept(&lower_by_n)) },
        upper_by_n,
        lower_by_n,
    }
}

/// `S^a(X, eps)` estimate: `(1/n) ln` of the best certified cover count
/// (faithful and tight for cube towers, the exact itinerary count with
/// margin for symbolic ones).
pub fn s_epsilon_estimate(
    tower: &Tower,
    eps: &Rational,
    n_list: &[u64],
    cover: CoverMode,
    sampling: Sampling,
) -> Result<SEstimate> {
    check_n_list(n_list)?;
    let eps_list = [eps.clone()];
    let cells = mmdim_cells(tower, &eps_list, n_list, cover)?
        .iter()
        .map(|spec| compute_cell(tower, spec, sampling))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Cell> = cells.iter().collect();
    Ok(s_estimate_from_cells(eps, &refs))
}

/// Least-squares line fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Regression {
    /// Slope.
    pub slope: f64,
    /// Intercept.
    pub intercept: f64,
    /// Residuals in input order.
    pub residuals: Vec<f64>,
}

/// Fits `y ≈ intercept + slope * x`.
pub fn least_squares(points: &[(f64, f64)]) -> Result<Regression> {
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return Err(Error::Degenerate("regression needs two distinct abscissae".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = points.iter().map(|p| p.1 - intercept - slope * p.0).collect();
    Ok(Regression { slope, intercept, residuals })
}

/// Slope bracket for the weighted metric mean dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MmdimReport {
    /// All cells, ordered by `(n, eps, mode)`.
    pub cells: Vec<Cell>,
    /// One estimate per scale, in input order.
    pub estimates: Vec<SEstimate>,
    /// Regression of extrapolated upper estimates against `|ln eps|`.
    pub upper_fit: Regression,
    /// Regression of extrapolated lower estimates, if any.
    pub lower_fit: Option<Regression>,
    /// Lower end of the bracket.
    pub slope_lo: f64,
    /// Upper end of the bracket.
    pub slope_hi: f64,
    /// The packing slope came out above the cover slope; the bracket is
    /// then their hull.
    pub crossed: bool,
    /// For symbolic towers: the bracket is `[0, 0]` because the entropy is
    /// finite; the fits are kept as diagnostics.
    pub finite_entropy_shortcut: bool,
}

fn check_eps_list(eps_list: &[Rational]) -> Result<()> {
    if eps_list.len() < 4 {
        return Err(Error::OutOfRange("eps list needs at least 4 scales".into()));
    }
    for eps in eps_list {
        let denom = eps.denom();
        let dyadic = (denom & &(denom - num_bigint::BigInt::one())).is_zero();
        if !eps.is_positive() || !dyadic {
            return Err(Error::OutOfRange(format!("eps {eps} is not a positive dyadic rational")));
        }
    }
    if eps_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::OutOfRange("eps list must be strictly decreasing".into()));
    }
    Ok(())
}

/// Builds the report from computed cells (see [`mmdim_cells`]).
pub fn assemble_mmdim(tower: &Tower, eps_list: &[Rational], mut cells: Vec<Cell>) -> Result<MmdimReport> {
    cells.sort_by(|a, b| (a.n, core::cmp::Reverse(&a.eps), a.mode).cmp(&(b.n, core::cmp::Reverse(&b.eps), b.mode)));
    let estimates: Vec<SEstimate> = eps_list
        .iter()
        .map(|eps| {
            let here: Vec<&Cell> = cells.iter().filter(|c| c.eps == *eps).collect();
            s_estimate_from_cells(eps, &here)
        })
        .collect();
    let abscissa = |eps: &Rational| -> f64 {
        // |ln eps| for dyadic eps is exact up to the last bit.
        let k = -floor_log2(eps);
        let rest = eps * crate::exact::dyadic(k);
        k as f64 * core::f64::consts::LN_2 - libm::log(crate::exact::ratio_to_f64(&rest))
    };
    let upper_fit = least_squares(
        &estimates.iter().map(|e| (abscissa(&e.eps), e.upper_extrapolated)).collect::<Vec<_>>(),
    )?;
    let lower_points: Vec<(f64, f64)> = estimates
        .iter()
        .filter_map(|e| e.lower_extrapolated.map(|v| (abscissa(&e.eps), v)))
        .collect();
    let lower_fit = if lower_points.len() == estimates.len() { Some(least_squares(&lower_points)?) } else { None };

    if tower.kind() == TowerKind::Symbolic {
        return Ok(MmdimReport {
            cells,
            estimates,
            upper_fit,
            lower_fit,
            slope_lo: 0.0,
            slope_hi: 0.0,
            crossed: false,
            finite_entropy_shortcut: true,
        });
    }
    let hi = upper_fit.slope;
    let lo = lower_fit.as_ref().map_or(0.0, |f| f.slope);
    Ok(MmdimReport {
        cells,
        estimates,
        slope_lo: lo.min(hi),
        slope_hi: hi.max(lo),
        crossed: lo > hi,
        upper_fit,
        lower_fit,
        finite_entropy_shortcut: false,
    })
}

/// Validates the scale and time lists shared by every mmdim computation.
pub fn check_mmdim_inputs(eps_list: &[Rational], n_list: &[u64]) -> Result<()> {
    check_eps_list(eps_list)?;
    check_n_list(n_list)
}

/// Slope bracket `[slope_lo, slope_hi]` for `mdim_M^a`: least-squares
/// slopes of the upper (cover) and lower (packing) `S`-estimates against
/// `|ln eps|`. Each `S`-estimate is the `1/n` intercept, which removes the
/// `O(l)/n` padding terms of the constructions.
pub fn mmdim_estimate(
    tower: &Tower,
    eps_list: &[Rational],
    n_list: &[u64],
    cover: CoverMode,
    sampling: Sampling,
) -> Result<MmdimReport> {
    check_mmdim_inputs(eps_list, n_list)?;
    let cells = mmdim_cells(tower, eps_list, n_list, cover)?
        .iter()
        .map(|spec| compute_cell(tower, spec, sampling))
        .collect::<Result<Vec<_>>>()?;
    assemble_mmdim(tower, eps_list, cells)
}

/// One row of a power-rule probe.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    /// Time.
    pub n: u64,
    /// Entropy value of the `T^m` tower at `n`.
    pub power_value: LogCount,
    /// `m` times the original value at `n`.
    pub scaled_value: LogCount,
    /// `|power_value - scaled_value|`.
    pub deviation: f64,
    /// `m |e(mn) - e(n)|` from the original tower alone.
    pub gap: f64,
    /// `power_value == m * e(mn)` exactly.
    pub block_identity: bool,
}

/// Compares the `T^m` tower's entropy values against `m` times the
/// original ones.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    /// Power.
    pub m: u64,
    /// One row per `n`.
    pub rows: Vec<PowerRow>,
    /// Largest deviation.
    pub max_deviation: f64,
}

/// Power-rule probe for symbolic towers.
pub fn power_rule_probe(tower: &Tower, m: u64, n_list: &[u64]) -> Result<PowerReport> {
    if m == 0 {
        return Err(Error::OutOfRange("power m must be >= 1".into()));
    }
    check_n_list(n_list)?;
    let powered = tower.power(m as usize)?;
    let mut rows = Vec::new();
    for &n in n_list {
        let e = |t: &Tower, k: u64| -> Result<LogCount> {
            Ok(LogCount::new(itinerary_count(t, k, 0)?.lower, k))
        };
        let base_n = e(tower, n)?;
        let base_mn = e(tower, m * n)?;
        let power_value = e(&powered, n)?;
        let scaled_value = base_n.times(m);
        // Exactly equal values get an exact 0, not a rounding residue.
        let deviation =
            if power_value == scaled_value { 0.0 } else { (power_value.value() - scaled_value.value()).abs() };
        let gap = if base_mn == base_n { 0.0 } else { m as f64 * (base_mn.value() - base_n.value()).abs() };
        let block_identity = power_value == base_mn.times(m);
        rows.push(PowerRow { n, power_value, scaled_value, deviation, gap, block_identity });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(PowerReport { m, rows, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{dyadic, parse_ratio};
    use crate::tower::{CubeSystem, ForgetfulFactor, SymbolicSystem, WeightVector};

    fn q(s: &str) -> Rational {
        parse_ratio(s).unwrap()
    }

    fn four_two(weights: &[&str]) -> Tower {
        Tower::new(
            Vec::from([Level::Symbolic(SymbolicSystem::full(4)), Level::Symbolic(SymbolicSystem::full(2))]),
            Vec::from([ForgetfulFactor::Merge { map: Vec::from([0, 0, 1, 1]) }]),
            WeightVector::new(weights.iter().map(|w| q(w)).collect()).unwrap(),
        )
    }

    fn golden_trivial() -> Tower {
        Tower::new(
            Vec::from([Level::Symbolic(SymbolicSystem::golden_mean()), Level::Symbolic(SymbolicSystem::full(1))]),
            Vec::from([ForgetfulFactor::Merge { map: Vec::from([0, 0]) }]),
            WeightVector::from_ints(&[1, 1]).unwrap(),
        )
    }

    fn example_tower() -> Tower {
        Tower::new(
            Vec::from([Level::Cube(CubeSystem::shift(2)), Level::Cube(CubeSystem::shift(1))]),
            Vec::from([ForgetfulFactor::Project { keep: 1 }]),
            WeightVector::from_ints(&[1, 1]).unwrap(),
        )
    }

    #[test]
    fn full_shift_entropy_is_ln_eight() {
        let report = entropy_estimate(&four_two(&["1", "1"]), &[1, 2, 4, 8]).unwrap();
        let ln8 = LogCount::of(BigUint::from(8u32));
        assert!(report.rows.iter().all(|r| r.value == ln8));
        assert_eq!(report.closed_form, Some(ln8));
        assert_eq!(report.matches_closed_form(), Some(true));
    }

    #[test]
    fn fractional_weight_entropy() {
        let report = entropy_estimate(&four_two(&["1", "1/2"]), &[4]).unwrap();
        let expected = LogCount::new(BigUint::from(32u32), 2);
        assert_eq!(report.rows[0].value, expected);
        assert_eq!(report.closed_form, Some(expected));
    }

    #[test]
    fn golden_mean_counts() {
        let report = entropy_estimate(&golden_trivial(), &[3]).unwrap();
        assert_eq!(report.rows[0].count, BigUint::from(5u32));
        assert_eq!(report.rows[0].value.render(), "ln(5)/3");
        assert!(report.closed_form.is_none());
    }

    #[test]
    fn s_estimates_follow_exponents() {
        let t = example_tower();
        let eps = q("1/4");
        let faithful = s_epsilon_estimate(&t, &eps, &[4, 8, 16], CoverMode::Faithful, Sampling::default()).unwrap();
        let ln49 = libm::log(49.0);
        for &(n, s) in &faithful.upper_by_n {
            let expected = (4 * n + 4 * 4 + 2) as f64 * ln49 / n as f64;
            assert!((s - expected).abs() < 1e-9);
        }
        assert!((faithful.upper_extrapolated - 4.0 * ln49).abs() < 1e-9);
        let tight = s_epsilon_estimate(&t, &eps, &[4, 8, 16], CoverMode::Tight, Sampling::default()).unwrap();
        assert!((tight.upper_extrapolated - 3.0 * ln49).abs() < 1e-9);
        let symbolic = s_epsilon_estimate(&four_two(&["1", "1"]), &q("3/4"), &[1, 2], CoverMode::Tight, Sampling::default()).unwrap();
        assert!((symbolic.upper_by_n[1].1 - libm::log(8.0)).abs() < 1e-12);
        assert!(s_epsilon_estimate(&t, &eps, &[], CoverMode::Tight, Sampling::default()).is_err());
    }

    #[test]
    fn slope_brackets() {
        let t = example_tower();
        let eps: Vec<Rational> = (2..=6).map(|k| dyadic(-k)).collect();
        let faithful = mmdim_estimate(&t, &eps, &[2, 4, 8, 16], CoverMode::Faithful, Sampling { samples: 0, seed: 1 }).unwrap();
        assert!((faithful.upper_fit.slope - 4.0).abs() < 0.15, "{}", faithful.upper_fit.slope);
        let eps: Vec<Rational> = (4..=9).map(|k| dyadic(-k)).collect();
        let tight = mmdim_estimate(&t, &eps, &[4, 8, 16], CoverMode::Tight, Sampling { samples: 0, seed: 1 }).unwrap();
        assert!(tight.slope_lo >= 2.85 && tight.slope_hi <= 3.15, "{} {}", tight.slope_lo, tight.slope_hi);
        let symbolic = mmdim_estimate(&four_two(&["1", "1"]), &eps, &[4, 8], CoverMode::Tight, Sampling::default()).unwrap();
        assert_eq!((symbolic.slope_lo, symbolic.slope_hi), (0.0, 0.0));
        assert!(symbolic.upper_fit.slope.abs() < 0.05);
        assert!(mmdim_estimate(&t, &eps[..3], &[4], CoverMode::Tight, Sampling::default()).is_err());
        let unsorted: Vec<Rational> = eps.iter().rev().cloned().collect();
        assert!(mmdim_estimate(&t, &unsorted, &[4], CoverMode::Tight, Sampling::default()).is_err());
        let odd = Vec::from([q("1/3"), q("1/4"), q("1/8"), q("1/16")]);
        assert!(mmdim_estimate(&t, &odd, &[4], CoverMode::Tight, Sampling::default()).is_err());
    }

    #[test]
    fn power_rule() {
        let full = power_rule_probe(&four_two(&["1", "1"]), 2, &[1, 2, 3]).unwrap();
        assert_eq!(full.max_deviation, 0.0);
        assert!(full.rows.iter().all(|r| r.power_value == LogCount::of(BigUint::from(64u32))));
        let same = power_rule_probe(&golden_trivial(), 1, &[1, 2, 3]).unwrap();
        assert_eq!(same.max_deviation, 0.0);
        let golden = power_rule_probe(&golden_trivial(), 2, &[1, 2, 4, 8]).unwrap();
        assert!(golden.rows.iter().all(|r| r.block_identity && r.deviation <= r.gap + 1e-12));
        assert!(golden.rows.windows(2).all(|w| w[1].gap < w[0].gap));
        assert!(power_rule_probe(&golden_trivial(), 0, &[1]).is_err());
    }

    #[test]
    fn power_counts_render() {
        let p = PowerCount { base: BigUint::from(49u32), exponent: 26 };
        assert_eq!(p.render(), "26*ln(49)");
        assert_eq!(PowerCount::plain(BigUint::one()).render(), "0");
        assert_eq!(PowerCount::plain(BigUint::from(8u32)).render(), "ln(8)");
    }
}

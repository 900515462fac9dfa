//! Spanning, separated and covering numbers for the weighted Bowen metric.
//!
//! Finite instances get exact answers by branch and bound (up to
//! [`EXACT_CUTOFF`] points) or greedy bounds. Symbolic towers get exact
//! itinerary counts from a subset-construction dynamic program. Cube towers
//! get the explicit box covers and dyadic packing grids that bracket
//! `#(X, d_n^a, eps)` from both sides.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{dyadic, floor_log2, floor_ratio, ln_biguint, Rational};
use crate::tower::Tower;
use crate::wmetric::{bowen_distance, precision_profile, DistanceInterval, PointWindow};
use crate::{Error, Result};

/// Largest instance solved exactly; above it only bounds are reported.
pub const EXACT_CUTOFF: usize = 20;

/// Bounds on a count, kept as exact integers.
///
/// `upper == None` means no finite upper bound is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountBounds {
    /// Certified lower bound.
    pub lower: BigUint,
    /// Certified upper bound, if any.
    pub upper: Option<BigUint>,
    /// Whether `lower == upper` is the true value.
    pub exact: bool,
}

impl CountBounds {
    /// Exactly `value`.
    pub fn exact(value: BigUint) -> Self {
        CountBounds { lower: value.clone(), upper: Some(value), exact: true }
    }

    /// `lower <= count <= upper`.
    pub fn between(lower: BigUint, upper: BigUint) -> Self {
        let exact = lower == upper;
        CountBounds { lower, upper: Some(upper), exact }
    }

    /// Only a lower bound.
    pub fn at_least(lower: BigUint) -> Self {
        CountBounds { lower, upper: None, exact: false }
    }

    /// The value when exact.
    pub fn value(&self) -> Option<&BigUint> {
        if self.exact {
            self.upper.as_ref()
        } else {
            None
        }
    }

    /// `ln(lower)`.
    pub fn log_lower(&self) -> f64 {
        ln_biguint(&self.lower)
    }

    /// `ln(upper)`, `+inf` when unbounded.
    pub fn log_upper(&self) -> f64 {
        self.upper.as_ref().map_or(f64::INFINITY, ln_biguint)
    }
}

/// Finite set of points with their pairwise distance enclosures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricInstance {
    distances: Vec<Vec<DistanceInterval>>,
}

impl FiniteMetricInstance {
    /// Evaluates `d_n^a` on every pair.
    pub fn from_points(tower: &Tower, points: &[PointWindow], n: u64) -> Result<Self> {
        let len = points.len();
        let mut distances = vec![vec![DistanceInterval::exact(Rational::zero()); len]; len];
        for i in 0..len {
            for j in i + 1..len {
                let d = bowen_distance(tower, &points[i], &points[j], n)?;
                distances[j][i] = d.clone();
                distances[i][j] = d;
            }
        }
        Ok(FiniteMetricInstance { distances })
    }

    /// Uses a precomputed matrix; checks squareness, symmetry and the zero
    /// diagonal.
    pub fn from_distances(distances: Vec<Vec<DistanceInterval>>) -> Result<Self> {
        let len = distances.len();
        for (i, row) in distances.iter().enumerate() {
            if row.len() != len {
                return Err(Error::OutOfRange("distance matrix is not square".into()));
            }
            if !row[i].hi.is_zero() {
                return Err(Error::OutOfRange(format!("nonzero diagonal at {i}")));
            }
            for (j, d) in row.iter().enumerate() {
                if *d != distances[j][i] || d.lo.is_negative() || d.lo > d.hi {
                    return Err(Error::OutOfRange(format!("bad entry at ({i}, {j})")));
                }
            }
        }
        Ok(FiniteMetricInstance { distances })
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    /// Whether there are no points.
    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Enclosure of the distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> &DistanceInterval {
        &self.distances[i][j]
    }

    /// Decides `d(i, j) <= eps`.
    fn within(&self, i: usize, j: usize, eps: &Rational) -> Result<bool> {
        let d = &self.distances[i][j];
        if d.hi <= *eps {
            Ok(true)
        } else if d.lo > *eps {
            Ok(false)
        } else {
            Err(Error::Unresolved { i, j, threshold: eps.to_string() })
        }
    }

    /// `close[i]` = points within closed distance `eps` of `i` (including `i`).
    fn closeness(&self, eps: &Rational) -> Result<Vec<Vec<bool>>> {
        let len = self.len();
        let mut close = vec![vec![false; len]; len];
        for i in 0..len {
            close[i][i] = true;
            for j in i + 1..len {
                let c = self.within(i, j, eps)?;
                close[i][j] = c;
                close[j][i] = c;
            }
        }
        Ok(close)
    }
}

/// Exact search or greedy bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Branch and bound up to [`EXACT_CUTOFF`] points, greedy above.
    Exact,
    /// Greedy bounds only.
    Greedy,
}

fn to_masks(close: &[Vec<bool>]) -> Vec<u32> {
    close
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &c)| c).fold(0u32, |m, (j, _)| m | (1 << j)))
        .collect()
}

fn min_dominating_set(cover: &[u32]) -> usize {
    fn search(cover: &[u32], uncovered: u32, chosen: usize, best: &mut usize, widest: u32) {
        if uncovered == 0 {
            *best = (*best).min(chosen);
            return;
        }
        let needed = uncovered.count_ones().div_ceil(widest) as usize;
        if chosen + needed >= *best {
            return;
        }
        let v = uncovered.trailing_zeros();
        let mut candidates: Vec<usize> =
            (0..cover.len()).filter(|&c| cover[c] & (1 << v) != 0).collect();
        candidates.sort_by_key(|&c| (core::cmp::Reverse((cover[c] & uncovered).count_ones()), c));
        for c in candidates {
            search(cover, uncovered & !cover[c], chosen + 1, best, widest);
        }
    }
    let len = cover.len();
    if len == 0 {
        return 0;
    }
    let all = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
    let widest = cover.iter().map(|m| m.count_ones()).max().unwrap_or(1).max(1);
    let mut best = len;
    search(cover, all, 0, &mut best, widest);
    best
}

fn max_independent_set(conflict: &[u32]) -> usize {
    fn search(conflict: &[u32], candidates: u32, size: usize, best: &mut usize) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + candidates.count_ones() as usize <= *best {
            return;
        }
        let v = candidates.trailing_zeros();
        let bit = 1u32 << v;
        search(conflict, candidates & !conflict[v as usize] & !bit, size + 1, best);
        search(conflict, candidates & !bit, size, best);
    }
    let len = conflict.len();
    if len == 0 {
        return 0;
    }
    let all = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
    let mut best = 0;
    search(conflict, all, 0, &mut best);
    best
}

fn greedy_cover(close: &[Vec<bool>]) -> usize {
    let len = close.len();
    let mut covered = vec![false; len];
    let mut remaining = len;
    let mut centres = 0;
    while remaining > 0 {
        let (best, _) = (0..len)
            .map(|c| (c, (0..len).filter(|&j| close[c][j] && !covered[j]).count()))
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        for j in 0..len {
            if close[best][j] && !covered[j] {
                covered[j] = true;
                remaining -= 1;
            }
        }
        centres += 1;
    }
    centres
}

fn greedy_packing(close: &[Vec<bool>]) -> usize {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..close.len() {
        if chosen.iter().all(|&c| !close[c][i]) {
            chosen.push(i);
        }
    }
    chosen.len()
}

/// Spanning number: fewest instance points whose closed `eps`-balls cover
/// the instance.
pub fn spanning_number(
    instance: &FiniteMetricInstance,
    eps: &Rational,
    mode: SearchMode,
) -> Result<CountBounds> {
    if instance.is_empty() {
        return Ok(CountBounds::exact(BigUint::zero()));
    }
    let close = instance.closeness(eps)?;
    if mode == SearchMode::Exact && instance.len() <= EXACT_CUTOFF {
        let value = min_dominating_set(&to_masks(&close));
        return Ok(CountBounds::exact(BigUint::from(value)));
    }
    let upper = greedy_cover(&close);
    // Two points more than 2 eps apart cannot share a centre.
    let double = eps * Rational::from_integer(2.into());
    let lower = instance.closeness(&double).map(|c| greedy_packing(&c)).unwrap_or(1);
    Ok(CountBounds::between(BigUint::from(lower), BigUint::from(upper)))
}

/// Packing number: most instance points with pairwise `d > eps`.
pub fn packing_number(
    instance: &FiniteMetricInstance,
    eps: &Rational,
    mode: SearchMode,
) -> Result<CountBounds> {
    if instance.is_empty() {
        return Ok(CountBounds::exact(BigUint::zero()));
    }
    let close = instance.closeness(eps)?;
    if mode == SearchMode::Exact && instance.len() <= EXACT_CUTOFF {
        let conflict: Vec<u32> = to_masks(&close)
            .into_iter()
            .enumerate()
            .map(|(i, m)| m & !(1 << i))
            .collect();
        return Ok(CountBounds::exact(BigUint::from(max_independent_set(&conflict))));
    }
    let lower = greedy_packing(&close);
    // Two eps-separated points cannot share a centre of radius eps/2.
    let half = eps / Rational::from_integer(2.into());
    let upper = instance
        .closeness(&half)
        .map(|c| greedy_cover(&c))
        .unwrap_or(instance.len())
        .min(instance.len());
    Ok(CountBounds::between(BigUint::from(lower), BigUint::from(upper)))
}

/// Outcome of [`verify_separated`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Separation {
    /// Every pair has `d_n^a > eps`.
    Separated,
    /// A pair with `d_n^a <= eps`.
    Counterexample {
        /// First index.
        i: usize,
        /// Second index.
        j: usize,
        /// Enclosure of their distance.
        distance: DistanceInterval,
    },
}

/// Checks that a family is `(a, n, eps)`-separated (strictly `d > eps`).
///
/// When it is not, the witness is the failing pair with the smallest
/// distance upper bound (first in index order among ties), so a pair far
/// below `eps` is preferred over one sitting exactly on it. A pair whose
/// enclosure straddles `eps` is an error only if no pair fails outright.
pub fn verify_separated(
    points: &[PointWindow],
    tower: &Tower,
    n: u64,
    eps: &Rational,
) -> Result<Separation> {
    let mut worst: Option<(usize, usize, DistanceInterval)> = None;
    let mut straddling: Option<(usize, usize)> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = bowen_distance(tower, &points[i], &points[j], n)?;
            if d.lo > *eps {
                continue;
            }
            if d.hi > *eps {
                straddling.get_or_insert((i, j));
                continue;
            }
            if worst.as_ref().is_none_or(|w| d.hi < w.2.hi) {
                worst = Some((i, j, d));
            }
        }
    }
    match (worst, straddling) {
        (Some((i, j, distance)), _) => Ok(Separation::Counterexample { i, j, distance }),
        (None, Some((i, j))) => Err(Error::Unresolved { i, j, threshold: eps.to_string() }),
        (None, None) => Ok(Separation::Separated),
    }
}

/// Margin `l` for a symbolic threshold: `eps` in `(2^-(l+1), 2^-l]`.
///
/// Two points are within `d < eps` at a single time exactly when they agree
/// on `[-l, l]`.
pub fn symbolic_margin(eps: &Rational) -> Result<u64> {
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(Error::OutOfRange(format!("symbolic eps {eps} must lie in (0, 1]")));
    }
    let mut l = 0u64;
    while dyadic(-(l as i64 + 1)) >= *eps {
        l += 1;
    }
    Ok(l)
}

/// Observation layout of an itinerary: for each position, which composite
/// map reads the level-1 symbol there.
fn itinerary_layout(tower: &Tower, n: u64, margin: u64) -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
    let maps = tower.symbol_maps()?;
    let windows = tower.windows(n);
    let mut layout = Vec::new();
    let mut previous = 0u64;
    for (level, &len) in windows.iter().enumerate() {
        let extra = if level == 0 { 2 * margin } else { 0 };
        let count = len - previous + extra;
        layout.extend(core::iter::repeat_n(level, count as usize));
        previous = len;
    }
    Ok((maps, layout))
}

/// Candidate words above which the brute-force cross-check is skipped.
const BRUTE_FORCE_LIMIT: f64 = 262_144.0;

/// Number of distinct weighted itineraries of a symbolic tower at time `n`
/// with margin `l` (see [`symbolic_margin`]).
///
/// Position `p` of the level-1 word is read through `tau_{i-1}` where `i`
/// is the coarsest level still observing `p`. Distinct observation words
/// are counted by determinising over the set of possible level-1 symbols.
/// Small cases are cross-checked against [`itinerary_count_bruteforce`].
pub fn itinerary_count(tower: &Tower, n: u64, margin: u64) -> Result<CountBounds> {
    let base = tower.base_symbolic()?;
    let (maps, layout) = itinerary_layout(tower, n, margin)?;
    let alphabet = base.alphabet();
    let words = alphabet.div_ceil(64);
    let successors: Vec<Vec<u64>> = (0..alphabet)
        .map(|a| {
            let mut set = vec![0u64; words];
            for b in (0..alphabet).filter(|&b| base.allowed(a, b)) {
                set[b / 64] |= 1 << (b % 64);
            }
            set
        })
        .collect();

    // `None` is the start state: nothing read yet.
    let mut states: BTreeMap<Option<Vec<u64>>, BigUint> = BTreeMap::new();
    states.insert(None, BigUint::one());
    for &level in &layout {
        let map = &maps[level];
        let mut next: BTreeMap<Option<Vec<u64>>, BigUint> = BTreeMap::new();
        for (state, count) in states {
            let reachable: Vec<u64> = match &state {
                None => {
                    let mut all = vec![0u64; words];
                    for b in 0..alphabet {
                        all[b / 64] |= 1 << (b % 64);
                    }
                    all
                }
                Some(set) => {
                    let mut acc = vec![0u64; words];
                    for a in (0..alphabet).filter(|&a| set[a / 64] >> (a % 64) & 1 == 1) {
                        for (w, s) in acc.iter_mut().zip(&successors[a]) {
                            *w |= s;
                        }
                    }
                    acc
                }
            };
            let mut by_symbol: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
            for b in (0..alphabet).filter(|&b| reachable[b / 64] >> (b % 64) & 1 == 1) {
                let entry = by_symbol.entry(map[b]).or_insert_with(|| vec![0u64; words]);
                entry[b / 64] |= 1 << (b % 64);
            }
            for (_, set) in by_symbol {
                *next.entry(Some(set)).or_insert_with(BigUint::zero) += &count;
            }
        }
        states = next;
    }
    let total: BigUint = states.values().sum();

    let candidates = libm::pow(alphabet as f64, layout.len() as f64);
    if candidates <= BRUTE_FORCE_LIMIT {
        let brute = itinerary_count_bruteforce(tower, n, margin)?;
        if brute != total {
            return Err(Error::CrossCheck(format!(
                "itinerary DP gave {total}, enumeration gave {brute} (n = {n}, margin = {margin})"
            )));
        }
    }
    Ok(CountBounds::exact(total))
}

/// Same count by enumerating admissible level-1 words and collecting their
/// distinct observation words.
pub fn itinerary_count_bruteforce(tower: &Tower, n: u64, margin: u64) -> Result<BigUint> {
    let base = tower.base_symbolic()?;
    let (maps, layout) = itinerary_layout(tower, n, margin)?;
    let seen: BTreeSet<Vec<usize>> = base
        .words(layout.len())
        .into_iter()
        .map(|w| w.iter().zip(&layout).map(|(&s, &level)| maps[level][s]).collect())
        .collect();
    Ok(BigUint::from(seen.len()))
}

/// Which coordinates a cube cover constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverMode {
    /// Every component on `[-l, L_k + l]`, reproducing the published count.
    Faithful,
    /// Component `c` only on `[-l, L(c) + l]`, where `L(c)` is the window of
    /// the coarsest level that still sees it.
    Tight,
}

/// An explicit cover of a cube tower by products of `eps/6`-wide boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeCover {
    /// Mode the cover was built in.
    pub mode: CoverMode,
    /// Padding `l = floor(log2(4/eps))`, clamped at 0.
    pub pad: u64,
    /// Intervals per constrained coordinate: `1 + floor(12/eps)`.
    pub base: BigUint,
    /// Number of constrained coordinates.
    pub exponent: u64,
    /// Constrained range `[start, end]` per component.
    pub ranges: Vec<(i64, i64)>,
    /// `base^exponent` as an upper bound on `#(X, d_n^a, eps)`.
    pub count: CountBounds,
    /// Supremum of `d_n^a` over pairs in one cell.
    pub diameter_bound: Rational,
    /// Whether `diameter_bound <= eps`, so every cell has diameter `< eps`.
    pub certified: bool,
    /// Same-cell pairs that were sampled and checked with [`bowen_distance`].
    pub sampled_pairs: usize,
}

/// `sum_{p > radius} 2^-|p - centre|`.
fn right_tail(radius: i64, centre: i64) -> Rational {
    if centre <= radius {
        dyadic(-(radius - centre))
    } else {
        Rational::from_integer(3.into()) - dyadic(-(centre - radius - 1))
    }
}

/// `sum_{p = start}^{end} 2^-|p - centre|`.
fn window_mass(start: i64, end: i64, centre: i64) -> Rational {
    if end < start {
        return Rational::zero();
    }
    Rational::from_integer(3.into()) - right_tail(end, centre) - right_tail(-start, -centre)
}

/// Padding `l = floor(log2(4/eps))`, clamped at 0.
pub fn cover_padding(eps: &Rational) -> u64 {
    let four = Rational::from_integer(4.into());
    floor_log2(&(four / eps)).max(0) as u64
}

/// Builds the grid cover of a cube tower at `(n, eps)`.
///
/// Each constrained coordinate is covered by `1 + floor(12/eps)` open
/// intervals `((k-1) eps/12, (k+1) eps/12)`, `k = 0..=floor(12/eps)`. The
/// cell diameter is bounded exactly; `samples` random same-cell pairs drawn
/// from `seed` are also checked directly.
pub fn cube_cover_count(
    tower: &Tower,
    n: u64,
    eps: &Rational,
    mode: CoverMode,
    samples: usize,
    seed: u64,
) -> Result<CubeCover> {
    let twelve = Rational::from_integer(12.into());
    if !eps.is_positive() || *eps > twelve {
        return Err(Error::OutOfRange(format!("eps {eps} must lie in (0, 12]")));
    }
    let visible = tower.visible_components()?;
    let profile = precision_profile(tower, n, &Rational::one())?;
    let pad = cover_padding(eps);
    let intervals = floor_ratio(&(&twelve / eps)).to_biguint().unwrap_or_default();
    let base = intervals + BigUint::one();

    let components = profile.components();
    let widest = (0..components).map(|c| profile.window_len(c)).max().unwrap_or(1);
    let ranges: Vec<(i64, i64)> = (0..components)
        .map(|c| {
            let len = match mode {
                CoverMode::Faithful => widest,
                CoverMode::Tight => profile.window_len(c),
            };
            (-(pad as i64), len as i64 + pad as i64)
        })
        .collect();
    let exponent: u64 = ranges.iter().map(|(s, e)| (e - s + 1) as u64).sum();
    let count = Pow::pow(&base, exponent);

    // Exact cell-diameter bound: covered coordinates move by < eps/6,
    // uncovered ones by at most 1.
    let sixth = eps / Rational::from_integer(6.into());
    let windows = tower.windows(n);
    let steps = tower.cube_steps()?;
    let mut diameter_bound = Rational::zero();
    for ((&comps, &len), &step) in visible.iter().zip(&windows).zip(&steps) {
        let start = ranges[..comps].iter().map(|r| r.0).max().unwrap_or(0);
        let end = ranges[..comps].iter().map(|r| r.1).min().unwrap_or(-1);
        let last = if step == 0 { 0 } else { len as i64 - 1 };
        for j in 0..=last {
            let centre = j * step;
            let inside = window_mass(start, end, centre);
            let outside = Rational::from_integer(3.into()) - &inside;
            let bound = &sixth * inside + outside;
            if bound > diameter_bound {
                diameter_bound = bound;
            }
        }
    }
    let certified = diameter_bound <= *eps;

    let sampled_pairs = sample_same_cell_pairs(tower, n, eps, &ranges, samples, seed)?;

    Ok(CubeCover {
        mode,
        pad,
        base,
        exponent,
        ranges,
        count: CountBounds::between(BigUint::one(), count),
        diameter_bound,
        certified,
        sampled_pairs,
    })
}

/// Draws random cells and random pairs inside each; every pair must be
/// within `d_n^a < eps`.
fn sample_same_cell_pairs(
    tower: &Tower,
    n: u64,
    eps: &Rational,
    ranges: &[(i64, i64)],
    samples: usize,
    seed: u64,
) -> Result<usize> {
    if samples == 0 {
        return Ok(0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = ranges.iter().map(|(s, e)| s.abs().max(e.abs())).max().unwrap_or(0) + 2;
    let components = ranges.len();
    let step = eps / Rational::from_integer(12.into());
    let cells = floor_ratio(&(Rational::one() / &step)).to_u64().unwrap_or(u64::MAX);
    let grain = 1024i64;
    for _ in 0..samples {
        let mut x = PointWindow::zero_cube(radius as u32, components);
        let mut y = x.clone();
        for m in -radius..=radius {
            for (c, &(start, end)) in ranges.iter().enumerate() {
                let (a, b) = if (start..=end).contains(&m) {
                    let k = rng.gen_range(0..=cells) as i64;
                    let lo = (Rational::from_integer((k - 1).into()) * &step).max(Rational::zero());
                    let hi = (Rational::from_integer((k + 1).into()) * &step).min(Rational::one());
                    let pick = |t: i64| &lo + (&hi - &lo) * Rational::new(t.into(), grain.into());
                    (pick(rng.gen_range(1..grain)), pick(rng.gen_range(1..grain)))
                } else {
                    let pick = |t: bool| if t { Rational::one() } else { Rational::zero() };
                    (pick(rng.gen()), pick(rng.gen()))
                };
                x = x.with_cube_value(m, c, a)?;
                y = y.with_cube_value(m, c, b)?;
            }
        }
        let d = bowen_distance(tower, &x, &y, n)?;
        if d.hi >= *eps {
            return Err(Error::CrossCheck(format!(
                "same-cell pair at distance {} >= eps {eps}",
                d.hi
            )));
        }
    }
    Ok(samples)
}

/// Product grid over a set of cube coordinates; all other coordinates are 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridFamily {
    /// Coordinates `(m, c)` that vary.
    pub coords: Vec<(i64, usize)>,
    /// Grid values are `k * spacing`, `k = 0..points_per_coord`.
    pub spacing: Rational,
    /// Values per coordinate.
    pub points_per_coord: u64,
    /// Number of components of the ambient points.
    pub components: usize,
}

impl GridFamily {
    /// `points_per_coord ^ |coords|`.
    pub fn cardinality(&self) -> BigUint {
        Pow::pow(&BigUint::from(self.points_per_coord), self.coords.len())
    }

    fn radius(&self) -> u32 {
        self.coords.iter().map(|(m, _)| m.unsigned_abs()).max().unwrap_or(0) as u32
    }

    /// Member with grid index `digits[i]` at `coords[i]`.
    pub fn point(&self, digits: &[u64]) -> Result<PointWindow> {
        let mut p = PointWindow::zero_cube(self.radius(), self.components);
        for (&(m, c), &k) in self.coords.iter().zip(digits) {
            if k >= self.points_per_coord {
                return Err(Error::OutOfRange(format!("grid index {k} too large")));
            }
            p = p.with_cube_value(m, c, Rational::from_integer(k.into()) * &self.spacing)?;
        }
        Ok(p)
    }

    /// The origin plus, for every coordinate, the member one grid step away
    /// along it. Distinct members of a product grid are at least as far
    /// apart as some such pair, because `d_n^a` is monotone in each
    /// coordinate difference.
    pub fn single_steps(&self) -> Result<Vec<PointWindow>> {
        let origin = self.point(&vec![0; self.coords.len()])?;
        let mut out = vec![origin.clone()];
        if self.points_per_coord < 2 {
            return Ok(out);
        }
        for &(m, c) in &self.coords {
            out.push(origin.clone().with_cube_value(m, c, self.spacing.clone())?);
        }
        Ok(out)
    }
}

/// A grid family together with its certified size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingGrid {
    /// The family.
    pub family: GridFamily,
    /// Lower bound on the separated number.
    pub count: CountBounds,
}

/// Smallest multiple of `2^-q` strictly above `eps`, with `q` fine enough
/// that `floor(1/spacing)` loses at most one grid value.
pub fn dyadic_spacing_above(eps: &Rational) -> Rational {
    let t = (-floor_log2(eps)).max(0);
    let q = 2 * t + 2;
    let scale = dyadic(q);
    Rational::from_integer(floor_ratio(&(eps * &scale)) + 1u32) * dyadic(-q)
}

/// Separated grid over the coordinates of weight 1 (inside every window).
///
/// Only single-step pairs need checking (see [`GridFamily::single_steps`]);
/// they are verified with [`verify_separated`] before returning.
pub fn cube_packing_grid(tower: &Tower, n: u64, eps: &Rational) -> Result<PackingGrid> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange("eps must be > 0".into()));
    }
    let profile = precision_profile(tower, n, &Rational::one())?;
    let components = profile.components();
    let spacing = dyadic_spacing_above(eps);
    let per = floor_ratio(&(Rational::one() / &spacing)).to_u64().unwrap_or(0).max(1);
    let coords = if per >= 2 { profile.unit_domain() } else { Vec::new() };
    let family = GridFamily { coords, spacing, points_per_coord: per, components };
    let probes = family.single_steps()?;
    // Pairs that do not involve the origin are not single steps.
    let origin_pairs: Vec<PointWindow> = probes.clone();
    for k in 1..origin_pairs.len() {
        let pair = [origin_pairs[0].clone(), origin_pairs[k].clone()];
        if let Separation::Counterexample { distance, .. } = verify_separated(&pair, tower, n, eps)? {
            return Err(Error::CrossCheck(format!(
                "grid step along {:?} only reaches {}",
                family.coords[k - 1],
                distance.hi
            )));
        }
    }
    let count = CountBounds::at_least(family.cardinality());
    Ok(PackingGrid { family, count })
}

/// The grid family with spacing `eps` on every component over the largest
/// window `[0, L_k)`: origin plus single-step neighbours, ordered by
/// coordinate then component. This is the family whose separation the
/// audit checks.
pub fn full_window_grid_sample(tower: &Tower, n: u64, eps: &Rational) -> Result<Vec<PointWindow>> {
    let visible = tower.visible_components()?;
    let components = visible[0];
    let window = tower.windows(n).into_iter().max().unwrap_or(1) as i64;
    let per = floor_ratio(&(Rational::one() / eps)).to_u64().unwrap_or(0) + 1;
    let coords = (0..window).flat_map(|m| (0..components).map(move |c| (m, c))).collect();
    let family = GridFamily { coords, spacing: eps.clone(), points_per_coord: per, components };
    family.single_steps()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_ratio;
    use crate::tower::{CubeSystem, ForgetfulFactor, Level, SymbolicSystem, WeightVector};

    fn q(s: &str) -> Rational {
        parse_ratio(s).unwrap()
    }

    fn line_instance(values: &[&str]) -> FiniteMetricInstance {
        let tower = Tower::new(
            vec![Level::Cube(CubeSystem::shift(1))],
            vec![],
            WeightVector::from_ints(&[1]).unwrap(),
        );
        let points: Vec<PointWindow> =
            values.iter().map(|v| PointWindow::constant_cube(0, 1, q(v)).unwrap()).collect();
        FiniteMetricInstance::from_points(&tower, &points, 1).unwrap()
    }

    fn example_tower() -> Tower {
        Tower::new(
            vec![Level::Cube(CubeSystem::shift(2)), Level::Cube(CubeSystem::shift(1))],
            vec![ForgetfulFactor::Project { keep: 1 }],
            WeightVector::from_ints(&[1, 1]).unwrap(),
        )
    }

    fn value(b: &CountBounds) -> u64 {
        b.value().unwrap().to_u64().unwrap()
    }

    /// Exhaustive oracle over all subsets.
    fn brute_spanning(instance: &FiniteMetricInstance, eps: &Rational) -> usize {
        let len = instance.len();
        (1u32..(1 << len))
            .filter(|set| {
                (0..len).all(|x| {
                    (0..len).any(|c| set & (1 << c) != 0 && instance.distance(c, x).hi <= *eps)
                })
            })
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap_or(0)
    }

    fn brute_packing(instance: &FiniteMetricInstance, eps: &Rational) -> usize {
        let len = instance.len();
        (1u32..(1 << len))
            .filter(|set| {
                (0..len).all(|a| {
                    (a + 1..len).all(|b| {
                        set & (1 << a) == 0 || set & (1 << b) == 0 || instance.distance(a, b).lo > *eps
                    })
                })
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn spanning_examples() {
        let three = line_instance(&["0", "1/2", "1"]);
        assert_eq!(value(&spanning_number(&three, &q("6/10"), SearchMode::Exact).unwrap()), 1);
        // Centres are instance points: 1/2 is more than 0.4 from both ends.
        assert_eq!(value(&spanning_number(&three, &q("4/10"), SearchMode::Exact).unwrap()), 3);
        let four = line_instance(&["0", "3/10", "6/10", "9/10"]);
        let eps = q("3/10");
        assert_eq!(brute_spanning(&four, &eps), 2);
        assert_eq!(value(&spanning_number(&four, &eps, SearchMode::Exact).unwrap()), 2);
    }

    #[test]
    fn packing_examples() {
        let four = line_instance(&["0", "3/10", "6/10", "9/10"]);
        let eps = q("3/10");
        assert_eq!(brute_packing(&four, &eps), 2);
        assert_eq!(value(&packing_number(&four, &eps, SearchMode::Exact).unwrap()), 2);
        let single = line_instance(&["1/3"]);
        assert_eq!(value(&packing_number(&single, &q("1/100"), SearchMode::Exact).unwrap()), 1);
        assert_eq!(value(&packing_number(&four, &q("9/10"), SearchMode::Exact).unwrap()), 1);
    }

    #[test]
    fn greedy_modes_bracket() {
        let pts = line_instance(&["0", "1/10", "3/10", "1/2", "7/10", "4/5", "1"]);
        let eps = q("1/5");
        let exact = value(&spanning_number(&pts, &eps, SearchMode::Exact).unwrap());
        let greedy = spanning_number(&pts, &eps, SearchMode::Greedy).unwrap();
        assert!(greedy.lower.to_u64().unwrap() <= exact);
        assert!(greedy.upper.unwrap().to_u64().unwrap() >= exact);
        let exact = value(&packing_number(&pts, &eps, SearchMode::Exact).unwrap());
        let greedy = packing_number(&pts, &eps, SearchMode::Greedy).unwrap();
        assert!(greedy.lower.to_u64().unwrap() <= exact);
        assert!(greedy.upper.unwrap().to_u64().unwrap() >= exact);
    }

    #[test]
    fn straddling_threshold_is_an_error() {
        let d = |lo: &str, hi: &str| DistanceInterval { lo: q(lo), hi: q(hi) };
        let zero = d("0", "0");
        let instance = FiniteMetricInstance::from_distances(vec![
            vec![zero.clone(), d("1/5", "3/10")],
            vec![d("1/5", "3/10"), zero],
        ])
        .unwrap();
        assert!(matches!(
            spanning_number(&instance, &q("1/4"), SearchMode::Exact),
            Err(Error::Unresolved { i: 0, j: 1, .. })
        ));
        assert!(FiniteMetricInstance::from_distances(vec![vec![d("1", "1")]]).is_err());
    }

    #[test]
    fn verify_separated_examples() {
        let t = example_tower();
        assert_eq!(verify_separated(&[], &t, 3, &q("1/4")).unwrap(), Separation::Separated);
        // Component 2 at m = 4 is only seen by level 1 (window [0, 2]).
        let x = PointWindow::zero_cube(6, 2);
        let y = x.clone().with_cube_value(4, 1, q("1/4")).unwrap();
        match verify_separated(&[x.clone(), y], &t, 3, &q("1/4")).unwrap() {
            Separation::Counterexample { distance, .. } => {
                assert_eq!(distance, DistanceInterval::exact(q("1/16")));
            }
            other => panic!("expected a counterexample, got {other:?}"),
        }
        let sample = full_window_grid_sample(&t, 3, &q("1/4")).unwrap();
        assert_eq!(sample.len(), 1 + 12);
        // Worst witness: component 2 at m = 5, two steps past its window.
        assert_eq!(
            verify_separated(&sample, &t, 3, &q("1/4")).unwrap(),
            Separation::Counterexample { i: 0, j: 12, distance: DistanceInterval::exact(q("1/32")) }
        );
    }

    fn forget_low_bit(weights: &[&str]) -> Tower {
        Tower::new(
            vec![
                Level::Symbolic(SymbolicSystem::full(4)),
                Level::Symbolic(SymbolicSystem::full(2)),
            ],
            vec![ForgetfulFactor::Merge { map: vec![0, 0, 1, 1] }],
            WeightVector::new(weights.iter().map(|w| q(w)).collect()).unwrap(),
        )
    }

    #[test]
    fn itinerary_examples() {
        let t = forget_low_bit(&["1", "1"]);
        assert_eq!(itinerary_count_bruteforce(&t, 2, 0).unwrap(), BigUint::from(64u32));
        assert_eq!(value(&itinerary_count(&t, 2, 0).unwrap()), 64);
        assert_eq!(itinerary_count_bruteforce(&t, 1, 0).unwrap(), BigUint::from(8u32));
        assert_eq!(value(&itinerary_count(&t, 1, 0).unwrap()), 8);
        let identity = Tower::new(
            vec![
                Level::Symbolic(SymbolicSystem::full(2)),
                Level::Symbolic(SymbolicSystem::full(2)),
            ],
            vec![ForgetfulFactor::Merge { map: vec![0, 1] }],
            WeightVector::from_ints(&[1, 1]).unwrap(),
        );
        assert_eq!(value(&itinerary_count(&identity, 3, 0).unwrap()), 64);
        // Large windows skip the enumeration but keep the closed form.
        let big = itinerary_count(&t, 40, 0).unwrap();
        assert_eq!(big.value().unwrap(), &(BigUint::from(1u32) << 120u32));
        let err = itinerary_count(&example_tower(), 2, 0);
        assert!(matches!(err, Err(Error::KindMismatch(_))));
    }

    #[test]
    fn margins_follow_dyadic_brackets() {
        assert_eq!(symbolic_margin(&q("1")).unwrap(), 0);
        assert_eq!(symbolic_margin(&q("3/4")).unwrap(), 0);
        assert_eq!(symbolic_margin(&q("1/2")).unwrap(), 1);
        assert_eq!(symbolic_margin(&q("1/5")).unwrap(), 2);
        assert!(symbolic_margin(&q("2")).is_err());
        let t = forget_low_bit(&["1", "1"]);
        // 4^(L1 + 2l) * 2^(L2 - L1) with L = [2, 4], l = 1.
        assert_eq!(value(&itinerary_count(&t, 2, 1).unwrap()), 4u64.pow(4) * 4);
    }

    #[test]
    fn faithful_and_tight_exponents() {
        let t = example_tower();
        let eps = q("1/4");
        let faithful = cube_cover_count(&t, 2, &eps, CoverMode::Faithful, 2, 7).unwrap();
        assert_eq!(faithful.pad, 4);
        assert_eq!(faithful.base, BigUint::from(49u32));
        assert_eq!(faithful.exponent, 4 * 2 + 4 * 4 + 2);
        assert_eq!(faithful.count.upper, Some(Pow::pow(BigUint::from(49u32), 26u32)));
        assert!(faithful.certified);
        let tight = cube_cover_count(&t, 2, &eps, CoverMode::Tight, 2, 7).unwrap();
        assert_eq!(tight.exponent, 3 * 2 + 4 * 4 + 2);
        assert!(tight.certified);
        let coarse = cube_cover_count(&t, 1, &q("12"), CoverMode::Faithful, 0, 0).unwrap();
        assert_eq!(coarse.base, BigUint::from(2u32));
        assert!(cube_cover_count(&t, 1, &q("13"), CoverMode::Faithful, 0, 0).is_err());
        assert!(cube_cover_count(&t, 1, &q("0"), CoverMode::Faithful, 0, 0).is_err());
    }

    #[test]
    fn packing_grid_examples() {
        let t = example_tower();
        let eps = q("31/64");
        let grid = cube_packing_grid(&t, 2, &eps).unwrap();
        assert_eq!(grid.family.coords.len(), 6);
        assert_eq!(grid.count.lower, BigUint::from(64u32));
        let single = cube_packing_grid(&t, 2, &q("1")).unwrap();
        assert_eq!(single.count.lower, BigUint::one());
        let classic = Tower::new(
            vec![Level::Cube(CubeSystem::shift(2)), Level::Cube(CubeSystem::shift(1))],
            vec![ForgetfulFactor::Project { keep: 1 }],
            WeightVector::from_ints(&[1, 0]).unwrap(),
        );
        let grid = cube_packing_grid(&classic, 2, &eps).unwrap();
        assert_eq!(grid.count.lower, BigUint::from(16u32));
        assert_eq!(dyadic_spacing_above(&q("1/4")), q("1/4") + dyadic(-6));
    }

    #[test]
    fn grid_single_steps_cover_all_pairs_on_small_family() {
        // Check the monotonicity reduction against full pairwise verification.
        let t = example_tower();
        let family = GridFamily {
            coords: vec![(0, 0), (1, 1), (3, 0)],
            spacing: q("3/8"),
            points_per_coord: 3,
            components: 2,
        };
        let mut all = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    all.push(family.point(&[a, b, c]).unwrap());
                }
            }
        }
        let eps = q("1/4");
        let full = verify_separated(&all, &t, 2, &eps).unwrap();
        let steps = verify_separated(&family.single_steps().unwrap(), &t, 2, &eps).unwrap();
        assert_eq!(full == Separation::Separated, steps == Separation::Separated);
    }
}

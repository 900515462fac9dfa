//! Weighted Bowen distance `d_n^a` on finite point windows.
//!
//! `d_n^a(x, y)` is the sup over levels `i` and times `0 <= j < L_i` of the
//! level metric between `T^j tau_{i-1} x` and `T^j tau_{i-1} y`. For both
//! metric families used here this sup only depends on where the two points
//! differ relative to the windows `[0, L_i)`, so it is computed from the
//! coordinates inside the supports plus a closed-form tail allowance.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::exact::{dyadic, Rational};
use crate::tower::{Tower, TowerKind};
use crate::{Error, Result};

/// What a point looks like outside its support `[-W, W]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tail {
    /// Symbol 0 / value 0 everywhere outside the support.
    #[default]
    Zero,
    /// Unknown; only the metric's worst case is assumed.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Values {
    Symbols(Vec<usize>),
    Cube { components: usize, values: Vec<Rational> },
}

/// A two-sided sequence known on `[-radius, radius]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointWindow {
    radius: u32,
    values: Values,
    tail: Tail,
}

impl PointWindow {
    /// Symbolic point; `symbols[radius + m]` is the symbol at coordinate `m`.
    pub fn symbolic(radius: u32, symbols: Vec<usize>) -> Result<Self> {
        let expected = 2 * radius as usize + 1;
        if symbols.len() != expected {
            return Err(Error::InvalidPoint(format!(
                "expected {expected} symbols for radius {radius}, got {}",
                symbols.len()
            )));
        }
        Ok(PointWindow { radius, values: Values::Symbols(symbols), tail: Tail::Zero })
    }

    /// Cube point; `rows[radius + m][c]` is component `c` at coordinate `m`.
    pub fn cube(radius: u32, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let expected = 2 * radius as usize + 1;
        if rows.len() != expected {
            return Err(Error::InvalidPoint(format!(
                "expected {expected} coordinates for radius {radius}, got {}",
                rows.len()
            )));
        }
        let components = rows.first().map_or(0, Vec::len);
        if components == 0 || rows.iter().any(|r| r.len() != components) {
            return Err(Error::InvalidPoint("ragged or empty component rows".into()));
        }
        let one = Rational::one();
        if rows.iter().flatten().any(|v| v.is_negative() || *v > one) {
            return Err(Error::InvalidPoint("cube values must lie in [0, 1]".into()));
        }
        Ok(PointWindow {
            radius,
            values: Values::Cube { components, values: rows.into_iter().flatten().collect() },
            tail: Tail::Zero,
        })
    }

    /// The all-zero cube point with the given support.
    pub fn zero_cube(radius: u32, components: usize) -> Self {
        let len = (2 * radius as usize + 1) * components;
        PointWindow {
            radius,
            values: Values::Cube { components, values: vec![Rational::zero(); len] },
            tail: Tail::Zero,
        }
    }

    /// Cube point equal to `value` in every component on its support.
    pub fn constant_cube(radius: u32, components: usize, value: Rational) -> Result<Self> {
        let rows = vec![vec![value; components]; 2 * radius as usize + 1];
        Self::cube(radius, rows)
    }

    /// Returns a copy with one cube coordinate replaced.
    pub fn with_cube_value(mut self, m: i64, c: usize, value: Rational) -> Result<Self> {
        let radius = self.radius as i64;
        let Values::Cube { components, values } = &mut self.values else {
            return Err(Error::InvalidPoint("not a cube point".into()));
        };
        if m.abs() > radius || c >= *components {
            return Err(Error::InvalidPoint(format!("coordinate ({m}, {c}) outside support")));
        }
        if value.is_negative() || value > Rational::one() {
            return Err(Error::InvalidPoint("cube values must lie in [0, 1]".into()));
        }
        values[(m + radius) as usize * *components + c] = value;
        Ok(self)
    }

    /// Returns a copy with the given tail convention.
    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    /// Support radius `W`.
    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Tail convention.
    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Number of cube components, `None` for symbolic points.
    pub fn components(&self) -> Option<usize> {
        match &self.values {
            Values::Cube { components, .. } => Some(*components),
            Values::Symbols(_) => None,
        }
    }

    /// Whether the value at `m` is determined (inside support or zero tail).
    fn known(&self, m: i64) -> bool {
        m.abs() <= self.radius as i64 || self.tail == Tail::Zero
    }

    /// Symbol at coordinate `m`; zero-filled outside the support.
    pub fn symbol(&self, m: i64) -> Option<usize> {
        match &self.values {
            Values::Symbols(s) if m.abs() <= self.radius as i64 => {
                Some(s[(m + self.radius as i64) as usize])
            }
            Values::Symbols(_) => Some(0),
            Values::Cube { .. } => None,
        }
    }

    /// Cube value at `(m, c)`; zero-filled outside the support.
    pub fn cube_value(&self, m: i64, c: usize) -> Option<Rational> {
        match &self.values {
            Values::Cube { components, values } if c < *components => {
                if m.abs() <= self.radius as i64 {
                    Some(values[(m + self.radius as i64) as usize * components + c].clone())
                } else {
                    Some(Rational::zero())
                }
            }
            _ => None,
        }
    }
}

/// Enclosure `[lo, hi]` of a distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceInterval {
    /// Lower end.
    pub lo: Rational,
    /// Upper end.
    pub hi: Rational,
}

impl DistanceInterval {
    /// Degenerate interval `[d, d]`.
    pub fn exact(d: Rational) -> Self {
        DistanceInterval { lo: d.clone(), hi: d }
    }

    /// Whether `lo == hi`.
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Width `hi - lo`.
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// `sum_{p > radius} 2^-|p - centre|`.
fn right_tail(radius: i64, centre: i64) -> Rational {
    if centre <= radius {
        dyadic(-(radius - centre))
    } else {
        Rational::from_integer(3.into()) - dyadic(-(centre - radius - 1))
    }
}

/// `sum_{|p| > radius} 2^-|p - centre|`.
fn two_sided_tail(radius: i64, centre: i64) -> Rational {
    right_tail(radius, centre) + right_tail(radius, -centre)
}

/// Distance from `m` to the integer window `[start, end]`.
pub(crate) fn dist_to_window(m: i64, start: i64, end: i64) -> u64 {
    if m < start {
        (start - m) as u64
    } else if m > end {
        (m - end) as u64
    } else {
        0
    }
}

/// Radius beyond which at least one of the two points is unknown.
fn unknown_radius(x: &PointWindow, y: &PointWindow) -> Option<i64> {
    [x, y]
        .iter()
        .filter(|p| p.tail == Tail::Unknown)
        .map(|p| p.radius as i64)
        .min()
}

fn check_point(tower: &Tower, p: &PointWindow) -> Result<()> {
    match (tower.kind(), &p.values) {
        (TowerKind::Symbolic, Values::Symbols(s)) => {
            let alphabet = tower.base_symbolic()?.alphabet();
            if s.iter().any(|&v| v >= alphabet) {
                return Err(Error::InvalidPoint(format!("symbol outside alphabet {alphabet}")));
            }
            Ok(())
        }
        (TowerKind::Cube, Values::Cube { components, .. }) => {
            let expected = tower.base_cube()?.components;
            if *components != expected {
                return Err(Error::InvalidPoint(format!(
                    "point has {components} components, level 1 has {expected}"
                )));
            }
            Ok(())
        }
        (TowerKind::Mixed, _) => Err(Error::KindMismatch("mixed tower".into())),
        _ => Err(Error::KindMismatch("point kind does not match tower kind".into())),
    }
}

/// Enclosure of `d_n^a(x, y)`.
///
/// Symbolic levels use `2^-min{|m| : x_m != y_m}`; cube levels use
/// `sum_m 2^-|m| max_c |x_{m,c} - y_{m,c}|` over the components the level
/// sees. With zero tails the result is exact.
pub fn bowen_distance(
    tower: &Tower,
    x: &PointWindow,
    y: &PointWindow,
    n: u64,
) -> Result<DistanceInterval> {
    check_point(tower, x)?;
    check_point(tower, y)?;
    let windows = tower.windows(n);
    match tower.kind() {
        TowerKind::Symbolic => symbolic_distance(tower, x, y, &windows),
        TowerKind::Cube => cube_distance(tower, x, y, &windows),
        TowerKind::Mixed => Err(Error::KindMismatch("mixed tower".into())),
    }
}

fn symbolic_distance(
    tower: &Tower,
    x: &PointWindow,
    y: &PointWindow,
    windows: &[u64],
) -> Result<DistanceInterval> {
    let maps = tower.symbol_maps()?;
    let unknown = unknown_radius(x, y);
    let span = (x.radius.max(y.radius) as i64).min(unknown.unwrap_or(i64::MAX));
    let mut lo: Option<u64> = None; // smallest dist to a window among certain differences
    let mut hi: Option<u64> = None;
    for (map, &len) in maps.iter().zip(windows) {
        let end = len as i64 - 1;
        for p in -span..=span {
            if !(x.known(p) && y.known(p)) {
                continue;
            }
            let (a, b) = (x.symbol(p).unwrap_or(0), y.symbol(p).unwrap_or(0));
            if map[a] != map[b] {
                let d = dist_to_window(p, 0, end);
                lo = Some(lo.map_or(d, |v| v.min(d)));
            }
        }
        if let Some(r) = unknown {
            let nearest = dist_to_window(r + 1, 0, end).min(dist_to_window(-r - 1, 0, end));
            hi = Some(hi.map_or(nearest, |v| v.min(nearest)));
        }
    }
    let to_value = |d: Option<u64>| d.map_or_else(Rational::zero, |d| dyadic(-(d as i64)));
    let lo_value = to_value(lo);
    let hi_value = match (lo, hi) {
        (Some(a), Some(b)) => to_value(Some(a.min(b))),
        (a, b) => to_value(a.or(b)),
    };
    Ok(DistanceInterval { lo: lo_value, hi: hi_value })
}

fn cube_distance(
    tower: &Tower,
    x: &PointWindow,
    y: &PointWindow,
    windows: &[u64],
) -> Result<DistanceInterval> {
    let visible = tower.visible_components()?;
    let steps = tower.cube_steps()?;
    let unknown = unknown_radius(x, y);
    let span = (x.radius.max(y.radius) as i64).min(unknown.unwrap_or(i64::MAX));

    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for ((&comps, &len), &step) in visible.iter().zip(windows).zip(&steps) {
        // Per-coordinate differences max_c |x - y| over the visible components.
        let deltas: Vec<(i64, Rational)> = (-span..=span)
            .filter(|&p| x.known(p) && y.known(p))
            .filter_map(|p| {
                let delta = (0..comps)
                    .map(|c| {
                        let a = x.cube_value(p, c).unwrap_or_default();
                        let b = y.cube_value(p, c).unwrap_or_default();
                        (a - b).abs()
                    })
                    .max()
                    .unwrap_or_default();
                (!delta.is_zero()).then_some((p, delta))
            })
            .collect();
        let last_time = if step == 0 { 0 } else { len as i64 - 1 };
        for j in 0..=last_time {
            let centre = j * step;
            let sum: Rational = deltas
                .iter()
                .map(|(p, d)| d * dyadic(-((p - centre).abs())))
                .sum();
            let upper = match unknown {
                Some(r) => &sum + two_sided_tail(r, centre),
                None => sum.clone(),
            };
            if sum > lo {
                lo = sum;
            }
            if upper > hi {
                hi = upper;
            }
        }
    }
    Ok(DistanceInterval { lo, hi })
}

/// Bowen-ball membership verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// `d_n^a < eps` certainly.
    Inside,
    /// `d_n^a >= eps` certainly.
    Outside,
    /// The enclosure straddles `eps`.
    Unresolved,
}

/// Whether `y` lies in the open ball `B_n^a(center, eps)`.
pub fn bowen_ball_membership(
    tower: &Tower,
    center: &PointWindow,
    y: &PointWindow,
    n: u64,
    eps: &Rational,
) -> Result<Membership> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange("eps must be > 0".into()));
    }
    let d = bowen_distance(tower, center, y, n)?;
    Ok(classify(&d, eps))
}

/// Membership verdict for a known enclosure.
pub fn classify(d: &DistanceInterval, eps: &Rational) -> Membership {
    if d.hi < *eps {
        Membership::Inside
    } else if d.lo >= *eps {
        Membership::Outside
    } else {
        Membership::Unresolved
    }
}

/// Sensitivity of `d_n^a` to each coordinate of a cube tower.
///
/// Component `c` is seen by the levels that keep it; the union of their
/// time windows is `[0, L(c))`, and a change of `delta` at coordinate `m`
/// alone moves `d_n^a` by exactly `2^-dist(m, [0, L(c)-1]) * delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionProfile {
    threshold: Rational,
    /// Per component: last time index the component is observed at.
    window_end: Vec<i64>,
    /// Per component: padding `pad` with `2^-pad >= threshold`, or `None`
    /// when even weight 1 is below the threshold.
    pad: Option<u64>,
}

impl PrecisionProfile {
    /// Weight `w(m, c)`; zero for components the tower does not have.
    pub fn weight(&self, m: i64, c: usize) -> Rational {
        match self.window_end.get(c) {
            Some(&end) => dyadic(-(dist_to_window(m, 0, end) as i64)),
            None => Rational::zero(),
        }
    }

    /// Threshold the profile was restricted to.
    pub fn threshold(&self) -> &Rational {
        &self.threshold
    }

    /// Number of components.
    pub fn components(&self) -> usize {
        self.window_end.len()
    }

    /// Length `L(c)` of the observation window of component `c`.
    pub fn window_len(&self, c: usize) -> u64 {
        (self.window_end[c] + 1) as u64
    }

    /// Coordinate range `[start, end]` of component `c` inside the profile.
    pub fn range(&self, c: usize) -> Option<(i64, i64)> {
        let pad = self.pad? as i64;
        let end = *self.window_end.get(c)?;
        Some((-pad, end + pad))
    }

    /// All `(m, c)` with `w(m, c) >= threshold`, ordered by component then `m`.
    pub fn domain(&self) -> Vec<(i64, usize)> {
        (0..self.components())
            .filter_map(|c| self.range(c).map(|r| (c, r)))
            .flat_map(|(c, (start, end))| (start..=end).map(move |m| (m, c)))
            .collect()
    }

    /// Coordinates with weight exactly 1.
    pub fn unit_domain(&self) -> Vec<(i64, usize)> {
        (0..self.components())
            .flat_map(|c| (0..=self.window_end[c]).map(move |m| (m, c)))
            .collect()
    }
}

/// Precision profile of a cube tower at time `n`, restricted to weights
/// `>= eps`. Coordinates outside the returned domain have weight `< eps`.
pub fn precision_profile(tower: &Tower, n: u64, eps: &Rational) -> Result<PrecisionProfile> {
    if !eps.is_positive() {
        return Err(Error::OutOfRange("eps must be > 0".into()));
    }
    let visible = tower.visible_components()?;
    let steps = tower.cube_steps()?;
    let windows = tower.windows(n);
    let components = visible[0];
    let window_end = (0..components)
        .map(|c| {
            visible
                .iter()
                .zip(&windows)
                .zip(&steps)
                .filter(|((&v, _), _)| c < v)
                .map(|((_, &len), &step)| (len as i64 - 1) * step)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let pad = if *eps > Rational::one() {
        None
    } else {
        let mut pad = 0u64;
        while dyadic(-(pad as i64 + 1)) >= *eps {
            pad += 1;
        }
        Some(pad)
    };
    Ok(PrecisionProfile { threshold: eps.clone(), window_end, pad })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_ratio;
    use crate::tower::{CubeSystem, ForgetfulFactor, Level, SymbolicSystem, WeightVector};
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_ratio(s).unwrap()
    }

    fn example_tower(weights: &[i64]) -> Tower {
        Tower::new(
            vec![Level::Cube(CubeSystem::shift(2)), Level::Cube(CubeSystem::shift(1))],
            vec![ForgetfulFactor::Project { keep: 1 }],
            WeightVector::from_ints(weights).unwrap(),
        )
    }

    fn cube_identity_tower() -> Tower {
        Tower::new(
            vec![Level::Cube(CubeSystem::shift(1)), Level::Cube(CubeSystem::shift(1))],
            vec![ForgetfulFactor::Project { keep: 1 }],
            WeightVector::from_ints(&[1, 1]).unwrap(),
        )
    }

    #[test]
    fn single_coordinate_at_origin() {
        let t = cube_identity_tower();
        let x = PointWindow::zero_cube(6, 1);
        let y = x.clone().with_cube_value(0, 0, q("1/2")).unwrap();
        let d = bowen_distance(&t, &x, &y, 2).unwrap();
        assert_eq!(d, DistanceInterval::exact(q("1/2")));
    }

    #[test]
    fn single_coordinate_past_window() {
        let t = cube_identity_tower();
        let x = PointWindow::zero_cube(6, 1);
        let y = x.clone().with_cube_value(5, 0, q("1/2")).unwrap();
        // Windows [2, 4]; best time j = 3 at level 2 gives 2^-2 * 1/2.
        let d = bowen_distance(&t, &x, &y, 2).unwrap();
        assert_eq!(d, DistanceInterval::exact(q("1/8")));
        let verdict = bowen_ball_membership(&t, &x, &y, 2, &q("1/8")).unwrap();
        assert_eq!(verdict, Membership::Outside);
        let verdict = bowen_ball_membership(&t, &x, &y, 2, &q("1/7")).unwrap();
        assert_eq!(verdict, Membership::Inside);
    }

    #[test]
    fn distance_to_self_is_zero() {
        let t = example_tower(&[1, 1]);
        let x = PointWindow::constant_cube(3, 2, q("1/3")).unwrap();
        assert_eq!(bowen_distance(&t, &x, &x, 4).unwrap(), DistanceInterval::exact(q("0")));
        assert_eq!(
            bowen_ball_membership(&t, &x, &x, 4, &q("1/1000")).unwrap(),
            Membership::Inside
        );
    }

    #[test]
    fn straddling_enclosure_is_unresolved() {
        let d = DistanceInterval { lo: q("24/100"), hi: q("26/100") };
        assert_eq!(classify(&d, &q("1/4")), Membership::Unresolved);
    }

    #[test]
    fn unknown_tails_widen_the_enclosure() {
        let t = cube_identity_tower();
        let x = PointWindow::zero_cube(4, 1).with_tail(Tail::Unknown);
        let y = x.clone().with_cube_value(0, 0, q("1/2")).unwrap();
        let d = bowen_distance(&t, &x, &y, 1).unwrap();
        assert_eq!(d.lo, q("1/2"));
        // Windows [1, 2]: j = 1 sees 1/4 from the known difference plus tails.
        assert!(d.hi > d.lo);
        assert!(d.width() <= dyadic(1 - 4 + 2));
    }

    #[test]
    fn symbolic_first_difference() {
        let t = Tower::new(
            vec![Level::Symbolic(SymbolicSystem::full(2))],
            vec![],
            WeightVector::from_ints(&[1]).unwrap(),
        );
        let x = PointWindow::symbolic(3, vec![0, 0, 0, 0, 0, 0, 0]).unwrap();
        let y = PointWindow::symbolic(3, vec![1, 0, 0, 0, 0, 0, 0]).unwrap();
        // Difference at m = -3, window [0, 1] at n = 2: distance 2^-3.
        assert_eq!(bowen_distance(&t, &x, &y, 2).unwrap(), DistanceInterval::exact(q("1/8")));
        let far = PointWindow::symbolic(3, vec![0; 7]).unwrap().with_tail(Tail::Unknown);
        let d = bowen_distance(&t, &y, &far, 2).unwrap();
        assert_eq!(d.lo, q("1/8"));
        assert_eq!(d.hi, q("1/8"));
        let d = bowen_distance(&t, &far, &far.clone(), 8).unwrap();
        assert_eq!(d.lo, q("0"));
        // Window [0, 7] reaches past radius 3.
        assert_eq!(d.hi, q("1"));
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let t = cube_identity_tower();
        let x = PointWindow::symbolic(0, vec![0]).unwrap();
        assert!(matches!(
            bowen_distance(&t, &x, &x, 1),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn profile_examples() {
        let t = example_tower(&[1, 1]);
        let p = precision_profile(&t, 2, &q("1")).unwrap();
        assert_eq!(p.range(0), Some((0, 3)));
        assert_eq!(p.range(1), Some((0, 1)));
        assert_eq!(p.weight(3, 0), q("1"));
        assert_eq!(p.weight(2, 1), q("1/2"));

        let p = precision_profile(&t, 2, &q("1/4")).unwrap();
        assert_eq!(p.range(0), Some((-2, 5)));
        assert_eq!(p.weight(-3, 0), q("1/8"));

        let classic = example_tower(&[1, 0]);
        let p = precision_profile(&classic, 2, &q("1/4")).unwrap();
        assert_eq!(p.range(0), p.range(1));

        assert!(precision_profile(&t, 2, &q("2")).unwrap().domain().is_empty());
        let sym = Tower::new(
            vec![Level::Symbolic(SymbolicSystem::full(2))],
            vec![],
            WeightVector::from_ints(&[1]).unwrap(),
        );
        assert!(precision_profile(&sym, 2, &q("1/2")).is_err());
    }

    #[test]
    fn duplicated_symbolic_tower_matches_classic_window() {
        let dup = Tower::new(
            vec![
                Level::Symbolic(SymbolicSystem::full(3)),
                Level::Symbolic(SymbolicSystem::full(3)),
            ],
            vec![ForgetfulFactor::Merge { map: vec![0, 1, 2] }],
            WeightVector::from_ints(&[1, 1]).unwrap(),
        );
        let classic = Tower::new(
            vec![Level::Symbolic(SymbolicSystem::full(3))],
            vec![],
            WeightVector::from_ints(&[1]).unwrap(),
        );
        let x = PointWindow::symbolic(6, vec![0; 13]).unwrap();
        for m in -6i64..=6 {
            let mut s = vec![0; 13];
            s[(m + 6) as usize] = 2;
            let y = PointWindow::symbolic(6, s).unwrap();
            for n in 1..4 {
                let a = bowen_distance(&dup, &x, &y, n).unwrap();
                let b = bowen_distance(&classic, &x, &y, 2 * n).unwrap();
                assert_eq!(a, b, "m = {m}, n = {n}");
            }
        }
    }

    fn small_value() -> impl Strategy<Value = Rational> {
        (0i64..=16).prop_map(|k| Rational::new(k.into(), 16.into()))
    }

    proptest! {
        #[test]
        fn single_coordinate_law(m in -6i64..=12, c in 0usize..2, delta in small_value(), n in 1u64..5) {
            let t = example_tower(&[1, 1]);
            let x = PointWindow::zero_cube(12, 2);
            let y = x.clone().with_cube_value(m, c, delta.clone()).unwrap();
            let d = bowen_distance(&t, &x, &y, n).unwrap();
            let p = precision_profile(&t, n, &q("1/1024")).unwrap();
            prop_assert_eq!(d, DistanceInterval::exact(p.weight(m, c) * delta));
        }

        #[test]
        fn exact_distance_grows_with_n(
            xs in proptest::collection::vec(small_value(), 7),
            ys in proptest::collection::vec(small_value(), 7),
            n in 1u64..5,
        ) {
            let t = cube_identity_tower();
            let rows = |v: &[Rational]| v.iter().map(|r| vec![r.clone()]).collect();
            let x = PointWindow::cube(3, rows(&xs)).unwrap();
            let y = PointWindow::cube(3, rows(&ys)).unwrap();
            let a = bowen_distance(&t, &x, &y, n).unwrap();
            let b = bowen_distance(&t, &x, &y, n + 1).unwrap();
            prop_assert!(a.is_exact() && b.is_exact());
            prop_assert!(b.lo >= a.lo);
            prop_assert_eq!(bowen_distance(&t, &y, &x, n).unwrap(), a);
        }
    }
}

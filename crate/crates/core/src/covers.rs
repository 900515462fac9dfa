//! Open box covers of window cubes.
//!
//! A cover lives on `[0,1]^D` where each axis is a labelled coordinate
//! `(m, c)` of a level-1 point. Members are open boxes with rational
//! endpoints; endpoints outside `[0,1]` mean the box reaches the face. All
//! combinatorics (coverage, `ord`, refinement checks) are decided exactly on
//! the arrangement of endpoints.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::exact::{ceil_ratio, dyadic, Rational};
use crate::tower::Tower;
use crate::{Error, Result};

/// Open interval `(lo, hi)`, read inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interval {
    /// Left endpoint.
    pub lo: Rational,
    /// Right endpoint.
    pub hi: Rational,
}

impl Interval {
    /// `(lo, hi)`; refused if it misses `[0, 1]`.
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        let iv = Interval { lo, hi };
        if iv.is_empty() {
            return Err(Error::InvalidCover(format!("interval ({}, {}) misses [0, 1]", iv.lo, iv.hi)));
        }
        Ok(iv)
    }

    /// An interval containing all of `[0, 1]`.
    pub fn full() -> Self {
        Interval { lo: -Rational::one(), hi: Rational::from_integer(2.into()) }
    }

    /// Whether `x` lies in the interval.
    pub fn contains(&self, x: &Rational) -> bool {
        self.lo < *x && *x < self.hi
    }

    /// Whether the interval contains `[0, 1]`.
    pub fn is_full(&self) -> bool {
        self.lo.is_negative() && self.hi > Rational::one()
    }

    fn is_empty(&self) -> bool {
        self.lo >= self.hi || self.lo >= Rational::one() || !self.hi.is_positive()
    }

    /// Length of the part inside `[0, 1]`.
    pub fn clamped_len(&self) -> Rational {
        let lo = self.lo.clone().max(Rational::zero());
        let hi = self.hi.clone().min(Rational::one());
        (hi - lo).max(Rational::zero())
    }

    fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    /// Whether every point of `self` in `[0, 1]` lies in `outer`.
    fn inside(&self, outer: &Interval) -> bool {
        let low_ok = if self.lo.is_negative() { outer.lo.is_negative() } else { outer.lo <= self.lo };
        let high_ok = if self.hi > Rational::one() { outer.hi > Rational::one() } else { outer.hi >= self.hi };
        low_ok && high_ok
    }
}

/// Coordinate label `(m, c)`: time `m`, component `c` of a level-1 point.
pub type Coord = (i64, usize);

/// Finite cover of `[0,1]^coords` by open boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxCover {
    components: usize,
    coords: Vec<Coord>,
    members: Vec<Vec<Interval>>,
}

impl BoxCover {
    /// Builds and certifies a cover. `coords` must be distinct; every member
    /// has one interval per coordinate. Members missing the cube are dropped.
    pub fn new(components: usize, coords: Vec<Coord>, members: Vec<Vec<Interval>>) -> Result<Self> {
        let distinct: BTreeSet<&Coord> = coords.iter().collect();
        if distinct.len() != coords.len() {
            return Err(Error::InvalidCover("repeated coordinate label".into()));
        }
        if let Some(&(_, c)) = coords.iter().find(|(_, c)| *c >= components) {
            return Err(Error::InvalidCover(format!("component {c} out of range")));
        }
        if members.iter().any(|m| m.len() != coords.len()) {
            return Err(Error::InvalidCover("member arity differs from coordinate count".into()));
        }
        let members: Vec<Vec<Interval>> =
            members.into_iter().filter(|m| !m.iter().any(Interval::is_empty)).collect();
        let cover = BoxCover { components, coords, members };
        if !cover.covers_ambient() {
            return Err(Error::InvalidCover("members do not cover the cube".into()));
        }
        Ok(cover)
    }

    /// The cover `{ambient}` on no coordinates.
    pub fn trivial(components: usize) -> Self {
        BoxCover { components, coords: Vec::new(), members: vec![Vec::new()] }
    }

    /// Product of per-coordinate interval covers.
    pub fn product(components: usize, factors: Vec<(Coord, Vec<Interval>)>) -> Result<Self> {
        let coords: Vec<Coord> = factors.iter().map(|(c, _)| *c).collect();
        let mut members: Vec<Vec<Interval>> = vec![Vec::new()];
        for (_, ivs) in &factors {
            members = members
                .iter()
                .flat_map(|m| {
                    ivs.iter().map(move |iv| {
                        let mut next = m.clone();
                        next.push(iv.clone());
                        next
                    })
                })
                .collect();
        }
        BoxCover::new(components, coords, members)
    }

    /// Intervals `((k-1) eps/12, (k+1) eps/12)` for `k = 0..=floor(12/eps)`.
    pub fn grid_intervals(eps: &Rational) -> Result<Vec<Interval>> {
        if !eps.is_positive() {
            return Err(Error::OutOfRange("eps must be > 0".into()));
        }
        let step = eps / Rational::from_integer(12.into());
        let last = crate::exact::floor_ratio(&(Rational::one() / &step));
        let mut out = Vec::new();
        let mut k = num_bigint::BigInt::zero();
        while k <= last {
            let lo = Rational::from_integer(&k - 1) * &step;
            let hi = Rational::from_integer(&k + 1) * &step;
            out.push(Interval { lo, hi });
            k += 1;
        }
        Ok(out)
    }

    /// Components of the ambient points.
    pub fn components(&self) -> usize {
        self.components
    }

    /// Coordinate labels.
    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    /// Members, one interval per coordinate.
    pub fn members(&self) -> &[Vec<Interval>] {
        &self.members
    }

    /// Coordinates that some member actually constrains.
    pub fn constrained_coords(&self) -> Vec<Coord> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(k, _)| self.members.iter().any(|m| !m[*k].is_full()))
            .map(|(_, c)| *c)
            .collect()
    }

    fn has_whole_member(&self) -> bool {
        self.members.iter().any(|m| m.iter().all(Interval::is_full))
    }

    /// One representative per cell of the endpoint arrangement on each axis,
    /// with the members containing it.
    fn arrangement(&self) -> Vec<Vec<Vec<bool>>> {
        (0..self.coords.len())
            .map(|k| {
                let mut cuts: BTreeSet<Rational> = BTreeSet::new();
                cuts.insert(Rational::zero());
                cuts.insert(Rational::one());
                for m in &self.members {
                    for x in [&m[k].lo, &m[k].hi] {
                        if !x.is_negative() && *x <= Rational::one() {
                            cuts.insert(x.clone());
                        }
                    }
                }
                let cuts: Vec<Rational> = cuts.into_iter().collect();
                let mut reps = Vec::new();
                for (t, x) in cuts.iter().enumerate() {
                    reps.push(x.clone());
                    if let Some(y) = cuts.get(t + 1) {
                        reps.push((x + y) / Rational::from_integer(2.into()));
                    }
                }
                reps.iter()
                    .map(|x| self.members.iter().map(|m| m[k].contains(x)).collect())
                    .collect()
            })
            .collect()
    }

    fn covers_ambient(&self) -> bool {
        fn sweep(cells: &[Vec<Vec<bool>>], members: &[Vec<Interval>], k: usize, active: &[usize]) -> bool {
            if active.is_empty() {
                return false;
            }
            if k == cells.len() || active.iter().any(|&u| members[u][k..].iter().all(Interval::is_full)) {
                return true;
            }
            cells[k].iter().all(|row| {
                let next: Vec<usize> = active.iter().copied().filter(|&u| row[u]).collect();
                sweep(cells, members, k + 1, &next)
            })
        }
        let all: Vec<usize> = (0..self.members.len()).collect();
        sweep(&self.arrangement(), &self.members, 0, &all)
    }

    /// `ord`: the largest number of members sharing a point.
    pub fn ord(&self) -> usize {
        fn sweep(cells: &[Vec<Vec<bool>>], k: usize, active: &[usize], best: &mut usize) {
            if active.len() <= *best {
                return;
            }
            if k == cells.len() {
                *best = active.len();
                return;
            }
            for row in &cells[k] {
                let next: Vec<usize> = active.iter().copied().filter(|&u| row[u]).collect();
                sweep(cells, k + 1, &next, best);
            }
        }
        let all: Vec<usize> = (0..self.members.len()).collect();
        let mut best = 0;
        sweep(&self.arrangement(), 0, &all, &mut best);
        best
    }

    /// Sup-metric mesh: the largest clamped side of any member.
    pub fn mesh_sup(&self) -> Rational {
        let widest = self
            .members
            .iter()
            .flat_map(|m| m.iter().map(Interval::clamped_len))
            .max()
            .unwrap_or_else(Rational::zero);
        if self.coords.is_empty() {
            Rational::one()
        } else {
            widest
        }
    }

    /// Mesh under `d_n^a`: for each member, the supremum over levels and
    /// times of `sum_p 2^-|p - centre| max_c side(p, c)`, with side 1 on
    /// every coordinate the member leaves free.
    pub fn mesh_bowen(&self, tower: &Tower, n: u64) -> Result<Rational> {
        let visible = tower.visible_components()?;
        if visible[0] != self.components {
            return Err(Error::InvalidCover("component count differs from the tower".into()));
        }
        let steps = tower.cube_steps()?;
        let windows = tower.windows(n);
        let three = Rational::from_integer(3.into());
        let mut mesh = Rational::zero();
        for member in &self.members {
            for ((&comps, &len), &step) in visible.iter().zip(&windows).zip(&steps) {
                // Largest side per position; positions with side 1 add nothing.
                let mut side: alloc::collections::BTreeMap<i64, Option<Rational>> = Default::default();
                for (k, &(m, c)) in self.coords.iter().enumerate() {
                    if c >= comps {
                        continue;
                    }
                    let len = member[k].clamped_len();
                    let entry = side.entry(m).or_insert(Some(Rational::zero()));
                    if let Some(s) = entry {
                        if len > *s {
                            *s = len;
                        }
                    }
                }
                // A position with a free visible component has side 1.
                for (&m, s) in side.iter_mut() {
                    let listed = self.coords.iter().filter(|(p, c)| *p == m && *c < comps).count();
                    if listed < comps {
                        *s = None;
                    }
                }
                let last = if step == 0 { 0 } else { len as i64 - 1 };
                for j in 0..=last {
                    let centre = j * step;
                    let mut total = three.clone();
                    for (&m, s) in &side {
                        if let Some(s) = s {
                            total -= dyadic(-((m - centre).unsigned_abs() as i64)) * (Rational::one() - s);
                        }
                    }
                    if total > mesh {
                        mesh = total;
                    }
                }
            }
        }
        Ok(mesh)
    }

    /// Member boxes restated on `coords` (free coordinates become full).
    fn relabel(&self, coords: &[Coord]) -> Vec<Vec<Interval>> {
        self.members
            .iter()
            .map(|m| {
                coords
                    .iter()
                    .map(|c| match self.coords.iter().position(|x| x == c) {
                        Some(k) => m[k].clone(),
                        None => Interval::full(),
                    })
                    .collect()
            })
            .collect()
    }

    /// `self ∨ other`: all nonempty pairwise intersections.
    pub fn join(&self, other: &BoxCover) -> Result<BoxCover> {
        if self.components != other.components {
            return Err(Error::InvalidCover("joined covers live on different ambients".into()));
        }
        let coords: Vec<Coord> =
            self.coords.iter().chain(&other.coords).copied().collect::<BTreeSet<_>>().into_iter().collect();
        let a = self.relabel(&coords);
        let b = other.relabel(&coords);
        let mut members = Vec::new();
        for u in &a {
            for v in &b {
                let w: Vec<Interval> = u.iter().zip(v).map(|(x, y)| x.intersect(y)).collect();
                if !w.iter().any(Interval::is_empty) {
                    members.push(w);
                }
            }
        }
        Ok(BoxCover { components: self.components, coords, members })
    }

    /// `T^-j τ^-1 α` for a cover `α` of level `level` (1-based): coordinates
    /// `(m, c)` move to `(m + j, c)` on level 1 (or stay put for stationary
    /// dynamics).
    pub fn pullback_shift(&self, tower: &Tower, level: usize, j: u64) -> Result<BoxCover> {
        let visible = tower.visible_components()?;
        let steps = tower.cube_steps()?;
        if level == 0 || level > visible.len() {
            return Err(Error::OutOfRange(format!("level {level} outside 1..={}", visible.len())));
        }
        if self.components != visible[level - 1] {
            return Err(Error::InvalidCover(format!(
                "cover has {} components, level {level} has {}",
                self.components,
                visible[level - 1]
            )));
        }
        let shift = steps[0] * j as i64;
        let coords = self.coords.iter().map(|&(m, c)| (m + shift, c)).collect();
        Ok(BoxCover { components: visible[0], coords, members: self.members.clone() })
    }
}

/// Certified bracket on `D(α)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DBounds {
    /// Lower bound.
    pub lower: usize,
    /// Upper bound.
    pub upper: usize,
    /// The lower bound is the trivial 1 (no face criterion applied).
    pub weak_lower: bool,
    /// Brick side of the refinement behind `upper`, if one was used.
    pub brick_side: Option<Rational>,
}

impl DBounds {
    /// Whether the bracket pins `D` down.
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Largest number of bricks tried for an explicit refinement.
const MAX_BRICKS: usize = 1 << 16;

/// Brackets `D(α) = min over refinements of ord`.
///
/// Lower: 1 if a member is the whole cube; otherwise `|S| + 1`, where `S`
/// are the axes no member crosses from face to face (every refinement keeps
/// that property on the face `x_c = 0, c ∉ S`, and the Lebesgue covering
/// theorem applies). Upper: `ord(α)`, improved to `D + 1` when a brick
/// refinement below the arrangement's smallest gap is certified.
pub fn d_bounds(cover: &BoxCover) -> DBounds {
    let dims = cover.coords.len();
    let ord = cover.ord();
    if cover.has_whole_member() {
        return DBounds { lower: 1, upper: 1, weak_lower: false, brick_side: None };
    }
    let uncrossed = (0..dims)
        .filter(|&k| cover.members.iter().all(|m| !m[k].is_full()))
        .count();
    let (lower, weak_lower) = if uncrossed == 0 { (1, true) } else { (uncrossed + 1, false) };
    let mut upper = ord;
    let mut brick_side = None;
    if dims + 1 < ord {
        if let Some(side) = brick_refinement(cover) {
            upper = dims + 1;
            brick_side = Some(side);
        }
    }
    DBounds { lower, upper: upper.max(lower), weak_lower, brick_side }
}

/// Bricks of side `h` with row `t` along axis `k` offset by half a brick
/// according to the parity of the higher axes, each widened by `h/8`.
fn bricks(dims: usize, h: &Rational, count: i64) -> Vec<Vec<Interval>> {
    let half = h / Rational::from_integer(2.into());
    let pad = h / Rational::from_integer(8.into());
    let mut out = Vec::new();
    let mut index = vec![-1i64; dims];
    loop {
        let mut brick = Vec::with_capacity(dims);
        for k in 0..dims {
            let parity: i64 = index[k + 1..].iter().sum::<i64>().rem_euclid(2);
            let start = Rational::from_integer(index[k].into()) * h + &half * Rational::from_integer(parity.into());
            brick.push(Interval { lo: &start - &pad, hi: start + h + &pad });
        }
        if !brick.iter().any(Interval::is_empty) {
            out.push(brick);
        }
        let mut k = 0;
        loop {
            if k == dims {
                return out;
            }
            index[k] += 1;
            if index[k] <= count {
                break;
            }
            index[k] = -1;
            k += 1;
        }
    }
}

/// Finds a brick refinement of `cover` with `ord <= D + 1`; returns the
/// brick side. The brick pattern's `ord` is checked by sweeping a patch of
/// the same periodic pattern; refinement is checked brick by brick.
fn brick_refinement(cover: &BoxCover) -> Option<Rational> {
    let dims = cover.coords.len();
    if dims == 0 || dims > 2 {
        return None;
    }
    let mut cuts: BTreeSet<Rational> = BTreeSet::new();
    for m in &cover.members {
        for iv in m {
            for x in [&iv.lo, &iv.hi] {
                cuts.insert(x.clone());
            }
        }
    }
    cuts.insert(Rational::zero());
    cuts.insert(Rational::one());
    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let gap = cuts.windows(2).map(|w| &w[1] - &w[0]).min()?;
    // A widened brick spans 5h/4 < gap, so it meets at most one cut per axis.
    let count = ceil_ratio(&(Rational::from_integer(4.into()) / &gap));
    let count: i64 = count.try_into().ok()?;
    if (count as usize + 2).checked_pow(dims as u32)? > MAX_BRICKS {
        return None;
    }
    let h = Rational::one() / Rational::from_integer(count.into());

    let patch = BoxCover {
        components: 1,
        coords: (0..dims).map(|k| (k as i64, 0)).collect(),
        members: bricks(dims, &Rational::new(1.into(), 6.into()), 6),
    };
    if patch.ord() > dims + 1 {
        return None;
    }
    for brick in bricks(dims, &h, count) {
        let inside = cover.members.iter().any(|m| brick.iter().zip(m).all(|(b, u)| b.inside(u)));
        if !inside {
            return None;
        }
    }
    Some(h)
}

/// Per-`n` row of [`mdim_upper_estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct JoinRow {
    /// Time.
    pub n: u64,
    /// Coordinates constrained by the weighted join.
    pub effective_dim: usize,
    /// Upper bound on `D` of the weighted join.
    pub d_upper: usize,
    /// `d_upper / n`.
    pub ratio: f64,
}

/// Sequence `D_upper(n) / n` for the weighted join of the given covers and
/// its `1/n`-extrapolated trend.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinEstimate {
    /// One row per `n`.
    pub rows: Vec<JoinRow>,
    /// Intercept of the least-squares fit `D/n ≈ a + b/n`; equals the last
    /// ratio when only one `n` is given.
    pub trend: f64,
}

/// Default cap on the join's effective dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 24;

/// Upper estimate of the weighted mean dimension restricted to the given
/// covers `α_1..α_k` (one per level, each on that level's coordinates).
///
/// The weighted join `⋁_i ⋁_{j < L_i} T^-j τ^-1 α_i` is a cylinder cover
/// over the coordinates its generators constrain, so `D` of the join is at
/// most that dimension plus one, and 1 when nothing is constrained. The
/// join is never materialised.
pub fn mdim_upper_estimate(
    tower: &Tower,
    covers: &[BoxCover],
    n_list: &[u64],
    cap: usize,
) -> Result<JoinEstimate> {
    if covers.len() != tower.depth() {
        return Err(Error::InvalidCover(format!(
            "{} covers for a tower of depth {}",
            covers.len(),
            tower.depth()
        )));
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::OutOfRange("n list must be nonempty and positive".into()));
    }
    let step = tower.cube_steps()?[0];
    let mut rows = Vec::new();
    for &n in n_list {
        let windows = tower.windows(n);
        let mut coords: BTreeSet<Coord> = BTreeSet::new();
        for (i, (cover, &len)) in covers.iter().zip(&windows).enumerate() {
            let constrained = cover.constrained_coords();
            if constrained.is_empty() {
                continue;
            }
            // Checks the level/arity pairing once; the shift is then pure arithmetic.
            cover.pullback_shift(tower, i + 1, 0)?;
            for j in 0..len as i64 {
                coords.extend(constrained.iter().map(|&(m, c)| (m + step * j, c)));
            }
        }
        let dim = coords.len();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        let d_upper = if dim == 0 { 1 } else { dim + 1 };
        rows.push(JoinRow { n, effective_dim: dim, d_upper, ratio: d_upper as f64 / n as f64 });
    }
    let trend = inverse_n_intercept(&rows.iter().map(|r| (r.n, r.ratio)).collect::<Vec<_>>());
    Ok(JoinEstimate { rows, trend })
}

/// Intercept `a` of the least-squares fit `y ≈ a + b/n`.
pub(crate) fn inverse_n_intercept(points: &[(u64, f64)]) -> f64 {
    if points.len() < 2 {
        return points.last().map_or(0.0, |p| p.1);
    }
    let len = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| 1.0 / p.0 as f64).collect();
    let mx = xs.iter().sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return my;
    }
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    my - sxy / sxx * mx
}

/// Explicit weighted join for small cases; refuses above `cap` members.
pub fn weighted_join(tower: &Tower, covers: &[BoxCover], n: u64, cap: usize) -> Result<BoxCover> {
    if covers.len() != tower.depth() {
        return Err(Error::InvalidCover("one cover per level is required".into()));
    }
    let components = tower.visible_components()?[0];
    let mut join = BoxCover::trivial(components);
    for (i, (cover, &len)) in covers.iter().zip(&tower.windows(n)).enumerate() {
        for j in 0..len {
            join = join.join(&cover.pullback_shift(tower, i + 1, j)?)?;
            if join.members.len() > cap {
                return Err(Error::DimensionCap { dim: join.members.len(), cap });
            }
        }
    }
    Ok(join)
}

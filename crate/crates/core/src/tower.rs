//! Factor towers: levels, forgetful factor maps and weight vectors.
//!
//! Only two families of levels exist: two-sided subshifts over a finite
//! alphabet (full shifts or SFTs given by a 0/1 transition matrix) and cube
//! shifts `([0,1]^d)^Z`. Factor maps are 1-block: a map on the alphabet for
//! symbolic levels, or "keep the first `d'` components" for cube levels.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact::{ceil_ratio, dyadic, Rational};
use crate::{Error, Result};

/// Weights `(a_1, ..., a_k)` with `a_1 > 0` and `a_i >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    entries: Vec<Rational>,
}

impl WeightVector {
    /// Checks the sign conditions and builds the vector.
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::InvalidWeights("empty weight vector".into()))?;
        if !first.is_positive() {
            return Err(Error::InvalidWeights(format!("a_1 = {first} must be > 0")));
        }
        if let Some((i, a)) = entries.iter().enumerate().find(|(_, a)| a.is_negative()) {
            return Err(Error::InvalidWeights(format!("a_{} = {a} must be >= 0", i + 1)));
        }
        Ok(WeightVector { entries })
    }

    /// Weights from integers, mostly for tests: `from_ints(&[1, 1])`.
    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    /// Number of levels `k`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Always false: a weight vector has at least one entry.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The weights.
    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Partial sums `A_i = a_1 + ... + a_i`.
    pub fn partial_sums(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        self.entries
            .iter()
            .map(|a| {
                acc += a;
                acc.clone()
            })
            .collect()
    }
}

/// Observation windows `L_i = ceil(A_i * n)` for every level.
///
/// Computed in exact rational arithmetic, so `A_i * n` landing exactly on
/// an integer never rounds up by one.
pub fn window_lengths(weights: &WeightVector, n: u64) -> Vec<u64> {
    let n = Rational::from_integer(n.into());
    weights
        .partial_sums()
        .iter()
        .map(|a| {
            ceil_ratio(&(a * &n))
                .to_u64()
                .expect("window length exceeds u64")
        })
        .collect()
}

/// Two-sided subshift over `{0, ..., alphabet-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSystem {
    alphabet: usize,
    transitions: Option<Vec<Vec<bool>>>,
}

impl SymbolicSystem {
    /// Full shift.
    pub fn full(alphabet: usize) -> Self {
        SymbolicSystem { alphabet, transitions: None }
    }

    /// Subshift of finite type given by a square 0/1 matrix (`true` = allowed).
    pub fn sft(transitions: Vec<Vec<bool>>) -> Self {
        SymbolicSystem { alphabet: transitions.len(), transitions: Some(transitions) }
    }

    /// Golden-mean shift: binary sequences without two consecutive 1s.
    pub fn golden_mean() -> Self {
        Self::sft(vec![vec![true, true], vec![true, false]])
    }

    /// Alphabet size.
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Transition matrix, `None` for a full shift.
    pub fn transitions(&self) -> Option<&[Vec<bool>]> {
        self.transitions.as_deref()
    }

    /// Whether `a` may be followed by `b`.
    pub fn allowed(&self, a: usize, b: usize) -> bool {
        match &self.transitions {
            None => a < self.alphabet && b < self.alphabet,
            Some(m) => m.get(a).and_then(|row| row.get(b)).copied().unwrap_or(false),
        }
    }

    /// Whether this is a full shift (no forbidden transitions).
    pub fn is_full(&self) -> bool {
        (0..self.alphabet).all(|a| (0..self.alphabet).all(|b| self.allowed(a, b)))
    }

    /// All admissible words of length `len`, in lexicographic order.
    pub fn words(&self, len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if len == 0 {
            out.push(Vec::new());
            return out;
        }
        let mut word = Vec::with_capacity(len);
        self.extend_words(len, &mut word, &mut out);
        out
    }

    fn extend_words(&self, len: usize, word: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if word.len() == len {
            out.push(word.clone());
            return;
        }
        for s in 0..self.alphabet {
            if word.last().is_none_or(|&p| self.allowed(p, s)) {
                word.push(s);
                self.extend_words(len, word, out);
                word.pop();
            }
        }
    }
}

/// Cube shift `([0,1]^d)^Z` with metric `sum_m 2^-|m| max_c |x_{m,c} - y_{m,c}|`.
///
/// `stationary` replaces the shift by the identity map; it models
/// finite-dimensional systems where every iterate sees the same coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubeSystem {
    /// Number of components `d` per coordinate.
    pub components: usize,
    /// Identity dynamics instead of the shift.
    pub stationary: bool,
}

impl CubeSystem {
    /// Shift on `([0,1]^d)^Z`.
    pub fn shift(components: usize) -> Self {
        CubeSystem { components, stationary: false }
    }

    /// Identity map on `([0,1]^d)^Z`.
    pub fn stationary(components: usize) -> Self {
        CubeSystem { components, stationary: true }
    }

    /// Weight `2^-|m|` of coordinate `m` in the level metric.
    pub fn coordinate_weight(m: i64) -> Rational {
        dyadic(-(m.unsigned_abs() as i64))
    }

    /// Time step of the dynamics in coordinates: 1 for the shift, 0 for identity.
    pub fn step(&self) -> i64 {
        if self.stationary {
            0
        } else {
            1
        }
    }
}

/// One level of a tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Level {
    /// Subshift level.
    Symbolic(SymbolicSystem),
    /// Cube-shift level.
    Cube(CubeSystem),
}

/// 1-block factor map between adjacent levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForgetfulFactor {
    /// Cube levels: keep components `0..keep`.
    Project {
        /// Number of leading components kept.
        keep: usize,
    },
    /// Symbolic levels: symbol `s` maps to `map[s]`.
    Merge {
        /// Image of every source symbol.
        map: Vec<usize>,
    },
}

/// Which family a tower belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TowerKind {
    /// All levels symbolic.
    Symbolic,
    /// All levels cube shifts.
    Cube,
    /// Mixed levels (rejected by validation).
    Mixed,
}

/// `k` levels, `k-1` factor maps and `k` weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    /// Levels `X_1, ..., X_k`.
    pub levels: Vec<Level>,
    /// Factor maps `pi_1, ..., pi_{k-1}`.
    pub factors: Vec<ForgetfulFactor>,
    /// Weight vector.
    pub weights: WeightVector,
}

impl Tower {
    /// Assembles a tower without checking it; see [`validate_tower`].
    pub fn new(levels: Vec<Level>, factors: Vec<ForgetfulFactor>, weights: WeightVector) -> Self {
        Tower { levels, factors, weights }
    }

    /// Number of levels.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Family of the tower.
    pub fn kind(&self) -> TowerKind {
        let symbolic = self.levels.iter().filter(|l| matches!(l, Level::Symbolic(_))).count();
        if symbolic == self.levels.len() {
            TowerKind::Symbolic
        } else if symbolic == 0 {
            TowerKind::Cube
        } else {
            TowerKind::Mixed
        }
    }

    /// Observation windows at time `n`.
    pub fn windows(&self, n: u64) -> Vec<u64> {
        window_lengths(&self.weights, n)
    }

    /// Level-1 system of a symbolic tower.
    pub fn base_symbolic(&self) -> Result<&SymbolicSystem> {
        match self.levels.first() {
            Some(Level::Symbolic(s)) if self.kind() == TowerKind::Symbolic => Ok(s),
            _ => Err(Error::KindMismatch("expected a symbolic tower".into())),
        }
    }

    /// Level-1 system of a cube tower.
    pub fn base_cube(&self) -> Result<CubeSystem> {
        match self.levels.first() {
            Some(Level::Cube(c)) if self.kind() == TowerKind::Cube => Ok(*c),
            _ => Err(Error::KindMismatch("expected a cube tower".into())),
        }
    }

    /// For a symbolic tower, the composite maps `tau_{i-1}` on the level-1
    /// alphabet: entry `i` sends a level-1 symbol to its level-`i+1` image.
    pub fn symbol_maps(&self) -> Result<Vec<Vec<usize>>> {
        let base = self.base_symbolic()?;
        let mut current: Vec<usize> = (0..base.alphabet()).collect();
        let mut maps = vec![current.clone()];
        for (i, factor) in self.factors.iter().enumerate() {
            let ForgetfulFactor::Merge { map } = factor else {
                return Err(Error::KindMismatch(format!(
                    "factor {} is a projection inside a symbolic tower",
                    i + 1
                )));
            };
            current = current
                .iter()
                .map(|&s| {
                    map.get(s).copied().ok_or_else(|| {
                        Error::KindMismatch(format!("factor {} does not map symbol {s}", i + 1))
                    })
                })
                .collect::<Result<_>>()?;
            maps.push(current.clone());
        }
        Ok(maps)
    }

    /// For a cube tower, how many leading components each level sees.
    pub fn visible_components(&self) -> Result<Vec<usize>> {
        let base = self.base_cube()?;
        let mut visible = vec![base.components];
        let mut current = base.components;
        for factor in &self.factors {
            match factor {
                ForgetfulFactor::Project { keep } => {
                    current = current.min(*keep);
                    visible.push(current);
                }
                ForgetfulFactor::Merge { .. } => {
                    return Err(Error::KindMismatch("symbol map inside a cube tower".into()))
                }
            }
        }
        Ok(visible)
    }

    /// Stationary flag of every cube level.
    pub(crate) fn cube_steps(&self) -> Result<Vec<i64>> {
        self.levels
            .iter()
            .map(|l| match l {
                Level::Cube(c) => Ok(c.step()),
                Level::Symbolic(_) => Err(Error::KindMismatch("expected a cube tower".into())),
            })
            .collect()
    }

    /// The tower of `T^m`: every symbolic level is recoded to `m`-blocks and
    /// the factor maps act blockwise. Weights are unchanged.
    pub fn power(&self, m: usize) -> Result<Tower> {
        if m == 0 {
            return Err(Error::OutOfRange("power m must be >= 1".into()));
        }
        self.base_symbolic()?;
        let systems: Vec<&SymbolicSystem> = self
            .levels
            .iter()
            .map(|l| match l {
                Level::Symbolic(s) => s,
                Level::Cube(_) => unreachable!("kind checked above"),
            })
            .collect();
        let words: Vec<Vec<Vec<usize>>> = systems.iter().map(|s| s.words(m)).collect();
        let index: Vec<BTreeMap<&[usize], usize>> = words
            .iter()
            .map(|ws| ws.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect())
            .collect();

        let levels = systems
            .iter()
            .zip(&words)
            .map(|(sys, ws)| {
                let matrix = ws
                    .iter()
                    .map(|u| ws.iter().map(|v| sys.allowed(u[m - 1], v[0])).collect())
                    .collect();
                Level::Symbolic(SymbolicSystem::sft(matrix))
            })
            .collect();

        let mut factors = Vec::with_capacity(self.factors.len());
        for (i, factor) in self.factors.iter().enumerate() {
            let ForgetfulFactor::Merge { map } = factor else {
                return Err(Error::KindMismatch("projection inside a symbolic tower".into()));
            };
            let block_map = words[i]
                .iter()
                .map(|w| {
                    let image: Vec<usize> = w.iter().map(|&s| map.get(s).copied().unwrap_or(usize::MAX)).collect();
                    index[i + 1].get(image.as_slice()).copied().ok_or_else(|| {
                        Error::KindMismatch(format!(
                            "factor {} sends an admissible block outside the target",
                            i + 1
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            factors.push(ForgetfulFactor::Merge { map: block_map });
        }
        Ok(Tower::new(levels, factors, self.weights.clone()))
    }
}

/// Where a violation was found. Indices are 1-based like `X_1, pi_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    /// The tower as a whole.
    Tower,
    /// Level `X_i`.
    Level(usize),
    /// Factor map `pi_i`.
    Factor(usize),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Tower => f.write_str("tower"),
            Site::Level(i) => write!(f, "level {i}"),
            Site::Factor(i) => write!(f, "factor {i}"),
        }
    }
}

/// A broken structural invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Location.
    pub site: Site,
    /// Human-readable description.
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.site, self.message)
    }
}

/// Outcome of [`validate_tower`]: violations plus informational notes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Broken invariants; empty means the tower is valid.
    pub violations: Vec<Violation>,
    /// Notes that do not invalidate the tower (e.g. a single-level tower).
    pub notes: Vec<String>,
}

impl ValidationReport {
    /// No violations.
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, site: Site, message: String) {
        self.violations.push(Violation { site, message });
    }
}

/// Checks arities, level well-formedness and that every factor map commutes
/// with the shifts. Violations are returned as data.
pub fn validate_tower(tower: &Tower) -> ValidationReport {
    let mut report = ValidationReport::default();
    let k = tower.levels.len();
    if k == 0 {
        report.push(Site::Tower, "tower has no levels".into());
        return report;
    }
    if k == 1 {
        report.notes.push("extension: single-level tower (k = 1)".into());
    }
    if tower.factors.len() + 1 != k {
        report.push(
            Site::Tower,
            format!("{} levels need {} factors, found {}", k, k - 1, tower.factors.len()),
        );
    }
    if tower.weights.len() != k {
        report.push(
            Site::Tower,
            format!("{} levels need {} weights, found {}", k, k, tower.weights.len()),
        );
    }
    if tower.kind() == TowerKind::Mixed {
        report.push(Site::Tower, "mixed symbolic and cube levels are not supported".into());
    }

    for (i, level) in tower.levels.iter().enumerate() {
        let site = Site::Level(i + 1);
        match level {
            Level::Symbolic(s) => {
                if s.alphabet == 0 {
                    report.push(site, "empty alphabet".into());
                }
                if let Some(m) = &s.transitions {
                    if m.iter().any(|row| row.len() != s.alphabet) {
                        report.push(site, "transition matrix is not square".into());
                        continue;
                    }
                    for a in 0..s.alphabet {
                        if !(0..s.alphabet).any(|b| m[a][b]) {
                            report.push(site, format!("symbol {a} has no successor"));
                        }
                        if !(0..s.alphabet).any(|b| m[b][a]) {
                            report.push(site, format!("symbol {a} has no predecessor"));
                        }
                    }
                }
            }
            Level::Cube(c) => {
                if c.components == 0 {
                    report.push(site, "cube level needs at least one component".into());
                }
            }
        }
    }

    for (i, factor) in tower.factors.iter().enumerate() {
        let (Some(source), Some(target)) = (tower.levels.get(i), tower.levels.get(i + 1)) else {
            continue;
        };
        let site = Site::Factor(i + 1);
        match (factor, source, target) {
            (ForgetfulFactor::Project { keep }, Level::Cube(src), Level::Cube(dst)) => {
                if *keep == 0 || *keep > src.components {
                    report.push(
                        site,
                        format!("keeps {keep} of {} components", src.components),
                    );
                }
                if *keep != dst.components {
                    report.push(
                        site,
                        format!("keeps {keep} components but target has {}", dst.components),
                    );
                }
                if src.stationary != dst.stationary {
                    report.push(site, "projection does not commute: dynamics differ".into());
                }
            }
            (ForgetfulFactor::Merge { map }, Level::Symbolic(src), Level::Symbolic(dst)) => {
                if map.len() != src.alphabet {
                    report.push(
                        site,
                        format!("map has {} entries for alphabet {}", map.len(), src.alphabet),
                    );
                    continue;
                }
                if let Some((s, t)) = map.iter().enumerate().find(|(_, &t)| t >= dst.alphabet) {
                    report.push(site, format!("symbol {s} maps to {t}, outside target alphabet"));
                    continue;
                }
                let mut hit = vec![false; dst.alphabet];
                for &t in map {
                    hit[t] = true;
                }
                if let Some(t) = hit.iter().position(|h| !h) {
                    report.push(site, format!("not surjective: target symbol {t} has no preimage"));
                }
                for a in 0..src.alphabet {
                    for b in 0..src.alphabet {
                        if src.allowed(a, b) && !dst.allowed(map[a], map[b]) {
                            report.push(
                                site,
                                format!("transition {}→{} not allowed in target", map[a], map[b]),
                            );
                        }
                    }
                }
            }
            _ => report.push(site, "factor kind does not match adjacent levels".into()),
        }
    }
    report.violations.dedup();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_ratio;

    fn weights(list: &[&str]) -> WeightVector {
        WeightVector::new(list.iter().map(|s| parse_ratio(s).unwrap()).collect()).unwrap()
    }

    fn identity_tower() -> Tower {
        Tower::new(
            vec![
                Level::Symbolic(SymbolicSystem::full(2)),
                Level::Symbolic(SymbolicSystem::full(2)),
            ],
            vec![ForgetfulFactor::Merge { map: vec![0, 1] }],
            WeightVector::from_ints(&[1, 1]).unwrap(),
        )
    }

    #[test]
    fn identity_tower_is_valid() {
        assert!(validate_tower(&identity_tower()).is_ok());
    }

    #[test]
    fn full_shift_into_golden_mean_is_rejected() {
        let tower = Tower::new(
            vec![
                Level::Symbolic(SymbolicSystem::full(2)),
                Level::Symbolic(SymbolicSystem::golden_mean()),
            ],
            vec![ForgetfulFactor::Merge { map: vec![0, 1] }],
            WeightVector::from_ints(&[1, 1]).unwrap(),
        );
        let report = validate_tower(&tower);
        assert!(!report.is_ok());
        assert_eq!(report.violations[0].site, Site::Factor(1));
        assert!(report.violations[0].message.contains("transition 1→1 not allowed in target"));
    }

    #[test]
    fn cube_projection_tower_is_valid() {
        let tower = Tower::new(
            vec![Level::Cube(CubeSystem::shift(2)), Level::Cube(CubeSystem::shift(1))],
            vec![ForgetfulFactor::Project { keep: 1 }],
            WeightVector::from_ints(&[1, 1]).unwrap(),
        );
        assert!(validate_tower(&tower).is_ok());
        assert_eq!(tower.visible_components().unwrap(), vec![2, 1]);
    }

    #[test]
    fn structural_violations_are_named() {
        let mixed = Tower::new(
            vec![Level::Cube(CubeSystem::shift(2)), Level::Symbolic(SymbolicSystem::full(2))],
            vec![ForgetfulFactor::Project { keep: 1 }],
            WeightVector::from_ints(&[1]).unwrap(),
        );
        let report = validate_tower(&mixed);
        let text: Vec<String> = report.violations.iter().map(|v| format!("{v}")).collect();
        assert!(text.iter().any(|t| t.contains("need 2 weights")));
        assert!(text.iter().any(|t| t.contains("mixed")));
        assert!(text.iter().any(|t| t.starts_with("factor 1")));

        let dead_end = Tower::new(
            vec![Level::Symbolic(SymbolicSystem::sft(vec![vec![true, true], vec![false, false]]))],
            vec![],
            WeightVector::from_ints(&[1]).unwrap(),
        );
        let report = validate_tower(&dead_end);
        assert!(report.violations.iter().any(|v| v.message.contains("no successor")));
        assert_eq!(report.notes.len(), 1);
    }

    #[test]
    fn bad_weights_are_refused() {
        assert!(WeightVector::from_ints(&[0, 1]).is_err());
        assert!(WeightVector::from_ints(&[1, -1]).is_err());
        assert!(WeightVector::new(vec![]).is_err());
    }

    #[test]
    fn window_examples() {
        assert_eq!(window_lengths(&weights(&["1", "1"]), 3), vec![3, 6]);
        assert_eq!(window_lengths(&weights(&["1", "1/2"]), 3), vec![3, 5]);
        assert_eq!(window_lengths(&weights(&["1", "0"]), 4), vec![4, 4]);
        // A_i * n exactly integral must not round up.
        assert_eq!(window_lengths(&weights(&["1/3", "2/3"]), 3), vec![1, 3]);
    }

    #[test]
    fn coordinate_weights_sum_towards_three() {
        let total: Rational = (-40..=40).map(CubeSystem::coordinate_weight).sum();
        assert_eq!(total, Rational::from_integer(3.into()) - dyadic(-39));
    }

    #[test]
    fn power_recodes_blocks() {
        let tower = Tower::new(
            vec![
                Level::Symbolic(SymbolicSystem::golden_mean()),
                Level::Symbolic(SymbolicSystem::full(1)),
            ],
            vec![ForgetfulFactor::Merge { map: vec![0, 0] }],
            WeightVector::from_ints(&[1, 1]).unwrap(),
        );
        let squared = tower.power(2).unwrap();
        assert!(validate_tower(&squared).is_ok());
        let Level::Symbolic(base) = &squared.levels[0] else { panic!() };
        // Admissible 2-blocks: 00, 01, 10.
        assert_eq!(base.alphabet(), 3);
        assert!(!base.allowed(1, 2)); // 01 then 10 would contain 11
        assert!(tower.power(0).is_err());
    }

    #[test]
    fn symbol_maps_compose() {
        let tower = Tower::new(
            vec![
                Level::Symbolic(SymbolicSystem::full(4)),
                Level::Symbolic(SymbolicSystem::full(2)),
                Level::Symbolic(SymbolicSystem::full(1)),
            ],
            vec![
                ForgetfulFactor::Merge { map: vec![0, 0, 1, 1] },
                ForgetfulFactor::Merge { map: vec![0, 0] },
            ],
            WeightVector::from_ints(&[1, 1, 1]).unwrap(),
        );
        let maps = tower.symbol_maps().unwrap();
        assert_eq!(maps, vec![vec![0, 1, 2, 3], vec![0, 0, 1, 1], vec![0, 0, 0, 0]]);
    }
}

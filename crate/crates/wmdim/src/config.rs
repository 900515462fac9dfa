//! JSON input files.
//!
//! One config file carries the tower and, optionally, command parameters
//! and command-specific inputs (points, covers, graph). Rationals are
//! strings `"p/q"` or integers.

use std::path::Path;

use serde::Deserialize;
use wmdim_core::covers::{BoxCover, Coord, Interval};
use wmdim_core::ocap::SftGraph;
use wmdim_core::tower::{CubeSystem, ForgetfulFactor, Level, SymbolicSystem, Tower, WeightVector};
use wmdim_core::wmetric::{PointWindow, Tail};
use wmdim_core::{parse_ratio, Rational};

use crate::error::{CliError, CliResult};

/// Top-level config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// The tower.
    pub tower: Option<TowerSpec>,
    /// Times, strictly increasing.
    pub n: Option<Vec<u64>>,
    /// Scales as `"p/q"`, strictly decreasing.
    pub eps: Option<Vec<String>>,
    /// `faithful` or `tight`.
    pub mode: Option<String>,
    /// Seed for sampled certification.
    pub seed: Option<u64>,
    /// Sampled same-cell pairs per cover cell.
    pub samples: Option<usize>,
    /// Exact/greedy switch for finite instances: `exact` or `greedy`.
    pub search: Option<String>,
    /// Power `m` for the power-rule probe.
    pub power: Option<u64>,
    /// Cap on the weighted join's dimension.
    pub dimension_cap: Option<usize>,
    /// Points for `distance` and `count`.
    pub points: Option<Vec<PointSpec>>,
    /// Covers for `cover-bounds`, one per level when a tower is given.
    pub covers: Option<Vec<CoverSpec>>,
    /// Graph for `ocap`.
    pub graph: Option<GraphSpec>,
}

/// Tower description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    /// Levels `X_1 .. X_k`.
    pub levels: Vec<LevelSpec>,
    /// Factor maps `pi_1 .. pi_{k-1}`.
    #[serde(default)]
    pub factors: Vec<FactorSpec>,
    /// Weights `a_1 .. a_k`.
    pub weights: Vec<RationalText>,
}

/// One level.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LevelSpec {
    /// Full shift.
    Full {
        /// Alphabet size.
        alphabet: usize,
    },
    /// Subshift of finite type.
    Sft {
        /// 0/1 transition matrix.
        transitions: Vec<Vec<u8>>,
    },
    /// Cube shift `([0,1]^d)^Z`.
    Cube {
        /// Number of components.
        components: usize,
        /// `shift` (default) or `identity`.
        #[serde(default)]
        dynamics: Dynamics,
    },
}

/// Cube dynamics.
#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Dynamics {
    /// Left shift.
    #[default]
    Shift,
    /// Identity map.
    Identity,
}

/// One factor map.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FactorSpec {
    /// Keep the first `keep` components.
    Project {
        /// Components kept.
        keep: usize,
    },
    /// Symbol map.
    Merge {
        /// Image of each symbol.
        map: Vec<usize>,
    },
}

/// A rational written as `"p/q"` or as an integer.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    /// Integer.
    Int(i64),
    /// `"p/q"`.
    Text(String),
}

impl RationalText {
    fn parse(&self, what: &str) -> CliResult<Rational> {
        match self {
            RationalText::Int(v) => Ok(Rational::from_integer((*v).into())),
            RationalText::Text(t) => parse_rational(t, what),
        }
    }
}

/// A point known on `[-radius, radius]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    /// Support radius.
    pub radius: u32,
    /// Symbols, for symbolic towers.
    pub symbols: Option<Vec<usize>>,
    /// Rows of component values, for cube towers.
    pub values: Option<Vec<Vec<RationalText>>>,
    /// `zero` (default) or `unknown`.
    #[serde(default)]
    pub tail: TailSpec,
}

/// Tail convention.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSpec {
    /// Zero outside the support.
    #[default]
    Zero,
    /// Unknown outside the support.
    Unknown,
}

/// One box of a cover member.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSide {
    /// Coordinate `[m, c]`.
    pub coord: (i64, usize),
    /// Left endpoint.
    pub lo: RationalText,
    /// Right endpoint.
    pub hi: RationalText,
}

/// A cover: members are lists of constrained coordinates.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    /// Components of the ambient points.
    pub components: usize,
    /// Members; coordinates a member does not list are free.
    pub members: Vec<Vec<BoxSide>>,
}

/// SFT graph with a marked set.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    /// Successor lists.
    pub adjacency: Vec<Vec<usize>>,
    /// Marked vertices.
    #[serde(rename = "E", default)]
    pub marked: Vec<usize>,
    /// Marked words of length `block` (recoded to a higher-block graph).
    #[serde(default)]
    pub words: Vec<Vec<usize>>,
    /// Word length for `words`.
    pub block: Option<usize>,
}

/// Parses a rational, reporting `what` on failure.
pub fn parse_rational(text: &str, what: &str) -> CliResult<Rational> {
    parse_ratio(text).ok_or_else(|| CliError::Parameters(format!("{what}: cannot parse {text:?} as p/q")))
}

/// Parses `text` as a [`RunConfig`], naming `file` in diagnostics.
pub fn parse_config(text: &str, file: &str) -> CliResult<RunConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        CliError::Config {
            file: file.to_string(),
            line: inner.line(),
            column: inner.column(),
            path,
            message: inner.to_string(),
        }
    })
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    parse_config(&text, &path.display().to_string())
}

impl TowerSpec {
    /// Builds the core tower (not yet validated).
    pub fn build(&self) -> CliResult<Tower> {
        let levels = self
            .levels
            .iter()
            .map(|l| match l {
                LevelSpec::Full { alphabet } => Level::Symbolic(SymbolicSystem::full(*alphabet)),
                LevelSpec::Sft { transitions } => Level::Symbolic(SymbolicSystem::sft(
                    transitions.iter().map(|row| row.iter().map(|&v| v != 0).collect()).collect(),
                )),
                LevelSpec::Cube { components, dynamics: Dynamics::Shift } => {
                    Level::Cube(CubeSystem::shift(*components))
                }
                LevelSpec::Cube { components, dynamics: Dynamics::Identity } => {
                    Level::Cube(CubeSystem::stationary(*components))
                }
            })
            .collect();
        let factors = self
            .factors
            .iter()
            .map(|f| match f {
                FactorSpec::Project { keep } => ForgetfulFactor::Project { keep: *keep },
                FactorSpec::Merge { map } => ForgetfulFactor::Merge { map: map.clone() },
            })
            .collect();
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| w.parse(&format!("weights[{i}]")))
            .collect::<CliResult<Vec<_>>>()?;
        let weights = WeightVector::new(weights)?;
        Ok(Tower::new(levels, factors, weights))
    }
}

impl PointSpec {
    /// Builds the core point.
    pub fn build(&self) -> CliResult<PointWindow> {
        let point = match (&self.symbols, &self.values) {
            (Some(symbols), None) => PointWindow::symbolic(self.radius, symbols.clone())?,
            (None, Some(rows)) => {
                let rows = rows
                    .iter()
                    .map(|row| row.iter().map(|v| v.parse("point value")).collect::<CliResult<Vec<_>>>())
                    .collect::<CliResult<Vec<_>>>()?;
                PointWindow::cube(self.radius, rows)?
            }
            _ => {
                return Err(CliError::Parameters(
                    "a point needs exactly one of `symbols` or `values`".into(),
                ))
            }
        };
        Ok(point.with_tail(match self.tail {
            TailSpec::Zero => Tail::Zero,
            TailSpec::Unknown => Tail::Unknown,
        }))
    }
}

impl CoverSpec {
    /// Builds and certifies the cover.
    pub fn build(&self) -> CliResult<BoxCover> {
        let mut coords: Vec<Coord> = self.members.iter().flatten().map(|b| b.coord).collect();
        coords.sort_unstable();
        coords.dedup();
        let members = self
            .members
            .iter()
            .map(|member| {
                let mut sides = vec![Interval::full(); coords.len()];
                for side in member {
                    let k = coords.binary_search(&side.coord).unwrap_or_default();
                    let lo = side.lo.parse("cover lo")?;
                    let hi = side.hi.parse("cover hi")?;
                    sides[k] = Interval::new(lo, hi)?;
                }
                Ok(sides)
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(BoxCover::new(self.components, coords, members)?)
    }
}

impl GraphSpec {
    /// Builds the graph, recoding word sets to a higher-block presentation.
    pub fn build(&self) -> CliResult<SftGraph> {
        if self.words.is_empty() {
            return Ok(SftGraph::from_lists(&self.adjacency, &self.marked)?);
        }
        if !self.marked.is_empty() {
            return Err(CliError::Parameters("give either `E` or `words`, not both".into()));
        }
        let block = self.block.unwrap_or_else(|| self.words[0].len());
        let v = self.adjacency.len();
        let mut matrix = vec![vec![false; v]; v];
        for (a, succ) in self.adjacency.iter().enumerate() {
            for &b in succ {
                if b >= v {
                    return Err(CliError::Parameters(format!("edge {a}->{b} leaves the graph")));
                }
                matrix[a][b] = true;
            }
        }
        Ok(SftGraph::higher_block(&matrix, block, &self.words)?.0)
    }
}

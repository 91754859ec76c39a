//! End-to-end run: parse, build, reconstruct, arrange, decompose, solve.

use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{self, Arrangement, CellGraph};
use crate::decomposition::{self, NiceTreeDecomposition};
use crate::fold_dp::{self, DpError, DpOutcome, Mode};
use crate::local_fold::{self, LocalFlatFolding, LocalFoldError};
use crate::pattern::{self, CreaseId, CreaseInput, CreasePattern, ParseError, PatternError};

/// Source of elapsed time in milliseconds. Stage durations are differences
/// of successive readings.
pub trait Clock {
    fn now_ms(&mut self) -> f64;
}

/// A clock that never advances, for targets without a timer.
pub struct NoClock;

impl Clock for NoClock {
    fn now_ms(&mut self) -> f64 {
        0.0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub mode: Mode,
    pub threads: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { mode: Mode::Labeled, threads: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Foldable,
    NotFoldable,
    NotLocallyFlat,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Foldable => 0,
            Verdict::NotFoldable => 1,
            Verdict::NotLocallyFlat => 2,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid crease pattern: {0}")]
    Pattern(#[from] PatternError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Parse(_) | PipelineError::Pattern(_) => 3,
            PipelineError::Internal(_) => 4,
        }
    }
}

impl From<DpError> for PipelineError {
    fn from(e: DpError) -> Self {
        PipelineError::Internal(e.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTime {
    pub stage: &'static str,
    pub ms: f64,
}

/// Everything downstream of a successful local flat folding.
#[derive(Clone, Debug)]
pub struct Solved {
    pub lff: LocalFlatFolding,
    pub arrangement: Arrangement,
    pub graph: CellGraph,
    pub nice: NiceTreeDecomposition,
    pub outcome: DpOutcome,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub input: CreaseInput,
    pub pattern: CreasePattern,
    pub verdict: Verdict,
    pub inconsistent_crease: Option<CreaseId>,
    pub solved: Option<Solved>,
    pub timings: Vec<StageTime>,
}

struct Stopwatch<'a> {
    clock: &'a mut dyn Clock,
    last: f64,
    times: Vec<StageTime>,
}

impl Stopwatch<'_> {
    fn lap(&mut self, stage: &'static str) {
        let now = self.clock.now_ms();
        self.times.push(StageTime { stage, ms: now - self.last });
        self.last = now;
    }
}

pub fn analyze(bytes: &[u8], opts: &Options, clock: &mut dyn Clock) -> Result<Analysis, PipelineError> {
    let last = clock.now_ms();
    let mut sw = Stopwatch { clock, last, times: Vec::new() };
    let input = pattern::parse(bytes)?;
    sw.lap("parse");
    analyze_input_timed(input, opts, sw)
}

pub fn analyze_input(input: CreaseInput, opts: &Options, clock: &mut dyn Clock) -> Result<Analysis, PipelineError> {
    let last = clock.now_ms();
    analyze_input_timed(input, opts, Stopwatch { clock, last, times: Vec::new() })
}

fn analyze_input_timed(input: CreaseInput, opts: &Options, mut sw: Stopwatch<'_>) -> Result<Analysis, PipelineError> {
    let cp = pattern::build_pattern(&input)?;
    sw.lap("build_pattern");
    let lff = match local_fold::reconstruct(&cp) {
        Ok(lff) => lff,
        Err(LocalFoldError::NotLocallyFlat { crease }) => {
            sw.lap("reconstruct");
            return Ok(Analysis {
                input,
                pattern: cp,
                verdict: Verdict::NotLocallyFlat,
                inconsistent_crease: Some(crease),
                solved: None,
                timings: sw.times,
            });
        }
    };
    sw.lap("reconstruct");
    let arr = arrangement::build(&lff).map_err(|e| PipelineError::Internal(e.to_string()))?;
    sw.lap("arrangement");
    let graph = arrangement::cell_graph(&arr);
    sw.lap("cell_graph");
    let adj = graph.neighbors();
    let td = decomposition::decompose(&adj);
    decomposition::verify(&adj, &td).map_err(|v| PipelineError::Internal(format!("decomposition: {v}")))?;
    sw.lap("decompose");
    let nice = decomposition::make_nice(&td);
    nice.check_grammar().map_err(|m| PipelineError::Internal(format!("nice decomposition: {m}")))?;
    decomposition::verify(&adj, &nice.as_tree_decomposition())
        .map_err(|v| PipelineError::Internal(format!("nice decomposition: {v}")))?;
    sw.lap("make_nice");
    let outcome = fold_dp::dp_solve(&arr, &graph, &nice, opts.mode, opts.threads)?;
    fold_dp::state_count_audit(&outcome)?;
    sw.lap("dp_solve");
    let verdict = if outcome.feasible() { Verdict::Foldable } else { Verdict::NotFoldable };
    Ok(Analysis {
        input,
        pattern: cp,
        verdict,
        inconsistent_crease: None,
        solved: Some(Solved { lff, arrangement: arr, graph, nice, outcome }),
        timings: sw.times,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeStats {
    pub node: usize,
    pub kind: &'static str,
    pub bag_size: usize,
    pub max_ply: usize,
    pub states: usize,
    pub bound: String,
}

/// The deterministic part of a run report; timings are reported separately.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub mode: &'static str,
    pub vertices: usize,
    pub creases: usize,
    pub faces: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inconsistent_crease: Option<CreaseId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ply: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arrangement_edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nice_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_state_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_stats: Option<Vec<NodeStats>>,
}

fn kind_name(kind: &decomposition::NiceKind) -> &'static str {
    match kind {
        decomposition::NiceKind::Leaf(_) => "leaf",
        decomposition::NiceKind::Introduce(_) => "introduce",
        decomposition::NiceKind::Forget(_) => "forget",
        decomposition::NiceKind::Join => "join",
    }
}

impl RunReport {
    pub fn from_analysis(a: &Analysis, mode: Mode, node_detail: bool) -> RunReport {
        let mut r = RunReport {
            verdict: a.verdict,
            mode: match mode {
                Mode::Labeled => "mv",
                Mode::Unlabeled => "ignore-labels",
            },
            vertices: a.pattern.vertices.len(),
            creases: a.pattern.creases.len(),
            faces: a.pattern.faces.len(),
            inconsistent_crease: a.inconsistent_crease,
            ply: None,
            cells: None,
            arrangement_edges: None,
            width: None,
            nice_nodes: None,
            max_states: None,
            max_state_ratio: None,
            node_stats: None,
        };
        if let Some(s) = &a.solved {
            r.ply = Some(s.arrangement.ply());
            r.cells = Some(s.arrangement.cells.len());
            r.arrangement_edges = Some(s.arrangement.edges.len());
            r.width = Some(s.nice.width());
            r.nice_nodes = Some(s.nice.nodes.len());
            r.max_states = Some(s.outcome.max_states());
            r.max_state_ratio = fold_dp::state_count_audit(&s.outcome).ok();
            if node_detail {
                r.node_stats = Some(
                    s.outcome
                        .audit
                        .iter()
                        .map(|n| NodeStats {
                            node: n.node,
                            kind: kind_name(&n.kind),
                            bag_size: n.bag_size,
                            max_ply: n.max_ply,
                            states: n.states,
                            bound: n.bound.to_string(),
                        })
                        .collect(),
                );
            }
        }
        r
    }

    /// Report plus a `timings` object, pretty-printed.
    pub fn to_json(&self, timings: Option<&[StageTime]>) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(t) = timings {
            v["timings"] = serde_json::to_value(t).expect("timings serialize");
        }
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }
}

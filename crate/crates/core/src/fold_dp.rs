//! Layer-ordering feasibility: the per-edge uncrossed test, the bag-state
//! dynamic program over a nice tree decomposition, and an exhaustive oracle.
//!
//! Orientation convention for labels: a face whose isometry has determinant
//! +1 is "face up". At a valley crease the face-up layer of the pair lies
//! below its face-down partner; at a mountain crease it lies above.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::arrangement::{ArrEdgeId, Arrangement, CellGraph, CellId, EdgeRole};
use crate::decomposition::{NiceKind, NiceTreeDecomposition};
use crate::pattern::{FaceId, Label};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Mountain/valley labels constrain the layer order.
    Labeled,
    /// Labels are ignored.
    Unlabeled,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("state count {states} at node {node} exceeds the bound {bound}")]
    StateBound { node: usize, states: usize, bound: u128 },
    #[error("witness fails the uncrossed test at arrangement edge {0}")]
    WitnessRejected(ArrEdgeId),
    #[error("internal consistency: {0}")]
    Internal(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle budget exceeded: {needed} layering combinations > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

/// Bottom-to-top face order for every cell, indexed by cell id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GlobalLayering {
    pub cells: Vec<Vec<FaceId>>,
}

impl GlobalLayering {
    /// Every cell flipped upside down.
    pub fn reversed(&self) -> GlobalLayering {
        GlobalLayering { cells: self.cells.iter().map(|l| l.iter().rev().copied().collect()).collect() }
    }
}

/// `{"foldable": ..., "cells": {"<cell>": [bottom, ..., top]}}`.
pub fn witness_json(witness: Option<&GlobalLayering>) -> String {
    let mut out = String::new();
    match witness {
        None => out.push_str("{\n  \"foldable\": false,\n  \"cells\": {}\n}\n"),
        Some(w) => {
            out.push_str("{\n  \"foldable\": true,\n  \"cells\": {");
            for (i, layers) in w.cells.iter().enumerate() {
                let faces: Vec<String> = layers.iter().map(|f| f.to_string()).collect();
                let sep = if i == 0 { "" } else { "," };
                let _ = write!(out, "{sep}\n    \"{i}\": [{}]", faces.join(", "));
            }
            out.push_str("\n  }\n}\n");
        }
    }
    out
}

#[derive(Clone, Debug, Default)]
struct SideView {
    /// (local index of the sign +1 face, local index of its partner, label)
    pairs: Vec<(u8, u8, Label)>,
    spans: Vec<u8>,
}

#[derive(Clone, Debug)]
struct EdgeView {
    cell_a: CellId,
    a: SideView,
    b: SideView,
    /// Span faces as (local index in a, local index in b).
    span_pairs: Vec<(u8, u8)>,
}

/// Precomputed local-index view of every arrangement edge.
#[derive(Clone, Debug)]
pub struct EdgeChecker {
    views: Vec<EdgeView>,
    mode: Mode,
}

fn side_view(arr: &Arrangement, cell: CellId, roles: &[EdgeRole]) -> SideView {
    let c = &arr.cells[cell];
    let mut view = SideView::default();
    for (i, role) in roles.iter().enumerate() {
        match role {
            EdgeRole::Span => view.spans.push(i as u8),
            EdgeRole::BoundaryEnd => {}
            EdgeRole::CreasePair { partner, label, .. } => {
                let j = c.local_index(*partner).expect("partner is a layer of the same cell");
                if i < j {
                    let (plus, minus) = if arr.face_signs[c.layers[i]] > 0 { (i, j) } else { (j, i) };
                    view.pairs.push((plus as u8, minus as u8, *label));
                }
            }
        }
    }
    view
}

impl EdgeChecker {
    pub fn new(arr: &Arrangement, mode: Mode) -> Self {
        assert!(arr.ply() <= u8::MAX as usize, "ply above 255 is not supported");
        let views = arr
            .edges
            .iter()
            .map(|e| {
                let a = side_view(arr, e.cell_a, &e.roles_a);
                let b = side_view(arr, e.cell_b, &e.roles_b);
                let cb = &arr.cells[e.cell_b];
                let span_pairs = a
                    .spans
                    .iter()
                    .map(|&i| {
                        let face = arr.cells[e.cell_a].layers[i as usize];
                        (i, cb.local_index(face).expect("span face covers both cells") as u8)
                    })
                    .collect();
                EdgeView { cell_a: e.cell_a, a, b, span_pairs }
            })
            .collect();
        EdgeChecker { views, mode }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Conditions that involve only one side's layering: spans not trapped
    /// inside a fold, folds at this edge nested or disjoint, and labels.
    fn side_ok(&self, side: &SideView, pos: &[u8]) -> bool {
        let mut intervals: Vec<(u8, u8)> = Vec::with_capacity(side.pairs.len());
        for &(plus, minus, label) in &side.pairs {
            let (pp, pm) = (pos[plus as usize], pos[minus as usize]);
            let (lo, hi) = (pp.min(pm), pp.max(pm));
            if side.spans.iter().any(|&s| lo < pos[s as usize] && pos[s as usize] < hi) {
                return false;
            }
            if self.mode == Mode::Labeled {
                match label {
                    Label::Valley if pp > pm => return false,
                    Label::Mountain if pp < pm => return false,
                    _ => {}
                }
            }
            for &(lo2, hi2) in &intervals {
                if (lo < lo2 && lo2 < hi && hi < hi2) || (lo2 < lo && lo < hi2 && hi2 < hi) {
                    return false;
                }
            }
            intervals.push((lo, hi));
        }
        true
    }

    /// Uncreased layers keep their relative order across the edge.
    fn spans_ok(view: &EdgeView, pos_a: &[u8], pos_b: &[u8]) -> bool {
        let sp = &view.span_pairs;
        for i in 0..sp.len() {
            for j in i + 1..sp.len() {
                let below_a = pos_a[sp[i].0 as usize] < pos_a[sp[j].0 as usize];
                let below_b = pos_b[sp[i].1 as usize] < pos_b[sp[j].1 as usize];
                if below_a != below_b {
                    return false;
                }
            }
        }
        true
    }

    fn side_of(&self, edge: ArrEdgeId, cell: CellId) -> &SideView {
        let v = &self.views[edge];
        if cell == v.cell_a {
            &v.a
        } else {
            &v.b
        }
    }

    /// Full uncrossed test from position arrays (`pos[local] = height`).
    pub fn check_positions(&self, edge: ArrEdgeId, pos_a: &[u8], pos_b: &[u8]) -> bool {
        let v = &self.views[edge];
        self.side_ok(&v.a, pos_a) && self.side_ok(&v.b, pos_b) && Self::spans_ok(v, pos_a, pos_b)
    }
}

/// Inverse permutation: `order[height] = local` -> `pos[local] = height`.
fn positions(order: &[u8], pos: &mut [u8]) {
    for (h, &l) in order.iter().enumerate() {
        pos[l as usize] = h as u8;
    }
}

fn to_local(arr: &Arrangement, cell: CellId, layering: &[FaceId]) -> Option<Vec<u8>> {
    let c = &arr.cells[cell];
    if layering.len() != c.ply() {
        return None;
    }
    let mut pos = vec![u8::MAX; c.ply()];
    for (h, &f) in layering.iter().enumerate() {
        let l = c.local_index(f)?;
        if pos[l] != u8::MAX {
            return None;
        }
        pos[l] = h as u8;
    }
    Some(pos)
}

/// The uncrossed test for one arrangement edge. `la` and `lb` are bottom-to-top
/// layerings of `cell_a` and `cell_b`; anything that is not a permutation of
/// the cell's layers fails.
pub fn check_edge(arr: &Arrangement, edge: ArrEdgeId, la: &[FaceId], lb: &[FaceId], mode: Mode) -> bool {
    let e = &arr.edges[edge];
    let (Some(pa), Some(pb)) = (to_local(arr, e.cell_a, la), to_local(arr, e.cell_b, lb)) else {
        return false;
    };
    let mut single = arr.clone();
    single.edges = vec![e.clone()];
    single.edges[0].id = 0;
    EdgeChecker::new(&single, mode).check_positions(0, &pa, &pb)
}

/// First edge at which `layering` is crossed, if any.
pub fn first_crossed_edge(checker: &EdgeChecker, arr: &Arrangement, layering: &GlobalLayering) -> Option<ArrEdgeId> {
    let pos: Vec<Option<Vec<u8>>> =
        (0..arr.cells.len()).map(|c| to_local(arr, c, &layering.cells[c])).collect();
    arr.edges.iter().find_map(|e| match (&pos[e.cell_a], &pos[e.cell_b]) {
        (Some(pa), Some(pb)) if checker.check_positions(e.id, pa, pb) => None,
        _ => Some(e.id),
    })
}

/// Next lexicographic permutation in place; false after the last one.
fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn all_orders(ply: usize) -> Vec<Vec<u8>> {
    let mut cur: Vec<u8> = (0..ply as u8).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

pub(crate) fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeAudit {
    pub node: usize,
    pub kind: NiceKind,
    pub bag_size: usize,
    pub max_ply: usize,
    pub states: usize,
    /// `(p!)^{bag size}` with `p` the largest ply in the bag, saturating.
    pub bound: u128,
}

#[derive(Clone, Debug)]
pub struct DpOutcome {
    pub witness: Option<GlobalLayering>,
    pub audit: Vec<NodeAudit>,
}

impl DpOutcome {
    pub fn feasible(&self) -> bool {
        self.witness.is_some()
    }

    pub fn max_states(&self) -> usize {
        self.audit.iter().map(|a| a.states).max().unwrap_or(0)
    }
}

/// Per-node state counts against their bounds; returns the largest
/// observed `states / bound` ratio.
pub fn state_count_audit(outcome: &DpOutcome) -> Result<f64, DpError> {
    let mut worst: f64 = 0.0;
    for a in &outcome.audit {
        if a.states as u128 > a.bound {
            return Err(DpError::StateBound { node: a.node, states: a.states, bound: a.bound });
        }
        worst = worst.max(a.states as f64 / a.bound as f64);
    }
    Ok(worst)
}

type State = Box<[u8]>;
type StateSet = HashSet<State>;

struct Solver<'a> {
    arr: &'a Arrangement,
    graph: &'a CellGraph,
    ntd: &'a NiceTreeDecomposition,
    checker: EdgeChecker,
}

impl Solver<'_> {
    fn ply(&self, c: CellId) -> usize {
        self.arr.cells[c].ply()
    }

    /// Offsets of each bag cell's segment inside a state.
    fn offsets(&self, bag: &[CellId]) -> Vec<usize> {
        let mut off = Vec::with_capacity(bag.len() + 1);
        let mut acc = 0;
        off.push(0);
        for &c in bag {
            acc += self.ply(c);
            off.push(acc);
        }
        off
    }

    fn introduce(&self, node: usize, c: CellId, child: &StateSet, threads: usize) -> StateSet {
        let n = &self.ntd.nodes[node];
        let child_bag = &self.ntd.nodes[n.children[0]].bag;
        let child_off = self.offsets(child_bag);
        let k = n.bag.iter().position(|&x| x == c).expect("introduced cell in bag");
        let pc = self.ply(c);

        // Arrangement edges between c and the rest of the bag.
        let mut relevant: Vec<(ArrEdgeId, usize)> = Vec::new();
        for (slot, &d) in child_bag.iter().enumerate() {
            for &e in self.graph.arr_edges_between(c, d) {
                relevant.push((e, slot));
            }
        }

        // Layerings of c passing c's own side of every relevant edge.
        let mut pos_c = vec![0u8; pc];
        let candidates: Vec<(Vec<u8>, Vec<u8>)> = all_orders(pc)
            .into_iter()
            .filter_map(|order| {
                positions(&order, &mut pos_c);
                relevant
                    .iter()
                    .all(|&(e, _)| self.checker.side_ok(self.checker.side_of(e, c), &pos_c))
                    .then(|| (order, pos_c.clone()))
            })
            .collect();

        // Only the bag cells adjacent to c decide which candidates fit, so
        // child states sharing those layerings share one filtering pass.
        let mut slots: Vec<usize> = relevant.iter().map(|&(_, slot)| slot).collect();
        slots.sort_unstable();
        slots.dedup();
        let key_of = |state: &State| -> State {
            let mut key = Vec::new();
            for &slot in &slots {
                key.extend_from_slice(&state[child_off[slot]..child_off[slot + 1]]);
            }
            key.into_boxed_slice()
        };
        let compatible = |key: &State| -> Vec<usize> {
            let mut pos_d: Vec<Vec<u8>> = Vec::with_capacity(slots.len());
            let mut at = 0;
            for &slot in &slots {
                let len = child_off[slot + 1] - child_off[slot];
                let mut p = vec![0u8; len];
                positions(&key[at..at + len], &mut p);
                pos_d.push(p);
                at += len;
            }
            let local: Vec<(ArrEdgeId, usize, CellId)> = relevant
                .iter()
                .map(|&(e, slot)| (e, slots.binary_search(&slot).expect("slot listed"), child_bag[slot]))
                .collect();
            if !local.iter().all(|&(e, i, d)| self.checker.side_ok(self.checker.side_of(e, d), &pos_d[i])) {
                return Vec::new();
            }
            candidates
                .iter()
                .enumerate()
                .filter(|(_, (_, pc))| {
                    local.iter().all(|&(e, i, _)| {
                        let v = &self.checker.views[e];
                        if v.cell_a == c {
                            EdgeChecker::spans_ok(v, pc, &pos_d[i])
                        } else {
                            EdgeChecker::spans_ok(v, &pos_d[i], pc)
                        }
                    })
                })
                .map(|(i, _)| i)
                .collect()
        };

        let states: Vec<&State> = child.iter().collect();
        let keys: Vec<State> = par_map(&states, threads, |s| key_of(s));
        let mut index: HashMap<&State, usize> = HashMap::new();
        let mut distinct: Vec<&State> = Vec::new();
        let key_ids: Vec<usize> = keys
            .iter()
            .map(|k| {
                *index.entry(k).or_insert_with(|| {
                    distinct.push(k);
                    distinct.len() - 1
                })
            })
            .collect();
        let fits: Vec<Vec<usize>> = par_map(&distinct, threads, |k| compatible(k));

        let split = child_off[k];
        let jobs: Vec<(&State, usize)> = states.into_iter().zip(key_ids).collect();
        let produced: Vec<Vec<State>> = par_map(&jobs, threads, |&(state, key)| {
            fits[key]
                .iter()
                .map(|&i| {
                    let order = &candidates[i].0;
                    let mut s = Vec::with_capacity(state.len() + order.len());
                    s.extend_from_slice(&state[..split]);
                    s.extend_from_slice(order);
                    s.extend_from_slice(&state[split..]);
                    s.into_boxed_slice()
                })
                .collect()
        });
        produced.into_iter().flatten().collect()
    }

    fn forget(&self, node: usize, c: CellId, child: &StateSet) -> StateSet {
        let child_bag = &self.ntd.nodes[self.ntd.nodes[node].children[0]].bag;
        let off = self.offsets(child_bag);
        let k = child_bag.iter().position(|&x| x == c).expect("forgotten cell in child bag");
        child.iter().map(|s| project(s, off[k], off[k + 1])).collect()
    }

    fn leaf(&self, c: CellId) -> StateSet {
        all_orders(self.ply(c)).into_iter().map(Vec::into_boxed_slice).collect()
    }
}

fn project(s: &[u8], from: usize, to: usize) -> State {
    let mut out = Vec::with_capacity(s.len() - (to - from));
    out.extend_from_slice(&s[..from]);
    out.extend_from_slice(&s[to..]);
    out.into_boxed_slice()
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    use rayon::prelude::*;
    if threads <= 1 || items.len() < 64 {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(&f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R>(items: &[T], _threads: usize, f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Bottom-up dynamic program over `ntd`; on success, a witness layering
/// that has been re-checked against every arrangement edge.
pub fn dp_solve(
    arr: &Arrangement,
    graph: &CellGraph,
    ntd: &NiceTreeDecomposition,
    mode: Mode,
    threads: usize,
) -> Result<DpOutcome, DpError> {
    #[cfg(feature = "parallel")]
    if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| DpError::Internal(e.to_string()))?;
        return pool.install(|| solve_inner(arr, graph, ntd, mode, threads));
    }
    solve_inner(arr, graph, ntd, mode, threads)
}

fn solve_inner(
    arr: &Arrangement,
    graph: &CellGraph,
    ntd: &NiceTreeDecomposition,
    mode: Mode,
    threads: usize,
) -> Result<DpOutcome, DpError> {
    let solver = Solver { arr, graph, ntd, checker: EdgeChecker::new(arr, mode) };
    let mut sets: Vec<Option<StateSet>> = vec![None; ntd.nodes.len()];
    let mut audit = Vec::with_capacity(ntd.nodes.len());
    let mut dead = false;

    for (i, node) in ntd.nodes.iter().enumerate() {
        let set = match node.kind {
            NiceKind::Leaf(c) => solver.leaf(c),
            NiceKind::Introduce(c) => solver.introduce(i, c, sets[node.children[0]].as_ref().expect("child done"), threads),
            NiceKind::Forget(c) => solver.forget(i, c, sets[node.children[0]].as_ref().expect("child done")),
            NiceKind::Join => {
                let a = sets[node.children[0]].as_ref().expect("child done");
                let b = sets[node.children[1]].as_ref().expect("child done");
                let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                small.iter().filter(|s| large.contains(*s)).cloned().collect()
            }
        };
        let max_ply = node.bag.iter().map(|&c| solver.ply(c)).max().unwrap_or(0);
        let bound = (0..node.bag.len()).fold(1u128, |acc, _| acc.saturating_mul(factorial_u128(max_ply)));
        audit.push(NodeAudit { node: i, kind: node.kind, bag_size: node.bag.len(), max_ply, states: set.len(), bound });
        let empty = set.is_empty();
        sets[i] = Some(set);
        if empty {
            dead = true;
            break;
        }
    }

    if dead || sets[ntd.root].as_ref().is_none_or(HashSet::is_empty) {
        return Ok(DpOutcome { witness: None, audit });
    }

    let witness = extract_witness(&solver, &sets)?;
    if let Some(e) = first_crossed_edge(&solver.checker, arr, &witness) {
        return Err(DpError::WitnessRejected(e));
    }
    Ok(DpOutcome { witness: Some(witness), audit })
}

fn extract_witness(solver: &Solver<'_>, sets: &[Option<StateSet>]) -> Result<GlobalLayering, DpError> {
    let ntd = solver.ntd;
    let mut chosen: Vec<Option<State>> = vec![None; ntd.nodes.len()];
    let root_set = sets[ntd.root].as_ref().expect("root evaluated");
    chosen[ntd.root] = root_set.iter().min().cloned();

    for i in (0..ntd.nodes.len()).rev() {
        let Some(state) = chosen[i].clone() else { continue };
        let node = &ntd.nodes[i];
        match node.kind {
            NiceKind::Leaf(_) => {}
            NiceKind::Introduce(c) => {
                let off = solver.offsets(&node.bag);
                let k = node.bag.iter().position(|&x| x == c).expect("in bag");
                chosen[node.children[0]] = Some(project(&state, off[k], off[k + 1]));
            }
            NiceKind::Forget(c) => {
                let child = node.children[0];
                let child_bag = &ntd.nodes[child].bag;
                let off = solver.offsets(child_bag);
                let k = child_bag.iter().position(|&x| x == c).expect("in child bag");
                let pick = sets[child]
                    .as_ref()
                    .expect("child evaluated")
                    .iter()
                    .filter(|s| project(s, off[k], off[k + 1]) == state)
                    .min()
                    .cloned()
                    .ok_or_else(|| DpError::Internal(format!("forget node {i} has no extending child state")))?;
                chosen[child] = Some(pick);
            }
            NiceKind::Join => {
                for &c in &node.children {
                    chosen[c] = Some(state.clone());
                }
            }
        }
    }

    let arr = solver.arr;
    let mut cells: Vec<Option<Vec<u8>>> = vec![None; arr.cells.len()];
    for (i, node) in ntd.nodes.iter().enumerate() {
        let state = chosen[i].as_ref().ok_or_else(|| DpError::Internal(format!("node {i} has no chosen state")))?;
        let off = solver.offsets(&node.bag);
        for (slot, &c) in node.bag.iter().enumerate() {
            let seg = state[off[slot]..off[slot + 1]].to_vec();
            match &cells[c] {
                None => cells[c] = Some(seg),
                Some(prev) if *prev == seg => {}
                Some(_) => return Err(DpError::Internal(format!("cell {c} layered inconsistently across bags"))),
            }
        }
    }
    Ok(GlobalLayering {
        cells: cells
            .into_iter()
            .enumerate()
            .map(|(c, order)| {
                let layers = &arr.cells[c].layers;
                match order {
                    Some(o) => o.iter().map(|&l| layers[l as usize]).collect(),
                    None => layers.clone(),
                }
            })
            .collect(),
    })
}

/// Exhaustive search over every cell's layerings, in cell order and
/// lexicographic layer order; returns the least uncrossed layering.
pub fn oracle_solve(arr: &Arrangement, mode: Mode, budget: u128) -> Result<Option<GlobalLayering>, OracleError> {
    let needed = arr.cells.iter().fold(1u128, |acc, c| acc.saturating_mul(factorial_u128(c.ply())));
    if needed > budget {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    let checker = EdgeChecker::new(arr, mode);
    let n = arr.cells.len();
    // Edges checked once both cells are assigned, i.e. at the later cell.
    let mut closing: Vec<Vec<ArrEdgeId>> = vec![Vec::new(); n];
    for e in &arr.edges {
        closing[e.cell_a.max(e.cell_b)].push(e.id);
    }
    let orders: Vec<Vec<Vec<u8>>> = arr.cells.iter().map(|c| all_orders(c.ply())).collect();
    let pos_of: Vec<Vec<Vec<u8>>> = orders
        .iter()
        .map(|os| {
            os.iter()
                .map(|o| {
                    let mut p = vec![0u8; o.len()];
                    positions(o, &mut p);
                    p
                })
                .collect()
        })
        .collect();

    let mut choice = vec![0usize; n];
    let mut depth = 0usize;
    let fits = |choice: &[usize], c: usize| {
        closing[c].iter().all(|&e| {
            let edge = &arr.edges[e];
            checker.check_positions(e, &pos_of[edge.cell_a][choice[edge.cell_a]], &pos_of[edge.cell_b][choice[edge.cell_b]])
        })
    };
    // Iterative depth-first search.
    loop {
        if depth == n {
            let cells = (0..n)
                .map(|c| orders[c][choice[c]].iter().map(|&l| arr.cells[c].layers[l as usize]).collect())
                .collect();
            return Ok(Some(GlobalLayering { cells }));
        }
        if choice[depth] < orders[depth].len() && fits(&choice, depth) {
            depth += 1;
            if depth < n {
                choice[depth] = 0;
            }
            continue;
        }
        // Advance at this depth, backtracking as needed.
        loop {
            if choice[depth] < orders[depth].len() {
                choice[depth] += 1;
            }
            if choice[depth] < orders[depth].len() {
                break;
            }
            if depth == 0 {
                return Ok(None);
            }
            depth -= 1;
        }
    }
}

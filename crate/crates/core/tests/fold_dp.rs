use foldcheck::arrangement::{cell_graph, Arrangement};
use foldcheck::decomposition::{decompose, make_nice};
use foldcheck::fold_dp::{check_edge, dp_solve, oracle_solve, state_count_audit, GlobalLayering, Mode};
use foldcheck::geom::{Point, Segment};
use foldcheck::local_fold::reconstruct;
use foldcheck::pattern::{build_pattern, CreaseInput, Label};
use foldcheck::testgen::{generate, GenSpec, Kind};
use foldcheck::arrangement;
use proptest::prelude::*;

const BUDGET: u128 = 10_000_000;

fn p(x: i64, y: i64) -> Point {
    Point::from_ints(x, y)
}

fn arrange(input: &CreaseInput) -> Arrangement {
    arrangement::build(&reconstruct(&build_pattern(input).unwrap()).unwrap()).unwrap()
}

fn strip(len: i64, creases: &[(i64, Label)]) -> Arrangement {
    let paper = vec![p(0, 0), p(len, 0), p(len, 1), p(0, 1)];
    let cs: Vec<_> = creases.iter().map(|&(x, l)| (Segment::new(p(x, 0), p(x, 1)).unwrap(), l)).collect();
    arrange(&CreaseInput::from_segments(&paper, &cs))
}

fn vertex(labels: &str) -> Arrangement {
    let labels = labels
        .chars()
        .map(|c| match c {
            'M' => Label::Mountain,
            'V' => Label::Valley,
            _ => Label::Unassigned,
        })
        .collect();
    arrange(&generate(&GenSpec { seed: 0, kind: Kind::SingleVertex { angles: vec![90; 4], labels: Some(labels) }, flips: 0 }).unwrap())
}

fn solve(arr: &Arrangement, mode: Mode, threads: usize) -> foldcheck::fold_dp::DpOutcome {
    let graph = cell_graph(arr);
    let nice = make_nice(&decompose(&graph.neighbors()));
    dp_solve(arr, &graph, &nice, mode, threads).unwrap()
}

fn passes_everywhere(arr: &Arrangement, w: &GlobalLayering, mode: Mode) -> bool {
    arr.edges.iter().all(|e| check_edge(arr, e.id, &w.cells[e.cell_a], &w.cells[e.cell_b], mode))
}

/// Every permutation of `items`, for brute-force expectations.
fn perms(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut tail in perms(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

#[test]
fn instance_a_edge_checks() {
    let arr = strip(2, &[(1, Label::Valley)]);
    let e = arr.edges.iter().find(|e| e.segment.same_points(&Segment::new(p(1, 0), p(1, 1)).unwrap())).unwrap();
    let (inner, outer) = if arr.cells[e.cell_a].ply() == 2 { (&e.roles_a, e.cell_b) } else { (&e.roles_b, e.cell_a) };
    assert_eq!(inner.len(), 2);
    let la_lr = |first: bool| if first { vec![0, 1] } else { vec![1, 0] };
    let check = |order: Vec<usize>| {
        if outer == e.cell_b {
            check_edge(&arr, e.id, &order, &[], Mode::Labeled)
        } else {
            check_edge(&arr, e.id, &[], &order, Mode::Labeled)
        }
    };
    assert!(check(la_lr(true)));
    assert!(!check(la_lr(false)));
}

#[test]
fn instance_a_witness() {
    let arr = strip(2, &[(1, Label::Valley)]);
    // Brute force over the inner cell: only [L, R] survives.
    let passing: Vec<Vec<usize>> = perms(&[0, 1])
        .into_iter()
        .filter(|o| passes_everywhere(&arr, &GlobalLayering { cells: vec![vec![], o.clone()] }, Mode::Labeled))
        .collect();
    assert_eq!(passing, vec![vec![0, 1]]);
    let out = solve(&arr, Mode::Labeled, 1);
    assert_eq!(out.witness.as_ref().unwrap().cells[1], vec![0, 1]);
    assert_eq!(oracle_solve(&arr, Mode::Labeled, BUDGET).unwrap().unwrap().cells[1], vec![0, 1]);
    let inner_bag = out.audit.iter().filter(|a| a.bag_size == 2).map(|a| a.states).max().unwrap();
    assert!(inner_bag <= 4);
    assert_eq!(inner_bag, 1);
}

#[test]
fn four_mountains_cannot_fold() {
    let arr = vertex("MMMM");
    assert_eq!(arr.ply(), 4);
    // All 24 layerings of the ply-4 cell fail somewhere.
    let bounded = arr.cells.iter().find(|c| c.ply() == 4).unwrap().id;
    let all_fail = perms(&arr.cells[bounded].layers).into_iter().all(|o| {
        let mut cells = vec![vec![]; arr.cells.len()];
        cells[bounded] = o;
        !passes_everywhere(&arr, &GlobalLayering { cells }, Mode::Labeled)
    });
    assert!(all_fail);
    assert!(!solve(&arr, Mode::Labeled, 1).feasible());
    assert!(oracle_solve(&arr, Mode::Labeled, BUDGET).unwrap().is_none());
    assert!(solve(&arr, Mode::Unlabeled, 1).feasible());
}

#[test]
fn three_mountains_one_valley_folds() {
    let arr = vertex("MMMV");
    let out = solve(&arr, Mode::Labeled, 1);
    let w = out.witness.unwrap();
    assert!(passes_everywhere(&arr, &w, Mode::Labeled));
    assert!(oracle_solve(&arr, Mode::Labeled, BUDGET).unwrap().is_some());
}

#[test]
fn crimp_layers_in_order() {
    let arr = strip(3, &[(1, Label::Valley), (2, Label::Mountain)]);
    assert_eq!(arr.cells.len(), 2);
    let out = solve(&arr, Mode::Labeled, 1);
    assert_eq!(out.witness.unwrap().cells[1], vec![0, 1, 2]);
    for a in &out.audit {
        if a.bag_size == 1 && a.max_ply == 3 {
            assert!(a.states <= 6);
        }
    }
}

#[test]
fn no_crease_square_is_trivial() {
    let arr = strip(1, &[]);
    let w = oracle_solve(&arr, Mode::Labeled, BUDGET).unwrap().unwrap();
    assert_eq!(w.cells, vec![vec![], vec![0]]);
    assert_eq!(solve(&arr, Mode::Labeled, 1).witness.unwrap(), w);
}

#[test]
fn ply_zero_bag_has_one_state() {
    let arr = strip(2, &[(1, Label::Valley)]);
    let out = solve(&arr, Mode::Labeled, 1);
    for a in out.audit.iter().filter(|a| a.max_ply == 0) {
        assert_eq!(a.states, 1);
    }
    assert!(state_count_audit(&out).unwrap() <= 1.0);
}

#[test]
fn oracle_budget_is_reported() {
    let arr = arrange(&generate(&GenSpec { seed: 0, kind: Kind::Accordion { n: 7 }, flips: 0 }).unwrap());
    assert!(oracle_solve(&arr, Mode::Labeled, 1000).is_err());
}

fn small_corpus() -> Vec<(String, CreaseInput)> {
    let mut out = Vec::new();
    for n in 1..=4 {
        for flips in 0..2 {
            let spec = GenSpec { seed: n as u64, kind: Kind::Accordion { n }, flips };
            out.push((format!("{spec:?}"), generate(&spec).unwrap()));
        }
    }
    for seed in 0..12 {
        for flips in 0..2 {
            let spec = GenSpec { seed, kind: Kind::SimpleFold { k: 2 }, flips };
            out.push((format!("{spec:?}"), generate(&spec).unwrap()));
            let spec = GenSpec { seed, kind: Kind::RandomVertex { degree: 4 + 2 * (seed as usize % 2), labels: None }, flips };
            out.push((format!("{spec:?}"), generate(&spec).unwrap()));
        }
    }
    out
}

#[test]
fn dp_agrees_with_oracle_on_small_corpus() {
    let mut compared = 0;
    for (name, input) in small_corpus() {
        let arr = arrange(&input);
        for mode in [Mode::Labeled, Mode::Unlabeled] {
            let dp = solve(&arr, mode, 1);
            let Ok(oracle) = oracle_solve(&arr, mode, BUDGET) else { continue };
            compared += 1;
            assert_eq!(dp.feasible(), oracle.is_some(), "{name} {mode:?}");
            state_count_audit(&dp).unwrap();
            if let Some(w) = &dp.witness {
                assert!(passes_everywhere(&arr, w, mode), "{name}");
            }
        }
    }
    assert!(compared >= 80, "only {compared} comparisons within budget");
}

#[test]
fn unflipped_simple_folds_are_feasible() {
    for seed in 0..20 {
        for k in 1..=3 {
            let arr = arrange(&generate(&GenSpec { seed, kind: Kind::SimpleFold { k }, flips: 0 }).unwrap());
            assert!(solve(&arr, Mode::Labeled, 1).feasible(), "seed {seed} k {k}");
        }
    }
    let arr = arrange(&generate(&GenSpec { seed: 7, kind: Kind::SimpleFold { k: 2 }, flips: 0 }).unwrap());
    assert!(solve(&arr, Mode::Labeled, 1).feasible());
}

#[test]
fn relaxing_labels_keeps_witness() {
    for (name, input) in small_corpus() {
        let arr = arrange(&input);
        if let Some(w) = solve(&arr, Mode::Labeled, 1).witness {
            assert!(passes_everywhere(&arr, &w, Mode::Unlabeled), "{name}");
            assert!(solve(&arr, Mode::Unlabeled, 1).feasible(), "{name}");
        }
    }
}

#[test]
fn flipping_all_labels_mirrors_witness() {
    for (name, input) in small_corpus() {
        let arr = arrange(&input);
        let flipped = arr.relabeled(Label::flipped);
        let a = solve(&arr, Mode::Labeled, 1);
        let b = solve(&flipped, Mode::Labeled, 1);
        assert_eq!(a.feasible(), b.feasible(), "{name}");
        if let Some(w) = a.witness {
            assert!(passes_everywhere(&flipped, &w.reversed(), Mode::Labeled), "{name}");
        }
    }
}

#[test]
fn repeated_and_threaded_runs_match() {
    for (name, input) in small_corpus().into_iter().take(20) {
        let arr = arrange(&input);
        let one = solve(&arr, Mode::Labeled, 1).witness;
        assert_eq!(one, solve(&arr, Mode::Labeled, 1).witness, "{name}");
        assert_eq!(one, solve(&arr, Mode::Labeled, 4).witness, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_checks_ignore_other_cells(seed in 0u64..40, pick in 0usize..1000, shuffles in proptest::collection::vec(0usize..1000, 8)) {
        let arr = arrange(&generate(&GenSpec { seed, kind: Kind::SimpleFold { k: 2 }, flips: 0 }).unwrap());
        let layering = |salt: &[usize]| GlobalLayering {
            cells: arr.cells.iter().enumerate().map(|(i, c)| {
                let all = perms(&c.layers);
                all[salt[i % salt.len()].wrapping_mul(i + 1) % all.len()].clone()
            }).collect(),
        };
        let base = layering(&shuffles);
        let e = &arr.edges[pick % arr.edges.len()];
        let before = check_edge(&arr, e.id, &base.cells[e.cell_a], &base.cells[e.cell_b], Mode::Labeled);
        let mut other = layering(&shuffles.iter().map(|s| s + 1).collect::<Vec<_>>());
        other.cells[e.cell_a] = base.cells[e.cell_a].clone();
        other.cells[e.cell_b] = base.cells[e.cell_b].clone();
        let after = check_edge(&arr, e.id, &other.cells[e.cell_a], &other.cells[e.cell_b], Mode::Labeled);
        prop_assert_eq!(before, after);
    }
}

//! Acceptance suite. Prints one `[PASS]` or `[FAIL]` line per criterion.
//!
//! Criteria 1 and 2b are known to be false for randomized greedy (deleting
//! the middle vertex of a 4-vertex path already gives an exact expected
//! distance of 4/3). They are reported as failures and listed in
//! `EXPECTED_FAILURES`. The run fails if any other criterion fails or if
//! one of those two unexpectedly passes.

use std::collections::{BTreeSet, HashSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lowsens::approx::{approx_matching, ApproxParams, DEFAULT_BUDGET};
use lowsens::generate::{generate, random_weights, GraphKind};
use lowsens::greedy::{change_set, greedy_matching};
use lowsens::layered::{apply_augmentations, augmenting_paths, search_in, FixedActivation, LayeredGraph};
use lowsens::lca::{color_forests, deterministic_mm_with, distances_from, form_forests, mm_query, ProbeOracle};
use lowsens::matching::{hamming, is_matching, is_maximal};
use lowsens::online::{simulate, VertexArrivalStream};
use lowsens::oracle::{max_matching, max_weight_matching};
use lowsens::registry::{Approx, Greedy, Weighted};
use lowsens::sensitivity::{adversarial_greedy_instance, estimate, mean_se, perturbations, Experiment, Mode, Target};
use lowsens::tape::{mix64, InvocationPath, Label, Slot};
use lowsens::weighted::{shared_order, weighted_matching};
use lowsens::{Edge, EdgeWeights, Graph, Matching, Perturbation, RandomTape, Vertex, WeightedGraph};

const EXPECTED_FAILURES: &[&str] = &["1", "2b"];

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

/// Runs `f`, failing it if it exceeds `limit`.
fn criterion(id: &'static str, name: &'static str, limit: Duration, f: impl FnOnce() -> Vec<(&'static str, bool, String)>) -> Vec<Outcome> {
    let start = Instant::now();
    let parts = f();
    let elapsed = start.elapsed();
    let over = elapsed > limit;
    parts
        .into_iter()
        .map(|(suffix, pass, detail)| {
            let id: &'static str = if suffix.is_empty() { id } else { Box::leak(format!("{id}{suffix}").into_boxed_str()) };
            let detail = if over { format!("{detail}; took {elapsed:.1?}, limit {limit:?}") } else { detail };
            Outcome { id, name, pass: pass && !over, detail, elapsed }
        })
        .collect()
}

/// `k` items of `items`, chosen by a seeded hash.
fn sample<T: Copy>(items: &[T], k: usize, seed: u64) -> Vec<T> {
    let mut keyed: Vec<(u64, usize)> = (0..items.len()).map(|i| (mix64(seed ^ mix64(i as u64 + 1)), i)).collect();
    keyed.sort_unstable();
    let mut idx: Vec<usize> = keyed.into_iter().take(k).map(|(_, i)| i).collect();
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i]).collect()
}

fn unit(seed: u64, salt: u64) -> f64 {
    (mix64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt) >> 11) as f64 / (1u64 << 53) as f64
}

fn greedy_vertex_deletions() -> Vec<Outcome> {
    // one pass feeds both the distance and the change-set criteria
    let start = Instant::now();
    let trials = 2000u64;
    let mut worst = (0.0, 0.0, 0 as Vertex, 0u64);
    let mut mean_ok = true;
    let mut superset_violations = 0usize;
    let mut s_worst = (0.0, 0.0);
    let mut s_ok = true;
    for seed in 1..=5u64 {
        let g = generate(GraphKind::Gnp { n: 100, p: 0.1 }, seed).unwrap();
        let vertices = sample(&g.vertices().collect::<Vec<_>>(), 20, seed);
        let minus: Vec<Graph> = vertices.iter().map(|&v| g.apply(Perturbation::DeleteVertex(v)).unwrap()).collect();
        let mut d = vec![Vec::with_capacity(trials as usize); vertices.len()];
        let mut s = vec![Vec::with_capacity(trials as usize); vertices.len()];
        for t in 0..trials {
            let order = shared_order(&RandomTape::for_trial(seed, t));
            let base = greedy_matching(&g, &order).unwrap();
            for (i, (&v, h)) in vertices.iter().zip(&minus).enumerate() {
                let dist = hamming(&base, &greedy_matching(h, &order).unwrap());
                let set = change_set(&g, v, &order).unwrap().len();
                if dist > set {
                    superset_violations += 1;
                }
                d[i].push(dist as f64);
                s[i].push(set as f64);
            }
        }
        for (i, &v) in vertices.iter().enumerate() {
            let (mean, se) = mean_se(&d[i]);
            if !(mean <= 1.0 + 3.0 * se && mean <= 1.1) {
                mean_ok = false;
            }
            if mean > worst.0 {
                worst = (mean, se, v, seed);
            }
            let (sm, sse) = mean_se(&s[i]);
            if sm > 1.0 + 3.0 * sse {
                s_ok = false;
            }
            if sm > s_worst.0 {
                s_worst = (sm, sse);
            }
        }
    }
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(120);
    let over = elapsed > limit;
    let note = |s: String| if over { format!("{s}; took {elapsed:.1?}, limit {limit:?}") } else { s };
    vec![
        Outcome {
            id: "1",
            name: "greedy vertex-deletion sensitivity",
            pass: mean_ok && !over,
            detail: note(format!(
                "largest coupled mean d_H = {:.3} (SE {:.3}) at vertex {} of graph {}; bound 1 + 3 SE and 1.1",
                worst.0, worst.1, worst.2, worst.3
            )),
            elapsed,
        },
        Outcome {
            id: "2a",
            name: "change set contains every changed edge",
            pass: superset_violations == 0 && !over,
            detail: note(format!("{superset_violations} of {} trials with d_H > |S|", 5 * 20 * trials)),
            elapsed,
        },
        Outcome {
            id: "2b",
            name: "expected change-set size at most 1",
            pass: s_ok && !over,
            detail: note(format!("largest mean |S| = {:.3} (SE {:.3}); bound 1 + 3 SE", s_worst.0, s_worst.1)),
            elapsed,
        },
    ]
}

/// Independent check of an augmenting path of `len` edges.
fn valid_path(g: &Graph, m: &Matching, path: &[Vertex], len: usize) -> bool {
    let covered: HashSet<Vertex> = m.iter().flat_map(|e| e.endpoints()).collect();
    path.len() == len + 1
        && path.iter().collect::<HashSet<_>>().len() == path.len()
        && !covered.contains(&path[0])
        && !covered.contains(&path[len])
        && (0..len).all(|i| {
            Edge::new(path[i], path[i + 1]).is_some_and(|e| g.has_edge(e) && m.contains(e) == (i % 2 == 1))
        })
}

fn layered_correctness() -> Vec<(&'static str, bool, String)> {
    let mut bad = Vec::new();
    let mut found = 0usize;
    for seed in 0..1000u64 {
        let n = 4 + (seed % 27) as usize;
        let p = 0.08 + 0.3 * unit(seed, 1);
        let g = generate(GraphKind::Gnp { n, p }, seed).unwrap();
        let tape = RandomTape::new(seed);
        let full = greedy_matching(&g, &shared_order(&tape)).unwrap();
        // thin the maximal matching so augmenting paths exist
        let m: Matching = full.iter().filter(|e| !mix64(seed ^ e.key_hint()).is_multiple_of(3)).collect();
        let ell = 1 + (seed % 3) as usize;
        let scope = InvocationPath::root().child(Label::Phase, ell as u64);
        let paths = augmenting_paths(&g, &m, ell, 0.5, &tape, &scope).unwrap();
        let mut used = HashSet::new();
        let ok = paths.iter().all(|p| valid_path(&g, &m, p.vertices(), 2 * ell + 1) && p.vertices().iter().all(|v| used.insert(*v)))
            && apply_augmentations(&m, &paths).is_ok_and(|out| is_matching(&g, &out) && out.len() == m.len() + paths.len());
        found += paths.len();
        if !ok {
            bad.push(seed);
        }
    }
    // the worked example, vertices numbered from 1; vertex 0 is isolated
    let g = Graph::from_edges(7, [(1, 2), (3, 4), (1, 6), (2, 3), (4, 5)]).unwrap();
    let m = Matching::from_edges([Edge::of(1, 2), Edge::of(3, 4)]).unwrap();
    let mut act = FixedActivation::default();
    act.sides.extend([(0, 0), (5, 0), (6, 3)]);
    act.slots.insert(Edge::of(3, 4), Slot { upper: 3, lower: 4, layer: 1 });
    act.slots.insert(Edge::of(1, 2), Slot { upper: 1, lower: 2, layer: 2 });
    let h = LayeredGraph::build(&g, &m, 2, &act).unwrap();
    let paths = search_in(&h, 0.5, &RandomTape::new(0), &InvocationPath::root()).paths;
    let example = paths.len() == 1 && paths[0].vertices() == [6, 1, 2, 3, 4, 5];
    vec![(
        "",
        bad.is_empty() && example && found > 0,
        format!("{} of 1000 instances invalid, {found} paths checked; worked example path {:?}", bad.len(), paths.first().map(|p| p.vertices().to_vec())),
    )]
}

trait KeyHint {
    fn key_hint(self) -> u64;
}

impl KeyHint for Edge {
    fn key_hint(self) -> u64 {
        mix64((self.lo() as u64) << 32 | self.hi() as u64)
    }
}

fn approx_quality() -> Vec<(&'static str, bool, String)> {
    let params = ApproxParams::new(2, 8, 0.05).unwrap();
    let (mut floor_misses, mut two_thirds, mut total) = (0, 0, 0);
    for seed in 0..200u64 {
        let n = 2 + (seed % 13) as usize;
        let g = generate(GraphKind::Gnp { n, p: 0.15 + 0.4 * unit(seed, 2) }, 1000 + seed).unwrap();
        let opt = max_matching(&g).unwrap().0;
        let out = approx_matching(&g, &params, &RandomTape::new(seed), DEFAULT_BUDGET).unwrap();
        assert!(is_matching(&g, &out));
        total += 1;
        if out.len() < opt.div_ceil(2) {
            floor_misses += 1;
        }
        if 3 * out.len() >= 2 * opt {
            two_thirds += 1;
        }
    }
    vec![(
        "",
        floor_misses == 0 && two_thirds * 100 >= 95 * total,
        format!("{floor_misses} runs below ceil(OPT/2); {two_thirds}/{total} runs at >= 2/3 OPT"),
    )]
}

/// Mean over graphs and sampled edges of the coupled mean distance.
fn mean_edge_sensitivity(alg: &dyn lowsens::MatchingAlgorithm, graphs: &[(Graph, Option<EdgeWeights>)], mode: Mode, edges: usize, trials: usize) -> f64 {
    let means: Vec<f64> = graphs
        .iter()
        .enumerate()
        .map(|(i, (g, w))| {
            let (all, population) = perturbations(g, Target::Edges, i as u64);
            let ps = sample(&all, edges, 77 + i as u64);
            let exp = Experiment { algorithm: alg, graph: g, weights: w.as_ref(), mode, trials, base_seed: 500 + i as u64 };
            estimate(&exp, &ps, population).unwrap().average
        })
        .collect();
    mean_se(&means).0
}

fn approx_flatness() -> Vec<(&'static str, bool, String)> {
    let alg = Approx { params: ApproxParams::DESK, budget: DEFAULT_BUDGET };
    let means: Vec<(usize, f64)> = [40usize, 80, 160]
        .iter()
        .map(|&n| {
            let graphs: Vec<_> = (0..2)
                .map(|s| (generate(GraphKind::Gnp { n, p: 5.0 / (n - 1) as f64 }, 10 * n as u64 + s).unwrap(), None))
                .collect();
            (n, mean_edge_sensitivity(&alg, &graphs, Mode::Plain, 60, 200))
        })
        .collect();
    let ratio = means[2].1 / means[0].1;
    vec![("", ratio <= 1.5, format!("means {means:.3?}; ratio 160/40 = {ratio:.3} (bound 1.5)"))]
}

fn lca_pipeline() -> Vec<(&'static str, bool, String)> {
    let delta = 3;
    let mut failures = Vec::new();
    let mut max_radius = 0;
    let mut deletions = 0;
    for seed in 0..100u64 {
        let n = 10 + (mix64(seed) % 991) as usize;
        let g = generate(GraphKind::BoundedDegree { n, max_degree: delta }, seed).unwrap();
        let forests = form_forests(&g, delta).unwrap();
        let coloring = color_forests(&forests);
        if !coloring.is_proper(&g) || (1..=delta).any(|i| coloring.palette(i).len() > 6 || coloring.palette(i).iter().any(|&c| c >= 6)) {
            failures.push(format!("graph {seed}: coloring"));
        }
        let global = deterministic_mm_with(&g, delta).unwrap();
        if !is_maximal(&g, &global) {
            failures.push(format!("graph {seed}: not maximal"));
        }
        let mut radius = 0;
        for &e in g.edges() {
            let ans = mm_query(&mut ProbeOracle::new(&g), e, delta).unwrap();
            radius = radius.max(ans.radius);
            if ans.in_matching != global.contains(e) {
                failures.push(format!("graph {seed}: query disagrees at {e}"));
            }
        }
        max_radius = max_radius.max(radius);
        for &e in &sample(g.edges(), 3, seed) {
            deletions += 1;
            let after = deterministic_mm_with(&g.apply(Perturbation::DeleteEdge(e)).unwrap(), delta).unwrap();
            let near = distances_from(&g, e, radius);
            let ball: BTreeSet<Edge> =
                g.edges().iter().copied().filter(|f| near.contains_key(&f.lo()) || near.contains_key(&f.hi())).collect();
            let changed: Vec<Edge> = global.edges().symmetric_difference(after.edges()).copied().collect();
            if let Some(f) = changed.iter().find(|f| !ball.contains(f)) {
                failures.push(format!("graph {seed}: {f} changed beyond radius {radius} of {e}"));
            }
            if changed.len() > ball.len() {
                failures.push(format!("graph {seed}: {} changes, ball holds {}", changed.len(), ball.len()));
            }
        }
    }
    vec![(
        "",
        failures.is_empty(),
        format!("100 graphs, {deletions} deletions, max query radius {max_radius}; {} failures {:?}", failures.len(), failures.iter().take(3).collect::<Vec<_>>()),
    )]
}

fn weighted_criteria() -> Vec<(&'static str, bool, String)> {
    let mut misses = 0;
    let mut worst_ratio = f64::INFINITY;
    for alpha in [2.0, 3.0] {
        for seed in 0..200u64 {
            let n = 2 + (seed % 11) as usize;
            let g = generate(GraphKind::Gnp { n, p: 0.2 + 0.4 * unit(seed, 3) }, 2000 + seed).unwrap();
            let wg = random_weights(g, 1, 100, seed).unwrap();
            let (opt, _) = max_weight_matching(&wg).unwrap();
            let w = weighted_matching(&wg, alpha, &RandomTape::new(seed)).unwrap().weight(&wg.weights).unwrap();
            if opt > 0.0 {
                worst_ratio = worst_ratio.min(w / opt * 4.0 * alpha);
            }
            if w * 4.0 * alpha < opt - 1e-9 {
                misses += 1;
            }
        }
    }
    let alg = Weighted { alpha: 3.0 };
    let means: Vec<(usize, f64)> = [50usize, 100, 200]
        .iter()
        .map(|&n| {
            let graphs: Vec<(Graph, Option<EdgeWeights>)> = (0..2)
                .map(|s| {
                    let g = generate(GraphKind::Gnp { n, p: 5.0 / (n - 1) as f64 }, 30 * n as u64 + s).unwrap();
                    let WeightedGraph { graph, weights } = random_weights(g, 1, 100, s).unwrap();
                    (graph, Some(weights))
                })
                .collect();
            (n, mean_edge_sensitivity(&alg, &graphs, Mode::Normalized, 60, 200))
        })
        .collect();
    let (lo, hi) = means.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(_, m)| (lo.min(m), hi.max(m)));
    vec![
        ("a", misses == 0, format!("{misses} of 400 runs below OPT/(4 alpha); smallest w*4alpha/OPT = {worst_ratio:.3}")),
        ("b", hi / lo <= 1.5, format!("normalized means {means:.3?}; max/min = {:.3} (bound 1.5)", hi / lo)),
    ]
}

fn online_replacements() -> Vec<(&'static str, bool, String)> {
    let mut medians = Vec::new();
    let mut non_maximal = 0;
    for n in [100usize, 200, 400] {
        let mut totals: Vec<usize> = (0..30u64)
            .map(|s| {
                let g = generate(GraphKind::Gnp { n, p: 10.0 / n as f64 }, 7000 + s).unwrap();
                let stream = VertexArrivalStream::shuffled(g, s);
                let trace = simulate(&stream, &Greedy, None, &RandomTape::new(s)).unwrap();
                non_maximal += trace.matchings.iter().enumerate().filter(|(i, m)| !is_maximal(&stream.prefix(i + 1), m)).count();
                trace.total
            })
            .collect();
        totals.sort_unstable();
        medians.push((n, (totals[14] + totals[15]) as f64 / 2.0));
    }
    let ratios = [medians[1].1 / medians[0].1, medians[2].1 / medians[1].1];
    vec![(
        "",
        non_maximal == 0 && ratios.iter().all(|&r| r <= 2.5),
        format!("medians {medians:?}; doubling ratios {ratios:.3?} (bound 2.5); {non_maximal} non-maximal prefixes"),
    )]
}

fn greedy_lower_bound() -> Vec<(&'static str, bool, String)> {
    let results: Vec<(usize, usize)> = [10usize, 50, 200]
        .iter()
        .map(|&n| {
            let (g, order, p) = adversarial_greedy_instance(n).unwrap();
            let before = greedy_matching(&g, &order).unwrap();
            let after = greedy_matching(&g.apply(p).unwrap(), &order).unwrap();
            (n, hamming(&before, &after))
        })
        .collect();
    vec![("", results.iter().all(|&(n, d)| d + 3 >= n), format!("(n, d_H) = {results:?}"))]
}

fn oracle_consistency() -> Vec<(&'static str, bool, String)> {
    let mut bad = 0;
    let mut count = 0;
    let mut seed = 0u64;
    while count < 100 {
        seed += 1;
        let n = 2 + (seed % 7) as usize;
        let g = generate(GraphKind::Gnp { n, p: 0.2 + 0.5 * unit(seed, 4) }, 9000 + seed).unwrap();
        if g.m() > 8 {
            continue;
        }
        count += 1;
        let wg = random_weights(g.clone(), 1, 100, seed).unwrap();
        let edges = g.edges();
        let (mut best, mut best_w) = (0usize, 0.0f64);
        for mask in 0u32..1 << edges.len() {
            let chosen = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]);
            if let Ok(m) = Matching::from_edges(chosen) {
                best = best.max(m.len());
                best_w = best_w.max(m.weight(&wg.weights).unwrap());
            }
        }
        let (size, witness) = max_matching(&g).unwrap();
        let (weight, wwitness) = max_weight_matching(&wg).unwrap();
        if size != best || weight != best_w || witness.len() != size || wwitness.weight(&wg.weights).unwrap() != weight {
            bad += 1;
        }
    }
    vec![("", bad == 0, format!("{bad} of {count} graphs disagree"))]
}

fn cli_determinism() -> Vec<(&'static str, bool, String)> {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    std::fs::write(path("fig.el"), "6 5\n0 1\n2 3\n0 5\n1 2\n3 4\n").unwrap();
    std::fs::write(path("tri.el"), "3 3\n0 1\n1 2\n0 2\n").unwrap();
    std::fs::write(path("order.txt"), "5 4 3 2 1 0\n").unwrap();
    let run = |args: &[&str], out: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_lowsens")).args(args).args(["--out", out]).status().unwrap();
        (status.success(), std::fs::read(out).unwrap_or_default())
    };
    let (fig, tri, order) = (path("fig.el"), path("tri.el"), path("order.txt"));
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "gnp", "--n", "30", "--p", "0.2", "--seed", "4"],
        vec!["gen", "bounded", "--n", "30", "--max-degree", "3", "--weights", "1", "9", "--seed", "4"],
        vec!["match", "greedy", "--graph", &fig, "--seed", "7"],
        vec!["match", "approx", "--graph", &fig, "--seed", "7"],
        vec!["match", "lca", "--graph", &fig, "--probes"],
        vec!["sens", "--alg", "greedy", "--graph", &tri, "--trials", "5000", "--seed", "1"],
        vec!["sens", "--alg", "approx", "--graph", &fig, "--trials", "200", "--seed", "1", "--format", "csv", "--jobs", "2"],
        vec!["online", "--alg", "greedy", "--graph", &fig, "--seed", "3"],
        vec!["online", "--alg", "lca", "--graph", &fig, "--arrival-order", "file", "--order-file", &order],
        vec!["lb", "greedy", "--n", "12"],
        vec!["lb", "randomized", "0.0125", "--trials", "200", "--seed", "2"],
        vec!["oracle", "--graph", &fig],
    ];
    let mut differing = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let (ok_a, a) = run(args, &path(&format!("{i}.a")));
        let (ok_b, b) = run(args, &path(&format!("{i}.b")));
        if !(ok_a && ok_b && a == b && !a.is_empty()) {
            differing.push(args.join(" "));
        }
    }
    vec![("", differing.is_empty(), format!("{} commands run twice; mismatched or failed: {differing:?}", commands.len()))]
}

fn main() -> ExitCode {
    let mut outcomes = greedy_vertex_deletions();
    let s = Duration::from_secs;
    outcomes.extend(criterion("3", "layered graph correctness", s(60), layered_correctness));
    outcomes.extend(criterion("4", "approx floor and quality", s(300), approx_quality));
    outcomes.extend(criterion("5", "approx sensitivity flat in n", s(600), approx_flatness));
    outcomes.extend(criterion("6", "LCA pipeline and locality", s(300), lca_pipeline));
    outcomes.extend(criterion("7", "weighted approximation and flatness", s(300), weighted_criteria));
    outcomes.extend(criterion("8", "online replacements grow linearly", s(300), online_replacements));
    outcomes.extend(criterion("9", "greedy lower-bound witness", s(1), greedy_lower_bound));
    outcomes.extend(criterion("10", "oracle self-consistency", s(60), oracle_consistency));
    outcomes.extend(criterion("11", "CLI reruns are byte-identical", s(300), cli_determinism));

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let expected = EXPECTED_FAILURES.contains(&o.id);
        let note = if expected { " (documented expected failure)" } else { "" };
        println!("[{tag}] {:>3} {}: {} [{:.1?}]{note}", o.id, o.name, o.detail, o.elapsed);
        if o.pass == expected {
            unexpected.push(o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} passed; unexpected results: {unexpected:?}", outcomes.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

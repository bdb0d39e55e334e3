//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mac_forest::adversary::ActivationSchedule;
use mac_forest::channel::{emulate_cd, BlindChannel, Channel, FeedbackKind, Message};
use mac_forest::graph::generate::{generate_instance, GraphKind, WeightKind};
use mac_forest::graph::{Edge, WeightedEdge};
use mac_forest::harness::{activation_trial, five_phase_trial, weight_trial};
use mac_forest::oracle::{check_c_correct, check_spanning_forest, estimate_lemma_probabilities, kruskal_msf, Regime};
use mac_forest::seed::trial_seed;
use mac_forest::station::{run_algorithm, AlgorithmName, ContentionSample, RunOptions};
use mac_forest::{IntGraph, Rational, RationalGraph};

/// det-general: steps <= C * min(m, |T| ceil(lg m)) + C. Calibrated on the criterion-1 grid, then frozen.
const DET_GENERAL_C: f64 = 3.0;
/// rand-weighted-general: steps <= 2(m+1) + C.
const SWEEP_SLACK: u64 = 2;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn ceil_lg(x: usize) -> u64 {
    (x.max(1) as u64).next_power_of_two().trailing_zeros() as u64
}

fn grid() -> Vec<(String, RationalGraph)> {
    let shapes: [(GraphKind, u32, usize); 20] = [
        (GraphKind::Path, 64, 63),
        (GraphKind::Path, 256, 255),
        (GraphKind::Star, 100, 99),
        (GraphKind::Star, 256, 255),
        (GraphKind::Tree, 50, 49),
        (GraphKind::Tree, 200, 199),
        (GraphKind::RandomForest, 120, 80),
        (GraphKind::RandomForest, 256, 200),
        (GraphKind::RandomConnected, 32, 100),
        (GraphKind::RandomConnected, 64, 400),
        (GraphKind::RandomConnected, 128, 600),
        (GraphKind::RandomConnected, 256, 1000),
        (GraphKind::RandomConnected, 256, 1200),
        (GraphKind::Random, 80, 120),
        (GraphKind::Random, 200, 300),
        (GraphKind::Dense, 16, 120),
        (GraphKind::Dense, 32, 496),
        (GraphKind::Dense, 48, 1128),
        (GraphKind::RandomConnected, 20, 150),
        (GraphKind::RandomConnected, 160, 1000),
    ];
    shapes
        .iter()
        .enumerate()
        .map(|(i, &(kind, n, m))| {
            let weights = if i % 2 == 0 { WeightKind::Distinct } else { WeightKind::KDistinct(3) };
            let g = generate_instance(kind, n, m, weights, i as u64).expect("grid instance");
            (format!("{kind}-n{n}-m{m}-{weights}"), g)
        })
        .collect()
}

const SEEDS_PER_INSTANCE: u64 = 10;

/// Criteria 1 and 2 share the grid; det-general step counts are returned for the bound check.
fn correctness(grid: &[(String, RationalGraph)]) -> (Verdict, Vec<(usize, usize, u64)>) {
    let algorithms = [
        AlgorithmName::DetSimple,
        AlgorithmName::DetGeneral,
        AlgorithmName::RandSimple,
        AlgorithmName::RandWeighted,
        AlgorithmName::RandWeightedGeneral,
        AlgorithmName::DetAdversarial,
    ];
    let mut runs = 0;
    let mut failures = Vec::new();
    let mut det_general = Vec::new();
    for (i, (label, g)) in grid.iter().enumerate() {
        let (msf, best) = kruskal_msf(g);
        for name in algorithms {
            for s in 0..SEEDS_PER_INSTANCE {
                runs += 1;
                let opts = RunOptions { seed: trial_seed(1, i as u64, s), checks: true, ..Default::default() };
                match run_algorithm(name, g, &opts) {
                    Ok(out) => {
                        let mut ok = check_spanning_forest(g, &out.forest);
                        if name.is_weighted() {
                            ok &= out.weight.as_ref() == Some(&best);
                        }
                        if !ok {
                            failures.push(format!("{name} on {label} seed {s}"));
                        }
                        if name == AlgorithmName::DetGeneral {
                            det_general.push((g.m(), msf.len(), out.steps));
                        }
                    }
                    Err(e) => failures.push(format!("{name} on {label} seed {s}: {e}")),
                }
            }
        }
    }
    let pairs = grid.len() as u64 * SEEDS_PER_INSTANCE;
    let ok = failures.is_empty() && pairs >= 200;
    let detail = format!("{runs} runs over {pairs} (instance, seed) pairs per algorithm, {} failures {:?}", failures.len(), failures.iter().take(3).collect::<Vec<_>>());
    (verdict(ok, detail), det_general)
}

fn det_general_bound(runs: &[(usize, usize, u64)]) -> Verdict {
    let mut worst_ratio: f64 = 0.0;
    let mut violations = 0;
    for &(m, t, steps) in runs {
        let scale = (m as u64).min(t as u64 * ceil_lg(m)) as f64;
        let ratio = (steps as f64 - DET_GENERAL_C) / scale.max(1.0);
        worst_ratio = worst_ratio.max(ratio);
        if steps as f64 > DET_GENERAL_C * scale + DET_GENERAL_C || steps > 2 * (m as u64 + 1) {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("C = {DET_GENERAL_C}, worst (steps - C)/min(m, |T| lg m) = {worst_ratio:.3}, {violations} violations in {} runs", runs.len()))
}

fn rand_simple_scaling() -> (Verdict, Vec<ContentionSample>) {
    let mut samples = Vec::new();
    let mut rows = Vec::new();
    let mut cap_ok = true;
    for (i, t) in [31usize, 127, 511].into_iter().enumerate() {
        let g = generate_instance(GraphKind::Tree, t as u32 + 1, t, WeightKind::None, 100 + i as u64).unwrap();
        let mut steps = Vec::with_capacity(1000);
        for s in 0..1000 {
            let opts = RunOptions { seed: trial_seed(3, i as u64, s), samples: true, ..Default::default() };
            match run_algorithm(AlgorithmName::RandSimple, &g, &opts) {
                Ok(out) => {
                    cap_ok &= out.steps <= 4 * (t as u64 + 1) && check_spanning_forest(&g, &out.forest);
                    steps.push(out.steps as f64 / t as f64);
                    samples.extend(out.samples);
                }
                Err(_) => cap_ok = false,
            }
        }
        let mean = steps.iter().sum::<f64>() / steps.len() as f64;
        let var = steps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (steps.len() as f64 - 1.0);
        rows.push((t, mean, (var / steps.len() as f64).sqrt()));
    }
    let in_band = rows.iter().all(|&(_, mean, _)| (1.0..=64.0).contains(&mean));
    let monotone = rows.windows(2).all(|w| w[1].1 <= w[0].1 + 3.0 * (w[0].2.powi(2) + w[1].2.powi(2)).sqrt());
    let shown: Vec<String> = rows.iter().map(|(t, m, se)| format!("|T|={t}: {m:.3}±{se:.3}")).collect();
    let v = verdict(in_band && monotone && cap_ok, format!("mean steps/|T| {}; band {in_band}, non-increasing {monotone}, within 4(m+1) {cap_ok}", shown.join(", ")));
    (v, samples)
}

fn lemma_estimators(samples: &[ContentionSample]) -> Verdict {
    const NEED: u64 = 10_000;
    let buckets = estimate_lemma_probabilities(samples);
    let over = buckets[&Regime::Overestimate];
    let under = buckets[&Regime::Underestimate];
    let good = buckets[&Regime::Good];
    let heard_floor = 1.0 / (3.0 * 3f64.exp());
    let checks = [
        over.total() >= NEED && over.frequency(FeedbackKind::Silence) > 0.5,
        under.total() >= NEED && under.frequency(FeedbackKind::Collision) > 0.5,
        good.total() >= NEED && good.frequency(FeedbackKind::Heard) >= heard_floor - 3.0 * good.std_error(FeedbackKind::Heard),
    ];
    verdict(
        checks.iter().all(|&c| c),
        format!(
            "silence {:.3} (n={}), collision {:.3} (n={}), heard {:.3} >= {:.4} (n={})",
            over.frequency(FeedbackKind::Silence),
            over.total(),
            under.frequency(FeedbackKind::Collision),
            under.total(),
            good.frequency(FeedbackKind::Heard),
            heard_floor,
            good.total()
        ),
    )
}

/// Least squares for `y = alpha * t + beta * x` with `t` fixed, i.e. `y = a + beta * x`.
fn fit(points: &[(f64, f64)]) -> (f64, f64) {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let beta = sxy / sxx;
    (my - beta * mx, beta)
}

/// k-distinct weights are small integers; u64 keeps the per-station sweep logs cheap.
fn integer_weights(g: &RationalGraph) -> IntGraph {
    let weights = g.weights().expect("weighted instance");
    let edges = g
        .edges()
        .iter()
        .zip(weights)
        .map(|(&edge, w)| {
            assert!(w.is_integer());
            WeightedEdge { edge, weight: w.to_integer().try_into().expect("small weight") }
        })
        .collect();
    IntGraph::weighted(g.n(), edges).unwrap()
}

fn rand_weighted_scaling() -> Verdict {
    let (n, m, seeds) = (128u32, 1016usize, 500u64);
    let lg_m = ceil_lg(m) as f64;
    let mut points = Vec::new();
    let mut t_size = 0;
    let mut general_ok = true;
    let mut exact = true;
    for w in [1u32, 4, 16] {
        let g = integer_weights(&generate_instance(GraphKind::RandomConnected, n, m, WeightKind::KDistinct(w), 200 + w as u64).unwrap());
        let (msf, best) = kruskal_msf(&g);
        t_size = msf.len();
        let mut total = 0u64;
        for s in 0..seeds {
            let opts = RunOptions { seed: trial_seed(5, w as u64, s), ..Default::default() };
            let out = run_algorithm(AlgorithmName::RandWeighted, &g, &opts).unwrap();
            exact &= out.weight.as_ref() == Some(&best);
            total += out.steps;
            let general = run_algorithm(AlgorithmName::RandWeightedGeneral, &g, &opts).unwrap();
            general_ok &= general.steps <= 2 * (m as u64 + 1) + SWEEP_SLACK && general.weight.as_ref() == Some(&best);
        }
        points.push((w as f64 * lg_m, total as f64 / seeds as f64));
    }
    let (intercept, beta) = fit(&points);
    let alpha = intercept / t_size as f64;
    let residuals: Vec<f64> = points.iter().map(|&(x, y)| y - (intercept + beta * x)).collect();
    let rel = residuals.iter().zip(&points).map(|(r, p)| r.abs() / p.1).fold(0.0, f64::max);
    // The affine model must not leave a residual that keeps growing with W.
    let trend_ok = !(residuals[0] < 0.0 && residuals[1] < 0.0 && residuals[2] > 0.0) || rel <= 0.1;
    let ok = alpha >= 0.0 && beta >= 0.0 && trend_ok && rel <= 0.25 && general_ok && exact;
    let means: Vec<String> = points.iter().map(|p| format!("{:.1}", p.1)).collect();
    verdict(
        ok,
        format!(
            "mean steps for W=1,4,16: [{}]; alpha={alpha:.3}, beta={beta:.3}, max rel residual {rel:.3}; exact MSF {exact}; general within 2(m+1)+{SWEEP_SLACK}: {general_ok}",
            means.join(", ")
        ),
    )
}

fn five_phase() -> Verdict {
    let trials: Vec<_> = (0..25).map(|s| five_phase_trial(24, 72, 1 + (s as usize % 6), s)).collect();
    let failed = trials.iter().filter(|r| !r.as_ref().is_ok_and(|r| r.passed() && r.bound == 24)).count();
    verdict(failed == 0, format!("{} schedules at n=24, m=72, k=24; {failed} failed", trials.len()))
}

fn weight_lower_bound() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for m in [16usize, 32, 64] {
        let mut least = u64::MAX;
        for seed in 0..5 {
            match weight_trial(AlgorithmName::ObliviousRr, m, seed) {
                Ok(r) => {
                    ok &= r.passed();
                    least = least.min(r.forced_steps);
                }
                Err(_) => ok = false,
            }
        }
        lines.push(format!("m={m}: first lightest-edge step >= {least} (need {})", m / 2));
    }
    verdict(ok, lines.join("; "))
}

fn activation_lower_bound() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for m in [64usize, 256, 1024] {
        for kind in [GraphKind::Path, GraphKind::Star, GraphKind::RandomForest] {
            match activation_trial(kind, m, 2, m as u64) {
                Ok(r) => {
                    ok &= r.passed();
                    if kind == GraphKind::Path {
                        lines.push(format!("m={m}: {} steps >= {}", r.forced_steps, r.bound));
                    }
                }
                Err(e) => {
                    ok = false;
                    lines.push(format!("m={m} {kind}: {e}"));
                }
            }
        }
    }
    verdict(ok, format!("paths, stars and random forests; {}", lines.join("; ")))
}

fn two_correctness() -> Verdict {
    let mut failed = Vec::new();
    for trial in 0..100u64 {
        let (kind, n, m) = match trial % 4 {
            0 => (GraphKind::Path, 40, 39),
            1 => (GraphKind::RandomConnected, 30, 80),
            2 => (GraphKind::RandomForest, 50, 30),
            _ => (GraphKind::Dense, 12, 66),
        };
        let g = generate_instance(kind, n, m, WeightKind::None, trial).unwrap();
        let horizon = [5, 40, 200, 1000][(trial / 4 % 4) as usize];
        let schedule = ActivationSchedule::random(m, horizon, trial);
        let opts = RunOptions { checks: true, trace: true, schedule: Some(schedule), ..Default::default() };
        let ok = run_algorithm(AlgorithmName::DetAdversarial, &g, &opts)
            .and_then(|out| check_c_correct(out.trace.as_ref().unwrap(), &out.schedule, &g, 2, &out.forest))
            .unwrap_or(false);
        if !ok {
            failed.push(trial);
        }
    }
    verdict(failed.is_empty(), format!("100 random schedules; failed trials {failed:?}"))
}

fn cd_emulation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut mismatches = 0;
    let mut cost_ok = true;
    for _ in 0..1000 {
        let stations = rng.gen_range(1..=10u32);
        let mut native: Channel<Rational> = Channel::new(stations as usize);
        let mut blind: BlindChannel<Rational> = BlindChannel::new(stations as usize);
        for s in 1..=stations {
            native.activate(s);
            blind.activate(s);
        }
        let leader = rng.gen_range(1..=stations);
        for _ in 0..rng.gen_range(1..30) {
            let mut attempts: Vec<(u32, Message<Rational>)> = Vec::new();
            for s in 1..=stations {
                if rng.gen_bool(0.3) {
                    let msg = if rng.gen_bool(0.5) { Message::Dummy } else { Message::Edge(Edge::new(s, s + 1).unwrap()) };
                    attempts.push((s, msg));
                }
            }
            let expected = native.step(attempts.clone(), Vec::new()).unwrap();
            if emulate_cd(&mut blind, &attempts, leader).unwrap() != expected {
                mismatches += 1;
            }
        }
        cost_ok &= blind.now() == 2 * native.now();
    }
    verdict(mismatches == 0 && cost_ok, format!("1000 schedules, {mismatches} mismatches, exact 2x cost {cost_ok}"))
}

fn main() -> ExitCode {
    let mut results: BTreeMap<u32, (&str, Verdict, f64)> = BTreeMap::new();
    let mut timed = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        println!("{} C{id:<2} {name}: {} ({secs:.1}s)", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        results.insert(id, (name, v, secs));
    };

    let grid = grid();
    let mut det_general = Vec::new();
    timed(1, "correctness suite", &mut || {
        let (v, runs) = correctness(&grid);
        det_general = runs;
        v
    });
    timed(2, "det-general step bound", &mut || det_general_bound(&det_general));
    let mut samples = Vec::new();
    timed(3, "rand-simple linear scaling", &mut || {
        let (v, s) = rand_simple_scaling();
        samples = s;
        v
    });
    timed(4, "contention regime estimators", &mut || lemma_estimators(&samples));
    timed(5, "rand-weighted scaling", &mut rand_weighted_scaling);
    timed(6, "five-phase witness", &mut five_phase);
    timed(7, "weight adversary", &mut weight_lower_bound);
    timed(8, "activation adversary", &mut activation_lower_bound);
    timed(9, "2-correctness", &mut two_correctness);
    timed(10, "collision-detection emulation", &mut cd_emulation);

    if results.values().all(|(_, v, _)| v.ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

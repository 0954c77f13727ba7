//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use rrcma::benchmarks::make_problem;
use rrcma::harness::analysis::{compute_ecdf, ecdf_curve, ecdf_targets, evaluation_grid};
use rrcma::harness::logs::{read_events, read_manifest, read_trajectory};
use rrcma::harness::runner::run_seed;
use rrcma::harness::{run_experiment, verify_dir, ExperimentConfig};
use rrcma::numerics::{gamma_function, Matrix, RngStream, Vector};
use rrcma::redundancy::{classify, rrf, RestartRecord, RunLedger};
use rrcma::repelling::{rejection_radius, shrunken_threshold, DEFAULT_GAMMA};
use rrcma::{hv_test, run_rr_cmaes, HvConfig, RepellingConfig, RunSpec, StrategyKind};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

const BASE_SEED: u64 = 20_240_901;

/// RRF and redundant-restart count of one naive run on a 2-D problem.
fn rrf_run(name: &str, run: usize, sigma0: f64, budget: usize, coverage: Option<f64>) -> (f64, usize) {
    let instance = (run % 10) as u64;
    let problem = make_problem(name, 2, instance).unwrap();
    let seed = run_seed(BASE_SEED, name, 2, instance, run);
    let mut spec = RunSpec::new(StrategyKind::Naive, sigma0, budget, seed);
    if let Some(c) = coverage {
        spec = spec.with_repelling(RepellingConfig::new(c, DEFAULT_GAMMA, sigma0).unwrap());
    }
    let mut out = run_rr_cmaes(&problem, &spec, "acceptance").unwrap();
    classify(&mut out.ledger, |x| problem.evaluate(x), HvConfig::default());
    (rrf(&out.ledger).unwrap(), out.ledger.n_redundant())
}

fn rrfs(name: &str, runs: usize, coverage: Option<f64>) -> Vec<(f64, usize)> {
    (0..runs)
        .into_par_iter()
        .map(|r| rrf_run(name, r, 2.0, 20_000, coverage))
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_var(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn exact_unit_math() -> Outcome {
    let mut worst_radius: f64 = 0.0;
    for (v, d, expected) in [(3.0, 1, 1.5), (PI, 2, 1.0), (4.0 * PI / 3.0, 3, 1.0)] {
        worst_radius = worst_radius.max((rejection_radius(v, d) - expected).abs());
    }
    let mut worst_gamma: f64 = 0.0;
    for k in 0..=10 {
        let z = 0.5 + k as f64;
        let lhs = gamma_function(z + 1.0).unwrap();
        let rhs = z * gamma_function(z).unwrap();
        worst_gamma = worst_gamma.max(((lhs - rhs) / rhs).abs());
    }
    let mut ledger = RunLedger::new(vec![0.0], 0.0);
    for (i, red) in [false, true, false].into_iter().enumerate() {
        ledger.records.push(RestartRecord {
            index: i + 1,
            x: vec![0.0],
            f: 0.0,
            evals: 100,
            redundant: Some(red),
        });
    }
    ledger.total_evals = 400;
    let fixture = rrf(&ledger).unwrap();
    outcome(
        worst_radius <= 1e-12 && worst_gamma <= 1e-10 && fixture == 0.25,
        format!("radius err {worst_radius:.1e}, gamma recurrence err {worst_gamma:.1e}, RRF fixture {fixture}"),
    )
}

fn sphere_sanity() -> Outcome {
    let problem = make_problem("sphere", 5, 0).unwrap();
    let solved = (0..50u64)
        .into_par_iter()
        .filter(|&seed| {
            let spec = RunSpec::new(StrategyKind::Naive, 2.0, 25_000, seed);
            let out = run_rr_cmaes(&problem, &spec, "sphere").unwrap();
            out.best_f - problem.f_star <= 1e-8
        })
        .count();
    outcome(solved * 100 >= 95 * 50, format!("{solved}/50 runs reach 1e-8"))
}

fn redundancy_exists() -> Outcome {
    let runs = rrfs("himmelblau", 100, None);
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let m = mean(&values);
    let max_red = runs.iter().map(|r| r.1).max().unwrap();
    outcome(
        m > 0.10 && max_red >= 4,
        format!("mean RRF {m:.3}, most redundant restarts in one run {max_red}"),
    )
}

fn repelling_halves_rrf() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["himmelblau", "gallagher21"] {
        let off: Vec<f64> = rrfs(name, 50, None).iter().map(|r| r.0).collect();
        let on: Vec<f64> = rrfs(name, 50, Some(2.0)).iter().map(|r| r.0).collect();
        let (m_off, m_on) = (mean(&off), mean(&on));
        pass &= m_on <= 0.5 * m_off;
        parts.push(format!("{name}: off {m_off:.3}, c=2 {m_on:.3} (ratio {:.2})", m_on / m_off));
    }
    outcome(pass, parts.join("; "))
}

fn coverage_monotonicity() -> Outcome {
    let cs = [2.0, 10.0, 100.0, 1000.0];
    let samples: Vec<Vec<f64>> = cs
        .iter()
        .map(|&c| rrfs("gallagher21", 50, Some(c)).iter().map(|r| r.0).collect())
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 0..cs.len() {
        parts.push(format!("c={} {:.3}", cs[k], mean(&samples[k])));
    }
    for k in 0..cs.len() - 1 {
        let (a, b) = (&samples[k], &samples[k + 1]);
        let se = (sample_var(a) / a.len() as f64 + sample_var(b) / b.len() as f64).sqrt();
        pass &= mean(a) <= mean(b) + se;
    }
    outcome(pass, parts.join(", "))
}

fn structure_ordering() -> Outcome {
    let med = |name: &str| median(&rrfs(name, 100, None).iter().map(|r| r.0).collect::<Vec<_>>());
    let (g, r, s) = (med("gallagher21"), med("rastrigin"), med("sphere"));
    outcome(
        g > r && r > s && s == 0.0,
        format!("median RRF gallagher21 {g:.3}, rastrigin {r:.3}, sphere {s:.3}"),
    )
}

/// Basin label of every grid point under discrete steepest descent.
fn descent_labels(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut label = vec![usize::MAX; n];
    for start in 0..n {
        let mut path = Vec::new();
        let mut i = start;
        while label[i] == usize::MAX {
            path.push(i);
            let mut next = i;
            if i > 0 && values[i - 1] < values[next] {
                next = i - 1;
            }
            if i + 1 < n && values[i + 1] < values[next] {
                next = i + 1;
            }
            if next == i {
                label[i] = i;
                break;
            }
            i = next;
        }
        let l = label[i];
        for p in path {
            label[p] = l;
        }
    }
    label
}

fn hill_valley_oracle_agreement() -> Outcome {
    let problem = make_problem("five-uneven-peak-trap", 1, 0).unwrap();
    let (lo, hi) = (0.0, 30.0);
    let n = 300_001;
    let step = (hi - lo) / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|i| problem.evaluate(&[lo + step * i as f64])).collect();
    let labels = descent_labels(&values);
    let basin = |x: f64| labels[((x - lo) / step).round() as usize];

    let mut rng = RngStream::new(7);
    let mut agree = 0;
    for _ in 0..500 {
        let a = rng.uniform_in(lo, hi);
        let b = rng.uniform_in(lo, hi);
        let hv = hv_test(
            &[a],
            problem.evaluate(&[a]),
            &[b],
            problem.evaluate(&[b]),
            |x| problem.evaluate(x),
            HvConfig::default(),
        );
        if hv.same_basin == (basin(a) == basin(b)) {
            agree += 1;
        }
    }
    outcome(agree * 100 >= 95 * 500, format!("{agree}/500 pairs agree"))
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.join("runs"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.push(("manifest.json".into(), std::fs::read(dir.join("manifest.json")).unwrap()));
    files.sort();
    files
}

fn property_suites() -> Outcome {
    let mut failures = Vec::new();

    // Hill-Valley symmetry
    let problem = make_problem("himmelblau", 2, 0).unwrap();
    let mut rng = RngStream::new(11);
    let mut asym = 0;
    for _ in 0..1000 {
        let a: Vec<f64> = (0..2).map(|_| rng.uniform_in(-5.0, 5.0)).collect();
        let b: Vec<f64> = (0..2).map(|_| rng.uniform_in(-5.0, 5.0)).collect();
        let (fa, fb) = (problem.evaluate(&a), problem.evaluate(&b));
        let f = |x: &[f64]| problem.evaluate(x);
        let ab = hv_test(&a, fa, &b, fb, f, HvConfig::default());
        let ba = hv_test(&b, fb, &a, fa, f, HvConfig::default());
        if ab != ba {
            asym += 1;
        }
    }
    if asym > 0 {
        failures.push(format!("{asym} asymmetric HV pairs"));
    }

    // logged archive bookkeeping, trajectories, ECDF and determinism
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.problems = vec!["himmelblau".into(), "gallagher21".into()];
    cfg.instances = vec![0, 1, 2];
    cfg.strategies = vec![StrategyKind::Naive, StrategyKind::Ipop, StrategyKind::Bipop];
    cfg.repelling = true;
    cfg.coverage = vec![2.0, 100.0];
    cfg.runs = 3;
    cfg.budget = Some(8000);
    cfg.seed = 5;
    cfg.out = tmp.path().join("exp");
    run_experiment(&cfg).unwrap();
    let report = verify_dir(&cfg.out).unwrap();
    if !report.is_clean() {
        failures.push(format!("{} logged invariant violations", report.violations.len()));
    }
    let manifest = read_manifest(&cfg.out).unwrap();
    let mut sum_mismatch = 0;
    for entry in &manifest.runs {
        let events = read_events(&cfg.out.join(&entry.events_file)).unwrap();
        let updates = events.iter().filter(|e| e.archive_updated).count();
        if events.last().map_or(0, |e| e.archive_hits) != updates {
            sum_mismatch += 1;
        }
        let traj = read_trajectory(&cfg.out.join(&entry.trajectory_file)).unwrap();
        if traj.windows(2).any(|w| w[1].best_f > w[0].best_f) {
            failures.push(format!("{}: trajectory not monotone", entry.run_id));
        }
        let grid = evaluation_grid(entry.budget);
        let curve = ecdf_curve(&[(&traj, 0.0)], &grid, &ecdf_targets());
        if curve.windows(2).any(|w| w[1] < w[0]) {
            failures.push(format!("{}: ECDF decreases", entry.run_id));
        }
    }
    if sum_mismatch > 0 {
        failures.push(format!("{sum_mismatch} runs with archive hits != restarts"));
    }
    let ecdf = compute_ecdf(&[cfg.out.clone()]).unwrap();
    if ecdf
        .windows(2)
        .any(|w| w[0].strategy == w[1].strategy && w[0].function == w[1].function && w[1].fraction < w[0].fraction)
    {
        failures.push("grouped ECDF decreases".into());
    }
    let first = dir_bytes(&cfg.out);
    run_experiment(&cfg).unwrap();
    if dir_bytes(&cfg.out) != first {
        failures.push("rerun logs differ".into());
    }

    // rejection containment, replayed with an explicit inverse
    let mut checked = 0usize;
    let mut violations = 0usize;
    for (name, seed) in [("himmelblau", 1u64), ("gallagher21", 2), ("rastrigin", 3)] {
        let p = make_problem(name, 2, seed).unwrap();
        let mut spec = RunSpec::new(StrategyKind::Naive, 2.0, 6000, seed)
            .with_repelling(RepellingConfig::new(2.0, DEFAULT_GAMMA, 2.0).unwrap());
        spec.audit = true;
        let out = run_rr_cmaes(&p, &spec, "audit").unwrap();
        for g in &out.audit {
            let inv: Matrix = g.covariance.clone().try_inverse().unwrap();
            for s in g.accepted.iter().filter(|s| !s.forced) {
                for (xt, delta) in &g.tabu {
                    let diff = Vector::from_column_slice(&s.x) - Vector::from_column_slice(xt);
                    let dist = (diff.dot(&(&inv * &diff))).max(0.0).sqrt() / g.sigma;
                    checked += 1;
                    if dist < shrunken_threshold(*delta, g.gamma, s.n_rej) * (1.0 - 1e-9) {
                        violations += 1;
                    }
                }
            }
        }
    }
    if checked == 0 || violations > 0 {
        failures.push(format!("{violations}/{checked} accepted offspring inside a tabu region"));
    }

    let detail = if failures.is_empty() {
        format!(
            "1000 HV pairs symmetric, {} logged runs consistent and reproducible, {checked} containment checks",
            manifest.runs.len()
        )
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("exact unit math", exact_unit_math),
        ("CMA-ES sphere sanity", sphere_sanity),
        ("redundancy exists on modified Himmelblau", redundancy_exists),
        ("repelling c=2 halves mean RRF", repelling_halves_rrf),
        ("RRF nondecreasing in coverage factor", coverage_monotonicity),
        ("weak-structure ordering of median RRF", structure_ordering),
        ("Hill-Valley agrees with basin oracle", hill_valley_oracle_agreement),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {name}: {} ({:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! One line per acceptance criterion. Run with
//! `cargo test -p bama --test acceptance`; the process fails if any line does.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bama::experiments::{convergence_study, mc_profile_z, mc_state_z, ConvergenceSpec, NamedPrior};
use bama::reproduce::{class_profiles, fig4_spec, TABLE_PROBES};
use bama_core::mastery::MASTERY_TABLE;
use bama_core::{
    bellman_value, classify, decide, profile_z_moments, run_assessment_stream, run_baseline,
    student_rng, Action, BaselineConfig, History, PolicyConfig, PosteriorState, StopReason,
    StudentProfile, TimeLimit,
};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn state(alpha: f64, beta: f64, n: f64, gamma: f64) -> PosteriorState {
    PosteriorState::new(alpha, beta, n, gamma).unwrap()
}

fn d20() -> TimeLimit {
    TimeLimit::new(20.0).unwrap()
}

const S1: (f64, f64, f64, f64) = (8.0, 2.0, 10.0, 12.0);
const S2: (f64, f64, f64, f64) = (6.0, 4.0, 10.0, 12.0);

fn s1() -> PosteriorState {
    state(S1.0, S1.1, S1.2, S1.3)
}

fn s2() -> PosteriorState {
    state(S2.0, S2.1, S2.2, S2.3)
}

fn case_policy() -> PolicyConfig {
    PolicyConfig {
        d: d20(),
        eta: 0.8,
        xi: 0.5,
        min_items: 0,
        ..PolicyConfig::default()
    }
}

fn fig8_means() -> Outcome {
    let m1 = s1().expected_z(d20()).mean;
    let m2 = s2().expected_z(d20()).mean;
    let ok = (m1 - 0.75).abs() <= 0.01 && (m2 - 0.56).abs() <= 0.01;
    outcome(
        ok,
        format!("E[Z](s1) = {m1:.4} (0.75 ± 0.01), E[Z](s2) = {m2:.4} (0.56 ± 0.01)"),
    )
}

fn prior_calibration() -> Outcome {
    let m = PosteriorState::optimistic().expected_z(d20()).mean;
    outcome(
        (m - 0.5).abs() <= 0.01,
        format!("E[Z](prior) = {m:.4} (0.50 ± 0.01)"),
    )
}

fn fig8_decisions() -> Outcome {
    let cfg = case_policy();
    let run = |s: PosteriorState| {
        let history = History::new(s.expected_z(cfg.d).mean);
        let action = decide(&s, &history, &cfg).unwrap().action;
        (action, bellman_value(&s, &cfg, 0).unwrap())
    };
    let (a1, v1) = run(s1());
    let (a2, v2) = run(s2());
    let ok = a1 == Action::StopMastered && a2 == Action::Continue && v1 > v2;
    outcome(
        ok,
        format!(
            "s1 {} (want StopMastered), s2 {} (want Continue), V(s1) = {v1:.6}, V(s2) = {v2:.6} (want V(s1) > V(s2))",
            a1.as_str(),
            a2.as_str()
        ),
    )
}

fn fig1_asymptote() -> Outcome {
    let mut worst: f64 = 0.0;
    for theta in [0.3, 0.6, 0.9] {
        let m = profile_z_moments(&StudentProfile::new(theta, 50.0).unwrap(), d20()).mean;
        worst = worst.max((m - theta).abs());
    }
    outcome(
        worst < 0.01,
        format!("max |mean - theta| at lambda 50 = {worst:.5} (< 0.01)"),
    )
}

fn fig2_linearity() -> Outcome {
    let mut worst: f64 = 0.0;
    for lambda in [0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 50.0] {
        let full = profile_z_moments(&StudentProfile::new(1.0, lambda).unwrap(), d20()).mean;
        for i in 0..=20 {
            let theta = i as f64 / 20.0;
            let m = profile_z_moments(&StudentProfile::new(theta, lambda).unwrap(), d20()).mean;
            worst = worst.max((m - theta * full).abs());
        }
    }
    outcome(
        worst < 1e-6,
        format!("max |mean(theta) - theta mean(1)| = {worst:.2e} (< 1e-6)"),
    )
}

fn fig4_convergence() -> Outcome {
    let spec = ConvergenceSpec {
        items: 10,
        ..fig4_spec(2024)
    };
    assert_eq!(spec.priors[0].state(), PosteriorState::uninformative());
    let rows = convergence_study(&spec).unwrap();
    let err = rows[10].med_abs_err_theta;
    outcome(
        err <= 0.1,
        format!("median |P(correct) - 0.9| at item 10 = {err:.4} (<= 0.1, 500 reps)"),
    )
}

fn fig5_convergence() -> Outcome {
    let spec = ConvergenceSpec {
        profiles: class_profiles(),
        priors: vec![NamedPrior::new("optimistic", PosteriorState::optimistic())],
        replications: 500,
        items: 7,
        d: d20(),
        seed: 2024,
    };
    let rows = convergence_study(&spec).unwrap();
    let at7: Vec<String> = rows
        .iter()
        .filter(|r| r.item == 7)
        .map(|r| format!("{} {:.4}", r.profile_id, r.med_abs_err_z))
        .collect();
    let ok = rows
        .iter()
        .filter(|r| r.item == 7)
        .all(|r| r.med_abs_err_z <= 0.1);
    outcome(
        ok,
        format!("median |E[Z] error| at item 7 (<= 0.1): {}", at7.join(", ")),
    )
}

fn wheel_spinners() -> Outcome {
    let cfg = PolicyConfig::default();
    let prior = PosteriorState::optimistic();
    let (mut not_mastered, mut early_decline) = (0, 0);
    for stream in 0..1000u64 {
        let mut rng = student_rng(2024, 1_000_000 + stream);
        let theta: f64 = rng.random_range(0.0..=0.25);
        let lambda: f64 = rng.random_range(0.05..=1.0);
        let profile = StudentProfile::new(theta, lambda).unwrap();
        let t = run_assessment_stream(&profile, &prior, &cfg, 2024, stream).unwrap();
        let d = t.final_decision().unwrap();
        if d.action == Action::StopNotMastered {
            not_mastered += 1;
        }
        if d.reason == StopReason::DeclineRule && t.len() <= (cfg.min_items + 3) as usize {
            early_decline += 1;
        }
    }
    let ok = not_mastered == 1000 && early_decline >= 900;
    outcome(
        ok,
        format!(
            "StopNotMastered {not_mastered}/1000 (want all), decline within {} items {early_decline}/1000 (want >= 900)",
            cfg.min_items + 3
        ),
    )
}

fn grid_states() -> Vec<PosteriorState> {
    let accuracy = [
        (1.0, 1.0),
        (8.0, 2.0),
        (6.0, 4.0),
        (0.95, 0.05),
        (2.0, 10.0),
    ];
    let speed = [
        (1.0, 10.0),
        (3.0, 30.0),
        (10.0, 12.0),
        (0.5, 5.0),
        (20.0, 100.0),
    ];
    accuracy
        .iter()
        .flat_map(|&(a, b)| speed.iter().map(move |&(n, g)| state(a, b, n, g)))
        .collect()
}

fn within(exact: f64, mean: f64, stderr: f64) -> bool {
    if stderr == 0.0 {
        exact == mean
    } else {
        (exact - mean).abs() <= 3.0 * stderr
    }
}

fn oracle_equivalence() -> Outcome {
    const DRAWS: u64 = 1_000_000;
    let d = d20();
    let mut worst: f64 = 0.0;
    let mut misses = Vec::new();
    for (i, s) in grid_states().iter().enumerate() {
        let exact = s.expected_z(d).mean;
        let mc = mc_state_z(s, d, DRAWS, 2024, i as u64);
        worst = worst.max((exact - mc.mean).abs() / mc.stderr);
        if !within(exact, mc.mean, mc.stderr) {
            misses.push(format!("state {s:?}"));
        }
    }
    for (i, theta) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
        for (j, lambda) in [0.01, 0.05, 0.2, 1.0, 5.0].into_iter().enumerate() {
            let p = StudentProfile::new(theta, lambda).unwrap();
            let exact = profile_z_moments(&p, d).mean;
            let mc = mc_profile_z(&p, d, DRAWS, 2024, 100 + (5 * i + j) as u64);
            if mc.stderr > 0.0 {
                worst = worst.max((exact - mc.mean).abs() / mc.stderr);
            }
            if !within(exact, mc.mean, mc.stderr) {
                misses.push(format!("profile ({theta}, {lambda})"));
            }
        }
    }
    outcome(
        misses.is_empty(),
        format!("50 points, worst deviation {worst:.2} SE (<= 3); outside: {misses:?}"),
    )
}

fn solver_sanity() -> Outcome {
    let cfg = PolicyConfig::default();
    let mut rng = student_rng(2024, 0);
    let states: Vec<PosteriorState> = (0..1000)
        .map(|_| {
            state(
                rng.random_range(0.05..20.0),
                rng.random_range(0.05..20.0),
                rng.random_range(0.1..20.0),
                rng.random_range(0.5..200.0),
            )
        })
        .collect();
    let thr = cfg.threshold();
    let mut failures = Vec::new();
    let zero = PolicyConfig { xi: 0.0, ..cfg };
    let myopic = PolicyConfig { eta: 0.0, ..cfg };
    let (mut worst_myopic, mut worst_doubling): (f64, f64) = (0.0, 0.0);
    for s in &states {
        if bellman_value(s, &zero, 0).unwrap() != 0.0 {
            failures.push("xi = 0 nonzero");
        }
        let one_step = s.expected_z(cfg.d).mean.min(myopic.threshold());
        worst_myopic = worst_myopic.max((bellman_value(s, &myopic, 0).unwrap() - one_step).abs());
        let v = bellman_value(s, &cfg, 0).unwrap();
        if !(0.0..=thr).contains(&v) {
            failures.push("value outside [0, xi/(1-eta)]");
        }
    }
    if worst_myopic >= 1e-6 {
        failures.push("eta = 0 mismatch");
    }
    let doubled = PolicyConfig {
        quad_nodes: 2 * cfg.quad_nodes,
        ..cfg
    };
    for s in grid_states() {
        let diff =
            (bellman_value(&s, &cfg, 0).unwrap() - bellman_value(&s, &doubled, 0).unwrap()).abs();
        worst_doubling = worst_doubling.max(diff);
    }
    if worst_doubling >= 1e-4 {
        failures.push("node doubling");
    }
    failures.dedup();
    outcome(
        failures.is_empty(),
        format!(
            "1000 random states; eta = 0 error {worst_myopic:.1e} (< 1e-6); node doubling on grid {worst_doubling:.1e} (< 1e-4); failures {failures:?}"
        ),
    )
}

fn table_classification() -> Outcome {
    let ok = TABLE_PROBES
        .iter()
        .zip(MASTERY_TABLE.iter())
        .all(|(&z, row)| classify(z).unwrap() == row.class);
    outcome(
        ok,
        format!("probes {TABLE_PROBES:?} map to the six table rows in order"),
    )
}

fn baseline_policy() -> Outcome {
    let cfg = BaselineConfig::default();
    let profile = StudentProfile::new(0.8, 0.5).unwrap();
    let lengths: Vec<usize> = (0..100)
        .map(|seed| {
            run_baseline(&profile, &PosteriorState::uninformative(), &cfg, seed, 0)
                .unwrap()
                .len()
        })
        .collect();
    let longest = *lengths.iter().max().unwrap();
    outcome(
        longest <= 25,
        format!("longest of 100 seeds: {longest} items (<= 25)"),
    )
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_bama"))
            .args([
                "reproduce",
                "fig8",
                "--seed",
                "7",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .unwrap()
            .status;
        (status.code(), read_dir(&dir))
    };
    let (code_a, a) = run("a");
    let (code_b, b) = run("b");
    let ok =
        !a.is_empty() && a == b && code_a == code_b && a.iter().any(|(n, _)| n == "manifest.json");
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    outcome(
        ok,
        format!("two runs, files {names:?} byte-identical: {}", a == b),
    )
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let Ok(entries) = fs::read_dir(dir) else {
        return Vec::new();
    };
    let mut files: Vec<_> = entries
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let ms = Duration::from_millis;
    let s = Duration::from_secs;
    let criteria: [Criterion; 13] = [
        (1, "case-study means", ms(500), fig8_means),
        (2, "prior calibration", ms(500), prior_calibration),
        (3, "case-study decisions", s(10), fig8_decisions),
        (4, "high-rate asymptote", ms(500), fig1_asymptote),
        (5, "linearity in theta", ms(500), fig2_linearity),
        (6, "accuracy convergence", s(10), fig4_convergence),
        (7, "class convergence", s(30), fig5_convergence),
        (8, "wheel-spinner termination", s(10), wheel_spinners),
        (9, "oracle equivalence", s(60), oracle_equivalence),
        (10, "solver sanity", s(30), solver_sanity),
        (11, "table classification", ms(500), table_classification),
        (12, "baseline cap", s(10), baseline_policy),
        (13, "determinism", s(30), determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let passed = o.passed && elapsed <= budget;
        println!(
            "{} criterion {id:>2} {name}: {} [{:.3} s, budget {:.1} s]",
            if passed { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
        if !passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 13 criteria pass");
    } else {
        println!(
            "acceptance: {} of 13 criteria fail: {failed:?}",
            failed.len()
        );
        std::process::exit(1);
    }
}

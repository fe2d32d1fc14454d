//! Acceptance suite. Runs every criterion in order, prints one pass/fail
//! line per criterion and fails at the end if any criterion failed.
//!
//! `cargo test -p varlab-cli --test acceptance -- --nocapture`

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varlab_cli::commands::simulate_command;
use varlab_cli::ingest::default_column_names;
use varlab_cli::{dump_csv, ingest_str, run_report, IngestOptions, OutputFormat};
use varlab_core::elliptic::{
    gaussian_comonotone_condition, gaussian_subadditivity_gap, normal_cdf, std_normal_quantile, GaussianSpec,
};
use varlab_core::{
    bernoulli_counterexample, check_subadditivity_all_alpha, comonotonic_coupling, convex_order_leq, e4_check,
    is_comonotonic, min_copula_check, random_comonotonic, random_coupling, theorem_equivalence_trial,
    GeneratorSpec, JointDiscreteDistribution, Rational,
};

#[path = "../../core/tests/support/normal_oracle.rs"]
mod normal_oracle;

const INSTANCES_PER_GENERATOR: u64 = 1000;
const TIME_BUDGET: Duration = Duration::from_secs(30);

struct Ledger {
    failed: Vec<u32>,
}

impl Ledger {
    fn record(&mut self, id: u32, title: &str, passed: bool, detail: String) {
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id:>2}: {title}: {detail}");
        if !passed {
            self.failed.push(id);
        }
    }
}

/// Seeded instance `t` of either generator: at most 4 dimensions, at most 8
/// atoms per marginal.
fn spec_for(t: u64) -> GeneratorSpec {
    GeneratorSpec { n: 1 + (t % 4) as usize, max_atoms: 8, ..GeneratorSpec::default() }
}

struct Instances {
    comonotonic: Vec<JointDiscreteDistribution>,
    couplings: Vec<JointDiscreteDistribution>,
}

impl Instances {
    fn all(&self) -> impl Iterator<Item = &JointDiscreteDistribution> {
        self.comonotonic.iter().chain(&self.couplings)
    }
}

fn equivalence_suite(ledger: &mut Ledger) -> Instances {
    let start = Instant::now();
    let mut comonotonic = Vec::new();
    let mut couplings = Vec::new();
    let mut inconsistent = Vec::new();
    for t in 0..INSTANCES_PER_GENERATOR {
        let spec = spec_for(t);
        let c = random_comonotonic(t, &spec).expect("generator spec is valid");
        let g = random_coupling(t, &spec).expect("generator spec is valid");
        for (kind, j) in [("comonotonic", &c), ("coupling", &g)] {
            if !theorem_equivalence_trial(j).consistent {
                inconsistent.push(format!("{kind}#{t}"));
            }
        }
        comonotonic.push(c);
        couplings.push(g);
    }
    let elapsed = start.elapsed();
    ledger.record(
        1,
        "equivalence on 1000 comonotonic + 1000 coupled instances",
        inconsistent.is_empty() && elapsed < TIME_BUDGET,
        format!("{} inconsistent {:?}, {:.2?} (budget {:?})", inconsistent.len(), inconsistent, elapsed, TIME_BUDGET),
    );
    Instances { comonotonic, couplings }
}

fn additive_when_comonotonic(ledger: &mut Ledger, inst: &Instances) {
    let mut checked = 0;
    let mut bad = 0;
    for j in inst.all().filter(|j| is_comonotonic(j).comonotonic) {
        checked += 1;
        if !check_subadditivity_all_alpha(j).additive_everywhere {
            bad += 1;
        }
    }
    ledger.record(
        2,
        "comonotonic instances are additive at every level",
        bad == 0 && checked >= INSTANCES_PER_GENERATOR as usize,
        format!("{checked} comonotonic instances, {bad} not additive"),
    );
}

fn violation_when_not_comonotonic(ledger: &mut Ledger, inst: &Instances) {
    let mut checked = 0;
    let mut bad = 0;
    for j in inst.all().filter(|j| !is_comonotonic(j).comonotonic) {
        checked += 1;
        let report = check_subadditivity_all_alpha(j);
        let witnessed = report.first_violation.as_ref().is_some_and(|alpha| {
            report
                .verdict_at(alpha)
                .is_some_and(|v| v.var_sum > v.sum_of_vars)
        });
        if !witnessed {
            bad += 1;
        }
    }
    ledger.record(
        3,
        "non-comonotonic instances carry a strict violation",
        bad == 0 && checked > 0,
        format!("{checked} non-comonotonic instances, {bad} without a violating interval"),
    );
}

fn bernoulli_counterexamples(ledger: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let one = Rational::one();
    let mut superadditive = 0;
    let mut drawn = 0;
    while drawn < 500 {
        let p = Rational::new(rng.gen_range(1..100), 100);
        let q = Rational::new(rng.gen_range(1..100), 100);
        let lo = (&one - &p) * (&one - &q);
        let hi = &one - std::cmp::max(&p, &q);
        if lo >= hi {
            continue;
        }
        // Interior point of the admissible interval, on a grid fine enough
        // to land arbitrarily close to either end.
        let steps = rng.gen_range(2..1000);
        let k = rng.gen_range(1..steps);
        let alpha = &lo + &((&hi - &lo) * Rational::new(k, steps));
        drawn += 1;
        let r = bernoulli_counterexample(&p, &q, &alpha).expect("parameters are in range");
        if r.precondition && r.superadditive {
            superadditive += 1;
        }
    }
    let fixed = bernoulli_counterexample(&Rational::new(3, 10), &Rational::new(3, 10), &Rational::new(1, 2))
        .expect("parameters are in range");
    let fixed_ok = fixed.var_sum == Rational::from_integer(1) && fixed.sum_of_vars == Rational::zero();
    ledger.record(
        4,
        "Bernoulli pairs are superadditive inside the admissible band",
        superadditive == 500 && fixed_ok,
        format!(
            "{superadditive}/500 superadditive; p=q=3/10, alpha=1/2: VaR(X+Y)={} vs VaR(X)+VaR(Y)={}",
            fixed.var_sum, fixed.sum_of_vars
        ),
    );
}

fn convex_maximality(ledger: &mut Ledger, inst: &Instances) {
    let mut bad = 0;
    for j in &inst.couplings {
        let coupled = comonotonic_coupling(&j.marginals()).expect("marginals are valid");
        let v = convex_order_leq(&j.sum_distribution(), &coupled.sum_distribution());
        if !(v.holds && v.witness_c.is_none()) {
            bad += 1;
        }
    }
    ledger.record(
        5,
        "sum is convex-dominated by the comonotonic sum",
        bad == 0,
        format!("{} couplings, {bad} failures", inst.couplings.len()),
    );
}

fn detector_agreement(ledger: &mut Ledger, inst: &Instances) {
    let mut total = 0;
    let mut disagreements = 0;
    for j in inst.all() {
        total += 1;
        let support = is_comonotonic(j).comonotonic;
        if support != min_copula_check(j) || support != e4_check(j) {
            disagreements += 1;
        }
    }
    ledger.record(
        6,
        "support, min-copula and sum-law detectors agree",
        disagreements == 0 && total == 2 * INSTANCES_PER_GENERATOR as usize,
        format!("{total} instances, {disagreements} disagreements"),
    );
}

/// `G^T G` for a random `rank x n` matrix `G`, so low ranks are common.
fn random_psd(rng: &mut impl Rng, n: usize) -> GaussianSpec {
    let rank = rng.gen_range(1..=n);
    let g: Vec<Vec<f64>> = (0..rank)
        .map(|_| (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect();
    let cov = (0..n)
        .map(|i| (0..n).map(|j| (0..rank).map(|k| g[k][i] * g[k][j]).sum()).collect())
        .collect();
    let mean = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    GaussianSpec::new(mean, cov).expect("Gram matrices are positive semidefinite")
}

fn gaussian_dichotomy(ledger: &mut Ledger) {
    let upper = [0.5, 0.75, 0.9, 0.95, 0.99];
    let lower = [0.01, 0.05, 0.25, 0.5];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    let mut worst_median = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let spec = random_psd(&mut rng, n);
        let gap = |a: f64| gaussian_subadditivity_gap(&spec, a).expect("level in range");
        let median = gap(0.5).abs();
        worst_median = worst_median.max(median);
        if upper.iter().any(|&a| gap(a) < -1e-12) || lower.iter().any(|&a| gap(a) > 1e-12) || median > 1e-12 {
            bad += 1;
        }
    }
    ledger.record(
        7,
        "Gaussian gap is subadditive above 1/2 and superadditive below",
        bad == 0,
        format!("200 random covariances, {bad} violations, max |gap(0.5)| = {worst_median:e}"),
    );
}

fn corr_spec(sigmas: &[f64], rho: impl Fn(usize, usize) -> f64) -> GaussianSpec {
    let n = sigmas.len();
    let cov = (0..n)
        .map(|i| (0..n).map(|j| if i == j { sigmas[i] * sigmas[i] } else { rho(i, j) * sigmas[i] * sigmas[j] }).collect())
        .collect();
    GaussianSpec::new(vec![1.0; n], cov).expect("valid covariance")
}

fn degeneracy_condition(ledger: &mut Ledger) {
    let degenerate = [
        corr_spec(&[1.0, 2.0, 0.5], |_, _| 1.0),
        corr_spec(&[0.3, 0.3, 4.0, 1.0], |_, _| 1.0),
        corr_spec(&[0.0, 3.0, 0.0], |_, _| 0.0),
        corr_spec(&[2.5], |_, _| 1.0),
        corr_spec(&[0.0, 0.0], |_, _| 0.0),
    ];
    let grid: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
    let mut max_gap = 0.0f64;
    let mut conditions = true;
    for spec in &degenerate {
        conditions &= gaussian_comonotone_condition(spec);
        for &a in &grid {
            max_gap = max_gap.max(gaussian_subadditivity_gap(spec, a).expect("level in range").abs());
        }
    }
    let degenerate_ok = conditions && max_gap <= 1e-10;

    // A single correlation nudged off 1 between two non-deterministic
    // coordinates. The third coordinate in the second case is constant, so
    // the matrix stays positive semidefinite.
    let perturbed = [
        corr_spec(&[1.0, 2.0], |_, _| 0.999),
        corr_spec(&[1.0, 0.5, 0.0], |i, j| if i + j == 1 { 0.999 } else { 1.0 }),
    ];
    let mut perturbed_ok = true;
    let mut gaps = Vec::new();
    for spec in &perturbed {
        let g = gaussian_subadditivity_gap(spec, 0.95).expect("level in range");
        gaps.push(g);
        perturbed_ok &= !gaussian_comonotone_condition(spec) && g > 0.0;
    }
    ledger.record(
        8,
        "zero gap exactly under the comonotone condition",
        degenerate_ok && perturbed_ok,
        format!("degenerate max |gap| = {max_gap:e}, condition held = {conditions}; perturbed gaps at 0.95 = {gaps:?}"),
    );
}

fn quantile_oracle(ledger: &mut Ledger) {
    let mut worst_lib = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for k in 1..1000 {
        let a = k as f64 / 1000.0;
        let z = std_normal_quantile(a).expect("level in range");
        worst_lib = worst_lib.max((normal_cdf(z) - a).abs());
        worst_oracle = worst_oracle.max((normal_oracle::cdf(z) - a).abs());
    }
    let z = std_normal_quantile(0.975).expect("level in range");
    let reference = normal_oracle::quantile_bisect(0.975, 1e-15);
    let diff = (z - reference).abs();
    ledger.record(
        9,
        "normal quantile round trip and bisection oracle",
        worst_lib <= 1e-10 && worst_oracle <= 1e-10 && diff <= 1e-9,
        format!(
            "max round-trip error {worst_lib:e} (library cdf), {worst_oracle:e} (oracle cdf); \
             quantile(0.975) = {z}, oracle {reference}, |diff| = {diff:e}"
        ),
    );
}

fn run_binary(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_varlab"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "varlab {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn round_trip_and_determinism(ledger: &mut Ledger) {
    let mut mismatches = 0;
    for seed in 0..100u64 {
        let spec = GeneratorSpec { n: 1 + (seed % 5) as usize, max_atoms: 6, ..GeneratorSpec::default() };
        let joint = if seed % 3 == 0 {
            random_comonotonic(seed, &spec)
        } else {
            random_coupling(seed, &spec)
        }
        .expect("generator spec is valid");
        let columns = default_column_names(joint.dimension());
        let text = dump_csv(&joint, &columns).expect("dump succeeds");
        let back = ingest_str(&text, &IngestOptions::default()).expect("dump is ingestible");
        if back.joint != joint || back.columns != columns {
            mismatches += 1;
        }
    }

    // In-process determinism of the report and simulation output.
    let joint = random_coupling(11, &GeneratorSpec::with_n(3)).expect("generator spec is valid");
    let report = || run_report(&joint, None).and_then(|r| r.to_json()).expect("report renders");
    let simulate = || simulate_command(5, 40, None, 8, OutputFormat::Json).expect("simulation is consistent");
    let in_process = report() == report() && simulate() == simulate();

    // Two separate processes over the same input file.
    let dir = tempfile::tempdir().expect("temp dir");
    let csv_path = dir.path().join("joint.csv");
    std::fs::write(&csv_path, dump_csv(&joint, &default_column_names(3)).expect("dump succeeds")).expect("write");
    let spec_path = dir.path().join("gauss.json");
    std::fs::write(&spec_path, r#"{"mean": [0, 1], "covariance": [[1, 0.5], [0.5, 4]]}"#).expect("write");
    let csv_arg = csv_path.to_str().expect("utf-8 path");
    let spec_arg = spec_path.to_str().expect("utf-8 path");
    let invocations: [&[&str]; 3] = [
        &["report", csv_arg],
        &["simulate", "--seed", "3", "--trials", "20"],
        &["elliptic", "--spec", spec_arg],
    ];
    let across_runs = invocations.iter().all(|args| {
        let first = run_binary(args);
        !first.is_empty() && first == run_binary(args)
    });

    ledger.record(
        10,
        "CSV dump/ingest identity and byte-identical JSON",
        mismatches == 0 && in_process && across_runs,
        format!(
            "100 joints, {mismatches} round-trip mismatches; identical JSON in process: {in_process}, across processes: {across_runs}"
        ),
    );
}

#[test]
fn acceptance_criteria() {
    let mut ledger = Ledger { failed: Vec::new() };
    let instances = equivalence_suite(&mut ledger);
    additive_when_comonotonic(&mut ledger, &instances);
    violation_when_not_comonotonic(&mut ledger, &instances);
    bernoulli_counterexamples(&mut ledger);
    convex_maximality(&mut ledger, &instances);
    detector_agreement(&mut ledger, &instances);
    gaussian_dichotomy(&mut ledger);
    degeneracy_condition(&mut ledger);
    quantile_oracle(&mut ledger);
    round_trip_and_determinism(&mut ledger);
    assert!(ledger.failed.is_empty(), "failed criteria: {:?}", ledger.failed);
}

//! Acceptance suite: one line per criterion, tolerances pinned.
//!
//! Runs without the libtest harness so the per-criterion lines always show
//! up in `cargo test` output. The process fails if any criterion fails,
//! except those listed in `KNOWN_FAILURES`, which must fail (a silent fix
//! would otherwise leave a stale explanation behind).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use herzlab::{parse_config, OUTPUT_DIR_ENV};
use herzlab_core::norms::{herz_morrey_norm, herz_morrey_norm_split, luxemburg_norm};
use herzlab_core::operators::{hardy_radial, hardy_star_radial, riesz_radial};
use herzlab_core::quad::modular_scaled;
use herzlab_core::verify::{
    fit_delta, holder_check, lemma2_duality_check, run_experiment, DualityInputs, DyadicRange,
    ExperimentReport, FunctionFamily, HolderInputs, Status,
};
use herzlab_core::{ExponentField, Primitive, QuadratureSpec, RadialFunction, Term, TestFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that fail for a documented reason.
///
/// 8b: with `p = 2` the split form adds the ℓ^p sums of the negative and
/// non-negative blocks as two separate roots, `(Σ_{k<0})^{1/2} +
/// (Σ_{k≥0})^{1/2}`, while the direct form takes one root of the whole sum.
/// For a constant α the two agree only when `p = 1` or when all blocks sit on
/// one side of `|x| = 1`; the multi-block functions straddle it, so the ratio
/// drops below 1 by up to a factor `2^{−1/2}`.
const KNOWN_FAILURES: &[&str] = &["8b"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_config(name: &str) -> ExperimentReport {
    let text = fs::read_to_string(configs().join(name)).unwrap();
    let cfg = parse_config(&text, &[]).unwrap();
    run_experiment(&cfg.experiment, &cfg.inputs).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn ball_measure(n: usize, r: f64) -> f64 {
    [2.0, std::f64::consts::PI, 4.0 * std::f64::consts::PI / 3.0][n - 1] * r.powi(n as i32)
}

/// Signed combinations of ball and annulus indicators.
fn random_indicators(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> TestFunction {
    let terms = (0..terms)
        .map(|_| {
            let k = rng.gen_range(-6..=6);
            let coef = rng.gen_range(0.25..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let primitive = if rng.gen_bool(0.5) {
                Primitive::BallIndicator { k }
            } else {
                Primitive::AnnulusIndicator { j: k }
            };
            Term { coef, primitive }
        })
        .collect();
    TestFunction::new(n, terms).unwrap()
}

/// `∫|f|^p` for an indicator combination: piecewise constant on the annuli
/// `A_j`, `j ∈ [−6, 6]`, plus the ball `B(0, 2^{−7})` where only the ball
/// indicators contribute.
fn indicator_lp_power(f: &TestFunction, p: f64) -> f64 {
    let dim = f.dim();
    let value_on = |j: Option<i32>| -> f64 {
        f.terms()
            .iter()
            .map(|t| match (t.primitive, j) {
                (Primitive::BallIndicator { .. }, None) => t.coef,
                (Primitive::BallIndicator { k }, Some(j)) if j <= k => t.coef,
                (Primitive::AnnulusIndicator { j: i }, Some(j)) if i == j => t.coef,
                _ => 0.0,
            })
            .sum()
    };
    let mut total = value_on(None).abs().powf(p) * ball_measure(dim, 2f64.powi(-7));
    for j in -6..=6 {
        let shell = ball_measure(dim, 2f64.powi(j)) - ball_measure(dim, 2f64.powi(j - 1));
        total += value_on(Some(j)).abs().powf(p) * shell;
    }
    total
}

fn criterion_1() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let terms = rng.gen_range(1..=4);
        let f = random_indicators(&mut rng, 1 + i % 3, terms);
        for p in [1.5, 2.0, 3.0, 4.0] {
            let q = ExponentField::constant(p, 1 + i % 3).unwrap();
            let got = luxemburg_norm(&f, &q, &spec).unwrap().value;
            worst = worst.max(rel(got, indicator_lp_power(&f, p).powf(1.0 / p)));
        }
    }
    (
        worst <= 1e-8,
        format!("200 cases, worst relative error {worst:.2e} (tol 1e-8)"),
    )
}

fn criterion_2() -> (bool, String) {
    let spec = QuadratureSpec::default();
    let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
    let members = FunctionFamily::random(1, 100, 2).members().unwrap();
    let mut worst: f64 = 0.0;
    for m in &members {
        let norm = luxemburg_norm(&m.function, &q, &spec).unwrap().value;
        let modular = modular_scaled(&m.function, &q, norm, &spec).unwrap().value;
        worst = worst.max((modular - 1.0).abs());
    }
    (
        worst <= 1e-6,
        format!(
            "{} built-ins, worst |F(f/‖f‖) − 1| = {worst:.2e} (tol 1e-6)",
            members.len()
        ),
    )
}

fn criterion_3() -> (bool, String) {
    let report = run_config("holder.json");
    // q = radial_log(2, 1) ranges over (2, 3]
    let c_q = 1.0 + 1.0 / 2.0 - 1.0 / 3.0;
    let pairs = report.measurements.len();
    let violations = report.ratios().filter(|&r| r > c_q).count();
    let max = report.measured_constant.unwrap();

    let b = TestFunction::ball_indicator(1, 0);
    let equality = holder_check(&HolderInputs {
        q: ExponentField::constant(2.0, 1).unwrap(),
        family: FunctionFamily::explicit(vec![b.clone(), b]),
        spec: QuadratureSpec::default(),
    })
    .unwrap();
    let eq_ratio = equality.measured_constant.unwrap();
    (
        pairs == 1000
            && violations == 0
            && report.verdict.passed()
            && (eq_ratio - 1.0).abs() <= 1e-8,
        format!(
            "{pairs} pairs, {violations} above C_q = {c_q:.6}, max ratio {max:.6}; \
             equality case {eq_ratio:.12} (tol 1e-8)"
        ),
    )
}

fn criterion_4() -> (bool, String) {
    let spec = QuadratureSpec::default();
    let radii = DyadicRange::new(-10, 10);
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [2.0, 3.0] {
        let q = ExponentField::constant(p, 1).unwrap();
        let fit = fit_delta(&q, &radii, &spec).unwrap();
        let (dd, dc, dl) = (
            (fit.delta - 1.0 / p).abs(),
            (fit.c - 1.0).abs(),
            (fit.c_lsq - 1.0).abs(),
        );
        pass &= dd <= 1e-4 && dc <= 1e-4 && dl <= 1e-4;
        parts.push(format!("p={p}: |δ−1/p| {dd:.1e}, |C−1| {:.1e}", dc.max(dl)));

        let duality = lemma2_duality_check(&DualityInputs {
            q,
            radii,
            threshold: 100.0,
            spec,
        })
        .unwrap();
        let worst = duality
            .ratios()
            .map(|r| (r - 1.0).abs())
            .fold(0.0, f64::max);
        pass &= worst <= 1e-6 && duality.measurements.len() == 21;
        parts.push(format!("products within {worst:.1e}"));
    }
    (pass, parts.join(", "))
}

/// Regression goldens recorded from the first computation.
const GOLDEN_BAND: f64 = 1.0110966069024958;
const GOLDEN_DELTA: f64 = 0.3966474007262128;
const GOLDEN_C: f64 = 1.5616266143839925;

fn criterion_5() -> (bool, String) {
    let duality = run_config("lemma2_duality_radial_log.json");
    let fit = run_config("lemma2_fit_radial_log.json");
    let band = duality.derived["band"];
    let (delta, c) = (fit.derived["delta"], fit.derived["c"]);
    let drift = rel(band, GOLDEN_BAND)
        .max(rel(delta, GOLDEN_DELTA))
        .max(rel(c, GOLDEN_C));
    (
        duality.measurements.len() == 21 && band <= 100.0 && delta > 0.0 && drift <= 1e-6,
        format!("band {band:.6} (≤ 100), δ {delta:.6} (> 0), C {c:.6}; golden drift {drift:.1e}"),
    )
}

fn criterion_6() -> (bool, String) {
    let spec = QuadratureSpec::default();
    let f = TestFunction::ball_indicator(1, 0);
    let mut worst: f64 = 0.0;
    for b in [0.0, 0.5] {
        let beta = ExponentField::constant(b, 1).unwrap();
        for i in 0..200 {
            let r = 10f64.powf(-4.0 + 8.0 * i as f64 / 199.0);
            let h = hardy_radial(&f, &beta, r, &spec).unwrap().value;
            let h_want = 2.0 * r.min(1.0) * r.powf(b - 1.0);
            let hs = hardy_star_radial(&f, &beta, r, &spec).unwrap().value;
            let hs_want = match (r < 1.0, b == 0.0) {
                (false, _) => 0.0,
                (true, true) => 2.0 * (1.0 / r).ln(),
                (true, false) => 2.0 * (1.0 - r.powf(b)) / b,
            };
            worst = worst.max(rel(h, h_want)).max(rel(hs, hs_want));
        }
    }
    let one = ExponentField::constant(1.0, 1).unwrap();
    let mut worst_riesz: f64 = 0.0;
    for i in 0..50 {
        let a = 4.0 * i as f64 / 49.0;
        let v = riesz_radial(&f, &one, a, &spec).unwrap().value;
        worst_riesz = worst_riesz.max(rel(v, 2.0));
    }
    (
        worst <= 1e-8 && worst_riesz <= 1e-8,
        format!(
            "hardy/hardy_star worst {worst:.1e} at 800 probes, riesz worst {worst_riesz:.1e} at 50"
        ),
    )
}

fn criterion_7() -> (bool, String) {
    let spec = QuadratureSpec::default();
    let beta = ExponentField::constant(0.5, 1).unwrap();
    let mut c = f64::INFINITY;
    let mut worst_oracle: f64 = 0.0;
    for k in -3..=3 {
        let f = TestFunction::ball_indicator(1, k);
        let big_r = 2f64.powi(k);
        for i in 1..=50 {
            let a = big_r * (0.5 + 0.5 * i as f64 / 50.0);
            let v = riesz_radial(&f, &beta, a, &spec).unwrap().value;
            // ∫_{−R}^{R} |a − y|^{−1/2} dy for 0 ≤ a ≤ R
            let want = 2.0 * (big_r + a).sqrt() + 2.0 * (big_r - a).sqrt();
            worst_oracle = worst_oracle.max(rel(v, want));
            c = c.min(v / a.sqrt());
        }
    }
    (
        c > 0.0 && c.is_finite() && worst_oracle <= 1e-8,
        format!("measured C = {c:.6} over 350 probes; closed-form agreement {worst_oracle:.1e}"),
    )
}

/// Multi-block step functions: 2–4 annulus indicators, at least one on each
/// side of `|x| = 1`.
fn multi_block(rng: &mut ChaCha8Rng) -> TestFunction {
    let count = rng.gen_range(2..=4);
    let mut terms: Vec<Term> = (0..count)
        .map(|i| {
            let j = match i {
                0 => rng.gen_range(-6..=0),
                1 => rng.gen_range(1..=6),
                _ => rng.gen_range(-6..=6),
            };
            Term {
                coef: rng.gen_range(0.25..2.0),
                primitive: Primitive::AnnulusIndicator { j },
            }
        })
        .collect();
    terms.sort_by_key(|t| match t.primitive {
        Primitive::AnnulusIndicator { j } => j,
        _ => unreachable!(),
    });
    TestFunction::new(1, terms).unwrap()
}

fn equivalence_ratios(alpha: &ExponentField) -> Vec<f64> {
    let spec = QuadratureSpec::default();
    let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut out = Vec::new();
    for _ in 0..20 {
        let f = multi_block(&mut rng);
        for lambda in [0.0, 0.3] {
            for p in [1.0, 2.0] {
                let a = herz_morrey_norm(&f, alpha, lambda, p, &q, &spec)
                    .unwrap()
                    .value;
                let b = herz_morrey_norm_split(&f, alpha, lambda, p, &q, &spec)
                    .unwrap()
                    .value;
                out.push(a / b);
            }
        }
    }
    out
}

fn band(ratios: &[f64]) -> (f64, f64) {
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn criterion_8a() -> (bool, String) {
    // α(0) = 0.2 − 0.1 = 0.1, α_∞ = 0.2
    let alpha = ExponentField::radial_log(0.2, -0.1, 1).unwrap();
    let (lo, hi) = band(&equivalence_ratios(&alpha));
    (
        hi / lo <= 10.0,
        format!(
            "80 cases, ratio in [{lo:.6}, {hi:.6}], max/min {:.4} (≤ 10)",
            hi / lo
        ),
    )
}

fn criterion_8b() -> (bool, String) {
    let alpha = ExponentField::constant(0.15, 1).unwrap();
    let ratios = equivalence_ratios(&alpha);
    let worst = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    let p1_worst = ratios
        .iter()
        .step_by(2)
        .map(|r| (r - 1.0).abs())
        .fold(0.0, f64::max);
    (
        worst <= 1e-6,
        format!("constant α: worst |ratio − 1| = {worst:.3e} (tol 1e-6); p = 1 cases only: {p1_worst:.1e}"),
    )
}

fn criterion_9() -> (bool, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, constant) in [
        ("theorem_hardy.json", true),
        ("theorem_hardy_star.json", true),
        ("theorem_riesz.json", false),
    ] {
        let r = run_config(name);
        let sup = r.measured_constant.unwrap_or(f64::NAN);
        let growth = r.derived["growth_last_half"];
        let spread = r.derived["dilation_spread"];
        let ok = r.verdict.status == Status::Pass
            && r.measurements.len() == 50
            && sup.is_finite()
            && growth < 0.05
            && (!constant || spread < 1e-4)
            && (constant || (r.derived["c_inf"] > 0.0 && r.derived["gamma_sup"] > 0.0));
        pass &= ok;
        parts.push(format!(
            "{}: sup {sup:.4}, growth {:.2}%, dilation spread {spread:.1e}",
            r.experiment_id,
            100.0 * growth
        ));
    }
    (pass, parts.join("; "))
}

fn criterion_10() -> (bool, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["block_hardy.json", "block_hardy_star.json"] {
        let r = run_config(name);
        let variation = r.derived["variation"];
        pass &= r.measurements.len() == 11 && variation < 10.0 && r.verdict.passed();
        parts.push(format!(
            "{}: variation {variation:.3}",
            r.config["kind"].as_str().unwrap_or("?")
        ));
    }
    (pass, parts.join(", "))
}

fn criterion_11() -> (bool, String) {
    let names = [
        "holder.json",
        "lemma2_duality_radial_log.json",
        "lemma2_fit_radial_log.json",
        "theorem_hardy.json",
        "theorem_hardy_star.json",
        "theorem_riesz.json",
    ];
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        for name in names {
            let status = Command::new(env!("CARGO_BIN_EXE_herzlab"))
                .arg("run")
                .arg(configs().join(name))
                .env(OUTPUT_DIR_ENV, dir.path())
                .output()
                .unwrap()
                .status;
            if !status.success() {
                return (false, format!("{name} exited with {status}"));
            }
        }
    }
    let mut files: Vec<_> = fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    files.sort();
    let identical = files
        .iter()
        .filter(|f| fs::read(dirs[0].path().join(f)).ok() == fs::read(dirs[1].path().join(f)).ok())
        .count();
    (
        files.len() == 2 * names.len() && identical == files.len(),
        format!(
            "{identical}/{} report files byte-identical across two runs",
            files.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> (bool, String), Duration);

fn main() -> ExitCode {
    let min = |m: u64| Duration::from_secs(60 * m);
    let criteria: [Criterion; 12] = [
        ("1", criterion_1, min(1)),
        ("2", criterion_2, min(2)),
        ("3", criterion_3, min(5)),
        ("4", criterion_4, min(2)),
        ("5", criterion_5, min(5)),
        ("6", criterion_6, min(2)),
        ("7", criterion_7, min(5)),
        ("8a", criterion_8a, min(10)),
        ("8b", criterion_8b, min(10)),
        ("9", criterion_9, min(30)),
        ("10", criterion_10, min(10)),
        ("11", criterion_11, min(30)),
    ];
    let mut outcomes = Vec::new();
    for (id, run, budget) in criteria {
        let start = Instant::now();
        let (pass, mut detail) = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        if !in_time {
            detail.push_str(&format!("; over the {}s budget", budget.as_secs()));
        }
        let outcome = Outcome {
            id,
            pass: pass && in_time,
            detail,
            elapsed,
        };
        let known = KNOWN_FAILURES.contains(&id);
        let label = match (outcome.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected: remove from KNOWN_FAILURES)",
        };
        println!(
            "criterion {}: {label} [{:.1}s] {}",
            outcome.id,
            outcome.elapsed.as_secs_f64(),
            outcome.detail
        );
        outcomes.push((outcome, known));
    }
    let unexpected = outcomes
        .iter()
        .filter(|(o, known)| o.pass == *known)
        .count();
    let passed = outcomes.iter().filter(|(o, _)| o.pass).count();
    println!(
        "\nacceptance: {passed}/{} criteria pass, {} known failure(s), {unexpected} unexpected",
        outcomes.len(),
        KNOWN_FAILURES.len()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

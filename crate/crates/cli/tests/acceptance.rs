//! Acceptance run: one PASS/FAIL line per criterion, then a single assertion.
//!
//! `cargo test -p holorigid-cli --test acceptance -- --nocapture` shows the report.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use holorigid_core::markov::{build_an, verify_hyperbolic};
use holorigid_core::orbits::{find_periodic, multiplier_spectrum};
use holorigid_core::rigidity::{
    bn_config, constant_multiplier_orbits, constant_multiplier_test, livshitz_test, model_spectrum,
    rigidity_verdict, Certificate, VerdictConfig,
};
use holorigid_core::thermo::{dimension_report, pressure, pressure_curve, pressure_shape_ok};
use holorigid_core::{Complex64, MapSpec, MarkovModel, PotentialSpec, VerdictKind};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const LOG2_LOG3: f64 = 0.630_929_753_571_457_4;
const GOLDEN_DIM: f64 = 0.694_241_913_630_617_3;
const MISIUREWICZ: Complex64 = Complex64::new(0.395_014_052_076_694_54, 0.555_624_571_005_995_9);

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load<T: serde::de::DeserializeOwned>(name: &str) -> T {
    serde_json::from_str(&fs::read_to_string(data(name)).unwrap()).unwrap()
}

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        let line = format!("criterion {id}: {} {detail}", if ok { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((ok, line));
    }
}

/// A binary invocation recorded for the determinism criterion.
struct Run {
    name: &'static str,
    args: Vec<String>,
}

impl Run {
    fn new(name: &'static str, args: &[&str]) -> Self {
        Run { name, args: args.iter().map(|s| s.to_string()).collect() }
    }

    /// Runs at each thread count into the same directory, keeping the last
    /// run's files and every run's snapshot.
    fn exec(&self, root: &Path) -> Outcome {
        let out = root.join(self.name);
        let mut snapshots = Vec::new();
        let mut last = (0, 0.0);
        for threads in [4, 1] {
            let _ = fs::remove_dir_all(&out);
            let start = Instant::now();
            let o = Command::new(env!("CARGO_BIN_EXE_holorigid"))
                .arg("--out")
                .arg(&out)
                .args(&self.args)
                .env("HOLORIGID_THREADS", threads.to_string())
                .output()
                .expect("binary runs");
            last = (o.status.code().unwrap_or(-1), start.elapsed().as_secs_f64());
            snapshots.push((last.0, snapshot(&out)));
        }
        Outcome { code: last.0, dir: out, secs: last.1, snapshots }
    }
}

struct Outcome {
    code: i32,
    dir: PathBuf,
    secs: f64,
    snapshots: Vec<(i32, Vec<(String, Vec<u8>)>)>,
}

fn file_json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn pair(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .map(|rd| {
            rd.map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn log_spectral_radius(m: &MarkovModel) -> f64 {
    let n = m.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for t in &m.transitions {
        a[(t.from, t.to)] += 1.0;
    }
    a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max).ln()
}

fn mid(p: (f64, f64)) -> f64 {
    0.5 * (p.0 + p.1)
}

fn z2_anchors(z2: &MapSpec) -> Vec<holorigid_core::orbits::PeriodicOrbit> {
    let one = find_periodic(z2, 1, 1e-9)
        .unwrap()
        .into_iter()
        .find(|o| (o.first() - Complex64::new(1.0, 0.0)).norm() < 1e-9)
        .unwrap();
    let two = find_periodic(z2, 2, 1e-9).unwrap().remove(0);
    vec![one, two]
}

#[test]
fn acceptance() {
    let root = tempfile::tempdir().unwrap();
    let mut r = Report { lines: Vec::new() };
    let s = |p: PathBuf| p.to_string_lossy().into_owned();
    let (m33, m24) = (s(data("shift_3_3.json")), s(data("shift_2_4.json")));
    let (zi, zi2, zm2, zmis) =
        (s(data("z2_plus_i.json")), s(data("z2_plus_i_conj.json")), s(data("z2_minus_2.json")), s(data("z2_misiurewicz_3.json")));
    let log_deriv = r#"{"kind": "log_deriv_scaled", "t": 1.0}"#;
    let runs = vec![
        Run::new("dim33", &["dimension", &m33, "--order", "12"]),
        Run::new("dim24", &["dimension", &m24, "--order", "12"]),
        Run::new("pressure33", &["pressure", &m33, "--steps", "21"]),
        Run::new("cheb", &["compare", &zm2, &zi]),
        Run::new("livshitz", &["livshitz", &m24, "--phi", log_deriv, "--psi", r#"{"kind": "constant", "value": 0.0}"#, "--trials", "50"]),
        Run::new("conj", &["compare", &zi, &zi2]),
        Run::new("diverge", &["compare", &zi, &zmis]),
    ];
    let results: Vec<Outcome> = runs.iter().map(|run| run.exec(root.path())).collect();
    let out = |name: &str| -> (i32, &Path, f64) {
        let o = &results[runs.iter().position(|r| r.name == name).unwrap()];
        (o.code, o.dir.as_path(), o.secs)
    };

    // 1. Bowen roots of the linear Cantor models
    {
        let (code, dir, secs) = out("dim33");
        let b = pair(&file_json(dir, "dimension.json")["bowen_dim"]);
        let ok = code == 0 && b.0 <= LOG2_LOG3 && LOG2_LOG3 <= b.1 && b.1 - b.0 <= 1e-6 && secs < 5.0;
        r.check("1a", ok, format!("(3,3) bowen=[{:.12},{:.12}] width={:.1e} (<= 1e-6) time={secs:.2}s (< 5s)", b.0, b.1, b.1 - b.0));
        let (code, dir, _) = out("dim24");
        let b = pair(&file_json(dir, "dimension.json")["bowen_dim"]);
        let ok = code == 0 && b.0 <= GOLDEN_DIM && GOLDEN_DIM <= b.1;
        r.check("1b", ok, format!("(2,4) bowen=[{:.12},{:.12}] contains {GOLDEN_DIM}", b.0, b.1));
    }

    // certified model suite shared by criteria 2 and 3
    let start = Instant::now();
    let z2: MapSpec = load("z2.json");
    let mut suite: Vec<(&str, MarkovModel)> = vec![
        ("shift(3,3)", load("shift_3_3.json")),
        ("shift(2,4)", load("shift_2_4.json")),
        ("shift(2,5)", load("shift_2_5.json")),
        ("golden(3)", MarkovModel::golden_mean(3.0).unwrap()),
        ("z2 A_N", build_an(&z2, 0.3, 0.05, 30).unwrap()),
        ("z2 B_2", bn_config(&z2_anchors(&z2), &VerdictConfig::default()).build(&z2, &z2_anchors(&z2)).unwrap().1),
    ];
    for (_, m) in &mut suite {
        m.certify(12).unwrap();
    }
    let build_secs = start.elapsed().as_secs_f64();

    // 2. pressure shape, P(0) and a unique Bowen bracket
    {
        let start = Instant::now();
        let mut all = true;
        let mut worst_p0: f64 = 0.0;
        for (name, m) in &suite {
            let curve = pressure_curve(m, 0.0, 3.0, 31, 12).unwrap();
            let shape = pressure_shape_ok(&curve, 1e-10);
            let p0 = mid(pressure(m, &PotentialSpec::log_deriv(0.0), 12).unwrap());
            let err = (p0 - log_spectral_radius(m)).abs();
            worst_p0 = worst_p0.max(err);
            let fine = pressure_curve(m, 0.0, 3.0, 301, 12).unwrap();
            let signs = fine.windows(2).filter(|w| (mid((w[0].p_lower, w[0].p_upper)) > 0.0) != (mid((w[1].p_lower, w[1].p_upper)) > 0.0)).count();
            let ok = shape && err <= 1e-8 && signs == 1;
            if !ok {
                println!("  {name}: shape={shape} |P(0)-log rho|={err:.2e} sign_changes={signs}");
            }
            all &= ok;
        }
        let secs = start.elapsed().as_secs_f64() + build_secs;
        r.check(
            "2",
            all && secs < 10.0,
            format!("{} models: shape ok, max |P(0)-log rho|={worst_p0:.1e} (<= 1e-8), single sign change, time={secs:.2}s (< 10s)", suite.len()),
        );
    }

    // 3. dimension gap and the equality case
    {
        let d24 = dimension_report(&suite[1].1, 12, 1e-10).unwrap();
        let ln2 = 2f64.ln();
        let ok = (d24.hd_max_entropy - 2.0 / 3.0).abs() <= 1e-9
            && (d24.entropy - ln2).abs() <= 1e-9
            && (d24.lyapunov_max_entropy - 1.5 * ln2).abs() <= 1e-9
            && d24.bowen_dim.0 - d24.hd_max_entropy > 0.02;
        r.check(
            "3a",
            ok,
            format!("(2,4) HD(m)={:.12} h={:.12} chi={:.12} gap={:.6} (> 0.02)", d24.hd_max_entropy, d24.entropy, d24.lyapunov_max_entropy, d24.bowen_dim.0 - d24.hd_max_entropy),
        );
        let d33 = dimension_report(&suite[0].1, 12, 1e-10).unwrap();
        let gap = (d33.hd_max_entropy - mid(d33.bowen_dim)).abs();
        r.check("3b", d33.equality_case && gap <= 1e-6, format!("(3,3) |HD(m)-bowen|={gap:.1e} (<= 1e-6)"));
        let mut agree = true;
        for (name, m) in &suite {
            let eq = dimension_report(m, 12, 1e-10).unwrap().equality_case;
            let linear = constant_multiplier_test(&model_spectrum(m, 8), 1e-8).unwrap().kind.is_positive();
            if eq != linear {
                println!("  {name}: equality_case={eq} constant_multiplier={linear}");
                agree = false;
            }
        }
        r.check("3c", agree, format!("equality_case agrees with constant_multiplier_test on {} models", suite.len()));
    }

    // 4. linear map detection
    {
        let v = constant_multiplier_orbits(&multiplier_spectrum(&z2, 6).unwrap(), 1e-8).unwrap();
        let lambda = match v.kind {
            VerdictKind::Linear { lambda } => lambda,
            _ => f64::NAN,
        };
        r.check("4a", (lambda - 2.0).abs() <= 1e-8, format!("z^2 through period 6: lambda={lambda} residual={:.1e}", v.residual));
        for (name, c) in [("z^2-2", Complex64::new(-2.0, 0.0)), ("z^2+i", Complex64::new(0.0, 1.0))] {
            let v = constant_multiplier_orbits(&multiplier_spectrum(&MapSpec::quadratic(c), 6).unwrap(), 1e-8).unwrap();
            let w = v.witness.as_ref().map(|w| w.word.clone()).unwrap_or_default();
            r.check("4b", v.kind == VerdictKind::NonLinear && v.witness.is_some(), format!("{name} non_linear, witness {w}"));
        }
    }

    // 5. degenerate gate
    {
        let (code, _, _) = out("cheb");
        let cheb = MapSpec::quadratic(Complex64::new(-2.0, 0.0)).classify_degenerate();
        let zi_flags = MapSpec::quadratic(Complex64::new(0.0, 1.0)).classify_degenerate();
        let ok = code == 4 && cheb.chebyshev && !zi_flags.chebyshev && !zi_flags.power_like;
        r.check("5", ok, format!("compare z^2-2 exit={code} (4); z^2-2 chebyshev={}; z^2+i flags={:?}", cheb.chebyshev, zi_flags));
    }

    // 6. Livshitz suite
    {
        let shift = MarkovModel::full_shift(&[2.0, 4.0]).map(|mut m| {
            m.certify(12).unwrap();
            m
        });
        let shift = shift.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mut worst: f64 = 0.0;
        let mut all = true;
        for _ in 0..50 {
            let w: Vec<f64> = (0..shift.transitions.len()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let s: Vec<f64> = (0..shift.len()).map(|_| rng.random_range(-2.0..2.0)).collect();
            let w2: Vec<f64> = shift.transitions.iter().zip(&w).map(|(t, x)| x + s[t.to] - s[t.from]).collect();
            let v = livshitz_test(&shift, &PotentialSpec::EdgeWeights { w }, &PotentialSpec::EdgeWeights { w: w2 }, 8, 1e-9).unwrap();
            worst = worst.max(v.residual);
            all &= v.kind == VerdictKind::Cohomologous;
        }
        r.check("6a", all && worst <= 1e-9, format!("50 random coboundaries cohomologous, max residual={worst:.1e} (<= 1e-9)"));
        let (code, dir, _) = out("livshitz");
        let j = file_json(dir, "livshitz.json");
        let res = j["verdict"]["residual"].as_f64().unwrap_or(f64::NAN);
        let ok = code == 1 && j["verdict"]["kind"] == "not_cohomologous" && res >= 2f64.ln() - 1e-9 && !j["verdict"]["witness"].is_null();
        r.check("6b", ok, format!("(2,4) log-derivative vs constant: not_cohomologous, defect={res:.12} (>= log 2 - 1e-9)"));
    }

    // 7. B_n on z^2
    {
        let anchors = z2_anchors(&z2);
        let cfg = VerdictConfig::default();
        let bn = bn_config(&anchors, &cfg);
        let (plan, mut b2) = bn.build(&z2, &anchors).unwrap();
        let (_, b1) = bn.build(&z2, &anchors[..1]).unwrap();
        let depth = plan.bridges.iter().map(|b| b.depth()).max().unwrap_or(0);
        let kappa = b2.certify(12).map(|e| e.kappa).unwrap_or(0.0);
        let kappa = kappa.max(verify_hyperbolic(&b2, 12).map(|e| e.kappa).unwrap_or(0.0));
        let words = |m: &MarkovModel| -> std::collections::HashSet<String> {
            m.periodic_words_upto(8).iter().map(|w| w.label(m)).collect()
        };
        let nested = words(&b1).is_subset(&words(&b2)) && b1.labelled_edges().is_subset(&b2.labelled_edges());
        let ok = plan.bridges.len() == 2 && depth <= 40 && b2.is_transitive() && kappa >= 1.5 && nested;
        r.check(
            "7",
            ok,
            format!("{} bridges, max depth {depth} (<= 40), transitive={}, kappa={kappa:.4} (>= 1.5), B_1 in B_2={nested}", plan.bridges.len(), b2.is_transitive()),
        );
    }

    // 8. end-to-end verdicts
    {
        let start = Instant::now();
        let f: MapSpec = load("z2_plus_i.json");
        let g: MapSpec = load("z2_plus_i_conj.json");
        let h = MapSpec::quadratic(MISIUREWICZ);
        let cfg = VerdictConfig::default();
        let same = rigidity_verdict(&f, &g, &cfg).unwrap();
        let other = rigidity_verdict(&f, &h, &cfg).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let nonlinear = |v: &Option<holorigid_core::RigidityVerdict>| v.as_ref().is_some_and(|v| v.kind == VerdictKind::NonLinear);
        let cmp = same.comparison.as_ref().map(|c| (c.residual, c.tolerance)).unwrap_or((f64::NAN, f64::NAN));
        let ok = same.certificate == Certificate::ConformalConjugacyCriteriaMet
            && nonlinear(&same.affine_f)
            && nonlinear(&same.affine_g)
            && cmp.0 <= cmp.1;
        r.check("8a", ok, format!("z^2+i vs 2z conjugate: {:?}, divergence={:.1e} (<= {:.1e})", same.certificate, cmp.0, cmp.1));
        let res = other.comparison.as_ref().map(|c| c.residual).unwrap_or(f64::NAN);
        r.check("8b", other.certificate == Certificate::MultipliersDiverge, format!("z^2+i vs Misiurewicz {MISIUREWICZ}: {:?}, divergence={res:.4}", other.certificate));
        let (c1, d1, _) = out("conj");
        let (c2, d2, _) = out("diverge");
        let ok = c1 == 0
            && c2 == 1
            && file_json(d1, "verdict.json")["certificate"] == "CONFORMAL_CONJUGACY_CRITERIA_MET"
            && file_json(d2, "verdict.json")["certificate"] == "MULTIPLIERS_DIVERGE";
        r.check("8c", ok && secs < 60.0, format!("binary exit codes {c1}/{c2} (0/1), library time={secs:.2}s (< 60s)"));
    }

    // 9. thread-count independence of every binary run
    {
        let mut differing = Vec::new();
        for (run, o) in runs.iter().zip(&results) {
            let (a, b) = (&o.snapshots[0], &o.snapshots[1]);
            if a.0 != b.0 || a.1.is_empty() || a.1 != b.1 {
                differing.push(run.name);
            }
        }
        r.check("9", differing.is_empty(), format!("{} runs byte-identical at HOLORIGID_THREADS=1 and 4; differing: {differing:?}", runs.len()));
    }

    let failed: Vec<&String> = r.lines.iter().filter(|(ok, _)| !ok).map(|(_, l)| l).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n"));
}

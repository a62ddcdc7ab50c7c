//! One function per subcommand; each returns the process exit code.

use std::path::{Path, PathBuf};

use holorigid_core::markov::{verify_hyperbolic, BridgePlan};
use holorigid_core::orbits::{find_periodic, multiplier_spectrum};
use holorigid_core::rigidity::{
    affine_structure_test, auto_word_period, bn_config, constant_multiplier_orbits, livshitz_test, rigidity_verdict, select_anchors,
};
use holorigid_core::thermo::{bowen_dimension, dimension_report, entropy, pressure_curve};
use holorigid_core::{
    Complex64, DegenerateFlags, Error, MapSpec, MarkovModel, PeriodicOrbit, PotentialSpec, RigidityVerdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::failure::{Failure, NEGATIVE, OK, UNCERTIFIED};
use crate::output::{fmt_f64, read_input, Output};

pub struct Ctx {
    pub cfg: RunConfig,
    pub out: Output,
}

type CmdResult = Result<i32, Failure>;

fn verdict_code(v: &RigidityVerdict) -> i32 {
    if v.kind.is_positive() {
        OK
    } else {
        NEGATIVE
    }
}

impl Ctx {
    pub fn new(cfg: RunConfig) -> Self {
        let out = Output::new(cfg.out_dir.clone(), cfg.hash());
        Ctx { cfg, out }
    }

    fn load_map(&mut self, path: &Path) -> Result<MapSpec, Failure> {
        let map: MapSpec = read_input(path, &mut self.out.inputs)?;
        map.validate().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        Ok(map)
    }

    /// Loads a model; a stored certificate is re-checked, never trusted.
    fn load_model(&mut self, path: &Path) -> Result<MarkovModel, Failure> {
        let mut model: MarkovModel = read_input(path, &mut self.out.inputs)?;
        model.validate().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        if model.expansion.is_none() {
            return Err(Failure { code: UNCERTIFIED, message: format!("{}: {}", path.display(), Error::Unverified) });
        }
        model.expansion = Some(verify_hyperbolic(&model, self.cfg.max_cycle_len)?);
        Ok(model)
    }

    fn load_potential(&mut self, arg: &str) -> Result<PotentialSpec, Failure> {
        if arg.trim_start().starts_with('{') {
            crate::output::parse_json(Path::new("<inline potential>"), arg)
        } else {
            read_input(Path::new(arg), &mut self.out.inputs)
        }
    }
}

/// One row per cycle, located at its canonical first point.
fn orbit_rows(orbits: &[PeriodicOrbit], with_critical: bool) -> Vec<Vec<String>> {
    orbits
        .iter()
        .map(|o| {
            let z = o.first();
            let mut r = vec![
                o.period.to_string(),
                fmt_f64(z.re),
                fmt_f64(z.im),
                fmt_f64(o.multiplier_abs),
                o.word_string(),
                o.post_critical.to_string(),
            ];
            if with_critical {
                r.push(o.critical.to_string());
            }
            r
        })
        .collect()
}

const SPECTRUM_HEADER: [&str; 6] = ["period", "re", "im", "multiplier_abs", "word", "post_critical"];

#[derive(Serialize)]
struct CriticalOrbitReport {
    points: Vec<Complex64>,
    escaped: bool,
}

#[derive(Serialize)]
struct AnalyzeReport {
    chebyshev: bool,
    power_like: bool,
    critical_degree: u32,
    critical_orbit: CriticalOrbitReport,
    spectrum_max_period: usize,
    spectrum_cycles: usize,
    linearity: Option<RigidityVerdict>,
}

pub fn analyze(ctx: &mut Ctx, map_path: &Path) -> CmdResult {
    let map = ctx.load_map(map_path)?;
    analyze_map(ctx, &map)
}

fn analyze_map(ctx: &Ctx, map: &MapSpec) -> CmdResult {
    let DegenerateFlags { chebyshev, power_like } = map.classify_degenerate();
    let crit = map.critical_orbit(64);
    let spectrum = multiplier_spectrum(map, ctx.cfg.max_period)?;
    let linearity = if spectrum.is_empty() {
        None
    } else {
        Some(constant_multiplier_orbits(&spectrum, ctx.cfg.tolerances.multiplier)?)
    };
    ctx.out.csv("spectrum.csv", &SPECTRUM_HEADER, &orbit_rows(&spectrum, false))?;
    // backward orbit of the most repelling fixed point
    let seed = spectrum
        .iter()
        .filter(|o| o.period == 1 && o.multiplier_abs > 1.0)
        .max_by(|a, b| a.multiplier_abs.total_cmp(&b.multiplier_abs));
    if let Some(seed) = seed {
        let julia = map.julia_preimages(seed.first(), ctx.cfg.julia_depth, ctx.cfg.cell_size / 8.0)?;
        let rows: Vec<Vec<String>> = julia.points.iter().map(|z| vec![fmt_f64(z.re), fmt_f64(z.im)]).collect();
        ctx.out.csv("julia.csv", &["re", "im"], &rows)?;
    }
    let report = AnalyzeReport {
        chebyshev,
        power_like,
        critical_degree: map.critical_degree(),
        critical_orbit: CriticalOrbitReport { points: crit.points, escaped: crit.escaped },
        spectrum_max_period: ctx.cfg.max_period,
        spectrum_cycles: spectrum.len(),
        linearity,
    };
    ctx.out.json("analyze.json", &report)?;
    println!(
        "chebyshev={chebyshev} power_like={power_like} cycles={} escaped={}",
        report.spectrum_cycles, report.critical_orbit.escaped
    );
    Ok(OK)
}

pub fn orbits(ctx: &mut Ctx, map_path: &Path) -> CmdResult {
    let map = ctx.load_map(map_path)?;
    let mut all = Vec::new();
    for n in 1..=ctx.cfg.max_period {
        all.extend(find_periodic(&map, n, ctx.cfg.tolerances.orbit)?);
    }
    let mut header = SPECTRUM_HEADER.to_vec();
    header.push("critical");
    ctx.out.csv("orbits.csv", &header, &orbit_rows(&all, true))?;
    println!("cycles={}", all.len());
    Ok(OK)
}

/// Certifies and writes `model`; an uncertified model is still written.
fn write_model(ctx: &Ctx, name: &str, mut model: MarkovModel) -> Result<(MarkovModel, i32), Failure> {
    let certified = model.certify(ctx.cfg.max_cycle_len);
    ctx.out.json(name, &model)?;
    match certified {
        Ok(e) => {
            println!(
                "{name}: states={} transitions={} kappa={} c={}",
                model.len(),
                model.transitions.len(),
                fmt_f64(e.kappa),
                fmt_f64(e.c)
            );
            Ok((model, OK))
        }
        Err(e @ Error::NotExpanding { .. }) => {
            eprintln!("{name}: {e}");
            Ok((model, UNCERTIFIED))
        }
        Err(e) => Err(e.into()),
    }
}

fn an_model(ctx: &Ctx, map: &MapSpec, name: &str) -> Result<(MarkovModel, i32), Failure> {
    let c = &ctx.cfg;
    let model = holorigid_core::markov::build_an(map, c.critical_radius, c.cell_size, c.julia_depth)?;
    write_model(ctx, name, model)
}

fn bn_model(ctx: &Ctx, map: &MapSpec, prefix: &str) -> Result<(MarkovModel, BridgePlan, i32), Failure> {
    let v = ctx.cfg.verdict();
    let anchors = select_anchors(map, v.anchor_count, v.anchor_max_period)?;
    let (plan, model) = bn_config(&anchors, &v).build(map, &anchors)?;
    ctx.out.json(&format!("{prefix}_plan.json"), &plan)?;
    let (model, code) = write_model(ctx, &format!("{prefix}_model.json"), model)?;
    Ok((model, plan, code))
}

pub fn build_an(ctx: &mut Ctx, map_path: &Path) -> CmdResult {
    let map = ctx.load_map(map_path)?;
    Ok(an_model(ctx, &map, "an_model.json")?.1)
}

pub fn build_bn(ctx: &mut Ctx, map_path: &Path) -> CmdResult {
    let map = ctx.load_map(map_path)?;
    Ok(bn_model(ctx, &map, "bn")?.2)
}

#[derive(Serialize)]
struct PressureSummary {
    entropy: f64,
    bowen_dim: Option<(f64, f64)>,
    t_min: f64,
    t_max: f64,
    steps: usize,
    order: usize,
}

pub fn pressure(ctx: &mut Ctx, model_path: &Path, t_min: f64, t_max: f64, steps: usize) -> CmdResult {
    if steps == 0 || !(t_min <= t_max) {
        return Err(Failure::input("pressure: need steps >= 1 and t_min <= t_max"));
    }
    let model = ctx.load_model(model_path)?;
    let order = ctx.cfg.pressure_order;
    let samples = pressure_curve(&model, t_min, t_max, steps, order)?;
    let rows: Vec<Vec<String>> =
        samples.iter().map(|s| vec![fmt_f64(s.t), fmt_f64(s.p_lower), fmt_f64(s.p_upper)]).collect();
    ctx.out.csv("pressure.csv", &["t", "P_lower", "P_upper"], &rows)?;
    let bowen = match bowen_dimension(&model, order, ctx.cfg.tolerances.dimension) {
        Ok(b) => Some(b),
        Err(Error::NoSignChange { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let summary = PressureSummary { entropy: entropy(&model), bowen_dim: bowen, t_min, t_max, steps, order };
    ctx.out.json("pressure_summary.json", &summary)?;
    match bowen {
        Some((a, b)) => println!("entropy={} bowen=[{},{}]", fmt_f64(summary.entropy), fmt_f64(a), fmt_f64(b)),
        None => println!("entropy={} bowen=none", fmt_f64(summary.entropy)),
    }
    Ok(OK)
}

fn dimension_of(ctx: &Ctx, model: &MarkovModel, name: &str) -> CmdResult {
    let report = dimension_report(model, ctx.cfg.pressure_order, ctx.cfg.tolerances.dimension)?;
    ctx.out.json(name, &report)?;
    println!(
        "{name}: bowen=[{},{}] hd_max_entropy={} equality_case={}",
        fmt_f64(report.bowen_dim.0),
        fmt_f64(report.bowen_dim.1),
        fmt_f64(report.hd_max_entropy),
        report.equality_case
    );
    Ok(OK)
}

pub fn dimension(ctx: &mut Ctx, model_path: &Path) -> CmdResult {
    let model = ctx.load_model(model_path)?;
    dimension_of(ctx, &model, "dimension.json")
}

#[derive(Serialize)]
struct LivshitzReport {
    verdict: Option<RigidityVerdict>,
    trials: Vec<RigidityVerdict>,
    seed: u64,
}

/// `phi` plus the coboundary of a random state function.
fn perturbed(model: &MarkovModel, phi: &PotentialSpec, rng: &mut ChaCha8Rng) -> Result<PotentialSpec, Failure> {
    let s: Vec<f64> = (0..model.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut w = Vec::with_capacity(model.transitions.len());
    for (e, t) in model.transitions.iter().enumerate() {
        w.push(phi.edge_values(model, e)?.1 + s[t.to] - s[t.from]);
    }
    Ok(PotentialSpec::EdgeWeights { w })
}

pub fn livshitz(ctx: &mut Ctx, model_path: &Path, phi: &str, psi: Option<&str>, trials: usize) -> CmdResult {
    let model = ctx.load_model(model_path)?;
    let phi = ctx.load_potential(phi)?;
    let psi = psi.map(|p| ctx.load_potential(p)).transpose()?;
    let (period, tol) = (ctx.cfg.max_period, ctx.cfg.tolerances.livshitz);
    let verdict = psi.map(|psi| livshitz_test(&model, &phi, &psi, period, tol)).transpose()?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut runs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let psi = perturbed(&model, &phi, &mut rng)?;
        runs.push(livshitz_test(&model, &phi, &psi, period, tol)?);
    }
    let code = verdict.iter().chain(&runs).map(verdict_code).max().unwrap_or(OK);
    if let Some(v) = &verdict {
        println!("kind={:?} residual={}", v.kind, fmt_f64(v.residual));
    }
    if trials > 0 {
        let passed = runs.iter().filter(|v| v.kind.is_positive()).count();
        println!("coboundary trials: {passed}/{trials} cohomologous");
    }
    ctx.out.json("livshitz.json", &LivshitzReport { verdict, trials: runs, seed: ctx.cfg.seed })?;
    Ok(code)
}

fn affine_of(ctx: &Ctx, model: &MarkovModel, name: &str, period: usize) -> CmdResult {
    let v = affine_structure_test(model, period, ctx.cfg.tolerances.affine)?;
    ctx.out.json(name, &v)?;
    println!("{name}: kind={:?} residual={} tolerance={}", v.kind, fmt_f64(v.residual), fmt_f64(v.tolerance));
    Ok(verdict_code(&v))
}

pub fn affine(ctx: &mut Ctx, model_path: &Path) -> CmdResult {
    let model = ctx.load_model(model_path)?;
    let period = ctx.cfg.word_max_period.unwrap_or(ctx.cfg.max_period);
    affine_of(ctx, &model, "affine.json", period)
}

fn compare_maps(ctx: &Ctx, f: &MapSpec, g: &MapSpec) -> CmdResult {
    let report = rigidity_verdict(f, g, &ctx.cfg.verdict())?;
    ctx.out.json("verdict.json", &report)?;
    let certificate = serde_json::to_value(report.certificate).unwrap_or_default();
    println!("certificate={}", certificate.as_str().unwrap_or("?"));
    Ok(report.certificate.exit_code())
}

pub fn compare(ctx: &mut Ctx, f_path: &Path, g_path: &Path) -> CmdResult {
    let f = ctx.load_map(f_path)?;
    let g = ctx.load_map(g_path)?;
    compare_maps(ctx, &f, &g)
}

/// Every stage in sequence, persisting all intermediate artifacts.
pub fn full(ctx: &mut Ctx, map_path: &Path, against: Option<&PathBuf>) -> CmdResult {
    let map = ctx.load_map(map_path)?;
    let mut code = analyze_map(ctx, &map)?;
    let degenerate = map.classify_degenerate();

    let (an, an_code) = an_model(ctx, &map, "an_model.json")?;
    if an_code == OK {
        dimension_of(ctx, &an, "an_dimension.json")?;
        affine_of(ctx, &an, "an_affine.json", ctx.cfg.max_period)?;
    }
    code = code.max(an_code);

    if !degenerate.chebyshev && !degenerate.power_like {
        let (bn, plan, bn_code) = bn_model(ctx, &map, "bn")?;
        if bn_code == OK {
            dimension_of(ctx, &bn, "bn_dimension.json")?;
            let period = ctx.cfg.word_max_period.unwrap_or_else(|| auto_word_period(&plan));
            affine_of(ctx, &bn, "bn_affine.json", period)?;
        }
        code = code.max(bn_code);
    }

    if let Some(g_path) = against {
        let g = ctx.load_map(g_path)?;
        return compare_maps(ctx, &map, &g);
    }
    Ok(code)
}

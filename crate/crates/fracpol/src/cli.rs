//! Batch entry point: JSON experiment configs, dotted-path overrides,
//! subcommand dispatch, artifact files and exit codes.
//!
//! Exit codes: 0 success with every verdict StrictlyMonotone / every
//! property passing; 1 a Violated or Inconclusive verdict or a property
//! failure; 2 configuration or i/o error; 3 an unconverged solve anywhere.

use crate::eigensolver::{solve, InitKind, SolverParams};
use crate::error::{Error, Result};
use crate::geometry::{rasterize, Grid, Point, Polarizer, ShapeSpec};
use crate::harness::{
    faber_krahn_check, sweep_rotation, sweep_translation, SweepConfig, SweepMode, SweepReport,
    Verdict,
};
use crate::nonlocal::{build_kernel, FracParams};
use crate::{io as fio, props};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Solve,
    SweepT,
    SweepRot,
    FkCheck,
    Props,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Solve => "solve",
            Subcommand::SweepT => "sweep-t",
            Subcommand::SweepRot => "sweep-rot",
            Subcommand::FkCheck => "fk-check",
            Subcommand::Props => "props",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    pub subcommand: Subcommand,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub overrides: Vec<String>,
    pub dump_mask: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub counts: Vec<usize>,
}

fn default_dim() -> usize {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FracConfig {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol_rel: f64,
    pub max_iter: usize,
    pub armijo_beta: f64,
    pub armijo_c: f64,
    pub init_kind: String,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_rel: 1e-9,
            max_iter: 5000,
            armijo_beta: 0.5,
            armijo_c: 1e-4,
            init_kind: "distance_bump".to_string(),
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Ball { center: Vec<f64>, radius: f64 },
    Annulus { outer_radius: f64, hole_radius: f64, hole_center: Vec<f64> },
    Rect { center: Vec<f64>, half_widths: Vec<f64> },
    Ellipse { center: Vec<f64>, semi_axes: Vec<f64> },
    Difference { outer: Box<ShapeConfig>, hole: Box<ShapeConfig> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeConfig {
    TranslateE1 { samples: Vec<f64> },
    RotateAbout { point: Vec<f64>, axis: Vec<f64>, samples: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizerConfig {
    pub h: Vec<f64>,
    pub a: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropsConfig {
    pub cases: usize,
    pub polarizers_per_case: usize,
    pub rng_seed: u64,
}

impl Default for PropsConfig {
    fn default() -> Self {
        Self { cases: 200, polarizers_per_case: 10, rng_seed: 0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub frac: FracConfig,
    #[serde(default = "default_pad_factor")]
    pub pad_factor: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub domain: Option<ShapeConfig>,
    #[serde(default)]
    pub outer: Option<ShapeConfig>,
    #[serde(default)]
    pub hole: Option<ShapeConfig>,
    #[serde(default)]
    pub mode: Option<ModeConfig>,
    #[serde(default = "default_seeds")]
    pub seeds: u32,
    #[serde(default)]
    pub polarizer: Option<PolarizerConfig>,
    #[serde(default)]
    pub props: Option<PropsConfig>,
}

fn default_pad_factor() -> f64 {
    2.0
}

fn default_seeds() -> u32 {
    3
}

fn to_point(v: &[f64], dim: usize, what: &str) -> Result<Point> {
    if v.len() != dim {
        return Err(Error::Validation(format!(
            "{what}: expected {dim} components, got {}",
            v.len()
        )));
    }
    let mut p = [0.0; 3];
    p[..dim].copy_from_slice(v);
    Ok(p)
}

impl ShapeConfig {
    pub fn to_shape(&self, dim: usize) -> Result<ShapeSpec> {
        let shape = match self {
            ShapeConfig::Ball { center, radius } => {
                ShapeSpec::ball(to_point(center, dim, "ball.center")?, *radius)
            }
            ShapeConfig::Annulus { outer_radius, hole_radius, hole_center } => ShapeSpec::annulus(
                *outer_radius,
                *hole_radius,
                to_point(hole_center, dim, "annulus.hole_center")?,
            ),
            ShapeConfig::Rect { center, half_widths } => ShapeSpec::Rect {
                center: to_point(center, dim, "rect.center")?,
                half_widths: to_point(half_widths, dim, "rect.half_widths")?,
            },
            ShapeConfig::Ellipse { center, semi_axes } => ShapeSpec::Ellipse {
                center: to_point(center, dim, "ellipse.center")?,
                semi_axes: to_point(semi_axes, dim, "ellipse.semi_axes")?,
            },
            ShapeConfig::Difference { outer, hole } => {
                ShapeSpec::difference(outer.to_shape(dim)?, hole.to_shape(dim)?)
            }
        };
        shape.validate(dim)?;
        Ok(shape)
    }
}

/// Config with every invariant validated and domain types constructed.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub grid: Grid,
    pub frac: FracParams,
    pub pad_factor: f64,
    pub solver: SolverParams,
    pub raw: ExperimentConfig,
    pub echo: serde_json::Value,
}

/// Apply one `key.path=value` override to a JSON tree; numeric path
/// segments index arrays.
fn apply_override(root: &mut serde_json::Value, spec: &str) -> Result<()> {
    let (path, value) = spec
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("override {spec:?} is not key=value")))?;
    let parsed: serde_json::Value = serde_json::from_str(value)
        .unwrap_or_else(|_| serde_json::Value::String(value.to_string()));
    let mut cursor = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if let Ok(idx) = seg.parse::<usize>() {
            let arr = cursor
                .as_array_mut()
                .ok_or_else(|| Error::Parse(format!("override path {path:?}: {seg} is not an array index")))?;
            if idx >= arr.len() {
                return Err(Error::Parse(format!("override path {path:?}: index {idx} out of bounds")));
            }
            if last {
                arr[idx] = parsed;
                return Ok(());
            }
            cursor = &mut arr[idx];
        } else {
            let obj = cursor
                .as_object_mut()
                .ok_or_else(|| Error::Parse(format!("override path {path:?}: {seg} is not an object key")))?;
            if last {
                obj.insert(seg.to_string(), parsed);
                return Ok(());
            }
            cursor = obj
                .entry(seg.to_string())
                .or_insert_with(|| serde_json::Value::Object(Default::default()));
        }
    }
    Ok(())
}

/// Parse and validate an experiment config file plus overrides.
pub fn parse_config(path: &Path, overrides: &[String]) -> Result<ValidatedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut tree: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    for o in overrides {
        apply_override(&mut tree, o)?;
    }
    let echo = tree.clone();
    let raw: ExperimentConfig = serde_json::from_value(tree)
        .map_err(|e| Error::Parse(format!("config: {e}")))?;

    let dim = raw.grid.dim;
    let origin = to_point(&raw.grid.origin, dim, "grid.origin")?;
    let mut counts = [1usize; 3];
    if raw.grid.counts.len() != dim {
        return Err(Error::Validation(format!(
            "grid.counts: expected {dim} entries, got {}",
            raw.grid.counts.len()
        )));
    }
    counts[..dim].copy_from_slice(&raw.grid.counts);
    let grid = Grid::new(dim, origin, raw.grid.spacing, counts)?;
    let frac = FracParams::new(raw.frac.s, raw.frac.p, raw.frac.q, dim)?;
    let init = match raw.solver.init_kind.as_str() {
        "distance_bump" => InitKind::DistanceBump,
        "constant" => InitKind::Constant,
        other => {
            return Err(Error::Validation(format!(
                "solver.init_kind must be distance_bump or constant, got {other:?}"
            )))
        }
    };
    let solver = SolverParams {
        tol_rel: raw.solver.tol_rel,
        max_iter: raw.solver.max_iter,
        armijo_beta: raw.solver.armijo_beta,
        armijo_c: raw.solver.armijo_c,
        init,
        rng_seed: raw.solver.rng_seed,
    };
    if !(raw.pad_factor >= 1.0) {
        return Err(Error::Validation(format!(
            "pad_factor must be >= 1, got {}",
            raw.pad_factor
        )));
    }
    Ok(ValidatedConfig { grid, frac, pad_factor: raw.pad_factor, solver, raw, echo })
}

fn verdict_exit(verdict: &Verdict, all_converged: bool) -> i32 {
    if !all_converged {
        3
    } else if matches!(verdict, Verdict::StrictlyMonotone) {
        0
    } else {
        1
    }
}

fn print_verdict(sub: Subcommand, verdict: &Verdict, margin: f64) {
    println!("VERDICT {} {} margin={:.6e}", sub.name(), verdict.label(), margin);
}

fn write_sweep_artifacts(report: &SweepReport, out: &Path, stem: &str) -> Result<()> {
    crate::harness::emit_csv(report, &out.join(format!("{stem}.csv")))?;
    crate::harness::emit_svg(report, &out.join(format!("{stem}.svg")))?;
    Ok(())
}

fn sweep_config(vc: &ValidatedConfig, mode_required: &str) -> Result<(SweepConfig, Subcommand)> {
    let dim = vc.grid.dim;
    let outer = vc
        .raw
        .outer
        .as_ref()
        .ok_or_else(|| Error::Validation("missing field `outer`".into()))?
        .to_shape(dim)?;
    let hole = vc
        .raw
        .hole
        .as_ref()
        .ok_or_else(|| Error::Validation("missing field `hole`".into()))?
        .to_shape(dim)?;
    let (mode, samples, sub) = match &vc.raw.mode {
        Some(ModeConfig::TranslateE1 { samples }) if mode_required == "translate_e1" => {
            (SweepMode::TranslateE1, samples.clone(), Subcommand::SweepT)
        }
        Some(ModeConfig::RotateAbout { point, axis, samples }) if mode_required == "rotate_about" => (
            SweepMode::RotateAbout {
                point: to_point(point, dim, "mode.rotate_about.point")?,
                axis: to_point(axis, dim, "mode.rotate_about.axis")?,
            },
            samples.clone(),
            Subcommand::SweepRot,
        ),
        _ => {
            return Err(Error::Validation(format!(
                "missing or mismatched field `mode` (expected {mode_required})"
            )))
        }
    };
    Ok((
        SweepConfig {
            outer,
            hole,
            mode,
            samples,
            grid: vc.grid.clone(),
            frac: vc.frac,
            pad_factor: vc.pad_factor,
            solver: vc.solver.clone(),
            seeds: vc.raw.seeds,
        },
        sub,
    ))
}

fn run_inner(cli: &CliConfig) -> Result<i32> {
    let vc = parse_config(&cli.config_path, &cli.overrides)?;
    std::fs::create_dir_all(&cli.out_dir)?;
    match cli.subcommand {
        Subcommand::Solve => {
            let shape = vc
                .raw
                .domain
                .as_ref()
                .ok_or_else(|| Error::Validation("missing field `domain`".into()))?
                .to_shape(vc.grid.dim)?;
            let mask = rasterize(&shape, &vc.grid)?;
            if cli.dump_mask {
                std::fs::write(cli.out_dir.join("domain_mask.txt"), fio::mask_to_text(&mask)?)?;
            }
            let kern = build_kernel(&vc.grid, vc.frac, vc.pad_factor)?;
            let res = solve(&mask, &kern, &vc.solver)?;
            let function_file = "eigenfunction.txt";
            std::fs::write(cli.out_dir.join(function_file), fio::function_to_text(&res.u)?)?;
            std::fs::write(
                cli.out_dir.join("eigenresult.json"),
                fio::eigenresult_json(&res, vc.echo.clone(), function_file),
            )?;
            println!(
                "lambda={:.16e} iterations={} gradNorm={:.6e} converged={}",
                res.lambda, res.iterations, res.grad_norm, res.converged
            );
            Ok(if res.converged { 0 } else { 3 })
        }
        Subcommand::SweepT => {
            let (cfg, sub) = sweep_config(&vc, "translate_e1")?;
            if cli.dump_mask {
                let om = rasterize(&cfg.outer, &vc.grid)?;
                let hm = rasterize(&cfg.hole, &vc.grid)?;
                std::fs::write(cli.out_dir.join("outer_mask.txt"), fio::mask_to_text(&om)?)?;
                std::fs::write(cli.out_dir.join("hole_mask.txt"), fio::mask_to_text(&hm)?)?;
            }
            let report = sweep_translation(&cfg)?;
            write_sweep_artifacts(&report, &cli.out_dir, "sweep_t")?;
            print_verdict(sub, &report.verdict, report.margin);
            Ok(verdict_exit(&report.verdict, report.all_converged))
        }
        Subcommand::SweepRot => {
            let (cfg, sub) = sweep_config(&vc, "rotate_about")?;
            if cli.dump_mask {
                let om = rasterize(&cfg.outer, &vc.grid)?;
                let hm = rasterize(&cfg.hole, &vc.grid)?;
                std::fs::write(cli.out_dir.join("outer_mask.txt"), fio::mask_to_text(&om)?)?;
                std::fs::write(cli.out_dir.join("hole_mask.txt"), fio::mask_to_text(&hm)?)?;
            }
            let report = sweep_rotation(&cfg)?;
            write_sweep_artifacts(&report, &cli.out_dir, "sweep_rot")?;
            print_verdict(sub, &report.verdict, report.margin);
            Ok(verdict_exit(&report.verdict, report.all_converged))
        }
        Subcommand::FkCheck => {
            let shape = vc
                .raw
                .domain
                .as_ref()
                .ok_or_else(|| Error::Validation("missing field `domain`".into()))?
                .to_shape(vc.grid.dim)?;
            let pc = vc
                .raw
                .polarizer
                .as_ref()
                .ok_or_else(|| Error::Validation("missing field `polarizer`".into()))?;
            let hs = Polarizer::new(to_point(&pc.h, vc.grid.dim, "polarizer.h")?, pc.a)?;
            let mask = rasterize(&shape, &vc.grid)?;
            if cli.dump_mask {
                std::fs::write(cli.out_dir.join("domain_mask.txt"), fio::mask_to_text(&mask)?)?;
            }
            let kern = build_kernel(&vc.grid, vc.frac, vc.pad_factor)?;
            let rec = faber_krahn_check(&mask, &hs, &kern, &vc.solver)?;
            let doc = serde_json::json!({
                "lambdaOmega": rec.lambda_omega,
                "rayleighPolarized": rec.rayleigh_polarized,
                "lambdaPolarized": rec.lambda_polarized,
                "strictExpected": rec.strict_expected,
                "invariantCase": rec.invariant_case,
                "chainHolds": rec.chain_holds,
                "verdict": rec.verdict.label(),
                "margin": rec.margin,
                "paramsEcho": vc.echo,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            std::fs::write(cli.out_dir.join("fk_check.json"), s)?;
            print_verdict(Subcommand::FkCheck, &rec.verdict, rec.margin);
            Ok(verdict_exit(&rec.verdict, rec.all_converged))
        }
        Subcommand::Props => {
            let pc = vc.raw.props.clone().unwrap_or_default();
            let sets = props::set_identity_suite(pc.cases, pc.polarizers_per_case, pc.rng_seed)?;
            let funcs = props::rearrangement_suite(pc.cases.min(100), pc.rng_seed)?;
            print!("{}", sets.transcript());
            print!("{}", funcs.transcript());
            let ok = sets.all_passed() && funcs.all_passed();
            println!("PROPS {}", if ok { "PASS" } else { "FAIL" });
            Ok(if ok { 0 } else { 1 })
        }
    }
}

/// Run a subcommand; never panics on bad input, returns the exit code.
pub fn run(cli: &CliConfig) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("config.json");
        std::fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn supercritical_q_rejected_with_both_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"{"grid": {"origin": [-1,-1], "spacing": 0.25, "counts": [8,8]},
                "frac": {"s": 0.5, "p": 2.0, "q": 4.0}}"#,
        );
        let err = parse_config(&path, &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("supercritical q"), "{msg}");
        assert!(msg.contains("q=4"), "{msg}");
        assert!(msg.contains("p*_s=4"), "{msg}");
        // just below critical is accepted
        let ok = parse_config(&path, &["frac.q=3.9".to_string()]);
        assert!(ok.is_ok());
    }

    #[test]
    fn infinite_critical_exponent_accepts_any_q() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"{"grid": {"origin": [-1,-1], "spacing": 0.25, "counts": [8,8]},
                "frac": {"s": 0.9, "p": 3.0, "q": 25.0}}"#,
        );
        assert!(parse_config(&path, &[]).is_ok());
    }

    #[test]
    fn missing_field_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"{"grid": {"origin": [-1,-1], "counts": [8,8]},
                "frac": {"s": 0.5, "p": 2.0, "q": 2.0}}"#,
        );
        let err = parse_config(&path, &[]).unwrap_err().to_string();
        assert!(err.contains("spacing"), "{err}");
    }

    #[test]
    fn overrides_reach_nested_fields_and_arrays() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"{"grid": {"origin": [-1,-1], "spacing": 0.25, "counts": [8,8]},
                "frac": {"s": 0.5, "p": 2.0, "q": 2.0},
                "solver": {"rng_seed": 1}}"#,
        );
        let vc = parse_config(
            &path,
            &[
                "solver.rng_seed=9".to_string(),
                "grid.origin.0=-2.0".to_string(),
                "frac.s=0.6".to_string(),
            ],
        )
        .unwrap();
        assert_eq!(vc.solver.rng_seed, 9);
        assert_eq!(vc.grid.origin[0], -2.0);
        assert_eq!(vc.frac.s, 0.6);
    }

    #[test]
    fn hole_escaping_domain_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"{"grid": {"origin": [-1.2,-1.2], "spacing": 0.1, "counts": [24,24]},
                "frac": {"s": 0.5, "p": 2.0, "q": 2.0},
                "solver": {"max_iter": 50},
                "outer": {"ball": {"center": [0,0], "radius": 1.0}},
                "hole": {"ball": {"center": [0,0], "radius": 0.3}},
                "mode": {"translate_e1": {"samples": [0.0, 0.69]}}}"#,
        );
        let cli = CliConfig {
            subcommand: Subcommand::SweepT,
            config_path: path,
            out_dir: dir.path().join("out"),
            overrides: vec![],
            dump_mask: false,
        };
        assert_eq!(run(&cli), 2);
    }
}

//! Experiment drivers: eigenvalue sweeps over hole translations and
//! rotations, the polarization comparison of eigenvalues, diagnostics, and
//! CSV/SVG emission.
//!
//! Symmetry hypotheses are checked on the rasterized masks actually used,
//! not trusted from the shape specification. Verdicts separate theorem
//! violations from numerical noise by the strictness margin: `Inconclusive`
//! is a first-class outcome.

use crate::eigensolver::{linear_oracle_p2, solve, strict_margin, EigenResult, SolverParams};
use crate::error::{Error, Result};
use crate::geometry::{
    dot, norm, polarize_mask, rasterize, reflect_mask, reflect_point,
    scale, sub, DomainMask, Grid, MirrorMap, Point, Polarizer, ShapeSpec, Side,
};
use crate::nonlocal::{build_kernel, rayleigh, FracParams, KernelTable};
use crate::rearrange::{polarize_function, GridFunction};
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum SweepMode {
    /// Translate the hole along `e1` by each sample value.
    TranslateE1,
    /// Rotate the hole about `point`; `axis` is the symmetry ray direction
    /// through the base hole center.
    RotateAbout { point: Point, axis: Point },
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub outer: ShapeSpec,
    pub hole: ShapeSpec,
    pub mode: SweepMode,
    pub samples: Vec<f64>,
    pub grid: Grid,
    pub frac: FracParams,
    pub pad_factor: f64,
    pub solver: SolverParams,
    pub seeds: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub lambda: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    StrictlyMonotone,
    Violated(usize),
    Inconclusive(usize),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::StrictlyMonotone => "StrictlyMonotone",
            Verdict::Violated(_) => "Violated",
            Verdict::Inconclusive(_) => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub verdict: Verdict,
    /// Smallest consecutive eigenvalue step in the theorem's direction;
    /// +inf sentinel when fewer than two rows.
    pub margin: f64,
    pub all_converged: bool,
}

/// Direction of the expected strict monotonicity.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Decreasing,
    Increasing,
}

fn classify(rows: &[SweepRow], dir: Direction, tol_rel: f64) -> (Verdict, f64) {
    if rows.len() < 2 {
        return (Verdict::StrictlyMonotone, f64::INFINITY);
    }
    let mut min_margin = f64::INFINITY;
    let mut first_violated = None;
    let mut first_inconclusive = None;
    for k in 0..rows.len() - 1 {
        let step = match dir {
            Direction::Decreasing => rows[k].lambda - rows[k + 1].lambda,
            Direction::Increasing => rows[k + 1].lambda - rows[k].lambda,
        };
        let eps = strict_margin(rows[k].lambda.abs().max(rows[k + 1].lambda.abs()), tol_rel);
        min_margin = min_margin.min(step);
        if step <= -eps {
            first_violated.get_or_insert(k);
        } else if step <= eps {
            first_inconclusive.get_or_insert(k);
        }
    }
    let verdict = if let Some(k) = first_violated {
        Verdict::Violated(k)
    } else if let Some(k) = first_inconclusive {
        Verdict::Inconclusive(k)
    } else {
        Verdict::StrictlyMonotone
    };
    (verdict, min_margin)
}

/// Hole mask must sit inside the outer mask with at least a one-cell gap.
fn check_hole_gap(outer: &DomainMask, hole: &DomainMask) -> Result<()> {
    let g = &outer.grid;
    let [nx, ny, nz] = g.counts;
    for idx in hole.cell_indices() {
        let [ix, iy, iz] = g.coords(idx);
        for dz in -1i64..=1 {
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if g.dim < 3 && dz != 0 || g.dim < 2 && dy != 0 {
                        continue;
                    }
                    let jx = ix as i64 + dx;
                    let jy = iy as i64 + dy;
                    let jz = iz as i64 + dz;
                    let inside_grid = jx >= 0
                        && jx < nx as i64
                        && jy >= 0
                        && jy < ny as i64
                        && jz >= 0
                        && jz < nz as i64;
                    if !inside_grid
                        || !outer.inside[g.linear_index(jx as usize, jy as usize, jz as usize)]
                    {
                        return Err(Error::HoleEscapesDomain(format!(
                            "hole cell ({ix},{iy},{iz}) lacks a one-cell interior gap"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Mask-level Steiner symmetry about `{x_axis = plane}`: polarization
/// invariance for every half-cell plane on the far side and dual invariance
/// on the near side.
pub fn is_steiner_symmetric(mask: &DomainMask, axis: usize, plane: f64) -> Result<bool> {
    let g = &mask.grid;
    let t_center = 2.0 * (plane - g.origin[axis]) / g.spacing;
    if (t_center - t_center.round()).abs() > 1e-6 {
        return Err(Error::AsymmetricInput(format!(
            "symmetry plane {plane} on axis {axis} is not grid-aligned"
        )));
    }
    let t_center = t_center.round() as i64;
    for t in 0..=(2 * g.counts[axis] as i64) {
        let b = g.origin[axis] + t as f64 * g.spacing / 2.0;
        let hs = Polarizer::axis(axis, true, b);
        if t >= t_center {
            if polarize_mask(mask, &hs)? != *mask {
                return Ok(false);
            }
        } else if crate::geometry::dual_polarize_mask(mask, &hs)? != *mask {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Band-tolerant polarization invariance of a rasterized mask under an
/// arbitrary (not grid-compatible) polarizer: a violation needs a reflected
/// point robustly inside the mask region while the original point is
/// robustly outside, both at one-cell resolution.
pub fn region_polarization_invariant(mask: &DomainMask, hs: &Polarizer) -> bool {
    let g = &mask.grid;
    let robust = |coords: [usize; 3], want_inside: bool| -> bool {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let jx = coords[0] as i64 + dx;
                let jy = coords[1] as i64 + dy;
                let value = if jx < 0
                    || jx >= g.counts[0] as i64
                    || jy < 0
                    || jy >= g.counts[1] as i64
                {
                    false
                } else {
                    mask.inside[g.linear_index(jx as usize, jy as usize, coords[2])]
                };
                if value != want_inside {
                    return false;
                }
            }
        }
        true
    };
    for idx in 0..g.total_cells() {
        let x = g.center_of(idx);
        if dot(x, hs.h) >= hs.a - 1e-12 {
            continue;
        }
        let y = reflect_point(x, hs);
        let Some(yc) = g.locate(y) else { continue };
        if robust(yc, true) && robust(g.coords(idx), false) {
            return false;
        }
    }
    true
}

fn effective_seeds(frac: &FracParams, seeds: u32) -> u32 {
    if (frac.q - frac.p).abs() > 1e-12 {
        seeds.max(1)
    } else {
        1
    }
}

/// Best-of-seeds solve; the variational value is an infimum, so the minimum
/// over restarts is reported.
fn solve_multi_seed(
    mask: &DomainMask,
    kern: &KernelTable,
    solver: &SolverParams,
    seeds: u32,
) -> Result<(EigenResult, bool)> {
    let mut best: Option<EigenResult> = None;
    let mut all_converged = true;
    for k in 0..seeds.max(1) {
        let params = SolverParams {
            rng_seed: solver.rng_seed + 1000 * k as u64,
            ..solver.clone()
        };
        let res = solve(mask, kern, &params)?;
        all_converged &= res.converged;
        let better = best.as_ref().map(|b| res.lambda < b.lambda).unwrap_or(true);
        if better {
            best = Some(res);
        }
    }
    Ok((best.expect("at least one seed"), all_converged))
}

fn run_sweep_points(
    cfg: &SweepConfig,
    kern: &KernelTable,
    placements: &[(f64, ShapeSpec)],
) -> Result<(Vec<SweepRow>, bool)> {
    let outer_mask = rasterize(&cfg.outer, &cfg.grid)?;
    // validate all placements before spending solver time
    for (param, hole_shape) in placements {
        let hole_mask = rasterize(hole_shape, &cfg.grid).map_err(|e| match e {
            Error::ShapeOutsideGrid(msg) => {
                Error::HoleEscapesDomain(format!("sample {param}: {msg}"))
            }
            other => other,
        })?;
        check_hole_gap(&outer_mask, &hole_mask)
            .map_err(|e| Error::HoleEscapesDomain(format!("sample {param}: {e}")))?;
    }
    let seeds = effective_seeds(&cfg.frac, cfg.seeds);
    let results: Vec<Result<(SweepRow, bool)>> = placements
        .par_iter()
        .map(|(param, hole_shape)| {
            let domain = ShapeSpec::difference(cfg.outer.clone(), hole_shape.clone());
            let mask = rasterize(&domain, &cfg.grid)?;
            let (res, converged_all) = solve_multi_seed(&mask, kern, &cfg.solver, seeds)?;
            Ok((
                SweepRow {
                    param: *param,
                    lambda: res.lambda,
                    iterations: res.iterations,
                    grad_norm: res.grad_norm,
                    converged: res.converged,
                },
                converged_all,
            ))
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut all_converged = true;
    for r in results {
        let (row, conv) = r?;
        all_converged &= conv;
        rows.push(row);
    }
    Ok((rows, all_converged))
}

/// Eigenvalue sweep as the hole translates along `e1`; outer and hole must
/// be Steiner-symmetric about `{x1 = 0}` on the grid, and the eigenvalue is
/// expected to strictly decrease with the offset.
pub fn sweep_translation(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.mode != SweepMode::TranslateE1 {
        return Err(Error::InvalidParams("sweep_translation needs TranslateE1 mode".into()));
    }
    if cfg.samples.is_empty() {
        return Err(Error::InvalidParams("empty sample list".into()));
    }
    if cfg.samples.iter().any(|t| *t < 0.0) {
        return Err(Error::Validation("translation samples must be nonnegative".into()));
    }
    let outer_mask = rasterize(&cfg.outer, &cfg.grid)?;
    let hole_mask = rasterize(&cfg.hole, &cfg.grid)?;
    if !is_steiner_symmetric(&outer_mask, 0, 0.0)? {
        return Err(Error::AsymmetricInput(
            "outer mask is not Steiner-symmetric about {x1 = 0}".into(),
        ));
    }
    if !is_steiner_symmetric(&hole_mask, 0, 0.0)? {
        return Err(Error::AsymmetricInput(
            "hole mask is not Steiner-symmetric about {x1 = 0}".into(),
        ));
    }
    let kern = build_kernel(&cfg.grid, cfg.frac, cfg.pad_factor)?;
    let mut samples = cfg.samples.clone();
    samples.sort_by(f64::total_cmp);
    let placements: Vec<(f64, ShapeSpec)> = samples
        .iter()
        .map(|&t| (t, cfg.hole.translate([t, 0.0, 0.0])))
        .collect();
    let (rows, all_converged) = run_sweep_points(cfg, &kern, &placements)?;
    let (verdict, margin) = classify(&rows, Direction::Decreasing, cfg.solver.tol_rel);
    Ok(SweepReport { rows, verdict, margin, all_converged })
}

/// Polarizer fan through `base` whose open side contains the ray
/// `base + R+ dir`; eight normals spread over the admissible half-circle.
fn polarizer_fan(base: Point, dir: Point) -> Vec<Polarizer> {
    let ray_angle = dir[1].atan2(dir[0]);
    (1..=8)
        .map(|k| {
            let angle = ray_angle + std::f64::consts::FRAC_PI_2
                + k as f64 * std::f64::consts::PI / 9.0;
            Polarizer::through_point_2d(base, angle)
        })
        .collect()
}

/// Eigenvalue sweep as the hole rotates about a point on the symmetry axis;
/// the rotation carries the hole toward the outer domain's symmetric bulk,
/// so the eigenvalue is expected to strictly increase with the angle.
pub fn sweep_rotation(cfg: &SweepConfig) -> Result<SweepReport> {
    let SweepMode::RotateAbout { point, axis } = cfg.mode.clone() else {
        return Err(Error::InvalidParams("sweep_rotation needs RotateAbout mode".into()));
    };
    if cfg.grid.dim != 2 {
        return Err(Error::InvalidParams("rotation sweeps are two-dimensional".into()));
    }
    if cfg.samples.is_empty() {
        return Err(Error::InvalidParams("empty sample list".into()));
    }
    let axis_norm = norm(axis);
    if !(axis_norm > 0.0) {
        return Err(Error::InvalidParams("rotation axis direction must be nonzero".into()));
    }
    let eta = scale(axis, 1.0 / axis_norm);

    // the base hole must be centered on the ray point + R+ eta
    let ShapeSpec::Ball { center: hole_center, .. } = cfg.hole else {
        return Err(Error::InvalidParams("rotation sweeps support ball holes".into()));
    };
    let v = sub(hole_center, point);
    let along = dot(v, eta);
    let off = norm(sub(v, scale(eta, along)));
    if !(along > 0.0) || off > 1e-9 {
        return Err(Error::AsymmetricInput(format!(
            "hole center must lie on the rotation ray: along={along}, off-axis={off}"
        )));
    }

    let outer_mask = rasterize(&cfg.outer, &cfg.grid)?;
    let hole_mask = rasterize(&cfg.hole, &cfg.grid)?;
    // the outer domain folds toward the opposite ray, the hole along its own
    for hs in polarizer_fan(point, scale(eta, -1.0)) {
        if !region_polarization_invariant(&outer_mask, &hs) {
            return Err(Error::AsymmetricInput(
                "outer mask is not foliated-Schwarz-symmetric about the rotation axis".into(),
            ));
        }
    }
    for hs in polarizer_fan(point, eta) {
        if !region_polarization_invariant(&hole_mask, &hs) {
            return Err(Error::AsymmetricInput(
                "hole mask is not foliated-Schwarz-symmetric about the rotation axis".into(),
            ));
        }
    }

    let kern = build_kernel(&cfg.grid, cfg.frac, cfg.pad_factor)?;
    let mut samples = cfg.samples.clone();
    samples.sort_by(f64::total_cmp);
    let placements: Vec<(f64, ShapeSpec)> = samples
        .iter()
        .map(|&theta| Ok((theta, cfg.hole.rotate_about(point, theta)?)))
        .collect::<Result<_>>()?;
    let (rows, all_converged) = run_sweep_points(cfg, &kern, &placements)?;
    let (verdict, margin) = classify(&rows, Direction::Increasing, cfg.solver.tol_rel);
    Ok(SweepReport { rows, verdict, margin, all_converged })
}

/// Outcome of the eigenvalue-under-polarization comparison.
#[derive(Debug, Clone)]
pub struct FaberKrahnRecord {
    pub lambda_omega: f64,
    pub rayleigh_polarized: f64,
    pub lambda_polarized: Option<f64>,
    pub strict_expected: bool,
    pub invariant_case: bool,
    pub chain_holds: bool,
    pub verdict: Verdict,
    pub margin: f64,
    pub all_converged: bool,
}

/// Solve on the mask, polarize the eigenfunction, and compare: the
/// rearranged Rayleigh value never exceeds the eigenvalue (a discrete
/// theorem), and when the polarization genuinely moves the domain the
/// polarized domain's eigenvalue must drop by more than the strictness
/// margin.
pub fn faber_krahn_check(
    mask: &DomainMask,
    hs: &Polarizer,
    kern: &KernelTable,
    solver: &SolverParams,
) -> Result<FaberKrahnRecord> {
    if !crate::geometry::grid_compatible(hs, &mask.grid) {
        return Err(Error::IncompatiblePolarizer(
            "comparison requires a grid-compatible polarizer".into(),
        ));
    }
    // the tail coefficients must be reflection-symmetric, i.e. the padded
    // box must be symmetric under the reflection
    let mm = MirrorMap::build(hs, &mask.grid).expect("checked above");
    let (lo, hi) = kern.pad_box();
    let center = 0.5 * (lo[mm.axis] + hi[mm.axis]);
    let plane = if mm.h_positive { hs.a } else { -hs.a };
    if (plane - center).abs() > 1e-9 {
        return Err(Error::IncompatiblePolarizer(format!(
            "padded box must be symmetric under the reflection: plane {plane}, box center {center}"
        )));
    }

    let seeds = effective_seeds(&kern.params, 3);
    let (res, conv_a) = solve_multi_seed(mask, kern, solver, seeds)?;
    let polar_u = polarize_function(&res.u, hs)?;
    let rayleigh_polarized = rayleigh(&polar_u, kern, kern.params.q)?;
    let chain_holds = rayleigh_polarized <= res.lambda * (1.0 + 1e-10);

    let polarized_mask = polarize_mask(mask, hs)?;
    let reflected_mask = reflect_mask(mask, hs)?;
    let invariant_case = polarized_mask == *mask;
    let strict_expected = !invariant_case && polarized_mask != reflected_mask;

    let eps = strict_margin(res.lambda, solver.tol_rel);
    let (lambda_polarized, verdict, margin, conv_b) = if strict_expected {
        let (res_p, conv_b) = solve_multi_seed(&polarized_mask, kern, solver, seeds)?;
        let margin = res.lambda - res_p.lambda;
        let verdict = if !chain_holds || margin <= -eps {
            Verdict::Violated(0)
        } else if margin > eps {
            Verdict::StrictlyMonotone
        } else {
            Verdict::Inconclusive(0)
        };
        (Some(res_p.lambda), verdict, margin, conv_b)
    } else if invariant_case {
        let margin = (rayleigh_polarized - res.lambda).abs();
        let verdict = if chain_holds && margin <= 1e-12 * res.lambda {
            Verdict::StrictlyMonotone
        } else if !chain_holds {
            Verdict::Violated(0)
        } else {
            Verdict::Inconclusive(0)
        };
        (None, verdict, margin, true)
    } else {
        // pure reflection: equality of eigenvalues expected, nonstrict chain only
        let verdict = if chain_holds { Verdict::StrictlyMonotone } else { Verdict::Violated(0) };
        (None, verdict, res.lambda - rayleigh_polarized, true)
    };

    Ok(FaberKrahnRecord {
        lambda_omega: res.lambda,
        rayleigh_polarized,
        lambda_polarized,
        strict_expected,
        invariant_case,
        chain_holds,
        verdict,
        margin,
        all_converged: conv_a && conv_b,
    })
}

/// Cellwise comparison of the polarized eigenfunction against the original
/// over the domain cells strictly inside `H`. The continuum dichotomy (the
/// gap vanishes nowhere or everywhere) is reported, not asserted.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComparisonDiagnostic {
    pub zero_cells: usize,
    pub pos_cells: usize,
    pub min_gap: f64,
    pub fraction_zero: f64,
}

pub fn comparison_diagnostic(
    u: &GridFunction,
    mask: &DomainMask,
    hs: &Polarizer,
) -> Result<ComparisonDiagnostic> {
    let mm = MirrorMap::build(hs, &mask.grid).ok_or_else(|| {
        Error::IncompatiblePolarizer("diagnostic requires a grid-compatible polarizer".into())
    })?;
    if !u.is_nonnegative() {
        return Err(Error::NegativeInput("diagnostic expects a nonnegative function".into()));
    }
    let polar = polarize_function(u, hs)?;
    let max_u = u.values().iter().cloned().fold(0.0, f64::max);
    let tol = 1e-12 * max_u;
    let g = &mask.grid;
    let mut zero_cells = 0;
    let mut pos_cells = 0;
    let mut min_gap = f64::INFINITY;
    for idx in mask.cell_indices() {
        let j = g.coords(idx)[mm.axis];
        if mm.side(j) != Side::InH {
            continue;
        }
        let gap = polar.value(idx) - u.value(idx);
        if gap.abs() <= tol {
            zero_cells += 1;
        } else {
            pos_cells += 1;
            min_gap = min_gap.min(gap);
        }
    }
    let total = zero_cells + pos_cells;
    let fraction_zero = if total == 0 { 1.0 } else { zero_cells as f64 / total as f64 };
    Ok(ComparisonDiagnostic { zero_cells, pos_cells, min_gap, fraction_zero })
}

/// CSV emission: header plus one row per sweep point, 17 significant digits.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("param,lambda,iterations,gradNorm,converged\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{},{:.16e},{}\n",
            row.param, row.lambda, row.iterations, row.grad_norm, row.converged
        ));
    }
    out
}

pub fn emit_csv(report: &SweepReport, path: &Path) -> Result<()> {
    std::fs::write(path, sweep_csv(report))?;
    Ok(())
}

/// Single-polyline SVG plot of lambda against the sweep parameter;
/// byte-deterministic for identical reports.
pub fn sweep_svg(report: &SweepReport) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::InvalidParams("cannot plot an empty report".into()));
    }
    let (w, h, ml, mr, mt, mb) = (800.0, 500.0, 80.0, 30.0, 30.0, 60.0);
    let xs: Vec<f64> = report.rows.iter().map(|r| r.param).collect();
    let ys: Vec<f64> = report.rows.iter().map(|r| r.lambda).collect();
    let (x0, x1) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1) = (ys.iter().cloned().fold(f64::INFINITY, f64::min), ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let xspan = if x1 > x0 { x1 - x0 } else { 1.0 };
    let yspan = if y1 > y0 { y1 - y0 } else { y0.abs().max(1.0) * 0.1 };
    let px = |x: f64| ml + (x - x0) / xspan * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / yspan * (h - mt - mb);
    let mut points = String::new();
    for (x, y) in xs.iter().zip(&ys) {
        points.push_str(&format!("{:.2},{:.2} ", px(*x), py(*y)));
    }
    let svg = format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<line x1=\"{ax0}\" y1=\"{ay1}\" x2=\"{ax1}\" y2=\"{ay1}\" stroke=\"black\"/>\n",
            "<line x1=\"{ax0}\" y1=\"{ay0}\" x2=\"{ax0}\" y2=\"{ay1}\" stroke=\"black\"/>\n",
            "<text x=\"{xlabel_x}\" y=\"{xlabel_y}\" text-anchor=\"middle\">parameter</text>\n",
            "<text x=\"18\" y=\"{ylabel_y}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {ylabel_y})\">lambda</text>\n",
            "<text x=\"{ax0}\" y=\"{tick_y}\" text-anchor=\"middle\" font-size=\"12\">{xmin}</text>\n",
            "<text x=\"{ax1}\" y=\"{tick_y}\" text-anchor=\"middle\" font-size=\"12\">{xmax}</text>\n",
            "<text x=\"{ytick_x}\" y=\"{ay1}\" text-anchor=\"end\" font-size=\"12\">{ymin}</text>\n",
            "<text x=\"{ytick_x}\" y=\"{ay0}\" text-anchor=\"end\" font-size=\"12\">{ymax}</text>\n",
            "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" points=\"{points}\"/>\n",
            "</svg>\n"
        ),
        w = w,
        h = h,
        ax0 = ml,
        ax1 = w - mr,
        ay0 = mt,
        ay1 = h - mb,
        xlabel_x = (ml + w - mr) / 2.0,
        xlabel_y = h - 15.0,
        ylabel_y = (mt + h - mb) / 2.0,
        tick_y = h - mb + 20.0,
        ytick_x = ml - 8.0,
        xmin = format_tick(x0),
        xmax = format_tick(x1),
        ymin = format_tick(y0),
        ymax = format_tick(y1),
        points = points.trim_end(),
    );
    Ok(svg)
}

fn format_tick(v: f64) -> String {
    format!("{v:.6}")
}

pub fn emit_svg(report: &SweepReport, path: &Path) -> Result<()> {
    std::fs::write(path, sweep_svg(report)?)?;
    Ok(())
}

/// Cross-check available at p = q = 2: the linear oracle value for a mask.
pub fn oracle_lambda(mask: &DomainMask, kern: &KernelTable) -> Result<f64> {
    Ok(linear_oracle_p2(mask, kern)?.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlocal::FracParams;

    fn quick_solver() -> SolverParams {
        SolverParams { tol_rel: 1e-9, max_iter: 4000, ..Default::default() }
    }

    fn annulus_cfg(samples: Vec<f64>, n: usize, spacing: f64) -> SweepConfig {
        let lo = -(n as f64) * spacing / 2.0;
        SweepConfig {
            outer: ShapeSpec::ball([0.0; 3], 1.0),
            hole: ShapeSpec::ball([0.0; 3], 0.3),
            mode: SweepMode::TranslateE1,
            samples,
            grid: Grid::square_2d([lo, lo], spacing, n).unwrap(),
            frac: FracParams::new(0.5, 2.0, 2.0, 2).unwrap(),
            pad_factor: 2.0,
            solver: quick_solver(),
            seeds: 3,
        }
    }

    #[test]
    fn verdict_classification() {
        let row = |param: f64, lambda: f64| SweepRow {
            param,
            lambda,
            iterations: 1,
            grad_norm: 0.0,
            converged: true,
        };
        let tol = 1e-9;
        // clean strict decrease
        let rows = vec![row(0.0, 10.0), row(1.0, 9.0), row(2.0, 8.5)];
        let (v, m) = classify(&rows, Direction::Decreasing, tol);
        assert_eq!(v, Verdict::StrictlyMonotone);
        assert!((m - 0.5).abs() < 1e-15);
        // an increase beyond the margin violates at its index
        let rows = vec![row(0.0, 10.0), row(1.0, 9.0), row(2.0, 9.1)];
        let (v, _) = classify(&rows, Direction::Decreasing, tol);
        assert_eq!(v, Verdict::Violated(1));
        // a decrease inside the strictness margin is inconclusive
        let rows = vec![row(0.0, 10.0), row(1.0, 10.0 - 1e-9)];
        let (v, _) = classify(&rows, Direction::Decreasing, tol);
        assert_eq!(v, Verdict::Inconclusive(0));
        // increasing direction mirrors the logic
        let rows = vec![row(0.0, 8.0), row(1.0, 9.0)];
        let (v, _) = classify(&rows, Direction::Increasing, tol);
        assert_eq!(v, Verdict::StrictlyMonotone);
        let (v, _) = classify(&rows, Direction::Decreasing, tol);
        assert_eq!(v, Verdict::Violated(0));
    }

    #[test]
    fn vacuous_sweep_is_monotone_with_sentinel_margin() {
        let cfg = annulus_cfg(vec![0.2], 16, 0.15);
        let report = sweep_translation(&cfg).unwrap();
        assert_eq!(report.verdict, Verdict::StrictlyMonotone);
        assert!(report.margin.is_infinite());
        assert_eq!(report.rows.len(), 1);
    }

    #[test]
    fn small_translation_sweep_decreases() {
        let cfg = annulus_cfg(vec![0.0, 0.3], 24, 0.1);
        let report = sweep_translation(&cfg).unwrap();
        assert_eq!(report.verdict, Verdict::StrictlyMonotone, "rows: {:?}", report.rows);
        assert!(report.rows[0].lambda > report.rows[1].lambda);
        assert!(report.all_converged);
    }

    #[test]
    fn hole_escaping_domain_is_rejected() {
        let cfg = annulus_cfg(vec![0.0, 0.68], 24, 0.1);
        assert!(matches!(sweep_translation(&cfg), Err(Error::HoleEscapesDomain(_))));
    }

    #[test]
    fn asymmetric_outer_is_rejected() {
        let mut cfg = annulus_cfg(vec![0.0, 0.2], 24, 0.1);
        cfg.outer = ShapeSpec::ball([0.05, 0.0, 0.0], 0.9);
        assert!(matches!(sweep_translation(&cfg), Err(Error::AsymmetricInput(_))));
    }

    #[test]
    fn steiner_check_accepts_ellipse_and_rect() {
        let g = Grid::square_2d([-1.2, -1.2], 0.1, 24).unwrap();
        let ell = rasterize(
            &ShapeSpec::Ellipse { center: [0.0; 3], semi_axes: [1.0, 0.7, 0.0] },
            &g,
        )
        .unwrap();
        assert!(is_steiner_symmetric(&ell, 0, 0.0).unwrap());
        let rect = rasterize(
            &ShapeSpec::Rect { center: [0.25, 0.0, 0.0], half_widths: [0.2, 0.3, 0.0] },
            &g,
        )
        .unwrap();
        assert!(!is_steiner_symmetric(&rect, 0, 0.0).unwrap());
        assert!(is_steiner_symmetric(&rect, 1, 0.0).unwrap());
    }

    #[test]
    fn region_invariance_of_disk_under_diagonal_fan() {
        let g = Grid::square_2d([-1.2, -1.2], 0.05, 48).unwrap();
        let disk = rasterize(&ShapeSpec::ball([0.0; 3], 1.0), &g).unwrap();
        for hs in polarizer_fan([0.2, 0.0, 0.0], [-1.0, 0.0, 0.0]) {
            assert!(region_polarization_invariant(&disk, &hs));
        }
        // a genuinely offset disk fails against some fan member
        let off = rasterize(&ShapeSpec::ball([0.0, 0.45, 0.0], 0.5), &g).unwrap();
        let fails = polarizer_fan([0.2, 0.0, 0.0], [-1.0, 0.0, 0.0])
            .iter()
            .any(|hs| !region_polarization_invariant(&off, hs));
        assert!(fails);
    }

    #[test]
    fn comparison_diagnostic_symmetric_function_all_zero() {
        let g = Grid::square_2d([-1.0, -1.0], 0.125, 16).unwrap();
        let mask = rasterize(&ShapeSpec::ball([0.0; 3], 0.8), &g).unwrap();
        let u = GridFunction::from_fn(mask.clone(), |p| {
            (0.64 - p[0] * p[0] - p[1] * p[1]).max(0.0)
        })
        .unwrap();
        let hs = Polarizer::axis(0, true, 0.0);
        let d = comparison_diagnostic(&u, &mask, &hs).unwrap();
        assert_eq!(d.pos_cells, 0);
        assert_eq!(d.fraction_zero, 1.0);
    }

    #[test]
    fn mirrored_hole_placements_agree() {
        // grid symmetry: the domain with the hole at +t and at -t are
        // mirror images, so the eigenvalues agree to solver accuracy
        let g = Grid::square_2d([-1.2, -1.2], 0.1, 24).unwrap();
        let frac = FracParams::new(0.5, 2.0, 2.0, 2).unwrap();
        let kern = build_kernel(&g, frac, 2.0).unwrap();
        let solver = SolverParams {
            init: crate::eigensolver::InitKind::Constant,
            tol_rel: 1e-12,
            ..Default::default()
        };
        let t = 0.3;
        let plus = rasterize(&ShapeSpec::annulus(1.0, 0.3, [t, 0.0, 0.0]), &g).unwrap();
        let minus = rasterize(&ShapeSpec::annulus(1.0, 0.3, [-t, 0.0, 0.0]), &g).unwrap();
        let lp = solve(&plus, &kern, &solver).unwrap().lambda;
        let lm = solve(&minus, &kern, &solver).unwrap().lambda;
        assert!(
            (lp - lm).abs() <= 1e-10 * lp,
            "mirrored placements disagree: {lp} vs {lm}"
        );
    }

    #[test]
    fn rotation_round_trip_rerasterizes_exactly() {
        // rotating by theta and back re-rasterizes to the original mask;
        // placements come from the analytic shape, so no error accumulates
        let g = Grid::square_2d([-1.2, -1.2], 0.05, 48).unwrap();
        let hole = ShapeSpec::ball([0.4, 0.0, 0.0], 0.25);
        let base = rasterize(&hole, &g).unwrap();
        for theta in [0.7, std::f64::consts::PI, 2.4] {
            let there = hole.rotate_about([0.2, 0.0, 0.0], theta).unwrap();
            let back = there.rotate_about([0.2, 0.0, 0.0], -theta).unwrap();
            assert_eq!(rasterize(&back, &g).unwrap(), base, "theta={theta}");
        }
    }

    #[test]
    fn csv_and_svg_are_deterministic_and_structured() {
        let report = SweepReport {
            rows: vec![
                SweepRow { param: 0.0, lambda: 2.5, iterations: 10, grad_norm: 1e-9, converged: true },
                SweepRow { param: 0.1, lambda: 2.25, iterations: 12, grad_norm: 1e-9, converged: true },
                SweepRow { param: 0.2, lambda: 2.0, iterations: 11, grad_norm: 1e-9, converged: true },
            ],
            verdict: Verdict::StrictlyMonotone,
            margin: 0.25,
            all_converged: true,
        };
        let csv1 = sweep_csv(&report);
        let csv2 = sweep_csv(&report);
        assert_eq!(csv1, csv2);
        assert_eq!(csv1.lines().count(), 4);
        assert!(csv1.starts_with("param,lambda,iterations,gradNorm,converged\n"));
        let svg = sweep_svg(&report).unwrap();
        assert_eq!(svg, sweep_svg(&report).unwrap());
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split_whitespace().count(), 3);
        let empty = SweepReport { rows: vec![], verdict: Verdict::StrictlyMonotone, margin: f64::INFINITY, all_converged: true };
        assert!(sweep_svg(&empty).is_err());
        // one-row report: header plus a single line
        let one = SweepReport { rows: report.rows[..1].to_vec(), ..report.clone() };
        assert_eq!(sweep_csv(&one).lines().count(), 2);
    }
}

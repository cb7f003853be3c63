//! Randomized property suites over rasterized sets and grid functions.
//!
//! Masks are unions of a few random balls kept inside a band where every
//! reflection in play maps cells to cells of the box, so each identity is
//! an exact boolean equality. The function suite uses center planes, where
//! the padded box is reflection-symmetric and the rearrangement inequality
//! for the energy is an exact discrete statement.

use crate::error::Result;
use crate::geometry::{
    dual_polarize_mask, is_polarization_invariant, polarize_mask, rasterize, reflect_mask,
    reflect_point, witness_sets, DomainMask, Grid, Point, Polarizer, ShapeSpec,
};
use crate::nonlocal::{build_kernel, seminorm_p, FracParams, KernelTable};
use crate::rearrange::{norm_q, polarize_function, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    counters: BTreeMap<String, (usize, usize)>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn record(&mut self, name: &str, ok: bool, context: impl Fn() -> String) {
        let entry = self.counters.entry(name.to_string()).or_insert((0, 0));
        entry.1 += 1;
        if ok {
            entry.0 += 1;
        } else if self.failures.len() < 32 {
            self.failures.push(format!("{name}: {}", context()));
        }
    }

    pub fn all_passed(&self) -> bool {
        self.counters.values().all(|&(pass, total)| pass == total)
    }

    pub fn counts(&self) -> impl Iterator<Item = (&str, usize, usize)> {
        self.counters.iter().map(|(k, &(p, t))| (k.as_str(), p, t))
    }

    pub fn transcript(&self) -> String {
        let mut out = String::new();
        for (name, pass, total) in self.counts() {
            writeln!(out, "PROP {name}: {pass}/{total}").expect("write to string");
        }
        for f in &self.failures {
            writeln!(out, "FAIL {f}").expect("write to string");
        }
        out
    }

    fn merge(&mut self, other: SuiteReport) {
        for (name, (p, t)) in other.counters {
            let e = self.counters.entry(name).or_insert((0, 0));
            e.0 += p;
            e.1 += t;
        }
        self.failures.extend(other.failures);
    }
}

fn suite_grid() -> Grid {
    Grid::square_2d([-1.0, -1.0], 0.0625, 32).expect("static grid")
}

fn random_ball_union(grid: &Grid, rng: &mut ChaCha8Rng) -> DomainMask {
    let n_balls = rng.gen_range(1..=4);
    let balls: Vec<(Point, f64)> = (0..n_balls)
        .map(|_| {
            let c = [rng.gen_range(-0.45..0.45), rng.gen_range(-0.45..0.45), 0.0];
            let r = rng.gen_range(0.08..0.3);
            (c, r)
        })
        .collect();
    let mut mask = DomainMask::empty(grid.clone());
    for idx in 0..grid.total_cells() {
        let x = grid.center_of(idx);
        mask.inside[idx] = balls.iter().any(|(c, r)| crate::geometry::norm(crate::geometry::sub(x, *c)) < *r);
    }
    mask
}

/// Polarizer with plane within four half-cells of the box center: every
/// reflection of the mask band stays inside the grid.
fn random_safe_polarizer(grid: &Grid, rng: &mut ChaCha8Rng) -> Polarizer {
    let axis = rng.gen_range(0..2usize);
    let positive = rng.gen_bool(0.5);
    let offset: i64 = rng.gen_range(-4..=4);
    let t = grid.counts[axis] as i64 + offset;
    let b = grid.origin[axis] + t as f64 * grid.spacing / 2.0;
    Polarizer::axis(axis, positive, if positive { b } else { -b })
}

/// Exact set identities of polarization on random rasterized sets.
pub fn set_identity_suite(cases: usize, polarizers_per_case: usize, seed: u64) -> Result<SuiteReport> {
    let grid = suite_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();

    for case in 0..cases {
        let mask = random_ball_union(&grid, &mut rng);
        let hole_ball = ShapeSpec::ball(
            [rng.gen_range(-0.35..0.35), rng.gen_range(-0.35..0.35), 0.0],
            rng.gen_range(0.04..0.1),
        );
        for _ in 0..polarizers_per_case {
            let hs = random_safe_polarizer(&grid, &mut rng);
            let ctx = || format!("case {case}, h={:?}, a={}", hs.h, hs.a);

            let refl = reflect_mask(&mask, &hs)?;
            let pol = polarize_mask(&mask, &hs)?;
            let dual = dual_polarize_mask(&mask, &hs)?;

            report.record("reflect_involution", reflect_mask(&refl, &hs)? == mask, ctx);
            report.record("polarize_idempotent", polarize_mask(&pol, &hs)? == pol, ctx);
            report.record("polarize_of_reflection", polarize_mask(&refl, &hs)? == pol, ctx);
            report.record("dual_is_reflected_polarization", dual == reflect_mask(&pol, &hs)?, ctx);
            report.record(
                "complement_duality",
                polarize_mask(&mask.complement(), &hs)? == dual.complement(),
                ctx,
            );
            report.record(
                "invariance_characterization",
                is_polarization_invariant(&mask, &hs)? == (pol == mask),
                ctx,
            );
            report.record("cell_count_preserved", pol.count() == mask.count(), ctx);

            // set difference identity, when the hole and its mirror sit inside
            let hole_raw = rasterize(&hole_ball, &grid)?;
            let hole = DomainMask {
                grid: grid.clone(),
                inside: hole_raw
                    .inside
                    .iter()
                    .zip(&mask.inside)
                    .map(|(&o, &m)| o && m)
                    .collect(),
                exterior: false,
            };
            if reflect_mask(&hole, &hs)?.is_subset_of(&mask) {
                let lhs = polarize_mask(&mask.minus(&hole), &hs)?;
                let rhs = pol.minus(&dual_polarize_mask(&hole, &hs)?);
                report.record("difference_identity", lhs == rhs, ctx);
            }

            // moved polarization certifies itself by nonempty witness cells
            if pol != mask && pol != refl {
                let (a, b) = witness_sets(&mask, &hs)?;
                report.record("witness_nonempty", a.count() > 0 && b.count() > 0, ctx);
            }
        }

        // single-ball polarization is the ball or its reflection
        let z: Point = [rng.gen_range(-0.45..0.45), rng.gen_range(-0.45..0.45), 0.0];
        let r = rng.gen_range(0.08..0.3);
        let hs = random_safe_polarizer(&grid, &mut rng);
        let ball_mask = rasterize(&ShapeSpec::ball(z, r), &grid)?;
        let expected_center = if crate::geometry::dot(z, hs.h) <= hs.a {
            z
        } else {
            reflect_point(z, &hs)
        };
        let expected = rasterize(&ShapeSpec::ball(expected_center, r), &grid)?;
        report.record(
            "ball_polarization",
            polarize_mask(&ball_mask, &hs)? == expected,
            || format!("case {case}, z={z:?}, r={r}, h={:?}, a={}", hs.h, hs.a),
        );
    }

    report.merge(annulus_family_cases()?);
    Ok(report)
}

/// Deterministic annulus cases: the polarized annulus is the annulus with
/// the hole reflected, invariance below the hole offset, and the reflected
/// hole stays inside the outer ball.
pub fn annulus_family_cases() -> Result<SuiteReport> {
    let grid = suite_grid();
    let mut report = SuiteReport::default();
    let (outer_r, hole_r, t1) = (1.0, 0.3, 0.125);
    let omega_t = |t: f64| ShapeSpec::annulus(outer_r, hole_r, [t, 0.0, 0.0]);
    let m_t1 = rasterize(&omega_t(t1), &grid)?;

    // plane between t1 and the reflected offset: the hole translates
    let a = 0.25;
    let t2 = 2.0 * a - t1;
    let hs = Polarizer::axis(0, true, a);
    let m_t2 = rasterize(&omega_t(t2), &grid)?;
    report.record(
        "annulus_polarization_translates_hole",
        polarize_mask(&m_t1, &hs)? == m_t2,
        || format!("t1={t1}, a={a}"),
    );

    // invariance for planes at or below the hole offset
    for &a_low in &[0.0, 0.0625, 0.125] {
        let hs_low = Polarizer::axis(0, true, a_low);
        report.record(
            "annulus_invariant_below_offset",
            is_polarization_invariant(&m_t1, &hs_low)?,
            || format!("a={a_low}"),
        );
    }
    // strictly between: moved
    report.record(
        "annulus_moved_above_offset",
        !is_polarization_invariant(&m_t1, &hs)?,
        || format!("a={a}"),
    );

    // reflected hole stays inside the outer ball for admissible planes
    let ball_mask = rasterize(&ShapeSpec::ball([0.0; 3], outer_r), &grid)?;
    let hole_mask = rasterize(&ShapeSpec::ball([t1, 0.0, 0.0], hole_r), &grid)?;
    for &a_ok in &[0.0, 0.125, 0.25, 0.375] {
        // admissible range is [0, (R - r + t)/2)
        let hs_a = Polarizer::axis(0, true, a_ok);
        report.record(
            "reflected_hole_inside_outer",
            reflect_mask(&hole_mask, &hs_a)?.is_subset_of(&ball_mask),
            || format!("a={a_ok}"),
        );
    }

    // witness cells for the moved annulus
    let (wa, wb) = witness_sets(&m_t1, &hs)?;
    report.record(
        "annulus_witness_nonempty",
        wa.count() > 0 && wb.count() > 0,
        || format!("a={a}"),
    );
    Ok(report)
}

fn rearrangement_grid() -> Grid {
    Grid::square_2d([-1.0, -1.0], 1.0 / 12.0, 24).expect("static grid")
}

fn random_support(grid: &Grid, rng: &mut ChaCha8Rng) -> DomainMask {
    let n_balls = rng.gen_range(1..=3);
    let balls: Vec<(Point, f64)> = (0..n_balls)
        .map(|_| {
            let c = [rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4), 0.0];
            let r = rng.gen_range(0.1..0.35);
            (c, r)
        })
        .collect();
    let mut mask = DomainMask::empty(grid.clone());
    for idx in 0..grid.total_cells() {
        let x = grid.center_of(idx);
        mask.inside[idx] = balls.iter().any(|(c, r)| crate::geometry::norm(crate::geometry::sub(x, *c)) < *r);
    }
    mask
}

fn center_plane(grid: &Grid, k: usize) -> Polarizer {
    let axis = k % 2;
    let positive = (k / 2) % 2 == 0;
    let b = grid.origin[axis] + grid.counts[axis] as f64 * grid.spacing / 2.0;
    Polarizer::axis(axis, positive, if positive { b } else { -b })
}

/// Norm preservation and energy nonincrease under function polarization,
/// with center planes so the padded box is reflection-symmetric.
pub fn rearrangement_suite(cases: usize, seed: u64) -> Result<SuiteReport> {
    let grid = rearrangement_grid();
    let s_values = [0.3, 0.5, 0.8];
    let p_values = [2.0, 3.0];
    let kernels: Vec<KernelTable> = s_values
        .iter()
        .flat_map(|&s| p_values.iter().map(move |&p| (s, p)))
        .map(|(s, p)| build_kernel(&grid, FracParams::new(s, p, 1.0, 2).unwrap(), 2.0))
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();
    for case in 0..cases {
        let support = random_support(&grid, &mut rng);
        if support.is_empty() {
            continue;
        }
        let values: Vec<f64> = (0..grid.total_cells())
            .map(|i| if support.inside[i] { rng.gen_range(0.0..1.0) } else { 0.0 })
            .collect();
        let u = GridFunction::new(support.clone(), values)?;
        let hs = center_plane(&grid, case);
        let v = polarize_function(&u, &hs)?;
        let ctx = || format!("case {case}");

        for &q in &[1.0, 2.0, 3.5] {
            let nu = norm_q(&u, q)?;
            let nv = norm_q(&v, q)?;
            report.record(
                "norm_preserved",
                (nu - nv).abs() <= 1e-12 * nu.max(f64::MIN_POSITIVE),
                || format!("case {case}, q={q}: {nu} vs {nv}"),
            );
        }

        for kern in &kernels {
            let eu = seminorm_p(&u, kern)?;
            let ev = seminorm_p(&v, kern)?;
            report.record(
                "seminorm_nonincreasing",
                ev <= eu * (1.0 + 1e-12),
                || {
                    format!(
                        "case {case}, s={}, p={}: {ev} vs {eu}",
                        kern.params.s, kern.params.p
                    )
                },
            );
        }

        let mut mu: Vec<u64> = u.values().iter().map(|x| x.to_bits()).collect();
        let mut mv: Vec<u64> = v.values().iter().map(|x| x.to_bits()).collect();
        mu.sort_unstable();
        mv.sort_unstable();
        report.record("equimeasurable", mu == mv, ctx);

        let w = polarize_function(&v, &hs)?;
        report.record("idempotent", w.values() == v.values(), ctx);

        let pol_support = polarize_mask(&support, &hs)?;
        let contained = (0..grid.total_cells())
            .all(|i| v.value(i) == 0.0 || pol_support.inside[i]);
        report.record("support_contained", contained && v.support == pol_support, ctx);
    }
    Ok(report)
}

//! Discretization of the Gagliardo-type seminorm, the fractional
//! p-Laplacian and the Rayleigh functional.
//!
//! The kernel `|x - y|^{-(d+sp)}` is sampled at cell-center pairs by the
//! midpoint rule over a padded box (the zero extension of the function is
//! accounted for explicitly), and the integral beyond the padded box is
//! replaced by a radial closed-form tail coefficient per cell. Diagonal
//! pairs are excluded: the principal-value numerator vanishes identically.
//!
//! Summation orders are fixed (see `reduce`), so every quantity here is
//! bit-reproducible across runs and thread counts.

use crate::error::{Error, Result};
use crate::geometry::{DomainMask, Grid, Point};
use crate::rearrange::{norm_q, GridFunction};
use crate::reduce::{par_tree_sum, tree_sum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fractional parameters `s`, `p`, the norm exponent `q`, and the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub dim: usize,
}

impl FracParams {
    pub fn new(s: f64, p: f64, q: f64, dim: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParams(format!("s must be in (0,1), got {s}")));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParams(format!("p must be in (1,inf), got {p}")));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParams(format!("dim must be 1..=3, got {dim}")));
        }
        let fp = Self { s, p, q, dim };
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::InvalidParams(format!("q must be in [1,inf), got {q}")));
        }
        if q >= fp.p_star() {
            return Err(Error::SupercriticalQ { q, p_star: fp.p_star() });
        }
        Ok(fp)
    }

    /// Critical exponent `d p / (d - s p)` when `s p < d`, infinite otherwise.
    pub fn p_star(&self) -> f64 {
        let d = self.dim as f64;
        if self.s * self.p < d {
            d * self.p / (d - self.s * self.p)
        } else {
            f64::INFINITY
        }
    }

    pub fn sp(&self) -> f64 {
        self.s * self.p
    }
}

/// `|t|^p` with fast paths for the common integer exponents.
#[inline]
pub fn abs_pow(t: f64, p: f64) -> f64 {
    if p == 2.0 {
        t * t
    } else if p == 3.0 {
        t * t * t.abs()
    } else {
        t.abs().powf(p)
    }
}

/// `G(t) = |t|^{p-2} t`, the odd power nonlinearity.
#[inline]
pub fn g_power(t: f64, p: f64) -> f64 {
    if p == 2.0 {
        t
    } else if p == 3.0 {
        t.abs() * t
    } else if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(p - 1.0)
    }
}

/// `|t|^{e-1} t` understood as the subgradient choice 0 at t = 0 (covers e = 1).
#[inline]
pub fn signed_pow(t: f64, e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(e - 1.0)
    }
}

fn sphere_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::TAU,
        _ => 4.0 * std::f64::consts::PI,
    }
}

/// Precomputed pair weights and far-field tail coefficients for one grid and
/// one parameter set.
///
/// Pair weights depend only on the integer cell offset, so they are stored
/// as one table over offsets: `w = spacing^{d-sp} * |offset|^{-(d+sp)}`.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub grid: Grid,
    pub params: FracParams,
    pub pad_factor: f64,
    pad_counts: [usize; 3],
    pad_origin: Point,
    offset_w: Vec<f64>,
    tau_main: Vec<f64>,
    w_tot_main: Vec<f64>,
}

impl KernelTable {
    pub fn pad_counts(&self) -> [usize; 3] {
        self.pad_counts
    }

    /// Padded box corners.
    pub fn pad_box(&self) -> (Point, Point) {
        let mut hi = self.pad_origin;
        for k in 0..self.grid.dim {
            hi[k] = self.pad_origin[k] + self.pad_counts[k] as f64 * self.grid.spacing;
        }
        (self.pad_origin, hi)
    }

    /// Pair weight between two main-grid cells given by coordinates.
    pub fn weight_between(&self, a: [usize; 3], b: [usize; 3]) -> f64 {
        let dx = a[0].abs_diff(b[0]);
        let dy = a[1].abs_diff(b[1]);
        let dz = a[2].abs_diff(b[2]);
        self.offset_w[dx + self.pad_counts[0] * (dy + self.pad_counts[1] * dz)]
    }

    /// Tail coefficient of a main-grid cell.
    pub fn tau(&self, main_idx: usize) -> f64 {
        self.tau_main[main_idx]
    }

    /// Total pair weight from a main-grid cell to every other padded cell.
    pub fn total_weight(&self, main_idx: usize) -> f64 {
        self.w_tot_main[main_idx]
    }

    pub fn cell_measure(&self) -> f64 {
        self.grid.spacing.powi(self.grid.dim as i32)
    }
}

/// Build the kernel table for `grid` padded symmetrically so the padded box
/// side is `pad_factor` times the domain box side (snapped to whole cells).
pub fn build_kernel(grid: &Grid, params: FracParams, pad_factor: f64) -> Result<KernelTable> {
    if params.dim != grid.dim {
        return Err(Error::InvalidParams(format!(
            "parameter dimension {} does not match grid dimension {}",
            params.dim, grid.dim
        )));
    }
    if !(pad_factor >= 1.0) || !pad_factor.is_finite() {
        return Err(Error::InvalidParams(format!("pad factor must be >= 1, got {pad_factor}")));
    }
    let d = grid.dim;
    let delta = grid.spacing;
    let mut pad_counts = [1usize; 3];
    let mut pad_origin = grid.origin;
    for k in 0..d {
        let extra = ((pad_factor - 1.0) * grid.counts[k] as f64 / 2.0).round() as usize;
        pad_counts[k] = grid.counts[k] + 2 * extra;
        pad_origin[k] = grid.origin[k] - extra as f64 * delta;
    }
    let pad_total: usize = pad_counts.iter().product();
    if pad_total > 1 << 20 {
        return Err(Error::InvalidParams(format!(
            "padded grid too large: {pad_total} cells"
        )));
    }

    let exponent = -(d as f64 + params.sp());
    let w_scale = delta.powf(d as f64 - params.sp());
    let mut offset_w = vec![0.0; pad_total];
    for dz in 0..pad_counts[2] {
        for dy in 0..pad_counts[1] {
            for dx in 0..pad_counts[0] {
                if dx == 0 && dy == 0 && dz == 0 {
                    continue;
                }
                let r2 = (dx * dx + dy * dy + dz * dz) as f64;
                offset_w[dx + pad_counts[0] * (dy + pad_counts[1] * dz)] =
                    w_scale * r2.sqrt().powf(exponent);
            }
        }
    }

    let sp = params.sp();
    let tail_scale = sphere_measure(d) / sp;
    let (pad_lo, pad_hi) = {
        let mut hi = pad_origin;
        for k in 0..d {
            hi[k] = pad_origin[k] + pad_counts[k] as f64 * delta;
        }
        (pad_origin, hi)
    };
    let n_main = grid.total_cells();
    let tau_main: Vec<f64> = (0..n_main)
        .map(|idx| {
            let x = grid.center_of(idx);
            let mut rho = f64::INFINITY;
            for k in 0..d {
                rho = rho.min(x[k] - pad_lo[k]).min(pad_hi[k] - x[k]);
            }
            tail_scale * rho.powf(-sp)
        })
        .collect();

    // Row sums over the padded box, one deterministic pass per main cell.
    let pad_offset: [usize; 3] = {
        let mut o = [0usize; 3];
        for k in 0..d {
            o[k] = (pad_counts[k] - grid.counts[k]) / 2;
        }
        o
    };
    let w_tot_main: Vec<f64> = (0..n_main)
        .into_par_iter()
        .map(|idx| {
            let c = grid.coords(idx);
            let pc = [c[0] + pad_offset[0], c[1] + pad_offset[1], c[2] + pad_offset[2]];
            let mut acc = 0.0;
            for jz in 0..pad_counts[2] {
                for jy in 0..pad_counts[1] {
                    for jx in 0..pad_counts[0] {
                        let dx = pc[0].abs_diff(jx);
                        let dy = pc[1].abs_diff(jy);
                        let dz = pc[2].abs_diff(jz);
                        acc += offset_w[dx + pad_counts[0] * (dy + pad_counts[1] * dz)];
                    }
                }
            }
            acc
        })
        .collect();

    Ok(KernelTable {
        grid: grid.clone(),
        params,
        pad_factor,
        pad_counts,
        pad_origin,
        offset_w,
        tau_main,
        w_tot_main,
    })
}

/// Pairwise interaction restricted to one support mask, with the exterior
/// (zero-extension) weight of each support cell folded into a per-cell
/// coefficient. Built once per (kernel, mask) and reused by the solver.
pub(crate) struct SupportOperator<'a> {
    pub kern: &'a KernelTable,
    pub cells: Vec<usize>,
    coords: Vec<[usize; 3]>,
    /// Pair weight from each support cell to everything outside the support
    /// (but inside the padded box).
    pub omega: Vec<f64>,
    /// Tail coefficient per support cell.
    pub tau: Vec<f64>,
}

impl<'a> SupportOperator<'a> {
    pub fn new(kern: &'a KernelTable, support: &DomainMask) -> Result<Self> {
        if support.grid != kern.grid {
            return Err(Error::GridMismatch(
                "support mask lives on a different grid than the kernel table".into(),
            ));
        }
        let cells = support.cell_indices();
        let coords: Vec<[usize; 3]> = cells.iter().map(|&c| kern.grid.coords(c)).collect();
        let omega: Vec<f64> = (0..cells.len())
            .into_par_iter()
            .map(|a| {
                let mut row = 0.0;
                for b in 0..cells.len() {
                    if b != a {
                        row += kern.weight_between(coords[a], coords[b]);
                    }
                }
                kern.total_weight(cells[a]) - row
            })
            .collect();
        let tau: Vec<f64> = cells.iter().map(|&c| kern.tau(c)).collect();
        Ok(Self { kern, cells, coords, omega, tau })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    /// `[u]^p`-type energy of in-support values (the rest of the grid is 0).
    pub fn energy(&self, vals: &[f64]) -> f64 {
        let p = self.kern.params.p;
        let n = self.len();
        let pair = par_tree_sum(n, |a| {
            let ca = self.coords[a];
            let va = vals[a];
            let mut acc = 0.0;
            for b in (a + 1)..n {
                acc += self.kern.weight_between(ca, self.coords[b]) * abs_pow(va - vals[b], p);
            }
            acc
        });
        let measure = self.kern.cell_measure();
        let ext = tree_sum(
            (0..n)
                .map(|a| abs_pow(vals[a], p) * (self.omega[a] + self.tau[a] * measure))
                .collect(),
        );
        2.0 * (pair + ext)
    }

    /// Operator application restricted to support cells.
    pub fn apply(&self, vals: &[f64]) -> Vec<f64> {
        let p = self.kern.params.p;
        let measure = self.kern.cell_measure();
        let n = self.len();
        (0..n)
            .into_par_iter()
            .map(|a| {
                let ca = self.coords[a];
                let va = vals[a];
                let mut acc = 0.0;
                for b in 0..n {
                    if b != a {
                        acc += self.kern.weight_between(ca, self.coords[b])
                            * g_power(va - vals[b], p);
                    }
                }
                acc / measure + (self.omega[a] / measure + self.tau[a]) * g_power(va, p)
            })
            .collect()
    }

    /// Pair weight between two support cells by support position.
    pub fn row_weight(&self, a: usize, b: usize) -> f64 {
        self.kern.weight_between(self.coords[a], self.coords[b])
    }

    /// Largest row weight; feeds the curvature proxy for the step size.
    pub fn max_row_weight(&self) -> f64 {
        let measure = self.kern.cell_measure();
        self.cells
            .iter()
            .enumerate()
            .map(|(a, &c)| self.kern.total_weight(c) / measure + self.tau[a])
            .fold(0.0, f64::max)
    }

    pub fn support_values(&self, u: &GridFunction) -> Vec<f64> {
        self.cells.iter().map(|&c| u.value(c)).collect()
    }
}

/// p-th power of the Gagliardo-type seminorm of `u` (pair sum plus tail).
pub fn seminorm_p(u: &GridFunction, kern: &KernelTable) -> Result<f64> {
    if u.grid != kern.grid {
        return Err(Error::GridMismatch("function grid differs from kernel grid".into()));
    }
    let op = SupportOperator::new(kern, &u.support)?;
    let vals = op.support_values(u);
    Ok(op.energy(&vals))
}

/// Pointwise fractional p-Laplacian of `u` on every main-grid cell.
pub fn apply_fplap(u: &GridFunction, kern: &KernelTable) -> Result<Vec<f64>> {
    if u.grid != kern.grid {
        return Err(Error::GridMismatch("function grid differs from kernel grid".into()));
    }
    let p = kern.params.p;
    let measure = kern.cell_measure();
    let support_cells = u.support.cell_indices();
    let coords: Vec<[usize; 3]> = support_cells.iter().map(|&c| kern.grid.coords(c)).collect();
    let svals: Vec<f64> = support_cells.iter().map(|&c| u.value(c)).collect();
    let op = SupportOperator::new(kern, &u.support)?;
    let n_main = kern.grid.total_cells();
    let out: Vec<f64> = (0..n_main)
        .into_par_iter()
        .map(|idx| {
            let c = kern.grid.coords(idx);
            let uc = u.value(idx);
            let mut acc = 0.0;
            let mut in_support_pos = None;
            for (b, &cell) in support_cells.iter().enumerate() {
                if cell == idx {
                    in_support_pos = Some(b);
                    continue;
                }
                acc += kern.weight_between(c, coords[b]) * g_power(uc - svals[b], p);
            }
            let mut v = acc / measure;
            if let Some(b) = in_support_pos {
                v += (op.omega[b] / measure + kern.tau(idx)) * g_power(uc, p);
            } else {
                // outside the support u = 0, so the exterior and tail terms vanish
            }
            v
        })
        .collect();
    Ok(out)
}

/// Rayleigh quotient `seminorm_p(u) / norm_q(u)^p`.
pub fn rayleigh(u: &GridFunction, kern: &KernelTable, q: f64) -> Result<f64> {
    let nq = norm_q(u, q)?;
    if nq == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(seminorm_p(u, kern)? / nq.powf(kern.params.p))
}

/// Euclidean-coordinate gradient of the Rayleigh quotient on every main-grid
/// cell. Requires `p >= 2` (the kernel derivative is unbounded at ties for
/// smaller p).
pub fn gradient_rayleigh(u: &GridFunction, kern: &KernelTable, q: f64) -> Result<Vec<f64>> {
    let p = kern.params.p;
    if p < 2.0 {
        return Err(Error::UnsupportedP(format!(
            "gradient needs p >= 2, got {p}; use the derivative-free fallback"
        )));
    }
    let nq = norm_q(u, q)?;
    if nq == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let energy = seminorm_p(u, kern)?;
    let applied = apply_fplap(u, kern)?;
    let measure = kern.cell_measure();
    let norm_pow_p = nq.powf(p);
    let norm_pow_q = nq.powf(q);
    let scale_op = 2.0 * p * measure / norm_pow_p;
    let scale_norm = p * energy / norm_pow_p * measure / norm_pow_q;
    Ok((0..kern.grid.total_cells())
        .map(|i| scale_op * applied[i] - scale_norm * signed_pow(u.value(i), q))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rasterize, ShapeSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_grid() -> Grid {
        Grid::square_2d([-1.0, -1.0], 1.0 / 6.0, 12).unwrap()
    }

    fn params(s: f64, p: f64, q: f64) -> FracParams {
        FracParams::new(s, p, q, 2).unwrap()
    }

    fn random_function(support: &DomainMask, seed: u64, lo: f64, hi: f64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..support.grid.total_cells())
            .map(|i| if support.inside[i] { rng.gen_range(lo..hi) } else { 0.0 })
            .collect();
        GridFunction::new(support.clone(), vals).unwrap()
    }

    #[test]
    fn critical_exponent() {
        assert!((params(0.5, 2.0, 2.0).p_star() - 4.0).abs() < 1e-14);
        let fp = FracParams::new(0.9, 3.0, 17.0, 2).unwrap();
        assert!(fp.p_star().is_infinite());
        assert!(matches!(
            FracParams::new(0.5, 2.0, 4.0, 2),
            Err(Error::SupercriticalQ { .. })
        ));
    }

    #[test]
    fn neighbor_weight_matches_exponent_arithmetic() {
        // d = 2, s = 0.5, p = 2: d + sp = 3 and w = delta^{-3} * delta^4 = delta
        let g = small_grid();
        let kern = build_kernel(&g, params(0.5, 2.0, 2.0), 2.0).unwrap();
        let w = kern.weight_between([3, 4, 0], [4, 4, 0]);
        assert!((w - g.spacing).abs() < 1e-15 * g.spacing);
    }

    #[test]
    fn tail_at_center_is_radial_integral() {
        let g = small_grid();
        let fp = params(0.5, 2.0, 2.0);
        let kern = build_kernel(&g, fp, 2.0).unwrap();
        // center-ish cell (6,6) sits at +delta/2 from the box center
        let idx = g.linear_index(6, 6, 0);
        let x = g.center_of(idx);
        let (lo, hi) = kern.pad_box();
        let rho = (x[0] - lo[0]).min(hi[0] - x[0]).min(x[1] - lo[1]).min(hi[1] - x[1]);
        let expect = std::f64::consts::TAU * rho.powf(-fp.sp()) / fp.sp();
        assert!((kern.tau(idx) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn doubling_pad_factor_scales_center_tail() {
        let g = small_grid();
        let fp = params(0.5, 2.0, 2.0);
        let k2 = build_kernel(&g, fp, 2.0).unwrap();
        let k4 = build_kernel(&g, fp, 4.0).unwrap();
        let idx = g.linear_index(6, 6, 0);
        let ratio = k4.tau(idx) / k2.tau(idx);
        let rho = |k: &KernelTable| {
            let x = g.center_of(idx);
            let (lo, hi) = k.pad_box();
            (x[0] - lo[0]).min(hi[0] - x[0]).min(x[1] - lo[1]).min(hi[1] - x[1])
        };
        let exact = (rho(&k4) / rho(&k2)).powf(-fp.sp());
        assert!((ratio - exact).abs() <= 1e-12 * exact);
        // the power law, up to the half-cell offset of the center cell
        let expect = 2f64.powf(-fp.sp());
        assert!((ratio - expect).abs() < 0.03 * expect, "ratio {ratio} vs {expect}");
    }

    #[test]
    fn seminorm_of_zero_is_zero() {
        let g = small_grid();
        let kern = build_kernel(&g, params(0.5, 2.0, 2.0), 2.0).unwrap();
        let support = rasterize(&ShapeSpec::ball([0.0; 3], 0.7), &g).unwrap();
        let u = GridFunction::zeros(support);
        assert_eq!(seminorm_p(&u, &kern).unwrap(), 0.0);
    }

    #[test]
    fn seminorm_is_p_homogeneous() {
        let g = small_grid();
        for &p in &[2.0, 3.0, 2.6] {
            let kern = build_kernel(&g, params(0.5, p, 2.0), 2.0).unwrap();
            let support = rasterize(&ShapeSpec::ball([0.1, 0.0, 0.0], 0.6), &g).unwrap();
            let u = random_function(&support, 9, 0.0, 1.0);
            let mut cu = u.clone();
            cu.scale_in_place(-2.5);
            let e = seminorm_p(&u, &kern).unwrap();
            let ec = seminorm_p(&cu, &kern).unwrap();
            let expect = abs_pow(2.5, p) * e;
            assert!((ec - expect).abs() <= 1e-12 * expect, "p={p}");
        }
    }

    #[test]
    fn single_cell_energy_matches_row_sum() {
        let g = small_grid();
        let kern = build_kernel(&g, params(0.4, 2.0, 2.0), 2.0).unwrap();
        let support = rasterize(&ShapeSpec::ball([0.09, 0.09, 0.0], 0.05), &g).unwrap();
        assert_eq!(support.count(), 1);
        let cell = support.cell_indices()[0];
        let u = GridFunction::from_fn(support, |_| 1.0).unwrap();
        let e = seminorm_p(&u, &kern).unwrap();
        let expect = 2.0 * (kern.total_weight(cell) + kern.tau(cell) * kern.cell_measure());
        assert!((e - expect).abs() <= 1e-12 * expect);
    }

    /// Brute-force double sum over every ordered padded-cell pair, written
    /// independently of the production path.
    fn seminorm_oracle(u: &GridFunction, kern: &KernelTable) -> f64 {
        let g = &kern.grid;
        let d = g.dim;
        let fp = kern.params;
        let delta = g.spacing;
        let pc = kern.pad_counts();
        let (pad_lo, pad_hi) = kern.pad_box();
        let pad_cells: Vec<[usize; 3]> = (0..pc[2])
            .flat_map(|z| (0..pc[1]).flat_map(move |y| (0..pc[0]).map(move |x| [x, y, z])))
            .collect();
        let center = |c: &[usize; 3]| -> Point {
            let mut p = [0.0; 3];
            for k in 0..d {
                p[k] = pad_lo[k] + (c[k] as f64 + 0.5) * delta;
            }
            p
        };
        let value = |pt: Point| -> f64 {
            match g.locate(pt) {
                Some(c) => u.value(g.linear_index(c[0], c[1], c[2])),
                None => 0.0,
            }
        };
        let mut pair = 0.0;
        for a in &pad_cells {
            let xa = center(a);
            let ua = value(xa);
            for b in &pad_cells {
                if a == b {
                    continue;
                }
                let xb = center(b);
                let dist2: f64 = (0..d).map(|k| (xa[k] - xb[k]) * (xa[k] - xb[k])).sum();
                let w = delta.powi(2 * d as i32) * dist2.sqrt().powf(-(d as f64 + fp.sp()));
                pair += w * abs_pow(ua - value(xb), fp.p);
            }
        }
        let mut tail = 0.0;
        for a in &pad_cells {
            let xa = center(a);
            let ua = value(xa);
            if ua == 0.0 {
                continue;
            }
            let mut rho = f64::INFINITY;
            for k in 0..d {
                rho = rho.min(xa[k] - pad_lo[k]).min(pad_hi[k] - xa[k]);
            }
            let tau = sphere_measure(d) * rho.powf(-fp.sp()) / fp.sp();
            tail += 2.0 * tau * abs_pow(ua, fp.p) * delta.powi(d as i32);
        }
        pair + tail
    }

    #[test]
    fn seminorm_matches_brute_force_double_sum() {
        let g = Grid::square_2d([-1.0, -1.0], 0.25, 8).unwrap();
        for &(s, p) in &[(0.5, 2.0), (0.3, 3.0), (0.8, 2.0)] {
            let kern = build_kernel(&g, params(s, p, 1.5), 2.0).unwrap();
            let support = rasterize(&ShapeSpec::ball([0.1, -0.1, 0.0], 0.6), &g).unwrap();
            let u = random_function(&support, 21, 0.0, 1.0);
            let fast = seminorm_p(&u, &kern).unwrap();
            let slow = seminorm_oracle(&u, &kern);
            assert!(
                (fast - slow).abs() <= 1e-12 * slow,
                "s={s} p={p}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn apply_on_indicator_matches_hand_sums() {
        let g = small_grid();
        let kern = build_kernel(&g, params(0.5, 2.0, 2.0), 2.0).unwrap();
        let domain = rasterize(&ShapeSpec::ball([0.0; 3], 0.7), &g).unwrap();
        let cell = {
            // pick an in-domain cell near the center
            g.linear_index(6, 6, 0)
        };
        assert!(domain.inside[cell]);
        let mut vals = vec![0.0; g.total_cells()];
        vals[cell] = 1.0;
        let u = GridFunction::new(domain.clone(), vals).unwrap();
        let v = apply_fplap(&u, &kern).unwrap();
        let measure = kern.cell_measure();
        let expect_diag = kern.total_weight(cell) / measure + kern.tau(cell);
        assert!((v[cell] - expect_diag).abs() <= 1e-12 * expect_diag);
        for &other in domain.cell_indices().iter() {
            if other == cell {
                continue;
            }
            let w = kern.weight_between(g.coords(other), g.coords(cell));
            let expect = -w / measure;
            assert!((v[other] - expect).abs() <= 1e-12 * expect.abs());
        }
    }

    #[test]
    fn apply_is_odd_in_u() {
        let g = small_grid();
        let kern = build_kernel(&g, params(0.6, 3.0, 2.0), 2.0).unwrap();
        let support = rasterize(&ShapeSpec::ball([0.0; 3], 0.6), &g).unwrap();
        let u = random_function(&support, 4, -1.0, 1.0);
        let mut neg = u.clone();
        neg.scale_in_place(-1.0);
        let vu = apply_fplap(&u, &kern).unwrap();
        let vn = apply_fplap(&neg, &kern).unwrap();
        for i in 0..vu.len() {
            assert!((vu[i] + vn[i]).abs() <= 1e-12 * vu[i].abs().max(1e-12));
        }
    }

    #[test]
    fn rayleigh_scale_invariance_and_modulus_projection() {
        let g = small_grid();
        let kern = build_kernel(&g, params(0.5, 2.0, 2.0), 2.0).unwrap();
        let support = rasterize(&ShapeSpec::ball([0.0; 3], 0.7), &g).unwrap();
        let u = random_function(&support, 13, -1.0, 1.0);
        let r = rayleigh(&u, &kern, 2.0).unwrap();
        for &c in &[0.5, 3.0, -2.0] {
            let mut cu = u.clone();
            cu.scale_in_place(c);
            let rc = rayleigh(&cu, &kern, 2.0).unwrap();
            assert!((rc - r).abs() <= 1e-12 * r);
        }
        // modulus never increases the quotient
        let abs_u = GridFunction::new(
            support.clone(),
            u.values().iter().map(|v| v.abs()).collect(),
        )
        .unwrap();
        let ra = rayleigh(&abs_u, &kern, 2.0).unwrap();
        assert!(ra <= r * (1.0 + 1e-12));
    }

    #[test]
    fn zero_function_rejected_by_rayleigh() {
        let g = small_grid();
        let kern = build_kernel(&g, params(0.5, 2.0, 2.0), 2.0).unwrap();
        let u = GridFunction::zeros(rasterize(&ShapeSpec::ball([0.0; 3], 0.5), &g).unwrap());
        assert!(matches!(rayleigh(&u, &kern, 2.0), Err(Error::ZeroFunction)));
    }

    #[test]
    fn gradient_rejects_small_p() {
        let g = small_grid();
        let kern = build_kernel(&g, params(0.5, 1.5, 1.2), 2.0).unwrap();
        let support = rasterize(&ShapeSpec::ball([0.0; 3], 0.5), &g).unwrap();
        let u = random_function(&support, 2, 0.1, 1.0);
        assert!(matches!(
            gradient_rayleigh(&u, &kern, 1.2),
            Err(Error::UnsupportedP(_))
        ));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let g = small_grid();
        for &(p, q) in &[(2.0, 2.0), (3.0, 2.0), (2.0, 3.0), (3.0, 3.0)] {
            let kern = build_kernel(&g, params(0.5, p, q), 2.0).unwrap();
            let support = rasterize(&ShapeSpec::ball([0.0; 3], 0.7), &g).unwrap();
            let u = random_function(&support, 31, 0.2, 1.2);
            let grad = gradient_rayleigh(&u, &kern, q).unwrap();
            let delta_dir = random_function(&support, 77, -1.0, 1.0);
            let eps = 1e-6;
            let mut up = u.clone();
            let mut dn = u.clone();
            let cells = support.cell_indices();
            let upv: Vec<f64> = cells.iter().map(|&c| u.value(c) + eps * delta_dir.value(c)).collect();
            let dnv: Vec<f64> = cells.iter().map(|&c| u.value(c) - eps * delta_dir.value(c)).collect();
            up.set_support_values(&cells, &upv);
            dn.set_support_values(&cells, &dnv);
            let fd = (rayleigh(&up, &kern, q).unwrap() - rayleigh(&dn, &kern, q).unwrap()) / (2.0 * eps);
            let gd: f64 = cells.iter().map(|&c| grad[c] * delta_dir.value(c)).sum();
            assert!(
                (fd - gd).abs() <= 1e-5 * gd.abs().max(1e-10),
                "p={p} q={q}: fd {fd} vs g.delta {gd}"
            );
        }
    }

    #[test]
    fn gradient_euler_orthogonality() {
        let g = small_grid();
        for &(p, q) in &[(2.0, 2.0), (3.0, 1.0), (2.0, 3.5)] {
            let kern = build_kernel(&g, params(0.5, p, q), 2.0).unwrap();
            let support = rasterize(&ShapeSpec::ball([0.0; 3], 0.7), &g).unwrap();
            let u = random_function(&support, 8, 0.05, 1.0);
            let grad = gradient_rayleigh(&u, &kern, q).unwrap();
            let cells = support.cell_indices();
            let dot: f64 = cells.iter().map(|&c| grad[c] * u.value(c)).sum();
            let scale: f64 = cells.iter().map(|&c| (grad[c] * u.value(c)).abs()).sum();
            assert!(dot.abs() <= 1e-10 * scale.max(1e-300), "p={p} q={q}: {dot} vs {scale}");
        }
    }

    #[test]
    fn one_dimensional_interval_eigenvalues_order() {
        let g = Grid::new(1, [-1.0, 0.0, 0.0], 0.05, [40, 1, 1]).unwrap();
        let fp = FracParams::new(0.5, 2.0, 2.0, 1).unwrap();
        let kern = build_kernel(&g, fp, 2.0).unwrap();
        let long = rasterize(&ShapeSpec::ball([0.0; 3], 0.9), &g).unwrap();
        let short = rasterize(&ShapeSpec::ball([0.0; 3], 0.5), &g).unwrap();
        let ol = crate::eigensolver::linear_oracle_p2(&long, &kern).unwrap();
        let os = crate::eigensolver::linear_oracle_p2(&short, &kern).unwrap();
        assert!(ol.lambda < os.lambda, "{} vs {}", ol.lambda, os.lambda);
    }

    #[test]
    fn three_dimensional_energy_matches_tail_arithmetic() {
        let g = Grid::new(3, [-1.0, -1.0, -1.0], 0.25, [8, 8, 8]).unwrap();
        let fp = FracParams::new(0.5, 2.0, 2.0, 3).unwrap();
        let kern = build_kernel(&g, fp, 2.0).unwrap();
        // single-cell indicator: energy is the row sum plus tail
        let support = rasterize(&ShapeSpec::ball([0.13, 0.13, 0.13], 0.1), &g).unwrap();
        assert_eq!(support.count(), 1);
        let cell = support.cell_indices()[0];
        let u = GridFunction::from_fn(support, |_| 1.0).unwrap();
        let e = seminorm_p(&u, &kern).unwrap();
        let expect = 2.0 * (kern.total_weight(cell) + kern.tau(cell) * kern.cell_measure());
        assert!((e - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn translation_changes_energy_only_through_tail() {
        // support well inside the box: shifting mask and values by whole
        // cells moves the energy by less than 1e-3 relative
        let g = Grid::square_2d([-1.0, -1.0], 0.125, 16).unwrap();
        let kern = build_kernel(&g, params(0.5, 2.0, 2.0), 2.0).unwrap();
        let s0 = rasterize(&ShapeSpec::ball([-0.125, 0.0, 0.0], 0.4), &g).unwrap();
        let s1 = rasterize(&ShapeSpec::ball([0.125, 0.0, 0.0], 0.4), &g).unwrap();
        let f = |p: Point, c: f64| (0.16 - (p[0] - c) * (p[0] - c) - p[1] * p[1]).max(0.0);
        let u0 = GridFunction::from_fn(s0, |p| f(p, -0.125)).unwrap();
        let u1 = GridFunction::from_fn(s1, |p| f(p, 0.125)).unwrap();
        let e0 = seminorm_p(&u0, &kern).unwrap();
        let e1 = seminorm_p(&u1, &kern).unwrap();
        assert!((e0 - e1).abs() < 1e-3 * e0, "{e0} vs {e1}");
    }
}

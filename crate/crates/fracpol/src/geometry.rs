//! Halfspace reflection algebra, analytic shapes, rasterization and
//! polarization of cell masks.
//!
//! Conventions used throughout the crate:
//! - points are `[f64; 3]` padded with zeros above the active dimension;
//! - a polarizer is the open halfspace `H = { x : x.h < a }` with `|h| = 1`;
//! - mask polarization is restricted to grid-compatible polarizers
//!   (axis-aligned `h`, plane on the half-cell lattice) so that the mirror
//!   map permutes cell centers and every set identity holds exactly;
//! - cells whose mirror falls outside the grid box pair with "outside the
//!   domain".

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Point in up-to-3 dimensions; coordinates above `dim` are zero.
pub type Point = [f64; 3];

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale(a: Point, c: f64) -> Point {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

/// Rotate `x` about `center` by `theta` in the xy-plane.
pub fn rotate_about_z(x: Point, center: Point, theta: f64) -> Point {
    let (s, c) = theta.sin_cos();
    let d = sub(x, center);
    [
        center[0] + c * d[0] - s * d[1],
        center[1] + s * d[0] + c * d[1],
        x[2],
    ]
}

const UNIT_TOL: f64 = 1e-12;

/// Open affine halfspace `H = { x : x.h < a }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polarizer {
    pub h: Point,
    pub a: f64,
}

impl Polarizer {
    /// Requires `|h| = 1` within 1e-12.
    pub fn new(h: Point, a: f64) -> Result<Self> {
        if !h.iter().all(|v| v.is_finite()) || !a.is_finite() {
            return Err(Error::InvalidParams("polarizer entries must be finite".into()));
        }
        if (norm(h) - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParams(format!(
                "polarizer direction must be unit length, got |h| = {}",
                norm(h)
            )));
        }
        Ok(Self { h, a })
    }

    /// Axis-aligned polarizer with `h = sign * e_axis` and plane `x_axis = sign * a ... `;
    /// the halfspace is `{ sign * x_axis < a }`.
    pub fn axis(axis: usize, positive: bool, a: f64) -> Self {
        let mut h = [0.0; 3];
        h[axis] = if positive { 1.0 } else { -1.0 };
        Self { h, a }
    }

    /// In-plane polarizer through `base` with unit normal at `angle` from e1 (2D).
    pub fn through_point_2d(base: Point, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let h = [c, s, 0.0];
        Self { h, a: dot(base, h) }
    }

    pub fn contains(&self, x: Point) -> bool {
        dot(x, self.h) < self.a
    }
}

/// Reflection across the hyperplane bounding `hs`: `x - 2 (x.h - a) h`.
pub fn reflect_point(x: Point, hs: &Polarizer) -> Point {
    let t = dot(x, hs.h) - hs.a;
    sub(x, scale(hs.h, 2.0 * t))
}

const MAX_CELLS: usize = 1 << 20;

/// Uniform isotropic cell grid over a box; cell centers at
/// `origin + (k + 1/2) * spacing` per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub origin: Point,
    pub spacing: f64,
    pub counts: [usize; 3],
}

impl Grid {
    pub fn new(dim: usize, origin: Point, spacing: f64, counts: [usize; 3]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParams(format!("grid dim must be 1..=3, got {dim}")));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidParams("grid spacing must be positive".into()));
        }
        let mut c = counts;
        for k in dim..3 {
            if c[k] != 1 {
                return Err(Error::InvalidParams("counts above dim must be 1".into()));
            }
            c[k] = 1;
        }
        if c[..dim].contains(&0) {
            return Err(Error::InvalidParams("grid counts must be positive".into()));
        }
        let total: usize = c.iter().product();
        if total > MAX_CELLS {
            return Err(Error::InvalidParams(format!(
                "grid too large: {total} cells exceeds the {MAX_CELLS} desk-scale guard"
            )));
        }
        Ok(Self { dim, origin, spacing, counts: c })
    }

    /// Square 2D grid over `[lo, lo + n*spacing]^2`.
    pub fn square_2d(lo: [f64; 2], spacing: f64, n: usize) -> Result<Self> {
        Self::new(2, [lo[0], lo[1], 0.0], spacing, [n, n, 1])
    }

    pub fn total_cells(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn linear_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.counts[0] * (iy + self.counts[1] * iz)
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let nx = self.counts[0];
        let ny = self.counts[1];
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }

    pub fn cell_center(&self, coords: [usize; 3]) -> Point {
        let mut p = [0.0; 3];
        for k in 0..self.dim {
            p[k] = self.origin[k] + (coords[k] as f64 + 0.5) * self.spacing;
        }
        p
    }

    pub fn center_of(&self, idx: usize) -> Point {
        self.cell_center(self.coords(idx))
    }

    /// Box corners `(origin, origin + counts * spacing)` over active axes.
    pub fn box_hi(&self) -> Point {
        let mut hi = self.origin;
        for k in 0..self.dim {
            hi[k] = self.origin[k] + self.counts[k] as f64 * self.spacing;
        }
        hi
    }

    /// Cell containing `x`, if inside the box (points on the upper face excluded).
    pub fn locate(&self, x: Point) -> Option<[usize; 3]> {
        let mut c = [0usize; 3];
        for k in 0..self.dim {
            let t = (x[k] - self.origin[k]) / self.spacing;
            if t < 0.0 || t >= self.counts[k] as f64 {
                return None;
            }
            c[k] = t as usize;
        }
        Some(c)
    }
}

/// Side of a cell relative to the polarizer plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    InH,
    OnPlane,
    InHc,
}

/// Mirror map of a grid-compatible axis polarizer: cell index `j` along
/// `axis` reflects to `t - 1 - j` where the plane sits at half-cell index `t`.
#[derive(Debug, Clone, Copy)]
pub struct MirrorMap {
    pub axis: usize,
    pub t: i64,
    pub h_positive: bool,
}

const PLANE_ALIGN_TOL: f64 = 1e-6;

impl MirrorMap {
    /// Decompose a polarizer against a grid; `None` when not grid-compatible.
    pub fn build(hs: &Polarizer, grid: &Grid) -> Option<Self> {
        let mut axis = None;
        for k in 0..3 {
            if hs.h[k].abs() > UNIT_TOL {
                if axis.is_some() || (hs.h[k].abs() - 1.0).abs() > UNIT_TOL {
                    return None;
                }
                axis = Some(k);
            }
        }
        let axis = axis?;
        if axis >= grid.dim {
            return None;
        }
        let h_positive = hs.h[axis] > 0.0;
        // Plane position along the axis; for h = -e_k the plane x_k = -a.
        let b = if h_positive { hs.a } else { -hs.a };
        let t_real = 2.0 * (b - grid.origin[axis]) / grid.spacing;
        let t = t_real.round();
        if (t_real - t).abs() > PLANE_ALIGN_TOL {
            return None;
        }
        Some(Self { axis, t: t as i64, h_positive })
    }

    pub fn side(&self, j: usize) -> Side {
        let v = 2 * j as i64 + 1;
        if v == self.t {
            Side::OnPlane
        } else if (v < self.t) == self.h_positive {
            Side::InH
        } else {
            Side::InHc
        }
    }

    pub fn mirror(&self, j: usize) -> i64 {
        self.t - 1 - j as i64
    }
}

/// True iff the reflection maps every cell center of `grid` onto the cell
/// lattice (axis-aligned direction, plane on the half-cell lattice).
pub fn grid_compatible(hs: &Polarizer, grid: &Grid) -> bool {
    MirrorMap::build(hs, grid).is_some()
}

fn mirror_map(hs: &Polarizer, grid: &Grid) -> Result<MirrorMap> {
    MirrorMap::build(hs, grid).ok_or_else(|| {
        Error::IncompatiblePolarizer(format!(
            "h = {:?}, a = {} does not map cell centers of the grid to cell centers",
            hs.h, hs.a
        ))
    })
}

/// Analytic shape; balls and annuli follow open-set semantics (strict
/// interior for the outer set, closed-ball exclusion for holes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeSpec {
    Ball { center: Point, radius: f64 },
    Annulus { outer_radius: f64, hole_radius: f64, hole_center: Point },
    Rect { center: Point, half_widths: Point },
    Ellipse { center: Point, semi_axes: Point },
    Difference { outer: Box<ShapeSpec>, hole: Box<ShapeSpec> },
}

impl ShapeSpec {
    pub fn ball(center: Point, radius: f64) -> Self {
        ShapeSpec::Ball { center, radius }
    }

    pub fn annulus(outer_radius: f64, hole_radius: f64, hole_center: Point) -> Self {
        ShapeSpec::Annulus { outer_radius, hole_radius, hole_center }
    }

    pub fn difference(outer: ShapeSpec, hole: ShapeSpec) -> Self {
        ShapeSpec::Difference { outer: Box::new(outer), hole: Box::new(hole) }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            ShapeSpec::Ball { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidParams("ball radius must be positive".into()));
                }
            }
            ShapeSpec::Annulus { outer_radius, hole_radius, hole_center } => {
                if !(*hole_radius > 0.0) || !(*outer_radius > 0.0) {
                    return Err(Error::InvalidParams("annulus radii must be positive".into()));
                }
                if norm(*hole_center) + hole_radius >= *outer_radius {
                    return Err(Error::InvalidParams(
                        "annulus hole must lie strictly inside the outer ball".into(),
                    ));
                }
            }
            ShapeSpec::Rect { half_widths, .. } => {
                if half_widths[..dim].iter().any(|v| !(*v > 0.0)) {
                    return Err(Error::InvalidParams("rect half widths must be positive".into()));
                }
            }
            ShapeSpec::Ellipse { semi_axes, .. } => {
                if semi_axes[..dim].iter().any(|v| !(*v > 0.0)) {
                    return Err(Error::InvalidParams("ellipse semi axes must be positive".into()));
                }
            }
            ShapeSpec::Difference { outer, hole } => {
                outer.validate(dim)?;
                hole.validate(dim)?;
            }
        }
        Ok(())
    }

    /// Open-set membership.
    pub fn contains_open(&self, x: Point, dim: usize) -> bool {
        match self {
            ShapeSpec::Ball { center, radius } => norm(sub(x, *center)) < *radius,
            ShapeSpec::Annulus { outer_radius, hole_radius, hole_center } => {
                norm(x) < *outer_radius && norm(sub(x, *hole_center)) > *hole_radius
            }
            ShapeSpec::Rect { center, half_widths } => (0..dim)
                .all(|k| (x[k] - center[k]).abs() < half_widths[k]),
            ShapeSpec::Ellipse { center, semi_axes } => {
                let s: f64 = (0..dim)
                    .map(|k| {
                        let t = (x[k] - center[k]) / semi_axes[k];
                        t * t
                    })
                    .sum();
                s < 1.0
            }
            ShapeSpec::Difference { outer, hole } => {
                outer.contains_open(x, dim) && !hole.contains_closure(x, dim)
            }
        }
    }

    /// Closure membership (used for excluding closed holes).
    pub fn contains_closure(&self, x: Point, dim: usize) -> bool {
        match self {
            ShapeSpec::Ball { center, radius } => norm(sub(x, *center)) <= *radius,
            ShapeSpec::Annulus { outer_radius, hole_radius, hole_center } => {
                norm(x) <= *outer_radius && norm(sub(x, *hole_center)) >= *hole_radius
            }
            ShapeSpec::Rect { center, half_widths } => (0..dim)
                .all(|k| (x[k] - center[k]).abs() <= half_widths[k]),
            ShapeSpec::Ellipse { center, semi_axes } => {
                let s: f64 = (0..dim)
                    .map(|k| {
                        let t = (x[k] - center[k]) / semi_axes[k];
                        t * t
                    })
                    .sum();
                s <= 1.0
            }
            ShapeSpec::Difference { outer, hole } => {
                outer.contains_closure(x, dim) && !hole.contains_open(x, dim)
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bbox(&self, dim: usize) -> (Point, Point) {
        match self {
            ShapeSpec::Ball { center, radius } => {
                let r = [*radius; 3];
                (sub(*center, r), add(*center, r))
            }
            ShapeSpec::Annulus { outer_radius, .. } => {
                let r = [*outer_radius; 3];
                (scale(r, -1.0), r)
            }
            ShapeSpec::Rect { center, half_widths } => {
                (sub(*center, *half_widths), add(*center, *half_widths))
            }
            ShapeSpec::Ellipse { center, semi_axes } => {
                (sub(*center, *semi_axes), add(*center, *semi_axes))
            }
            ShapeSpec::Difference { outer, .. } => outer.bbox(dim),
        }
    }

    /// Translate by `delta`; annuli become explicit differences.
    pub fn translate(&self, delta: Point) -> ShapeSpec {
        match self {
            ShapeSpec::Ball { center, radius } => ShapeSpec::Ball {
                center: add(*center, delta),
                radius: *radius,
            },
            ShapeSpec::Annulus { outer_radius, hole_radius, hole_center } => ShapeSpec::difference(
                ShapeSpec::ball(delta, *outer_radius),
                ShapeSpec::ball(add(*hole_center, delta), *hole_radius),
            ),
            ShapeSpec::Rect { center, half_widths } => ShapeSpec::Rect {
                center: add(*center, delta),
                half_widths: *half_widths,
            },
            ShapeSpec::Ellipse { center, semi_axes } => ShapeSpec::Ellipse {
                center: add(*center, delta),
                semi_axes: *semi_axes,
            },
            ShapeSpec::Difference { outer, hole } => {
                ShapeSpec::difference(outer.translate(delta), hole.translate(delta))
            }
        }
    }

    /// Rotate about `center` in the xy-plane; only rotation-invariant pieces
    /// (balls, ball differences) are supported.
    pub fn rotate_about(&self, center: Point, theta: f64) -> Result<ShapeSpec> {
        match self {
            ShapeSpec::Ball { center: c, radius } => Ok(ShapeSpec::Ball {
                center: rotate_about_z(*c, center, theta),
                radius: *radius,
            }),
            ShapeSpec::Annulus { outer_radius, hole_radius, hole_center } => {
                Ok(ShapeSpec::difference(
                    ShapeSpec::ball(rotate_about_z([0.0; 3], center, theta), *outer_radius),
                    ShapeSpec::ball(rotate_about_z(*hole_center, center, theta), *hole_radius),
                ))
            }
            ShapeSpec::Difference { outer, hole } => Ok(ShapeSpec::difference(
                outer.rotate_about(center, theta)?,
                hole.rotate_about(center, theta)?,
            )),
            ShapeSpec::Rect { .. } | ShapeSpec::Ellipse { .. } => Err(Error::InvalidParams(
                "rotation of axis-aligned rects/ellipses is not representable".into(),
            )),
        }
    }
}

/// Boolean in-domain mask over a grid.
///
/// `exterior` is the constant continuation outside the grid box: false for
/// bounded domains, true for their complements. Mirror cells falling
/// outside the box read this value, so the complement identities stay
/// exact under truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    pub grid: Grid,
    pub inside: Vec<bool>,
    pub exterior: bool,
}

impl DomainMask {
    pub fn empty(grid: Grid) -> Self {
        let n = grid.total_cells();
        Self { grid, inside: vec![false; n], exterior: false }
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.inside.iter().any(|&b| b)
    }

    pub fn complement(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            inside: self.inside.iter().map(|b| !b).collect(),
            exterior: !self.exterior,
        }
    }

    /// Cells of `self` that are not in `other` (set difference).
    pub fn minus(&self, other: &DomainMask) -> Self {
        assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid.clone(),
            inside: self
                .inside
                .iter()
                .zip(&other.inside)
                .map(|(&a, &b)| a && !b)
                .collect(),
            exterior: self.exterior && !other.exterior,
        }
    }

    pub fn is_subset_of(&self, other: &DomainMask) -> bool {
        (!self.exterior || other.exterior)
            && self.inside.iter().zip(&other.inside).all(|(&a, &b)| !a || b)
    }

    /// Linear indices of in-domain cells, ascending.
    pub fn cell_indices(&self) -> Vec<usize> {
        self.inside
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}

/// Rasterize a shape by cell-center membership; the shape bounding box must
/// lie inside the grid box.
pub fn rasterize(shape: &ShapeSpec, grid: &Grid) -> Result<DomainMask> {
    shape.validate(grid.dim)?;
    let (lo, hi) = shape.bbox(grid.dim);
    let ghi = grid.box_hi();
    for k in 0..grid.dim {
        if lo[k] < grid.origin[k] - 1e-9 || hi[k] > ghi[k] + 1e-9 {
            return Err(Error::ShapeOutsideGrid(format!(
                "axis {k}: shape spans [{}, {}], grid box [{}, {}]",
                lo[k], hi[k], grid.origin[k], ghi[k]
            )));
        }
    }
    let mut mask = DomainMask::empty(grid.clone());
    for idx in 0..grid.total_cells() {
        mask.inside[idx] = shape.contains_open(grid.center_of(idx), grid.dim);
    }
    Ok(mask)
}

fn read_mirror(mask: &DomainMask, mirror: Option<usize>) -> bool {
    mirror.map(|m| mask.inside[m]).unwrap_or(mask.exterior)
}

/// Walk all cells once, classifying against the mirror map. `f` receives
/// `(linear index, side, mirror linear index if inside the grid)`.
fn for_each_cell<F: FnMut(usize, Side, Option<usize>)>(grid: &Grid, mm: &MirrorMap, mut f: F) {
    let [nx, ny, nz] = grid.counts;
    for iz in 0..nz {
        for iy in 0..ny {
            for ix in 0..nx {
                let idx = grid.linear_index(ix, iy, iz);
                let j = [ix, iy, iz][mm.axis];
                let side = mm.side(j);
                let jm = mm.mirror(j);
                let mirror = if jm >= 0 && (jm as usize) < grid.counts[mm.axis] {
                    let mut c = [ix, iy, iz];
                    c[mm.axis] = jm as usize;
                    Some(grid.linear_index(c[0], c[1], c[2]))
                } else {
                    None
                };
                f(idx, side, mirror);
            }
        }
    }
}

/// Polarization of a mask: mirrored pairs keep their union on the `H` side
/// and their intersection on the other; plane cells are fixed. Pairs are
/// visited once, indexed by the `H`-side cell in lexicographic order.
pub fn polarize_mask(mask: &DomainMask, hs: &Polarizer) -> Result<DomainMask> {
    let mm = mirror_map(hs, &mask.grid)?;
    let mut out = mask.inside.clone();
    for_each_cell(&mask.grid, &mm, |idx, side, mirror| match side {
        Side::OnPlane => {}
        Side::InH => {
            let a = mask.inside[idx];
            let b = read_mirror(mask, mirror);
            out[idx] = a || b;
            if let Some(m) = mirror {
                out[m] = a && b;
            }
        }
        Side::InHc => {
            if mirror.is_none() {
                out[idx] = mask.inside[idx] && mask.exterior;
            }
        }
    });
    Ok(DomainMask { grid: mask.grid.clone(), inside: out, exterior: mask.exterior })
}

/// Dual polarization: union on the complement side, intersection on `H`.
pub fn dual_polarize_mask(mask: &DomainMask, hs: &Polarizer) -> Result<DomainMask> {
    let mm = mirror_map(hs, &mask.grid)?;
    let mut out = mask.inside.clone();
    for_each_cell(&mask.grid, &mm, |idx, side, mirror| match side {
        Side::OnPlane => {}
        Side::InHc => {
            let a = mask.inside[idx];
            let b = read_mirror(mask, mirror);
            out[idx] = a || b;
            if let Some(m) = mirror {
                out[m] = a && b;
            }
        }
        Side::InH => {
            if mirror.is_none() {
                out[idx] = mask.inside[idx] && mask.exterior;
            }
        }
    });
    Ok(DomainMask { grid: mask.grid.clone(), inside: out, exterior: mask.exterior })
}

/// Reflected mask; cells whose mirror leaves the grid read the exterior
/// continuation (outside the domain for bounded sets).
pub fn reflect_mask(mask: &DomainMask, hs: &Polarizer) -> Result<DomainMask> {
    let mm = mirror_map(hs, &mask.grid)?;
    let mut out = vec![false; mask.inside.len()];
    for_each_cell(&mask.grid, &mm, |idx, _side, mirror| {
        out[idx] = read_mirror(mask, mirror);
    });
    Ok(DomainMask { grid: mask.grid.clone(), inside: out, exterior: mask.exterior })
}

/// Witness cells certifying that polarization moved the set:
/// `A = reflection(M) minus M` on the `H` side, `B = M minus reflection(M)`
/// on the `H` side. Both are nonempty whenever the polarization is neither
/// the identity nor the full reflection.
pub fn witness_sets(mask: &DomainMask, hs: &Polarizer) -> Result<(DomainMask, DomainMask)> {
    let mm = mirror_map(hs, &mask.grid)?;
    let mut a = vec![false; mask.inside.len()];
    let mut b = vec![false; mask.inside.len()];
    for_each_cell(&mask.grid, &mm, |idx, side, mirror| {
        if side == Side::InH {
            let mirror_in = read_mirror(mask, mirror);
            a[idx] = mirror_in && !mask.inside[idx];
            b[idx] = mask.inside[idx] && !mirror_in;
        }
    });
    Ok((
        DomainMask { grid: mask.grid.clone(), inside: a, exterior: false },
        DomainMask { grid: mask.grid.clone(), inside: b, exterior: false },
    ))
}

/// True iff polarization fixes the mask, i.e. the reflected set restricted
/// to `H` is contained in the set and no cell is truncated at the box edge.
pub fn is_polarization_invariant(mask: &DomainMask, hs: &Polarizer) -> Result<bool> {
    let mm = mirror_map(hs, &mask.grid)?;
    let mut invariant = true;
    for_each_cell(&mask.grid, &mm, |idx, side, mirror| match side {
        Side::InH => {
            if read_mirror(mask, mirror) && !mask.inside[idx] {
                invariant = false;
            }
        }
        Side::InHc => {
            if mirror.is_none() && mask.inside[idx] && !mask.exterior {
                invariant = false;
            }
        }
        Side::OnPlane => {}
    });
    Ok(invariant)
}

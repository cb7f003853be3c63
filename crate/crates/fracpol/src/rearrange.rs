//! Polarization of grid functions and discrete L^q norms.
//!
//! A `GridFunction` stores one value per cell and is zero outside its
//! support mask (the nonlocal Dirichlet condition). Function polarization
//! swaps mirrored pairs to (max on the `H` side, min on the other), which
//! permutes the multiset of values exactly; norms are therefore preserved
//! up to floating-point reassociation.

use crate::error::{Error, Result};
use crate::geometry::{polarize_mask, DomainMask, Grid, MirrorMap, Polarizer, Side};
use crate::reduce::tree_sum;

/// Real values per cell, zero outside `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub support: DomainMask,
    values: Vec<f64>,
}

impl GridFunction {
    /// Values outside the support must already be zero; all values finite.
    pub fn new(support: DomainMask, values: Vec<f64>) -> Result<Self> {
        if values.len() != support.grid.total_cells() {
            return Err(Error::InvalidParams(format!(
                "value count {} does not match grid cell count {}",
                values.len(),
                support.grid.total_cells()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("grid function values must be finite".into()));
        }
        if support.exterior {
            return Err(Error::InvalidParams(
                "a zero-extended function needs a bounded support mask".into(),
            ));
        }
        for (i, (&v, &inside)) in values.iter().zip(&support.inside).enumerate() {
            if !inside && v != 0.0 {
                return Err(Error::InvalidParams(format!(
                    "nonzero value {v} at cell {i} outside the support"
                )));
            }
        }
        Ok(Self { grid: support.grid.clone(), support, values })
    }

    /// Evaluate `f` at in-support cell centers, zero elsewhere.
    pub fn from_fn(support: DomainMask, f: impl Fn(crate::geometry::Point) -> f64) -> Result<Self> {
        let grid = support.grid.clone();
        let values = (0..grid.total_cells())
            .map(|i| if support.inside[i] { f(grid.center_of(i)) } else { 0.0 })
            .collect();
        Self::new(support, values)
    }

    pub fn zeros(support: DomainMask) -> Self {
        let n = support.grid.total_cells();
        Self { grid: support.grid.clone(), support, values: vec![0.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Replace in-support values; used by the solver's inner loop.
    pub fn set_support_values(&mut self, support_cells: &[usize], vals: &[f64]) {
        debug_assert_eq!(support_cells.len(), vals.len());
        for (&c, &v) in support_cells.iter().zip(vals) {
            self.values[c] = v;
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn scale_in_place(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    pub fn min_on_support(&self) -> f64 {
        self.support
            .cell_indices()
            .iter()
            .map(|&i| self.values[i])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Two-point rearrangement of a nonnegative function: mirrored pairs become
/// (max, min) with the max on the `H` side; plane cells are fixed; the
/// support becomes the polarized support mask. Pairs are visited once,
/// indexed by the `H`-side cell in lexicographic order.
pub fn polarize_function(u: &GridFunction, hs: &Polarizer) -> Result<GridFunction> {
    let mm = MirrorMap::build(hs, &u.grid).ok_or_else(|| {
        Error::IncompatiblePolarizer("function polarization needs a grid-compatible polarizer".into())
    })?;
    if !u.is_nonnegative() {
        return Err(Error::NegativeInput(
            "polarization is implemented for nonnegative functions only".into(),
        ));
    }
    let grid = &u.grid;
    let mut out = u.values.clone();
    let [nx, ny, nz] = grid.counts;
    for iz in 0..nz {
        for iy in 0..ny {
            for ix in 0..nx {
                let idx = grid.linear_index(ix, iy, iz);
                let j = [ix, iy, iz][mm.axis];
                match mm.side(j) {
                    Side::OnPlane => {}
                    Side::InH => {
                        let jm = mm.mirror(j);
                        if jm >= 0 && (jm as usize) < grid.counts[mm.axis] {
                            let mut c = [ix, iy, iz];
                            c[mm.axis] = jm as usize;
                            let m = grid.linear_index(c[0], c[1], c[2]);
                            let (a, b) = (u.values[idx], u.values[m]);
                            out[idx] = a.max(b);
                            out[m] = a.min(b);
                        }
                        // mirror outside the box: pairs with value 0, and
                        // max(a, 0) = a for nonnegative a
                    }
                    Side::InHc => {
                        let jm = mm.mirror(j);
                        if jm < 0 || (jm as usize) >= grid.counts[mm.axis] {
                            out[idx] = 0.0; // min(a, 0) = 0
                        }
                    }
                }
            }
        }
    }
    let support = polarize_mask(&u.support, hs)?;
    GridFunction::new(support, out)
}

/// Discrete L^q norm `(sum |u_i|^q * spacing^dim)^(1/q)` in a fixed
/// deterministic summation order.
pub fn norm_q(u: &GridFunction, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidParams(format!("norm exponent q must be >= 1, got {q}")));
    }
    let cell_measure = u.grid.spacing.powi(u.grid.dim as i32);
    let terms: Vec<f64> = u
        .support
        .cell_indices()
        .iter()
        .map(|&i| u.values[i].abs().powf(q) * cell_measure)
        .collect();
    Ok(tree_sum(terms).powf(1.0 / q))
}

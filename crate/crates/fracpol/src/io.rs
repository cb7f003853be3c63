//! Portable text formats for masks and grid functions, and the JSON
//! serialization of solver results.
//!
//! Mask format: one header line `dims nx ny spacing origin_x origin_y`,
//! then `ny` rows of `nx` characters `0`/`1` (row `iy = 0` first, `ix`
//! ascending within a row). Grid functions append one value per in-support
//! cell in row-major cell order, 17 significant digits.

use crate::error::{Error, Result};
use crate::geometry::{DomainMask, Grid};
use crate::rearrange::GridFunction;
use std::fmt::Write as _;

pub fn mask_to_text(mask: &DomainMask) -> Result<String> {
    let g = &mask.grid;
    if mask.exterior {
        return Err(Error::InvalidParams(
            "mask text format covers bounded domains (exterior false)".into(),
        ));
    }
    if g.dim != 2 {
        return Err(Error::InvalidParams(format!(
            "mask text format is two-dimensional, grid has dim {}",
            g.dim
        )));
    }
    let mut out = String::new();
    writeln!(
        out,
        "dims {} {} {} {} {}",
        g.counts[0], g.counts[1], g.spacing, g.origin[0], g.origin[1]
    )
    .expect("write to string");
    for iy in 0..g.counts[1] {
        for ix in 0..g.counts[0] {
            out.push(if mask.inside[g.linear_index(ix, iy, 0)] { '1' } else { '0' });
        }
        out.push('\n');
    }
    Ok(out)
}

fn parse_header(line: &str) -> Result<Grid> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 6 || toks[0] != "dims" {
        return Err(Error::Parse(format!("bad mask header: {line:?}")));
    }
    let nx: usize = toks[1].parse().map_err(|e| Error::Parse(format!("nx: {e}")))?;
    let ny: usize = toks[2].parse().map_err(|e| Error::Parse(format!("ny: {e}")))?;
    let spacing: f64 = toks[3].parse().map_err(|e| Error::Parse(format!("spacing: {e}")))?;
    let ox: f64 = toks[4].parse().map_err(|e| Error::Parse(format!("origin_x: {e}")))?;
    let oy: f64 = toks[5].parse().map_err(|e| Error::Parse(format!("origin_y: {e}")))?;
    Grid::new(2, [ox, oy, 0.0], spacing, [nx, ny, 1])
}

pub fn mask_from_text(text: &str) -> Result<DomainMask> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty mask text".into()))?;
    let grid = parse_header(header)?;
    let mut inside = vec![false; grid.total_cells()];
    for iy in 0..grid.counts[1] {
        let row = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing mask row {iy}")))?;
        let chars: Vec<char> = row.chars().collect();
        if chars.len() != grid.counts[0] {
            return Err(Error::Parse(format!(
                "mask row {iy} has {} characters, expected {}",
                chars.len(),
                grid.counts[0]
            )));
        }
        for (ix, ch) in chars.iter().enumerate() {
            inside[grid.linear_index(ix, iy, 0)] = match ch {
                '1' => true,
                '0' => false,
                other => return Err(Error::Parse(format!("bad mask character {other:?}"))),
            };
        }
    }
    Ok(DomainMask { grid, inside, exterior: false })
}

pub fn function_to_text(u: &GridFunction) -> Result<String> {
    let mut out = mask_to_text(&u.support)?;
    for &c in &u.support.cell_indices() {
        writeln!(out, "{:.16e}", u.value(c)).expect("write to string");
    }
    Ok(out)
}

pub fn function_from_text(text: &str) -> Result<GridFunction> {
    let mask = mask_from_text(text)?;
    let rows = mask.grid.counts[1] + 1;
    let mut values = vec![0.0; mask.grid.total_cells()];
    let mut value_lines = text.lines().skip(rows);
    for &c in &mask.cell_indices() {
        let line = value_lines
            .next()
            .ok_or_else(|| Error::Parse("missing function values".into()))?;
        values[c] = line
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad value {line:?}: {e}")))?;
    }
    GridFunction::new(mask, values)
}

/// JSON document for a solver result; the eigenfunction itself goes to a
/// separate text file referenced by `function_file`.
pub fn eigenresult_json(
    result: &crate::eigensolver::EigenResult,
    params_echo: serde_json::Value,
    function_file: &str,
) -> String {
    let doc = serde_json::json!({
        "lambda": result.lambda,
        "iterations": result.iterations,
        "gradNorm": result.grad_norm,
        "converged": result.converged,
        "minOnDomain": result.min_on_domain,
        "method": result.method,
        "paramsEcho": params_echo,
        "functionFile": function_file,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json serialization");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rasterize, ShapeSpec};

    #[test]
    fn mask_round_trip() {
        let g = Grid::square_2d([-1.0, -1.0], 0.125, 16).unwrap();
        let m = rasterize(&ShapeSpec::annulus(0.9, 0.25, [0.2, 0.0, 0.0]), &g).unwrap();
        let text = mask_to_text(&m).unwrap();
        let back = mask_from_text(&text).unwrap();
        assert_eq!(m, back);
        assert!(text.starts_with("dims 16 16 0.125 -1 -1\n"));
    }

    #[test]
    fn function_round_trip_preserves_bits() {
        let g = Grid::square_2d([-1.0, -1.0], 0.25, 8).unwrap();
        let support = rasterize(&ShapeSpec::ball([0.0; 3], 0.7), &g).unwrap();
        let u = GridFunction::from_fn(support, |p| (1.0 - p[0] * p[0] - p[1] * p[1]).max(0.0) / 3.0)
            .unwrap();
        let text = function_to_text(&u).unwrap();
        let back = function_from_text(&text).unwrap();
        assert_eq!(u.support, back.support);
        for i in 0..u.values().len() {
            assert_eq!(u.value(i).to_bits(), back.value(i).to_bits(), "cell {i}");
        }
    }

    #[test]
    fn non_2d_mask_rejected() {
        let g = Grid::new(1, [0.0; 3], 0.5, [8, 1, 1]).unwrap();
        let m = DomainMask::empty(g);
        assert!(mask_to_text(&m).is_err());
    }
}

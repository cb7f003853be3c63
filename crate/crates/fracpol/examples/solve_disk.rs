//! Compute the first eigenvalue of the fractional p-Laplacian on the unit
//! disk and print the solver telemetry.
//!
//! ```bash
//! cargo run --release -p fracpol --example solve_disk
//! ```

use fracpol::*;

fn main() -> Result<()> {
    let grid = Grid::square_2d([-1.0, -1.0], 1.0 / 12.0, 24)?;
    let frac = FracParams::new(0.5, 2.0, 2.0, 2)?;
    let kern = build_kernel(&grid, frac, 2.0)?;
    let mask = rasterize(&ShapeSpec::ball([0.0; 3], 1.0), &grid)?;
    println!("domain: unit disk rasterized to {} cells", mask.count());

    let res = solve(&mask, &kern, &SolverParams::default())?;
    println!("lambda        = {:.10}", res.lambda);
    println!("iterations    = {}", res.iterations);
    println!("gradient norm = {:.3e}", res.grad_norm);
    println!("converged     = {}", res.converged);
    println!("min over domain cells = {:.3e} (positivity is expected)", res.min_on_domain);
    println!("norm_q(u)     = {:.16}", norm_q(&res.u, frac.q)?);

    // the Rayleigh quotient of any competitor is an upper bound
    let bump = GridFunction::from_fn(mask.clone(), |p| {
        (1.0 - p[0] * p[0] - p[1] * p[1]).max(0.0)
    })?;
    println!("rayleigh(parabolic bump) = {:.10} >= lambda", rayleigh(&bump, &kern, frac.q)?);
    Ok(())
}

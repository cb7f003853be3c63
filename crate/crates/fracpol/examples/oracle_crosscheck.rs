//! Cross-check the variational descent solver against the independent
//! linear eigensolver available at p = q = 2.
//!
//! ```bash
//! cargo run --release -p fracpol --example oracle_crosscheck
//! ```

use fracpol::*;

fn main() -> Result<()> {
    let grid = Grid::square_2d([-1.0, -1.0], 1.0 / 12.0, 24)?;
    for s in [0.4, 0.6] {
        let frac = FracParams::new(s, 2.0, 2.0, 2)?;
        let kern = build_kernel(&grid, frac, 2.0)?;
        for (name, shape) in [
            ("unit disk", ShapeSpec::ball([0.0; 3], 1.0)),
            ("annulus, hole at 0.2", ShapeSpec::annulus(1.0, 0.3, [0.2, 0.0, 0.0])),
        ] {
            let mask = rasterize(&shape, &grid)?;
            let oracle = linear_oracle_p2(&mask, &kern)?;
            let descent = solve(&mask, &kern, &SolverParams::default())?;
            let rel = (descent.lambda - oracle.lambda).abs() / oracle.lambda;
            println!(
                "s={s}: {name:22} oracle={:.10} descent={:.10} rel.gap={:.2e}",
                oracle.lambda, descent.lambda, rel
            );
        }
    }
    Ok(())
}

//! Function polarization: the L^q norms are preserved exactly (the values
//! are permuted) while the nonlocal energy never increases.
//!
//! ```bash
//! cargo run --release -p fracpol --example rearrange_function
//! ```

use fracpol::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let grid = Grid::square_2d([-1.0, -1.0], 1.0 / 12.0, 24)?;
    let support = rasterize(&ShapeSpec::ball([0.15, -0.1, 0.0], 0.55), &grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let values: Vec<f64> = (0..grid.total_cells())
        .map(|i| if support.inside[i] { rng.gen_range(0.0..1.0) } else { 0.0 })
        .collect();
    let u = GridFunction::new(support, values)?;

    // polarize across the vertical center plane
    let hs = Polarizer::axis(0, true, 0.0);
    let v = polarize_function(&u, &hs)?;

    for q in [1.0, 2.0, 3.5] {
        println!(
            "q = {q}: norm(u) = {:.15}, norm(Pu) = {:.15}",
            norm_q(&u, q)?,
            norm_q(&v, q)?
        );
    }

    for (s, p) in [(0.3, 2.0), (0.5, 2.0), (0.8, 3.0)] {
        let kern = build_kernel(&grid, FracParams::new(s, p, 1.0, 2)?, 2.0)?;
        let eu = seminorm_p(&u, &kern)?;
        let ev = seminorm_p(&v, &kern)?;
        println!(
            "s={s} p={p}: energy(u) = {eu:.8}, energy(Pu) = {ev:.8}, drop = {:.3e}",
            eu - ev
        );
    }
    Ok(())
}

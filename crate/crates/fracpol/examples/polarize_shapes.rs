//! Polarization of rasterized sets: exact identities on masks.
//!
//! Shows the halfspace reflection algebra, the translation of an annulus
//! hole by one polarization, invariance below the hole offset, and the
//! witness cells certifying a genuinely moved domain.
//!
//! ```bash
//! cargo run --release -p fracpol --example polarize_shapes
//! ```

use fracpol::*;

fn render(mask: &DomainMask) -> String {
    let g = &mask.grid;
    let mut out = String::new();
    for iy in (0..g.counts[1]).rev() {
        for ix in 0..g.counts[0] {
            out.push(if mask.inside[g.linear_index(ix, iy, 0)] { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

fn main() -> Result<()> {
    let grid = Grid::square_2d([-1.0, -1.0], 0.0625, 32)?;
    let omega = |t: f64| ShapeSpec::annulus(1.0, 0.3, [t, 0.0, 0.0]);

    // hole at 0.125, polarizer plane at 0.25: the polarized domain is the
    // annulus with the hole reflected to 0.375
    let m1 = rasterize(&omega(0.125), &grid)?;
    let hs = Polarizer::axis(0, true, 0.25);
    assert!(grid_compatible(&hs, &grid));
    let moved = polarize_mask(&m1, &hs)?;
    let expected = rasterize(&omega(0.375), &grid)?;
    println!("polarized annulus equals re-rasterized annulus: {}", moved == expected);
    println!("{}", render(&moved));

    // invariance when the plane sits at or below the hole offset
    let low = Polarizer::axis(0, true, 0.0625);
    println!(
        "invariant for plane below the hole offset: {}",
        is_polarization_invariant(&m1, &low)?
    );

    // witness cells: reflected-set-minus-set and set-minus-reflected-set on
    // the halfspace side, both nonempty exactly when the domain moved
    let (a, b) = witness_sets(&m1, &hs)?;
    println!("witness cell counts: A = {}, B = {}", a.count(), b.count());

    // dual polarization is the reflected polarization
    let dual = dual_polarize_mask(&m1, &hs)?;
    println!(
        "dual equals reflect(polarize): {}",
        dual == reflect_mask(&polarize_mask(&m1, &hs)?, &hs)?
    );
    // complements swap the two rearrangements
    println!(
        "polarize(complement) equals complement(dual): {}",
        polarize_mask(&m1.complement(), &hs)? == dual.complement()
    );
    Ok(())
}

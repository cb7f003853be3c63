//! Property tests for the exact discrete set identities, over generated
//! ball-union masks and grid-compatible polarizers.
//!
//! Masks live in a band around the box center (cells within 0.65 of it)
//! and polarizer planes stay within three half-cells (0.125), so every
//! mirror of a mask cell lands inside the grid (|2b - x| < 0.9) and each
//! identity is a plain boolean equality. Truncation behavior at the box
//! edge is covered separately by unit tests.

use fracpol::*;
use proptest::prelude::*;

const N: usize = 24;
const SPACING: f64 = 1.0 / 12.0;

fn grid() -> Grid {
    Grid::square_2d([-1.0, -1.0], SPACING, N).unwrap()
}

#[derive(Debug, Clone)]
struct Balls(Vec<([f64; 3], f64)>);

fn balls_strategy() -> impl Strategy<Value = Balls> {
    prop::collection::vec(
        ((-0.4f64..0.4), (-0.4f64..0.4), (0.08f64..0.25)),
        1..=4,
    )
    .prop_map(|v| Balls(v.into_iter().map(|(x, y, r)| ([x, y, 0.0], r)).collect()))
}

fn polarizer_strategy() -> impl Strategy<Value = Polarizer> {
    (0usize..2, any::<bool>(), -3i64..=3).prop_map(|(axis, positive, off)| {
        let g = grid();
        let t = g.counts[axis] as i64 + off;
        let b = g.origin[axis] + t as f64 * g.spacing / 2.0;
        Polarizer::axis(axis, positive, if positive { b } else { -b })
    })
}

fn union_mask(balls: &Balls) -> DomainMask {
    let g = grid();
    let mut mask = DomainMask::empty(g.clone());
    for idx in 0..g.total_cells() {
        let c = g.center_of(idx);
        mask.inside[idx] = balls.0.iter().any(|(z, r)| {
            let dx = c[0] - z[0];
            let dy = c[1] - z[1];
            (dx * dx + dy * dy).sqrt() < *r
        });
    }
    mask
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn involution_and_idempotence(balls in balls_strategy(), hs in polarizer_strategy()) {
        let m = union_mask(&balls);
        let refl = reflect_mask(&m, &hs).unwrap();
        prop_assert_eq!(reflect_mask(&refl, &hs).unwrap(), m.clone());
        let pol = polarize_mask(&m, &hs).unwrap();
        prop_assert_eq!(polarize_mask(&pol, &hs).unwrap(), pol);
    }

    #[test]
    fn polarization_ignores_prior_reflection(balls in balls_strategy(), hs in polarizer_strategy()) {
        let m = union_mask(&balls);
        let refl = reflect_mask(&m, &hs).unwrap();
        prop_assert_eq!(polarize_mask(&refl, &hs).unwrap(), polarize_mask(&m, &hs).unwrap());
    }

    #[test]
    fn dual_complement_and_invariance(balls in balls_strategy(), hs in polarizer_strategy()) {
        let m = union_mask(&balls);
        let pol = polarize_mask(&m, &hs).unwrap();
        let dual = dual_polarize_mask(&m, &hs).unwrap();
        prop_assert_eq!(&dual, &reflect_mask(&pol, &hs).unwrap());
        prop_assert_eq!(polarize_mask(&m.complement(), &hs).unwrap(), dual.complement());
        prop_assert_eq!(is_polarization_invariant(&m, &hs).unwrap(), pol == m.clone());
        prop_assert_eq!(pol.count(), m.count());
    }

    #[test]
    fn moved_masks_have_witness_cells(balls in balls_strategy(), hs in polarizer_strategy()) {
        let m = union_mask(&balls);
        let pol = polarize_mask(&m, &hs).unwrap();
        let refl = reflect_mask(&m, &hs).unwrap();
        if pol != m && pol != refl {
            let (a, b) = witness_sets(&m, &hs).unwrap();
            prop_assert!(a.count() > 0);
            prop_assert!(b.count() > 0);
        }
    }

    #[test]
    fn function_polarization_preserves_value_multiset(
        balls in balls_strategy(),
        hs in polarizer_strategy(),
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let support = union_mask(&balls);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = support.grid.clone();
        let values: Vec<f64> = (0..g.total_cells())
            .map(|i| if support.inside[i] { rng.gen_range(0.0..1.0) } else { 0.0 })
            .collect();
        let u = GridFunction::new(support, values).unwrap();
        let v = polarize_function(&u, &hs).unwrap();
        let mut a: Vec<u64> = u.values().iter().map(|x| x.to_bits()).collect();
        let mut b: Vec<u64> = v.values().iter().map(|x| x.to_bits()).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        // norms agree up to reassociation
        for &q in &[1.0, 2.0, 3.5] {
            let nu = norm_q(&u, q).unwrap();
            let nv = norm_q(&v, q).unwrap();
            prop_assert!((nu - nv).abs() <= 1e-12 * nu.max(1e-300));
        }
    }
}

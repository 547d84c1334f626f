mod common;

use std::sync::Arc;

use cech_core::cover::{random_ball_cover, Provenance};
use cech_core::nerve::build_nerve;
use cech_core::pou::{partition_of_unity, solve_function_cocycle, FunctionCochain1};
use common::gen::{random_planar_points, rng};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tent_partition_is_subordinate_and_normalised(seed in any::<u64>(), count in 1usize..8) {
        let mut rng = rng(seed);
        let space = random_planar_points(&mut rng, 40);
        let cover = Arc::new(random_ball_cover(&mut rng, space.clone(), count, 0.1, 0.5).unwrap());
        let eta = partition_of_unity(cover.clone()).unwrap();
        prop_assert!(eta.is_subordinate());
        prop_assert!(eta.normalization_error() <= 1e-12);
        let coords = space.coords().unwrap();
        for p in 0..space.len() {
            let tents: Vec<f64> = cover
                .sets()
                .iter()
                .map(|s| {
                    let Provenance::Ball { center, radius } = *s.provenance() else { unreachable!() };
                    if !s.contains(p) {
                        return 0.0;
                    }
                    let d = coords[p].iter().zip(&coords[center]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                    (1.0 - d / radius).max(0.0)
                })
                .collect();
            let total: f64 = tents.iter().sum();
            for (a, tent) in tents.iter().enumerate() {
                prop_assert!((eta.weight(a, p) - tent / total).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn potentials_solve_difference_cocycles(seed in any::<u64>(), count in 1usize..8) {
        let mut rng = rng(seed);
        let space = random_planar_points(&mut rng, 40);
        let cover = Arc::new(random_ball_cover(&mut rng, space.clone(), count, 0.1, 0.5).unwrap());
        let nerve = Arc::new(build_nerve(&cover, 2).unwrap());
        // r_ab = f_b - f_a for arbitrary local functions f
        let f: Vec<Vec<f64>> = (0..cover.len()).map(|_| (0..space.len()).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let entries: Vec<_> = nerve
            .edges()
            .iter()
            .map(|&[a, b]| {
                let table = (0..space.len())
                    .filter(|&p| cover.set(a).contains(p) && cover.set(b).contains(p))
                    .map(|p| (p, f[b][p] - f[a][p]))
                    .collect();
                ((a, b), table)
            })
            .collect();
        let r = FunctionCochain1::new(cover.clone(), nerve.clone(), entries).unwrap();
        prop_assert!(r.validate_cocycle().is_ok());
        let eta = partition_of_unity(cover.clone()).unwrap();
        let t = solve_function_cocycle(&r, &eta).unwrap();
        prop_assert!(t.residual(&r) <= 1e-9);
        for (a, table) in t.tables.iter().enumerate() {
            prop_assert!(table.keys().copied().eq(cover.set(a).members()));
        }
    }
}

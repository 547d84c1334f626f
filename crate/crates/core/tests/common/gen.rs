//! Seeded generators shared by the property and acceptance tests.

use std::sync::Arc;

use cech_core::cover::{Cover, CoverSet, PointMap, SampleSpace};
use cech_core::nerve::Nerve;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each edge with probability `p_edge`, then each triangle of the graph
/// with probability `p_tri`.
pub fn random_nerve(rng: &mut ChaCha8Rng, vertices: usize, p_edge: f64, p_tri: f64) -> Arc<Nerve> {
    let mut edges = Vec::new();
    for a in 0..vertices {
        for b in a + 1..vertices {
            if rng.random_bool(p_edge) {
                edges.push([a, b]);
            }
        }
    }
    let has = |a: usize, b: usize| edges.contains(&[a, b]);
    let mut triangles = Vec::new();
    for a in 0..vertices {
        for b in a + 1..vertices {
            for c in b + 1..vertices {
                if has(a, b) && has(b, c) && has(a, c) && rng.random_bool(p_tri) {
                    triangles.push([a, b, c]);
                }
            }
        }
    }
    Arc::new(Nerve::from_simplices(vertices, &edges, &triangles).unwrap())
}

pub fn random_points(rng: &mut ChaCha8Rng, max: usize) -> Arc<SampleSpace> {
    Arc::new(SampleSpace::abstract_points(rng.random_range(1..=max)))
}

pub fn random_planar_points(rng: &mut ChaCha8Rng, count: usize) -> Arc<SampleSpace> {
    let coords = (0..count).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
    Arc::new(SampleSpace::from_coords(coords).unwrap())
}

pub fn random_explicit_cover(rng: &mut ChaCha8Rng, space: &Arc<SampleSpace>, max_sets: usize, p: f64) -> Cover {
    let sets = (0..rng.random_range(1..=max_sets))
        .map(|_| {
            let members: Vec<usize> = (0..space.len()).filter(|_| rng.random_bool(p)).collect();
            CoverSet::explicit(space, members).unwrap()
        })
        .collect();
    Cover::new(space.clone(), sets).unwrap()
}

pub fn random_map(rng: &mut ChaCha8Rng, from: &Arc<SampleSpace>, to: &Arc<SampleSpace>) -> PointMap {
    let image = (0..from.len()).map(|_| rng.random_range(0..to.len())).collect();
    PointMap::new(from.clone(), to.clone(), image).unwrap()
}

pub fn members(c: &Cover) -> Vec<Vec<usize>> {
    c.sets().iter().map(|s| s.members().collect()).collect()
}

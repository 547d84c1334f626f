//! Generators for sample spaces and covers used by fixtures and tests.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;

use super::{Cover, CoverSet, SampleSpace};
use crate::error::{Error, Result};

/// Points `lo, lo + step, ...` up to `hi` on the real line.
pub fn unit_interval_sample(step: f64, lo: f64, hi: f64) -> Result<SampleSpace> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(Error::input(format!("bad segment sample: step {step} over [{lo}, {hi}]")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let coords = (0..count).map(|i| vec![lo + i as f64 * step]).collect();
    SampleSpace::from_coords(coords)
}

pub fn interval_cover(space: Arc<SampleSpace>, intervals: &[(f64, f64)]) -> Result<Cover> {
    let sets = intervals
        .iter()
        .map(|&(lo, hi)| CoverSet::interval(&space, lo, hi))
        .collect::<Result<Vec<_>>>()?;
    Cover::new(space, sets)
}

/// `resolution × resolution` grid on the closed unit square, row-major.
pub fn grid_unit_square(resolution: usize) -> Result<SampleSpace> {
    if resolution < 2 {
        return Err(Error::input("grid resolution must be at least 2"));
    }
    let step = 1.0 / (resolution - 1) as f64;
    let mut labels = Vec::with_capacity(resolution * resolution);
    let mut coords = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        for i in 0..resolution {
            labels.push(format!("g{i}_{j}"));
            coords.push(vec![i as f64 * step, j as f64 * step]);
        }
    }
    SampleSpace::new(labels, Some(coords), super::Metric::Euclidean)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrickLayout {
    /// Odd rows shifted by half a brick; at most three sets meet.
    Shifted,
    /// Plain grid of squares; four sets meet at every interior vertex.
    Aligned,
}

#[derive(Clone, Debug)]
pub struct BrickParams {
    pub rows: usize,
    pub cols: usize,
    pub eps: f64,
    pub layout: BrickLayout,
    pub resolution: usize,
}

impl BrickParams {
    pub fn new(rows: usize, cols: usize, eps: f64) -> Self {
        BrickParams { rows, cols, eps, layout: BrickLayout::Shifted, resolution: 30 }
    }
}

/// Shifted brick cover of the unit square over a 30×30 grid sample.
pub fn brick_cover(rows: usize, cols: usize, eps: f64) -> Result<Cover> {
    brick_cover_with(&BrickParams::new(rows, cols, eps))
}

/// Axis-aligned bricks of size `1/cols × 1/rows`, each inflated by `eps`.
///
/// With the shifted layout, a point can only be close to a vertical seam
/// in one of two neighbouring rows, which needs `eps < width / 4`; the
/// aligned layout only needs `eps` below half the brick size.
pub fn brick_cover_with(params: &BrickParams) -> Result<Cover> {
    let BrickParams { rows, cols, eps, layout, resolution } = *params;
    if rows == 0 || cols == 0 {
        return Err(Error::input("brick cover needs at least one row and one column"));
    }
    let width = 1.0 / cols as f64;
    let height = 1.0 / rows as f64;
    let limit = match layout {
        BrickLayout::Shifted => (width / 4.0).min(height / 2.0),
        BrickLayout::Aligned => width.min(height) / 2.0,
    };
    if !(eps > 0.0) || eps >= limit {
        return Err(Error::input(format!("brick inflation {eps} must lie in (0, {limit})")));
    }
    let space = Arc::new(grid_unit_square(resolution)?);
    let coords = space.coords().expect("grid has coordinates");

    let mut sets = Vec::new();
    for r in 0..rows {
        let shifted = layout == BrickLayout::Shifted && r % 2 == 1;
        let (offset, count) = if shifted { (0.5, cols + 1) } else { (0.0, cols) };
        let y0 = r as f64 * height - eps;
        let y1 = (r + 1) as f64 * height + eps;
        for c in 0..count {
            let x0 = (c as f64 - offset) * width - eps;
            let x1 = (c as f64 - offset + 1.0) * width + eps;
            let members = coords
                .iter()
                .enumerate()
                .filter(|(_, p)| x0 < p[0] && p[0] < x1 && y0 < p[1] && p[1] < y1)
                .map(|(i, _)| i);
            sets.push(CoverSet::explicit(&space, members)?);
        }
    }
    Cover::new(space, sets)
}

/// `arcs` metric balls around evenly spaced points of a `samples`-point
/// circle. Each arc spans `(1 + overlap)` times its share of the circle,
/// so neighbours overlap and (for `overlap < 1`) no three arcs meet.
pub fn circle_arcs(arcs: usize, samples: usize, overlap: f64) -> Result<Cover> {
    if arcs < 2 || samples < arcs {
        return Err(Error::input(format!("cannot place {arcs} arcs on {samples} samples")));
    }
    if !(overlap > 0.0 && overlap < 1.0) {
        return Err(Error::input(format!("arc overlap {overlap} must lie in (0, 1)")));
    }
    let coords = (0..samples)
        .map(|i| {
            let theta = 2.0 * PI * i as f64 / samples as f64;
            vec![theta.cos(), theta.sin()]
        })
        .collect();
    let space = Arc::new(SampleSpace::from_coords(coords)?);
    let half_angle = PI / arcs as f64 * (1.0 + overlap);
    let radius = 2.0 * (half_angle / 2.0).sin();
    let sets = (0..arcs)
        .map(|a| CoverSet::ball(&space, a * samples / arcs, radius))
        .collect::<Result<Vec<_>>>()?;
    let cover = Cover::new(space, sets)?;
    for a in 0..arcs {
        let b = (a + 1) % arcs;
        if !cover.set(a).meets(cover.set(b)) {
            return Err(Error::input(format!(
                "arcs {a} and {b} share no sample point; increase samples or overlap"
            )));
        }
    }
    Ok(cover)
}

/// Explicit cover whose nerve is the complex generated by `simplices`.
///
/// One sample point per listed simplex plus one per vertex; set `v` holds
/// the points of every simplex containing `v`.
pub fn cover_from_complex(vertices: usize, simplices: &[Vec<usize>]) -> Result<Cover> {
    let mut faces: Vec<Vec<usize>> = (0..vertices).map(|v| vec![v]).collect();
    for s in simplices {
        if let Some(&v) = s.iter().find(|&&v| v >= vertices) {
            return Err(Error::input(format!("simplex {s:?} names unknown vertex {v}")));
        }
        faces.push(s.clone());
    }
    let space = Arc::new(SampleSpace::abstract_points(faces.len()));
    let sets = (0..vertices)
        .map(|v| {
            let members = faces.iter().enumerate().filter(|(_, f)| f.contains(&v)).map(|(i, _)| i);
            CoverSet::explicit(&space, members)
        })
        .collect::<Result<Vec<_>>>()?;
    Cover::new(space, sets)
}

/// `count` random open intervals on a segment sample, topped up with extra
/// intervals around any point left uncovered.
pub fn random_interval_cover<R: Rng>(
    rng: &mut R,
    space: Arc<SampleSpace>,
    count: usize,
    max_width: f64,
) -> Result<Cover> {
    let xs: Vec<f64> = (0..space.len()).map(|p| space.line_coord(p)).collect::<Result<_>>()?;
    let (min, max) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mut intervals: Vec<(f64, f64)> = (0..count)
        .map(|_| {
            let c = rng.random_range(min..=max);
            let w = rng.random_range(0.05 * max_width..=max_width);
            (c - w / 2.0, c + w / 2.0)
        })
        .collect();
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    for &p in &order {
        let x = xs[p];
        if !intervals.iter().any(|&(lo, hi)| lo < x && x < hi) {
            let w = rng.random_range(0.05 * max_width..=max_width);
            let lead = rng.random_range(0.0..w);
            intervals.push((x - lead - 1e-6, x - lead + w));
        }
    }
    interval_cover(space, &intervals)
}

/// `count` balls centred at random sample points. Radii are drawn from
/// `[r_min, r_max]` and then scaled up together until every point is covered.
pub fn random_ball_cover<R: Rng>(
    rng: &mut R,
    space: Arc<SampleSpace>,
    count: usize,
    r_min: f64,
    r_max: f64,
) -> Result<Cover> {
    if count == 0 || space.is_empty() {
        return Err(Error::input("random ball cover needs sets and points"));
    }
    let centers: Vec<usize> = (0..count).map(|_| rng.random_range(0..space.len())).collect();
    let mut radii: Vec<f64> = (0..count).map(|_| rng.random_range(r_min..=r_max)).collect();
    for _ in 0..200 {
        let sets = centers
            .iter()
            .zip(&radii)
            .map(|(&c, &r)| CoverSet::ball(&space, c, r))
            .collect::<Result<Vec<_>>>()?;
        let cover = Cover::new(space.clone(), sets)?;
        if cover.covers_space() {
            return Ok(cover);
        }
        radii.iter_mut().for_each(|r| *r *= 1.25);
    }
    Err(Error::consistency("random ball cover failed to cover the sample"))
}

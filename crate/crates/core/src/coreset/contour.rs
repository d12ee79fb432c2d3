//! Deterministic Contour construction.
//!
//! The data bounding box is cut into `k` nested axis-aligned boxes around
//! the data mean. Each region holding at least `floor(n / (k·m))` points is
//! eligible; coreset slots are dealt round-robin from the outermost eligible
//! region inward. The first point is the one closest to the mean in the
//! innermost planned region, the rest are plotted region by region (inner to
//! outer) with the farthest-point rule, each region seeded by the last point
//! plotted. Weights come from the Lightweight distribution.

use std::time::Instant;

use super::{
    lightweight_distribution, lightweight_weight, sq_dist, Coreset, CoresetMethod, WeightedPoint,
};
use crate::dataset::{compute_stats, Dataset};
use crate::error::{Error, Result};

pub const DEFAULT_REGIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct RegionAssignment {
    pub center: Vec<f64>,
    /// Half-width of one shell per dimension.
    pub region_radii: Vec<f64>,
    /// Region of each point, 0 = innermost.
    pub region_of: Vec<usize>,
    pub k: usize,
}

impl RegionAssignment {
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.k];
        for &r in &self.region_of {
            c[r] += 1;
        }
        c
    }

    /// Indices of the points in region `r`, ascending.
    pub fn members(&self, r: usize) -> Vec<usize> {
        self.region_of
            .iter()
            .enumerate()
            .filter(|&(_, &reg)| reg == r)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPlan {
    pub threshold: usize,
    /// Coreset slots per region, indexed like `RegionAssignment::region_of`.
    pub counts: Vec<usize>,
}

impl RegionPlan {
    pub fn is_eligible(&self, region_size: usize) -> bool {
        region_size >= self.threshold.max(1)
    }
}

pub fn sort_data_in_regions(data: &Dataset, k: usize) -> Result<RegionAssignment> {
    if k == 0 {
        return Err(Error::invalid("region count must be at least 1"));
    }
    let stats = compute_stats(data);
    let radii: Vec<f64> = stats.dim_range.iter().map(|r| r / k as f64 / 2.0).collect();
    let region_of = data
        .rows()
        .map(|p| {
            (0..k)
                .find(|&r| {
                    let scale = (r + 1) as f64;
                    p.iter()
                        .zip(&stats.mean)
                        .zip(&radii)
                        .all(|((x, c), rad)| (x - c).abs() <= rad * scale)
                })
                .unwrap_or(k - 1)
        })
        .collect();
    Ok(RegionAssignment {
        center: stats.mean,
        region_radii: radii,
        region_of,
        k,
    })
}

pub fn plan_region_counts(regions: &RegionAssignment, m: usize) -> Result<RegionPlan> {
    if m == 0 {
        return Err(Error::invalid("coreset size must be at least 1"));
    }
    let n = regions.region_of.len();
    let sizes = regions.counts();
    let mut plan = RegionPlan {
        threshold: n / (regions.k * m),
        counts: vec![0; regions.k],
    };
    let eligible: Vec<usize> = (0..regions.k)
        .rev()
        .filter(|&r| plan.is_eligible(sizes[r]))
        .collect();
    if eligible.is_empty() {
        return Err(Error::Construction("no eligible region".into()));
    }
    let capacity: usize = eligible.iter().map(|&r| sizes[r]).sum();
    if capacity < m {
        return Err(Error::Construction(format!(
            "eligible regions hold {capacity} points, fewer than m = {m}"
        )));
    }
    let mut assigned = 0;
    while assigned < m {
        for &r in &eligible {
            if assigned == m {
                break;
            }
            if plan.counts[r] < sizes[r] {
                plan.counts[r] += 1;
                assigned += 1;
            }
        }
    }
    Ok(plan)
}

/// Index of the point nearest the mean inside the innermost region that has
/// planned slots. Ties go to the lower index.
pub fn first_contour_point(
    data: &Dataset,
    regions: &RegionAssignment,
    plan: &RegionPlan,
) -> Result<usize> {
    let region = (0..regions.k)
        .find(|&r| plan.counts[r] > 0)
        .ok_or_else(|| Error::Construction("no eligible region".into()))?;
    regions
        .members(region)
        .into_iter()
        .map(|i| (i, sq_dist(data.row(i), &regions.center)))
        .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((i, d)),
        })
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Construction("planned region is empty".into()))
}

pub fn build_contour_coreset(data: &Dataset, k: usize, m: usize) -> Result<Coreset> {
    let start = Instant::now();
    if m > data.len() {
        return Err(Error::invalid(format!(
            "coreset size {m} exceeds dataset size {}",
            data.len()
        )));
    }
    let regions = sort_data_in_regions(data, k)?;
    let plan = plan_region_counts(&regions, m)?;
    let chosen = plot_points(data, &regions, &plan)?;

    let q = lightweight_distribution(data);
    let points = chosen
        .into_iter()
        .map(|i| {
            Ok(WeightedPoint {
                position: data.row(i).to_vec(),
                weight: lightweight_weight(q[i], m)?,
                source_index: i,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Coreset {
        points,
        method: CoresetMethod::Contour,
        regions: Some(k),
        construct_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Plotting order of the selected indices.
fn plot_points(
    data: &Dataset,
    regions: &RegionAssignment,
    plan: &RegionPlan,
) -> Result<Vec<usize>> {
    let first = first_contour_point(data, regions, plan)?;
    let mut chosen = vec![first];
    let mut taken = vec![false; data.len()];
    taken[first] = true;
    let mut last = first;

    for r in 0..regions.k {
        let mut quota = plan.counts[r];
        if r == regions.region_of[first] {
            quota -= 1;
        }
        if quota == 0 {
            continue;
        }
        let members = regions.members(r);
        // nearest reference distance per member, seeded with the last plotted point
        let mut nearest: Vec<f64> = members
            .iter()
            .map(|&i| sq_dist(data.row(i), data.row(last)))
            .collect();
        for _ in 0..quota {
            let mut best: Option<(usize, f64)> = None;
            for (slot, &i) in members.iter().enumerate() {
                if taken[i] {
                    continue;
                }
                if best.is_none_or(|(_, bd)| nearest[slot] > bd) {
                    best = Some((slot, nearest[slot]));
                }
            }
            let (slot, _) =
                best.ok_or_else(|| Error::Construction(format!("region {r} ran out of points")))?;
            let pick = members[slot];
            taken[pick] = true;
            chosen.push(pick);
            last = pick;
            for (s, &i) in members.iter().enumerate() {
                nearest[s] = nearest[s].min(sq_dist(data.row(i), data.row(pick)));
            }
        }
    }
    Ok(chosen)
}

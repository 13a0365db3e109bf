//! Graph distances on the 8-neighbour grid graph with metric edge lengths.
//!
//! Graph geodesics overestimate true distances by at most the 8-neighbour
//! anisotropy factor `sec(π/8)` on a locally uniform grid.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geometry::fields::Metric2Field;
use crate::geometry::grid::{Grid2, Topology};

#[derive(Debug, Clone, Copy)]
struct Neighbor {
    node: usize,
    len: f64,
}

/// Precomputed adjacency for repeated shortest-path queries.
#[derive(Debug, Clone)]
pub struct DistanceGraph {
    adj: Vec<Vec<Neighbor>>,
}

#[derive(PartialEq)]
struct State(f64, usize);

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn edge_length(g0: [f64; 3], g1: [f64; 3], du: f64, dv: f64) -> f64 {
    let e = 0.5 * (g0[0] + g1[0]);
    let f = 0.5 * (g0[1] + g1[1]);
    let g = 0.5 * (g0[2] + g1[2]);
    (e * du * du + 2.0 * f * du * dv + g * dv * dv).max(0.0).sqrt()
}

impl DistanceGraph {
    pub fn new(metric: &Metric2Field) -> Self {
        let grid = metric.grid();
        let comp = metric.components();
        let (nu, nv) = (grid.n_u(), grid.n_v());
        let hv = grid.h_v();
        let mut adj = vec![Vec::with_capacity(8); grid.len()];
        for i in 0..nu {
            for j in 0..nv {
                let a = grid.id(i, j);
                for di in -1isize..=1 {
                    for dj in -1isize..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let jj = grid.wrap_v(j as isize + dj);
                        let ii = i as isize + di;
                        let outside = ii < 0 || ii >= nu as isize;
                        if outside && grid.topology() == Topology::Disk && ii >= 0 {
                            continue;
                        }
                        // displacement in the (possibly reflected) chart
                        let du = di as f64 * grid_spacing(grid, i, ii);
                        let dv = dj as f64 * hv;
                        let (b, gb) = if outside {
                            let ib = if ii < 0 { 0 } else { nu - 1 };
                            let b = grid.id(ib, grid.antipodal_column(jj));
                            let c = comp[b];
                            (b, [c[0], -c[1], c[2]])
                        } else {
                            let b = grid.id(ii as usize, jj);
                            (b, comp[b])
                        };
                        adj[a].push(Neighbor { node: b, len: edge_length(comp[a], gb, du, dv) });
                    }
                }
            }
        }
        Self { adj }
    }

    /// Single-source shortest distances.
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        self.distances_from_set(&[source])
    }

    /// Shortest distance to the nearest of `sources`.
    pub fn distances_from_set(&self, sources: &[usize]) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.adj.len()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(State(0.0, s));
        }
        while let Some(State(d, a)) = heap.pop() {
            if d > dist[a] {
                continue;
            }
            for nb in &self.adj[a] {
                let nd = d + nb.len;
                if nd < dist[nb.node] {
                    dist[nb.node] = nd;
                    heap.push(State(nd, nb.node));
                }
            }
        }
        dist
    }
}

fn grid_spacing(grid: &Grid2, i: usize, ii: isize) -> f64 {
    let u = grid.u_values();
    if ii < 0 {
        // reflected ghost sits at -u_0
        2.0 * u[0]
    } else if ii >= grid.n_u() as isize {
        2.0 * (std::f64::consts::PI - u[grid.n_u() - 1])
    } else {
        (u[ii as usize] - u[i]).abs()
    }
}

/// Deterministic source sample: a stride over all nodes plus the boundary.
fn sample_sources(grid: &Grid2, count: usize) -> Vec<usize> {
    let n = grid.len();
    let stride = (n / count.max(1)).max(1);
    let mut s: Vec<usize> = (0..n).step_by(stride).collect();
    s.extend(grid.boundary_index().iter().step_by((grid.n_v() / 8).max(1)));
    s.sort_unstable();
    s.dedup();
    s
}

/// Intrinsic diameter estimate: maximum graph distance from sampled
/// sources, refined by a double sweep from the farthest node found.
pub fn intrinsic_diameter(metric: &Metric2Field) -> f64 {
    let graph = DistanceGraph::new(metric);
    let mut best = 0.0f64;
    let mut far = 0usize;
    for s in sample_sources(metric.grid(), 64) {
        let d = graph.distances_from(s);
        let (k, m) = argmax(&d);
        if m > best {
            best = m;
            far = k;
        }
    }
    for _ in 0..2 {
        let d = graph.distances_from(far);
        let (k, m) = argmax(&d);
        best = best.max(m);
        far = k;
    }
    best
}

/// Distance from every node to the boundary circle (infinite on a sphere).
pub fn distances_to_boundary(metric: &Metric2Field) -> Vec<f64> {
    let sources = metric.grid().boundary_index();
    if sources.is_empty() {
        return vec![f64::INFINITY; metric.len()];
    }
    DistanceGraph::new(metric).distances_from_set(sources)
}

/// Area of the metric balls `{d(center, ·) ≤ r}` for each radius.
pub fn ball_areas(metric: &Metric2Field, center: usize, radii: &[f64]) -> Vec<f64> {
    let d = DistanceGraph::new(metric).distances_from(center);
    let dmu = metric.area_elements();
    radii
        .iter()
        .map(|&r| d.iter().zip(dmu).filter(|(x, _)| **x <= r).map(|(_, a)| a).sum())
        .collect()
}

fn argmax(d: &[f64]) -> (usize, f64) {
    d.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, &x)| if x > acc.1 { (k, x) } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_disk_diameter() {
        let m = Metric2Field::flat_disk(Grid2::disk(32, 64).unwrap(), 1.0).unwrap();
        let d = intrinsic_diameter(&m);
        assert!((d - 2.0).abs() < 0.06, "{d}");
    }

    #[test]
    fn sphere_diameter() {
        let m = Metric2Field::round_sphere(Grid2::sphere(32, 64).unwrap(), 1.5).unwrap();
        let d = intrinsic_diameter(&m);
        assert!((d - 1.5 * PI).abs() < 0.03 * 1.5 * PI, "{d}");
    }
}

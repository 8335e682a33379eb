//! Partial optimal transport between finite persistence diagrams.
//!
//! Points are compared in the `l_inf` metric of the plane and may be sent to
//! the diagonal at cost `(birth - death) / 2`. Note the factor: `Pers_p`
//! (see [`crate::functionals`]) uses the full length `birth - death`, so a
//! diagram's distance to the empty diagram is `2^-1 Pers_p`.
//!
//! `d_p` is solved exactly as a min-cost perfect matching on the augmented
//! bipartite graph (points of `D` plus one diagonal copy per point of `E`,
//! against points of `E` plus one diagonal copy per point of `D`); the
//! bottleneck distance is found by binary search over candidate costs with a
//! Hopcroft-Karp feasibility test.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::assignment::{self, CostMatrix};
use crate::error::{invalid, Result};
use crate::functionals::pers_norm;
use crate::matching::has_perfect_matching;
use crate::numeric::compensated_sum;
use crate::persistence::{Diagram, PersistencePoint};

/// `max(|b - b'|, |d - d'|)`.
pub fn point_distance(z: &PersistencePoint, w: &PersistencePoint) -> f64 {
    (z.birth - w.birth).abs().max((z.death - w.death).abs())
}

/// `l_inf` distance to the diagonal, `|birth - death| / 2`.
pub fn diagonal_distance(z: &PersistencePoint) -> f64 {
    0.5 * (z.birth - z.death).abs()
}

/// One side of a transport pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Point(usize),
    Diagonal,
}

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Endpoint::Point(i) => s.serialize_u64(*i as u64),
            Endpoint::Diagonal => s.serialize_str("diagonal"),
        }
    }
}

/// A matching of the points of two diagrams, with unmatched points sent to the
/// diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportPlan {
    pub pairs: Vec<(Endpoint, Endpoint)>,
    pub p: f64,
    /// `(sum over pairs of cost^p)^(1/p)`.
    pub cost: f64,
}

impl TransportPlan {
    /// `sum over pairs of cost^p`, recomputed from the pairs.
    pub fn total_p_cost(&self, source: &Diagram, target: &Diagram) -> f64 {
        compensated_sum(
            self.pairs
                .iter()
                .map(|&(a, b)| pair_cost(source, target, a, b).powf(self.p)),
        )
    }
}

fn pair_cost(source: &Diagram, target: &Diagram, a: Endpoint, b: Endpoint) -> f64 {
    match (a, b) {
        (Endpoint::Point(i), Endpoint::Point(j)) => {
            point_distance(&source.points[i], &target.points[j])
        }
        (Endpoint::Point(i), Endpoint::Diagonal) => diagonal_distance(&source.points[i]),
        (Endpoint::Diagonal, Endpoint::Point(j)) => diagonal_distance(&target.points[j]),
        (Endpoint::Diagonal, Endpoint::Diagonal) => 0.0,
    }
}

fn check_finite_order(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(invalid("p", "must satisfy 0 < p < inf"))
    }
}

/// Optimal matching for `d_p`.
pub fn transport_plan(d: &Diagram, e: &Diagram, p: f64) -> Result<TransportPlan> {
    check_finite_order(p)?;
    let (m, n) = (d.len(), e.len());
    let pairs: Vec<(Endpoint, Endpoint)> = if m == 0 || n == 0 {
        (0..m)
            .map(|i| (Endpoint::Point(i), Endpoint::Diagonal))
            .chain((0..n).map(|j| (Endpoint::Diagonal, Endpoint::Point(j))))
            .collect()
    } else {
        let size = m + n;
        let cost = CostMatrix::from_fn(size, |row, col| match (row < m, col < n) {
            (true, true) => point_distance(&d.points[row], &e.points[col]).powf(p),
            (true, false) => diagonal_distance(&d.points[row]).powf(p),
            (false, true) => diagonal_distance(&e.points[col]).powf(p),
            (false, false) => 0.0,
        });
        let solution = assignment::solve(&cost);
        solution
            .row_to_col
            .iter()
            .enumerate()
            .filter_map(|(row, &col)| match (row < m, col < n) {
                (true, true) => Some((Endpoint::Point(row), Endpoint::Point(col))),
                (true, false) => Some((Endpoint::Point(row), Endpoint::Diagonal)),
                (false, true) => Some((Endpoint::Diagonal, Endpoint::Point(col))),
                (false, false) => None,
            })
            .collect()
    };
    let mut plan = TransportPlan {
        pairs,
        p,
        cost: 0.0,
    };
    plan.cost = plan.total_p_cost(d, e).powf(1.0 / p);
    Ok(plan)
}

/// Optimal partial transport distance `d_p`, `0 < p < inf`.
pub fn dist_p(d: &Diagram, e: &Diagram, p: f64) -> Result<f64> {
    Ok(transport_plan(d, e, p)?.cost)
}

/// `d_p` for finite `p`, bottleneck distance for `p = inf`.
pub fn distance(d: &Diagram, e: &Diagram, p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        Ok(bottleneck(d, e))
    } else {
        dist_p(d, e, p)
    }
}

/// Bottleneck distance `d_inf`.
pub fn bottleneck(d: &Diagram, e: &Diagram) -> f64 {
    let (m, n) = (d.len(), e.len());
    let diag_d: Vec<f64> = d.points.iter().map(diagonal_distance).collect();
    let diag_e: Vec<f64> = e.points.iter().map(diagonal_distance).collect();
    if m == 0 || n == 0 {
        return diag_d.iter().chain(&diag_e).copied().fold(0.0, f64::max);
    }
    let cross: Vec<f64> = d
        .points
        .iter()
        .flat_map(|z| e.points.iter().map(move |w| point_distance(z, w)))
        .collect();

    let mut candidates: Vec<f64> = cross
        .iter()
        .chain(&diag_d)
        .chain(&diag_e)
        .copied()
        .collect();
    candidates.push(0.0);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let feasible = |eps: f64| {
        let size = m + n;
        let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(size);
        for i in 0..m {
            let mut row: Vec<usize> = (0..n).filter(|&j| cross[i * n + j] <= eps).collect();
            if diag_d[i] <= eps {
                row.extend(n..size);
            }
            adjacency.push(row);
        }
        for (j, &diag) in diag_e.iter().enumerate() {
            let mut row = Vec::with_capacity(m + 1);
            if diag <= eps {
                row.push(j);
            }
            row.extend(n..size);
            adjacency.push(row);
        }
        has_perfect_matching(&adjacency, size)
    };

    // the largest candidate (all points to the diagonal) is always feasible
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Sides of the interpolation inequalities for `d_{p_theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationCheck {
    pub p_theta: f64,
    pub lhs: f64,
    /// `2^(1-theta) d_p^theta (Pers_q(D) + Pers_q(E))^(1-theta)`.
    pub rhs_first: f64,
    /// `2^theta d_q^(1-theta) (Pers_p(D) + Pers_p(E))^theta`.
    pub rhs_second: f64,
}

impl InterpolationCheck {
    /// Smaller of the two slacks `rhs - lhs`.
    pub fn slack(&self) -> f64 {
        (self.rhs_first - self.lhs).min(self.rhs_second - self.lhs)
    }
}

/// Evaluates both interpolation inequalities for `0 < p < q <= inf`,
/// `0 < theta < 1`, with `1/p_theta = theta/p + (1-theta)/q`.
pub fn interpolation_check(
    d: &Diagram,
    e: &Diagram,
    p: f64,
    q: f64,
    theta: f64,
) -> Result<InterpolationCheck> {
    check_finite_order(p)?;
    if q.is_nan() || q <= p {
        return Err(invalid("q", "must exceed p"));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(invalid("theta", "must lie in (0, 1)"));
    }
    let inv_q = if q == f64::INFINITY { 0.0 } else { 1.0 / q };
    let p_theta = 1.0 / (theta / p + (1.0 - theta) * inv_q);
    let lhs = dist_p(d, e, p_theta)?;
    let d_p = dist_p(d, e, p)?;
    let d_q = distance(d, e, q)?;
    let pers_q = pers_norm(d, q)? + pers_norm(e, q)?;
    let pers_p = pers_norm(d, p)? + pers_norm(e, p)?;
    Ok(InterpolationCheck {
        p_theta,
        lhs,
        rhs_first: 2f64.powf(1.0 - theta) * d_p.powf(theta) * pers_q.powf(1.0 - theta),
        rhs_second: 2f64.powf(theta) * d_q.powf(1.0 - theta) * pers_p.powf(theta),
    })
}

/// `n^2` copies of the bar `(1/n, 0)`: `Pers_1 = n` while
/// `d_p(D_n, empty)^p = n^2 (2n)^-p -> 0` for `p > 2`.
pub fn gen_discontinuity_sequence(n: usize, p: f64) -> Result<Diagram> {
    if n < 1 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(p.is_finite() && p > 1.0) {
        return Err(invalid("p", "must exceed 1"));
    }
    let length = 1.0 / n as f64;
    Ok(Diagram::new(
        0,
        (0.0, length),
        vec![PersistencePoint::new(length, 0.0); n * n],
    ))
}

/// Symmetric matrix of pairwise distances, computed in parallel.
pub fn pairwise_distances(diagrams: &[Diagram], p: f64) -> Result<Vec<Vec<f64>>> {
    let n = diagrams.len();
    let upper: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = upper
        .par_iter()
        .map(|&(i, j)| distance(&diagrams[i], &diagrams[j], p))
        .collect::<Result<_>>()?;
    let mut out = vec![vec![0.0; n]; n];
    for (&(i, j), v) in upper.iter().zip(values) {
        out[i][j] = v;
        out[j][i] = v;
    }
    Ok(out)
}

//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_tda::persistence::{Diagram, PersistencePoint};

/// Birth/death values are drawn from `[0, RANGE_MAX]`.
pub const RANGE_MAX: f64 = 4.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw_value(rng: &mut ChaCha8Rng) -> f64 {
    // half of the values sit on a coarse lattice so ties and coincident
    // points occur regularly
    if rng.random_bool(0.5) {
        f64::from(rng.random_range(0..=32u32)) / 8.0
    } else {
        rng.random_range(0.0..RANGE_MAX)
    }
}

/// Random diagram with up to `max_points` points inside `[0, RANGE_MAX]`.
pub fn random_diagram(rng: &mut ChaCha8Rng, degree: usize, max_points: usize) -> Diagram {
    let count = rng.random_range(0..=max_points);
    let points = (0..count)
        .map(|_| {
            let a = draw_value(rng);
            let b = draw_value(rng);
            PersistencePoint::new(a.max(b), a.min(b))
        })
        .collect();
    Diagram::new(degree, (0.0, RANGE_MAX), points)
}

pub fn arb_point() -> impl Strategy<Value = PersistencePoint> {
    (0.0..RANGE_MAX, 0.0..RANGE_MAX).prop_map(|(a, b)| PersistencePoint::new(a.max(b), a.min(b)))
}

pub fn arb_diagram(max_points: usize) -> impl Strategy<Value = Diagram> {
    prop::collection::vec(arb_point(), 0..=max_points)
        .prop_map(|points| Diagram::new(0, (0.0, RANGE_MAX), points))
}

fn linf(z: &PersistencePoint, w: &PersistencePoint) -> f64 {
    (z.birth - w.birth).abs().max((z.death - w.death).abs())
}

fn to_diagonal(z: &PersistencePoint) -> f64 {
    (z.birth - z.death) / 2.0
}

/// Exhaustive search over all partial matchings between `d` and `e`.
///
/// `p = None` gives the bottleneck distance; otherwise `d_p`.
pub fn brute_force_distance(d: &Diagram, e: &Diagram, p: Option<f64>) -> f64 {
    fn search(
        d: &[PersistencePoint],
        e: &[PersistencePoint],
        i: usize,
        used: &mut Vec<bool>,
        acc: f64,
        p: Option<f64>,
        best: &mut f64,
    ) {
        let combine = |acc: f64, c: f64| match p {
            Some(p) => acc + c.powf(p),
            None => acc.max(c),
        };
        if i == d.len() {
            let total = e
                .iter()
                .zip(used.iter())
                .filter(|(_, u)| !**u)
                .fold(acc, |a, (w, _)| combine(a, to_diagonal(w)));
            *best = best.min(total);
            return;
        }
        search(d, e, i + 1, used, combine(acc, to_diagonal(&d[i])), p, best);
        for j in 0..e.len() {
            if !used[j] {
                used[j] = true;
                search(d, e, i + 1, used, combine(acc, linf(&d[i], &e[j])), p, best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; e.len()];
    search(&d.points, &e.points, 0, &mut used, 0.0, p, &mut best);
    match p {
        Some(p) => best.powf(1.0 / p),
        None => best,
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

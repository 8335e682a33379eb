//! Persistence functionals and bar-count estimates.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::{compensated_sum, least_squares};
use crate::persistence::{Diagram, PersistencePoint};

fn check_order(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(invalid("p", "must be finite and positive"))
    }
}

/// `Pers_p^p = sum_b l(b)^p` (note: the p-th power, not its root).
pub fn pers_p(d: &Diagram, p: f64) -> Result<f64> {
    check_order(p)?;
    Ok(compensated_sum(d.lengths().map(|l| l.powf(p))))
}

/// `Pers_p = (sum_b l(b)^p)^(1/p)`; `p = inf` gives the longest bar.
pub fn pers_norm(d: &Diagram, p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        return Ok(d.lengths().fold(0.0, f64::max));
    }
    Ok(pers_p(d, p)?.powf(1.0 / p))
}

/// `N^eps`: number of bars of length at least `eps`.
pub fn count_bars_geq(d: &Diagram, eps: f64) -> Result<usize> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(invalid("eps", "must be finite and positive"));
    }
    Ok(d.lengths().filter(|&l| l >= eps).count())
}

/// `p * integral_0^inf eps^(p-1) N^eps d eps`, evaluated exactly on the step
/// function `eps -> N^eps`.
///
/// With lengths sorted as `l_1 <= .. <= l_m` and `l_0 = 0`, `N^eps` equals
/// `m - j + 1` on `(l_{j-1}, l_j]`, so the integral is
/// `sum_j (m - j + 1) (l_j^p - l_{j-1}^p)`.
pub fn mellin_pers_p(d: &Diagram, p: f64) -> Result<f64> {
    check_order(p)?;
    let mut lengths: Vec<f64> = d.lengths().filter(|&l| l > 0.0).collect();
    lengths.sort_by(f64::total_cmp);
    let m = lengths.len();
    let mut previous = 0.0_f64;
    Ok(compensated_sum(lengths.iter().enumerate().map(
        |(j, &l)| {
            let lp = l.powf(p);
            let term = (m - j) as f64 * (lp - previous);
            previous = lp;
            term
        },
    )))
}

/// Log-log fit of `N^eps` against `1/eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    pub counts: Vec<usize>,
    /// Least-squares slope of `log N^eps` against `log(1/eps)` over the grid
    /// points with `N^eps >= 1`.
    pub slope: f64,
    pub intercept: f64,
    /// `log N^eps - fit` at each used grid point (`None` where `N^eps = 0`).
    pub residuals: Vec<Option<f64>>,
}

/// Estimates `limsup log N^eps / log(1/eps)` by a least-squares slope.
///
/// The grid needs at least four distinct positive values spanning two
/// decades.
pub fn tail_exponent(d: &Diagram, eps_grid: &[f64]) -> Result<TailEstimate> {
    if eps_grid.len() < 4 {
        return Err(invalid("eps_grid", "needs at least 4 points"));
    }
    if eps_grid.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
        return Err(invalid("eps_grid", "entries must be finite and positive"));
    }
    let mut epsilons = eps_grid.to_vec();
    epsilons.sort_by(|a, b| b.total_cmp(a));
    if epsilons.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("eps_grid", "entries must be distinct"));
    }
    if epsilons[0] / epsilons[epsilons.len() - 1] < 100.0 {
        return Err(invalid("eps_grid", "must span at least two decades"));
    }
    let counts: Vec<usize> = epsilons
        .iter()
        .map(|&e| count_bars_geq(d, e))
        .collect::<Result<_>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = epsilons
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c >= 1)
        .map(|(&e, &c)| ((1.0 / e).ln(), (c as f64).ln()))
        .unzip();
    if xs.is_empty() {
        return Err(invalid("eps_grid", "every count is zero"));
    }
    let (intercept, slope) = if xs.len() == 1 {
        (ys[0], 0.0)
    } else {
        least_squares(&xs, &ys).expect("distinct abscissae")
    };
    let residuals = epsilons
        .iter()
        .zip(&counts)
        .map(|(&e, &c)| (c >= 1).then(|| (c as f64).ln() - intercept - slope * (1.0 / e).ln()))
        .collect();
    Ok(TailEstimate {
        epsilons,
        counts,
        slope,
        intercept,
        residuals,
    })
}

/// Diagram whose bar lengths follow `l_i = i^(-1/exponent)`, `i = 1..=count`,
/// so that `N^eps = floor(eps^-exponent)` for `eps >= count^(-1/exponent)`.
/// Bars start at `base`.
pub fn power_law_diagram(exponent: f64, count: usize, base: f64) -> Result<Diagram> {
    if !(exponent.is_finite() && exponent > 0.0) {
        return Err(invalid("exponent", "must be positive"));
    }
    let points: Vec<PersistencePoint> = (1..=count)
        .map(|i| PersistencePoint::new(base + (i as f64).powf(-1.0 / exponent), base))
        .collect();
    let range = (base, base + if count > 0 { 1.0 } else { 0.0 });
    Ok(Diagram::new(0, range, points))
}

/// `C * norm^(d/n) * eps^(-d/n) + betti_x`.
pub fn sobolev_bar_bound(
    norm_wn2: f64,
    n: f64,
    d: usize,
    eps: f64,
    betti_x: usize,
    c: f64,
) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(invalid("eps", "must be positive"));
    }
    if !(n.is_finite() && n > d as f64) {
        return Err(invalid("n", "must exceed the dimension"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(invalid("C", "must be positive"));
    }
    if !(norm_wn2.is_finite() && norm_wn2 >= 0.0) {
        return Err(invalid("norm", "must be finite and non-negative"));
    }
    let e = d as f64 / n;
    Ok(c * norm_wn2.powf(e) * eps.powf(-e) + betti_x as f64)
}

/// Smallest constant `C` for which `N^eps <= sobolev_bar_bound(norm, .., C)`
/// holds for every `(norm, diagram)` sample and every `eps` in the grid:
/// the maximum of `(N^eps - betti_x) / (norm^(d/n) eps^(-d/n))`. Floored at
/// `f64::MIN_POSITIVE` so the result is a valid bound constant.
pub fn fit_bar_bound_constant(
    samples: &[(f64, &Diagram)],
    n: f64,
    d: usize,
    eps_grid: &[f64],
    betti_x: usize,
) -> Result<f64> {
    let mut best = f64::MIN_POSITIVE;
    for &(norm, diagram) in samples {
        for &eps in eps_grid {
            let shape = sobolev_bar_bound(norm, n, d, eps, 0, 1.0)?;
            let excess = count_bars_geq(diagram, eps)? as f64 - betti_x as f64;
            if excess > 0.0 {
                best = best.max(excess / shape);
            }
        }
    }
    Ok(best)
}

/// CSV table `epsilon,count`.
pub fn counts_csv(d: &Diagram, eps_grid: &[f64]) -> Result<String> {
    let mut out = String::from("epsilon,count\n");
    for &e in eps_grid {
        let _ = writeln!(out, "{},{}", e, count_bars_geq(d, e)?);
    }
    Ok(out)
}

/// CSV table `p,pers_p` (the p-th power `Pers_p^p`).
pub fn pers_csv(d: &Diagram, ps: &[f64]) -> Result<String> {
    let mut out = String::from("p,pers_p\n");
    for &p in ps {
        let _ = writeln!(out, "{},{}", p, pers_p(d, p)?);
    }
    Ok(out)
}

//! Betti and Euler curves as exact step functions of the filtration level.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::compensated_sum;
use crate::persistence::Diagram;

/// A compactly supported piecewise-constant function.
///
/// `values[i]` is the value on the half-open piece
/// `(breakpoints[i], breakpoints[i + 1]]`; the function vanishes for
/// `x <= breakpoints[0]` and `x > breakpoints[last]`. Curves are kept in
/// canonical form: adjacent pieces have different values and the first and
/// last pieces are non-zero, so two curves are equal as functions iff they are
/// equal as values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StepCurve {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepCurve {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.iter().any(|x| !x.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("curve", "breakpoints and values must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints", "must be strictly increasing"));
        }
        let expected = breakpoints.len().saturating_sub(1);
        if values.len() != expected {
            return Err(invalid(
                "values",
                format!("expected {expected} piece values, got {}", values.len()),
            ));
        }
        Ok(Self::canonical(breakpoints, values))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    fn canonical(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut bps: Vec<f64> = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            if vals.is_empty() {
                if v == 0.0 {
                    continue;
                }
                bps.push(breakpoints[i]);
            } else if *vals.last().unwrap() == v {
                *bps.last_mut().unwrap() = breakpoints[i + 1];
                continue;
            }
            vals.push(v);
            bps.push(breakpoints[i + 1]);
        }
        while vals.last() == Some(&0.0) {
            vals.pop();
            bps.pop();
        }
        if vals.is_empty() {
            bps.clear();
        }
        Self {
            breakpoints: bps,
            values: vals,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Support `[x_0, x_m]`, `None` for the zero curve.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    pub fn value_at(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b < x);
        if i == 0 || i == self.breakpoints.len() {
            0.0
        } else {
            self.values[i - 1]
        }
    }

    /// Pointwise `op(self, other)` on the merged breakpoints. `op(0, 0)` must
    /// be `0`.
    pub fn combine(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let mut bps: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let values: Vec<f64> = bps
            .windows(2)
            .map(|w| op(self.value_at(w[1]), other.value_at(w[1])))
            .collect();
        Self::canonical(bps, values)
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self::canonical(
            self.breakpoints.clone(),
            self.values.iter().map(|&v| op(v)).collect(),
        )
    }

    /// CSV rows `x_left,x_right,value`, one per piece.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_left,x_right,value\n");
        for (w, v) in self.breakpoints.windows(2).zip(&self.values) {
            let _ = writeln!(out, "{},{},{}", w[0], w[1], v);
        }
        out
    }

    /// Parses the format written by [`StepCurve::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut bps = Vec::new();
        let mut vals = Vec::new();
        for (line_no, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Malformed(format!("line {}: {e}", line_no + 1)))
            };
            if fields.len() != 3 {
                return Err(Error::Malformed(format!(
                    "line {}: expected 3 columns",
                    line_no + 1
                )));
            }
            let (l, r, v) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
            match bps.last() {
                None => bps.push(l),
                Some(&last) if last == l => {}
                Some(&last) if last < l => {
                    // gap between pieces is a zero piece
                    bps.push(l);
                    vals.push(0.0);
                }
                Some(_) => {
                    return Err(Error::Malformed(format!(
                        "line {}: pieces overlap",
                        line_no + 1
                    )))
                }
            }
            bps.push(r);
            vals.push(v);
        }
        Self::new(bps, vals)
    }
}

/// `beta_k(x)`: number of bars alive at level `x`, i.e. with
/// `death < x <= birth`.
///
/// This is the rank of `H_k({f >= x})` for every level above the bottom of
/// the range; it differs from the count of points in the closed quadrant
/// `R_x` ([`Diagram::mass_in_quadrant`]) only at the finitely many death
/// values.
pub fn betti_curve(d: &Diagram) -> StepCurve {
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * d.len());
    for p in d.points.iter().filter(|p| p.birth > p.death) {
        events.push((p.death, 1));
        events.push((p.birth, -1));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut bps: Vec<f64> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    let mut running = 0i64;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        if !bps.is_empty() {
            // count after the previous breakpoint holds on (previous, x]
            vals.push(running as f64);
        }
        bps.push(x);
        while i < events.len() && events[i].0 == x {
            running += events[i].1;
            i += 1;
        }
    }
    StepCurve::canonical(bps, vals)
}

/// `chi(x) = sum_k (-1)^k beta_k(x)`.
pub fn euler_curve(diagrams: &[Diagram]) -> Result<StepCurve> {
    if let Some(first) = diagrams.first() {
        if let Some(bad) = diagrams.iter().find(|d| d.range != first.range) {
            return Err(Error::RangeMismatch {
                left: first.range,
                right: bad.range,
            });
        }
    }
    Ok(diagrams.iter().fold(StepCurve::zero(), |acc, d| {
        let sign = if d.degree % 2 == 0 { 1.0 } else { -1.0 };
        acc.combine(&betti_curve(d), |a, b| a + sign * b)
    }))
}

/// `sum_i |v_i| (x_i - x_{i-1})`.
pub fn l1_norm(c: &StepCurve) -> f64 {
    compensated_sum(
        c.breakpoints
            .windows(2)
            .zip(&c.values)
            .map(|(w, v)| v.abs() * (w[1] - w[0])),
    )
}

/// `integral |c1 - c2| dx`.
pub fn l1_dist(c1: &StepCurve, c2: &StepCurve) -> f64 {
    l1_norm(&c1.combine(c2, |a, b| a - b))
}

/// `integral exp(-i x theta) c(x) dx` in closed form for each `theta`.
pub fn fourier_transform(c: &StepCurve, thetas: &[f64]) -> Vec<Complex64> {
    thetas
        .iter()
        .map(|&theta| {
            if theta == 0.0 {
                return Complex64::new(
                    compensated_sum(
                        c.breakpoints
                            .windows(2)
                            .zip(&c.values)
                            .map(|(w, v)| v * (w[1] - w[0])),
                    ),
                    0.0,
                );
            }
            let i_theta = Complex64::new(0.0, theta);
            c.breakpoints
                .windows(2)
                .zip(&c.values)
                .map(|(w, &v)| {
                    let left = Complex64::from_polar(1.0, -w[0] * theta);
                    let right = Complex64::from_polar(1.0, -w[1] * theta);
                    v * (left - right) / i_theta
                })
                .sum()
        })
        .collect()
}

/// Euler characteristic of the band `{x - eps < f < x + eps}` from the Euler
/// curves of `f` and `-f`: `chi(f, x-eps) + chi(-f, -x-eps) - chi(X)`.
///
/// `eps` must be small enough that neither curve has a breakpoint in the
/// half-open windows `[x - eps, x)` and `[-x - eps, -x)` respectively, so the
/// result is the `eps -> 0` limit.
pub fn level_set_euler(
    f_curve: &StepCurve,
    neg_f_curve: &StepCurve,
    chi_x: i64,
    x: f64,
    eps: f64,
) -> Result<i64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(invalid("eps", "must be positive"));
    }
    let resolves = |c: &StepCurve, at: f64| !c.breakpoints.iter().any(|&b| at - eps <= b && b < at);
    if !resolves(f_curve, x) || !resolves(neg_f_curve, -x) {
        return Err(invalid(
            "eps",
            format!("a breakpoint lies within {eps} below the level"),
        ));
    }
    let upper = f_curve.value_at(x - eps);
    let lower = neg_f_curve.value_at(-x - eps);
    Ok((upper + lower).round() as i64 - chi_x)
}

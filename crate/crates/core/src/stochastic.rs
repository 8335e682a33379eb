//! Ensembles of random fields, empirical Wasserstein distances between
//! samples of diagrams or curves, and the seeded stability experiments.
//!
//! Function-space distances between laws are replaced by the coupled upper
//! bound `E ||f - g||_inf` (`f` and `g` built from the same seed); distances
//! between the induced laws of diagrams and curves are computed exactly on the
//! empirical samples by solving an assignment problem.
//!
//! Per-seed generation and per-pair distance evaluations run on the rayon
//! pool; every reduction is accumulated in seed order, so reports are
//! bitwise independent of the number of worker threads.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{self, CostMatrix};
use crate::cubical::build_complex;
use crate::curves::{betti_curve, euler_curve, fourier_transform, l1_dist, StepCurve};
use crate::error::{invalid, Error, Result};
use crate::field::{
    perturb, sample_trig_field, sobolev_norm, sup_norm_diff, PerturbMode, ScalarField,
};
use crate::numeric::{compensated_sum, least_squares};
use crate::persistence::{compute_diagrams, Diagram};
use crate::transport::dist_p;

/// Offset mixed into a sample seed to seed its perturbation noise, so the
/// noise is independent of the field but identical across amplitudes.
pub const NOISE_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// Slack allowed between measured and predicted log-log slopes.
pub const SLOPE_TOLERANCE: f64 = 0.3;

/// Noise seed used for the sample with the given seed.
pub fn noise_seed(seed: u64) -> u64 {
    seed ^ NOISE_SEED_OFFSET
}

/// How the fields of an ensemble were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum EnsembleDescriptor {
    Trig {
        dim: usize,
        cutoff: usize,
        beta: f64,
    },
    Perturbed {
        base: Box<EnsembleDescriptor>,
        amplitude: f64,
        mode: PerturbMode,
    },
    Fields,
}

/// Per-seed artifacts.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub seed: u64,
    pub field: ScalarField,
    /// One diagram per degree `0..=dim`.
    pub diagrams: Vec<Diagram>,
    /// One Betti curve per degree `0..=dim`.
    pub betti_curves: Vec<StepCurve>,
    pub euler_curve: StepCurve,
}

impl Sample {
    pub fn from_field(seed: u64, field: ScalarField) -> Result<Self> {
        let diagrams = compute_diagrams(&build_complex(&field));
        let betti_curves = diagrams.iter().map(betti_curve).collect();
        let euler_curve = euler_curve(&diagrams)?;
        Ok(Sample {
            seed,
            field,
            diagrams,
            betti_curves,
            euler_curve,
        })
    }
}

/// Summary statistics of an ensemble, accumulated in seed order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub size: usize,
    pub mean_min: f64,
    pub mean_max: f64,
    /// Mean number of finite-length points, per degree.
    pub mean_points: Vec<f64>,
}

/// Samples of a random field, one per seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub descriptor: EnsembleDescriptor,
    pub seeds: Vec<u64>,
    pub samples: Vec<Sample>,
}

impl Ensemble {
    /// Builds an ensemble from already generated fields, in parallel.
    pub fn from_fields(
        descriptor: EnsembleDescriptor,
        seeds: Vec<u64>,
        fields: Vec<ScalarField>,
    ) -> Result<Self> {
        if seeds.len() != fields.len() {
            return Err(Error::SampleCountMismatch {
                left: seeds.len(),
                right: fields.len(),
            });
        }
        let samples = seeds
            .par_iter()
            .zip(fields.into_par_iter())
            .map(|(&seed, field)| Sample::from_field(seed, field))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            descriptor,
            seeds,
            samples,
        })
    }

    /// One random trigonometric field per seed.
    pub fn trig(dim: usize, cutoff: usize, beta: f64, seeds: &[u64]) -> Result<Self> {
        let samples = seeds
            .par_iter()
            .map(|&seed| Sample::from_field(seed, sample_trig_field(dim, cutoff, beta, seed)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            descriptor: EnsembleDescriptor::Trig { dim, cutoff, beta },
            seeds: seeds.to_vec(),
            samples,
        })
    }

    /// The coupled ensemble `g_i = perturb(f_i, amplitude, mode)`, with the
    /// noise of sample `i` seeded by [`noise_seed`] of its seed.
    pub fn perturbed(&self, amplitude: f64, mode: PerturbMode) -> Result<Self> {
        let samples = self
            .samples
            .par_iter()
            .map(|s| {
                let g = perturb(&s.field, amplitude, mode, noise_seed(s.seed))?;
                Sample::from_field(s.seed, g)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            descriptor: EnsembleDescriptor::Perturbed {
                base: Box::new(self.descriptor.clone()),
                amplitude,
                mode,
            },
            seeds: self.seeds.clone(),
            samples,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Diagrams of the given degree, in seed order.
    pub fn diagrams(&self, degree: usize) -> Vec<&Diagram> {
        self.samples.iter().map(|s| &s.diagrams[degree]).collect()
    }

    /// Betti curves of the given degree, in seed order.
    pub fn betti_curves(&self, degree: usize) -> Vec<&StepCurve> {
        self.samples
            .iter()
            .map(|s| &s.betti_curves[degree])
            .collect()
    }

    pub fn euler_curves(&self) -> Vec<&StepCurve> {
        self.samples.iter().map(|s| &s.euler_curve).collect()
    }

    pub fn summary(&self) -> EnsembleSummary {
        let size = self.samples.len();
        let mean = |xs: Vec<f64>| {
            if size == 0 {
                0.0
            } else {
                compensated_sum(xs) / size as f64
            }
        };
        let degrees = self.samples.first().map_or(0, |s| s.diagrams.len());
        EnsembleSummary {
            size,
            mean_min: mean(self.samples.iter().map(|s| s.field.min()).collect()),
            mean_max: mean(self.samples.iter().map(|s| s.field.max()).collect()),
            mean_points: (0..degrees)
                .map(|k| {
                    mean(
                        self.samples
                            .iter()
                            .map(|s| s.diagrams[k].len() as f64)
                            .collect(),
                    )
                })
                .collect(),
        }
    }
}

/// `(min over bijections sigma of (1/N) sum ground(A_i, B_sigma(i))^order)^(1/order)`,
/// solved exactly on the `N x N` distance matrix.
pub fn empirical_wasserstein<T, G>(a: &[T], b: &[T], ground: G, order: f64) -> Result<f64>
where
    T: Sync,
    G: Fn(&T, &T) -> f64 + Sync,
{
    if a.len() != b.len() {
        return Err(Error::SampleCountMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if !(order.is_finite() && order >= 1.0) {
        return Err(invalid("order", "must satisfy 1 <= order < inf"));
    }
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    let distances: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|ij| ground(&a[ij / n], &b[ij % n]))
        .collect();
    if let Some(index) = distances.iter().position(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::NonFinite {
            index,
            value: distances[index],
        });
    }
    let cost = CostMatrix::from_fn(n, |i, j| distances[i * n + j].powf(order));
    let solution = assignment::solve(&cost);
    let total = compensated_sum(
        solution
            .row_to_col
            .iter()
            .enumerate()
            .map(|(i, &j)| cost.get(i, j)),
    );
    Ok((total / n as f64).powf(1.0 / order))
}

fn check_coupled(f: &Ensemble, g: &Ensemble) -> Result<()> {
    if f.seeds != g.seeds {
        return Err(Error::NotCoupled(
            "ensembles were drawn from different seeds".into(),
        ));
    }
    Ok(())
}

/// Coupled upper bound on `W_{1,L_inf}`: the mean over seeds of
/// `sup_norm_diff(f_i, g_i)`.
pub fn coupled_sup_wasserstein_bound(ens_f: &Ensemble, ens_g: &Ensemble) -> Result<f64> {
    check_coupled(ens_f, ens_g)?;
    if ens_f.is_empty() {
        return Ok(0.0);
    }
    let diffs = ens_f
        .samples
        .iter()
        .zip(&ens_g.samples)
        .map(|(s, t)| sup_norm_diff(&s.field, &t.field))
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(diffs) / ens_f.len() as f64)
}

/// Parameters of the stability sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub cutoff: usize,
    pub beta: f64,
    /// Sobolev order of the norms entering the bounds.
    pub n: f64,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub deltas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub degrees: Vec<usize>,
}

impl ExperimentConfig {
    fn validate_common(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if self.cutoff < 1 {
            return Err(invalid("cutoff", "must be at least 1"));
        }
        if !(self.beta.is_finite() && self.beta > self.dim as f64 / 2.0) {
            return Err(invalid("beta", "must exceed dim/2"));
        }
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(invalid("n", "must be positive"));
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(invalid(
                "deltas",
                "must be a non-empty list of finite non-negative values",
            ));
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "must not be empty"));
        }
        if self.degrees.is_empty() || self.degrees.iter().any(|&k| k > self.dim) {
            return Err(invalid(
                "degrees",
                "must be a non-empty list of degrees <= dim",
            ));
        }
        Ok(())
    }

    /// `d/n`, the critical exponent.
    pub fn critical_exponent(&self) -> f64 {
        self.dim as f64 / self.n
    }

    /// Preconditions of [`stability_experiment`]: `p > q > d/n`.
    pub fn validate_diagram(&self) -> Result<()> {
        self.validate_common()?;
        if !(self.p.is_finite()) {
            return Err(invalid("p", "must be finite"));
        }
        if self.q.is_nan() || self.p <= self.q {
            return Err(invalid("p", "must exceed q"));
        }
        if self.q <= self.critical_exponent() {
            return Err(invalid("q", "must exceed d/n"));
        }
        Ok(())
    }

    /// Preconditions of [`curve_stability_experiment`]: `d/n < alpha < 1`.
    pub fn validate_curve(&self) -> Result<()> {
        self.validate_common()?;
        if !(self.alpha > self.critical_exponent() && self.alpha < 1.0) {
            return Err(invalid("alpha", "must lie in (d/n, 1)"));
        }
        Ok(())
    }
}

/// Measurements of one quantity across the amplitude sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    /// `H0`, `H1`, ... or `euler`.
    pub label: String,
    /// Left-hand side per amplitude.
    pub measured: Vec<f64>,
    /// Right-hand side of the bound without its constant, per amplitude.
    pub rhs_without_constant: Vec<f64>,
    /// `measured / rhs_without_constant`, defined as 0 where the right-hand
    /// side vanishes.
    pub ratio: Vec<f64>,
    /// Smallest constant making the bound hold on every raw measurement.
    pub fitted_constant: f64,
    /// `fitted_constant * rhs_without_constant - measured`.
    pub margins: Vec<f64>,
    /// Least-squares slope of `log measured` against `log delta`, over the
    /// amplitudes where both are positive; 0 if fewer than two qualify.
    pub slope: f64,
    pub slope_points: usize,
    /// Representation bound `2 W_{1,d_1}` per amplitude, where it applies.
    pub lipschitz_bound: Option<Vec<f64>>,
    /// Per amplitude, the per-seed raw values entering `measured`.
    pub raw: Vec<Vec<f64>>,
}

impl Series {
    /// Whether every measurement lies below `fitted_constant * rhs` up to an
    /// absolute tolerance.
    pub fn bounded(&self, tol: f64) -> bool {
        self.margins.iter().all(|m| *m >= -tol)
    }
}

/// Output of a stability sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    /// `diagram` or `curve`.
    pub kind: String,
    pub config: ExperimentConfig,
    pub deltas: Vec<f64>,
    pub sup_norm_diff_mean: Vec<f64>,
    pub norm_f_mean: Vec<f64>,
    pub norm_g_mean: Vec<f64>,
    /// Predicted log-log slope: `p - q` or `1 - alpha`.
    pub expected_slope: f64,
    pub slope_tolerance: f64,
    pub series: Vec<Series>,
}

impl StabilityReport {
    /// Whether every number in the report is finite.
    pub fn all_finite(&self) -> bool {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        finite(&self.deltas)
            && finite(&self.sup_norm_diff_mean)
            && finite(&self.norm_f_mean)
            && finite(&self.norm_g_mean)
            && self.expected_slope.is_finite()
            && self.series.iter().all(|s| {
                finite(&s.measured)
                    && finite(&s.rhs_without_constant)
                    && finite(&s.ratio)
                    && s.fitted_constant.is_finite()
                    && finite(&s.margins)
                    && s.slope.is_finite()
                    && s.lipschitz_bound.as_deref().is_none_or(finite)
                    && s.raw.iter().all(|r| finite(r))
            })
    }

    /// Whether every series with at least two fit points has measured slope
    /// `>= expected - tolerance`. Series that vanish identically (such as
    /// `H1` on the circle, where every class is essential) have nothing to
    /// fit and are skipped.
    pub fn slopes_ok(&self) -> bool {
        self.series
            .iter()
            .filter(|s| s.slope_points >= 2)
            .all(|s| s.slope >= self.expected_slope - self.slope_tolerance)
    }

    /// One row per (series, amplitude) with every aggregated measurement.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "series,delta,sup_norm_diff_mean,norm_f_mean,norm_g_mean,measured,rhs_without_constant,ratio,fitted_constant,margin,lipschitz_bound\n",
        );
        for s in &self.series {
            for (i, delta) in self.deltas.iter().enumerate() {
                let lipschitz = s
                    .lipschitz_bound
                    .as_ref()
                    .map_or(String::new(), |b| b[i].to_string());
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    s.label,
                    delta,
                    self.sup_norm_diff_mean[i],
                    self.norm_f_mean[i],
                    self.norm_g_mean[i],
                    s.measured[i],
                    s.rhs_without_constant[i],
                    s.ratio[i],
                    s.fitted_constant,
                    s.margins[i],
                    lipschitz
                );
            }
        }
        out
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        compensated_sum(xs.iter().copied()) / xs.len() as f64
    }
}

fn log_log_slope(deltas: &[f64], measured: &[f64]) -> (f64, usize) {
    let (xs, ys): (Vec<f64>, Vec<f64>) = deltas
        .iter()
        .zip(measured)
        .filter(|(d, m)| **d > 0.0 && **m > 0.0)
        .map(|(d, m)| (d.ln(), m.ln()))
        .unzip();
    let points = xs.len();
    match least_squares(&xs, &ys) {
        Some((_, slope)) if points >= 2 => (slope, points),
        _ => (0.0, points),
    }
}

fn safe_ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// The per-amplitude ensembles and norms shared by both sweeps.
struct Sweep {
    base: Ensemble,
    perturbed: Vec<Ensemble>,
    norms_f: Vec<f64>,
    norms_g: Vec<Vec<f64>>,
    sup_mean: Vec<f64>,
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<Sweep> {
    let base = Ensemble::trig(cfg.dim, cfg.cutoff, cfg.beta, &cfg.seeds)?;
    let norms_f = base
        .samples
        .par_iter()
        .map(|s| sobolev_norm(&s.field, cfg.n))
        .collect::<Result<Vec<_>>>()?;
    let mut perturbed = Vec::with_capacity(cfg.deltas.len());
    let mut norms_g = Vec::with_capacity(cfg.deltas.len());
    let mut sup_mean = Vec::with_capacity(cfg.deltas.len());
    for &delta in &cfg.deltas {
        let g = base.perturbed(delta, PerturbMode::SmoothNoise)?;
        norms_g.push(
            g.samples
                .par_iter()
                .map(|s| sobolev_norm(&s.field, cfg.n))
                .collect::<Result<Vec<_>>>()?,
        );
        sup_mean.push(coupled_sup_wasserstein_bound(&base, &g)?);
        perturbed.push(g);
    }
    Ok(Sweep {
        base,
        perturbed,
        norms_f,
        norms_g,
        sup_mean,
    })
}

fn finish_series(
    label: String,
    deltas: &[f64],
    measured: Vec<f64>,
    rhs: Vec<f64>,
    fitted_constant: f64,
    lipschitz_bound: Option<Vec<f64>>,
    raw: Vec<Vec<f64>>,
) -> Series {
    let ratio = measured
        .iter()
        .zip(&rhs)
        .map(|(m, r)| safe_ratio(*m, *r))
        .collect();
    let margins = measured
        .iter()
        .zip(&rhs)
        .map(|(m, r)| fitted_constant * r - m)
        .collect();
    let (slope, slope_points) = log_log_slope(deltas, &measured);
    Series {
        label,
        measured,
        rhs_without_constant: rhs,
        ratio,
        fitted_constant,
        margins,
        slope,
        slope_points,
        lipschitz_bound,
        raw,
    }
}

/// Diagram stability sweep: for each amplitude `delta`, the mean of
/// `d_p(Dgm_k f_i, Dgm_k g_i)^p` against `max(|f_i|, |g_i|)^q delta^(p-q)`,
/// with norms in `W^{n,2}`.
///
/// The fitted constant is the largest per-sample ratio, so each amplitude's
/// aggregate ratio `mean dist_p^p / (mean max-norm^q * delta^(p-q))` is bounded
/// by it.
pub fn stability_experiment(cfg: &ExperimentConfig) -> Result<StabilityReport> {
    cfg.validate_diagram()?;
    let sweep = run_sweep(cfg)?;
    let exponent = cfg.p - cfg.q;
    let mut series = Vec::with_capacity(cfg.degrees.len());
    for &k in &cfg.degrees {
        let mut measured = Vec::new();
        let mut rhs = Vec::new();
        let mut raw = Vec::new();
        let mut fitted = 0.0_f64;
        for (j, &delta) in cfg.deltas.iter().enumerate() {
            let g = &sweep.perturbed[j];
            let values = sweep
                .base
                .samples
                .par_iter()
                .zip(&g.samples)
                .map(|(s, t)| Ok(dist_p(&s.diagrams[k], &t.diagrams[k], cfg.p)?.powf(cfg.p)))
                .collect::<Result<Vec<f64>>>()?;
            let scale = delta.powf(exponent);
            let shapes: Vec<f64> = sweep
                .norms_f
                .iter()
                .zip(&sweep.norms_g[j])
                .map(|(a, b)| a.max(*b).powf(cfg.q) * scale)
                .collect();
            for (v, s) in values.iter().zip(&shapes) {
                fitted = fitted.max(safe_ratio(*v, *s));
            }
            measured.push(mean(&values));
            rhs.push(mean(&shapes));
            raw.push(values);
        }
        series.push(finish_series(
            format!("H{k}"),
            &cfg.deltas,
            measured,
            rhs,
            fitted,
            None,
            raw,
        ));
    }
    Ok(StabilityReport {
        kind: "diagram".into(),
        config: cfg.clone(),
        deltas: cfg.deltas.clone(),
        sup_norm_diff_mean: sweep.sup_mean,
        norm_f_mean: vec![mean(&sweep.norms_f); cfg.deltas.len()],
        norm_g_mean: sweep.norms_g.iter().map(|n| mean(n)).collect(),
        expected_slope: exponent,
        slope_tolerance: SLOPE_TOLERANCE,
        series,
    })
}

/// Curve stability sweep: for each amplitude, `W_{1,L1}` between the Betti
/// (and Euler) curve samples of the two ensembles against
/// `((E|f|)^alpha + (E|g|)^alpha) * (E||f - g||_inf)^(1-alpha)`.
///
/// The fitted constant is the largest per-amplitude ratio. Each Betti series
/// also records the representation bound `2 W_{1,d_1}` between the diagram
/// samples.
pub fn curve_stability_experiment(cfg: &ExperimentConfig) -> Result<StabilityReport> {
    cfg.validate_curve()?;
    let sweep = run_sweep(cfg)?;
    let norm_f_mean = mean(&sweep.norms_f);
    let rhs: Vec<f64> = sweep
        .norms_g
        .iter()
        .zip(&sweep.sup_mean)
        .map(|(ng, sup)| {
            (norm_f_mean.powf(cfg.alpha) + mean(ng).powf(cfg.alpha)) * sup.powf(1.0 - cfg.alpha)
        })
        .collect();

    let l1 = |a: &&StepCurve, b: &&StepCurve| l1_dist(a, b);
    let d1 = |a: &&Diagram, b: &&Diagram| dist_p(a, b, 1.0).unwrap_or(f64::NAN);

    let mut series = Vec::with_capacity(cfg.degrees.len() + 1);
    for &k in &cfg.degrees {
        let curves_f = sweep.base.betti_curves(k);
        let diagrams_f = sweep.base.diagrams(k);
        let mut measured = Vec::new();
        let mut lipschitz = Vec::new();
        let mut raw = Vec::new();
        for g in &sweep.perturbed {
            measured.push(empirical_wasserstein(
                &curves_f,
                &g.betti_curves(k),
                l1,
                1.0,
            )?);
            lipschitz.push(2.0 * empirical_wasserstein(&diagrams_f, &g.diagrams(k), d1, 1.0)?);
            raw.push(
                curves_f
                    .iter()
                    .zip(g.betti_curves(k))
                    .map(|(a, b)| l1_dist(a, b))
                    .collect(),
            );
        }
        let fitted = measured
            .iter()
            .zip(&rhs)
            .fold(0.0_f64, |c, (m, r)| c.max(safe_ratio(*m, *r)));
        series.push(finish_series(
            format!("H{k}"),
            &cfg.deltas,
            measured,
            rhs.clone(),
            fitted,
            Some(lipschitz),
            raw,
        ));
    }

    let euler_f = sweep.base.euler_curves();
    let mut measured = Vec::new();
    let mut raw = Vec::new();
    for g in &sweep.perturbed {
        measured.push(empirical_wasserstein(&euler_f, &g.euler_curves(), l1, 1.0)?);
        raw.push(
            euler_f
                .iter()
                .zip(g.euler_curves())
                .map(|(a, b)| l1_dist(a, b))
                .collect(),
        );
    }
    let fitted = measured
        .iter()
        .zip(&rhs)
        .fold(0.0_f64, |c, (m, r)| c.max(safe_ratio(*m, *r)));
    series.push(finish_series(
        "euler".into(),
        &cfg.deltas,
        measured,
        rhs,
        fitted,
        None,
        raw,
    ));

    Ok(StabilityReport {
        kind: "curve".into(),
        config: cfg.clone(),
        deltas: cfg.deltas.clone(),
        sup_norm_diff_mean: sweep.sup_mean,
        norm_f_mean: vec![norm_f_mean; cfg.deltas.len()],
        norm_g_mean: sweep.norms_g.iter().map(|n| mean(n)).collect(),
        expected_slope: 1.0 - cfg.alpha,
        slope_tolerance: SLOPE_TOLERANCE,
        series,
    })
}

/// Result of [`fourier_bound_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierReport {
    pub thetas: Vec<f64>,
    /// `|mean_i F chi_f_i(theta) - mean_i F chi_g_i(theta)|` per theta.
    pub lhs_per_theta: Vec<f64>,
    pub lhs: f64,
    /// `sqrt(2) W_{1,L1}` between the Euler curve samples.
    pub rhs: f64,
    pub passed: bool,
}

/// Absolute tolerance of the Fourier bound.
pub const FOURIER_TOLERANCE: f64 = 1e-9;

/// Compares the sup over `thetas` of the difference of mean Fourier
/// transforms of Euler curves with `sqrt(2) W_{1,L1}` of their samples.
pub fn fourier_bound_check(
    ens_f: &Ensemble,
    ens_g: &Ensemble,
    thetas: &[f64],
) -> Result<FourierReport> {
    if ens_f.len() != ens_g.len() {
        return Err(Error::SampleCountMismatch {
            left: ens_f.len(),
            right: ens_g.len(),
        });
    }
    let mean_transform = |ens: &Ensemble| -> Vec<Complex64> {
        let transforms: Vec<Vec<Complex64>> = ens
            .samples
            .par_iter()
            .map(|s| fourier_transform(&s.euler_curve, thetas))
            .collect();
        let n = ens.len().max(1) as f64;
        (0..thetas.len())
            .map(|t| {
                let re = compensated_sum(transforms.iter().map(|v| v[t].re));
                let im = compensated_sum(transforms.iter().map(|v| v[t].im));
                Complex64::new(re / n, im / n)
            })
            .collect()
    };
    let mf = mean_transform(ens_f);
    let mg = mean_transform(ens_g);
    let lhs_per_theta: Vec<f64> = mf.iter().zip(&mg).map(|(a, b)| (a - b).norm()).collect();
    let lhs = lhs_per_theta.iter().copied().fold(0.0, f64::max);
    let w = empirical_wasserstein(
        &ens_f.euler_curves(),
        &ens_g.euler_curves(),
        |a: &&StepCurve, b: &&StepCurve| l1_dist(a, b),
        1.0,
    )?;
    let rhs = std::f64::consts::SQRT_2 * w;
    Ok(FourierReport {
        thetas: thetas.to_vec(),
        lhs_per_theta,
        lhs,
        rhs,
        passed: lhs <= rhs + FOURIER_TOLERANCE,
    })
}

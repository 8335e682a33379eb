//! Scalar fields on the flat torus `[0,1)^d`.
//!
//! A field is a periodic grid of real samples. Fields produced by the
//! trigonometric generators also carry their Fourier coefficients, which makes
//! spectral Sobolev norms exact.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Relative tolerance for the imaginary residue of a Hermitian sum and for
/// spectral/grid consistency.
pub const SPECTRAL_TOLERANCE: f64 = 1e-10;

/// Grid points per axis per unit of cutoff used by the trigonometric sampler.
pub const SAMPLES_PER_CUTOFF: usize = 4;

/// One Fourier coefficient `c_k` of the trigonometric polynomial
/// `f(x) = sum_k c_k exp(2 pi i k.x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub wavevector: Vec<i64>,
    pub value: Complex64,
}

impl Coefficient {
    pub fn new(wavevector: Vec<i64>, value: Complex64) -> Self {
        Self { wavevector, value }
    }

    fn norm_sq_k(&self) -> f64 {
        self.wavevector.iter().map(|&k| (k * k) as f64).sum()
    }
}

// Wire form: [k_1, .., k_d, re, im].
impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.wavevector.len() + 2))?;
        for k in &self.wavevector {
            seq.serialize_element(k)?;
        }
        seq.serialize_element(&self.value.re)?;
        seq.serialize_element(&self.value.im)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<serde_json::Number>::deserialize(deserializer)?;
        if raw.len() < 3 {
            return Err(D::Error::custom("coefficient needs [k.., re, im]"));
        }
        let (ks, reim) = raw.split_at(raw.len() - 2);
        let wavevector = ks
            .iter()
            .map(|n| {
                n.as_i64().ok_or_else(|| {
                    D::Error::custom(format!("wavevector entry {n} is not an integer"))
                })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let re = reim[0]
            .as_f64()
            .ok_or_else(|| D::Error::custom("bad real part"))?;
        let im = reim[1]
            .as_f64()
            .ok_or_else(|| D::Error::custom("bad imaginary part"))?;
        Ok(Self::new(wavevector, Complex64::new(re, im)))
    }
}

/// How a perturbation is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbMode {
    /// Adds the amplitude at every vertex.
    ConstantShift,
    /// Adds an independent trigonometric field rescaled to the given sup norm.
    SmoothNoise,
}

/// Generator descriptor carried by every field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum Provenance {
    Grid,
    Spectral,
    Trig {
        cutoff: usize,
        beta: f64,
        seed: u64,
    },
    WhiteNoise {
        seed: u64,
    },
    Pathological {
        resolution: usize,
    },
    Perturbed {
        base: Box<Provenance>,
        amplitude: f64,
        mode: PerturbMode,
        seed: u64,
    },
}

/// A real scalar field sampled on a periodic grid over `[0,1)^d`.
///
/// Values are stored row-major (the last axis varies fastest); the sample with
/// multi-index `(i_1, .., i_d)` sits at the point `(i_1/n_1, .., i_d/n_d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldFile", into = "FieldFile")]
pub struct ScalarField {
    dim: usize,
    shape: Vec<usize>,
    values: Vec<f64>,
    coeffs: Option<Vec<Coefficient>>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct FieldFile {
    dim: usize,
    shape: Vec<usize>,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<Coefficient>>,
    provenance: Provenance,
}

impl From<ScalarField> for FieldFile {
    fn from(f: ScalarField) -> Self {
        Self {
            dim: f.dim,
            shape: f.shape,
            values: f.values,
            coeffs: f.coeffs,
            provenance: f.provenance,
        }
    }
}

impl TryFrom<FieldFile> for ScalarField {
    type Error = Error;

    fn try_from(file: FieldFile) -> Result<Self> {
        if file.dim != file.shape.len() {
            return Err(Error::Malformed(format!(
                "dim {} does not match shape {:?}",
                file.dim, file.shape
            )));
        }
        let mut field = ScalarField::from_grid(file.values, &file.shape)?;
        field.provenance = file.provenance;
        if let Some(coeffs) = file.coeffs {
            check_coefficients(field.dim, &coeffs)?;
            field.coeffs = Some(coeffs);
            field.check_spectral_consistency()?;
        }
        Ok(field)
    }
}

impl ScalarField {
    /// Wraps raw grid samples as a periodic field without spectral data.
    pub fn from_grid(values: Vec<f64>, shape: &[usize]) -> Result<Self> {
        let dim = shape.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if shape.contains(&0) {
            return Err(invalid("shape", "every axis needs at least one sample"));
        }
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                shape: shape.to_vec(),
                expected,
                actual: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self {
            dim,
            shape: shape.to_vec(),
            values,
            coeffs: None,
            provenance: Provenance::Grid,
        })
    }

    /// Evaluates a Hermitian trigonometric polynomial on the given grid.
    pub fn from_coefficients(shape: &[usize], coeffs: Vec<Coefficient>) -> Result<Self> {
        let dim = shape.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        check_coefficients(dim, &coeffs)?;
        let values = evaluate_on_grid(shape, &coeffs)?;
        let mut field = Self::from_grid(values, shape)?;
        field.coeffs = Some(coeffs);
        field.provenance = Provenance::Spectral;
        Ok(field)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coefficients(&self) -> Option<&[Coefficient]> {
        self.coeffs.as_deref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise negation, used for sublevel quantities via the superlevel
    /// machinery.
    pub fn negated(&self) -> Self {
        Self {
            dim: self.dim,
            shape: self.shape.clone(),
            values: self.values.iter().map(|v| -v).collect(),
            coeffs: self.coeffs.as_ref().map(|cs| {
                cs.iter()
                    .map(|c| Coefficient::new(c.wavevector.clone(), -c.value))
                    .collect()
            }),
            provenance: self.provenance.clone(),
        }
    }

    /// Re-evaluates the stored coefficients and compares with the samples.
    pub fn check_spectral_consistency(&self) -> Result<()> {
        let Some(coeffs) = &self.coeffs else {
            return Ok(());
        };
        let evaluated = evaluate_on_grid(&self.shape, coeffs)?;
        let scale = self.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for (i, (a, b)) in evaluated.iter().zip(&self.values).enumerate() {
            if (a - b).abs() > SPECTRAL_TOLERANCE * scale {
                return Err(Error::Malformed(format!(
                    "sample {i} is {b} but the coefficients evaluate to {a}"
                )));
            }
        }
        Ok(())
    }
}

fn check_coefficients(dim: usize, coeffs: &[Coefficient]) -> Result<()> {
    let mut by_k: BTreeMap<&[i64], Complex64> = BTreeMap::new();
    for c in coeffs {
        if c.wavevector.len() != dim {
            return Err(Error::Malformed(format!(
                "wavevector {:?} has the wrong dimension",
                c.wavevector
            )));
        }
        if !(c.value.re.is_finite() && c.value.im.is_finite()) {
            return Err(Error::Malformed(format!(
                "coefficient at {:?} is not finite",
                c.wavevector
            )));
        }
        if by_k.insert(&c.wavevector, c.value).is_some() {
            return Err(Error::Malformed(format!(
                "duplicate wavevector {:?}",
                c.wavevector
            )));
        }
    }
    let scale = coeffs.iter().fold(1.0_f64, |m, c| m.max(c.value.norm()));
    for (k, v) in &by_k {
        let neg: Vec<i64> = k.iter().map(|x| -x).collect();
        let partner = by_k.get(neg.as_slice()).copied().unwrap_or_default();
        if (partner - v.conj()).norm() > SPECTRAL_TOLERANCE * scale {
            return Err(Error::Malformed(format!(
                "coefficients are not Hermitian at {k:?}"
            )));
        }
    }
    Ok(())
}

/// Evaluates `sum_k c_k exp(2 pi i k.x)` at every grid vertex via per-axis
/// phase tables.
fn evaluate_on_grid(shape: &[usize], coeffs: &[Coefficient]) -> Result<Vec<f64>> {
    let dim = shape.len();
    let cutoff = coeffs
        .iter()
        .flat_map(|c| c.wavevector.iter().map(|k| k.unsigned_abs()))
        .max()
        .unwrap_or(0) as i64;
    let width = (2 * cutoff + 1) as usize;
    // phases[axis][(k + cutoff) * n + j] = exp(2 pi i k j / n)
    let phases: Vec<Vec<Complex64>> = shape
        .iter()
        .map(|&n| {
            let mut table = Vec::with_capacity(width * n);
            for k in -cutoff..=cutoff {
                for j in 0..n {
                    let angle = 2.0 * PI * ((k * j as i64).rem_euclid(n as i64)) as f64 / n as f64;
                    table.push(Complex64::from_polar(1.0, angle));
                }
            }
            table
        })
        .collect();

    let total: usize = shape.iter().product();
    let mut values = Vec::with_capacity(total);
    let scale = coeffs.iter().map(|c| c.value.norm()).sum::<f64>().max(1.0);
    let mut index = vec![0usize; dim];
    for _ in 0..total {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs {
            let mut term = c.value;
            for (axis, (&k, &j)) in c.wavevector.iter().zip(&index).enumerate() {
                term *= phases[axis][(k + cutoff) as usize * shape[axis] + j];
            }
            acc += term;
        }
        if acc.im.abs() > SPECTRAL_TOLERANCE * scale {
            return Err(Error::Malformed(format!(
                "imaginary residue {} at grid index {index:?}",
                acc.im
            )));
        }
        values.push(acc.re);
        // advance the row-major multi-index
        for axis in (0..dim).rev() {
            index[axis] += 1;
            if index[axis] < shape[axis] {
                break;
            }
            index[axis] = 0;
        }
    }
    Ok(values)
}

/// Enumerates `[-cutoff, cutoff]^dim` in lexicographic order.
fn wavevectors(dim: usize, cutoff: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-cutoff..=cutoff).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

fn is_positive_half(k: &[i64]) -> bool {
    k.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Draws power-law Gaussian coefficients `c_k = (1+|k|^2)^(-beta/2) xi_k`.
fn draw_coefficients(
    dim: usize,
    cutoff: usize,
    beta: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Coefficient> {
    let ks = wavevectors(dim, cutoff as i64);
    let mut drawn: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for k in &ks {
        let weight = (1.0 + k.iter().map(|&x| (x * x) as f64).sum::<f64>()).powf(-beta / 2.0);
        if k.iter().all(|&x| x == 0) {
            let xi: f64 = rng.sample(StandardNormal);
            drawn.insert(k.clone(), Complex64::new(weight * xi, 0.0));
        } else if is_positive_half(k) {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let c = Complex64::new(a, b) * (weight / 2.0_f64.sqrt());
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            drawn.insert(k.clone(), c);
            drawn.insert(neg, c.conj());
        }
    }
    drawn
        .into_iter()
        .map(|(k, v)| Coefficient::new(k, v))
        .collect()
}

/// Samples a random trigonometric field with power-law spectrum on a grid of
/// `4 * cutoff` points per axis.
pub fn sample_trig_field(dim: usize, cutoff: usize, beta: f64, seed: u64) -> Result<ScalarField> {
    sample_trig_field_on_grid(dim, cutoff, beta, SAMPLES_PER_CUTOFF * cutoff, seed)
}

/// As [`sample_trig_field`] with an explicit per-axis resolution, which must
/// be at least `4 * cutoff`. The coefficients depend only on `seed`, not on
/// the resolution.
pub fn sample_trig_field_on_grid(
    dim: usize,
    cutoff: usize,
    beta: f64,
    resolution: usize,
    seed: u64,
) -> Result<ScalarField> {
    if !(1..=3).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if cutoff < 1 {
        return Err(invalid("cutoff", "must be at least 1"));
    }
    if !(beta.is_finite() && beta > dim as f64 / 2.0) {
        return Err(invalid(
            "beta",
            format!("must exceed dim/2 = {}", dim as f64 / 2.0),
        ));
    }
    if resolution < SAMPLES_PER_CUTOFF * cutoff {
        return Err(invalid(
            "resolution",
            format!("must be at least {}", SAMPLES_PER_CUTOFF * cutoff),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = draw_coefficients(dim, cutoff, beta, &mut rng);
    let shape = vec![resolution; dim];
    let mut field = ScalarField::from_coefficients(&shape, coeffs)?;
    field.provenance = Provenance::Trig { cutoff, beta, seed };
    Ok(field)
}

/// Independent standard normal samples at every vertex.
pub fn sample_white_noise(shape: &[usize], seed: u64) -> Result<ScalarField> {
    let total: usize = shape.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..total).map(|_| rng.sample(StandardNormal)).collect();
    let mut field = ScalarField::from_grid(values, shape)?;
    field.provenance = Provenance::WhiteNoise { seed };
    Ok(field)
}

/// Spectral Sobolev norm `(sum_k (1+|k|^2)^n |c_k|^2)^(1/2)`.
pub fn sobolev_norm(f: &ScalarField, n: f64) -> Result<f64> {
    if !(n.is_finite() && n >= 0.0) {
        return Err(invalid("n", "must be finite and non-negative"));
    }
    let coeffs = f.coefficients().ok_or(Error::MissingCoefficients)?;
    let sum: f64 = coeffs
        .iter()
        .map(|c| (1.0 + c.norm_sq_k()).powf(n) * c.value.norm_sqr())
        .sum();
    Ok(sum.sqrt())
}

/// `max_j |f_j - g_j|` over the common grid.
pub fn sup_norm_diff(f: &ScalarField, g: &ScalarField) -> Result<f64> {
    if f.shape != g.shape {
        return Err(Error::GridMismatch {
            left: f.shape.clone(),
            right: g.shape.clone(),
        });
    }
    Ok(f.values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Spectrum of the smooth-noise perturbation.
fn noise_parameters(f: &ScalarField) -> (usize, f64) {
    let min_axis = *f.shape.iter().min().expect("validated shape");
    let cutoff = (min_axis / SAMPLES_PER_CUTOFF).max(1);
    (cutoff, f.dim as f64 / 2.0 + 2.0)
}

/// Adds a perturbation of sup norm `amplitude` to `f`.
pub fn perturb(
    f: &ScalarField,
    amplitude: f64,
    mode: PerturbMode,
    seed: u64,
) -> Result<ScalarField> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(invalid("amplitude", "must be finite and non-negative"));
    }
    let provenance = Provenance::Perturbed {
        base: Box::new(f.provenance.clone()),
        amplitude,
        mode,
        seed,
    };
    if amplitude == 0.0 {
        let mut g = f.clone();
        g.provenance = provenance;
        return Ok(g);
    }
    let mut g = match mode {
        PerturbMode::ConstantShift => {
            let values = f.values.iter().map(|v| v + amplitude).collect();
            let coeffs = f.coeffs.as_ref().map(|cs| {
                let zero = vec![0i64; f.dim];
                let mut merged = merge_coefficients(cs, &[]);
                *merged.entry(zero).or_default() += Complex64::new(amplitude, 0.0);
                into_list(merged)
            });
            ScalarField {
                values,
                coeffs,
                ..f.clone()
            }
        }
        PerturbMode::SmoothNoise => {
            let (cutoff, beta) = noise_parameters(f);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise_coeffs = draw_coefficients(f.dim, cutoff, beta, &mut rng);
            let noise = evaluate_on_grid(&f.shape, &noise_coeffs)?;
            let sup = noise.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if sup == 0.0 {
                return Err(invalid("seed", "noise field vanished on the grid"));
            }
            let scale = amplitude / sup;
            let values = f
                .values
                .iter()
                .zip(&noise)
                .map(|(a, b)| a + scale * b)
                .collect();
            let coeffs = f.coeffs.as_ref().map(|cs| {
                let scaled: Vec<Coefficient> = noise_coeffs
                    .iter()
                    .map(|c| Coefficient::new(c.wavevector.clone(), c.value * scale))
                    .collect();
                into_list(merge_coefficients(cs, &scaled))
            });
            ScalarField {
                values,
                coeffs,
                ..f.clone()
            }
        }
    };
    g.provenance = provenance;
    Ok(g)
}

fn merge_coefficients(a: &[Coefficient], b: &[Coefficient]) -> BTreeMap<Vec<i64>, Complex64> {
    let mut merged = BTreeMap::new();
    for c in a.iter().chain(b) {
        *merged
            .entry(c.wavevector.clone())
            .or_insert_with(Complex64::default) += c.value;
    }
    merged
}

fn into_list(map: BTreeMap<Vec<i64>, Complex64>) -> Vec<Coefficient> {
    map.into_iter()
        .map(|(k, v)| Coefficient::new(k, v))
        .collect()
}

/// `h(x) = exp(-1/x^2) sin(1/x)`, with `h(0) = 0`.
pub fn pathological_profile(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (-1.0 / (x * x)).exp() * (1.0 / x).sin()
    }
}

/// Smooth but infinitely oscillating profile on the circle: grid point
/// `t = j/N` takes the value `h(1 - |2t - 1|)`, an even reflection of `h` on
/// `[0,1]` that is continuous across `t = 0`.
pub fn pathological_1d(resolution: usize) -> Result<ScalarField> {
    if resolution < 16 {
        return Err(invalid("resolution", "must be at least 16"));
    }
    let n = resolution as f64;
    let values = (0..resolution)
        .map(|j| {
            let t = j as f64 / n;
            pathological_profile(1.0 - (2.0 * t - 1.0).abs())
        })
        .collect();
    let mut field = ScalarField::from_grid(values, &[resolution])?;
    field.provenance = Provenance::Pathological { resolution };
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_field_basics() {
        let f = ScalarField::from_grid(vec![0.0, 1.0, 0.0, 1.0], &[4]).unwrap();
        assert_eq!((f.dim(), f.min(), f.max()), (1, 0.0, 1.0));
        let c = ScalarField::from_grid(vec![2.5; 9], &[3, 3]).unwrap();
        assert_eq!(c.max() - c.min(), 0.0);
        let t = ScalarField::from_grid(vec![0.0, 1.0, 2.0, 3.0], &[2, 2]).unwrap();
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn grid_field_rejects_bad_input() {
        assert!(matches!(
            ScalarField::from_grid(vec![0.0; 3], &[4]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            ScalarField::from_grid(vec![0.0, f64::NAN], &[2]),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            ScalarField::from_grid(vec![0.0; 16], &[2, 2, 2, 2]),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn trig_field_is_deterministic() {
        let a = sample_trig_field(1, 1, 2.0, 7).unwrap();
        let b = sample_trig_field(1, 1, 2.0, 7).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.shape(), &[4]);
        let c = sample_trig_field(2, 4, 3.0, 1).unwrap();
        let d = sample_trig_field(2, 4, 3.0, 2).unwrap();
        assert!(sup_norm_diff(&c, &d).unwrap() > 0.0);
    }

    #[test]
    fn trig_field_rejects_bad_parameters() {
        assert!(sample_trig_field(1, 0, 2.0, 0).is_err());
        assert!(sample_trig_field(2, 2, 1.0, 0).is_err());
        assert!(sample_trig_field_on_grid(1, 4, 2.0, 15, 0).is_err());
    }

    #[test]
    fn trig_field_coefficients_are_hermitian_and_consistent() {
        let f = sample_trig_field(3, 2, 2.5, 11).unwrap();
        f.check_spectral_consistency().unwrap();
        let coeffs = f.coefficients().unwrap();
        assert_eq!(coeffs.len(), 125);
        for c in coeffs {
            let neg: Vec<i64> = c.wavevector.iter().map(|k| -k).collect();
            let partner = coeffs.iter().find(|d| d.wavevector == neg).unwrap();
            assert_eq!(partner.value, c.value.conj());
        }
    }

    #[test]
    fn sobolev_norm_of_constant() {
        let f = ScalarField::from_coefficients(&[4], vec![Coefficient::new(vec![0], 5.0.into())])
            .unwrap();
        assert!((sobolev_norm(&f, 3.0).unwrap() - 5.0).abs() < 1e-15);
        assert!(f.values().iter().all(|&v| (v - 5.0).abs() < 1e-14));
    }

    #[test]
    fn sobolev_norm_single_mode() {
        // |c_{+1}| = |c_{-1}| = a and (1 + 1)^1 weights: sqrt(2 * 2 * a^2).
        let a = 0.7;
        let c = Complex64::from_polar(a, 0.3);
        let f = ScalarField::from_coefficients(
            &[2, 2],
            vec![
                Coefficient::new(vec![0, 1], c),
                Coefficient::new(vec![0, -1], c.conj()),
            ],
        )
        .unwrap();
        let expected = (2.0 * 2.0 * a * a).sqrt();
        assert!((sobolev_norm(&f, 1.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn sobolev_norm_n0_matches_grid_quadrature() {
        for (dim, cutoff) in [(1, 8), (2, 3), (3, 2)] {
            let f = sample_trig_field(dim, cutoff, 3.0, 5).unwrap();
            let quadrature =
                (f.values().iter().map(|v| v * v).sum::<f64>() / f.len() as f64).sqrt();
            let spectral = sobolev_norm(&f, 0.0).unwrap();
            assert!((spectral - quadrature).abs() / quadrature < 1e-6);
        }
    }

    #[test]
    fn sobolev_norm_grows_with_order() {
        let f = sample_trig_field(1, 8, 3.0, 3).unwrap();
        let norms: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 3.0]
            .iter()
            .map(|&n| sobolev_norm(&f, n).unwrap())
            .collect();
        assert!(norms.iter().all(|v| v.is_finite()));
        assert!(norms.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sobolev_norm_needs_coefficients() {
        let f = ScalarField::from_grid(vec![1.0; 4], &[4]).unwrap();
        assert_eq!(sobolev_norm(&f, 1.0), Err(Error::MissingCoefficients));
    }

    #[test]
    fn sup_norm_diff_cases() {
        let f = sample_trig_field(2, 2, 2.0, 1).unwrap();
        assert_eq!(sup_norm_diff(&f, &f).unwrap(), 0.0);
        let g = perturb(&f, 0.3, PerturbMode::ConstantShift, 0).unwrap();
        assert!((sup_norm_diff(&f, &g).unwrap() - 0.3).abs() < 1e-12);
        let h = ScalarField::from_grid(vec![0.0; 4], &[4]).unwrap();
        assert!(matches!(
            sup_norm_diff(&f, &h),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn perturbations() {
        let f = sample_trig_field(1, 6, 3.0, 9).unwrap();
        let same = perturb(&f, 0.0, PerturbMode::SmoothNoise, 4).unwrap();
        assert_eq!(same.values(), f.values());
        let g = perturb(&f, 0.1, PerturbMode::SmoothNoise, 4).unwrap();
        assert!((sup_norm_diff(&f, &g).unwrap() - 0.1).abs() < 1e-9);
        g.check_spectral_consistency().unwrap();
        let s = perturb(&f, 0.3, PerturbMode::ConstantShift, 0).unwrap();
        s.check_spectral_consistency().unwrap();
        assert!(perturb(&f, -1.0, PerturbMode::ConstantShift, 0).is_err());
    }

    #[test]
    fn pathological_field_bounds() {
        assert!(pathological_1d(15).is_err());
        let f = pathological_1d(1024).unwrap();
        assert!(f.min() >= -1.0 && f.max() <= 1.0);
        let at_one = f.values()[512];
        assert!((at_one - (-1.0f64).exp() * 1.0f64.sin()).abs() < 1e-15);
        assert_eq!(f.values()[0], 0.0);
    }

    #[test]
    fn field_json_round_trip() {
        let f = sample_trig_field(2, 2, 2.0, 3).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let back: ScalarField = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let raw: serde_json::Value = serde_json::from_str(&text).unwrap();
        let first = &raw["coeffs"][0];
        assert_eq!(first.as_array().unwrap().len(), 4);
        assert!(first[0].is_i64());
    }

    #[test]
    fn field_json_rejects_inconsistent_coefficients() {
        let f = sample_trig_field(1, 2, 2.0, 3).unwrap();
        let mut raw: serde_json::Value = serde_json::to_value(&f).unwrap();
        raw["values"][0] = serde_json::json!(100.0);
        assert!(serde_json::from_value::<ScalarField>(raw).is_err());
    }
}

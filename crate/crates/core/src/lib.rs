//! Superlevel-set persistent homology of scalar fields on flat tori.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`] - periodic scalar fields on `[0,1)^d`, random trigonometric
//!   fields, spectral Sobolev norms and perturbations.
//! * [`cubical`] - the periodic cubical complex with its upper-star
//!   filtration, plus brute-force homology oracles.
//! * [`persistence`] - Z/2 boundary-matrix reduction with clearing, producing
//!   truncated persistence diagrams.
//! * [`functionals`] - persistence functionals `Pers_p`, bar counts, the
//!   tail-exponent estimator and the Sobolev bar-count bound.
//! * [`transport`] - exact partial optimal transport distances `d_p`, the
//!   bottleneck distance, transport plans and the interpolation inequality.
//! * [`curves`] - Betti and Euler curves as exact step functions.
//! * [`stochastic`] - ensembles of random fields and the stability
//!   experiment harness.
//!
//! ```
//! use torus_tda::{cubical, curves, functionals, persistence, field};
//!
//! let f = field::ScalarField::from_grid(vec![0.0, 1.0, 0.0, 1.0], &[4]).unwrap();
//! let complex = cubical::build_complex(&f);
//! let diagrams = persistence::compute_diagrams(&complex);
//! let beta0 = curves::betti_curve(&diagrams[0]);
//! assert_eq!(curves::l1_norm(&beta0), functionals::pers_p(&diagrams[0], 1.0).unwrap());
//! ```

pub mod assignment;
pub mod cubical;
pub mod curves;
pub mod error;
pub mod field;
pub mod functionals;
pub mod matching;
pub mod numeric;
pub mod persistence;
pub mod stochastic;
pub mod transport;

pub use error::{Error, Result};

//! Hurst exponent estimation from non-decimated wavelet spectra.
//!
//! The crate covers the whole pipeline: exact fractional Gaussian noise and
//! fractional Brownian motion synthesis ([`synthesis`]), non-decimated and
//! decimated wavelet transforms ([`transform`]), four spectral estimators
//! ([`estimators`]) including the median-based MEDL and MEDLA, their
//! closed-form large-sample laws ([`asymptotics`]), a reproducible Monte
//! Carlo harness ([`simharness`]) and file I/O ([`io`]).
//!
//! ```
//! use hurstlab::prelude::*;
//!
//! let spec = FgnSpec::new(0.7, 2048, 1.0, 1).unwrap();
//! let path = generate_fbm(&spec).unwrap();
//! let decomp = ndwt(&path, &WaveletFilter::haar(), 10).unwrap();
//! let range = LevelRange::default_for(decomp.j_max()).unwrap();
//! let est = estimate_hurst(&decomp, Method::Medla, range, Some(7)).unwrap();
//! assert!((est.hurst - 0.7).abs() < 0.25);
//! ```

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod io;
pub mod simharness;
pub mod stats;
pub mod synthesis;
pub mod transform;

pub use error::{HurstError, Result};

pub mod prelude {
    pub use crate::asymptotics::{
        hurst_sampling_law, normality_diagnostics, NormalLaw, NormalityReport, TheoreticalLaw,
    };
    pub use crate::error::{HurstError, Result};
    pub use crate::estimators::{estimate_hurst, HurstEstimate, LevelRange, Method, SpectrumPoint};
    pub use crate::simharness::{
        compare_methods, run_experiment, ExperimentConfig, SimulationReport,
    };
    pub use crate::synthesis::{fgn_to_fbm, generate_fbm, generate_fgn, FgnSpec, Signal};
    pub use crate::transform::{dwt, level_acf, ndwt, WaveletFilter};
}

//! Path knowledge and interference strength for multi-path interferometers.

pub mod atlas;
pub mod clicks;
pub mod error;
pub mod fourier;
pub mod knowledge;
pub mod qutrit;
pub mod random;
pub mod state;
pub mod strength;
pub mod verify;

pub use atlas::{BorderCurve, CurveKind, PVPoint};
pub use clicks::{estimate_pv, sample_particle_mode, sample_wave_mode, ClickMode, ClickRecord, PvEstimate};
pub use error::{Error, Result};
pub use fourier::{is_fourier, FamilyKind, FourierDiagnostics, FourierFamily, FourierMatrix};
pub use knowledge::{check_axioms, knowledge, renyi_limits, AxiomReport, GainVector, Measure, RenyiLimit};
pub use state::{DensityMatrix, PathDistribution, QutritMoment};
pub use verify::{run_suite, Check, Suite, VerifyOptions, VerifyReport};
pub use strength::{brute_force_strength, check_strength_axioms, strength, strength_lower_bound, SearchConfig, StrengthAxiomReport, StrengthResult};

pub use num_complex::Complex64;

//! Quantum operator entropies on topologically disordered networks.
//!
//! A network of randomly placed sites in the unit square is connected by
//! random short-range hops ([`network`]); the resulting tight-binding
//! Hamiltonian is diagonalized exactly ([`spectral`]) and pure or thermal
//! states on it are characterized by their position, energy and von Neumann
//! entropies ([`entropy`]). [`states`] builds the special initial states and
//! [`experiments`] drives complete runs that write CSV tables.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the type
//! aliases below fix the double-precision instantiation used by the CLI.
//!
//! ```
//! use netentropy::experiments::{build_system, ExperimentConfig};
//! use netentropy::{confined_state, evolve, s_x};
//!
//! let cfg = ExperimentConfig { n: 128, pool_size: 30, ..ExperimentConfig::default() };
//! let system = build_system::<f64>(&cfg, 0)?;
//! let psi0 = confined_state(&system.sites, 16)?;
//! assert_eq!(s_x(&psi0)?, 4.0);
//! let psi = evolve(&psi0, &system.spectrum, 5.0);
//! assert!(s_x(&psi)? > 4.0);
//! # Ok::<(), netentropy::Error>(())
//! ```

// Validation uses `!(x <= tol)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod network;
pub mod oracle;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod states;

pub use entropy::{
    energy_probabilities, operator_entropy, position_probabilities, s_e, s_vn, s_vn_pure, s_x, smi,
    Basis, DensityMatrix, ProbabilityDistribution,
};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use network::{
    assemble_hamiltonian, build_connectivity, build_connectivity_with, generate_sites,
    k_nearest_pools, ConnectivityGraph, DuplicatePolicy, GraphExport, Hamiltonian, SiteSet,
};
pub use scalar::Real;
pub use spectral::{
    diagonalize, energy_expectation, evolve, evolve_backward, scaled_energies, Evolution,
    PureState, Spectrum,
};
pub use states::{
    boltzmann_distribution, confined_state, perturbed_initial_state, random_position_superposition,
    rasee, thermal_density, ThermalEnsemble,
};

pub type SiteSet64 = SiteSet<f64>;
pub type Hamiltonian64 = Hamiltonian<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type PureState64 = PureState<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type ProbabilityDistribution64 = ProbabilityDistribution<f64>;

pub type SiteSet32 = SiteSet<f32>;
pub type Spectrum32 = Spectrum<f32>;
pub type PureState32 = PureState<f32>;

//! Constructors for the special states: confined initial states, random
//! superpositions (RaSEE and site-basis), perturbed reversal states and the
//! canonical thermal ensemble.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::entropy::{DensityMatrix, ProbabilityDistribution};
use crate::error::{invalid, Error, Result};
use crate::network::SiteSet;
use crate::rng::{stream_rng, Stream};
use crate::scalar::Real;
use crate::spectral::{scaled_energies, PureState, Spectrum};

/// Uniform real amplitude `1/√n_init` on the `n_init` sites nearest the
/// origin (ties by index).
pub fn confined_state<T: Real>(sites: &SiteSet<T>, n_init: usize) -> Result<PureState<T>> {
    if n_init == 0 || n_init > sites.len() {
        return Err(invalid(format!(
            "n_init must be in 1..={}, got {n_init}",
            sites.len()
        )));
    }
    let order = sites.sorted_by_distance_from([T::zero(), T::zero()]);
    let amp = Complex::new(T::one() / T::from_usize_lossy(n_init).sqrt(), T::zero());
    let mut amps = vec![Complex::new(T::zero(), T::zero()); sites.len()];
    for &k in &order[..n_init] {
        amps[k] = amp;
    }
    PureState::new(amps, format!("confined n_init={n_init}"))
}

/// Marsaglia point on the unit sphere in `len` dimensions with uniform
/// phases: normal magnitudes first (index order), then phases.
fn random_sphere_coefficients<T: Real, R: Rng>(rng: &mut R, len: usize) -> Vec<Complex<T>> {
    let w: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let phases: Vec<f64> = (0..len)
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();
    w.iter()
        .zip(&phases)
        .map(|(&wk, &phi)| {
            let mag = (wk / norm).abs();
            Complex::new(T::lit(mag * phi.cos()), T::lit(mag * phi.sin()))
        })
        .collect()
}

/// Random superposition of the lowest `n_e` energy eigenstates.
pub fn rasee<T: Real>(s: &Spectrum<T>, n_e: usize, seed: u64) -> Result<PureState<T>> {
    if n_e == 0 || n_e > s.dim() {
        return Err(invalid(format!(
            "n_e must be in 1..={}, got {n_e}",
            s.dim()
        )));
    }
    let mut rng = stream_rng(seed, Stream::Rasee);
    let coeffs = random_sphere_coefficients::<T, _>(&mut rng, n_e);
    PureState::normalized(
        s.synthesize(&coeffs),
        format!("rasee n_e={n_e} seed={seed}"),
    )
}

/// The same construction applied directly in the site basis.
pub fn random_position_superposition<T: Real>(n: usize, seed: u64) -> Result<PureState<T>> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut rng = stream_rng(seed, Stream::PositionSuperposition);
    let coeffs = random_sphere_coefficients::<T, _>(&mut rng, n);
    PureState::normalized(coeffs, format!("position superposition seed={seed}"))
}

/// `(ψ₀ + √δ ψ_noise) / ‖ψ₀ + √δ ψ_noise‖`.
pub fn perturbed_initial_state<T: Real>(
    psi0: &PureState<T>,
    noise: &PureState<T>,
    delta: T,
) -> Result<PureState<T>> {
    if !(delta >= T::zero() && delta <= T::one()) {
        return Err(invalid(format!("delta must lie in [0, 1], got {delta}")));
    }
    if psi0.dim() != noise.dim() {
        return Err(invalid("state dimensions differ"));
    }
    if delta == T::zero() {
        return Ok(psi0.clone());
    }
    let w = delta.sqrt();
    let amps = psi0
        .amplitudes()
        .iter()
        .zip(noise.amplitudes())
        .map(|(a, b)| a + b * w)
        .collect();
    PureState::normalized(amps, format!("{} + sqrt({delta}) noise", psi0.label())).map_err(|e| {
        match e {
            Error::DegenerateInput(_) => {
                Error::DegenerateInput("perturbation cancels the state exactly".into())
            }
            other => other,
        }
    })
}

/// Canonical occupations `e^{-(E_k-E_1)/T} / Z` (k_B = 1, T in units of γ₀).
pub fn boltzmann_distribution<T: Real>(
    s: &Spectrum<T>,
    temperature: T,
) -> Result<ProbabilityDistribution<T>> {
    if !(temperature > T::zero()) || !temperature.is_finite() {
        return Err(invalid(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let e1 = s.ground_energy();
    let weights: Vec<T> = s
        .eigenvalues()
        .iter()
        .map(|&e| (-(e - e1) / temperature).exp())
        .collect();
    let z: T = weights.iter().copied().sum();
    ProbabilityDistribution::new(weights.into_iter().map(|w| w / z).collect())
}

/// Thermal occupations of the energy eigenstates.
#[derive(Debug, Clone)]
pub struct ThermalEnsemble<T> {
    pub temperature: T,
    pub occupation: ProbabilityDistribution<T>,
    pub spectrum_ref: String,
}

impl<T: Real> ThermalEnsemble<T> {
    /// `⟨E_s⟩` of the ensemble.
    pub fn scaled_energy(&self, s: &Spectrum<T>) -> T {
        scaled_energies(s)
            .iter()
            .zip(self.occupation.as_slice())
            .map(|(&e, &p)| e * p)
            .sum()
    }
}

/// Canonical density matrix `V diag(occupation) Vᵀ` in the site basis.
pub fn thermal_density<T: Real>(
    s: &Spectrum<T>,
    temperature: T,
) -> Result<(ThermalEnsemble<T>, DensityMatrix<T>)> {
    let occupation = boltzmann_distribution(s, temperature)?;
    let rho = DensityMatrix::from_spectral(s, &occupation)?;
    Ok((
        ThermalEnsemble {
            temperature,
            occupation,
            spectrum_ref: s.id().to_string(),
        },
        rho,
    ))
}

/// Site-basis diagonal of the canonical density matrix,
/// `ρ_ii = Σ_k p_k V_ki²`, in O(N²).
pub fn thermal_site_probabilities<T: Real>(
    s: &Spectrum<T>,
    occupation: &ProbabilityDistribution<T>,
) -> Result<ProbabilityDistribution<T>> {
    let mut diag = vec![T::zero(); s.dim()];
    for (k, &p) in occupation.as_slice().iter().enumerate() {
        for (d, &v) in diag.iter_mut().zip(s.eigenvector(k)) {
            *d += p * v * v;
        }
    }
    ProbabilityDistribution::new(diag)
}

/// `(⟨x⟩, ⟨y⟩)` under a site distribution.
pub fn position_expectation<T: Real>(sites: &SiteSet<T>, p: &ProbabilityDistribution<T>) -> [T; 2] {
    sites
        .positions()
        .iter()
        .zip(p.as_slice())
        .fold([T::zero(), T::zero()], |acc, (r, &w)| {
            [acc[0] + w * r[0], acc[1] + w * r[1]]
        })
}

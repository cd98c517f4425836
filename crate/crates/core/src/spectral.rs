//! Exact diagonalization and unitary propagation in the energy eigenbasis.
//!
//! Units: ħ = 1 and energies are in units of the hopping γ₀, so times passed
//! to [`evolve`] are in units of the tunneling time τ = π/γ₀.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, symmetric_eigen, Matrix};
use crate::network::Hamiltonian;
use crate::scalar::Real;

/// Normalized pure state in the site basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    amplitudes: Vec<Complex<T>>,
    label: String,
}

impl<T: Real> PureState<T> {
    /// Accepts amplitudes that already have unit norm (within 1e-10).
    pub fn new(amplitudes: Vec<Complex<T>>, label: impl Into<String>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(invalid("a state needs at least one amplitude"));
        }
        let norm_sq = norm_sq(&amplitudes);
        if !((norm_sq - T::one()).abs() <= T::tol(1e-10)) {
            return Err(invalid(format!(
                "state is not normalized (|psi|^2 = {norm_sq})"
            )));
        }
        Ok(Self {
            amplitudes,
            label: label.into(),
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex<T>>, label: impl Into<String>) -> Result<Self> {
        let norm = norm_sq(&amplitudes).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::DegenerateInput(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            amplitudes,
            label: label.into(),
        })
    }

    /// The site basis state `|k⟩`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(invalid(format!("site {k} out of range for {n} sites")));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); n];
        amps[k] = Complex::new(T::one(), T::zero());
        Ok(Self {
            amplitudes: amps,
            label: format!("site {k}"),
        })
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn norm_sq(&self) -> T {
        norm_sq(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    /// Largest amplitude-wise `|a_k - b_k|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }
}

fn norm_sq<T: Real>(amps: &[Complex<T>]) -> T {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Eigen-decomposition of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    eigenvalues: Vec<T>,
    /// Row `k` is `|E_k⟩` expressed in the site basis.
    eigenvectors: Matrix<T>,
    gamma0: T,
    id: String,
}

impl<T: Real> Spectrum<T> {
    /// Assembles a spectrum from precomputed parts (cache loads, tests).
    /// Eigenvalues must be non-decreasing and rows of `eigenvectors`
    /// orthonormal within 1e-10.
    pub fn from_parts(eigenvalues: Vec<T>, eigenvectors: Matrix<T>, gamma0: T) -> Result<Self> {
        if eigenvalues.len() != eigenvectors.dim() {
            return Err(invalid(
                "eigenvalue count does not match eigenvector matrix",
            ));
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("eigenvalues must be non-decreasing"));
        }
        let s = Self {
            eigenvalues,
            eigenvectors,
            gamma0,
            id: String::new(),
        };
        let err = s.orthonormality_error();
        if !(err <= T::tol(1e-10)) {
            return Err(invalid(format!(
                "eigenvectors not orthonormal (error {err})"
            )));
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// `|E_k⟩` in the site basis.
    pub fn eigenvector(&self, k: usize) -> &[T] {
        self.eigenvectors.row(k)
    }

    /// Eigenvectors stored one per row.
    pub fn eigenvector_rows(&self) -> &Matrix<T> {
        &self.eigenvectors
    }

    pub fn ground_energy(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn gamma0(&self) -> T {
        self.gamma0
    }

    /// Free-form identifier of the Hamiltonian this spectrum came from
    /// (the experiment drivers use the graph content hash).
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Tunneling time τ = πħ/γ₀ with ħ = 1.
    pub fn tau(&self) -> T {
        T::PI() / self.gamma0
    }

    /// Energy eigenstate `k` as a [`PureState`].
    pub fn eigenstate(&self, k: usize) -> PureState<T> {
        PureState {
            amplitudes: self
                .eigenvector(k)
                .iter()
                .map(|&v| Complex::new(v, T::zero()))
                .collect(),
            label: format!("eigenstate {k}"),
        }
    }

    /// `max |VᵀV - I|`.
    pub fn orthonormality_error(&self) -> T {
        let n = self.dim();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let vi = self.eigenvector(i);
                (0..=i).fold(T::zero(), |m, j| {
                    let g = dot(vi, self.eigenvector(j));
                    let want = if i == j { T::one() } else { T::zero() };
                    m.max((g - want).abs())
                })
            })
            .reduce(T::zero, |a, b| a.max(b))
    }

    /// `max |H V - V diag(E)|`.
    pub fn residual(&self, h: &Hamiltonian<T>) -> T {
        let m = h.matrix();
        (0..self.dim())
            .into_par_iter()
            .map(|k| {
                let v = self.eigenvector(k);
                let hv = m.mul_vec(v);
                hv.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| {
                    acc.max((a - self.eigenvalues[k] * b).abs())
                })
            })
            .reduce(T::zero, |a, b| a.max(b))
    }

    /// Amplitudes `⟨E_k|ψ⟩` for every eigenstate.
    pub fn project(&self, psi: &PureState<T>) -> Vec<Complex<T>> {
        let (re, im) = split(psi.amplitudes());
        (0..self.dim())
            .into_par_iter()
            .map(|k| {
                let v = self.eigenvector(k);
                Complex::new(dot(v, &re), dot(v, &im))
            })
            .collect()
    }

    /// `Σ_k c_k |E_k⟩` in the site basis.
    pub fn synthesize(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim();
        let mut re = vec![T::zero(); n];
        let mut im = vec![T::zero(); n];
        for (k, c) in coeffs.iter().enumerate() {
            let v = self.eigenvector(k);
            for ((r, i), &vk) in re.iter_mut().zip(im.iter_mut()).zip(v) {
                *r += c.re * vk;
                *i += c.im * vk;
            }
        }
        re.into_iter()
            .zip(im)
            .map(|(r, i)| Complex::new(r, i))
            .collect()
    }
}

fn split<T: Real>(amps: &[Complex<T>]) -> (Vec<T>, Vec<T>) {
    amps.iter().map(|a| (a.re, a.im)).unzip()
}

/// Diagonalizes `h`; eigenvalues ascend and each eigenvector's first
/// component above round-off is positive.
pub fn diagonalize<T: Real>(h: &Hamiltonian<T>) -> Result<Spectrum<T>> {
    let m = h.matrix();
    if m.asymmetry() != T::zero() {
        return Err(invalid("Hamiltonian is not symmetric"));
    }
    let mut eig = symmetric_eigen(m)?;
    let n = m.dim();
    let threshold = T::epsilon() * T::lit(64.0);
    for k in 0..n {
        let row = eig.vectors.row_mut(k);
        if let Some(first) = row.iter().find(|x| x.abs() > threshold) {
            if *first < T::zero() {
                row.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    let spectrum = Spectrum {
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
        gamma0: h.gamma0(),
        id: String::new(),
    };
    let scale = spectrum
        .eigenvalues
        .iter()
        .fold(T::one(), |a, &e| a.max(e.abs()));
    let residual = spectrum.residual(h);
    let ortho = spectrum.orthonormality_error();
    if !(residual <= T::tol(1e-8) * scale) || !(ortho <= T::tol(1e-10)) {
        return Err(Error::NumericalFailure(format!(
            "eigenpairs out of tolerance: residual {residual}, orthonormality {ortho} (n = {n})"
        )));
    }
    Ok(spectrum)
}

/// `E_s[k] = (E_k - E_1)/γ₀`.
pub fn scaled_energies<T: Real>(s: &Spectrum<T>) -> Vec<T> {
    let e1 = s.ground_energy();
    s.eigenvalues()
        .iter()
        .map(|&e| (e - e1) / s.gamma0())
        .collect()
}

/// Propagator for one initial state: holds `⟨E_k|ψ(0)⟩` so any number of
/// time points cost one synthesis each.
#[derive(Debug, Clone)]
pub struct Evolution<'a, T> {
    spectrum: &'a Spectrum<T>,
    initial: PureState<T>,
    coeffs: Vec<Complex<T>>,
}

impl<'a, T: Real> Evolution<'a, T> {
    pub fn new(psi0: &PureState<T>, spectrum: &'a Spectrum<T>) -> Self {
        assert_eq!(
            psi0.dim(),
            spectrum.dim(),
            "state and spectrum dimensions differ"
        );
        Self {
            spectrum,
            initial: psi0.clone(),
            coeffs: spectrum.project(psi0),
        }
    }

    /// Energy-basis amplitudes at t = 0.
    pub fn energy_amplitudes(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn initial(&self) -> &PureState<T> {
        &self.initial
    }

    /// State at time `t` (units of τ). Negative `t` runs backward; `t = 0`
    /// returns the initial state unchanged.
    pub fn at(&self, t: T) -> PureState<T> {
        if t == T::zero() {
            return self.initial.clone();
        }
        let t_phys = t * self.spectrum.tau();
        let phased: Vec<Complex<T>> = self
            .coeffs
            .iter()
            .zip(self.spectrum.eigenvalues())
            .map(|(c, &e)| {
                let (sin, cos) = (-e * t_phys).sin_cos();
                c * Complex::new(cos, sin)
            })
            .collect();
        PureState {
            amplitudes: self.spectrum.synthesize(&phased),
            label: self.initial.label.clone(),
        }
    }
}

/// `ψ(t) = Σ_k e^{-i E_k t τ} ⟨E_k|ψ0⟩ |E_k⟩`, with `t` in units of τ.
pub fn evolve<T: Real>(psi0: &PureState<T>, s: &Spectrum<T>, t: T) -> PureState<T> {
    if t == T::zero() {
        return psi0.clone();
    }
    Evolution::new(psi0, s).at(t)
}

/// Applies `e^{+iHtτ}`; identical to `evolve(psi, s, -t)`.
pub fn evolve_backward<T: Real>(psi: &PureState<T>, s: &Spectrum<T>, t: T) -> PureState<T> {
    evolve(psi, s, -t)
}

/// `⟨E_s⟩ = Σ_k |⟨E_k|ψ⟩|² E_s[k]`.
pub fn energy_expectation<T: Real>(psi: &PureState<T>, s: &Spectrum<T>) -> T {
    let es = scaled_energies(s);
    s.project(psi)
        .iter()
        .zip(&es)
        .map(|(c, &e)| c.norm_sqr() * e)
        .sum()
}

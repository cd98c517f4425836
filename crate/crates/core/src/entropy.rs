//! Shannon measure of information and the operator entropies built on it.
//!
//! All entropies are in bits. A quantum operator entropy is the Shannon
//! measure of the Born-rule distribution over the eigenbasis of the
//! operator: the site basis gives `S_x`, the Hamiltonian eigenbasis gives
//! `S_E`, and the eigenbasis of ρ itself gives the von Neumann entropy.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, symmetric_eigenvalues, Matrix};
use crate::scalar::Real;
use crate::spectral::{PureState, Spectrum};

const NEGATIVE_DUST: f64 = 1e-12;
const SUM_TOLERANCE: f64 = 1e-9;
const HERMITIAN_TOLERANCE: f64 = 1e-10;
const PSD_TOLERANCE: f64 = 1e-10;
const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

/// Non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution<T> {
    p: Vec<T>,
}

impl<T: Real> ProbabilityDistribution<T> {
    /// Entries in `[-1e-12, 0)` are clamped to zero and the result is
    /// renormalized if its sum is within 1e-9 of one; anything further off
    /// is rejected.
    pub fn new(mut p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        let dust = T::tol(NEGATIVE_DUST);
        for (k, x) in p.iter_mut().enumerate() {
            if !x.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "entry {k} is not finite"
                )));
            }
            if *x < T::zero() {
                if *x < -dust {
                    return Err(Error::InvalidDistribution(format!(
                        "entry {k} is negative ({x})"
                    )));
                }
                *x = T::zero();
            }
        }
        let sum: T = p.iter().copied().sum();
        if !((sum - T::one()).abs() <= T::tol(SUM_TOLERANCE)) {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        for x in &mut p {
            *x /= sum;
        }
        Ok(Self { p })
    }

    pub fn uniform(n: usize) -> Self {
        let w = T::one() / T::from_usize_lossy(n);
        Self { p: vec![w; n] }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.p
    }
}

/// `-Σ p log₂ p`, with `0 log 0 = 0`.
pub fn smi<T: Real>(p: &ProbabilityDistribution<T>) -> T {
    p.p.iter()
        .filter(|&&x| x > T::zero())
        .map(|&x| -x * x.log2())
        .fold(T::zero(), |acc, v| acc + v)
}

/// Born probabilities `|ψ_k|²` in the site basis.
pub fn position_probabilities<T: Real>(psi: &PureState<T>) -> Result<ProbabilityDistribution<T>> {
    ProbabilityDistribution::new(psi.amplitudes().iter().map(|a| a.norm_sqr()).collect())
}

/// `|⟨E_k|ψ⟩|²` over the eigenstates of `s`.
pub fn energy_probabilities<T: Real>(
    psi: &PureState<T>,
    s: &Spectrum<T>,
) -> Result<ProbabilityDistribution<T>> {
    ProbabilityDistribution::new(s.project(psi).iter().map(|c| c.norm_sqr()).collect())
}

/// Anything with a Born distribution over the site basis.
pub trait SitePopulations<T> {
    fn site_probabilities(&self) -> Result<ProbabilityDistribution<T>>;
}

impl<T: Real> SitePopulations<T> for PureState<T> {
    fn site_probabilities(&self) -> Result<ProbabilityDistribution<T>> {
        position_probabilities(self)
    }
}

impl<T: Real> SitePopulations<T> for DensityMatrix<T> {
    fn site_probabilities(&self) -> Result<ProbabilityDistribution<T>> {
        ProbabilityDistribution::new(self.diagonal())
    }
}

/// Position entropy `S_x` of a pure or mixed state.
pub fn s_x<T: Real, S: SitePopulations<T> + ?Sized>(state: &S) -> Result<T> {
    Ok(smi(&state.site_probabilities()?))
}

/// Energy entropy `S_E` of a pure state.
pub fn s_e<T: Real>(psi: &PureState<T>, s: &Spectrum<T>) -> Result<T> {
    Ok(smi(&energy_probabilities(psi, s)?))
}

/// Von Neumann entropy of `|ψ⟩⟨ψ|`: a rank-one operator whose only nonzero
/// eigenvalue is `‖ψ‖²`.
pub fn s_vn_pure<T: Real>(psi: &PureState<T>) -> Result<T> {
    let mut p = vec![T::zero(); psi.dim()];
    p[0] = psi.norm_sq();
    Ok(smi(&ProbabilityDistribution::new(p)?))
}

/// Von Neumann entropy: Shannon measure of the eigenvalues of ρ.
pub fn s_vn<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let eig = rho.eigenvalues()?;
    let floor = -T::tol(PSD_TOLERANCE);
    if let Some(bad) = eig.iter().find(|&&l| l < floor) {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {bad}"
        )));
    }
    let clamped: Vec<T> = eig.into_iter().map(|l| l.max(T::zero())).collect();
    Ok(smi(&ProbabilityDistribution::new(clamped)?))
}

/// `S_Q = SMI(⟨φ_k|ρ|φ_k⟩)` for an arbitrary orthonormal basis.
pub fn operator_entropy<T: Real>(rho: &DensityMatrix<T>, basis: &Basis<T>) -> Result<T> {
    if basis.dim() != rho.dim() {
        return Err(invalid("basis and density matrix dimensions differ"));
    }
    let p: Vec<T> = basis
        .kets
        .par_iter()
        .map(|phi| rho.expectation(phi))
        .collect();
    Ok(smi(&ProbabilityDistribution::new(p)?))
}

/// Orthonormal set of `n` kets spanning the state space.
#[derive(Debug, Clone)]
pub struct Basis<T> {
    kets: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Basis<T> {
    pub fn from_kets(kets: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = kets.len();
        if n == 0 || kets.iter().any(|k| k.len() != n) {
            return Err(invalid("basis must hold n kets of length n"));
        }
        let tol = T::tol(ORTHONORMAL_TOLERANCE);
        for i in 0..n {
            for j in 0..=i {
                let g: Complex<T> = kets[i]
                    .iter()
                    .zip(&kets[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let want = if i == j { T::one() } else { T::zero() };
                if !((g.re - want).abs() <= tol && g.im.abs() <= tol) {
                    return Err(invalid(format!(
                        "basis kets {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Self { kets })
    }

    /// The site basis.
    pub fn sites(n: usize) -> Self {
        let kets = (0..n)
            .map(|k| {
                let mut v = vec![Complex::new(T::zero(), T::zero()); n];
                v[k] = Complex::new(T::one(), T::zero());
                v
            })
            .collect();
        Self { kets }
    }

    /// The Hamiltonian eigenbasis.
    pub fn energy(s: &Spectrum<T>) -> Self {
        let kets = (0..s.dim())
            .map(|k| {
                s.eigenvector(k)
                    .iter()
                    .map(|&v| Complex::new(v, T::zero()))
                    .collect()
            })
            .collect();
        Self { kets }
    }

    pub fn dim(&self) -> usize {
        self.kets.len()
    }

    pub fn ket(&self, k: usize) -> &[Complex<T>] {
        &self.kets[k]
    }
}

/// Hermitian, unit-trace operator in the site basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity (1e-10) and unit trace (1e-9). Positivity is
    /// checked by [`s_vn`], which needs the spectrum anyway.
    pub fn new(n: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected {n}x{n} entries"
            )));
        }
        let tol = T::tol(HERMITIAN_TOLERANCE);
        for i in 0..n {
            for j in 0..=i {
                if !((data[i * n + j] - data[j * n + i].conj()).norm() <= tol) {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        let trace: T = (0..n).map(|i| data[i * n + i].re).sum();
        if !((trace - T::one()).abs() <= T::tol(SUM_TOLERANCE)) {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}")));
        }
        Ok(Self { n, data })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &PureState<T>) -> Self {
        let a = psi.amplitudes();
        let n = a.len();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(a[i] * a[j].conj());
            }
        }
        Self { n, data }
    }

    /// `Σ_k w_k |E_k⟩⟨E_k|`, real because the eigenvectors are.
    pub fn from_spectral(s: &Spectrum<T>, weights: &ProbabilityDistribution<T>) -> Result<Self> {
        let n = s.dim();
        if weights.len() != n {
            return Err(invalid("weights and spectrum dimensions differ"));
        }
        // Columns of diag(√w)·V laid out as rows so ρ_ij is a contiguous dot.
        let mut cols = Matrix::zeros(n);
        for k in 0..n {
            let sw = weights.as_slice()[k].sqrt();
            for (i, &v) in s.eigenvector(k).iter().enumerate() {
                cols[(i, k)] = sw * v;
            }
        }
        let lower: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|i| (0..=i).map(|j| dot(cols.row(i), cols.row(j))).collect())
            .collect();
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for (i, row) in lower.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                data[i * n + j] = Complex::new(x, T::zero());
                data[j * n + i] = Complex::new(x, T::zero());
            }
        }
        Ok(Self { n, data })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let w = Complex::new(T::one() / T::from_usize_lossy(n), T::zero());
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            data[i * n + i] = w;
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.n + j]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.data[i * self.n + i].re).collect()
    }

    /// `⟨φ|ρ|φ⟩`.
    pub fn expectation(&self, phi: &[Complex<T>]) -> T {
        let n = self.n;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let r: Complex<T> = row.iter().zip(phi).map(|(a, b)| a * b).sum();
            acc += phi[i].conj() * r;
        }
        acc.re
    }

    /// `U ρ U†` for a unitary given as rows of kets `U[i][j]`.
    pub fn conjugate_by(&self, u: &[Vec<Complex<T>>]) -> Self {
        let n = self.n;
        let mul = |a: &dyn Fn(usize, usize) -> Complex<T>,
                   b: &dyn Fn(usize, usize) -> Complex<T>| {
            let mut out = vec![Complex::new(T::zero(), T::zero()); n * n];
            for i in 0..n {
                for k in 0..n {
                    let aik = a(i, k);
                    for j in 0..n {
                        out[i * n + j] += aik * b(k, j);
                    }
                }
            }
            out
        };
        let ur = mul(&|i, k| u[i][k], &|k, j| self.get(k, j));
        let out = mul(&|i, k| ur[i * n + k], &|k, j| u[j][k].conj());
        Self { n, data: out }
    }

    /// Ascending eigenvalues. Complex Hermitian input is embedded in the
    /// real symmetric `[[Re, -Im], [Im, Re]]`, whose spectrum is that of ρ
    /// with every eigenvalue doubled.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let n = self.n;
        let tol = T::tol(HERMITIAN_TOLERANCE);
        let real = self.data.iter().all(|z| z.im == T::zero());
        if real {
            let mut m = Matrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    // symmetrize so round-off asymmetry cannot leak in
                    m[(i, j)] = (self.get(i, j).re + self.get(j, i).re) * T::lit(0.5);
                }
            }
            return symmetric_eigenvalues(&m);
        }
        let mut m = Matrix::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = (self.get(i, j) + self.get(j, i).conj()) * T::lit(0.5);
                debug_assert!((self.get(i, j) - z).norm() <= tol);
                m[(i, j)] = z.re;
                m[(i + n, j + n)] = z.re;
                m[(i, j + n)] = -z.im;
                m[(i + n, j)] = z.im;
            }
        }
        let doubled = symmetric_eigenvalues(&m)?;
        Ok(doubled.into_iter().step_by(2).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{assemble_hamiltonian, ConnectivityGraph};
    use crate::spectral::diagonalize;

    fn dist(p: &[f64]) -> ProbabilityDistribution<f64> {
        ProbabilityDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn smi_examples() {
        assert_eq!(smi(&dist(&[1.0, 0.0, 0.0])), 0.0);
        assert!((smi(&dist(&[0.5, 0.5])) - 1.0).abs() < 1e-15);
        assert!((smi(&ProbabilityDistribution::<f64>::uniform(64)) - 6.0).abs() < 1e-13);
    }

    #[test]
    fn distribution_validation() {
        assert!(ProbabilityDistribution::new(vec![1.0 + 1e-13, -1e-13]).is_ok());
        assert!(matches!(
            ProbabilityDistribution::new(vec![1.1, -0.1]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(ProbabilityDistribution::new(vec![0.5, 0.6]).is_err());
        let d = dist(&[0.5 + 5e-10, 0.5]);
        assert!((d.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn position_entropies() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(vec![Complex::new(r, 0.0), Complex::new(0.0, r)], "").unwrap();
        let p = position_probabilities(&psi).unwrap();
        assert!((p.as_slice()[0] - 0.5).abs() < 1e-15);
        assert!((s_x(&psi).unwrap() - 1.0).abs() < 1e-14);

        let flat = PureState::<f64>::normalized(vec![Complex::new(1.0, 0.0); 1024], "").unwrap();
        assert!((s_x(&flat).unwrap() - 10.0).abs() < 1e-10);
        let mixed = DensityMatrix::<f64>::maximally_mixed(1024);
        assert!((s_x(&mixed).unwrap() - 10.0).abs() < 1e-10);
    }

    #[test]
    fn von_neumann_examples() {
        let psi = PureState::<f64>::normalized(
            vec![
                Complex::new(0.3, 0.2),
                Complex::new(-0.5, 0.1),
                Complex::new(0.0, 0.7),
            ],
            "",
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        assert!(s_vn(&rho).unwrap().abs() < 1e-8);
        assert_eq!(s_vn_pure(&psi).unwrap(), 0.0);
        assert!((s_x(&rho).unwrap() - s_x(&psi).unwrap()).abs() < 1e-12);

        let half = DensityMatrix::<f64>::new(
            2,
            vec![
                Complex::new(0.5, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.5, 0.0),
            ],
        )
        .unwrap();
        assert!((s_vn(&half).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_large() {
        let rho = DensityMatrix::<f64>::maximally_mixed(1024);
        assert!((s_vn(&rho).unwrap() - 10.0).abs() < 1e-10);
    }

    #[test]
    fn density_matrix_validation() {
        let not_hermitian = vec![
            Complex::new(0.5, 0.0),
            Complex::new(0.1, 0.1),
            Complex::new(0.1, 0.1),
            Complex::new(0.5, 0.0),
        ];
        assert!(DensityMatrix::new(2, not_hermitian).is_err());
        let bad_trace = vec![
            Complex::new(0.5, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.6, 0.0),
        ];
        assert!(DensityMatrix::new(2, bad_trace).is_err());
        let indefinite = vec![
            Complex::new(1.5, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(-0.5, 0.0),
        ];
        let rho = DensityMatrix::new(2, indefinite).unwrap();
        assert!(matches!(s_vn(&rho), Err(Error::InvalidDensityMatrix(_))));
    }

    #[test]
    fn complex_density_matrix_spectrum() {
        // (|0⟩ + i|1⟩)/√2 mixed with |2⟩, weights 0.75 / 0.25
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = PureState::new(
            vec![
                Complex::new(r, 0.0),
                Complex::new(0.0, r),
                Complex::new(0.0, 0.0),
            ],
            "",
        )
        .unwrap();
        let pa = DensityMatrix::from_pure(&a);
        let mut data = vec![Complex::new(0.0, 0.0); 9];
        for i in 0..3 {
            for j in 0..3 {
                data[i * 3 + j] = pa.get(i, j) * 0.75;
            }
        }
        data[8] += Complex::new(0.25, 0.0);
        let rho = DensityMatrix::new(3, data).unwrap();
        let want = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((s_vn(&rho).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn operator_entropy_special_bases() {
        let g = ConnectivityGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let h = assemble_hamiltonian(&g, 0.0f64, 1.0).unwrap();
        let s = diagonalize(&h).unwrap();
        let psi = PureState::<f64>::normalized(
            vec![
                Complex::new(0.4, 0.1),
                Complex::new(0.1, -0.3),
                Complex::new(0.2, 0.2),
                Complex::new(-0.6, 0.0),
            ],
            "",
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let se = s_e(&psi, &s).unwrap();
        assert!((operator_entropy(&rho, &Basis::energy(&s)).unwrap() - se).abs() < 1e-10);
        assert!(
            (operator_entropy(&rho, &Basis::sites(4)).unwrap() - s_x(&psi).unwrap()).abs() < 1e-12
        );

        let w = dist(&[0.4, 0.3, 0.2, 0.1]);
        let mixed = DensityMatrix::from_spectral(&s, &w).unwrap();
        let own = operator_entropy(&mixed, &Basis::energy(&s)).unwrap();
        assert!((own - s_vn(&mixed).unwrap()).abs() < 1e-10);
        assert!((own - smi(&w)).abs() < 1e-12);
    }

    #[test]
    fn eigenstate_has_zero_energy_entropy() {
        let g = ConnectivityGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = diagonalize(&assemble_hamiltonian(&g, 0.0f64, 1.0).unwrap()).unwrap();
        assert!(s_e(&s.eigenstate(1), &s).unwrap().abs() < 1e-10);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let two = PureState::new(
            s.synthesize(&[
                Complex::new(r, 0.0),
                Complex::new(r, 0.0),
                Complex::new(0.0, 0.0),
            ]),
            "",
        )
        .unwrap();
        assert!((s_e(&two, &s).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_orthonormal_basis() {
        let kets = vec![
            vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
            vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
        ];
        assert!(matches!(
            Basis::from_kets(kets),
            Err(Error::InvalidArgument(_))
        ));
    }
}

//! Brute-force reference implementations for validating the engine on small
//! systems. Nothing here calls into `linalg`, `spectral` propagation or
//! `entropy`; each routine is written from its defining formula.

use num_complex::Complex;

use crate::network::Hamiltonian;
use crate::scalar::Real;
use crate::spectral::PureState;

/// Outcome of one oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub case_id: String,
    pub max_abs_difference: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(case_id: impl Into<String>, max_abs_difference: f64, tolerance: f64) -> Self {
        Self {
            case_id: case_id.into(),
            max_abs_difference,
            tolerance,
            passed: max_abs_difference <= tolerance,
        }
    }
}

type CMat<T> = Vec<Vec<Complex<T>>>;

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn cmatmul<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    let n = a.len();
    let mut out = vec![vec![czero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn one_norm<T: Real>(a: &CMat<T>) -> T {
    let n = a.len();
    (0..n)
        .map(|j| (0..n).map(|i| a[i][j].norm()).fold(T::zero(), |s, x| s + x))
        .fold(T::zero(), |m, x| m.max(x))
}

/// `e^{-iH t}` by Taylor series on `A / 2^s` followed by `s` squarings.
pub fn expm_minus_i_ht<T: Real>(h: &Hamiltonian<T>, t_phys: T) -> Vec<Vec<Complex<T>>> {
    let n = h.dim();
    let m = h.matrix();
    let mut a: CMat<T> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex::new(T::zero(), -m[(i, j)] * t_phys))
                .collect()
        })
        .collect();
    let norm = one_norm(&a);
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm * scale > T::lit(0.25) {
        scale *= T::lit(0.5);
        squarings += 1;
    }
    for row in a.iter_mut() {
        for z in row.iter_mut() {
            *z *= scale;
        }
    }

    let mut result: CMat<T> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex::new(T::one(), T::zero())
                    } else {
                        czero()
                    }
                })
                .collect()
        })
        .collect();
    let mut term = result.clone();
    for k in 1..=30 {
        term = cmatmul(&term, &a);
        let inv_k = T::one() / T::from_usize_lossy(k);
        let mut biggest = T::zero();
        for i in 0..n {
            for j in 0..n {
                term[i][j] *= inv_k;
                result[i][j] += term[i][j];
                biggest = biggest.max(term[i][j].norm());
            }
        }
        if biggest < T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    for _ in 0..squarings {
        result = cmatmul(&result, &result);
    }
    result
}

/// `e^{-iH t_phys} ψ₀` via [`expm_minus_i_ht`].
pub fn expm_propagate<T: Real>(h: &Hamiltonian<T>, psi0: &PureState<T>, t_phys: T) -> PureState<T> {
    let u = expm_minus_i_ht(h, t_phys);
    let amps: Vec<Complex<T>> = u
        .iter()
        .map(|row| {
            row.iter()
                .zip(psi0.amplitudes())
                .fold(czero(), |acc, (a, b)| acc + a * b)
        })
        .collect();
    PureState::new(amps, format!("{} (expm)", psi0.label()))
        .expect("matrix exponential lost normalization")
}

/// Two sites coupled by -1 starting on site 0: `(p0, p1, S_x)` at `t_phys`.
pub fn two_level_analytic(t_phys: f64) -> (f64, f64, f64) {
    let p0 = t_phys.cos().powi(2);
    let p1 = t_phys.sin().powi(2);
    let h = |p: f64| {
        if p > 0.0 {
            -p * p.ln() / std::f64::consts::LN_2
        } else {
            0.0
        }
    };
    (p0, p1, h(p0) + h(p1))
}

/// `-Σ_k |⟨φ_k|ψ⟩|² log₂ |⟨φ_k|ψ⟩|²` by explicit double loop; `basis[k]` is
/// the ket φ_k.
pub fn brute_force_entropy<T: Real>(psi: &PureState<T>, basis: &[Vec<Complex<T>>]) -> f64 {
    let amps = psi.amplitudes();
    let mut total = 0.0f64;
    for phi in basis {
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        for (b, a) in phi.iter().zip(amps) {
            // conj(b) * a
            let (br, bi) = (b.re.as_f64(), b.im.as_f64());
            let (ar, ai) = (a.re.as_f64(), a.im.as_f64());
            re += br * ar + bi * ai;
            im += br * ai - bi * ar;
        }
        let p = re * re + im * im;
        if p > 0.0 {
            total -= p * p.log2();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use std::f64::consts::PI;

    fn two_site() -> Hamiltonian<f64> {
        Hamiltonian::from_matrix(
            Matrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn analytic_two_level_points() {
        assert_eq!(two_level_analytic(0.0), (1.0, 0.0, 0.0));
        let (p0, p1, s) = two_level_analytic(PI / 4.0);
        assert!((p0 - 0.5).abs() < 1e-15 && (p1 - 0.5).abs() < 1e-15 && (s - 1.0).abs() < 1e-14);
        let (p0, p1, s) = two_level_analytic(PI);
        assert!((p0 - 1.0).abs() < 1e-15 && p1 < 1e-30 && s < 1e-12);
    }

    #[test]
    fn expm_two_site() {
        let psi = PureState::basis(2, 0).unwrap();
        let out = expm_propagate(&two_site(), &psi, PI / 4.0);
        assert!((out.amplitudes()[0].norm_sqr() - 0.5).abs() < 1e-10);
        let same = expm_propagate(&two_site(), &psi, 0.0);
        assert_eq!(same.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn brute_force_basis_state() {
        let psi = PureState::<f64>::basis(3, 2).unwrap();
        let basis: Vec<Vec<Complex<f64>>> = (0..3)
            .map(|k| {
                (0..3)
                    .map(|j| Complex::new(if j == k { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        assert_eq!(brute_force_entropy(&psi, &basis), 0.0);
    }

    #[test]
    fn report_flag() {
        assert!(OracleReport::new("a", 1e-9, 1e-8).passed);
        assert!(!OracleReport::new("b", 1e-7, 1e-8).passed);
    }
}

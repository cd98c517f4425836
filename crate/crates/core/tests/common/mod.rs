//! Random fixtures and the invariant checks shared by the property tests and
//! the acceptance runner. Each check returns the worst deviation it saw.

#![allow(dead_code)]

use netentropy::entropy::{operator_entropy, s_vn, Basis, DensityMatrix};
use netentropy::linalg::Matrix;
use netentropy::network::{assemble_hamiltonian, build_connectivity, generate_sites, Hamiltonian};
use netentropy::oracle::{expm_propagate, two_level_analytic};
use netentropy::spectral::{diagonalize, evolve, evolve_backward, PureState, Spectrum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Network Hamiltonian on `n` random sites with a random on-site energy.
pub fn random_network(n: usize, seed: u64) -> Hamiltonian<f64> {
    let mut r = rng(seed);
    let sites = generate_sites::<f64>(n, seed).unwrap();
    let pool = (n - 1).min(6);
    let passes = r.random_range(1..=3);
    let graph = build_connectivity(&sites, passes, pool, seed).unwrap();
    assemble_hamiltonian(&graph, r.random_range(-1.0..1.0), r.random_range(0.5..2.0)).unwrap()
}

pub fn random_state(n: usize, seed: u64) -> PureState<f64> {
    let mut r = rng(seed);
    let amps = (0..n)
        .map(|_| Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
        .collect();
    PureState::normalized(amps, "random").unwrap()
}

/// Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix; row `k`
/// is the k-th ket.
pub fn random_unitary(n: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut r = rng(seed);
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
            .collect();
        for _ in 0..2 {
            for u in &rows {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            rows.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    rows
}

/// Mixture of up to `n` random pure states with random weights.
pub fn random_density(n: usize, seed: u64) -> DensityMatrix<f64> {
    let mut r = rng(seed);
    let terms = r.random_range(1..=n);
    let weights: Vec<f64> = (0..terms).map(|_| r.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for (k, w) in weights.iter().enumerate() {
        let psi = random_state(n, seed.wrapping_mul(31).wrapping_add(k as u64));
        let a = psi.amplitudes();
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] += a[i] * a[j].conj() * (w / total);
            }
        }
    }
    // Enforce exact Hermiticity against rounding.
    for i in 0..n {
        data[i * n + i].im = 0.0;
        for j in 0..i {
            data[j * n + i] = data[i * n + j].conj();
        }
    }
    DensityMatrix::new(n, data).unwrap()
}

fn spectrum(h: &Hamiltonian<f64>) -> Spectrum<f64> {
    diagonalize(h).unwrap()
}

/// Spectral propagation vs. the Taylor matrix exponential over `systems`
/// random networks with 2..=16 sites.
pub fn oracle_propagation(systems: u64) -> f64 {
    let mut worst = 0.0f64;
    for case in 0..systems {
        let mut r = rng(1000 + case);
        let n = r.random_range(2..=16);
        let h = random_network(n, 2000 + case);
        let s = spectrum(&h);
        let psi = random_state(n, 3000 + case);
        let t: f64 = r.random_range(0.0..5.0);
        let ours = evolve(&psi, &s, t);
        let reference = expm_propagate(&h, &psi, t * s.tau());
        worst = worst.max(ours.max_abs_diff(&reference));
    }
    worst
}

/// Two coupled sites started on site 0, checked against `cos²`/`sin²` at
/// τ/8 steps up to and including the revival at t = τ.
pub fn two_level_revival() -> f64 {
    let h = Hamiltonian::from_matrix(
        Matrix::from_row_major(vec![0.0, -1.0, -1.0, 0.0]).unwrap(),
        1.0,
    )
    .unwrap();
    let s = spectrum(&h);
    let psi0 = PureState::basis(2, 0).unwrap();
    let mut worst = 0.0f64;
    for step in 0..=8 {
        let t = step as f64 / 8.0;
        let psi = evolve(&psi0, &s, t);
        let (p0, p1, _) = two_level_analytic(t * std::f64::consts::PI);
        let a = psi.amplitudes();
        worst = worst
            .max((a[0].norm_sqr() - p0).abs())
            .max((a[1].norm_sqr() - p1).abs());
    }
    let revived = evolve(&psi0, &s, 1.0);
    worst.max(
        revived
            .max_abs_diff(&psi0.clone())
            .min(revived.max_abs_diff(&negate(&psi0))),
    )
}

fn negate(psi: &PureState<f64>) -> PureState<f64> {
    PureState::new(psi.amplitudes().iter().map(|z| -z).collect(), "negated").unwrap()
}

/// Largest `|‖ψ(t)‖² - 1|` over t = 0, 0.5, …, 100 (units of τ).
pub fn norm_drift(n: usize, seed: u64) -> f64 {
    let h = random_network(n, seed);
    let s = spectrum(&h);
    let psi0 = random_state(n, seed + 1);
    (0..=200)
        .map(|k| (evolve(&psi0, &s, k as f64 * 0.5).norm_sq() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `U(t1) U(t2) ψ` vs. `U(t1 + t2) ψ`.
pub fn composition(cases: u64) -> f64 {
    let mut worst = 0.0f64;
    for case in 0..cases {
        let mut r = rng(4000 + case);
        let n = r.random_range(2..=24);
        let s = spectrum(&random_network(n, 5000 + case));
        let psi = random_state(n, 6000 + case);
        let (t1, t2): (f64, f64) = (r.random_range(0.0..10.0), r.random_range(0.0..10.0));
        let stepped = evolve(&evolve(&psi, &s, t2), &s, t1);
        worst = worst.max(stepped.max_abs_diff(&evolve(&psi, &s, t1 + t2)));
    }
    worst
}

/// Smallest `|⟨ψ|U(-t)U(t)|ψ⟩|²` over random cases.
pub fn forward_backward(cases: u64) -> f64 {
    let mut worst = 1.0f64;
    for case in 0..cases {
        let mut r = rng(7000 + case);
        let n = r.random_range(2..=32);
        let s = spectrum(&random_network(n, 8000 + case));
        let psi = random_state(n, 9000 + case);
        let t: f64 = r.random_range(0.0..50.0);
        let back = evolve_backward(&evolve(&psi, &s, t), &s, t);
        worst = worst.min(psi.fidelity(&back));
    }
    worst
}

/// `|S_vN(UρU†) - S_vN(ρ)|` over random unitaries and densities.
pub fn svn_basis_invariance(cases: u64) -> f64 {
    let mut worst = 0.0f64;
    for case in 0..cases {
        let n = rng(10_000 + case).random_range(2..=32);
        let rho = random_density(n, 11_000 + case);
        let u = random_unitary(n, 12_000 + case);
        let before = s_vn(&rho).unwrap();
        let after = s_vn(&rho.conjugate_by(&u)).unwrap();
        worst = worst.max((before - after).abs());
    }
    worst
}

/// Largest `S_vN(ρ) - S_Q(ρ)` over random (ρ, basis) pairs; must not be
/// positive beyond rounding.
pub fn svn_below_operator_entropy(cases: u64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for case in 0..cases {
        let n = rng(13_000 + case).random_range(2..=32);
        let rho = random_density(n, 14_000 + case);
        let basis = Basis::from_kets(random_unitary(n, 15_000 + case)).unwrap();
        worst = worst.max(s_vn(&rho).unwrap() - operator_entropy(&rho, &basis).unwrap());
    }
    worst
}

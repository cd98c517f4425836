//! Dense real matrices and the symmetric eigensolver.
//!
//! The eigensolver reduces the matrix to tridiagonal form with Householder
//! reflections and then runs implicit QL iterations with Wilkinson-style
//! shifts. Eigenvectors are accumulated row-wise (row `k` of the result is
//! eigenvector `k`), which keeps every O(n³) loop on contiguous memory.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data; `data.len()` must be a perfect square.
    pub fn from_row_major(data: Vec<T>) -> Result<Self> {
        let n = (data.len() as f64).sqrt().round() as usize;
        if n * n != data.len() {
            return Err(Error::InvalidArgument(format!(
                "{} entries do not form a square matrix",
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("rows are not square".into()));
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let a = self.row(i);
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (k, &aik) in a.iter().enumerate() {
                if aik == T::zero() {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += aik * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// Largest `|A[i][j] - A[j][i]|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    // Four accumulators let the compiler vectorize without reassociation flags.
    let mut acc = [T::zero(); 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[inline]
fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Row `k` holds the unit eigenvector for `values[k]`.
    pub vectors: Matrix<T>,
}

struct Tridiagonal<T> {
    diag: Vec<T>,
    /// `off[i]` couples rows `i` and `i - 1`; `off[0]` is zero.
    off: Vec<T>,
    /// Row-major store whose row `i` (first `i` entries) holds the i-th
    /// Householder vector.
    reflectors: Matrix<T>,
    /// Normalization `|u|²/2` per reflector, zero where none was applied.
    half_norms: Vec<T>,
}

fn tridiagonalize<T: Real>(a: &Matrix<T>) -> Tridiagonal<T> {
    let n = a.dim();
    let mut work = a.clone();
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n];
    let mut half_norms = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];

    for i in (2..n).rev() {
        let l = i - 1;
        let scale: T = work.row(i)[..i].iter().map(|x| x.abs()).sum();
        if scale == T::zero() {
            off[i] = T::zero();
            continue;
        }
        let u = &mut work.data[i * n..i * n + i];
        for x in u.iter_mut() {
            *x /= scale;
        }
        let h: T = u.iter().map(|&x| x * x).sum();
        let f = u[l];
        let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
        off[i] = scale * g;
        let hn = h - f * g;
        u[l] = f - g;
        half_norms[i] = hn;

        let u: Vec<T> = u.to_vec();
        for j in 0..i {
            p[j] = dot(&work.row(j)[..i], &u) / hn;
        }
        let k = dot(&u, &p[..i]) / (hn + hn);
        for j in 0..i {
            p[j] -= k * u[j];
        }
        for j in 0..i {
            let (uj, qj) = (u[j], p[j]);
            let row = &mut work.data[j * n..j * n + i];
            for c in 0..i {
                row[c] -= uj * p[c] + qj * u[c];
            }
        }
    }
    if n > 1 {
        off[1] = work[(1, 0)];
    }
    for (j, d) in diag.iter_mut().enumerate() {
        *d = work[(j, j)];
    }
    Tridiagonal {
        diag,
        off,
        reflectors: work,
        half_norms,
    }
}

/// Returns Qᵀ where `Qᵀ A Q` is the tridiagonal matrix.
fn accumulate_reflectors<T: Real>(t: &Tridiagonal<T>) -> Matrix<T> {
    let n = t.diag.len();
    let mut m = Matrix::identity(n);
    for i in 2..n {
        let hn = t.half_norms[i];
        if hn == T::zero() {
            continue;
        }
        let u = &t.reflectors.row(i)[..i];
        for r in 0..i {
            let row = &mut m.data[r * n..r * n + i];
            let s = dot(row, u) / hn;
            axpy(-s, u, row);
        }
    }
    m
}

const MAX_QL_SWEEPS: usize = 64;

/// Implicit QL on a symmetric tridiagonal matrix; rotations are applied to
/// rows of `vectors` when given.
fn tridiagonal_ql<T: Real>(
    diag: &mut [T],
    off: &mut [T],
    mut vectors: Option<&mut Matrix<T>>,
) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        off[i - 1] = off[i];
    }
    off[n - 1] = T::zero();

    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut shift = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(diag[l].abs() + off[l].abs());
        let mut m = l;
        while m < n {
            if off[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::NumericalFailure(format!(
                        "eigenvalue {l} of {n} not converged after {MAX_QL_SWEEPS} QL sweeps \
                         (residual off-diagonal {:e})",
                        off[l].as_f64()
                    )));
                }
                let mut g = diag[l];
                let mut p = (diag[l + 1] - g) / (two * off[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                diag[l] = off[l] / (p + r);
                diag[l + 1] = off[l] * (p + r);
                let dl1 = diag[l + 1];
                let mut h = g - diag[l];
                for d in diag.iter_mut().skip(l + 2) {
                    *d -= h;
                }
                shift += h;

                p = diag[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = off[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * off[i];
                    h = c * p;
                    r = p.hypot(off[i]);
                    off[i + 1] = s * r;
                    s = off[i] / r;
                    c = p / r;
                    p = c * diag[i] - s * g;
                    diag[i + 1] = h + s * (c * g + s * diag[i]);
                    if let Some(v) = vectors.as_deref_mut() {
                        let nn = v.n;
                        let (lo, hi) = v.data.split_at_mut((i + 1) * nn);
                        let zi = &mut lo[i * nn..];
                        let zi1 = &mut hi[..nn];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * off[l] / dl1;
                off[l] = s * p;
                diag[l] = c * p;
                if off[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        diag[l] += shift;
        off[l] = T::zero();
    }
    Ok(())
}

fn check_input<T: Real>(a: &Matrix<T>) -> Result<()> {
    if a.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure(
            "matrix has non-finite entries".into(),
        ));
    }
    Ok(())
}

/// Full eigen-decomposition of a symmetric matrix (only the lower triangle
/// is assumed meaningful if the input is slightly asymmetric).
pub fn symmetric_eigen<T: Real>(a: &Matrix<T>) -> Result<SymmetricEigen<T>> {
    check_input(a)?;
    let n = a.dim();
    let mut tri = tridiagonalize(a);
    let mut vectors = accumulate_reflectors(&tri);
    tridiagonal_ql(&mut tri.diag, &mut tri.off, Some(&mut vectors))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        tri.diag[i]
            .partial_cmp(&tri.diag[j])
            .unwrap()
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| tri.diag[i]).collect();
    let mut sorted = Matrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        sorted.row_mut(dst).copy_from_slice(vectors.row(src));
    }
    Ok(SymmetricEigen {
        values,
        vectors: sorted,
    })
}

/// Ascending eigenvalues of a symmetric matrix, without eigenvectors.
pub fn symmetric_eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<T>> {
    check_input(a)?;
    let mut tri = tridiagonalize(a);
    tridiagonal_ql(&mut tri.diag, &mut tri.off, None)?;
    let mut values = tri.diag;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values)
}

use std::ops::{Index, IndexMut};

use super::{norm2, EigenResult, Scalar};
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![T::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::from_re(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .fold(T::default(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn to_csr(&self) -> super::CsrMatrix<T> {
        let mut t = super::TripletBuilder::new(self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self[(i, j)];
                if v != T::default() {
                    t.add(i, j, v);
                }
            }
        }
        t.build()
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower Cholesky factor `L` with `M = L Lᴴ`.
fn cholesky<T: Scalar>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let n = m.rows;
    let mut l = DenseMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re();
        for k in 0..j {
            d -= l[(j, k)].abs2();
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[(j, j)] = T::from_re(d);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s.scale(1.0 / d);
        }
    }
    Ok(l)
}

/// Solves `L x = b` in place.
fn forward<T: Scalar>(l: &DenseMatrix<T>, b: &mut [T]) {
    for i in 0..l.rows {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Solves `Lᴴ x = b` in place.
fn backward_h<T: Scalar>(l: &DenseMatrix<T>, b: &mut [T]) {
    for i in (0..l.rows).rev() {
        let mut s = b[i];
        for k in i + 1..l.rows {
            s -= l[(k, i)].conj() * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix by implicit QL.
///
/// `d` is the diagonal, `e[i]` couples `i` and `i+1`. Returns unsorted
/// eigenvalues, eigenvectors as columns (if requested) and the sweep count.
pub fn tridiagonal_eigen(
    d: &[f64],
    e: &[f64],
    vectors: bool,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e
        .iter()
        .copied()
        .chain(std::iter::repeat(0.0))
        .take(n)
        .collect();
    let mut z: Vec<Vec<f64>> = if vectors {
        (0..n)
            .map(|i| {
                let mut c = vec![0.0; n];
                c[i] = 1.0;
                c
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut sweeps = 0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            sweeps += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    iterations: sweeps,
                    worst_residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if vectors {
                    let (lo, hi) = z.split_at_mut(i + 1);
                    let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                    for k in 0..n {
                        let f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z, sweeps))
}

/// Reduces Hermitian `c` to real tridiagonal form by Householder reflections.
///
/// Returns `(diag, offdiag, reflectors, phases)`: `c = Q D T Dᴴ Qᴴ` with `T`
/// real, `Q` the product of the reflectors and `D = diag(phases)`.
#[allow(clippy::type_complexity)]
fn tridiagonalize<T: Scalar>(
    mut c: DenseMatrix<T>,
) -> (Vec<f64>, Vec<f64>, Vec<Option<Vec<T>>>, Vec<T>) {
    let n = c.rows;
    let mut sub: Vec<T> = vec![T::default(); n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let x: Vec<T> = (k + 1..n).map(|i| c[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|v| v.abs2()).sum();
        if tail == 0.0 {
            sub[k] = x[0];
            reflectors.push(None);
            continue;
        }
        let xnorm = (tail + x[0].abs2()).sqrt();
        let alpha = -x[0].phase().scale(xnorm);
        let mut v = x;
        v[0] -= alpha;
        let vn = norm2(&v);
        for a in v.iter_mut() {
            *a = a.scale(1.0 / vn);
        }
        // w = A v on the trailing block
        let m = n - k - 1;
        let off = k + 1;
        let w: Vec<T> = (0..m)
            .map(|i| (0..m).fold(T::default(), |acc, j| acc + c[(off + i, off + j)] * v[j]))
            .collect();
        let kappa = super::dot(&v, &w).re();
        let q: Vec<T> = w
            .iter()
            .zip(&v)
            .map(|(&wi, &vi)| wi.scale(2.0) - vi.scale(2.0 * kappa))
            .collect();
        for i in 0..m {
            for j in 0..m {
                let upd = v[i] * q[j].conj() + q[i] * v[j].conj();
                c[(off + i, off + j)] -= upd;
            }
        }
        sub[k] = alpha;
        reflectors.push(Some(v));
    }
    let diag: Vec<f64> = (0..n).map(|i| c[(i, i)].re()).collect();
    let mut phases = vec![T::from_re(1.0); n];
    let mut off = Vec::with_capacity(sub.len());
    for k in 0..sub.len() {
        phases[k + 1] = phases[k] * sub[k].phase();
        off.push(sub[k].abs());
    }
    (diag, off, reflectors, phases)
}

/// All eigenpairs of `K x = λ M x` for Hermitian `K` and positive definite `M`.
pub fn eig_dense_hermitian_generalized<T: Scalar>(
    k: &DenseMatrix<T>,
    m: &DenseMatrix<T>,
) -> Result<EigenResult<T>> {
    let n = k.rows;
    assert!(k.cols == n && m.rows == n && m.cols == n);
    let l = cholesky(m)?;
    // Y = L⁻¹ K, column by column
    let mut y = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut col: Vec<T> = (0..n).map(|i| k[(i, j)]).collect();
        forward(&l, &mut col);
        for i in 0..n {
            y[(i, j)] = col[i];
        }
    }
    // C = (L⁻¹ Yᴴ)ᴴ
    let mut c = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut col: Vec<T> = (0..n).map(|i| y[(j, i)].conj()).collect();
        forward(&l, &mut col);
        for i in 0..n {
            c[(j, i)] = col[i].conj();
        }
    }
    let c = DenseMatrix::from_fn(n, n, |i, j| (c[(i, j)] + c[(j, i)].conj()).scale(0.5));
    let (diag, off, reflectors, phases) = tridiagonalize(c);
    let (vals, z, sweeps) = tridiagonal_eigen(&diag, &off, true)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let values: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let vectors: Vec<Vec<T>> = order
        .iter()
        .map(|&i| {
            let mut yv: Vec<T> = z[i]
                .iter()
                .zip(&phases)
                .map(|(&zk, &p)| p.scale(zk))
                .collect();
            for (kk, r) in reflectors.iter().enumerate().rev() {
                if let Some(v) = r {
                    let seg = &mut yv[kk + 1..];
                    let proj = super::dot(v, seg);
                    for (s, &vi) in seg.iter_mut().zip(v) {
                        *s -= vi * proj.scale(2.0);
                    }
                }
            }
            backward_h(&l, &mut yv);
            yv
        })
        .collect();
    let (kc, mc) = (k.to_csr(), m.to_csr());
    let (residual_norms, backward_errors) = super::pencil_residuals(&kc, &mc, &values, &vectors);
    Ok(EigenResult {
        outside_window: vec![false; n],
        values,
        vectors: Some(vectors),
        residual_norms,
        backward_errors,
        iterations: sweeps,
        seed: 0,
        sigma: f64::NAN,
    })
}

/// Number of eigenvalues of `K x = λ M x` below `x`, by Sylvester's law of
/// inertia on an unpivoted `LDLᴴ` of `K − xM`.
///
/// Used as an independent oracle; returns `None` on a zero pivot.
pub fn count_eigenvalues_below<T: Scalar>(
    k: &DenseMatrix<T>,
    m: &DenseMatrix<T>,
    x: f64,
) -> Option<usize> {
    let n = k.rows;
    let mut a = DenseMatrix::from_fn(n, n, |i, j| k[(i, j)] - m[(i, j)].scale(x));
    let mut neg = 0;
    for j in 0..n {
        let d = a[(j, j)].re();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        if d < 0.0 {
            neg += 1;
        }
        for i in j + 1..n {
            let lij = a[(i, j)].scale(1.0 / d);
            for kk in j + 1..=i {
                let upd = lij * a[(kk, j)].conj();
                a[(i, kk)] -= upd;
            }
        }
        for i in j + 1..n {
            // keep the lower triangle consistent for the next column
            a[(j, i)] = a[(i, j)].conj();
        }
    }
    Some(neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_examples() {
        let k = DenseMatrix::from_fn(2, 2, |i, j| if i == j { [1.0, 4.0][i] } else { 0.0 });
        let r = eig_dense_hermitian_generalized(&k, &DenseMatrix::identity(2)).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-14 && (r.values[1] - 4.0).abs() < 1e-14);
        let k = DenseMatrix::from_fn(2, 2, |i, j| if i == j { 2.0 } else { -1.0 });
        let r = eig_dense_hermitian_generalized(&k, &DenseMatrix::identity(2)).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-14 && (r.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_failure_reports_pivot() {
        let m = DenseMatrix::from_fn(3, 3, |i, j| if i == j { [1.0, 1.0, -1.0][i] } else { 0.0 });
        match eig_dense_hermitian_generalized(&DenseMatrix::identity(3), &m) {
            Err(Error::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 2),
            other => panic!("{other:?}"),
        }
    }

    fn random_pencil(n: usize, seed: u64) -> (DenseMatrix<Complex64>, DenseMatrix<Complex64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DenseMatrix::from_fn(n, n, |_, _| Complex64::random(&mut rng));
        let b = DenseMatrix::from_fn(n, n, |_, _| Complex64::random(&mut rng));
        let k = DenseMatrix::from_fn(n, n, |i, j| a[(i, j)] + a[(j, i)].conj());
        let mut m = DenseMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex64::default(), |s, p| {
                s + b[(p, i)].conj() * b[(p, j)]
            })
        });
        for i in 0..n {
            m[(i, i)] += Complex64::new(n as f64, 0.0);
        }
        (k, m)
    }

    #[test]
    fn random_pencil_matches_sturm_counts() {
        let (k, m) = random_pencil(50, 11);
        let r = eig_dense_hermitian_generalized(&k, &m).unwrap();
        assert!(r.backward_errors.iter().all(|&e| e < 1e-13));
        assert!(
            r.residual_norms.iter().all(|&e| e < 1e-10),
            "{:?}",
            r.residual_norms
        );
        for (i, &lam) in r.values.iter().enumerate() {
            // bisection on the inertia count
            let below = if i == 0 {
                lam - 1.0
            } else {
                0.5 * (r.values[i - 1] + lam)
            };
            let above = r.values.get(i + 1).map_or(lam + 1.0, |&v| 0.5 * (v + lam));
            let (mut lo, mut hi) = (below, above);
            assert_eq!(count_eigenvalues_below(&k, &m, lo), Some(i));
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if count_eigenvalues_below(&k, &m, mid).unwrap() > i {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            assert!((0.5 * (lo + hi) - lam).abs() < 1e-9);
        }
        // M-orthonormality
        let v = r.vectors.as_ref().unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let g = super::super::dot(&v[a], &m.matvec(&v[b]));
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - Complex64::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn tridiagonal_known_spectrum() {
        let n = 30;
        let (vals, _, _) = tridiagonal_eigen(&vec![2.0; n], &vec![-1.0; n - 1], false).unwrap();
        let mut vals = vals;
        vals.sort_by(f64::total_cmp);
        for (j, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13);
        }
    }
}

use std::collections::VecDeque;

use super::Scalar;
use crate::error::{Error, Result};

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    n: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> TripletBuilder<T> {
    pub fn new(n: usize) -> Self {
        TripletBuilder {
            n,
            entries: Vec::new(),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i, j, v));
    }

    pub fn build(mut self) -> CsrMatrix<T> {
        self.entries.sort_by_key(|e| (e.0, e.1));
        let mut indptr = vec![0usize; self.n + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut data: Vec<T> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                data.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            n: self.n,
            indptr,
            indices,
            data,
        }
    }
}

/// Square sparse matrix in compressed sparse row form, sorted columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()]
            .iter()
            .copied()
            .zip(self.data[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(p) => self.data[r.start + p],
            Err(_) => T::default(),
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| self.row(i).fold(T::default(), |acc, (j, v)| acc + v * x[j]))
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `a·self + b·other`, union of patterns.
    pub fn axpby(&self, a: f64, other: &CsrMatrix<T>, b: f64) -> CsrMatrix<T> {
        assert_eq!(self.n, other.n);
        let mut t = TripletBuilder::new(self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                t.add(i, j, v.scale(a));
            }
            for (j, v) in other.row(i) {
                t.add(i, j, v.scale(b));
            }
        }
        t.build()
    }

    /// Largest `|A_ij − conj(A_ji)|`; exactly zero for pencils assembled here.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i).conj()).abs());
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|v| v.im() == 0.0)
    }

    pub fn to_dense(&self) -> super::DenseMatrix<T> {
        let mut d = super::DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] += v;
            }
        }
        d
    }

    /// `P A Pᵀ` with `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> CsrMatrix<T> {
        let mut inv = vec![0; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut t = TripletBuilder::new(self.n);
        for (new_i, &old_i) in perm.iter().enumerate() {
            for (j, v) in self.row(old_i) {
                t.add(new_i, inv[j], v);
            }
        }
        t.build()
    }

    /// Lower and upper bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..self.n {
            for (j, _) in self.row(i) {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }
}

/// Reverse Cuthill–McKee ordering of the symmetrised pattern; `perm[new] = old`.
pub fn reverse_cuthill_mckee<T: Scalar>(a: &CsrMatrix<T>) -> Vec<usize> {
    let n = a.n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize, mark: &mut Vec<bool>| -> (usize, usize) {
        // returns (depth, a node of minimal degree in the last level)
        let mut queue = VecDeque::from([(start, 0usize)]);
        let mut seen = vec![start];
        mark[start] = true;
        let (mut depth, mut last) = (0, start);
        while let Some((u, d)) = queue.pop_front() {
            if d > depth || (d == depth && degree[u] < degree[last]) {
                depth = d;
                last = u;
            }
            for &v in &adj[u] {
                if !mark[v] {
                    mark[v] = true;
                    seen.push(v);
                    queue.push_back((v, d + 1));
                }
            }
        }
        for v in seen {
            mark[v] = false;
        }
        (depth, last)
    };

    let mut scratch = vec![false; n];
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // pseudo-peripheral start
        let mut start = seed;
        let (mut depth, mut far) = bfs_levels(start, &mut scratch);
        for _ in 0..8 {
            let (d2, f2) = bfs_levels(far, &mut scratch);
            if d2 <= depth {
                break;
            }
            start = far;
            depth = d2;
            far = f2;
        }
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = adj[u].iter().copied().filter(|&v| !visited[v]).collect();
            next.sort_by_key(|&v| degree[v]);
            for v in next {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// LU factorisation with partial pivoting of a banded matrix.
///
/// Storage follows the LAPACK `gbtrf` convention: column-major, leading
/// dimension `2kl + ku + 1`, entry `(i, j)` at row `kl + ku + i − j`.
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Scalar> BandedLu<T> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    /// Factorises `a`, which must already be in a band-friendly ordering.
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let n = a.n;
        let (kl, ku) = a.bandwidths();
        let ldab = 2 * kl + ku + 1;
        let mut lu = BandedLu {
            n,
            kl,
            ku,
            ldab,
            ab: vec![T::default(); ldab * n],
            piv: vec![0; n],
        };
        for i in 0..n {
            for (j, v) in a.row(i) {
                let p = lu.at(i, j);
                lu.ab[p] += v;
            }
        }
        let scale = a.norm_inf().max(f64::MIN_POSITIVE);
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = j;
            let mut best = lu.ab[lu.at(j, j)].abs();
            for i in j + 1..=j + km {
                let v = lu.ab[lu.at(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= scale * 1e-300 || !best.is_finite() {
                return Err(Error::SingularPivot { pivot: j });
            }
            lu.piv[j] = p;
            ju = ju.max((j + ku + p - j).min(n - 1));
            if p != j {
                for c in j..=ju {
                    let (x, y) = (lu.at(j, c), lu.at(p, c));
                    lu.ab.swap(x, y);
                }
            }
            let d = lu.ab[lu.at(j, j)];
            for i in j + 1..=j + km {
                let q = lu.at(i, j);
                lu.ab[q] /= d;
            }
            for c in j + 1..=ju {
                let a_jc = lu.ab[lu.at(j, c)];
                if a_jc == T::default() {
                    continue;
                }
                for i in j + 1..=j + km {
                    let l = lu.ab[lu.at(i, j)];
                    let q = lu.at(i, c);
                    lu.ab[q] -= l * a_jc;
                }
            }
        }
        Ok(lu)
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.n;
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = self.kl.min(n - 1 - j);
            let bj = b[j];
            if bj != T::default() {
                for i in j + 1..=j + km {
                    b[i] -= self.ab[self.at(i, j)] * bj;
                }
            }
        }
        let w = self.kl + self.ku;
        for j in (0..n).rev() {
            b[j] /= self.ab[self.at(j, j)];
            let bj = b[j];
            if bj != T::default() {
                for i in j.saturating_sub(w)..j {
                    b[i] -= self.ab[self.at(i, j)] * bj;
                }
            }
        }
    }

    /// Smallest `|u_jj|` relative to the largest, a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> f64 {
        let d: Vec<f64> = (0..self.n).map(|j| self.ab[self.at(j, j)].abs()).collect();
        let max = d.iter().copied().fold(0.0, f64::max);
        d.iter().copied().fold(f64::INFINITY, f64::min) / max
    }
}

/// Direct solver for a general sparse matrix: RCM ordering then banded LU.
#[derive(Debug, Clone)]
pub struct SparseLu<T> {
    perm: Vec<usize>,
    lu: BandedLu<T>,
}

impl<T: Scalar> SparseLu<T> {
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        let lu = BandedLu::factor(&a.permuted(&perm))?;
        Ok(SparseLu { perm, lu })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut y: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        self.lu.solve_in_place(&mut y);
        let mut x = vec![T::default(); b.len()];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(n: usize, seed: u64) -> CsrMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = TripletBuilder::new(n);
        for i in 0..n {
            t.add(i, i, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
            for _ in 0..3 {
                let j = rng.gen_range(0..n);
                t.add(i, j, Complex64::random(&mut rng));
            }
        }
        t.build()
    }

    #[test]
    fn banded_lu_solves_permuted_system() {
        let a = random_sparse(200, 3);
        let perm = reverse_cuthill_mckee(&a);
        let ap = a.permuted(&perm);
        let x: Vec<Complex64> = (0..200).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let mut b = ap.matvec(&x);
        BandedLu::factor(&ap).unwrap().solve_in_place(&mut b);
        let err = b
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn rcm_reduces_bandwidth_of_a_shuffled_path() {
        let n = 100;
        let mut t = TripletBuilder::<f64>::new(n);
        // path graph with scrambled labels
        let label = |k: usize| (k * 37) % n;
        for k in 0..n {
            t.add(label(k), label(k), 2.0);
            if k + 1 < n {
                t.add(label(k), label(k + 1), -1.0);
                t.add(label(k + 1), label(k), -1.0);
            }
        }
        let a = t.build();
        assert!(a.bandwidths().0 > 10);
        let p = a.permuted(&reverse_cuthill_mckee(&a));
        assert_eq!(p.bandwidths(), (1, 1));
    }

    #[test]
    fn duplicates_are_summed() {
        let mut t = TripletBuilder::<f64>::new(2);
        t.add(0, 1, 1.0);
        t.add(0, 1, 2.5);
        t.add(1, 0, 3.5);
        let a = t.build();
        assert_eq!(a.get(0, 1), 3.5);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.hermitian_defect(), 0.0);
    }
}

//! Dense linear algebra for the small (N ≤ ~30) overlap matrices.

use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Leading `k × k` block.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, |i, j| self[(i, j)])
    }

    /// Sub-matrix on the given rows/columns.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    /// max |M − M†| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap();
            let pivot = a[p * n + k];
            if pivot.norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f.norm() == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
            }
        }
        det
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// The N×N Hermitian matrix A = X + iY is embedded in the real symmetric
    /// 2N×2N matrix [[X, −Y], [Y, X]], whose spectrum is that of A with every
    /// eigenvalue doubled, and diagonalised by cyclic Jacobi rotations.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.n;
        let m = 2 * n;
        let mut s = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                // Symmetrise so that small Hermiticity defects cannot bias the result.
                let z = 0.5 * (self[(i, j)] + self[(j, i)].conj());
                s[i * m + j] = z.re;
                s[(i + n) * m + (j + n)] = z.re;
                s[(i + n) * m + j] = z.im;
                s[i * m + (j + n)] = -z.im;
            }
        }
        let mut ev = jacobi_eigenvalues(&mut s, m);
        ev.sort_by(f64::total_cmp);
        ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Cyclic Jacobi on a dense real symmetric matrix (overwritten).
fn jacobi_eigenvalues(a: &mut [f64], m: usize) -> Vec<f64> {
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; m];
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i * m + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(CMatrix::identity(3).det(), c(1.0, 0.0));
        let m = CMatrix::from_fn(2, |i, j| [[c(0.0, 0.0), c(2.0, 0.0)], [c(3.0, 0.0), c(4.0, 0.0)]][i][j]);
        assert!((m.det() - c(-6.0, 0.0)).norm() < 1e-14);
        let m = CMatrix::from_fn(2, |i, j| [[c(1.0, 1.0), c(2.0, 0.0)], [c(0.0, 1.0), c(1.0, -1.0)]][i][j]);
        // (1+i)(1−i) − 2i = 2 − 2i
        assert!((m.det() - c(2.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli_y_mix() {
        // [[1, −i], [i, 1]] has eigenvalues 0 and 2.
        let m = CMatrix::from_fn(2, |i, j| [[c(1.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(1.0, 0.0)]][i][j]);
        let ev = m.hermitian_eigenvalues();
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalue_product_is_determinant() {
        let m = CMatrix::from_fn(4, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            let im = if i < j { 0.1 * (a + b) } else if i > j { -0.1 * (a + b) } else { 0.0 };
            c(if i == j { 2.0 + a } else { 0.3 / (1.0 + a + b) }, im)
        });
        assert!(m.hermiticity_defect() < 1e-15);
        let prod: f64 = m.hermitian_eigenvalues().iter().product();
        assert!((prod - m.det().re).abs() < 1e-12 * prod.abs());
        let sum: f64 = m.hermitian_eigenvalues().iter().sum();
        assert!((sum - m.trace().re).abs() < 1e-12);
    }
}

//! Real symmetric tridiagonal eigenproblems with a uniform off-diagonal.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with a partially pivoted LU factorization. Only the lowest few
//! pairs of a large matrix are ever needed, so nothing here forms the full
//! spectrum.

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let off2 = off * off;
    let tiny = f64::MIN_POSITIVE.sqrt() * (off.abs() + 1.0);
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { d - x - off2 / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn spectrum_bounds(diag: &[f64], off: f64) -> (f64, f64) {
    let r = 2.0 * off.abs();
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
    let hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection to full precision.
pub fn kth_eigenvalue(diag: &[f64], off: f64, k: usize) -> f64 {
    let (mut lo, mut hi) = spectrum_bounds(diag, off);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvector for the eigenvalue closest to `shift`, normalised to unit
/// Euclidean length. Three sweeps suffice for isolated eigenvalues.
pub fn inverse_iteration(diag: &[f64], off: f64, shift: f64) -> Vec<f64> {
    let n = diag.len();
    let lu = PivotedTridiagonal::factor(diag, off, shift);
    // Deterministic start vector with no special symmetry.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..4 {
        lu.solve(&mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// LU factorisation of (T − shift·I) with partial pivoting, following the
/// layout of LAPACK's `gttrf`: `U` has two superdiagonals.
struct PivotedTridiagonal {
    l: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedTridiagonal {
    fn factor(diag: &[f64], off: f64, shift: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
        let mut du = vec![off; n.saturating_sub(1)];
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let eps = f64::EPSILON * (diag.iter().fold(0.0f64, |m, x| m.max(x.abs())) + off.abs());
        for i in 0..n.saturating_sub(1) {
            let sub = off;
            if d[i].abs() >= sub.abs() {
                let d_i = if d[i] == 0.0 { eps } else { d[i] };
                d[i] = d_i;
                let m = sub / d_i;
                l[i] = m;
                d[i + 1] -= m * du[i];
            } else {
                let m = d[i] / sub;
                l[i] = m;
                d[i] = sub;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - m * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -m;
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = eps;
        }
        for x in d.iter_mut() {
            if x.abs() < eps {
                *x = eps.copysign(*x);
            }
        }
        Self { l, u0: d, u1: du, u2: du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - self.l[i] * b[i];
            } else {
                b[i + 1] -= self.l[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * b[i + 2];
            }
            b[i] = s / self.u0[i];
        }
    }
}

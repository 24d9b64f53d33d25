//! Dense complex linear algebra helpers shared across the library.
//!
//! nalgebra's generic matrix product is slow for `Complex64`, so the hot
//! paths (trajectory stepping, mode-sum assembly) go through the hand-rolled
//! column-axpy kernels here. Everything is deterministic: no randomized
//! pivoting, fixed iteration orders.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// C = A * B via column axpy; both operands column-major contiguous.
pub fn cgemm(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (m, ka) = a.shape();
    let (kb, n) = b.shape();
    assert_eq!(ka, kb, "cgemm shape mismatch");
    let mut c = DMatrix::zeros(m, n);
    let av = a.as_slice();
    let bv = b.as_slice();
    let cv = c.as_mut_slice();
    for j in 0..n {
        let cj = &mut cv[j * m..(j + 1) * m];
        for k in 0..ka {
            let s = bv[j * kb + k];
            if s.re == 0.0 && s.im == 0.0 {
                continue;
            }
            let ak = &av[k * m..(k + 1) * m];
            for i in 0..m {
                cj[i] += s * ak[i];
            }
        }
    }
    c
}

pub fn cgemv(a: &DMatrix<Complex64>, x: &DVector<Complex64>) -> DVector<Complex64> {
    let (m, k) = a.shape();
    assert_eq!(k, x.len(), "cgemv shape mismatch");
    let mut y = DVector::zeros(m);
    let av = a.as_slice();
    let yv = y.as_mut_slice();
    for (kk, s) in x.iter().enumerate() {
        if s.re == 0.0 && s.im == 0.0 {
            continue;
        }
        let ak = &av[kk * m..(kk + 1) * m];
        for i in 0..m {
            yv[i] += s * ak[i];
        }
    }
    y
}

/// Rank-1 update: m += w * v v^dagger.
pub fn rank1_acc(m: &mut DMatrix<Complex64>, v: &DVector<Complex64>, w: f64) {
    let n = v.len();
    assert_eq!(m.nrows(), n);
    let mv = m.as_mut_slice();
    let vv = v.as_slice();
    for j in 0..n {
        let s = vv[j].conj() * w;
        let col = &mut mv[j * n..(j + 1) * n];
        for i in 0..n {
            col[i] += vv[i] * s;
        }
    }
}

pub fn adjoint(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.adjoint()
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frob(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    let (rows, cols) = m.shape();
    let mv = m.as_slice();
    let mut best = 0.0f64;
    for j in 0..cols {
        let s: f64 = mv[j * rows..(j + 1) * rows].iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

pub fn trace(m: &DMatrix<Complex64>) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
/// Returns (eigenvalues, eigenvectors as columns).
pub fn eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let se = m.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &se.eigenvectors.column(src));
    }
    (vals, vecs)
}

pub fn min_eig_hermitian(m: &DMatrix<Complex64>) -> f64 {
    let (vals, _) = eigh(m);
    vals[0]
}

/// exp(E) by scaling-and-squaring with a degree-13 Taylor core.
/// Intended for small matrices (Fock-space / grid-mode scale).
pub fn expm(e: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = e.nrows();
    assert_eq!(n, e.ncols());
    let norm = one_norm(e);
    let s: i32 = if norm <= 0.5 {
        0
    } else {
        (norm / 0.5).log2().ceil() as i32
    };
    let scale = Complex64::new(2f64.powi(-s), 0.0);
    let es = e * scale;
    let mut acc = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=13u32 {
        term = cgemm(&term, &es) / Complex64::new(k as f64, 0.0);
        acc += &term;
    }
    for _ in 0..s {
        acc = cgemm(&acc, &acc);
    }
    acc
}

/// exp(E) * B without forming exp(E): plain Taylor applied to B.
/// Converges fast for the step norms used here (||E|| of order one).
pub fn expm_apply(e: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut acc = b.clone();
    let mut term = b.clone();
    let bscale = frob(b).max(1e-300);
    for k in 1..=40u32 {
        term = cgemm(e, &term) / Complex64::new(k as f64, 0.0);
        acc += &term;
        if frob(&term) < 1e-16 * bscale {
            break;
        }
    }
    acc
}

/// Largest singular value by power iteration on M^dagger M.
/// Deterministic start vector; adequate for tolerance-level comparisons.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let mut x = DVector::from_fn(cols, |j, _| {
        Complex64::new(1.0 / (1.0 + j as f64), 1.0 / (2.0 + j as f64))
    });
    let nx = x.norm();
    x /= Complex64::new(nx, 0.0);
    let mh = m.adjoint();
    let mut sigma_sq = 0.0f64;
    for _ in 0..200 {
        let y = cgemv(m, &x);
        let z = cgemv(&mh, &y);
        let nz = z.norm();
        if nz == 0.0 {
            return 0.0;
        }
        x = z / Complex64::new(nz, 0.0);
        if (nz - sigma_sq).abs() <= 1e-13 * nz.max(1e-300) {
            sigma_sq = nz;
            break;
        }
        sigma_sq = nz;
    }
    sigma_sq.sqrt()
}

/// Completes an n x d matrix with orthonormal columns to an n x n unitary.
/// Candidates are the canonical basis vectors taken in index order, with
/// two-pass Gram-Schmidt; fully deterministic.
pub fn complete_isometry(iso: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (n, d) = iso.shape();
    assert!(d <= n);
    let mut cols: Vec<DVector<Complex64>> = (0..d).map(|j| iso.column(j).into_owned()).collect();
    let mut cand = 0usize;
    while cols.len() < n {
        assert!(cand < n, "ran out of completion candidates");
        let mut v = DVector::zeros(n);
        v[cand] = ONE;
        cand += 1;
        for _ in 0..2 {
            for c in &cols {
                let overlap = c.dotc(&v);
                v -= c * overlap;
            }
        }
        let nv = v.norm();
        if nv > 1e-6 {
            cols.push(v / Complex64::new(nv, 0.0));
        }
    }
    let mut u = DMatrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        u.set_column(j, c);
    }
    u
}

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) strictly
/// below lambda, by the Sturm / LDL sign count.
fn sturm_count(diag: &[f64], off: &[f64], lambda: f64) -> usize {
    let n = diag.len();
    let mut count = 0usize;
    let mut d = diag[0] - lambda;
    if d < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let mut denom = d;
        if denom == 0.0 {
            denom = 1e-300;
        }
        d = diag[i] - lambda - off[i - 1] * off[i - 1] / denom;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solve (T - lambda) x = rhs for tridiagonal T with partial pivoting.
fn tridiag_solve_shifted(diag: &[f64], off: &[f64], lambda: f64, rhs: &mut [f64]) {
    let n = diag.len();
    // working copies of the three bands plus a fill-in band from pivoting
    let mut a: Vec<f64> = off.to_vec(); // sub
    let mut b: Vec<f64> = diag.iter().map(|&x| x - lambda).collect();
    let mut c: Vec<f64> = off.to_vec(); // super
    let mut d2 = vec![0.0f64; n]; // second super from row swaps
    for i in 0..n - 1 {
        if a[i].abs() > b[i].abs() {
            rhs.swap(i, i + 1);
            std::mem::swap(&mut b[i], &mut a[i]);
            std::mem::swap(&mut c[i], &mut b[i + 1]);
            if i + 1 < n - 1 {
                d2[i] = c[i + 1];
                c[i + 1] = 0.0;
            }
        }
        let piv = if b[i] == 0.0 { 1e-300 } else { b[i] };
        let m = a[i] / piv;
        b[i + 1] -= m * c[i];
        if i + 1 < n - 1 {
            c[i + 1] -= m * d2[i];
        }
        rhs[i + 1] -= m * rhs[i];
    }
    for i in (0..n).rev() {
        let mut x = rhs[i];
        if i + 1 < n {
            x -= c[i] * rhs[i + 1];
        }
        if i + 2 < n {
            x -= d2[i] * rhs[i + 2];
        }
        let piv = if b[i] == 0.0 { 1e-300 } else { b[i] };
        rhs[i] = x / piv;
    }
}

/// k-th smallest eigenpair (0-based) of a symmetric tridiagonal matrix,
/// by Sturm bisection plus inverse iteration.
pub fn tridiag_eigenpair(diag: &[f64], off: &[f64], k: usize) -> (f64, Vec<f64>) {
    let n = diag.len();
    assert!(k < n);
    assert_eq!(off.len(), n - 1);
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i < n - 1 { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    // inverse iteration with a slightly shifted target to avoid exact singularity
    let shift = lambda + 1e-11 * hi.abs().max(1.0);
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i % 7) as f64) / 7.0)
        .collect();
    for _ in 0..4 {
        tridiag_solve_shifted(diag, off, shift, &mut v);
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= nv;
        }
    }
    // Rayleigh quotient as the final eigenvalue estimate
    let mut tv = vec![0.0f64; n];
    for i in 0..n {
        tv[i] = diag[i] * v[i];
        if i > 0 {
            tv[i] += off[i - 1] * v[i - 1];
        }
        if i < n - 1 {
            tv[i] += off[i] * v[i + 1];
        }
    }
    let rayleigh: f64 = v.iter().zip(tv.iter()).map(|(a, b)| a * b).sum();
    (rayleigh, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_matrix(n: usize, seed: u64) -> DMatrix<Complex64> {
        // deterministic pseudo-random fill, no RNG dependency needed here
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        DMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()))
    }

    #[test]
    fn cgemm_matches_nalgebra() {
        let a = rand_matrix(17, 1);
        let b = rand_matrix(17, 2);
        let fast = cgemm(&a, &b);
        let refp = &a * &b;
        assert!(max_abs(&(fast - refp)) < 1e-12);
    }

    #[test]
    fn cgemv_matches_nalgebra() {
        let a = rand_matrix(23, 3);
        let x = DVector::from_fn(23, |i, _| Complex64::new(i as f64 * 0.1 - 1.0, 0.3));
        let fast = cgemv(&a, &x);
        let refp = &a * &x;
        assert!((fast - refp).norm() < 1e-12);
    }

    #[test]
    fn eigh_reconstructs_hermitian_matrix() {
        let g = rand_matrix(24, 7);
        let h = &g + g.adjoint();
        let (vals, vecs) = eigh(&h);
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            24,
            vals.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        let rec = cgemm(&cgemm(&vecs, &d), &vecs.adjoint());
        assert!(max_abs(&(rec - h)) < 1e-10);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn expm_matches_eigen_route_for_hermitian() {
        let g = rand_matrix(12, 11);
        let h = (&g + g.adjoint()) * Complex64::new(0.3, 0.0);
        let (vals, vecs) = eigh(&h);
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            12,
            vals.iter().map(|&v| Complex64::new(v.exp(), 0.0)),
        ));
        let via_eig = cgemm(&cgemm(&vecs, &d), &vecs.adjoint());
        let via_taylor = expm(&h);
        assert!(max_abs(&(via_eig - via_taylor)) < 1e-11);
    }

    #[test]
    fn expm_apply_consistent_with_expm() {
        let e = rand_matrix(10, 13) * Complex64::new(0.7, 0.0);
        let b = rand_matrix(10, 14);
        let full = cgemm(&expm(&e), &b);
        let applied = expm_apply(&e, &b);
        assert!(max_abs(&(full - applied)) < 1e-11);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let mut m = DMatrix::zeros(5, 5);
        m[(0, 0)] = Complex64::new(-3.0, 0.0);
        m[(3, 3)] = Complex64::new(2.0, 1.0);
        let s = spectral_norm(&m);
        assert!((s - 3.0).abs() < 1e-10);
    }

    #[test]
    fn complete_isometry_yields_unitary() {
        let g = rand_matrix(6, 5);
        let h = &g + g.adjoint();
        let (_, vecs) = eigh(&h);
        let iso = vecs.columns(0, 2).into_owned();
        let u = complete_isometry(&iso);
        let dev = max_abs(&(cgemm(&u.adjoint(), &u) - DMatrix::identity(6, 6)));
        assert!(dev < 1e-12);
        assert!(max_abs(&(u.columns(0, 2).into_owned() - iso)) < 1e-14);
    }

    #[test]
    fn tridiag_eigenpair_matches_dense_solver() {
        // discrete Laplacian with a parabolic diagonal
        let n = 60;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.01 * (i as f64 - 30.0).powi(2)).collect();
        let off = vec![-1.0f64; n - 1];
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            dense[(i, i)] = Complex64::new(diag[i], 0.0);
            if i < n - 1 {
                dense[(i, i + 1)] = Complex64::new(off[i], 0.0);
                dense[(i + 1, i)] = Complex64::new(off[i], 0.0);
            }
        }
        let (dense_vals, _) = eigh(&dense);
        for k in [0usize, 1, 5] {
            let (lam, v) = tridiag_eigenpair(&diag, &off, k);
            assert!(
                (lam - dense_vals[k]).abs() < 1e-9,
                "k={k}: {lam} vs {}",
                dense_vals[k]
            );
            // residual check
            let mut res = 0.0f64;
            for i in 0..n {
                let mut tv = diag[i] * v[i] - lam * v[i];
                if i > 0 {
                    tv += off[i - 1] * v[i - 1];
                }
                if i < n - 1 {
                    tv += off[i] * v[i + 1];
                }
                res += tv * tv;
            }
            assert!(res.sqrt() < 1e-8);
        }
    }
}

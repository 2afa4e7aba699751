//! Dense real linear algebra for small matrices (n up to about 50).
//!
//! Everything here is direct and allocation-light: LU with partial pivoting,
//! Householder Hessenberg reduction followed by Francis double-shift QR for
//! general spectra, cyclic Jacobi for symmetric spectra, and the continuous
//! Lyapunov equation `P H + H^T P = I` solved through its Kronecker form.

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};

use crate::{Error, Matrix, Result};

/// Relative pivot threshold for LU and Cholesky.
pub const PIVOT_TOL: f64 = 1e-12;

/// Real part an eigenvalue must exceed for positive stability.
pub const POSITIVE_STABLE_TOL: f64 = 1e-10;

/// Relative magnitude below which an eigenvalue counts as zero.
pub const ZERO_EIG_TOL: f64 = 1e-8;

/// Symmetry tolerance accepted by the symmetric routines.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// One complex eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    /// Real part.
    pub re: f64,
    /// Imaginary part.
    pub im: f64,
}

impl Eigenvalue {
    /// Modulus.
    pub fn abs(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }
}

/// Eigenvalues of a real square matrix together with the tolerance used to
/// classify an eigenvalue as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Eigenvalues, real ones first within each deflated block order.
    pub values: Vec<Eigenvalue>,
    /// Absolute zero-classification threshold.
    pub tolerance: f64,
}

impl Spectrum {
    /// Number of eigenvalues.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True for the spectrum of a 0x0 matrix.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of eigenvalues whose modulus is within the tolerance.
    pub fn zero_count(&self) -> usize {
        self.values
            .iter()
            .filter(|e| e.abs() <= self.tolerance)
            .count()
    }

    /// Smallest real part, `+inf` when empty.
    pub fn min_real(&self) -> f64 {
        self.values
            .iter()
            .map(|e| e.re)
            .fold(f64::INFINITY, f64::min)
    }

    /// Eigenvalues sorted by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<Eigenvalue> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Sum of the real parts.
    pub fn real_sum(&self) -> f64 {
        self.values.iter().map(|e| e.re).sum()
    }
}

fn require_square(a: &Matrix) -> Result<usize> {
    if a.is_square() {
        Ok(a.rows())
    } else {
        Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        })
    }
}

/// LU factorization `P A = L U` with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: Matrix,
    perm: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
}

impl LuDecomposition {
    /// Factors `a`. Fails with [`Error::Singular`] when a pivot falls below
    /// [`PIVOT_TOL`] relative to the largest entry of `a`.
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = require_square(a)?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = PIVOT_TOL * a.max_abs();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot: f64 = 0.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| fabs(lu[(i, k)]).total_cmp(&fabs(lu[(j, k)])))
                .unwrap();
            let pivot = fabs(lu[(p, k)]);
            if !(pivot > threshold) {
                return Err(Error::Singular);
            }
            min_pivot = min_pivot.min(pivot);
            max_pivot = max_pivot.max(pivot);
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / lu[(k, k)];
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(LuDecomposition {
            lu,
            perm,
            min_pivot,
            max_pivot,
        })
    }

    /// Smallest over largest pivot magnitude; a cheap conditioning hint.
    pub fn pivot_ratio(&self) -> f64 {
        if self.max_pivot == 0.0 {
            1.0
        } else {
            self.min_pivot / self.max_pivot
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Inverse, column by column.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.lu.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e)?;
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        Ok(inv)
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    LuDecomposition::new(a)?.solve(b)
}

/// Inverse of a nonsingular square matrix.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    LuDecomposition::new(a)?.inverse()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = Matrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let s = a[(i, j)];
            if s == 0.0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization.
pub fn vec_of(a: &Matrix) -> Vec<f64> {
    let mut v = Vec::with_capacity(a.rows() * a.cols());
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            v.push(a[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vec_of`].
pub fn unvec(v: &[f64], rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = v[j * rows + i];
        }
    }
    m
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        fabs(a)
    } else {
        -fabs(a)
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(a: &mut Matrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let norm = sqrt((k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum());
        if norm == 0.0 {
            continue;
        }
        let alpha = -sign(norm, a[(k + 1, k)]);
        for i in 0..n {
            v[i] = if i > k { a[(i, k)] } else { 0.0 };
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- (I - 2vv^T/|v|^2) A
        for j in 0..n {
            let d: f64 = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum();
            let f = 2.0 * d / vnorm2;
            for i in k + 1..n {
                a[(i, j)] -= f * v[i];
            }
        }
        // A <- A (I - 2vv^T/|v|^2)
        for i in 0..n {
            let d: f64 = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum();
            let f = 2.0 * d / vnorm2;
            for j in k + 1..n {
                a[(i, j)] -= f * v[j];
            }
        }
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroys `a`).
fn hessenberg_qr(a: &mut Matrix) -> Result<Vec<Eigenvalue>> {
    let n = a.rows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += fabs(a[(i, j)]);
        }
    }
    let cap = 100 * n.max(1);
    let mut total = 0usize;
    let mut shift = 0.0;
    let mut nn = n;
    while nn > 0 {
        let top = nn - 1;
        let mut its = 0;
        loop {
            let mut l = top;
            while l > 0 {
                let mut s = fabs(a[(l - 1, l - 1)]) + fabs(a[(l, l)]);
                if s == 0.0 {
                    s = anorm;
                }
                if fabs(a[(l, l - 1)]) + s == s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(top, top)];
            if l == top {
                wr[top] = x + shift;
                wi[top] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[(top - 1, top - 1)];
            let mut w = a[(top, top - 1)] * a[(top - 1, top)];
            if l == top - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = sqrt(fabs(q));
                x += shift;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[top - 1] = x + z;
                    wr[top] = if z != 0.0 { x - w / z } else { x + z };
                    wi[top - 1] = 0.0;
                    wi[top] = 0.0;
                } else {
                    wr[top - 1] = x + p;
                    wr[top] = x + p;
                    wi[top - 1] = -z;
                    wi[top] = z;
                }
                nn -= 2;
                break;
            }
            if total >= cap {
                return Err(Error::NoConvergence);
            }
            if its == 10 || its == 20 {
                // exceptional shift
                shift += x;
                for i in 0..=top {
                    a[(i, i)] -= x;
                }
                let s = fabs(a[(top, top - 1)]) + fabs(a[(top - 1, top - 2)]);
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;

            let (mut p, mut q, mut r);
            let mut m = top - 2;
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = fabs(p) + fabs(q) + fabs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = fabs(a[(m, m - 1)]) * (fabs(q) + fabs(r));
                let v = fabs(p) * (fabs(a[(m - 1, m - 1)]) + fabs(z) + fabs(a[(m + 1, m + 1)]));
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=top {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }
            let mut xk = 0.0;
            for k in m..top {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != top - 1 { a[(k + 2, k - 1)] } else { 0.0 };
                    xk = fabs(p) + fabs(q) + fabs(r);
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = sign(sqrt(p * p + q * q + r * r), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[(k, k - 1)] = -a[(k, k - 1)];
                    }
                } else {
                    a[(k, k - 1)] = -s * xk;
                }
                p += s;
                let hx = p / s;
                let hy = q / s;
                let hz = r / s;
                q /= p;
                r /= p;
                for j in k..=top {
                    let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                    if k != top - 1 {
                        pp += r * a[(k + 2, j)];
                        a[(k + 2, j)] -= pp * hz;
                    }
                    a[(k + 1, j)] -= pp * hy;
                    a[(k, j)] -= pp * hx;
                }
                let mmin = if top < k + 3 { top } else { k + 3 };
                for i in l..=mmin {
                    let mut pp = hx * a[(i, k)] + hy * a[(i, k + 1)];
                    if k != top - 1 {
                        pp += hz * a[(i, k + 2)];
                        a[(i, k + 2)] -= pp * r;
                    }
                    a[(i, k + 1)] -= pp * q;
                    a[(i, k)] -= pp;
                }
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Eigenvalue { re, im })
        .collect())
}

/// All eigenvalues of a real square matrix (Hessenberg reduction followed
/// by shifted QR). Fails with [`Error::NoConvergence`] after `100 n` QR
/// iterations.
pub fn eigenvalues(a: &Matrix) -> Result<Spectrum> {
    require_square(a)?;
    if !a.is_finite() {
        return Err(Error::NoConvergence);
    }
    let tolerance = ZERO_EIG_TOL * a.max_abs().max(1.0);
    let mut h = a.clone();
    hessenberg(&mut h);
    let values = hessenberg_qr(&mut h)?;
    Ok(Spectrum { values, tolerance })
}

/// Eigenvalues of a symmetric matrix in ascending order, by cyclic Jacobi
/// rotations.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    let n = require_square(a)?;
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    let mut m = a.symmetrized();
    let total: f64 = m.as_slice().iter().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= 1e-30 * total || off == 0.0 {
            let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
            eig.sort_by(f64::total_cmp);
            return Ok(eig);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = sign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0));
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    Err(Error::NoConvergence)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue(a: &Matrix) -> Result<f64> {
    Ok(symmetric_eigenvalues(a)?
        .first()
        .copied()
        .unwrap_or(f64::INFINITY))
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_symmetric_eigenvalue(a: &Matrix) -> Result<f64> {
    Ok(symmetric_eigenvalues(a)?
        .last()
        .copied()
        .unwrap_or(f64::NEG_INFINITY))
}

/// Cholesky test: true iff every pivot exceeds [`PIVOT_TOL`] (relative to
/// the larger of one and the largest entry).
pub fn is_positive_definite(a: &Matrix) -> Result<bool> {
    let n = require_square(a)?;
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    let threshold = PIVOT_TOL * a.max_abs().max(1.0);
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let d = a[(j, j)] - (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum::<f64>();
        if !(d > threshold) {
            return Ok(false);
        }
        let djj = sqrt(d);
        l[(j, j)] = djj;
        for i in j + 1..n {
            let s = a[(i, j)] - (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum::<f64>();
            l[(i, j)] = s / djj;
        }
    }
    Ok(true)
}

/// Largest singular value.
pub fn spectral_norm(a: &Matrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let gram = if a.rows() < a.cols() {
        a * &a.transpose()
    } else {
        &a.transpose() * a
    };
    // A Gram matrix is symmetric by construction; Jacobi never fails on it
    // short of nonfinite input.
    match max_symmetric_eigenvalue(&gram.symmetrized()) {
        Ok(l) => sqrt(l.max(0.0)),
        Err(_) => f64::NAN,
    }
}

/// Solves `P H + H^T P = I` for symmetric `P`.
///
/// `H` must be positive stable; otherwise the solution (if any) would not
/// certify anything and [`Error::NotPositiveStable`] is returned.
pub fn solve_lyapunov(h: &Matrix) -> Result<Matrix> {
    let n = require_square(h)?;
    let spectrum = eigenvalues(h)?;
    if spectrum.values.iter().any(|e| e.re <= POSITIVE_STABLE_TOL) {
        return Err(Error::NotPositiveStable);
    }
    let ht = h.transpose();
    let id = Matrix::identity(n);
    let system = &kron(&ht, &id) + &kron(&id, &ht);
    let rhs = vec_of(&id);
    let p = unvec(&solve_linear(&system, &rhs)?, n, n);
    Ok(p.symmetrized())
}

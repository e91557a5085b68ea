//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

pub type C64 = nalgebra::Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest entry modulus. All matrix residuals in this crate use this norm.
pub fn norm_max(a: &CMat) -> f64 {
    a.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn dist_max(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn product<'a>(n: usize, factors: impl IntoIterator<Item = &'a CMat>) -> CMat {
    factors.into_iter().fold(identity(n), |acc, f| acc * f)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Count of singular values above `rel * sigma_max`.
pub fn numerical_rank(a: &CMat, rel: f64) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > rel * smax).count(),
        _ => 0,
    }
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(a: &CMat) -> Vec<C64> {
    let schur = a.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Greedy nearest matching of two multisets; returns the largest pair distance.
pub fn multiset_deviation(found: &[C64], expected: &[C64]) -> f64 {
    if found.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; found.len()];
    let mut worst: f64 = 0.0;
    for e in expected {
        let (best, d) = found
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, f)| (k, (f - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        used[best] = true;
        worst = worst.max(d);
    }
    worst
}

/// Rank-one factorisation `a ≈ u·w` through the largest entry, with `|u| = 1`,
/// returned together with `sigma2/sigma1`.
pub fn rank_one_factor(a: &CMat) -> (CVec, CVec, f64) {
    let s = singular_values(a);
    let s1 = s.first().copied().unwrap_or(0.0);
    let s2 = s.get(1).copied().unwrap_or(0.0);
    let ratio = if s1 > 0.0 { s2 / s1 } else { f64::INFINITY };
    let (mut pi, mut pj, mut best) = (0, 0, -1.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if a[(i, j)].norm() > best {
                (pi, pj, best) = (i, j, a[(i, j)].norm());
            }
        }
    }
    let col = a.column(pj).into_owned();
    let norm = col.norm();
    if norm == 0.0 {
        return (CVec::zeros(a.nrows()), CVec::zeros(a.ncols()), ratio);
    }
    let u = col / C64::new(norm, 0.0);
    let scale = C64::new(norm, 0.0) / a[(pi, pj)];
    let w = DVector::from_iterator(a.ncols(), a.row(pi).iter().map(|z| z * scale));
    (u, w, ratio)
}

/// Dimension of `{A : [A, M] = 0 for all M}`.
pub fn commutant_dimension(mats: &[CMat], rel: f64) -> usize {
    let d = mats[0].nrows();
    let n = d * d;
    // vec(AM - MA) = (M^T ⊗ I - I ⊗ M) vec(A), column-major vec
    let mut sys = CMat::zeros(n * mats.len(), n);
    for (b, m) in mats.iter().enumerate() {
        for col in 0..d {
            for row in 0..d {
                let out = b * n + col * d + row;
                for k in 0..d {
                    // (AM)[row,col] = Σ_k A[row,k] M[k,col]
                    sys[(out, k * d + row)] += m[(k, col)];
                    // (MA)[row,col] = Σ_k M[row,k] A[k,col]
                    sys[(out, col * d + k)] -= m[(row, k)];
                }
            }
        }
    }
    let s = singular_values(&sys);
    let smax = s.first().copied().unwrap_or(0.0);
    let nonzero = s.iter().filter(|&&x| x > rel * smax.max(1e-300)).count();
    n - nonzero
}

pub fn try_inverse(a: &CMat) -> Option<CMat> {
    a.clone().try_inverse()
}

pub fn scale(a: &CMat, z: C64) -> CMat {
    a.map(|x| x * z)
}

/// Distance from a complex number to the nearest integer.
pub fn dist_to_integer(z: C64) -> f64 {
    C64::new(z.re - z.re.round(), z.im).norm()
}

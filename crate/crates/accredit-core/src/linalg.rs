//! Dense complex linear algebra helpers shared by the simulation modules.
//!
//! Everything here operates on small matrices (dimension `2^N` for `N` at
//! most around 9-12), so naive dense routines backed by `nalgebra` are exact
//! enough and fast enough. Matrix exponentials of Hermitian matrices go
//! through a spectral decomposition rather than any series expansion.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};
use num_traits::Float;
use rand::Rng;

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Dense, heap-allocated complex matrix.
pub type CMat = DMatrix<C64>;

/// `i` as a complex scalar.
pub const I_UNIT: C64 = C64::new(0.0, 1.0);

/// Largest elementwise absolute difference between two equal-sized matrices.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest elementwise absolute value.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `true` if `u` is unitary to elementwise tolerance `tol`.
pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    if !u.is_square() {
        return false;
    }
    let d = u.nrows();
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &CMat::identity(d, d)) <= tol
}

/// `true` if `m` is Hermitian to elementwise tolerance `tol`.
pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Kronecker product with the first operand on the most-significant side.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues (ascending) and the matrix whose columns are the
/// corresponding orthonormal eigenvectors, so `m = V diag(w) V†`.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    debug_assert!(is_hermitian(m, 1e-9), "hermitian_eigen: input not Hermitian");
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("eigenvalue is NaN")
    });
    let d = m.nrows();
    let mut vecs = CMat::zeros(d, d);
    let mut vals = Vec::with_capacity(d);
    for (dst, &src) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[src]);
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// `exp(-i H t)` for Hermitian `H`, via spectral decomposition.
pub fn evolution_operator(h: &CMat, t: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    apply_spectral_function(&vals, &vecs, |w| (-I_UNIT * (w * t)).exp())
}

/// `f(H) = V diag(f(w)) V†` from a precomputed spectral decomposition.
pub fn apply_spectral_function<F>(vals: &[f64], vecs: &CMat, f: F) -> CMat
where
    F: Fn(f64) -> C64,
{
    let d = vecs.nrows();
    let mut scaled = vecs.clone();
    for (k, &w) in vals.iter().enumerate() {
        let fw = f(w);
        for r in 0..d {
            scaled[(r, k)] *= fw;
        }
    }
    scaled * vecs.adjoint()
}

/// Inverse square root of a Hermitian positive-definite matrix.
pub fn hermitian_inv_sqrt(m: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    apply_spectral_function(&vals, &vecs, |w| {
        assert!(w > 0.0, "hermitian_inv_sqrt: non-positive eigenvalue {w}");
        C64::new(1.0 / Float::sqrt(w), 0.0)
    })
}

/// Haar-ish random unitary: QR of a complex Gaussian matrix via modified
/// Gram-Schmidt. Good enough for fixture generation; no distributional
/// guarantees are relied upon.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMat {
    let g = random_gaussian_matrix(rng, dim, dim);
    let mut q = g;
    for j in 0..dim {
        for k in 0..j {
            let proj: C64 = (0..dim).map(|r| q[(r, k)].conj() * q[(r, j)]).sum();
            for r in 0..dim {
                let sub = proj * q[(r, k)];
                q[(r, j)] -= sub;
            }
        }
        let norm: f64 = Float::sqrt((0..dim).map(|r| q[(r, j)].norm_sqr()).sum::<f64>());
        assert!(norm > 1e-12, "random_unitary: degenerate column");
        for r in 0..dim {
            q[(r, j)] /= C64::new(norm, 0.0);
        }
    }
    q
}

/// Matrix of i.i.d. standard complex Gaussians (Box-Muller).
pub fn random_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random::<f64>();
        let r = Float::sqrt(-2.0 * Float::ln(u1));
        let ang = 2.0 * core::f64::consts::PI * u2;
        C64::new(r * Float::cos(ang), r * Float::sin(ang))
    })
}

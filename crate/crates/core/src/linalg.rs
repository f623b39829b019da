//! Small dense complex linear algebra used throughout the crate.
//!
//! Everything here works on `DMatrix<Complex64>` of dimension at most a few
//! dozen, so clarity wins over blocking or allocation tricks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// Spectral norm of a Hermitian matrix, as its largest eigenvalue modulus.
///
/// Much cheaper than [`spectral_norm`]; the caller vouches for hermiticity.
pub fn hermitian_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l.abs()))
}

/// Largest dimension for which [`hermitian_norm_bound`] is exact.
pub const EXACT_NORM_MAX_DIM: usize = 64;

/// Upper bound on the spectral norm of a Hermitian matrix: exact up to
/// [`EXACT_NORM_MAX_DIM`], the largest absolute row sum beyond.
pub fn hermitian_norm_bound(m: &CMatrix) -> f64 {
    if m.nrows() <= EXACT_NORM_MAX_DIM {
        return hermitian_norm(m);
    }
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Spectral norm through the eigenvalues of the Hermitian product `A†A`.
///
/// This is a second numerical route that shares no code with the SVD path.
pub fn spectral_norm_via_eigen(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .fold(0.0_f64, |acc, &l| acc.max(l))
        .max(0.0)
        .sqrt()
}

/// Largest element modulus.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    spectral_norm(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && hermiticity_residual(m) <= tol * spectral_norm(m).max(1.0)
}

pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    spectral_norm(&(m.adjoint() * m - identity(n)))
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && unitarity_residual(m) <= tol
}

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The matrix is scaled so that its 1-norm is below 1/2, where 20 Taylor
/// terms are accurate to well below double precision, then squared back.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scale = 0.5_f64.powi(squarings as i32);
    let scaled = a * Complex64::from(scale);

    let mut result = identity(n);
    let mut term = identity(n);
    for j in 1..=20 {
        term = &term * &scaled * Complex64::from(1.0 / j as f64);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `exp(-i H t)` for Hermitian `H` through its eigendecomposition.
pub fn hermitian_evolution(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&CVector::from_iterator(
        h.nrows(),
        eig.eigenvalues.iter().map(|&l| (-I * l * t).exp()),
    ));
    v * phases * v.adjoint()
}

/// Pauli matrices.
pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn hadamard() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
}

/// 2×2 unitaries in row-major order, used by the one-sparse executor.
pub type Mat2 = [[Complex64; 2]; 2];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `R_z(θ) = diag(e^{-iθ/2}, e^{iθ/2})`.
pub fn rz(theta: f64) -> Mat2 {
    let z = Complex64::new(0.0, 0.0);
    [[(-I * theta / 2.0).exp(), z], [z, (I * theta / 2.0).exp()]]
}

/// `R_y(θ) = exp(-iθY/2)`.
pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

/// `R_x(θ) = exp(-iθX/2)`.
pub fn rx(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

pub fn mat2_to_dense(m: &Mat2) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian<R: rand::Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    (&a + a.adjoint()) * Complex64::from(0.5)
}

/// Haar-ish random unitary from the QR factorisation of a Gaussian-like matrix.
pub fn random_unitary<R: rand::Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let h = random_hermitian(dim, rng);
    hermitian_evolution(&h, rng.gen_range(0.5..3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn expm_agrees_with_eigen_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let h = random_hermitian(4, &mut rng) * Complex64::from(3.0);
            let t = rng.gen_range(-2.0..2.0);
            let a = expm(&(&h * (-I * t)));
            let b = hermitian_evolution(&h, t);
            assert!(spectral_norm(&(a - b)) < 1e-12);
        }
    }

    #[test]
    fn norms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_hermitian(5, &mut rng) + random_unitary(5, &mut rng);
            let a = spectral_norm(&m);
            let b = spectral_norm_via_eigen(&m);
            assert!((a - b).abs() < 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn rotations_are_unitary() {
        for theta in [0.3, -1.2, 2.9] {
            for g in [rz(theta), ry(theta), rx(theta)] {
                assert!(is_unitary(&mat2_to_dense(&g), 1e-14));
            }
        }
    }
}

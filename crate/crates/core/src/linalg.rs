//! Small dense complex matrices.

use alloc::vec::Vec;

use nalgebra::DMatrix;
pub use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds an `n x n` matrix from rows of complex entries.
pub fn cmat(rows: &[&[Complex64]]) -> CMat {
    let r = rows.len();
    let cl = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, cl, |i, j| rows[i][j])
}

pub fn real_mat(rows: &[&[f64]]) -> CMat {
    let r = rows.len();
    let cl = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, cl, |i, j| c(rows[i][j], 0.0))
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn frobenius(m: &CMat) -> f64 {
    libm::sqrt(m.iter().map(|z| z.norm_sqr()).sum())
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// `max || M M^dag - I ||_F`, zero for unitaries.
pub fn unitarity_defect(m: &CMat) -> f64 {
    frobenius(&(m * m.adjoint() - identity(m.nrows())))
}

/// Eigen-decomposition of a normal matrix through its complex Schur form.
/// Returns eigenvalues and the unitary whose columns are eigenvectors.
pub fn normal_eigen(m: &CMat) -> (Vec<Complex64>, CMat) {
    let schur = nalgebra::linalg::Schur::new(m.clone());
    let (q, t) = schur.unpack();
    let vals = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    (vals, q)
}

/// Principal eigenphases in (-pi, pi], sorted ascending.
pub fn eigenphases(m: &CMat) -> Vec<f64> {
    let (vals, _) = normal_eigen(m);
    let mut ph: Vec<f64> = vals.iter().map(|z| principal(z.arg())).collect();
    ph.sort_by(|a, b| a.partial_cmp(b).expect("finite phases"));
    ph
}

/// Maps an angle into (-pi, pi].
pub fn principal(x: f64) -> f64 {
    let pi = core::f64::consts::PI;
    let mut y = x % (2.0 * pi);
    if y <= -pi {
        y += 2.0 * pi;
    } else if y > pi {
        y -= 2.0 * pi;
    }
    y
}

/// Determinant of a small complex matrix.
pub fn det(m: &CMat) -> Complex64 {
    m.clone().determinant()
}

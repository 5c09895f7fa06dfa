use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix carrier for the Clifford, clock-shift and operator
/// kernels.
pub type CMatrix = DMatrix<Complex64>;

/// Largest entry modulus; zero for an empty matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

//! Small dense complex linear algebra helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Random unitary from the QR factor of a random matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    random_matrix(d, d, rng).qr().q()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `‖U*U − 1‖_max`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let id = CMatrix::identity(u.nrows(), u.ncols());
    max_abs_diff(&(u.adjoint() * u), &id)
}

/// Permutation matrix with `(P v)(p) = v(π(p))`.
pub fn permutation_matrix(pi: &[usize]) -> CMatrix {
    let n = pi.len();
    let mut m = CMatrix::zeros(n, n);
    for (p, &q) in pi.iter().enumerate() {
        m[(p, q)] = c(1.0, 0.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn norms() {
        let id = CMatrix::identity(4, 4);
        assert!((operator_norm(&id) - 1.0).abs() < 1e-14);
        let m = CMatrix::from_diagonal_element(3, 3, c(0.0, 2.0));
        assert!((operator_norm(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(5, &mut rng);
        assert!(unitarity_defect(&u) < 1e-12);
        assert!((operator_norm(&u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_action() {
        let p = permutation_matrix(&[1, 2, 0]);
        let v = nalgebra::DVector::from_vec(vec![c(10.0, 0.0), c(20.0, 0.0), c(30.0, 0.0)]);
        let w = &p * v;
        assert_eq!(w[0], c(20.0, 0.0));
        assert_eq!(w[2], c(10.0, 0.0));
    }
}

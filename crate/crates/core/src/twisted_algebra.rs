//! Twisted group algebras `C_σ[G]` with scalar multiplier, and the
//! octonions as the real twisted group algebra of `(Z/2)³`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cochain::{Cochain2, Phase};
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::linalg::{self, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarField {
    Real,
    Complex,
}

#[derive(Clone, Debug)]
pub struct TwistedGroupAlgebra(Arc<Inner>);

#[derive(Debug)]
struct Inner {
    sigma: Cochain2,
    field: ScalarField,
    /// `e^{2πiσ(a,b)}`, row-major.
    weights: Vec<Complex64>,
}

impl PartialEq for TwistedGroupAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.field == other.0.field && self.0.sigma == other.0.sigma)
    }
}

#[derive(Clone, Debug)]
pub struct TGAElement {
    algebra: TwistedGroupAlgebra,
    coeffs: Vec<Complex64>,
}

impl TwistedGroupAlgebra {
    /// Over the reals the multiplier must be `±1`-valued.
    pub fn new(sigma: Cochain2, field: ScalarField) -> Result<Self> {
        if field == ScalarField::Real && sigma.denominator() > 2 {
            return Err(Error::InvalidAction(
                "a real twisted group algebra needs a multiplier with values in {0, 1/2}".into(),
            ));
        }
        let weights = sigma.values().iter().map(Phase::to_complex).collect();
        Ok(TwistedGroupAlgebra(Arc::new(Inner { sigma, field, weights })))
    }

    pub fn octonions() -> Self {
        Self::new(octonion_multiplier(), ScalarField::Real).expect("values in {0, 1/2}")
    }

    pub fn sigma(&self) -> &Cochain2 {
        &self.0.sigma
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.0.sigma.group()
    }

    pub fn field(&self) -> ScalarField {
        self.0.field
    }

    pub fn dim(&self) -> usize {
        self.group().order()
    }

    #[inline]
    fn weight(&self, a: usize, b: usize) -> Complex64 {
        self.0.weights[a * self.dim() + b]
    }

    pub fn zero(&self) -> TGAElement {
        TGAElement {
            algebra: self.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); self.dim()],
        }
    }

    pub fn one(&self) -> TGAElement {
        self.basis(0)
    }

    /// The basis vector `e(a)`.
    pub fn basis(&self, a: usize) -> TGAElement {
        let mut e = self.zero();
        e.coeffs[a] = Complex64::new(1.0, 0.0);
        e
    }

    pub fn element(&self, coeffs: Vec<Complex64>) -> Result<TGAElement> {
        if coeffs.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                coeffs.len()
            )));
        }
        if self.field() == ScalarField::Real && coeffs.iter().any(|z| z.im != 0.0) {
            return Err(Error::Dimension("real algebra given complex coefficients".into()));
        }
        Ok(TGAElement {
            algebra: self.clone(),
            coeffs,
        })
    }

    pub fn from_real(&self, coeffs: &[f64]) -> Result<TGAElement> {
        self.element(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> TGAElement {
        let coeffs = (0..self.dim())
            .map(|_| match self.field() {
                ScalarField::Real => Complex64::new(rng.random_range(-1.0..1.0), 0.0),
                ScalarField::Complex => linalg::random_complex(rng),
            })
            .collect();
        TGAElement {
            algebra: self.clone(),
            coeffs,
        }
    }

    fn check(&self, x: &TGAElement) -> Result<()> {
        if x.algebra != *self {
            return Err(Error::ParentMismatch("element belongs to a different twisted group algebra".into()));
        }
        Ok(())
    }

    /// `(a·b)(s) = Σ_t a(t) b(s−t) e^{2πiσ(t,s−t)}`.
    pub fn multiply(&self, a: &TGAElement, b: &TGAElement) -> Result<TGAElement> {
        self.check(a)?;
        self.check(b)?;
        let g = self.group();
        let mut out = self.zero();
        for (t, &at) in a.coeffs.iter().enumerate() {
            if at == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (r, &br) in b.coeffs.iter().enumerate() {
                out.coeffs[g.add(t, r)] += at * br * self.weight(t, r);
            }
        }
        Ok(out)
    }

    /// Sign-and-index form of `e(a)e(b) = e^{2πiσ(a,b)} e(a+b)`.
    pub fn basis_product(&self, a: usize, b: usize) -> (Phase, usize) {
        (self.sigma().get(a, b), self.group().add(a, b))
    }

    /// The phase `φ` with `e(a)(e(b)e(c)) = e^{2πiφ}(e(a)e(b))e(c)`.
    pub fn associator_phase(&self, a: usize, b: usize, c: usize) -> Phase {
        let g = self.group();
        let s = self.sigma();
        s.get(b, c) + s.get(a, g.add(b, c)) - s.get(a, b) - s.get(g.add(a, b), c)
    }

    /// `a*(x) = e^{−2πiσ(x,−x)} conj(a(−x))`.
    pub fn involution(&self, a: &TGAElement) -> Result<TGAElement> {
        self.check(a)?;
        let g = self.group();
        let mut out = self.zero();
        for x in 0..self.dim() {
            let mx = g.neg(x);
            out.coeffs[x] = self.weight(x, mx).conj() * a.coeffs[mx].conj();
        }
        Ok(out)
    }

    /// Matrix of `y ↦ a·y` in the basis `e(0), e(1), …`.
    pub fn left_regular_matrix(&self, a: &TGAElement) -> Result<CMatrix> {
        self.check(a)?;
        let g = self.group();
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for t in 0..n {
            for r in 0..n {
                m[(g.add(t, r), r)] += a.coeffs[t] * self.weight(t, r);
            }
        }
        Ok(m)
    }

    pub fn operator_norm(&self, a: &TGAElement) -> Result<f64> {
        Ok(linalg::operator_norm(&self.left_regular_matrix(a)?))
    }
}

impl TGAElement {
    pub fn algebra(&self) -> &TwistedGroupAlgebra {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Sum of squared moduli of the coefficients.
    pub fn norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_diff(&self, other: &TGAElement) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, k: Complex64) -> TGAElement {
        TGAElement {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.iter().map(|z| z * k).collect(),
        }
    }

    pub fn add(&self, other: &TGAElement) -> Result<TGAElement> {
        self.algebra.check(other)?;
        Ok(TGAElement {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn mul(&self, other: &TGAElement) -> Result<TGAElement> {
        self.algebra.multiply(self, other)
    }
}

/// `σ(a,b) = ½(Σ_{i≤j} a_i b_j + a₁a₂b₃ + a₃a₁b₂ + a₂a₃b₁)` on `(Z/2)³`.
///
/// The diagonal terms `a_i b_i` make every imaginary unit square to `−1`;
/// the cubic terms carry the associator.
pub fn octonion_multiplier() -> Cochain2 {
    let g = FiniteAbelianGroup::elementary_abelian(3);
    let gg = g.clone();
    Cochain2::from_fn(&g, move |x, y| {
        let a = gg.coords(x);
        let b = gg.coords(y);
        let mut e = 0;
        for i in 0..3 {
            for j in i..3 {
                e += a[i] * b[j];
            }
        }
        e += a[0] * a[1] * b[2] + a[2] * a[0] * b[1] + a[1] * a[2] * b[0];
        Phase::new(e as i64, 2)
    })
    .expect("vanishes when either argument is zero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::Tricharacter;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn idx(v: [u32; 3]) -> usize {
        FiniteAbelianGroup::elementary_abelian(3).index_of(&v).unwrap()
    }

    #[test]
    fn unit_is_neutral() {
        let o = TwistedGroupAlgebra::octonions();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = o.random(&mut rng);
        assert!(o.one().mul(&x).unwrap().max_diff(&x) < 1e-15);
        assert!(x.mul(&o.one()).unwrap().max_diff(&x) < 1e-15);
    }

    #[test]
    fn octonion_basis_products() {
        let o = TwistedGroupAlgebra::octonions();
        assert_eq!(o.dim(), 8);
        let p = o.basis(idx([1, 0, 0])).mul(&o.basis(idx([0, 1, 0]))).unwrap();
        assert!(p.max_diff(&o.basis(idx([1, 1, 0])).scale(Complex64::new(-1.0, 0.0))) < 1e-15);
        for a in 1..8 {
            let sq = o.basis(a).mul(&o.basis(a)).unwrap();
            assert!(sq.max_diff(&o.one().scale(Complex64::new(-1.0, 0.0))) < 1e-15, "e({a})² ≠ −1");
        }
    }

    #[test]
    fn octonion_associator_is_triple_product() {
        let o = TwistedGroupAlgebra::octonions();
        let phi = Tricharacter::octonion();
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    assert_eq!(o.associator_phase(a, b, c), phi.eval(a, b, c));
                }
            }
        }
        assert_eq!(o.associator_phase(idx([1, 0, 0]), idx([0, 1, 0]), idx([0, 0, 1])), Phase::HALF);
        assert_eq!(o.associator_phase(idx([1, 0, 0]), idx([0, 1, 0]), idx([1, 1, 0])), Phase::ZERO);
        assert_eq!(o.associator_phase(0, 5, 6), Phase::ZERO);
    }

    #[test]
    fn associator_is_coboundary_of_multiplier() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for factors in [&[2, 2][..], &[4], &[3, 3], &[2, 2, 2], &[4, 4]] {
            let g = FiniteAbelianGroup::new(factors).unwrap();
            let a = TwistedGroupAlgebra::new(Cochain2::random(&g, 12, &mut rng), ScalarField::Complex).unwrap();
            let d = a.sigma().coboundary();
            for x in 0..g.order() {
                for y in 0..g.order() {
                    for z in 0..g.order() {
                        assert_eq!(a.associator_phase(x, y, z), d.get(x, y, z));
                    }
                }
            }
        }
    }

    #[test]
    fn bicharacter_twist_is_associative() {
        let g = FiniteAbelianGroup::new(&[4, 4]).unwrap();
        let s = Cochain2::bicharacter(&g, &[vec![0, 1], vec![0, 0]], 4).unwrap();
        let a = TwistedGroupAlgebra::new(s, ScalarField::Complex).unwrap();
        for x in 0..16 {
            for y in 0..16 {
                for z in 0..16 {
                    let (ex, ey, ez) = (a.basis(x), a.basis(y), a.basis(z));
                    let l = ex.mul(&ey.mul(&ez).unwrap()).unwrap();
                    let r = ex.mul(&ey).unwrap().mul(&ez).unwrap();
                    assert!(l.max_diff(&r) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn octonion_involution() {
        let o = TwistedGroupAlgebra::octonions();
        assert!(o.involution(&o.one()).unwrap().max_diff(&o.one()) < 1e-15);
        for a in 1..8 {
            let conj = o.involution(&o.basis(a)).unwrap();
            assert!(conj.max_diff(&o.basis(a).scale(Complex64::new(-1.0, 0.0))) < 1e-15);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let x = o.random(&mut rng);
            let back = o.involution(&o.involution(&x).unwrap()).unwrap();
            assert!(back.max_diff(&x) < 1e-12);
        }
        for a in 0..8 {
            for b in 0..8 {
                let (x, y) = (o.basis(a), o.basis(b));
                let lhs = o.involution(&x.mul(&y).unwrap()).unwrap();
                let rhs = o.involution(&y).unwrap().mul(&o.involution(&x).unwrap()).unwrap();
                assert!(lhs.max_diff(&rhs) < 1e-15);
            }
        }
    }

    #[test]
    fn regular_representation_norms() {
        let o = TwistedGroupAlgebra::octonions();
        let id = o.left_regular_matrix(&o.one()).unwrap();
        assert_eq!(id, CMatrix::identity(8, 8));
        for a in 1..8 {
            assert!((o.operator_norm(&o.basis(a)).unwrap() - 1.0).abs() < 1e-12);
        }
        let x = o.one().add(&o.basis(idx([1, 0, 0]))).unwrap();
        assert!((o.operator_norm(&x).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn composition_and_alternativity() {
        let o = TwistedGroupAlgebra::octonions();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let x = o.random(&mut rng);
            let y = o.random(&mut rng);
            let n = x.mul(&y).unwrap().norm_squared();
            assert!((n - x.norm_squared() * y.norm_squared()).abs() < 1e-12 * n.max(1.0));
            let xx = x.mul(&x).unwrap();
            assert!(x.mul(&x.mul(&y).unwrap()).unwrap().max_diff(&xx.mul(&y).unwrap()) < 1e-12);
            assert!(y.mul(&x).unwrap().mul(&x).unwrap().max_diff(&y.mul(&xx).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn errors() {
        let o = TwistedGroupAlgebra::octonions();
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let other = TwistedGroupAlgebra::new(Cochain2::zero(&g), ScalarField::Complex).unwrap();
        assert!(matches!(o.multiply(&o.one(), &other.one()), Err(Error::ParentMismatch(_))));
        assert!(o.element(vec![Complex64::new(0.0, 1.0); 8]).is_err());
        assert!(o.from_real(&[1.0; 3]).is_err());
        let quarter = Cochain2::bicharacter(&g, &[vec![1]], 4).unwrap();
        assert!(TwistedGroupAlgebra::new(quarter, ScalarField::Real).is_err());
    }
}

//! Kernels on `G × G` with a phase-twisted composition, the translation
//! action `γ` on them, and its associativity cocycle.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::cochain::{Cochain3, KernelTwist, Phase};
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::linalg::{self, CMatrix};

/// A `|G| × |G|` table of `b × b` blocks (`b = 1` for scalar kernels).
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedKernel {
    group: FiniteAbelianGroup,
    block: usize,
    entries: Vec<CMatrix>,
}

impl TwistedKernel {
    pub fn zero(group: &FiniteAbelianGroup, block: usize) -> Self {
        let n = group.order();
        TwistedKernel {
            group: group.clone(),
            block,
            entries: vec![CMatrix::zeros(block, block); n * n],
        }
    }

    /// The kernel `δ_{x,z}·1`.
    pub fn identity(group: &FiniteAbelianGroup, block: usize) -> Self {
        let mut k = Self::zero(group, block);
        for x in 0..group.order() {
            *k.get_mut(x, x) = CMatrix::identity(block, block);
        }
        k
    }

    pub fn from_fn(group: &FiniteAbelianGroup, block: usize, mut f: impl FnMut(usize, usize) -> CMatrix) -> Result<Self> {
        let n = group.order();
        let mut entries = Vec::with_capacity(n * n);
        for x in 0..n {
            for z in 0..n {
                let e = f(x, z);
                if e.shape() != (block, block) {
                    return Err(Error::Dimension(format!(
                        "kernel entry ({x},{z}) has shape {:?}, expected {block}×{block}",
                        e.shape()
                    )));
                }
                entries.push(e);
            }
        }
        Ok(TwistedKernel {
            group: group.clone(),
            block,
            entries,
        })
    }

    pub fn from_scalars(group: &FiniteAbelianGroup, values: &[Complex64]) -> Result<Self> {
        let n = group.order();
        if values.len() != n * n {
            return Err(Error::TableSize {
                expected: n * n,
                got: values.len(),
            });
        }
        Self::from_fn(group, 1, |x, z| CMatrix::from_element(1, 1, values[x * n + z]))
    }

    pub fn random<R: Rng + ?Sized>(group: &FiniteAbelianGroup, block: usize, rng: &mut R) -> Self {
        Self::from_fn(group, block, |_, _| linalg::random_matrix(block, block, rng)).expect("shapes match")
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn block(&self) -> usize {
        self.block
    }

    #[inline]
    pub fn get(&self, x: usize, z: usize) -> &CMatrix {
        &self.entries[x * self.group.order() + z]
    }

    #[inline]
    pub fn get_mut(&mut self, x: usize, z: usize) -> &mut CMatrix {
        let n = self.group.order();
        &mut self.entries[x * n + z]
    }

    /// Scalar entry of a `b = 1` kernel.
    pub fn scalar(&self, x: usize, z: usize) -> Complex64 {
        self.get(x, z)[(0, 0)]
    }

    fn compatible(&self, other: &TwistedKernel) -> Result<()> {
        if self.group != other.group {
            return Err(Error::IncompatibleGroups {
                left: self.group.factors().to_vec(),
                right: other.group.factors().to_vec(),
            });
        }
        if self.block != other.block {
            return Err(Error::Dimension(format!(
                "block sizes {} and {} differ",
                self.block, other.block
            )));
        }
        Ok(())
    }

    /// The `|G|·b`-square matrix with block `(x,z)` equal to `K(x,z)`.
    pub fn to_matrix(&self) -> CMatrix {
        let n = self.group.order();
        let b = self.block;
        let mut m = CMatrix::zeros(n * b, n * b);
        for x in 0..n {
            for z in 0..n {
                m.view_mut((x * b, z * b), (b, b)).copy_from(self.get(x, z));
            }
        }
        m
    }

    pub fn from_matrix(group: &FiniteAbelianGroup, block: usize, m: &CMatrix) -> Result<Self> {
        let n = group.order();
        if m.shape() != (n * block, n * block) {
            return Err(Error::Dimension(format!(
                "matrix of shape {:?} does not tile into {n}×{n} blocks of size {block}",
                m.shape()
            )));
        }
        Self::from_fn(group, block, |x, z| m.view((x * block, z * block), (block, block)).into_owned())
    }

    pub fn operator_norm(&self) -> f64 {
        linalg::operator_norm(&self.to_matrix())
    }

    pub fn max_diff(&self, other: &TwistedKernel) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    pub fn map_entries(&self, mut f: impl FnMut(usize, usize, &CMatrix) -> CMatrix) -> TwistedKernel {
        let n = self.group.order();
        let entries = (0..n * n).map(|i| f(i / n, i % n, &self.entries[i])).collect();
        TwistedKernel {
            group: self.group.clone(),
            block: self.block,
            entries,
        }
    }

    /// `K(x,z) ↦ K(−x,−z)`.
    pub fn reflect(&self) -> TwistedKernel {
        let g = &self.group;
        self.map_entries(|x, z, _| self.get(g.neg(x), g.neg(z)).clone())
    }

    pub fn add(&self, other: &TwistedKernel) -> Result<TwistedKernel> {
        self.compatible(other)?;
        Ok(self.map_entries(|x, z, a| a + other.get(x, z)))
    }

    pub fn scale(&self, k: Complex64) -> TwistedKernel {
        self.map_entries(|_, _, a| a * k)
    }

    /// Kernel supported on `H × H` only.
    pub fn restricted_to(&self, subgroup: &[usize]) -> TwistedKernel {
        let mut member = vec![false; self.group.order()];
        for &h in subgroup {
            member[h] = true;
        }
        self.map_entries(|x, z, a| {
            if member[x] && member[z] {
                a.clone()
            } else {
                CMatrix::zeros(a.nrows(), a.ncols())
            }
        })
    }
}

/// `(K₁⋆K₂)(x,z) = Σ_y w(x,y,z) K₁(x,y) K₂(y,z)`.
pub fn kernel_product(k1: &TwistedKernel, k2: &TwistedKernel, twist: &KernelTwist) -> Result<TwistedKernel> {
    k1.compatible(k2)?;
    if twist.group() != &k1.group {
        return Err(Error::IncompatibleGroups {
            left: k1.group.factors().to_vec(),
            right: twist.group().factors().to_vec(),
        });
    }
    let n = k1.group.order();
    let b = k1.block;
    let entries: Vec<CMatrix> = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let (x, z) = (i / n, i % n);
            let mut acc = CMatrix::zeros(b, b);
            for y in 0..n {
                acc += (k1.get(x, y) * k2.get(y, z)) * twist.value(x, y, z);
            }
            acc
        })
        .collect();
    Ok(TwistedKernel {
        group: k1.group.clone(),
        block: b,
        entries,
    })
}

/// `γ_ξ[K](η,ζ) = e^{−2πiφ(ξ,η,ζ)} K(η−ξ, ζ−ξ)`.
pub fn gamma_action(xi: usize, k: &TwistedKernel, phi: &Cochain3) -> TwistedKernel {
    let g = k.group();
    k.map_entries(|eta, zeta, _| k.get(g.sub(eta, xi), g.sub(zeta, xi)) * (-phi.get(xi, eta, zeta)).to_complex())
}

/// Diagonal entries `e^{2πiφ(ω,ξ,·)}` of the multiplier of `γ`.
pub fn gamma_multiplier(omega: usize, xi: usize, phi: &Cochain3) -> Vec<Phase> {
    (0..phi.group().order()).map(|p| phi.get(omega, xi, p)).collect()
}

/// `(ad(u) K)(η,ζ) = u(η) K(η,ζ) conj(u(ζ))` for a diagonal unitary `u`.
pub fn ad_diagonal(u: &[Phase], k: &TwistedKernel) -> TwistedKernel {
    k.map_entries(|eta, zeta, a| a * (u[eta] - u[zeta]).to_complex())
}

/// Exact check of `γ_ω∘γ_ξ = ad(u(ω,ξ))∘γ_{ω+ξ}` on phases. Returns the
/// first `(ω, ξ, η, ζ)` where the two sides weight `K` differently.
pub fn gamma_relation_witness(phi: &Cochain3) -> Option<[usize; 4]> {
    let g = phi.group();
    let n = g.order();
    (0..n).into_par_iter().find_map_first(|om| {
        for xi in 0..n {
            let s = g.add(om, xi);
            for eta in 0..n {
                for zeta in 0..n {
                    let lhs = -phi.get(om, eta, zeta) - phi.get(xi, g.sub(eta, om), g.sub(zeta, om));
                    let rhs = phi.get(om, xi, eta) - phi.get(om, xi, zeta) - phi.get(s, eta, zeta);
                    if lhs != rhs {
                        return Some([om, xi, eta, zeta]);
                    }
                }
            }
        }
        None
    })
}

/// The central phase `u(ξ,η)u(ξ+η,ζ)u(ξ,η+ζ)⁻¹γ_ξ[u(η,ζ)]⁻¹`, which must
/// not depend on the diagonal slot.
pub fn associativity_cocycle(xi: usize, eta: usize, zeta: usize, phi: &Cochain3) -> Result<Phase> {
    let g = phi.group();
    let den = phi.denominator() as i64;
    let (xe, ez) = (g.add(xi, eta), g.add(eta, zeta));
    let at = |p: usize| {
        let gamma_u = phi.raw(eta, zeta, g.sub(p, xi)) as i64 - phi.raw(xi, p, p) as i64;
        (phi.raw(xi, eta, p) as i64 + phi.raw(xe, zeta, p) as i64 - phi.raw(xi, ez, p) as i64 - gamma_u).rem_euclid(den)
    };
    let first = at(0);
    for p in 1..g.order() {
        if at(p) != first {
            return Err(Error::NonConstantCocycle {
                triple: [xi, eta, zeta],
                points: [0, p],
            });
        }
    }
    Ok(Phase::new(first, den as u64))
}

/// [`associativity_cocycle`] on every triple, row-major.
pub fn associativity_cocycle_table(phi: &Cochain3) -> Result<Vec<Phase>> {
    let n = phi.group().order();
    (0..n * n * n)
        .into_par_iter()
        .map(|i| associativity_cocycle(i / (n * n), (i / n) % n, i % n, phi))
        .collect()
}

/// First triple where the associativity cocycle differs from `φ(η,ζ,ξ)`.
pub fn associativity_cocycle_mismatch(phi: &Cochain3) -> Result<Option<[usize; 3]>> {
    let n = phi.group().order();
    let table = associativity_cocycle_table(phi)?;
    Ok(table.iter().enumerate().find_map(|(i, v)| {
        let (xi, eta, zeta) = (i / (n * n), (i / n) % n, i % n);
        (*v != phi.get(eta, zeta, xi)).then_some([xi, eta, zeta])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::Tricharacter;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn octonion_phi() -> Cochain3 {
        Tricharacter::octonion().to_cochain3()
    }

    #[test]
    fn untwisted_is_matrix_product() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = TwistedKernel::random(&g, 1, &mut rng);
        let b = TwistedKernel::random(&g, 1, &mut rng);
        let p = kernel_product(&a, &b, &KernelTwist::pointwise(&Cochain3::zero(&g))).unwrap();
        assert!(linalg::max_abs_diff(&p.to_matrix(), &(a.to_matrix() * b.to_matrix())) < 1e-14);
    }

    #[test]
    fn identity_kernel_is_unit() {
        let phi = octonion_phi();
        let g = phi.group().clone();
        let tw = KernelTwist::pointwise(&phi);
        let id = TwistedKernel::identity(&g, 1);
        assert!(kernel_product(&id, &id, &tw).unwrap().max_diff(&id) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = TwistedKernel::random(&g, 2, &mut rng);
        let id2 = TwistedKernel::identity(&g, 2);
        assert!(kernel_product(&id2, &k, &tw).unwrap().max_diff(&k) < 1e-14);
        assert!(kernel_product(&k, &id2, &tw).unwrap().max_diff(&k) < 1e-14);
    }

    #[test]
    fn octonion_twist_is_nonassociative() {
        let phi = octonion_phi();
        let g = phi.group().clone();
        let tw = KernelTwist::pointwise(&phi);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k: Vec<_> = (0..3).map(|_| TwistedKernel::random(&g, 1, &mut rng)).collect();
        let l = kernel_product(&kernel_product(&k[0], &k[1], &tw).unwrap(), &k[2], &tw).unwrap();
        let r = kernel_product(&k[0], &kernel_product(&k[1], &k[2], &tw).unwrap(), &tw).unwrap();
        assert!(l.max_diff(&r) > 1e-2);
    }

    #[test]
    fn trivializing_subgroup_gives_associative_product() {
        let phi = octonion_phi();
        let g = phi.group().clone();
        let gens = [g.index_of(&[1, 0, 0]).unwrap(), g.index_of(&[0, 1, 0]).unwrap()];
        let h = g.generated_subgroup(&gens);
        assert!(phi.is_trivial_on(&gens).unwrap());
        let tw = KernelTwist::pointwise(&phi);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k: Vec<_> = (0..3).map(|_| TwistedKernel::random(&g, 1, &mut rng).restricted_to(&h)).collect();
        let l = kernel_product(&kernel_product(&k[0], &k[1], &tw).unwrap(), &k[2], &tw).unwrap();
        let r = kernel_product(&k[0], &kernel_product(&k[1], &k[2], &tw).unwrap(), &tw).unwrap();
        assert!(l.max_diff(&r) < 1e-13);
    }

    #[test]
    fn gamma_basics() {
        let phi = octonion_phi();
        let g = phi.group().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = TwistedKernel::random(&g, 1, &mut rng);
        assert_eq!(gamma_action(0, &k, &phi), k);
        let zero = Cochain3::zero(&g);
        let t = gamma_action(3, &k, &zero);
        for x in 0..8 {
            for z in 0..8 {
                assert_eq!(t.get(x, z), k.get(g.sub(x, 3), g.sub(z, 3)));
            }
        }
    }

    #[test]
    fn gamma_is_twisted_action() {
        let phi = octonion_phi();
        let g = phi.group().clone();
        assert_eq!(gamma_relation_witness(&phi), None);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let k = TwistedKernel::random(&g, 1, &mut rng);
        for om in 0..8 {
            for xi in 0..8 {
                let lhs = gamma_action(om, &gamma_action(xi, &k, &phi), &phi);
                let u = gamma_multiplier(om, xi, &phi);
                let rhs = ad_diagonal(&u, &gamma_action(g.add(om, xi), &k, &phi));
                assert!(lhs.max_diff(&rhs) < 1e-13);
            }
        }
    }

    #[test]
    fn associativity_cocycle_matches_cyclic_phi() {
        let phi = octonion_phi();
        assert_eq!(associativity_cocycle_mismatch(&phi).unwrap(), None);
        let g = phi.group();
        let e = |v: &[u32]| g.index_of(v).unwrap();
        assert_eq!(associativity_cocycle(e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1]), &phi).unwrap(), Phase::HALF);
        let zero = Cochain3::zero(g);
        assert!(associativity_cocycle_table(&zero).unwrap().iter().all(Phase::is_zero));
    }

    #[test]
    fn non_tricharacter_gives_nonconstant_cocycle() {
        let g = FiniteAbelianGroup::new(&[2]).unwrap();
        let phi = Cochain3::from_fn(&g, |a, b, c| Phase::new((a * b * c) as i64, 2)).unwrap();
        assert!(matches!(associativity_cocycle_table(&phi), Err(Error::NonConstantCocycle { .. })));
    }

    #[test]
    fn flatten_round_trip_and_reflection() {
        let g = FiniteAbelianGroup::new(&[2, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let k = TwistedKernel::random(&g, 2, &mut rng);
        let back = TwistedKernel::from_matrix(&g, 2, &k.to_matrix()).unwrap();
        assert_eq!(back, k);
        assert_eq!(k.reflect().reflect(), k);
        assert!(TwistedKernel::from_matrix(&g, 3, &k.to_matrix()).is_err());
    }
}

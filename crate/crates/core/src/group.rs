//! Finite abelian groups `Z/n_1 ⊕ ... ⊕ Z/n_r`, their duals, and harmonic
//! analysis on them.
//!
//! Elements are addressed by their index in the lexicographic enumeration of
//! coordinate vectors (identity first). Every table downstream (cochains,
//! kernels, structure constants) is laid out in this order.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;

use crate::cochain::Phase;
use crate::error::{Error, Result};

const ADD_TABLE_LIMIT: usize = 256;

#[derive(Clone)]
pub struct FiniteAbelianGroup(Arc<Inner>);

struct Inner {
    factors: Vec<u32>,
    order: usize,
    strides: Vec<usize>,
    /// Cayley table, only for small groups.
    add: Option<Vec<u32>>,
}

impl PartialEq for FiniteAbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.factors == other.0.factors
    }
}

impl Eq for FiniteAbelianGroup {}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group{:?}", self.0.factors)
    }
}

impl FiniteAbelianGroup {
    pub fn new(factors: &[u32]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("empty factor list".into()));
        }
        if let Some(bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidGroup(format!("factor {bad} < 2")));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n as usize))
            .filter(|&o| o <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidGroup("order overflows".into()))?;
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1] as usize;
        }
        let mut inner = Inner {
            factors: factors.to_vec(),
            order,
            strides,
            add: None,
        };
        if order <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; order * order];
            for i in 0..order {
                for j in 0..order {
                    table[i * order + j] = inner.add_slow(i, j) as u32;
                }
            }
            inner.add = Some(table);
        }
        Ok(FiniteAbelianGroup(Arc::new(inner)))
    }

    /// `(Z/2)^k`.
    pub fn elementary_abelian(k: usize) -> Self {
        Self::new(&vec![2; k]).expect("k >= 1")
    }

    pub fn cyclic(n: u32) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn factors(&self) -> &[u32] {
        &self.0.factors
    }

    pub fn rank(&self) -> usize {
        self.0.factors.len()
    }

    pub fn order(&self) -> usize {
        self.0.order
    }

    /// Least common multiple of the factors.
    pub fn exponent(&self) -> u64 {
        self.0.factors.iter().fold(1u64, |l, &n| l.lcm(&(n as u64)))
    }

    /// The Pontryagin dual, presented with the same factors.
    pub fn dual(&self) -> Self {
        self.clone()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn coord(&self, index: usize, axis: usize) -> u32 {
        ((index / self.0.strides[axis]) % self.0.factors[axis] as usize) as u32
    }

    pub fn coords(&self, index: usize) -> Vec<u32> {
        (0..self.rank()).map(|k| self.coord(index, k)).collect()
    }

    pub fn index_of(&self, coords: &[u32]) -> Result<usize> {
        if coords.len() != self.rank() || coords.iter().zip(self.factors()).any(|(c, n)| c >= n) {
            return Err(Error::NotAnElement {
                coords: coords.to_vec(),
                factors: self.factors().to_vec(),
            });
        }
        Ok(coords.iter().zip(&self.0.strides).map(|(&c, &s)| c as usize * s).sum())
    }

    /// Reduce arbitrary integer coordinates into the group.
    pub fn index_of_reduced(&self, coords: &[i64]) -> Result<usize> {
        if coords.len() != self.rank() {
            return Err(Error::Dimension(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        Ok(coords
            .iter()
            .zip(self.factors())
            .zip(&self.0.strides)
            .map(|((&c, &n), &s)| c.rem_euclid(n as i64) as usize * s)
            .sum())
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        match &self.0.add {
            Some(t) => t[a * self.0.order + b] as usize,
            None => self.0.add_slow(a, b),
        }
    }

    pub fn neg(&self, a: usize) -> usize {
        let mut out = 0;
        for (k, (&n, &s)) in self.0.factors.iter().zip(&self.0.strides).enumerate() {
            let c = self.coord(a, k);
            out += ((n - c) % n) as usize * s;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `k·a`.
    pub fn scale(&self, a: usize, k: i64) -> usize {
        let coords: Vec<i64> = self.coords(a).into_iter().map(|c| c as i64 * k).collect();
        self.index_of_reduced(&coords).expect("rank matches")
    }

    pub fn element(&self, index: usize) -> GroupElement {
        assert!(index < self.order(), "index {index} out of range");
        GroupElement {
            group: self.clone(),
            index,
        }
    }

    pub fn element_from_coords(&self, coords: &[u32]) -> Result<GroupElement> {
        Ok(self.element(self.index_of(coords)?))
    }

    /// All elements in the canonical (lexicographic) order.
    pub fn enumerate(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }

    /// The duality pairing `⟨χ, g⟩ = Σ χ_i g_i / n_i` on indices.
    pub fn pairing_phase(&self, chi: usize, g: usize) -> Phase {
        let l = self.exponent();
        let mut acc: u64 = 0;
        for (k, &n) in self.factors().iter().enumerate() {
            let w = l / n as u64;
            acc = (acc + self.coord(chi, k) as u64 * self.coord(g, k) as u64 % n as u64 * w) % l;
        }
        Phase::new(acc as i64, l)
    }

    /// Elements of the subgroup generated by `generators`, in canonical order.
    pub fn generated_subgroup(&self, generators: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order()];
        member[0] = true;
        let mut frontier = vec![0usize];
        while let Some(h) = frontier.pop() {
            for &g in generators {
                let s = self.add(h, g);
                if !member[s] {
                    member[s] = true;
                    frontier.push(s);
                }
            }
        }
        (0..self.order()).filter(|&i| member[i]).collect()
    }
}

impl Inner {
    fn add_slow(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            let ca = (a / s) % n as usize;
            let cb = (b / s) % n as usize;
            out += ((ca + cb) % n as usize) * s;
        }
        out
    }
}

/// An element together with its parent group.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElement {
    group: FiniteAbelianGroup,
    index: usize,
}

impl GroupElement {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn coords(&self) -> Vec<u32> {
        self.group.coords(self.index)
    }

    pub fn is_identity(&self) -> bool {
        self.index == 0
    }

    fn check_same(&self, other: &GroupElement) -> Result<()> {
        if self.group != other.group {
            return Err(Error::IncompatibleGroups {
                left: self.group.factors().to_vec(),
                right: other.group.factors().to_vec(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_same(other)?;
        Ok(self.group.element(self.group.add(self.index, other.index)))
    }

    pub fn negate(&self) -> GroupElement {
        self.group.element(self.group.neg(self.index))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

/// Character evaluation between `Ĝ` and `G`.
pub fn pairing(chi: &GroupElement, g: &GroupElement) -> Result<Phase> {
    chi.check_same(g)?;
    Ok(chi.group.pairing_phase(chi.index, g.index))
}

/// The character table `e^{2πi⟨χ,g⟩}` of a group, rows indexed by `χ`.
#[derive(Clone, Debug)]
pub struct DualPairing {
    group: FiniteAbelianGroup,
    table: Vec<Complex64>,
}

impl DualPairing {
    pub fn new(group: &FiniteAbelianGroup) -> Self {
        let n = group.order();
        let mut table = Vec::with_capacity(n * n);
        for chi in 0..n {
            for g in 0..n {
                table.push(group.pairing_phase(chi, g).to_complex());
            }
        }
        DualPairing {
            group: group.clone(),
            table,
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    #[inline]
    pub fn value(&self, chi: usize, g: usize) -> Complex64 {
        self.table[chi * self.group.order() + g]
    }

    /// `f̂(ξ) = Σ_x f(x) e^{2πi⟨ξ,x⟩}` with counting measure.
    pub fn fourier(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.group.order();
        assert_eq!(f.len(), n, "function must be defined on all of G");
        (0..n)
            .map(|xi| (0..n).map(|x| f[x] * self.value(xi, x)).sum())
            .collect()
    }

    /// Inverse of [`fourier`](Self::fourier); carries the `1/|G|`.
    pub fn inverse_fourier(&self, fhat: &[Complex64]) -> Vec<Complex64> {
        let n = self.group.order();
        assert_eq!(fhat.len(), n, "function must be defined on all of the dual");
        let scale = 1.0 / n as f64;
        (0..n)
            .map(|x| (0..n).map(|xi| fhat[xi] * self.value(xi, x).conj()).sum::<Complex64>() * scale)
            .collect()
    }
}

pub fn fourier(group: &FiniteAbelianGroup, f: &[Complex64]) -> Vec<Complex64> {
    DualPairing::new(group).fourier(f)
}

pub fn inverse_fourier(group: &FiniteAbelianGroup, fhat: &[Complex64]) -> Vec<Complex64> {
    DualPairing::new(group).inverse_fourier(fhat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_groups() -> Vec<FiniteAbelianGroup> {
        let lists: &[&[u32]] = &[
            &[2],
            &[3],
            &[4],
            &[2, 2],
            &[2, 3],
            &[6],
            &[2, 2, 2],
            &[4, 4],
            &[2, 4],
            &[3, 3],
            &[2, 2, 2, 2],
            &[4, 4, 4],
            &[8, 8],
            &[2, 2, 2, 2, 2, 2],
        ];
        lists.iter().map(|f| FiniteAbelianGroup::new(f).unwrap()).collect()
    }

    #[test]
    fn construction() {
        assert_eq!(FiniteAbelianGroup::new(&[2, 2, 2]).unwrap().order(), 8);
        assert_eq!(FiniteAbelianGroup::new(&[4]).unwrap().order(), 4);
        let g = FiniteAbelianGroup::new(&[2, 3]).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.factors(), &[2, 3]);
        assert!(matches!(FiniteAbelianGroup::new(&[]), Err(Error::InvalidGroup(_))));
        assert!(matches!(FiniteAbelianGroup::new(&[2, 1]), Err(Error::InvalidGroup(_))));
        assert_eq!(g.dual().factors(), g.factors());
    }

    #[test]
    fn enumeration_order() {
        let z2 = FiniteAbelianGroup::new(&[2]).unwrap();
        let coords: Vec<_> = z2.enumerate().iter().map(|e| e.coords()).collect();
        assert_eq!(coords, vec![vec![0], vec![1]]);
        let k4 = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let coords: Vec<_> = k4.enumerate().iter().map(|e| e.coords()).collect();
        assert_eq!(coords, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let z3 = FiniteAbelianGroup::new(&[3]).unwrap();
        let all = z3.enumerate();
        assert_eq!(all.len(), 3);
        assert!(all[0].is_identity());
    }

    #[test]
    fn group_axioms_exhaustive() {
        for g in small_groups() {
            let n = g.order();
            assert!(n <= 64);
            for a in 0..n {
                assert_eq!(g.add(a, 0), a);
                assert_eq!(g.add(a, g.neg(a)), 0);
                for b in 0..n {
                    assert_eq!(g.add(a, b), g.add(b, a));
                    for c in 0..n {
                        assert_eq!(g.add(g.add(a, b), c), g.add(a, g.add(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn large_group_uses_slow_path() {
        let g = FiniteAbelianGroup::new(&[16, 32]).unwrap();
        let a = g.index_of(&[15, 31]).unwrap();
        let b = g.index_of(&[3, 2]).unwrap();
        assert_eq!(g.coords(g.add(a, b)), vec![2, 1]);
        assert_eq!(g.sub(a, a), 0);
    }

    #[test]
    fn pairing_examples() {
        let z4 = FiniteAbelianGroup::new(&[4]).unwrap();
        let one = z4.element_from_coords(&[1]).unwrap();
        let two = z4.element_from_coords(&[2]).unwrap();
        assert_eq!(pairing(&one, &one).unwrap(), Phase::new(1, 4));
        assert_eq!(pairing(&two, &two).unwrap(), Phase::ZERO);

        let g = FiniteAbelianGroup::elementary_abelian(3);
        let chi = g.element_from_coords(&[1, 1, 0]).unwrap();
        let x = g.element_from_coords(&[1, 0, 1]).unwrap();
        assert_eq!(pairing(&chi, &x).unwrap(), Phase::HALF);
        assert_eq!(pairing(&g.element(0), &x).unwrap(), Phase::ZERO);

        assert!(matches!(pairing(&one, &x), Err(Error::IncompatibleGroups { .. })));
    }

    #[test]
    fn pairing_biadditive_and_nondegenerate() {
        for g in small_groups().into_iter().filter(|g| g.order() <= 16) {
            let n = g.order();
            for chi in 0..n {
                for psi in 0..n {
                    for x in 0..n {
                        assert_eq!(
                            g.pairing_phase(g.add(chi, psi), x),
                            g.pairing_phase(chi, x) + g.pairing_phase(psi, x)
                        );
                    }
                }
                if chi != 0 {
                    assert!((0..n).any(|x| !g.pairing_phase(chi, x).is_zero()));
                }
            }
        }
    }

    #[test]
    fn character_table_is_unitary() {
        for g in small_groups() {
            let n = g.order();
            let p = DualPairing::new(&g);
            let s = 1.0 / (n as f64).sqrt();
            for a in 0..n {
                for b in 0..n {
                    let ip: Complex64 = (0..n).map(|x| p.value(a, x) * p.value(b, x).conj() * s * s).sum();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - expected).norm() < 1e-12, "{g:?} rows {a},{b}");
                }
            }
        }
    }

    #[test]
    fn fourier_examples() {
        let g = FiniteAbelianGroup::elementary_abelian(3);
        let mut delta = vec![Complex64::new(0.0, 0.0); 8];
        delta[0] = Complex64::new(1.0, 0.0);
        for v in fourier(&g, &delta) {
            assert!((v - 1.0).norm() < 1e-15);
        }
        let z2 = FiniteAbelianGroup::new(&[2]).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); 2];
        let f = fourier(&z2, &ones);
        assert!((f[0] - 2.0).norm() < 1e-15 && f[1].norm() < 1e-15);
    }

    #[test]
    fn fourier_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in small_groups() {
            let p = DualPairing::new(&g);
            let f: Vec<Complex64> = (0..g.order())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let back = p.inverse_fourier(&p.fourier(&f));
            let fwd = p.fourier(&p.inverse_fourier(&f));
            for i in 0..g.order() {
                assert!((back[i] - f[i]).norm() < 1e-12);
                assert!((fwd[i] - f[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn subgroup_generation() {
        let g = FiniteAbelianGroup::elementary_abelian(3);
        let e1 = g.index_of(&[1, 0, 0]).unwrap();
        assert_eq!(g.generated_subgroup(&[e1]), vec![0, e1]);
        assert_eq!(g.generated_subgroup(&[]), vec![0]);
        let z4 = FiniteAbelianGroup::new(&[4, 4]).unwrap();
        let two = z4.index_of(&[2, 0]).unwrap();
        assert_eq!(z4.generated_subgroup(&[two]).len(), 2);
        assert_eq!(z4.generated_subgroup(&[z4.index_of(&[1, 1]).unwrap()]).len(), 4);
    }
}

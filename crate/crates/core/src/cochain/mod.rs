//! Circle-valued cochains on finite abelian groups, stored exactly.
//!
//! A cochain table holds numerators over one common denominator, so every
//! cocycle identity reduces to integer arithmetic mod that denominator.

mod phase;
pub mod potential;
pub mod tricharacter;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;

pub use phase::Phase;
pub use tricharacter::Tricharacter;

/// Phase table shared by 2- and 3-cochains: numerators mod `den`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Table {
    den: u64,
    num: Vec<u64>,
}

impl Table {
    fn from_phases(values: &[Phase]) -> Table {
        let den = values.iter().fold(1u64, |l, p| l.lcm(&p.denom()));
        let num = values.iter().map(|p| p.numer() * (den / p.denom())).collect();
        Table { den, num }
    }

    #[inline]
    fn phase(&self, i: usize) -> Phase {
        Phase::new(self.num[i] as i64, self.den)
    }

    /// Bring two tables onto a common denominator.
    fn align(&self, other: &Table) -> (u64, u64, u64) {
        let den = self.den.lcm(&other.den);
        (den, den / self.den, den / other.den)
    }

    fn combine(&self, other: &Table, sign: i64) -> Table {
        let (den, s, o) = self.align(other);
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(&a, &b)| ((a * s) as i128 + sign as i128 * (b * o) as i128).rem_euclid(den as i128) as u64)
            .collect();
        Table { den, num }.reduced()
    }

    fn negated(&self) -> Table {
        Table {
            den: self.den,
            num: self.num.iter().map(|&a| (self.den - a) % self.den).collect(),
        }
    }

    fn reduced(mut self) -> Table {
        let g = self.num.iter().fold(self.den, |g, &a| g.gcd(&a));
        if g > 1 {
            self.den /= g;
            for a in &mut self.num {
                *a /= g;
            }
        }
        self
    }
}

/// Serialized as the group's invariant factors plus the row-major table of
/// phases written `p/q`.
fn serialize_table<S: serde::Serializer>(group: &FiniteAbelianGroup, table: &Table, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let values: Vec<String> = (0..table.num.len()).map(|i| table.phase(i).to_string()).collect();
    let mut st = s.serialize_struct("Cochain", 2)?;
    st.serialize_field("factors", group.factors())?;
    st.serialize_field("values", &values)?;
    st.end()
}

impl serde::Serialize for Cochain2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_table(&self.group, &self.table, s)
    }
}

impl serde::Serialize for Cochain3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_table(&self.group, &self.table, s)
    }
}

/// A normalized 2-cochain `G × G → Q/Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain2 {
    group: FiniteAbelianGroup,
    table: Table,
}

impl Cochain2 {
    pub fn zero(group: &FiniteAbelianGroup) -> Self {
        let n = group.order();
        Cochain2 {
            group: group.clone(),
            table: Table {
                den: 1,
                num: vec![0; n * n],
            },
        }
    }

    /// Table in row-major order over `enumerate(G) × enumerate(G)`.
    pub fn from_table(group: &FiniteAbelianGroup, values: Vec<Phase>) -> Result<Self> {
        let n = group.order();
        if values.len() != n * n {
            return Err(Error::TableSize {
                expected: n * n,
                got: values.len(),
            });
        }
        for x in 0..n {
            if !values[x * n].is_zero() {
                return Err(Error::NotNormalized { at: vec![x, 0] });
            }
            if !values[x].is_zero() {
                return Err(Error::NotNormalized { at: vec![0, x] });
            }
        }
        Ok(Cochain2 {
            group: group.clone(),
            table: Table::from_phases(&values).reduced(),
        })
    }

    pub fn from_fn(group: &FiniteAbelianGroup, mut f: impl FnMut(usize, usize) -> Phase) -> Result<Self> {
        let n = group.order();
        let values = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self::from_table(group, values)
    }

    /// `σ(a,b) = Σ B_ij a_i b_j / m`, a bicharacter when well defined.
    pub fn bicharacter(group: &FiniteAbelianGroup, matrix: &[Vec<i64>], modulus: u64) -> Result<Self> {
        let r = group.rank();
        if matrix.len() != r || matrix.iter().any(|row| row.len() != r) {
            return Err(Error::TensorShape(format!("bicharacter matrix must be {r}×{r}")));
        }
        if modulus == 0 {
            return Err(Error::TensorShape("modulus must be positive".into()));
        }
        let f = group.factors();
        for i in 0..r {
            for j in 0..r {
                let g = f[i].gcd(&f[j]) as i64;
                if (matrix[i][j] * g).rem_euclid(modulus as i64) != 0 {
                    return Err(Error::TensorShape(format!(
                        "entry ({i},{j}) is not well defined modulo the group factors"
                    )));
                }
            }
        }
        Self::from_fn(group, |a, b| {
            let mut acc = 0i64;
            for i in 0..r {
                for j in 0..r {
                    acc += matrix[i][j] * group.coord(a, i) as i64 * group.coord(b, j) as i64;
                }
            }
            Phase::new(acc, modulus)
        })
    }

    /// Random normalized cochain with values in `(1/den)Z/Z`.
    pub fn random<R: Rng + ?Sized>(group: &FiniteAbelianGroup, den: u64, rng: &mut R) -> Self {
        Self::from_fn(group, |x, y| {
            if x == 0 || y == 0 {
                Phase::ZERO
            } else {
                Phase::new(rng.random_range(0..den) as i64, den)
            }
        })
        .expect("normalized by construction")
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Phase {
        self.table.phase(x * self.group.order() + y)
    }

    /// Common denominator of all values.
    pub fn denominator(&self) -> u64 {
        self.table.den
    }

    #[inline]
    fn raw(&self, x: usize, y: usize) -> u64 {
        self.table.num[x * self.group.order() + y]
    }

    pub fn values(&self) -> Vec<Phase> {
        (0..self.table.num.len()).map(|i| self.table.phase(i)).collect()
    }

    /// `δσ(x,y,z) = σ(y,z) − σ(x+y,z) + σ(x,y+z) − σ(x,y)`.
    pub fn coboundary(&self) -> Cochain3 {
        let g = &self.group;
        let n = g.order();
        let d = self.table.den;
        let mut num = vec![0u64; n * n * n];
        num.par_chunks_mut(n * n).enumerate().for_each(|(x, slab)| {
            for y in 0..n {
                for z in 0..n {
                    let v = self.raw(y, z) + d - self.raw(g.add(x, y), z) + self.raw(x, g.add(y, z)) + d
                        - self.raw(x, y);
                    slab[y * n + z] = v % d;
                }
            }
        });
        Cochain3 {
            group: g.clone(),
            table: Table { den: d, num }.reduced(),
        }
    }

    /// First triple where `δσ ≠ 0`, if any.
    pub fn cocycle_witness(&self) -> Option<[usize; 3]> {
        let c = self.coboundary();
        let n = self.group.order();
        c.table.num.iter().position(|&v| v != 0).map(|i| [i / (n * n), (i / n) % n, i % n])
    }

    pub fn is_cocycle(&self) -> bool {
        self.cocycle_witness().is_none()
    }

    pub fn checked_add(&self, other: &Cochain2) -> Result<Cochain2> {
        same_group(&self.group, &other.group)?;
        Ok(Cochain2 {
            group: self.group.clone(),
            table: self.table.combine(&other.table, 1),
        })
    }

    pub fn checked_sub(&self, other: &Cochain2) -> Result<Cochain2> {
        same_group(&self.group, &other.group)?;
        Ok(Cochain2 {
            group: self.group.clone(),
            table: self.table.combine(&other.table, -1),
        })
    }

    pub fn negate(&self) -> Cochain2 {
        Cochain2 {
            group: self.group.clone(),
            table: self.table.negated(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.table.num.iter().all(|&v| v == 0)
    }
}

/// A normalized 3-cochain `G × G × G → Q/Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain3 {
    group: FiniteAbelianGroup,
    table: Table,
}

impl Cochain3 {
    pub fn zero(group: &FiniteAbelianGroup) -> Self {
        let n = group.order();
        Cochain3 {
            group: group.clone(),
            table: Table {
                den: 1,
                num: vec![0; n * n * n],
            },
        }
    }

    pub fn from_table(group: &FiniteAbelianGroup, values: Vec<Phase>) -> Result<Self> {
        let n = group.order();
        if values.len() != n * n * n {
            return Err(Error::TableSize {
                expected: n * n * n,
                got: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            let (x, y, z) = (i / (n * n), (i / n) % n, i % n);
            if (x == 0 || y == 0 || z == 0) && !v.is_zero() {
                return Err(Error::NotNormalized { at: vec![x, y, z] });
            }
        }
        Ok(Cochain3 {
            group: group.clone(),
            table: Table::from_phases(&values).reduced(),
        })
    }

    pub fn from_fn(group: &FiniteAbelianGroup, f: impl Fn(usize, usize, usize) -> Phase) -> Result<Self> {
        let n = group.order();
        let values = (0..n * n * n).map(|i| f(i / (n * n), (i / n) % n, i % n)).collect();
        Self::from_table(group, values)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> Phase {
        let n = self.group.order();
        self.table.phase((x * n + y) * n + z)
    }

    pub fn denominator(&self) -> u64 {
        self.table.den
    }

    #[inline]
    pub(crate) fn raw(&self, x: usize, y: usize, z: usize) -> u64 {
        let n = self.group.order();
        self.table.num[(x * n + y) * n + z]
    }

    pub fn values(&self) -> Vec<Phase> {
        (0..self.table.num.len()).map(|i| self.table.phase(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.table.num.iter().all(|&v| v == 0)
    }

    /// `δφ(w,x,y,z) = φ(x,y,z) − φ(w+x,y,z) + φ(w,x+y,z) − φ(w,x,y+z) + φ(w,x,y)`.
    pub fn coboundary_at(&self, w: usize, x: usize, y: usize, z: usize) -> Phase {
        Phase::new(self.coboundary_raw(w, x, y, z) as i64, self.table.den)
    }

    #[inline]
    fn coboundary_raw(&self, w: usize, x: usize, y: usize, z: usize) -> u64 {
        let g = &self.group;
        let d = self.table.den;
        let v = self.raw(x, y, z) + d - self.raw(g.add(w, x), y, z) + self.raw(w, g.add(x, y), z) + d
            - self.raw(w, x, g.add(y, z))
            + self.raw(w, x, y);
        v % d
    }

    /// First quadruple (lexicographic) where `δφ ≠ 0`, if any. Exhaustive over `G⁴`.
    pub fn cocycle_witness(&self) -> Option<[usize; 4]> {
        let n = self.group.order();
        (0..n).into_par_iter().find_map_first(|w| {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if self.coboundary_raw(w, x, y, z) != 0 {
                            return Some([w, x, y, z]);
                        }
                    }
                }
            }
            None
        })
    }

    pub fn is_cocycle(&self) -> bool {
        self.cocycle_witness().is_none()
    }

    /// `Ok(())` or the failing quadruple as an error.
    pub fn ensure_cocycle(&self) -> Result<()> {
        match self.cocycle_witness() {
            None => Ok(()),
            Some(quadruple) => Err(Error::NotCocycle3 { quadruple }),
        }
    }

    /// A triple where swapping two arguments does not negate the value.
    pub fn alternating_witness(&self) -> Option<[usize; 3]> {
        let n = self.group.order();
        let d = self.table.den;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let v = self.raw(x, y, z);
                    let minus = (d - v) % d;
                    if self.raw(y, x, z) != minus || self.raw(x, z, y) != minus || self.raw(z, y, x) != minus {
                        return Some([x, y, z]);
                    }
                }
            }
        }
        None
    }

    pub fn is_alternating(&self) -> bool {
        self.alternating_witness().is_none()
    }

    /// The restriction to the subgroup generated by `generators`.
    pub fn restrict(&self, generators: &[usize]) -> Result<Restriction> {
        let n = self.group.order();
        if let Some(&g) = generators.iter().find(|&&g| g >= n) {
            return Err(Error::NotAnElement {
                coords: vec![g as u32],
                factors: self.group.factors().to_vec(),
            });
        }
        let elements = self.group.generated_subgroup(generators);
        let mut values = Vec::with_capacity(elements.len().pow(3));
        for &x in &elements {
            for &y in &elements {
                for &z in &elements {
                    values.push(self.get(x, y, z));
                }
            }
        }
        Ok(Restriction { elements, values })
    }

    /// Pointwise triviality on `H³`, `H = ⟨generators⟩`.
    pub fn is_trivial_on(&self, generators: &[usize]) -> Result<bool> {
        Ok(self.restrict(generators)?.is_trivial())
    }

    pub fn checked_add(&self, other: &Cochain3) -> Result<Cochain3> {
        same_group(&self.group, &other.group)?;
        Ok(Cochain3 {
            group: self.group.clone(),
            table: self.table.combine(&other.table, 1),
        })
    }

    pub fn checked_sub(&self, other: &Cochain3) -> Result<Cochain3> {
        same_group(&self.group, &other.group)?;
        Ok(Cochain3 {
            group: self.group.clone(),
            table: self.table.combine(&other.table, -1),
        })
    }

    pub fn negate(&self) -> Cochain3 {
        Cochain3 {
            group: self.group.clone(),
            table: self.table.negated(),
        }
    }
}

/// A 3-cochain restricted to a subgroup, listed over the subgroup's elements.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub elements: Vec<usize>,
    pub values: Vec<Phase>,
}

impl Restriction {
    pub fn get(&self, i: usize, j: usize, k: usize) -> Phase {
        let m = self.elements.len();
        self.values[(i * m + j) * m + k]
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(Phase::is_zero)
    }

    /// A triple of group indices where the restriction is nonzero.
    pub fn witness(&self) -> Option<[usize; 3]> {
        let m = self.elements.len();
        self.values.iter().position(|v| !v.is_zero()).map(|i| {
            [
                self.elements[i / (m * m)],
                self.elements[(i / m) % m],
                self.elements[i % m],
            ]
        })
    }
}

fn same_group(a: &FiniteAbelianGroup, b: &FiniteAbelianGroup) -> Result<()> {
    if a != b {
        return Err(Error::IncompatibleGroups {
            left: a.factors().to_vec(),
            right: b.factors().to_vec(),
        });
    }
    Ok(())
}

/// A Phase-valued function on `G³` used to weight kernel compositions.
///
/// Unlike [`Cochain3`] it need not be normalized.
#[derive(Clone, Debug)]
pub struct KernelTwist {
    group: FiniteAbelianGroup,
    values: Vec<Complex64>,
    phases: Vec<Phase>,
}

impl KernelTwist {
    /// `(x,y,z) ↦ φ(x,y,z)`.
    pub fn pointwise(phi: &Cochain3) -> Self {
        Self::from_fn(phi.group(), |x, y, z| phi.get(x, y, z))
    }

    /// `(x,y,z) ↦ φ(x−y, y−z, z)`: the twist carried over by the duality
    /// transform. Agrees with [`pointwise`](Self::pointwise) for alternating
    /// tricharacters.
    pub fn difference(phi: &Cochain3) -> Self {
        let g = phi.group();
        Self::from_fn(g, |x, y, z| phi.get(g.sub(x, y), g.sub(y, z), z))
    }

    pub fn from_fn(group: &FiniteAbelianGroup, f: impl Fn(usize, usize, usize) -> Phase) -> Self {
        let n = group.order();
        let phases: Vec<Phase> = (0..n * n * n).map(|i| f(i / (n * n), (i / n) % n, i % n)).collect();
        let values = phases.iter().map(Phase::to_complex).collect();
        KernelTwist {
            group: group.clone(),
            values,
            phases,
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize, z: usize) -> Complex64 {
        let n = self.group.order();
        self.values[(x * n + y) * n + z]
    }

    pub fn phase(&self, x: usize, y: usize, z: usize) -> Phase {
        let n = self.group.order();
        self.phases[(x * n + y) * n + z]
    }

    /// Exact comparison of two twists.
    pub fn same_as(&self, other: &KernelTwist) -> bool {
        self.group == other.group && self.phases == other.phases
    }
}

/// The multiplier `u(β,γ) = diag_α e(φ(α,β,γ))` on `ℓ²(G)`.
#[derive(Clone, Debug)]
pub struct DiagonalMultiplier {
    phi: Cochain3,
}

/// Build the diagonal multiplier of a normalized 3-cocycle.
///
/// Rejects non-cocycles: for them the twisted-action relation fails.
pub fn multiplier_from_phi(phi: &Cochain3) -> Result<DiagonalMultiplier> {
    phi.ensure_cocycle()?;
    Ok(DiagonalMultiplier { phi: phi.clone() })
}

impl DiagonalMultiplier {
    pub fn phi(&self) -> &Cochain3 {
        &self.phi
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.phi.group()
    }

    /// Diagonal entries of `u(β,γ)`, indexed by `α`.
    pub fn diagonal(&self, beta: usize, gamma: usize) -> Vec<Phase> {
        (0..self.group().order()).map(|a| self.phi.get(a, beta, gamma)).collect()
    }

    #[inline]
    pub fn entry(&self, alpha: usize, beta: usize, gamma: usize) -> Phase {
        self.phi.get(alpha, beta, gamma)
    }

    pub fn matrix(&self, beta: usize, gamma: usize) -> DMatrix<Complex64> {
        let d: Vec<Complex64> = self.diagonal(beta, gamma).iter().map(Phase::to_complex).collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
    }

    /// Check `φ(α,β,γ)·u(α,β)·u(α+β,γ) = ξ_α[u(β,γ)]·u(α,β+γ)` with
    /// `ξ_α[d](g) = d(g+α)`, exactly, on every triple and diagonal slot.
    /// Returns `(α, β, γ, slot)` of the first failure.
    pub fn relation_witness(&self) -> Option<[usize; 4]> {
        let g = self.group();
        let n = g.order();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let scalar = self.phi.get(a, b, c);
                    for p in 0..n {
                        let lhs = scalar + self.entry(p, a, b) + self.entry(p, g.add(a, b), c);
                        let rhs = self.entry(g.add(p, a), b, c) + self.entry(p, a, g.add(b, c));
                        if lhs != rhs {
                            return Some([a, b, c, p]);
                        }
                    }
                }
            }
        }
        None
    }
}

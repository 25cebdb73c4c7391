//! Trilinear phase forms `φ(a,b,c) = Σ M_ijk a_i b_j c_k / m`.

use num_integer::Integer;

use super::{Cochain3, Phase};
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tricharacter {
    group: FiniteAbelianGroup,
    tensor: Vec<i64>,
    modulus: u64,
}

impl Tricharacter {
    /// `tensor[i][j][k]` indexed by the group's cyclic factors. `modulus`
    /// defaults to the exponent of the group. Each entry must give a
    /// well-defined value: `m | M_ijk · gcd(n_i, n_j, n_k)`.
    pub fn from_tensor(group: &FiniteAbelianGroup, tensor: &[Vec<Vec<i64>>], modulus: Option<u64>) -> Result<Self> {
        let r = group.rank();
        if tensor.len() != r || tensor.iter().any(|m| m.len() != r || m.iter().any(|row| row.len() != r)) {
            return Err(Error::TensorShape(format!("expected a {r}×{r}×{r} tensor")));
        }
        let modulus = modulus.unwrap_or_else(|| group.exponent());
        if modulus == 0 {
            return Err(Error::TensorShape("modulus must be positive".into()));
        }
        let f = group.factors();
        let mut flat = Vec::with_capacity(r * r * r);
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let m = tensor[i][j][k];
                    let g = f[i].gcd(&f[j]).gcd(&f[k]) as i64;
                    if (m * g).rem_euclid(modulus as i64) != 0 {
                        return Err(Error::TensorShape(format!(
                            "entry ({i},{j},{k}) = {m} is not well defined mod {modulus} on factors {f:?}"
                        )));
                    }
                    flat.push(m);
                }
            }
        }
        Ok(Tricharacter {
            group: group.clone(),
            tensor: flat,
            modulus,
        })
    }

    /// The Levi-Civita tensor on a rank-3 group, over `modulus`.
    pub fn levi_civita(group: &FiniteAbelianGroup, modulus: Option<u64>) -> Result<Self> {
        if group.rank() != 3 {
            return Err(Error::TensorShape("Levi-Civita tensor needs rank 3".into()));
        }
        let mut t = vec![vec![vec![0i64; 3]; 3]; 3];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            t[i][j][k] = 1;
            t[j][i][k] = -1;
        }
        Self::from_tensor(group, &t, modulus)
    }

    /// `½·a·(b×c)` on `(Z/2)³`.
    pub fn octonion() -> Self {
        Self::levi_civita(&FiniteAbelianGroup::elementary_abelian(3), Some(2)).expect("valid on Z/2³")
    }

    pub fn zero(group: &FiniteAbelianGroup) -> Self {
        let r = group.rank();
        Tricharacter {
            group: group.clone(),
            tensor: vec![0; r * r * r],
            modulus: 1,
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> i64 {
        let r = self.group.rank();
        self.tensor[(i * r + j) * r + k]
    }

    /// Whether the tensor changes sign under every transposition of indices.
    pub fn is_antisymmetric_tensor(&self) -> bool {
        let r = self.group.rank();
        let m = self.modulus as i64;
        let eq = |a: i64, b: i64| (a - b).rem_euclid(m) == 0;
        (0..r).all(|i| {
            (0..r).all(|j| {
                (0..r).all(|k| {
                    let v = self.entry(i, j, k);
                    eq(self.entry(j, i, k), -v) && eq(self.entry(i, k, j), -v) && eq(self.entry(k, j, i), -v)
                })
            })
        })
    }

    pub fn eval(&self, a: usize, b: usize, c: usize) -> Phase {
        let g = &self.group;
        let r = g.rank();
        let (ca, cb, cc) = (g.coords(a), g.coords(b), g.coords(c));
        let m = self.modulus as i128;
        let mut acc: i128 = 0;
        for i in 0..r {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..r {
                if cb[j] == 0 {
                    continue;
                }
                for k in 0..r {
                    let t = self.tensor[(i * r + j) * r + k] as i128;
                    acc = (acc + t * ca[i] as i128 * cb[j] as i128 * cc[k] as i128) % m;
                }
            }
        }
        Phase::new(acc as i64, self.modulus)
    }

    pub fn to_cochain3(&self) -> Cochain3 {
        Cochain3::from_fn(&self.group, |a, b, c| self.eval(a, b, c)).expect("trilinear forms are normalized")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross_dot(a: &[u32], b: &[u32], c: &[u32]) -> u32 {
        let cross = [
            b[1] * c[2] + 2 * 2 - b[2] * c[1],
            b[2] * c[0] + 2 * 2 - b[0] * c[2],
            b[0] * c[1] + 2 * 2 - b[1] * c[0],
        ];
        (a[0] * cross[0] + a[1] * cross[1] + a[2] * cross[2]) % 2
    }

    #[test]
    fn octonion_matches_triple_product() {
        let t = Tricharacter::octonion();
        let g = t.group().clone();
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    let expect = Phase::new(cross_dot(&g.coords(a), &g.coords(b), &g.coords(c)) as i64, 2);
                    assert_eq!(t.eval(a, b, c), expect);
                }
            }
        }
        let e = |v: &[u32]| g.index_of(v).unwrap();
        assert_eq!(t.eval(e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1])), Phase::HALF);
        assert!(t.is_antisymmetric_tensor());
    }

    #[test]
    fn shape_and_definedness_errors() {
        let g = FiniteAbelianGroup::elementary_abelian(3);
        assert!(matches!(
            Tricharacter::from_tensor(&g, &vec![vec![vec![0; 3]; 3]; 2], None),
            Err(Error::TensorShape(_))
        ));
        let z4 = FiniteAbelianGroup::new(&[4, 2]).unwrap();
        let mut t = vec![vec![vec![0i64; 2]; 2]; 2];
        t[0][0][1] = 1;
        assert!(Tricharacter::from_tensor(&z4, &t, Some(4)).is_err());
        t[0][0][1] = 2;
        assert!(Tricharacter::from_tensor(&z4, &t, Some(4)).is_ok());
    }

    #[test]
    fn zero_tensor() {
        let g = FiniteAbelianGroup::new(&[4, 4, 4]).unwrap();
        let t = Tricharacter::from_tensor(&g, &vec![vec![vec![0; 3]; 3]; 3], None).unwrap();
        assert!(t.to_cochain3().is_zero());
        assert!(Tricharacter::zero(&g).to_cochain3().is_zero());
    }

    #[test]
    fn z4_levi_civita_is_cocycle() {
        let g = FiniteAbelianGroup::new(&[4, 4, 4]).unwrap();
        let phi = Tricharacter::levi_civita(&g, Some(4)).unwrap().to_cochain3();
        assert!(phi.is_cocycle());
        assert!(phi.is_alternating());
    }
}

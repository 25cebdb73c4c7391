//! Twisted crossed products `B ⋊_{β,u} G` with an associator, the dual
//! action, the strictified product on `G × G`, and the duality transform
//! onto `B`-valued twisted kernels.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{Cochain2, Cochain3, KernelTwist, Phase};
use crate::error::{Error, Result};
use crate::group::{DualPairing, FiniteAbelianGroup};
use crate::linalg::{self, c, CMatrix};
use crate::twisted_kernels::{kernel_product, TwistedKernel};

/// Exhaustive basis sweeps replace random sampling up to this many basis
/// elements (so at most `64² = 4096` pairs).
pub const EXHAUSTIVE_BASIS_LIMIT: usize = 64;

const TWIST_TOL: f64 = 1e-10;

/// `(β, u, φ)` on `B = M_b`: `β_t = ad(V_t)`, `u(x,y)` unitary in `B`.
#[derive(Clone, Debug)]
pub struct TwistData {
    group: FiniteAbelianGroup,
    block: usize,
    beta: Vec<CMatrix>,
    u: Vec<CMatrix>,
    u_inv: Vec<CMatrix>,
    phi: Cochain3,
}

impl TwistData {
    /// Validates normalization, `β_xβ_y = ad(u(x,y))β_{x+y}` and
    /// `e^{2πiφ(x,y,z)} u(x,y) u(x+y,z) = β_x[u(y,z)] u(x,y+z)`;
    /// exhaustively when `|G| ≤ 16`.
    pub fn new(
        group: &FiniteAbelianGroup,
        block: usize,
        beta_unitaries: Vec<CMatrix>,
        u: Vec<CMatrix>,
        phi: &Cochain3,
    ) -> Result<Self> {
        let tw = Self::new_unchecked(group, block, beta_unitaries, u, phi)?;
        if group.order() <= 16 {
            tw.validate()?;
        }
        Ok(tw)
    }

    pub fn new_unchecked(
        group: &FiniteAbelianGroup,
        block: usize,
        beta_unitaries: Vec<CMatrix>,
        u: Vec<CMatrix>,
        phi: &Cochain3,
    ) -> Result<Self> {
        let n = group.order();
        if phi.group() != group {
            return Err(Error::IncompatibleGroups {
                left: group.factors().to_vec(),
                right: phi.group().factors().to_vec(),
            });
        }
        if beta_unitaries.len() != n || u.len() != n * n {
            return Err(Error::Dimension(format!(
                "need {n} action unitaries and {} multiplier values",
                n * n
            )));
        }
        for m in beta_unitaries.iter().chain(&u) {
            if m.shape() != (block, block) {
                return Err(Error::Dimension(format!("entries must be {block}×{block}")));
            }
            if linalg::unitarity_defect(m) > TWIST_TOL {
                return Err(Error::InvalidAction("action and multiplier values must be unitary".into()));
            }
        }
        let u_inv = u.iter().map(|m| m.adjoint()).collect();
        Ok(TwistData {
            group: group.clone(),
            block,
            beta: beta_unitaries,
            u,
            u_inv,
            phi: phi.clone(),
        })
    }

    /// Trivial action, scalar multiplier `u = e^{2πiσ}·1`. Valid iff `δσ = φ`.
    pub fn scalar(sigma: &Cochain2, phi: &Cochain3, block: usize) -> Result<Self> {
        let g = sigma.group();
        let n = g.order();
        let id = CMatrix::identity(block, block);
        let u = (0..n * n).map(|i| &id * sigma.get(i / n, i % n).to_complex()).collect();
        Self::new(g, block, vec![id.clone(); n], u, phi)
    }

    /// `β = ad(V)`, `u(x,y) = e^{2πiσ(x,y)} V_x V_y V_{x+y}*`; valid iff
    /// `δσ = φ`, for any unitaries with `V_0 = 1`.
    pub fn perturbed(sigma: &Cochain2, phi: &Cochain3, v: Vec<CMatrix>) -> Result<Self> {
        let g = sigma.group();
        let n = g.order();
        let block = v.first().map_or(1, |m| m.nrows());
        let u = (0..n * n)
            .map(|i| {
                let (x, y) = (i / n, i % n);
                &v[x] * &v[y] * v[g.add(x, y)].adjoint() * sigma.get(x, y).to_complex()
            })
            .collect();
        Self::new(g, block, v, u, phi)
    }

    /// Random unitaries `V_t` (with `V_0 = 1`) for [`perturbed`](Self::perturbed).
    pub fn random_perturbation<R: Rng + ?Sized>(group: &FiniteAbelianGroup, block: usize, rng: &mut R) -> Vec<CMatrix> {
        (0..group.order())
            .map(|t| {
                if t == 0 {
                    CMatrix::identity(block, block)
                } else {
                    linalg::random_unitary(block, rng)
                }
            })
            .collect()
    }

    /// An honest action `t ↦ ad(W_t)` (trivial multiplier and associator).
    pub fn action(group: &FiniteAbelianGroup, unitaries: Vec<CMatrix>) -> Result<Self> {
        let n = group.order();
        let block = unitaries.first().map_or(1, |m| m.nrows());
        let u = vec![CMatrix::identity(block, block); n * n];
        Self::new(group, block, unitaries, u, &Cochain3::zero(group))
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn phi(&self) -> &Cochain3 {
        &self.phi
    }

    pub fn beta_unitary(&self, t: usize) -> &CMatrix {
        &self.beta[t]
    }

    #[inline]
    pub fn beta(&self, t: usize, b: &CMatrix) -> CMatrix {
        &self.beta[t] * b * self.beta[t].adjoint()
    }

    #[inline]
    pub fn beta_inv(&self, t: usize, b: &CMatrix) -> CMatrix {
        self.beta[t].adjoint() * b * &self.beta[t]
    }

    #[inline]
    pub fn u(&self, x: usize, y: usize) -> &CMatrix {
        &self.u[x * self.group.order() + y]
    }

    #[inline]
    pub fn u_inv(&self, x: usize, y: usize) -> &CMatrix {
        &self.u_inv[x * self.group.order() + y]
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.group;
        let n = g.order();
        let b = self.block;
        let id = CMatrix::identity(b, b);
        let fail = |relation: &'static str, at: Vec<usize>, error: f64| Err(Error::TwistRelation { relation, at, error });

        let span: Vec<CMatrix> = (0..b * b)
            .map(|i| {
                let mut m = CMatrix::zeros(b, b);
                m[(i / b, i % b)] = c(1.0, 0.0);
                m
            })
            .collect();
        for e in &span {
            let err = linalg::max_abs_diff(&self.beta(0, e), e);
            if err > TWIST_TOL {
                return fail("β_0 = id", vec![0], err);
            }
        }
        for x in 0..n {
            for (at, m) in [(vec![x, 0], self.u(x, 0)), (vec![0, x], self.u(0, x))] {
                let err = linalg::max_abs_diff(m, &id);
                if err > TWIST_TOL {
                    return fail("u normalized", at, err);
                }
            }
        }
        let action_err = (0..n * n).into_par_iter().find_map_first(|i| {
            let (x, y) = (i / n, i % n);
            let xy = g.add(x, y);
            span.iter().find_map(|e| {
                let lhs = self.beta(x, &self.beta(y, e));
                let rhs = self.u(x, y) * self.beta(xy, e) * self.u_inv(x, y);
                let err = linalg::max_abs_diff(&lhs, &rhs);
                (err > TWIST_TOL).then_some((vec![x, y], err))
            })
        });
        if let Some((at, err)) = action_err {
            return fail("β_xβ_y = ad(u(x,y))β_(x+y)", at, err);
        }
        let cocycle_err = (0..n * n * n).into_par_iter().find_map_first(|i| {
            let (x, y, z) = (i / (n * n), (i / n) % n, i % n);
            let lhs = self.u(x, y) * self.u(g.add(x, y), z) * self.phi.get(x, y, z).to_complex();
            let rhs = self.beta(x, self.u(y, z)) * self.u(x, g.add(y, z));
            let err = linalg::max_abs_diff(&lhs, &rhs);
            (err > TWIST_TOL).then_some((vec![x, y, z], err))
        });
        if let Some((at, err)) = cocycle_err {
            return fail("φ u(x,y) u(x+y,z) = β_x[u(y,z)] u(x,y+z)", at, err);
        }
        Ok(())
    }
}

/// A function `G → B`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedElement {
    pub entries: Vec<CMatrix>,
}

impl CrossedElement {
    pub fn zero(tw: &TwistData) -> Self {
        CrossedElement {
            entries: vec![CMatrix::zeros(tw.block, tw.block); tw.group.order()],
        }
    }

    /// `δ_0 ⊗ 1_B`.
    pub fn unit(tw: &TwistData) -> Self {
        let mut e = Self::zero(tw);
        e.entries[0] = CMatrix::identity(tw.block, tw.block);
        e
    }

    pub fn random<R: Rng + ?Sized>(tw: &TwistData, rng: &mut R) -> Self {
        CrossedElement {
            entries: (0..tw.group.order())
                .map(|_| linalg::random_matrix(tw.block, tw.block, rng))
                .collect(),
        }
    }

    pub fn max_diff(&self, other: &CrossedElement) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }
}

fn check_len<T>(v: &[T], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::TableSize {
            expected,
            got: v.len(),
        });
    }
    Ok(())
}

fn live(entries: &[CMatrix]) -> Vec<bool> {
    entries.iter().map(|m| linalg::max_abs(m) > 0.0).collect()
}

/// `(a⋆b)(s) = Σ_t a(t) β_t[b(s−t)] u(t, s−t)`.
pub fn lbs_product(a: &CrossedElement, b: &CrossedElement, tw: &TwistData) -> Result<CrossedElement> {
    let g = &tw.group;
    let n = g.order();
    check_len(&a.entries, n)?;
    check_len(&b.entries, n)?;
    let live_a = live(&a.entries);
    let live_b = live(&b.entries);
    let entries = (0..n)
        .map(|s| {
            let mut acc = CMatrix::zeros(tw.block, tw.block);
            for t in (0..n).filter(|&t| live_a[t]) {
                let r = g.sub(s, t);
                if live_b[r] {
                    acc += &a.entries[t] * tw.beta(t, &b.entries[r]) * tw.u(t, r);
                }
            }
            acc
        })
        .collect();
    Ok(CrossedElement { entries })
}

/// `a*(x) = u(x,−x)⁻¹ β_x[a(−x)]*`.
pub fn lbs_involution(a: &CrossedElement, tw: &TwistData) -> Result<CrossedElement> {
    let g = &tw.group;
    check_len(&a.entries, g.order())?;
    let entries = (0..g.order())
        .map(|x| {
            let mx = g.neg(x);
            tw.u_inv(x, mx) * tw.beta(x, &a.entries[mx]).adjoint()
        })
        .collect();
    Ok(CrossedElement { entries })
}

/// `(β̂_ξ a)(t) = e^{2πi⟨ξ,t⟩} a(t)`.
pub fn dual_action(xi: usize, a: &CrossedElement, tw: &TwistData) -> CrossedElement {
    let g = &tw.group;
    CrossedElement {
        entries: a
            .entries
            .iter()
            .enumerate()
            .map(|(t, m)| m * g.pairing_phase(xi, t).to_complex())
            .collect(),
    }
}

/// A function `G × G → B`, indexed `(t, x)`; `x` is the `C₀(G)` leg.
#[derive(Clone, Debug, PartialEq)]
pub struct StrictifiedElement {
    n: usize,
    pub entries: Vec<CMatrix>,
}

impl StrictifiedElement {
    pub fn zero(tw: &TwistData) -> Self {
        let n = tw.group.order();
        StrictifiedElement {
            n,
            entries: vec![CMatrix::zeros(tw.block, tw.block); n * n],
        }
    }

    /// `δ_{t,0} ⊗ 1_B`, constant in `x`.
    pub fn unit(tw: &TwistData) -> Self {
        let mut e = Self::zero(tw);
        for x in 0..e.n {
            e.entries[x] = CMatrix::identity(tw.block, tw.block);
        }
        e
    }

    pub fn from_fn(tw: &TwistData, mut f: impl FnMut(usize, usize) -> CMatrix) -> Self {
        let n = tw.group.order();
        StrictifiedElement {
            n,
            entries: (0..n * n).map(|i| f(i / n, i % n)).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(tw: &TwistData, rng: &mut R) -> Self {
        Self::from_fn(tw, |_, _| linalg::random_matrix(tw.block, tw.block, rng))
    }

    /// The matrix unit `E_ij` at `(t, x)`; `k` enumerates `(t, x, i, j)`.
    pub fn basis(tw: &TwistData, k: usize) -> Self {
        let b = tw.block;
        let n = tw.group.order();
        let (pos, ij) = (k / (b * b), k % (b * b));
        let mut e = Self::zero(tw);
        debug_assert!(pos < n * n);
        e.entries[pos][(ij / b, ij % b)] = c(1.0, 0.0);
        e
    }

    pub fn basis_len(tw: &TwistData) -> usize {
        tw.group.order().pow(2) * tw.block.pow(2)
    }

    #[inline]
    pub fn get(&self, t: usize, x: usize) -> &CMatrix {
        &self.entries[t * self.n + x]
    }

    pub fn max_diff(&self, other: &StrictifiedElement) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }
}

/// `(a⋆b)(s,x) = Σ_t e^{2πi(ψ+φ)(t,s−t,x)} a(t, s−t+x) β_t[b(s−t,x)] u(t,s−t)`.
pub fn strictified_product(
    a: &StrictifiedElement,
    b: &StrictifiedElement,
    tw: &TwistData,
    psi: &Cochain3,
) -> Result<StrictifiedElement> {
    let g = &tw.group;
    let n = g.order();
    check_len(&a.entries, n * n)?;
    check_len(&b.entries, n * n)?;
    let total = psi.checked_add(&tw.phi)?;
    let entries = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let (s, x) = (i / n, i % n);
            let mut acc = CMatrix::zeros(tw.block, tw.block);
            for t in 0..n {
                let r = g.sub(s, t);
                let w = total.get(t, r, x).to_complex();
                acc += a.get(t, g.add(r, x)) * tw.beta(t, b.get(r, x)) * tw.u(t, r) * w;
            }
            acc
        })
        .collect();
    Ok(StrictifiedElement { n, entries })
}

/// Which form of the duality transform to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformVariant {
    Full,
    /// Drops the `u` factor; only meaningful as a negative control.
    OmitMultiplier,
}

/// `ã(w,z) = β_w⁻¹[a(w−z, z) u(w−z, z)]`.
pub fn takai_transform(a: &StrictifiedElement, tw: &TwistData) -> TwistedKernel {
    transform_variant(a, tw, TransformVariant::Full)
}

pub fn transform_variant(a: &StrictifiedElement, tw: &TwistData, variant: TransformVariant) -> TwistedKernel {
    let g = &tw.group;
    TwistedKernel::from_fn(g, tw.block, |w, z| {
        let t = g.sub(w, z);
        match variant {
            TransformVariant::Full => tw.beta_inv(w, &(a.get(t, z) * tw.u(t, z))),
            TransformVariant::OmitMultiplier => tw.beta_inv(w, a.get(t, z)),
        }
    })
    .expect("block shapes are uniform")
}

/// `a(t,x) = β_{t+x}[ã(t+x, x)] u(t,x)⁻¹`.
pub fn inverse_takai_transform(k: &TwistedKernel, tw: &TwistData) -> Result<StrictifiedElement> {
    let g = &tw.group;
    if k.group() != g || k.block() != tw.block {
        return Err(Error::Dimension("kernel does not match the twist data".into()));
    }
    Ok(StrictifiedElement::from_fn(tw, |t, x| {
        let w = g.add(t, x);
        tw.beta(w, k.get(w, x)) * tw.u_inv(t, x)
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityWitness {
    pub pair: usize,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub pass: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub pairs: usize,
    pub exhaustive: bool,
    pub variant: TransformVariant,
    pub witness: Option<DualityWitness>,
}

/// Compare `T(a ⋆_{ψφ} b)` with `T(a) ⋆_ψ T(b)` (block kernels twisted by
/// `(w,v,z) ↦ ψ(w−v, v−z, z)`). Exhaustive on basis pairs when the basis has
/// at most [`EXHAUSTIVE_BASIS_LIMIT`] elements; otherwise `trials` seeded
/// random pairs.
pub fn verify_duality(tw: &TwistData, psi: &Cochain3, trials: usize, seed: u64, tol: f64) -> Result<DualityReport> {
    verify_duality_variant(tw, psi, trials, seed, tol, TransformVariant::Full)
}

pub fn verify_duality_variant(
    tw: &TwistData,
    psi: &Cochain3,
    trials: usize,
    seed: u64,
    tol: f64,
    variant: TransformVariant,
) -> Result<DualityReport> {
    if psi.group() != &tw.group {
        return Err(Error::IncompatibleGroups {
            left: tw.group.factors().to_vec(),
            right: psi.group().factors().to_vec(),
        });
    }
    let twist = KernelTwist::difference(psi);
    let basis = StrictifiedElement::basis_len(tw);
    let exhaustive = basis <= EXHAUSTIVE_BASIS_LIMIT;
    let pairs: Vec<(StrictifiedElement, StrictifiedElement)> = if exhaustive {
        (0..basis * basis)
            .map(|k| (StrictifiedElement::basis(tw, k / basis), StrictifiedElement::basis(tw, k % basis)))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..trials)
            .map(|_| (StrictifiedElement::random(tw, &mut rng), StrictifiedElement::random(tw, &mut rng)))
            .collect()
    };
    let errors: Vec<f64> = pairs
        .par_iter()
        .map(|(a, b)| {
            let lhs = transform_variant(&strictified_product(a, b, tw, psi)?, tw, variant);
            let rhs = kernel_product(
                &transform_variant(a, tw, variant),
                &transform_variant(b, tw, variant),
                &twist,
            )?;
            Ok(lhs.max_diff(&rhs))
        })
        .collect::<Result<_>>()?;
    let (worst_idx, max_error) = errors
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, e)| if e > acc.1 { (i, e) } else { acc });
    let pass = max_error < tol;
    Ok(DualityReport {
        pass,
        max_error,
        tolerance: tol,
        pairs: pairs.len(),
        exhaustive,
        variant,
        witness: (!pass).then_some(DualityWitness {
            pair: worst_idx,
            error: max_error,
        }),
    })
}

/// `(v·F)(x,z) = α_v[F(x+v, z+v)]`, for an honest action `α` on the
/// coefficients.
pub fn double_dual_action(v: usize, f: &TwistedKernel, alpha: &TwistData) -> TwistedKernel {
    let g = f.group();
    f.map_entries(|x, z, _| alpha.beta(v, f.get(g.add(x, v), g.add(z, v))))
}

/// Fourier-side picture of the strictified algebra at `ψ = −φ`: `C₀(G)`
/// leg transformed with the negative pairing, `â(η)(t) = Σ_x a(t,x) e^{−2πi⟨η,x⟩}`.
#[derive(Clone, Debug)]
pub struct DualSideElement {
    pub entries: Vec<CrossedElement>,
}

pub fn to_dual_side(a: &StrictifiedElement, tw: &TwistData) -> DualSideElement {
    let n = tw.group.order();
    let p = DualPairing::new(&tw.group);
    let entries = (0..n)
        .map(|eta| CrossedElement {
            entries: (0..n)
                .map(|t| {
                    let mut acc = CMatrix::zeros(tw.block, tw.block);
                    for x in 0..n {
                        acc += a.get(t, x) * p.value(eta, x).conj();
                    }
                    acc
                })
                .collect(),
        })
        .collect();
    DualSideElement { entries }
}

pub fn from_dual_side(f: &DualSideElement, tw: &TwistData) -> StrictifiedElement {
    let n = tw.group.order();
    let p = DualPairing::new(&tw.group);
    StrictifiedElement::from_fn(tw, |t, x| {
        let mut acc = CMatrix::zeros(tw.block, tw.block);
        for xi in 0..n {
            acc += &f.entries[xi].entries[t] * p.value(xi, x);
        }
        acc / c(n as f64, 0.0)
    })
}

/// Ordinary crossed product of `B ⋊_{β,u} G` by the dual action, with
/// normalized measure on `Ĝ`: `(f⋆g)(ξ) = |G|⁻¹ Σ_η f(η) ⋆ β̂_η[g(ξ−η)]`.
pub fn dual_crossed_product(f: &DualSideElement, g: &DualSideElement, tw: &TwistData) -> Result<DualSideElement> {
    let grp = &tw.group;
    let n = grp.order();
    let scale = c(1.0 / n as f64, 0.0);
    let live_f: Vec<bool> = f.entries.iter().map(|e| live(&e.entries).contains(&true)).collect();
    let entries = (0..n)
        .map(|xi| {
            let mut acc = CrossedElement::zero(tw);
            for eta in (0..n).filter(|&eta| live_f[eta]) {
                let term = lbs_product(&f.entries[eta], &dual_action(eta, &g.entries[grp.sub(xi, eta)], tw), tw)?;
                for (a, t) in acc.entries.iter_mut().zip(term.entries) {
                    *a += t * scale;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(DualSideElement { entries })
}

/// Fourier-side multiplication in `B ⋊_α Ĝ` (counting measure):
/// `(f⋆g)(ξ) = Σ_η f(η) α_η[g(ξ−η)]`, on `f = â`, `g = b̂`.
pub fn fourier_side_product(a: &CrossedElement, b: &CrossedElement, alpha: &TwistData) -> Result<CrossedElement> {
    let p = DualPairing::new(&alpha.group);
    let fa = fourier_blocks(a, &p);
    let fb = fourier_blocks(b, &p);
    let prod = lbs_product(&fa, &fb, alpha)?;
    Ok(inverse_fourier_blocks(&prod, &p))
}

/// `(a⋆b)(x) = Σ_{z,η} a(z+x) e^{2πi⟨η,z⟩} α_η[b(x)]`: the operator
/// `a_x = Σ_η â_x(η) α_η` applied to `b(x)`.
pub fn evaluation_product(a: &CrossedElement, b: &CrossedElement, alpha: &TwistData) -> Result<CrossedElement> {
    let g = &alpha.group;
    let n = g.order();
    check_len(&a.entries, n)?;
    check_len(&b.entries, n)?;
    let entries = (0..n)
        .map(|x| {
            let mut acc = CMatrix::zeros(alpha.block, alpha.block);
            for eta in 0..n {
                let moved = alpha.beta(eta, &b.entries[x]);
                for z in 0..n {
                    acc += &a.entries[g.add(z, x)] * &moved * g.pairing_phase(eta, z).to_complex();
                }
            }
            acc
        })
        .collect();
    Ok(CrossedElement { entries })
}

fn fourier_blocks(a: &CrossedElement, p: &DualPairing) -> CrossedElement {
    let n = p.group().order();
    CrossedElement {
        entries: (0..n)
            .map(|xi| {
                let mut acc = CMatrix::zeros(a.entries[0].nrows(), a.entries[0].ncols());
                for x in 0..n {
                    acc += &a.entries[x] * p.value(xi, x);
                }
                acc
            })
            .collect(),
    }
}

fn inverse_fourier_blocks(f: &CrossedElement, p: &DualPairing) -> CrossedElement {
    let n = p.group().order();
    CrossedElement {
        entries: (0..n)
            .map(|x| {
                let mut acc = CMatrix::zeros(f.entries[0].nrows(), f.entries[0].ncols());
                for xi in 0..n {
                    acc += &f.entries[xi] * p.value(xi, x).conj();
                }
                acc / c(n as f64, 0.0)
            })
            .collect(),
    }
}

/// `α_η = ad(diag(1, e^{2πi⟨η,1⟩}, …))` on `M_b`: a diagonal action of a
/// cyclic-type group by characters of its first coordinate.
pub fn diagonal_phase_action(group: &FiniteAbelianGroup, block: usize) -> Result<TwistData> {
    let unitaries = (0..group.order())
        .map(|eta| {
            let d: Vec<Complex64> = (0..block)
                .map(|k| Phase::new((k as i64) * group.coord(eta, 0) as i64, group.factors()[0] as u64).to_complex())
                .collect();
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
        })
        .collect();
    TwistData::action(group, unitaries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::Tricharacter;
    use crate::twisted_algebra::{octonion_multiplier, TwistedGroupAlgebra};

    fn octonion_twist(block: usize, seed: u64) -> TwistData {
        let phi = Tricharacter::octonion().to_cochain3();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = TwistData::random_perturbation(phi.group(), block, &mut rng);
        TwistData::perturbed(&octonion_multiplier(), &phi, v).unwrap()
    }

    #[test]
    fn twist_validation_rejects_bad_multiplier() {
        let phi = Tricharacter::octonion().to_cochain3();
        let g = phi.group();
        assert!(matches!(
            TwistData::scalar(&Cochain2::zero(g), &phi, 1),
            Err(Error::TwistRelation { .. })
        ));
        assert!(TwistData::scalar(&octonion_multiplier(), &phi, 1).is_ok());
    }

    #[test]
    fn untwisted_lbs_is_group_convolution() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let tw = TwistData::scalar(&Cochain2::zero(&g), &Cochain3::zero(&g), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = CrossedElement::random(&tw, &mut rng);
        let b = CrossedElement::random(&tw, &mut rng);
        let p = lbs_product(&a, &b, &tw).unwrap();
        for s in 0..4 {
            let mut acc = CMatrix::zeros(2, 2);
            for t in 0..4 {
                acc += &a.entries[t] * &b.entries[(s + 4 - t) % 4];
            }
            assert!(linalg::max_abs_diff(&p.entries[s], &acc) < 1e-13);
        }
    }

    #[test]
    fn scalar_lbs_is_octonion_product() {
        let phi = Tricharacter::octonion().to_cochain3();
        let tw = TwistData::scalar(&octonion_multiplier(), &phi, 1).unwrap();
        let o = TwistedGroupAlgebra::octonions();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = o.random(&mut rng);
            let y = o.random(&mut rng);
            let cx = CrossedElement {
                entries: x.coeffs().iter().map(|&z| CMatrix::from_element(1, 1, z)).collect(),
            };
            let cy = CrossedElement {
                entries: y.coeffs().iter().map(|&z| CMatrix::from_element(1, 1, z)).collect(),
            };
            let p = lbs_product(&cx, &cy, &tw).unwrap();
            let q = x.mul(&y).unwrap();
            for s in 0..8 {
                assert!((p.entries[s][(0, 0)] - q.coeffs()[s]).norm() < 1e-13);
            }
            let ix = lbs_involution(&cx, &tw).unwrap();
            let jx = o.involution(&x).unwrap();
            for s in 0..8 {
                assert!((ix.entries[s][(0, 0)] - jx.coeffs()[s]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn unit_and_involution() {
        let tw = octonion_twist(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = CrossedElement::random(&tw, &mut rng);
        let one = CrossedElement::unit(&tw);
        assert!(lbs_product(&one, &a, &tw).unwrap().max_diff(&a) < 1e-13);
        assert!(lbs_product(&a, &one, &tw).unwrap().max_diff(&a) < 1e-13);
        assert!(lbs_involution(&one, &tw).unwrap().max_diff(&one) < 1e-13);
        let back = lbs_involution(&lbs_involution(&a, &tw).unwrap(), &tw).unwrap();
        assert!(back.max_diff(&a) < 1e-12);
    }

    #[test]
    fn dual_action_properties() {
        let tw = octonion_twist(2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = CrossedElement::random(&tw, &mut rng);
        let b = CrossedElement::random(&tw, &mut rng);
        assert_eq!(dual_action(0, &a, &tw), a);
        for xi in 0..8 {
            let lhs = dual_action(xi, &lbs_product(&a, &b, &tw).unwrap(), &tw);
            let rhs = lbs_product(&dual_action(xi, &a, &tw), &dual_action(xi, &b, &tw), &tw).unwrap();
            assert!(lhs.max_diff(&rhs) < 1e-12);
        }
        let mut orbit = CrossedElement::zero(&tw);
        for xi in 0..8 {
            for (o, e) in orbit.entries.iter_mut().zip(dual_action(xi, &a, &tw).entries) {
                *o += e;
            }
        }
        let mut expect = CrossedElement::zero(&tw);
        expect.entries[0] = &a.entries[0] * c(8.0, 0.0);
        assert!(orbit.max_diff(&expect) < 1e-12);
    }

    #[test]
    fn transform_round_trip() {
        let tw = octonion_twist(2, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = StrictifiedElement::random(&tw, &mut rng);
        let back = inverse_takai_transform(&takai_transform(&a, &tw), &tw).unwrap();
        assert!(back.max_diff(&a) < 1e-12);
        let k = TwistedKernel::random(tw.group(), 2, &mut rng);
        let again = takai_transform(&inverse_takai_transform(&k, &tw).unwrap(), &tw);
        assert!(again.max_diff(&k) < 1e-12);
        let unit = takai_transform(&StrictifiedElement::unit(&tw), &tw);
        assert!(unit.max_diff(&TwistedKernel::identity(tw.group(), 2)) < 1e-12);
    }

    #[test]
    fn trivial_transform_is_reindexing() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let tw = TwistData::scalar(&Cochain2::zero(&g), &Cochain3::zero(&g), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = StrictifiedElement::random(&tw, &mut rng);
        let k = takai_transform(&a, &tw);
        for w in 0..4 {
            for z in 0..4 {
                assert_eq!(k.get(w, z), a.get(g.sub(w, z), z));
            }
        }
    }

    #[test]
    fn strictified_unit() {
        let tw = octonion_twist(2, 10);
        let phi = tw.phi().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = StrictifiedElement::random(&tw, &mut rng);
        let one = StrictifiedElement::unit(&tw);
        for psi in [Cochain3::zero(tw.group()), phi.negate()] {
            assert!(strictified_product(&one, &a, &tw, &psi).unwrap().max_diff(&a) < 1e-12);
            assert!(strictified_product(&a, &one, &tw, &psi).unwrap().max_diff(&a) < 1e-12);
        }
    }

    #[test]
    fn duality_regimes_small() {
        let tw = octonion_twist(2, 12);
        let phi = tw.phi().clone();
        let g = tw.group().clone();
        let generic = Cochain3::from_fn(&g, |a, b, c| {
            Phase::new((g.coord(a, 0) * g.coord(b, 1) * g.coord(c, 2)) as i64, 2)
        })
        .unwrap();
        for psi in [Cochain3::zero(&g), phi.negate(), generic] {
            let r = verify_duality(&tw, &psi, 10, 1, 1e-10).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let bad = verify_duality_variant(&tw, &Cochain3::zero(&g), 10, 1, 1e-10, TransformVariant::OmitMultiplier)
            .unwrap();
        assert!(bad.max_error > 1e-3);
    }

    #[test]
    fn exhaustive_duality_on_scalars() {
        let g = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let t = Cochain2::bicharacter(&g, &[vec![0, 1], vec![0, 0]], 2).unwrap();
        let tw = TwistData::scalar(&t, &Cochain3::zero(&g), 1).unwrap();
        let r = verify_duality(&tw, &Cochain3::zero(&g), 0, 0, 1e-10).unwrap();
        assert!(r.exhaustive && r.pass && r.pairs == 256);
    }

    #[test]
    fn strict_product_at_inverse_twist_is_ordinary_crossed_product() {
        let tw = octonion_twist(2, 13);
        let psi = tw.phi().negate();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..5 {
            let a = StrictifiedElement::random(&tw, &mut rng);
            let b = StrictifiedElement::random(&tw, &mut rng);
            let strict = strictified_product(&a, &b, &tw, &psi).unwrap();
            let dual = dual_crossed_product(&to_dual_side(&a, &tw), &to_dual_side(&b, &tw), &tw).unwrap();
            assert!(from_dual_side(&dual, &tw).max_diff(&strict) < 1e-12);
        }
    }

    #[test]
    fn fourier_side_matches_evaluation() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for block in [1, 2] {
            let alpha = diagonal_phase_action(&g, block).unwrap();
            for _ in 0..10 {
                let a = CrossedElement::random(&alpha, &mut rng);
                let b = CrossedElement::random(&alpha, &mut rng);
                let lhs = fourier_side_product(&a, &b, &alpha).unwrap();
                let rhs = evaluation_product(&a, &b, &alpha).unwrap();
                assert!(lhs.max_diff(&rhs) < 1e-12);
            }
        }
    }

    #[test]
    fn double_dual_is_action() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let alpha = diagonal_phase_action(&g, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let f = TwistedKernel::random(&g, 2, &mut rng);
        assert_eq!(double_dual_action(0, &f, &alpha), f);
        for v in 0..4 {
            for w in 0..4 {
                let lhs = double_dual_action(v, &double_dual_action(w, &f, &alpha), &alpha);
                let rhs = double_dual_action(g.add(v, w), &f, &alpha);
                assert!(lhs.max_diff(&rhs) < 1e-13);
            }
        }
        let trivial = TwistData::action(&g, vec![CMatrix::identity(2, 2); 4]).unwrap();
        let moved = double_dual_action(1, &f, &trivial);
        assert_eq!(moved.get(0, 2), f.get(1, 3));
    }
}

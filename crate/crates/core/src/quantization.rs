//! Deformation of a `G`-graded matrix algebra by a 3-cocycle on the dual.
//!
//! A [`GAction`] presents a unital *-algebra `A ⊂ M_d` with a `G`-action.
//! Elements of the deformed algebra are [`GradedElement`]s: one block per
//! character `χ`, living in `A_χ ⊗ End(ℓ²(Ĝ) ⊗ C^m)` and stored as a
//! `D × D` matrix, `D = d·|G|·m`, with tensor order `H ⊗ ℓ²(Ĝ) ⊗ C^m`
//! (row index `(i·|G| + g)·m + k`).

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{multiplier_from_phi, Cochain2, Cochain3, Phase};
use crate::error::{Error, Result};
use crate::group::{DualPairing, FiniteAbelianGroup};
use crate::linalg::{self, c, CMatrix};

const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    /// Diagonal matrices: functions on `d` points.
    Functions,
    /// All of `M_d`.
    Matrix,
}

/// How one group generator acts.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `(α a)(p, q) = a(π(p), π(q))`; on functions `(α f)(p) = f(π(p))`.
    Permutation(Vec<usize>),
    /// `α a = W a W*`.
    Unitary(CMatrix),
}

#[derive(Clone, Debug)]
enum Automorphism {
    Permutation(Vec<usize>),
    Unitary(CMatrix),
}

impl Automorphism {
    fn apply(&self, a: &CMatrix) -> CMatrix {
        match self {
            Automorphism::Permutation(pi) => CMatrix::from_fn(a.nrows(), a.ncols(), |p, q| a[(pi[p], pi[q])]),
            Automorphism::Unitary(w) => w * a * w.adjoint(),
        }
    }

    /// `α ⊗ id` on `H ⊗ K`, `K` of dimension `inner`.
    fn apply_extended(&self, x: &CMatrix, inner: usize) -> CMatrix {
        match self {
            Automorphism::Permutation(pi) => CMatrix::from_fn(x.nrows(), x.ncols(), |r, s| {
                x[(pi[r / inner] * inner + r % inner, pi[s / inner] * inner + s % inner)]
            }),
            Automorphism::Unitary(w) => {
                let big = w.kronecker(&CMatrix::identity(inner, inner));
                &big * x * big.adjoint()
            }
        }
    }

    /// `self ∘ other` as automorphisms: apply `other` first.
    fn after(&self, other: &Automorphism) -> Automorphism {
        match (self, other) {
            (Automorphism::Permutation(p), Automorphism::Permutation(q)) => {
                // (α_p(α_q a))(r) = (α_q a)(p(r)) = a(q(p(r)))
                Automorphism::Permutation(p.iter().map(|&r| q[r]).collect())
            }
            _ => Automorphism::Unitary(self.to_unitary(self.dim()) * other.to_unitary(self.dim())),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Automorphism::Permutation(p) => p.len(),
            Automorphism::Unitary(w) => w.nrows(),
        }
    }

    fn to_unitary(&self, d: usize) -> CMatrix {
        match self {
            Automorphism::Permutation(p) => linalg::permutation_matrix(p),
            Automorphism::Unitary(w) => {
                debug_assert_eq!(w.nrows(), d);
                w.clone()
            }
        }
    }
}

/// A finite abelian group acting on a matrix algebra.
#[derive(Clone, Debug)]
pub struct GAction(Arc<ActionInner>);

#[derive(Debug)]
struct ActionInner {
    group: FiniteAbelianGroup,
    kind: AlgebraKind,
    dim: usize,
    /// `α_t` for every `t`, composed from the generators in coordinate order.
    automorphisms: Vec<Automorphism>,
    pairing: DualPairing,
    spanning: Vec<CMatrix>,
}

impl PartialEq for GAction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomomorphismWitness {
    pub s: Vec<u32>,
    pub t: Vec<u32>,
    pub basis_element: usize,
    pub error: f64,
}

impl GAction {
    /// Validated action: `α_s ∘ α_t = α_{s+t}` on a spanning set.
    pub fn new(group: &FiniteAbelianGroup, kind: AlgebraKind, dim: usize, generators: Vec<Generator>) -> Result<Self> {
        let action = Self::new_unchecked(group, kind, dim, generators)?;
        if let Some(w) = action.homomorphism_witness(1e-10) {
            return Err(Error::InvalidAction(format!(
                "α_s∘α_t ≠ α_(s+t) at s={:?}, t={:?} (basis element {}, error {:e})",
                w.s, w.t, w.basis_element, w.error
            )));
        }
        Ok(action)
    }

    /// Shape-checked but not checked to be a homomorphism. Useful for
    /// diagnosing broken actions with [`grading_check`].
    pub fn new_unchecked(
        group: &FiniteAbelianGroup,
        kind: AlgebraKind,
        dim: usize,
        generators: Vec<Generator>,
    ) -> Result<Self> {
        if generators.len() != group.rank() {
            return Err(Error::InvalidAction(format!(
                "need one generator per cyclic factor ({}), got {}",
                group.rank(),
                generators.len()
            )));
        }
        let mut gens = Vec::with_capacity(generators.len());
        for (k, g) in generators.into_iter().enumerate() {
            match g {
                Generator::Permutation(p) => {
                    let mut seen = vec![false; dim];
                    if p.len() != dim || p.iter().any(|&i| i >= dim || std::mem::replace(&mut seen[i], true)) {
                        return Err(Error::InvalidAction(format!("generator {k} is not a permutation of {dim} points")));
                    }
                    gens.push(Automorphism::Permutation(p));
                }
                Generator::Unitary(w) => {
                    if kind == AlgebraKind::Functions {
                        return Err(Error::InvalidAction(
                            "function algebras are acted on by permutations".into(),
                        ));
                    }
                    if w.shape() != (dim, dim) {
                        return Err(Error::InvalidAction(format!("generator {k} is not {dim}×{dim}")));
                    }
                    if linalg::unitarity_defect(&w) > 1e-10 {
                        return Err(Error::InvalidAction(format!("generator {k} is not unitary")));
                    }
                    gens.push(Automorphism::Unitary(w));
                }
            }
        }
        let identity = Automorphism::Permutation((0..dim).collect());
        let automorphisms = (0..group.order())
            .map(|t| {
                let mut acc = identity.clone();
                for (k, g) in gens.iter().enumerate() {
                    for _ in 0..group.coord(t, k) {
                        acc = g.after(&acc);
                    }
                }
                acc
            })
            .collect();
        let spanning = match kind {
            AlgebraKind::Functions => (0..dim)
                .map(|i| {
                    let mut m = CMatrix::zeros(dim, dim);
                    m[(i, i)] = c(1.0, 0.0);
                    m
                })
                .collect(),
            AlgebraKind::Matrix => (0..dim * dim)
                .map(|i| {
                    let mut m = CMatrix::zeros(dim, dim);
                    m[(i / dim, i % dim)] = c(1.0, 0.0);
                    m
                })
                .collect(),
        };
        Ok(GAction(Arc::new(ActionInner {
            group: group.clone(),
            kind,
            dim,
            automorphisms,
            pairing: DualPairing::new(group),
            spanning,
        })))
    }

    /// Functions on `G` with `(α_t f)(x) = f(x + t)`.
    pub fn translation(group: &FiniteAbelianGroup) -> Self {
        let gens = (0..group.rank())
            .map(|k| {
                let mut unit = vec![0u32; group.rank()];
                unit[k] = 1;
                let e = group.index_of(&unit).expect("unit vector");
                Generator::Permutation((0..group.order()).map(|x| group.add(x, e)).collect())
            })
            .collect();
        Self::new(group, AlgebraKind::Functions, group.order(), gens).expect("translation is an action")
    }

    /// `(Z/2)³` acting on `M_4 = M_2 ⊗ M_2` by `ad(X⊗1)`, `ad(Z⊗1)`, `ad(1⊗X)`.
    pub fn pauli_m4() -> Self {
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let z = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let i2 = CMatrix::identity(2, 2);
        let gens = vec![
            Generator::Unitary(x.kronecker(&i2)),
            Generator::Unitary(z.kronecker(&i2)),
            Generator::Unitary(i2.kronecker(&x)),
        ];
        Self::new(&FiniteAbelianGroup::elementary_abelian(3), AlgebraKind::Matrix, 4, gens)
            .expect("Pauli conjugations commute and square to the identity")
    }

    /// The trivial action on `M_d` or on functions on `d` points.
    pub fn trivial(group: &FiniteAbelianGroup, kind: AlgebraKind, dim: usize) -> Self {
        let gens = (0..group.rank()).map(|_| Generator::Permutation((0..dim).collect())).collect();
        Self::new(group, kind, dim, gens).expect("identity is an action")
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.0.group
    }

    pub fn kind(&self) -> AlgebraKind {
        self.0.kind
    }

    /// Size `d` of the defining matrices.
    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn spanning_set(&self) -> &[CMatrix] {
        &self.0.spanning
    }

    /// Whether `a` lies in `A` (diagonal for function algebras).
    pub fn contains(&self, a: &CMatrix) -> bool {
        a.shape() == (self.dim(), self.dim())
            && (self.kind() == AlgebraKind::Matrix
                || (0..self.dim()).all(|i| (0..self.dim()).all(|j| i == j || a[(i, j)].norm() < MEMBERSHIP_TOL)))
    }

    pub fn apply(&self, t: usize, a: &CMatrix) -> CMatrix {
        self.0.automorphisms[t].apply(a)
    }

    fn apply_extended(&self, t: usize, x: &CMatrix) -> CMatrix {
        self.0.automorphisms[t].apply_extended(x, x.nrows() / self.dim())
    }

    /// `P_χ(a) = |G|⁻¹ Σ_t e^{−2πi⟨χ,t⟩} α_t(a)`.
    pub fn project(&self, chi: usize, a: &CMatrix) -> CMatrix {
        let n = self.group().order();
        let mut acc = CMatrix::zeros(a.nrows(), a.ncols());
        for t in 0..n {
            acc += self.apply(t, a) * self.0.pairing.value(chi, t).conj();
        }
        acc / c(n as f64, 0.0)
    }

    /// `P_χ ⊗ id` after the conditional expectation onto `A ⊗ End`.
    pub fn project_extended(&self, chi: usize, x: &CMatrix) -> CMatrix {
        let x = self.expectation(x);
        let n = self.group().order();
        let mut acc = CMatrix::zeros(x.nrows(), x.ncols());
        for t in 0..n {
            acc += self.apply_extended(t, &x) * self.0.pairing.value(chi, t).conj();
        }
        acc / c(n as f64, 0.0)
    }

    /// Conditional expectation of `M_d ⊗ End(K)` onto `A ⊗ End(K)`.
    fn expectation(&self, x: &CMatrix) -> CMatrix {
        match self.kind() {
            AlgebraKind::Matrix => x.clone(),
            AlgebraKind::Functions => {
                let inner = x.nrows() / self.dim();
                CMatrix::from_fn(x.nrows(), x.ncols(), |r, s| {
                    if r / inner == s / inner {
                        x[(r, s)]
                    } else {
                        c(0.0, 0.0)
                    }
                })
            }
        }
    }

    /// First failure of `α_s∘α_t = α_{s+t}` on the spanning set.
    pub fn homomorphism_witness(&self, tol: f64) -> Option<HomomorphismWitness> {
        let g = self.group();
        let n = g.order();
        (0..n * n).into_par_iter().find_map_first(|i| {
            let (s, t) = (i / n, i % n);
            let st = g.add(s, t);
            self.spanning_set().iter().enumerate().find_map(|(k, a)| {
                let err = linalg::max_abs_diff(&self.apply(s, &self.apply(t, a)), &self.apply(st, a));
                (err > tol).then(|| HomomorphismWitness {
                    s: g.coords(s),
                    t: g.coords(t),
                    basis_element: k,
                    error: err,
                })
            })
        })
    }

    /// An orthonormal (Hilbert–Schmidt) basis of `A_χ`.
    pub fn isotypic_basis(&self, chi: usize) -> Vec<CMatrix> {
        let mut basis: Vec<CMatrix> = Vec::new();
        for a in self.spanning_set() {
            let mut v = self.project(chi, a);
            for q in &basis {
                let ip = hs_inner(q, &v);
                v -= q * ip;
            }
            let norm = v.norm();
            if norm > 1e-8 {
                basis.push(v / c(norm, 0.0));
            }
        }
        basis
    }
}

/// `tr(a* b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// The character `x ↦ e^{2πi⟨χ,x⟩}` as a diagonal matrix; it lies in the
/// `χ`-isotypic part of the translation action.
pub fn character_function(group: &FiniteAbelianGroup, chi: usize) -> CMatrix {
    let d: Vec<Complex64> = (0..group.order()).map(|x| group.pairing_phase(chi, x).to_complex()).collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
}

pub fn isotypic_projection(action: &GAction, a: &CMatrix, chi: usize) -> CMatrix {
    action.project(chi, a)
}

#[derive(Clone, Debug, Serialize)]
pub struct GradingWitness {
    pub relation: &'static str,
    pub chi: Vec<u32>,
    pub eta: Vec<u32>,
    pub a: usize,
    pub b: usize,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradingReport {
    pub pass: bool,
    pub max_error: f64,
    pub witness: Option<GradingWitness>,
}

/// Check `A_χ·A_η ⊆ A_{χ+η}` and `A_χ* = A_{−χ}` on the spanning set, plus
/// `P_χP_η = δ P_χ` and `Σ P_χ = id`.
pub fn grading_check(action: &GAction, tol: f64) -> GradingReport {
    let g = action.group().clone();
    let n = g.order();
    let span = action.spanning_set();
    let proj: Vec<Vec<CMatrix>> = (0..n)
        .into_par_iter()
        .map(|chi| span.iter().map(|a| action.project(chi, a)).collect())
        .collect();

    let mut worst = 0.0f64;
    let mut witness: Option<GradingWitness> = None;
    let mut note = |relation: &'static str, chi: usize, eta: usize, a: usize, b: usize, err: f64| {
        worst = worst.max(err);
        if err > tol && witness.is_none() {
            witness = Some(GradingWitness {
                relation,
                chi: g.coords(chi),
                eta: g.coords(eta),
                a,
                b,
                error: err,
            });
        }
    };

    for (k, a) in span.iter().enumerate() {
        let total: CMatrix = proj.iter().map(|p| &p[k]).sum();
        note("completeness", 0, 0, k, k, linalg::max_abs_diff(&total, a));
    }

    let results: Vec<(usize, usize, usize, usize, &'static str, f64)> = (0..n * n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let (chi, eta) = (i / n, i % n);
            let sum = g.add(chi, eta);
            let mut out = Vec::new();
            for (ka, pa) in proj[chi].iter().enumerate() {
                let twice = action.project(eta, pa);
                let expect = if chi == eta { pa.clone() } else { CMatrix::zeros(pa.nrows(), pa.ncols()) };
                out.push((chi, eta, ka, ka, "orthogonality", linalg::max_abs_diff(&twice, &expect)));
                if eta == 0 {
                    let adj = pa.adjoint();
                    let err = linalg::max_abs_diff(&action.project(g.neg(chi), &adj), &adj);
                    out.push((chi, chi, ka, ka, "adjoint", err));
                }
                for (kb, pb) in proj[eta].iter().enumerate() {
                    let prod = pa * pb;
                    let err = linalg::max_abs_diff(&action.project(sum, &prod), &prod);
                    out.push((chi, eta, ka, kb, "product", err));
                }
            }
            out
        })
        .collect();
    for (chi, eta, a, b, rel, err) in results {
        note(rel, chi, eta, a, b, err);
    }
    GradingReport {
        pass: witness.is_none(),
        max_error: worst,
        witness,
    }
}

/// An element of the deformed algebra: one `D × D` block per character.
#[derive(Clone, Debug)]
pub struct GradedElement {
    action: GAction,
    multiplicity: usize,
    components: Vec<CMatrix>,
}

impl GradedElement {
    pub fn block_dim(action: &GAction, multiplicity: usize) -> usize {
        action.dim() * action.group().order() * multiplicity
    }

    pub fn zero(action: &GAction, multiplicity: usize) -> Self {
        let d = Self::block_dim(action, multiplicity);
        GradedElement {
            action: action.clone(),
            multiplicity,
            components: vec![CMatrix::zeros(d, d); action.group().order()],
        }
    }

    pub fn unit(action: &GAction, multiplicity: usize) -> Self {
        let mut e = Self::zero(action, multiplicity);
        let d = e.dim();
        e.components[0] = CMatrix::identity(d, d);
        e
    }

    /// `a ↦ Σ_χ P_χ(a) ⊗ 1`.
    pub fn from_algebra(action: &GAction, multiplicity: usize, a: &CMatrix) -> Result<Self> {
        if !action.contains(a) {
            return Err(Error::Dimension("element is not in the algebra".into()));
        }
        let inner = CMatrix::identity(action.group().order() * multiplicity, action.group().order() * multiplicity);
        let components = (0..action.group().order())
            .map(|chi| action.project(chi, a).kronecker(&inner))
            .collect();
        Ok(GradedElement {
            action: action.clone(),
            multiplicity,
            components,
        })
    }

    /// A single block in degree `χ`; must lie in `A_χ ⊗ End(ℓ²(Ĝ) ⊗ C^m)`.
    pub fn homogeneous(action: &GAction, multiplicity: usize, chi: usize, block: CMatrix) -> Result<Self> {
        let mut e = Self::zero(action, multiplicity);
        e.set_component(chi, block)?;
        Ok(e)
    }

    pub fn from_components(action: &GAction, multiplicity: usize, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != action.group().order() {
            return Err(Error::Dimension(format!(
                "expected {} components, got {}",
                action.group().order(),
                blocks.len()
            )));
        }
        let mut e = Self::zero(action, multiplicity);
        for (chi, b) in blocks.into_iter().enumerate() {
            e.set_component(chi, b)?;
        }
        Ok(e)
    }

    fn set_component(&mut self, chi: usize, block: CMatrix) -> Result<()> {
        let d = self.dim();
        if block.shape() != (d, d) {
            return Err(Error::Dimension(format!("component must be {d}×{d}, got {:?}", block.shape())));
        }
        let scale = linalg::max_abs(&block).max(1.0);
        let err = linalg::max_abs_diff(&self.action.project_extended(chi, &block), &block);
        if err > MEMBERSHIP_TOL * scale {
            return Err(Error::InvalidAction(format!(
                "component is not in the isotypic part of degree {:?} (error {err:e})",
                self.action.group().coords(chi)
            )));
        }
        self.components[chi] = block;
        Ok(())
    }

    /// Random element; with `diagonal_leg` the `ℓ²(Ĝ) ⊗ C^m` leg is diagonal.
    pub fn random<R: Rng + ?Sized>(action: &GAction, multiplicity: usize, diagonal_leg: bool, rng: &mut R) -> Self {
        let n = action.group().order();
        let comps = (0..n).map(|chi| random_block(action, multiplicity, chi, diagonal_leg, rng)).collect();
        GradedElement {
            action: action.clone(),
            multiplicity,
            components: comps,
        }
    }

    pub fn random_homogeneous<R: Rng + ?Sized>(
        action: &GAction,
        multiplicity: usize,
        chi: usize,
        diagonal_leg: bool,
        rng: &mut R,
    ) -> Self {
        let mut e = Self::zero(action, multiplicity);
        e.components[chi] = random_block(action, multiplicity, chi, diagonal_leg, rng);
        e
    }

    pub fn action(&self) -> &GAction {
        &self.action
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// Block size `D`.
    pub fn dim(&self) -> usize {
        Self::block_dim(&self.action, self.multiplicity)
    }

    pub fn component(&self, chi: usize) -> &CMatrix {
        &self.components[chi]
    }

    pub fn components(&self) -> &[CMatrix] {
        &self.components
    }

    /// `Σ_χ a_χ`.
    pub fn reassemble(&self) -> CMatrix {
        self.components.iter().sum()
    }

    pub fn max_diff(&self, other: &GradedElement) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, k: Complex64) -> GradedElement {
        GradedElement {
            action: self.action.clone(),
            multiplicity: self.multiplicity,
            components: self.components.iter().map(|a| a * k).collect(),
        }
    }

    pub fn add(&self, other: &GradedElement) -> Result<GradedElement> {
        self.compatible(other)?;
        Ok(GradedElement {
            action: self.action.clone(),
            multiplicity: self.multiplicity,
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        })
    }

    fn compatible(&self, other: &GradedElement) -> Result<()> {
        if self.action != other.action || self.multiplicity != other.multiplicity {
            return Err(Error::ParentMismatch("graded elements over different actions or multiplicities".into()));
        }
        Ok(())
    }

    /// `Φ(a) = Σ_χ a_χ (1 ⊗ ρ(χ) ⊗ 1)`.
    pub fn intertwine(&self) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for (chi, a) in self.components.iter().enumerate() {
            let pi = shift_permutation(&self.action, self.multiplicity, chi);
            // (X R)[r][c] = X[r][π⁻¹(c)]
            for s in 0..d {
                let col = pi[s];
                for r in 0..d {
                    out[(r, col)] += a[(r, s)];
                }
            }
        }
        out
    }

    /// Inverse of [`intertwine`](Self::intertwine) on its image.
    pub fn from_intertwined(action: &GAction, multiplicity: usize, y: &CMatrix) -> Result<Self> {
        let d = Self::block_dim(action, multiplicity);
        if y.shape() != (d, d) {
            return Err(Error::Dimension(format!("expected {d}×{d}")));
        }
        let comps = (0..action.group().order())
            .map(|chi| {
                let x = action.project_extended(chi, y);
                let pi = shift_permutation(action, multiplicity, chi);
                // multiply by R_χ* : (X R*)[r][c] = X[r][π(c)]
                CMatrix::from_fn(d, d, |r, col| x[(r, pi[col])])
            })
            .collect();
        Ok(GradedElement {
            action: action.clone(),
            multiplicity,
            components: comps,
        })
    }
}

fn random_block<R: Rng + ?Sized>(
    action: &GAction,
    multiplicity: usize,
    chi: usize,
    diagonal_leg: bool,
    rng: &mut R,
) -> CMatrix {
    let inner = action.group().order() * multiplicity;
    let mut acc = CMatrix::zeros(action.dim() * inner, action.dim() * inner);
    for _ in 0..2 {
        let a = action.project(chi, &linalg::random_matrix(action.dim(), action.dim(), rng));
        let a = if action.kind() == AlgebraKind::Functions {
            CMatrix::from_diagonal(&a.diagonal())
        } else {
            a
        };
        let leg = if diagonal_leg {
            let v: Vec<Complex64> = (0..inner).map(|_| linalg::random_complex(rng)).collect();
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))
        } else {
            linalg::random_matrix(inner, inner, rng)
        };
        acc += a.kronecker(&leg);
    }
    acc
}

/// `π` with `(1 ⊗ ρ(χ) ⊗ 1) v = v ∘ π`, i.e. `(i,g,k) ↦ (i, g+χ, k)`.
fn shift_permutation(action: &GAction, multiplicity: usize, chi: usize) -> Vec<usize> {
    let g = action.group();
    let n = g.order();
    let m = multiplicity;
    (0..action.dim() * n * m)
        .map(|r| {
            let (i, rest) = (r / (n * m), r % (n * m));
            let (gi, k) = (rest / m, rest % m);
            (i * n + g.add(gi, chi)) * m + k
        })
        .collect()
}

/// The `φ`-deformation (optionally pre-twisted by a 2-cocycle `σ`).
#[derive(Clone, Debug)]
pub struct Deformation {
    phi: Cochain3,
    sigma: Option<Cochain2>,
    /// `e^{2πiφ(g, χ₁, χ₂)}` at `[χ₁][χ₂][g]`.
    u: Vec<Complex64>,
    weights: Vec<Complex64>,
}

impl Deformation {
    pub fn new(phi: &Cochain3) -> Result<Self> {
        Self::with_sigma(phi, None)
    }

    pub fn with_sigma(phi: &Cochain3, sigma: Option<&Cochain2>) -> Result<Self> {
        let mult = multiplier_from_phi(phi)?;
        let g = phi.group();
        let n = g.order();
        if let Some(s) = sigma {
            if s.group() != g {
                return Err(Error::IncompatibleGroups {
                    left: g.factors().to_vec(),
                    right: s.group().factors().to_vec(),
                });
            }
            if let Some(triple) = s.cocycle_witness() {
                return Err(Error::NotCocycle2 { triple });
            }
        }
        let mut u = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for p in 0..n {
                    u.push(mult.entry(p, a, b).to_complex());
                }
            }
        }
        let weights = (0..n * n)
            .map(|i| sigma.map_or(Phase::ZERO, |s| s.get(i / n, i % n)).to_complex())
            .collect();
        Ok(Deformation {
            phi: phi.clone(),
            sigma: sigma.cloned(),
            u,
            weights,
        })
    }

    pub fn phi(&self) -> &Cochain3 {
        &self.phi
    }

    pub fn sigma(&self) -> Option<&Cochain2> {
        self.sigma.as_ref()
    }

    fn check(&self, a: &GradedElement) -> Result<()> {
        if a.action.group() != self.phi.group() {
            return Err(Error::IncompatibleGroups {
                left: a.action.group().factors().to_vec(),
                right: self.phi.group().factors().to_vec(),
            });
        }
        Ok(())
    }

    /// `(a ⋆ b)_χ = Σ_{χ₁+χ₂=χ} a_{χ₁} ξ_{χ₁}[b_{χ₂}] u(χ₁,χ₂)`.
    pub fn product(&self, a: &GradedElement, b: &GradedElement) -> Result<GradedElement> {
        a.compatible(b)?;
        self.check(a)?;
        let action = &a.action;
        let g = action.group();
        let n = g.order();
        let m = a.multiplicity;
        let d = a.dim();
        let live_a: Vec<bool> = a.components.iter().map(|x| linalg::max_abs(x) > 0.0).collect();
        let live_b: Vec<bool> = b.components.iter().map(|x| linalg::max_abs(x) > 0.0).collect();
        let shifts: Vec<Vec<usize>> = (0..n).map(|chi| shift_permutation(action, m, chi)).collect();
        let components = (0..n)
            .into_par_iter()
            .map(|chi| {
                let mut acc = CMatrix::zeros(d, d);
                for c1 in 0..n {
                    let c2 = g.sub(chi, c1);
                    if !live_a[c1] || !live_b[c2] {
                        continue;
                    }
                    let pi = &shifts[c1];
                    let bb = &b.components[c2];
                    let shifted = CMatrix::from_fn(d, d, |r, s| bb[(pi[r], pi[s])]);
                    let mut term = &a.components[c1] * shifted;
                    let base = (c1 * n + c2) * n;
                    for col in 0..d {
                        let gi = (col / m) % n;
                        let w = self.u[base + gi];
                        term.column_mut(col).iter_mut().for_each(|z| *z *= w);
                    }
                    acc += term * self.weights[c1 * n + c2];
                }
                acc
            })
            .collect();
        Ok(GradedElement {
            action: action.clone(),
            multiplicity: m,
            components,
        })
    }

    /// Matrix of `Ψ ↦ a ⋆ Ψ` on `⊕_χ A_χ ⊗ End(ℓ²(Ĝ) ⊗ C^m)` with its
    /// Hilbert–Schmidt inner product.
    pub fn represent(&self, a: &GradedElement) -> Result<CMatrix> {
        self.check(a)?;
        let action = &a.action;
        let n = action.group().order();
        let inner = n * a.multiplicity;
        let da = action.dim();
        let bases: Vec<Vec<CMatrix>> = (0..n).map(|chi| action.isotypic_basis(chi)).collect();
        // Flattened ONB: (degree, index into bases[degree], r, s).
        let mut index = Vec::new();
        for (chi, b) in bases.iter().enumerate() {
            for q in 0..b.len() {
                for rs in 0..inner * inner {
                    index.push((chi, q, rs / inner, rs % inner));
                }
            }
        }
        let dim_v = index.len();
        let offsets: Vec<usize> = bases
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.len() * inner * inner;
                Some(o)
            })
            .collect();

        let columns: Vec<Vec<Complex64>> = index
            .par_iter()
            .map(|&(chi, q, r, s)| {
                let mut e = CMatrix::zeros(inner, inner);
                e[(r, s)] = c(1.0, 0.0);
                let psi = GradedElement {
                    action: action.clone(),
                    multiplicity: a.multiplicity,
                    components: (0..n)
                        .map(|k| {
                            if k == chi {
                                bases[chi][q].kronecker(&e)
                            } else {
                                CMatrix::zeros(da * inner, da * inner)
                            }
                        })
                        .collect(),
                };
                let out = self.product(a, &psi).expect("compatible by construction");
                let mut col = vec![c(0.0, 0.0); dim_v];
                for (deg, y) in out.components.iter().enumerate() {
                    for (qi, qm) in bases[deg].iter().enumerate() {
                        let mut z = CMatrix::zeros(inner, inner);
                        for i in 0..da {
                            for j in 0..da {
                                let w = qm[(i, j)].conj();
                                if w.norm() == 0.0 {
                                    continue;
                                }
                                z += y.view((i * inner, j * inner), (inner, inner)) * w;
                            }
                        }
                        let base = offsets[deg] + qi * inner * inner;
                        for rr in 0..inner {
                            for ss in 0..inner {
                                col[base + rr * inner + ss] = z[(rr, ss)];
                            }
                        }
                    }
                }
                col
            })
            .collect();
        let mut m = CMatrix::zeros(dim_v, dim_v);
        for (j, col) in columns.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn norm(&self, a: &GradedElement) -> Result<f64> {
        Ok(linalg::operator_norm(&self.represent(a)?))
    }

    /// `‖a(bc) − e^{2πiφ(ξ,η,ζ)}(ab)c‖_max` for homogeneous `a, b, c`.
    pub fn associator_defect(
        &self,
        degrees: [usize; 3],
        a: &GradedElement,
        b: &GradedElement,
        c: &GradedElement,
    ) -> Result<f64> {
        let right = self.product(a, &self.product(b, c)?)?;
        let left = self.product(&self.product(a, b)?, c)?;
        let phase = self.phi.get(degrees[0], degrees[1], degrees[2]).to_complex();
        Ok(right.max_diff(&left.scale(phase)))
    }
}

pub fn deformed_product(a: &GradedElement, b: &GradedElement, deformation: &Deformation) -> Result<GradedElement> {
    deformation.product(a, b)
}

pub fn represent(a: &GradedElement, deformation: &Deformation) -> Result<CMatrix> {
    deformation.represent(a)
}

pub fn deformed_norm(a: &GradedElement, deformation: &Deformation) -> Result<f64> {
    deformation.norm(a)
}

/// The homogeneous unitary `e_χ ⊗ 1` of the translation action.
pub fn character_element(action: &GAction, multiplicity: usize, chi: usize) -> Result<GradedElement> {
    let inner = action.group().order() * multiplicity;
    let block = character_function(action.group(), chi).kronecker(&CMatrix::identity(inner, inner));
    GradedElement::homogeneous(action, multiplicity, chi, block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::Tricharacter;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_action_projections() {
        let g = FiniteAbelianGroup::new(&[3]).unwrap();
        let act = GAction::trivial(&g, AlgebraKind::Matrix, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = linalg::random_matrix(2, 2, &mut rng);
        assert!(linalg::max_abs_diff(&act.project(0, &a), &a) < 1e-14);
        assert!(linalg::max_abs(&act.project(1, &a)) < 1e-14);
    }

    #[test]
    fn translation_projection_is_fourier_mode() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let act = GAction::translation(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f: Vec<Complex64> = (0..4).map(|_| linalg::random_complex(&mut rng)).collect();
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(f.clone()));
        let p = DualPairing::new(&g);
        let fhat = p.fourier(&f.iter().map(|z| z.conj()).collect::<Vec<_>>());
        for chi in 0..4 {
            // P_χ f = |G|⁻¹ ⟨e_χ, f⟩ e_χ
            let coeff = fhat[chi].conj() / 4.0;
            let expect = character_function(&g, chi) * coeff;
            assert!(linalg::max_abs_diff(&act.project(chi, &a), &expect) < 1e-13);
        }
    }

    #[test]
    fn bundled_actions_grade() {
        for act in [GAction::translation(&FiniteAbelianGroup::elementary_abelian(3)), GAction::pauli_m4()] {
            let r = grading_check(&act, 1e-12);
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn broken_action_is_located() {
        let g = FiniteAbelianGroup::new(&[2]).unwrap();
        let gens = vec![Generator::Permutation(vec![1, 2, 0])];
        assert!(GAction::new(&g, AlgebraKind::Functions, 3, gens.clone()).is_err());
        let act = GAction::new_unchecked(&g, AlgebraKind::Functions, 3, gens).unwrap();
        assert!(act.homomorphism_witness(1e-10).is_some());
        let r = grading_check(&act, 1e-10);
        assert!(!r.pass);
        assert!(r.witness.is_some());
    }

    #[test]
    fn untwisted_degree_zero_is_ordinary_product() {
        let g = FiniteAbelianGroup::new(&[2, 2]).unwrap();
        let act = GAction::trivial(&g, AlgebraKind::Matrix, 2);
        let def = Deformation::new(&Cochain3::zero(&g)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = linalg::random_matrix(2, 2, &mut rng);
        let b = linalg::random_matrix(2, 2, &mut rng);
        let ea = GradedElement::from_algebra(&act, 1, &a).unwrap();
        let eb = GradedElement::from_algebra(&act, 1, &b).unwrap();
        let ab = GradedElement::from_algebra(&act, 1, &(&a * &b)).unwrap();
        assert!(def.product(&ea, &eb).unwrap().max_diff(&ab) < 1e-13);
        assert!(linalg::max_abs_diff(&ea.reassemble(), &a.kronecker(&CMatrix::identity(4, 4))) < 1e-14);
    }

    #[test]
    fn intertwiner_is_homomorphism_when_untwisted() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for act in [GAction::translation(&FiniteAbelianGroup::new(&[4]).unwrap()), GAction::pauli_m4()] {
            let def = Deformation::new(&Cochain3::zero(act.group())).unwrap();
            for _ in 0..5 {
                let a = GradedElement::random(&act, 1, false, &mut rng);
                let b = GradedElement::random(&act, 1, false, &mut rng);
                let ab = def.product(&a, &b).unwrap();
                let err = linalg::max_abs_diff(&ab.intertwine(), &(a.intertwine() * b.intertwine()));
                assert!(err < 1e-10, "{err}");
                let back = GradedElement::from_intertwined(&act, 1, &(a.intertwine() * b.intertwine())).unwrap();
                assert!(back.max_diff(&ab) < 1e-10);
            }
        }
    }

    #[test]
    fn characters_realize_the_associator() {
        let phi = Tricharacter::octonion().to_cochain3();
        let g = phi.group().clone();
        let act = GAction::translation(&g);
        let def = Deformation::new(&phi).unwrap();
        let u: Vec<_> = (0..8).map(|chi| character_element(&act, 1, chi).unwrap()).collect();
        for x in 0..8 {
            for y in 0..8 {
                for z in 0..8 {
                    assert!(def.associator_defect([x, y, z], &u[x], &u[y], &u[z]).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn homogeneous_membership_enforced() {
        let act = GAction::translation(&FiniteAbelianGroup::new(&[2]).unwrap());
        let block = character_function(act.group(), 1).kronecker(&CMatrix::identity(2, 2));
        assert!(GradedElement::homogeneous(&act, 1, 1, block.clone()).is_ok());
        assert!(GradedElement::homogeneous(&act, 1, 0, block).is_err());
    }

    #[test]
    fn represent_unit_and_untwisted_norm() {
        let g = FiniteAbelianGroup::new(&[2]).unwrap();
        let act = GAction::translation(&g);
        let def = Deformation::new(&Cochain3::zero(&g)).unwrap();
        let one = GradedElement::unit(&act, 1);
        let r = def.represent(&one).unwrap();
        assert!(linalg::max_abs_diff(&r, &CMatrix::identity(r.nrows(), r.ncols())) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = GradedElement::random(&act, 1, false, &mut rng);
        let n1 = def.norm(&a).unwrap();
        let n2 = linalg::operator_norm(&a.intertwine());
        assert!((n1 - n2).abs() < 1e-10, "{n1} vs {n2}");
    }
}

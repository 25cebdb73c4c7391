//! Bundles of nonassociative tori over a finite discrete base.
//!
//! Over a discrete base every principal bundle is `X × G`, so a bundle is a
//! family of fibers: the twisted group algebra of `Ĝ` with multiplier
//! `σ(x) + τ`, where `δτ = φ`. The fiber over `x` is realized inside the
//! `(σ(x), φ)`-deformation of `C(G)` by the homogeneous unitaries
//! `U(χ) = e_χ ⊗ diag(e^{2πiτ(·,χ)})`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::potential::solve_potential;
use crate::cochain::{Cochain2, Cochain3, KernelTwist, Phase};
use crate::crossed_product::{
    self, dual_crossed_product, from_dual_side, takai_transform, CrossedElement, DualSideElement, TwistData,
    EXHAUSTIVE_BASIS_LIMIT,
};
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::linalg::{self, c, CMatrix};
use crate::quantization::{character_function, Deformation, GAction, GradedElement};
use crate::twisted_algebra::{ScalarField, TGAElement, TwistedGroupAlgebra};
use crate::twisted_kernels::{kernel_product, TwistedKernel};

/// A finite set of labelled points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseSpace {
    points: Vec<String>,
}

impl BaseSpace {
    pub fn new<S: Into<String>>(points: impl IntoIterator<Item = S>) -> Result<Self> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        if points.is_empty() {
            return Err(Error::InvalidBundle("the base must have at least one point".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::InvalidBundle(format!("duplicate base point {p:?}")));
            }
        }
        Ok(BaseSpace { points })
    }

    pub fn point() -> Self {
        BaseSpace { points: vec!["*".into()] }
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }
}

#[derive(Clone, Debug)]
pub struct Fiber {
    pub point: String,
    pub sigma: Cochain2,
    /// `σ(x) + τ`.
    pub multiplier: Cochain2,
    pub algebra: TwistedGroupAlgebra,
}

#[derive(Clone, Debug)]
pub struct NAPBundle {
    base: BaseSpace,
    group: FiniteAbelianGroup,
    phi: Cochain3,
    potential: Cochain2,
    fibers: Vec<Fiber>,
}

/// Build the bundle with fibers twisted by `σ(x)` then deformed by `φ`.
/// Without an explicit `potential` one is solved for (small groups only).
pub fn build_nap_bundle(
    base: &BaseSpace,
    group: &FiniteAbelianGroup,
    phi: &Cochain3,
    sigma: &[Cochain2],
    potential: Option<&Cochain2>,
) -> Result<NAPBundle> {
    if phi.group() != group {
        return Err(Error::IncompatibleGroups {
            left: group.factors().to_vec(),
            right: phi.group().factors().to_vec(),
        });
    }
    phi.ensure_cocycle()?;
    if sigma.len() != base.len() {
        return Err(Error::InvalidBundle(format!(
            "{} base points but {} multipliers",
            base.len(),
            sigma.len()
        )));
    }
    for s in sigma {
        if s.group() != group {
            return Err(Error::IncompatibleGroups {
                left: group.factors().to_vec(),
                right: s.group().factors().to_vec(),
            });
        }
        if let Some(triple) = s.cocycle_witness() {
            return Err(Error::NotCocycle2 { triple });
        }
    }
    let tau = match potential {
        Some(t) => {
            if t.group() != group || &t.coboundary() != phi {
                return Err(Error::NotACoboundary);
            }
            t.clone()
        }
        None => solve_potential(phi)?,
    };
    let fibers = base
        .points()
        .iter()
        .zip(sigma)
        .map(|(p, s)| {
            let multiplier = s.checked_add(&tau)?;
            let field = if multiplier.denominator() <= 2 {
                ScalarField::Real
            } else {
                ScalarField::Complex
            };
            Ok(Fiber {
                point: p.clone(),
                sigma: s.clone(),
                algebra: TwistedGroupAlgebra::new(multiplier.clone(), field)?,
                multiplier,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bundle = NAPBundle {
        base: base.clone(),
        group: group.clone(),
        phi: phi.clone(),
        potential: tau,
        fibers,
    };
    for x in 0..bundle.base.len() {
        let err = bundle.quantization_defect(x)?;
        if err > 1e-10 {
            return Err(Error::TwistRelation {
                relation: "U(χ)⋆U(η) = e^{2πi(σ+τ)(χ,η)} U(χ+η)",
                at: vec![x],
                error: err,
            });
        }
    }
    Ok(bundle)
}

/// A global section: one fiber element per base point.
#[derive(Clone, Debug)]
pub struct Section {
    pub values: Vec<TGAElement>,
}

impl NAPBundle {
    pub fn base(&self) -> &BaseSpace {
        &self.base
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn phi(&self) -> &Cochain3 {
        &self.phi
    }

    pub fn potential(&self) -> &Cochain2 {
        &self.potential
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    pub fn fiber(&self, label: &str) -> Option<&Fiber> {
        self.base.index_of(label).map(|i| &self.fibers[i])
    }

    /// `(e_a, e_b) ↦ (phase, a+b)` on the fiber over point `x`.
    pub fn structure_table(&self, x: usize) -> Vec<Vec<(Phase, usize)>> {
        let alg = &self.fibers[x].algebra;
        let n = self.group.order();
        (0..n).map(|a| (0..n).map(|b| alg.basis_product(a, b)).collect()).collect()
    }

    /// `σ(a,b) − σ(b,a)` for the fiber multiplier: unchanged by coboundaries
    /// and relabelling-compatible, so distinct tables mean non-isomorphic
    /// gradings.
    pub fn commutator_table(&self, x: usize) -> Vec<Vec<Phase>> {
        let m = &self.fibers[x].multiplier;
        let n = self.group.order();
        (0..n).map(|a| (0..n).map(|b| m.get(a, b) - m.get(b, a)).collect()).collect()
    }

    pub fn random_section<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Section {
        Section {
            values: self.fibers.iter().map(|f| f.algebra.random(rng)).collect(),
        }
    }

    pub fn multiply(&self, s: &Section, t: &Section) -> Result<Section> {
        self.check_section(s)?;
        self.check_section(t)?;
        Ok(Section {
            values: s.values.iter().zip(&t.values).map(|(a, b)| a.mul(b)).collect::<Result<_>>()?,
        })
    }

    /// Pointwise action of a function on the base.
    pub fn act(&self, f: &[Complex64], s: &Section) -> Result<Section> {
        self.check_section(s)?;
        if f.len() != self.base.len() {
            return Err(Error::Dimension("function length differs from the base".into()));
        }
        Ok(Section {
            values: s.values.iter().zip(f).map(|(a, &k)| a.scale(k)).collect(),
        })
    }

    fn check_section(&self, s: &Section) -> Result<()> {
        if s.values.len() != self.fibers.len()
            || s.values.iter().zip(&self.fibers).any(|(v, f)| v.algebra() != &f.algebra)
        {
            return Err(Error::ParentMismatch("section does not belong to this bundle".into()));
        }
        Ok(())
    }

    /// The fiber's data as a twisted action on `B = C`.
    pub fn twist_data(&self, x: usize) -> Result<TwistData> {
        TwistData::scalar(&self.fibers[x].multiplier, &self.phi, 1)
    }

    /// Largest deviation of `U(χ)⋆U(η)` from `e^{2πi(σ+τ)(χ,η)} U(χ+η)`
    /// inside the `(σ(x), φ)`-deformation of `C(G)`.
    pub fn quantization_defect(&self, x: usize) -> Result<f64> {
        let g = &self.group;
        let n = g.order();
        let action = GAction::translation(g);
        let def = Deformation::with_sigma(&self.phi, Some(&self.fibers[x].sigma))?;
        let units: Vec<GradedElement> = (0..n)
            .map(|chi| {
                let leg: Vec<Complex64> = (0..n).map(|p| self.potential.get(p, chi).to_complex()).collect();
                let leg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(leg));
                GradedElement::homogeneous(&action, 1, chi, character_function(g, chi).kronecker(&leg))
            })
            .collect::<Result<_>>()?;
        let mult = &self.fibers[x].multiplier;
        let errors = (0..n * n)
            .into_par_iter()
            .map(|i| {
                let (a, b) = (i / n, i % n);
                let lhs = def.product(&units[a], &units[b])?;
                let rhs = units[g.add(a, b)].scale(mult.get(a, b).to_complex());
                Ok(lhs.max_diff(&rhs))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(errors.into_iter().fold(0.0, f64::max))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberWitness {
    /// Basis indices `(ξ, t)` of the two crossed-product factors.
    pub left: [usize; 2],
    pub right: [usize; 2],
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub point: String,
    pub pass: bool,
    pub max_error: f64,
    pub round_trip_error: f64,
    pub pairs: usize,
    pub exhaustive: bool,
    pub witness: Option<FiberWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NapReport {
    pub pass: bool,
    pub tolerance: f64,
    pub fibers: Vec<FiberReport>,
}

/// Crossed product of each fiber by the dual `G`-action, intertwined with
/// the `φ`-twisted kernels on `Ĝ` by `J = reflect ∘ T`.
pub fn nap_condition_check(bundle: &NAPBundle, trials: usize, seed: u64, tol: f64) -> Result<NapReport> {
    let fibers = (0..bundle.base.len())
        .map(|x| fiber_check(bundle, x, trials, seed.wrapping_add(x as u64), tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(NapReport {
        pass: fibers.iter().all(|f| f.pass),
        tolerance: tol,
        fibers,
    })
}

fn intertwine(f: &DualSideElement, tw: &TwistData) -> TwistedKernel {
    takai_transform(&from_dual_side(f, tw), tw).reflect()
}

fn crossed_basis(tw: &TwistData, k: usize) -> DualSideElement {
    let n = tw.group().order();
    let mut entries = vec![CrossedElement::zero(tw); n];
    entries[k / n].entries[k % n] = CMatrix::identity(1, 1);
    DualSideElement { entries }
}

fn crossed_random(tw: &TwistData, rng: &mut ChaCha8Rng) -> DualSideElement {
    DualSideElement {
        entries: (0..tw.group().order()).map(|_| CrossedElement::random(tw, rng)).collect(),
    }
}

fn fiber_check(bundle: &NAPBundle, x: usize, trials: usize, seed: u64, tol: f64) -> Result<FiberReport> {
    let tw = bundle.twist_data(x)?;
    let n = bundle.group.order();
    let twist = KernelTwist::difference(&bundle.phi);
    let basis = n * n;
    let exhaustive = basis <= EXHAUSTIVE_BASIS_LIMIT;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Option<[usize; 2]>, DualSideElement, DualSideElement)> = if exhaustive {
        (0..basis * basis)
            .map(|k| {
                let (i, j) = (k / basis, k % basis);
                (Some([i, j]), crossed_basis(&tw, i), crossed_basis(&tw, j))
            })
            .collect()
    } else {
        (0..trials)
            .map(|_| (None, crossed_random(&tw, &mut rng), crossed_random(&tw, &mut rng)))
            .collect()
    };
    let errors = pairs
        .par_iter()
        .map(|(_, a, b)| {
            let lhs = intertwine(&dual_crossed_product(a, b, &tw)?, &tw);
            let rhs = kernel_product(&intertwine(a, &tw), &intertwine(b, &tw), &twist)?;
            Ok(lhs.max_diff(&rhs))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst, max_error) = errors
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, e)| if e > acc.1 { (i, e) } else { acc });

    let probe = crossed_random(&tw, &mut rng);
    let k = intertwine(&probe, &tw);
    let back = crossed_product::to_dual_side(
        &crossed_product::inverse_takai_transform(&k.reflect(), &tw)?,
        &tw,
    );
    let round_trip_error = back
        .entries
        .iter()
        .zip(&probe.entries)
        .map(|(a, b)| a.max_diff(b))
        .fold(0.0, f64::max);

    let pass = max_error < tol && round_trip_error < tol;
    let witness = (!pass).then(|| {
        let idx = pairs[worst].0.unwrap_or([worst, worst]);
        FiberWitness {
            left: [idx[0] / n, idx[0] % n],
            right: [idx[1] / n, idx[1] % n],
            error: max_error,
        }
    });
    Ok(FiberReport {
        point: bundle.base.points()[x].clone(),
        pass,
        max_error,
        round_trip_error,
        pairs: pairs.len(),
        exhaustive,
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaWitness {
    pub check: &'static str,
    pub at: Vec<usize>,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub pass: bool,
    pub unitary: bool,
    pub central: bool,
    pub invariant: bool,
    pub cocycle: bool,
    pub sigma: Option<Cochain2>,
    pub witness: Option<SigmaWitness>,
}

const SNAP_DENOMINATOR: u64 = 720_720;

/// `σ = u₁ u₂⁻¹` for the multiplier `u₁` of `tw` and another candidate `u₂`
/// for the same action. Checks unitarity, centrality, invariance and the
/// 2-cocycle identity, then snaps `σ` to exact phases.
pub fn extract_sigma(tw: &TwistData, u2: &[CMatrix], tol: f64) -> Result<SigmaReport> {
    let g = tw.group();
    let n = g.order();
    let b = tw.block();
    if u2.len() != n * n || u2.iter().any(|m| m.shape() != (b, b)) {
        return Err(Error::Dimension(format!("need {} multiplier values of size {b}×{b}", n * n)));
    }
    let sigma: Vec<CMatrix> = (0..n * n).map(|i| tw.u(i / n, i % n) * u2[i].adjoint()).collect();
    let mut report = SigmaReport {
        pass: false,
        unitary: false,
        central: false,
        invariant: false,
        cocycle: false,
        sigma: None,
        witness: None,
    };
    let fail = |mut r: SigmaReport, check, at: Vec<usize>, error| {
        r.witness = Some(SigmaWitness { check, at, error });
        Ok(r)
    };

    for (i, s) in sigma.iter().enumerate() {
        let err = linalg::unitarity_defect(s).max(linalg::unitarity_defect(&u2[i]));
        if err > tol {
            return fail(report, "unitary", vec![i / n, i % n], err);
        }
    }
    report.unitary = true;

    let span: Vec<CMatrix> = (0..b * b)
        .map(|k| {
            let mut m = CMatrix::zeros(b, b);
            m[(k / b, k % b)] = c(1.0, 0.0);
            m
        })
        .collect();
    for (i, s) in sigma.iter().enumerate() {
        for e in &span {
            let err = linalg::max_abs_diff(&(s * e), &(e * s));
            if err > tol {
                return fail(report, "central", vec![i / n, i % n], err);
            }
        }
    }
    report.central = true;

    for (i, s) in sigma.iter().enumerate() {
        for t in 0..n {
            let err = linalg::max_abs_diff(&tw.beta(t, s), s);
            if err > tol {
                return fail(report, "invariant", vec![i / n, i % n, t], err);
            }
        }
    }
    report.invariant = true;

    let mut phases = Vec::with_capacity(n * n);
    for (i, s) in sigma.iter().enumerate() {
        match Phase::from_complex(s[(0, 0)], SNAP_DENOMINATOR, tol) {
            Some(p) => phases.push(p),
            None => return fail(report, "root of unity", vec![i / n, i % n], f64::NAN),
        }
    }
    let table = match Cochain2::from_table(g, phases) {
        Ok(t) => t,
        Err(Error::NotNormalized { at }) => return fail(report, "normalized", at, f64::NAN),
        Err(e) => return Err(e),
    };
    if let Some(triple) = table.cocycle_witness() {
        return fail(report, "cocycle", triple.to_vec(), f64::NAN);
    }
    report.cocycle = true;
    report.pass = true;
    report.sigma = Some(table);
    Ok(report)
}

/// `u₂ = u₁ · e^{−2πib}`, so that [`extract_sigma`] should return `b`.
pub fn shifted_multiplier(tw: &TwistData, shift: &Cochain2) -> Vec<CMatrix> {
    let n = tw.group().order();
    (0..n * n)
        .map(|i| tw.u(i / n, i % n) * (-shift.get(i / n, i % n)).to_complex())
        .collect()
}

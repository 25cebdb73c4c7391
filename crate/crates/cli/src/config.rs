use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use natorus::bundles::BaseSpace;
use natorus::cochain::{Cochain2, Cochain3, Phase, Tricharacter};
use natorus::group::FiniteAbelianGroup;
use natorus::linalg::CMatrix;
use natorus::quantization::{AlgebraKind, GAction, Generator};
use natorus::twisted_algebra::octonion_multiplier;

/// A configuration problem: exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub type CResult<T> = std::result::Result<T, ConfigError>;

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn lib(e: natorus::Error) -> ConfigError {
    ConfigError(format!("invalid descriptor: {e}"))
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: Option<GroupDesc>,
    pub phi: Option<Cochain3Desc>,
    pub sigma: Option<Cochain2Desc>,
    pub action: Option<ActionDesc>,
    pub multiplicity: Option<usize>,
    pub bundle: Option<BundleDesc>,
    pub duality: Option<DualityDesc>,
    pub tolerance: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDesc {
    pub factors: Vec<u32>,
}

/// A phase given as `"p/q"` or as an integer over a shared modulus.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PhaseValue {
    Int(i64),
    Str(String),
}

impl PhaseValue {
    fn phase(&self, modulus: Option<u64>) -> CResult<Phase> {
        match self {
            PhaseValue::Str(s) => s.parse().map_err(|_| bad(format!("bad phase {s:?}; expected \"p/q\""))),
            PhaseValue::Int(k) => match modulus {
                Some(0) => Err(bad("modulus must be positive")),
                Some(m) => Ok(Phase::new(*k, m)),
                None => Err(bad("integer table entries need a \"modulus\"")),
            },
        }
    }
}

fn phases(entries: &[PhaseValue], modulus: Option<u64>) -> CResult<Vec<Phase>> {
    entries.iter().map(|e| e.phase(modulus)).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Cochain3Desc {
    Tricharacter { tensor: Vec<Vec<Vec<i64>>>, modulus: Option<u64> },
    LeviCivita { modulus: Option<u64> },
    Octonion,
    Zero,
    Table { entries: Vec<PhaseValue>, modulus: Option<u64> },
}

impl Cochain3Desc {
    pub fn build(&self, g: &FiniteAbelianGroup) -> CResult<Cochain3> {
        match self {
            Cochain3Desc::Tricharacter { tensor, modulus } => {
                Ok(Tricharacter::from_tensor(g, tensor, *modulus).map_err(lib)?.to_cochain3())
            }
            Cochain3Desc::LeviCivita { modulus } => Ok(Tricharacter::levi_civita(g, *modulus).map_err(lib)?.to_cochain3()),
            Cochain3Desc::Octonion => {
                let phi = Tricharacter::octonion().to_cochain3();
                if phi.group() != g {
                    return Err(bad("the octonion cocycle lives on factors [2, 2, 2]"));
                }
                Ok(phi)
            }
            Cochain3Desc::Zero => Ok(Cochain3::zero(g)),
            Cochain3Desc::Table { entries, modulus } => Cochain3::from_table(g, phases(entries, *modulus)?).map_err(lib),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Cochain2Desc {
    Bicharacter { matrix: Vec<Vec<i64>>, modulus: u64 },
    Octonion,
    Zero,
    Table { entries: Vec<PhaseValue>, modulus: Option<u64> },
}

impl Cochain2Desc {
    pub fn build(&self, g: &FiniteAbelianGroup) -> CResult<Cochain2> {
        match self {
            Cochain2Desc::Bicharacter { matrix, modulus } => Cochain2::bicharacter(g, matrix, *modulus).map_err(lib),
            Cochain2Desc::Octonion => {
                let s = octonion_multiplier();
                if s.group() != g {
                    return Err(bad("the octonion multiplier lives on factors [2, 2, 2]"));
                }
                Ok(s)
            }
            Cochain2Desc::Zero => Ok(Cochain2::zero(g)),
            Cochain2Desc::Table { entries, modulus } => Cochain2::from_table(g, phases(entries, *modulus)?).map_err(lib),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ActionDesc {
    Preset { preset: Preset },
    Explicit { algebra: AlgebraDesc, action: GeneratorsDesc },
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Translation,
    PauliM4,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDesc {
    pub kind: Kind,
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Functions,
    Matrix,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsDesc {
    pub generators: Vec<GeneratorDesc>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorDesc {
    Permutation(Vec<usize>),
    /// Rows of `[re, im]` pairs.
    Unitary(Vec<Vec<[f64; 2]>>),
}

impl ActionDesc {
    pub fn build(&self, g: &FiniteAbelianGroup) -> CResult<GAction> {
        match self {
            ActionDesc::Preset { preset: Preset::Translation } => Ok(GAction::translation(g)),
            ActionDesc::Preset { preset: Preset::PauliM4 } => {
                let a = GAction::pauli_m4();
                if a.group() != g {
                    return Err(bad("the pauli_m4 preset needs factors [2, 2, 2]"));
                }
                Ok(a)
            }
            ActionDesc::Explicit { algebra, action } => {
                let kind = match algebra.kind {
                    Kind::Functions => AlgebraKind::Functions,
                    Kind::Matrix => AlgebraKind::Matrix,
                };
                let gens = action
                    .generators
                    .iter()
                    .map(|d| match d {
                        GeneratorDesc::Permutation(p) => Ok(Generator::Permutation(p.clone())),
                        GeneratorDesc::Unitary(rows) => {
                            let n = rows.len();
                            if rows.iter().any(|r| r.len() != n) {
                                return Err(bad("unitary generators must be square"));
                            }
                            Ok(Generator::Unitary(CMatrix::from_fn(n, n, |i, j| {
                                Complex64::new(rows[i][j][0], rows[i][j][1])
                            })))
                        }
                    })
                    .collect::<CResult<Vec<_>>>()?;
                GAction::new_unchecked(g, kind, algebra.dim, gens).map_err(lib)
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDesc {
    pub base: Vec<String>,
    pub group: GroupDesc,
    pub phi: Cochain3Desc,
    pub sigma: BTreeMap<String, Cochain2Desc>,
    pub potential: Option<Cochain2Desc>,
}

pub struct BundleInput {
    pub base: BaseSpace,
    pub group: FiniteAbelianGroup,
    pub phi: Cochain3,
    pub sigma: Vec<Cochain2>,
    pub potential: Option<Cochain2>,
}

impl BundleDesc {
    pub fn build(&self) -> CResult<BundleInput> {
        let group = self.group.build()?;
        let base = BaseSpace::new(self.base.iter().cloned()).map_err(lib)?;
        for k in self.sigma.keys() {
            if base.index_of(k).is_none() {
                return Err(bad(format!("sigma given for unknown base point {k:?}")));
            }
        }
        let sigma = base
            .points()
            .iter()
            .map(|p| match self.sigma.get(p) {
                Some(d) => d.build(&group),
                None => Err(bad(format!("no sigma for base point {p:?}"))),
            })
            .collect::<CResult<Vec<_>>>()?;
        Ok(BundleInput {
            phi: self.phi.build(&group)?,
            potential: self.potential.as_ref().map(|p| p.build(&group)).transpose()?,
            base,
            group,
            sigma,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    /// `B = M_b`, trivial action, scalar multiplier.
    Scalar,
    /// `B = M_b` with a random inner perturbation of the multiplier.
    #[default]
    Perturbed,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PsiDesc {
    Named(PsiName),
    Cochain(Cochain3Desc),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiName {
    Zero,
    MinusPhi,
    Phi,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualityDesc {
    pub block: Option<usize>,
    pub coefficients: Option<Coefficients>,
    /// `σ` with `δσ = φ`; solved for when absent.
    pub potential: Option<Cochain2Desc>,
    pub psi: Option<Vec<PsiDesc>>,
}

impl GroupDesc {
    pub fn build(&self) -> CResult<FiniteAbelianGroup> {
        FiniteAbelianGroup::new(&self.factors).map_err(lib)
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> CResult<T> {
    serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof | Category::Io => bad(format!("malformed JSON in {what}: {e}")),
            Category::Data => bad(format!("schema violation in {what}: {e}")),
        }
    })
}

pub fn load(path: Option<&Path>) -> CResult<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

pub fn inline<T: for<'de> Deserialize<'de>>(text: &str, flag: &str) -> CResult<T> {
    parse_json(text, flag)
}

/// Effective settings after config file and flags are merged.
#[derive(Clone, Debug)]
pub struct Settings {
    pub config: RunConfig,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub format: Format,
}

impl Settings {
    pub fn new(
        config: RunConfig,
        seed: Option<u64>,
        trials: Option<usize>,
        tolerance: Option<f64>,
        format: Option<Format>,
    ) -> CResult<Self> {
        let s = Settings {
            seed: seed.or(config.seed).unwrap_or(0),
            trials: trials.or(config.trials).unwrap_or(100),
            tolerance: tolerance.or(config.tolerance).unwrap_or(1e-10),
            format: format.or(config.format).unwrap_or_default(),
            config,
        };
        if !(s.tolerance > 0.0 && s.tolerance.is_finite()) {
            return Err(bad("tolerance must be a positive number"));
        }
        if s.trials == 0 {
            return Err(bad("trials must be at least 1"));
        }
        Ok(s)
    }

    pub fn group(&self) -> CResult<FiniteAbelianGroup> {
        match &self.config.group {
            Some(g) => g.build(),
            None => Err(bad("no group given (config \"group\" or --group)")),
        }
    }

    pub fn phi(&self, g: &FiniteAbelianGroup) -> CResult<Cochain3> {
        match &self.config.phi {
            Some(p) => p.build(g),
            None => Err(bad("no 3-cocycle given (config \"phi\" or --phi)")),
        }
    }

    pub fn sigma(&self, g: &FiniteAbelianGroup) -> CResult<Option<Cochain2>> {
        self.config.sigma.as_ref().map(|s| s.build(g)).transpose()
    }
}

mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use natorus::bundles::{build_nap_bundle, nap_condition_check, NAPBundle};
use natorus::cochain::potential::solve_potential;
use natorus::cochain::Cochain3;
use natorus::crossed_product::{verify_duality_variant, TransformVariant, TwistData};
use natorus::group::FiniteAbelianGroup;
use natorus::linalg;
use natorus::quantization::{Deformation, GradedElement};
use natorus::suite::{self, SuiteConfig};
use natorus::twisted_algebra::{ScalarField, TwistedGroupAlgebra};
use natorus::twisted_kernels::associativity_cocycle_table;

use config::{
    Coefficients, ConfigError, Format, GroupDesc, PsiDesc, PsiName, RunConfig, Settings,
};

#[derive(Parser)]
#[command(name = "natorus", version, about = "Finite-model checks for nonassociative tori")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Inline group descriptor, e.g. '{"factors":[2,2,2]}'.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Inline 3-cocycle descriptor.
    #[arg(long, global = true)]
    phi: Option<String>,
    /// Inline 2-cocycle descriptor.
    #[arg(long, global = true)]
    sigma: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a finite abelian group.
    Group,
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    #[command(subcommand)]
    Tga(TgaCmd),
    #[command(subcommand)]
    Oct(OctCmd),
    #[command(subcommand)]
    Kernels(KernelsCmd),
    #[command(subcommand)]
    Quantize(QuantizeCmd),
    #[command(subcommand)]
    Duality(DualityCmd),
    #[command(subcommand)]
    Bundle(BundleCmd),
    /// Run the acceptance suite.
    VerifyAll {
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
}

#[derive(Subcommand)]
enum CocycleCmd {
    /// Check the cocycle identity exhaustively.
    Verify {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
        degree: u8,
    },
    /// Restrict φ to the subgroup generated by `;`-separated coordinate lists.
    Restrict {
        #[arg(long)]
        subgroup: String,
    },
}

#[derive(Subcommand)]
enum TgaCmd {
    /// Multiply two elements of the σ-twisted group algebra.
    Mul {
        /// JSON coefficient vector: numbers or [re, im] pairs.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        real: bool,
    },
}

#[derive(Subcommand)]
enum OctCmd {
    /// Signed 8×8 multiplication table.
    Table,
}

#[derive(Subcommand)]
enum KernelsCmd {
    /// Associativity cocycle of the twisted kernel algebra on every triple.
    AssocCocycle,
}

#[derive(Subcommand)]
enum QuantizeCmd {
    /// Deformed product of two seeded random elements.
    Product,
    /// Associator defects on homogeneous elements for every degree triple.
    AssociatorTable,
    /// Norm of a seeded random element in the deformed algebra.
    Norm,
}

#[derive(Subcommand)]
enum DualityCmd {
    /// Compare both sides of the duality transform.
    Check {
        /// Drop the multiplier from the transform (negative control).
        #[arg(long)]
        omit_multiplier: bool,
    },
}

#[derive(Subcommand)]
enum BundleCmd {
    Build,
    Check,
    Fiber {
        #[arg(long)]
        point: String,
        #[arg(long)]
        emit_table: bool,
    },
}

/// Why a command did not succeed.
enum Failure {
    Config(String),
    Check { message: String, witness: Value },
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<natorus::Error> for Failure {
    fn from(e: natorus::Error) -> Self {
        use natorus::Error as E;
        let witness = match &e {
            E::NotCocycle3 { quadruple } => json!(quadruple),
            E::NotCocycle2 { triple } => json!(triple),
            E::NonConstantCocycle { triple, points } => json!({ "triple": triple, "points": points }),
            E::TwistRelation { relation, at, error } => json!({ "relation": relation, "at": at, "error": error }),
            E::NotACoboundary => Value::Null,
            _ => return Failure::Config(e.to_string()),
        };
        Failure::Check {
            message: e.to_string(),
            witness,
        }
    }
}

struct Report {
    pass: bool,
    result: Value,
    /// Rows for `--format csv`.
    table: Option<Vec<Vec<String>>>,
    timing: Option<Value>,
}

impl Report {
    fn new(pass: bool, result: Value) -> Self {
        Report {
            pass,
            result,
            table: None,
            timing: None,
        }
    }

    fn table(mut self, rows: Vec<Vec<String>>) -> Self {
        self.table = Some(rows);
        self
    }
}

type Run = Result<Report, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let name = command_name(&cli.command);
    let settings = match settings(&cli.global) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match dispatch(&cli.command, &settings) {
        Ok(report) => emit(&name, &settings, report),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check { message, witness }) => {
            let report = Report::new(false, json!({ "error": message, "witness": witness }));
            if settings.format == Format::Csv {
                eprintln!("error: {message}");
                return ExitCode::from(1);
            }
            emit(&name, &settings, report)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("NATORUS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("NATORUS_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn settings(g: &Global) -> Result<Settings, ConfigError> {
    let mut cfg: RunConfig = config::load(g.config.as_deref())?;
    if let Some(s) = &g.group {
        cfg.group = Some(config::inline::<GroupDesc>(s, "--group")?);
    }
    if let Some(s) = &g.phi {
        cfg.phi = Some(config::inline(s, "--phi")?);
    }
    if let Some(s) = &g.sigma {
        cfg.sigma = Some(config::inline(s, "--sigma")?);
    }
    Settings::new(cfg, g.seed, g.trials, g.tolerance, g.format)
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Group => "group".into(),
        Command::Cocycle(CocycleCmd::Verify { .. }) => "cocycle verify".into(),
        Command::Cocycle(CocycleCmd::Restrict { .. }) => "cocycle restrict".into(),
        Command::Tga(_) => "tga mul".into(),
        Command::Oct(_) => "oct table".into(),
        Command::Kernels(_) => "kernels assoc-cocycle".into(),
        Command::Quantize(QuantizeCmd::Product) => "quantize product".into(),
        Command::Quantize(QuantizeCmd::AssociatorTable) => "quantize associator-table".into(),
        Command::Quantize(QuantizeCmd::Norm) => "quantize norm".into(),
        Command::Duality(_) => "duality check".into(),
        Command::Bundle(BundleCmd::Build) => "bundle build".into(),
        Command::Bundle(BundleCmd::Check) => "bundle check".into(),
        Command::Bundle(BundleCmd::Fiber { .. }) => "bundle fiber".into(),
        Command::VerifyAll { .. } => "verify-all".into(),
    }
}

fn emit(name: &str, s: &Settings, report: Report) -> ExitCode {
    let code = ExitCode::from(if report.pass { 0 } else { 1 });
    match s.format {
        Format::Csv => match &report.table {
            Some(rows) => {
                for r in rows {
                    println!("{}", r.join(","));
                }
            }
            None => {
                eprintln!("error: csv output is only available for tables");
                return ExitCode::from(2);
            }
        },
        Format::Json => {
            let unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
            let mut timestamp = json!({ "unix_seconds": unix });
            if let Some(t) = report.timing {
                timestamp["elapsed_s"] = t;
            }
            let out = json!({
                "command": name,
                "pass": report.pass,
                "seed": s.seed,
                "trials": s.trials,
                "tolerance": s.tolerance,
                "result": report.result,
                "timestamp": timestamp,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
        }
        Format::Text => {
            println!("{} {name}", if report.pass { "PASS" } else { "FAIL" });
            let mut lines = Vec::new();
            flatten("", &report.result, &mut lines);
            for l in lines {
                println!("  {l}");
            }
        }
    }
    code
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) && a.len() <= 64 => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(a) if a.len() > 64 => out.push(format!("{prefix}: {} entries (see json or csv output)", a.len())),
        other => out.push(format!("{prefix}: {other}")),
    }
}

fn dispatch(c: &Command, s: &Settings) -> Run {
    match c {
        Command::Group => group(s),
        Command::Cocycle(CocycleCmd::Verify { degree }) => cocycle_verify(s, *degree),
        Command::Cocycle(CocycleCmd::Restrict { subgroup }) => cocycle_restrict(s, subgroup),
        Command::Tga(TgaCmd::Mul { a, b, real }) => tga_mul(s, a, b, *real),
        Command::Oct(OctCmd::Table) => oct_table(),
        Command::Kernels(KernelsCmd::AssocCocycle) => assoc_cocycle(s),
        Command::Quantize(q) => quantize(s, q),
        Command::Duality(DualityCmd::Check { omit_multiplier }) => duality(s, *omit_multiplier),
        Command::Bundle(b) => bundle(s, b),
        Command::VerifyAll { criterion } => verify_all(s, *criterion),
    }
}

fn coords(g: &FiniteAbelianGroup, i: usize) -> Value {
    json!(g.coords(i))
}

fn group(s: &Settings) -> Run {
    let g = s.group()?;
    let elements: Vec<Value> = (0..g.order()).map(|i| coords(&g, i)).collect();
    Ok(Report::new(
        true,
        json!({
            "factors": g.factors(),
            "order": g.order(),
            "exponent": g.exponent(),
            "rank": g.rank(),
            "elements": elements,
            "dual_factors": g.dual().factors(),
        }),
    ))
}

fn cocycle_verify(s: &Settings, degree: u8) -> Run {
    let g = s.group()?;
    if degree == 2 {
        let sigma = s.sigma(&g)?.ok_or_else(|| Failure::Config("no 2-cochain given (config \"sigma\" or --sigma)".into()))?;
        let w = sigma.cocycle_witness();
        return Ok(Report::new(
            w.is_none(),
            json!({ "degree": 2, "cocycle": w.is_none(), "witness": w, "denominator": sigma.denominator() }),
        ));
    }
    let phi = s.phi(&g)?;
    let w = phi.cocycle_witness();
    Ok(Report::new(
        w.is_none(),
        json!({
            "degree": 3,
            "cocycle": w.is_none(),
            "witness": w,
            "alternating": phi.is_alternating(),
            "denominator": phi.denominator(),
        }),
    ))
}

fn parse_generators(g: &FiniteAbelianGroup, text: &str) -> Result<Vec<usize>, Failure> {
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let c: Vec<u32> = p
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| Failure::Config(format!("bad coordinate in {p:?}"))))
                .collect::<Result<_, _>>()?;
            Ok(g.index_of(&c)?)
        })
        .collect()
}

fn cocycle_restrict(s: &Settings, subgroup: &str) -> Run {
    let g = s.group()?;
    let phi = s.phi(&g)?;
    let gens = parse_generators(&g, subgroup)?;
    let r = phi.restrict(&gens)?;
    let elements: Vec<Value> = r.elements.iter().map(|&i| coords(&g, i)).collect();
    let values: Vec<String> = r.values.iter().map(|p| p.to_string()).collect();
    Ok(Report::new(
        true,
        json!({
            "generators": gens.iter().map(|&i| coords(&g, i)).collect::<Vec<_>>(),
            "elements": elements,
            "trivial": r.is_trivial(),
            "witness": r.witness(),
            "values": values,
        }),
    ))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

fn parse_vector(text: &str, flag: &str) -> Result<Vec<Complex64>, Failure> {
    let v: Vec<Scalar> = config::inline(text, flag)?;
    Ok(v.into_iter()
        .map(|x| match x {
            Scalar::Real(r) => Complex64::new(r, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        })
        .collect())
}

fn complex_json(z: &[Complex64]) -> Value {
    json!(z.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>())
}

fn tga_mul(s: &Settings, a: &str, b: &str, real: bool) -> Run {
    let g = s.group()?;
    let sigma = s.sigma(&g)?.ok_or_else(|| Failure::Config("no multiplier given (config \"sigma\" or --sigma)".into()))?;
    let field = if real { ScalarField::Real } else { ScalarField::Complex };
    let alg = TwistedGroupAlgebra::new(sigma, field)?;
    let x = alg.element(parse_vector(a, "--a")?)?;
    let y = alg.element(parse_vector(b, "--b")?)?;
    let p = x.mul(&y)?;
    let rows = vec![p.coeffs().iter().map(|c| format!("{}+{}i", c.re, c.im)).collect()];
    Ok(Report::new(true, json!({ "product": complex_json(p.coeffs()), "field": field })).table(rows))
}

fn oct_table() -> Run {
    let o = TwistedGroupAlgebra::octonions();
    let label = |sign: bool, k: usize| format!("{}e{k}", if sign { "-" } else { "" });
    let mut table = Vec::new();
    let mut rows = vec![std::iter::once(String::new()).chain((0..8).map(|k| format!("e{k}"))).collect::<Vec<_>>()];
    for a in 0..8 {
        let row: Vec<String> = (0..8)
            .map(|b| {
                let (p, k) = o.basis_product(a, b);
                label(!p.is_zero(), k)
            })
            .collect();
        rows.push(std::iter::once(format!("e{a}")).chain(row.iter().cloned()).collect());
        table.push(row);
    }
    Ok(Report::new(true, json!({ "basis": (0..8).map(|k| format!("e{k}")).collect::<Vec<_>>(), "table": table })).table(rows))
}

fn assoc_cocycle(s: &Settings) -> Run {
    let g = s.group()?;
    let phi = s.phi(&g)?;
    let table = associativity_cocycle_table(&phi)?;
    let n = g.order();
    let mut entries = Vec::with_capacity(table.len());
    let mut rows = vec![vec!["xi".into(), "eta".into(), "zeta".into(), "cocycle".into(), "phi(eta,zeta,xi)".into()]];
    let mut witness = None;
    for (i, v) in table.iter().enumerate() {
        let (xi, eta, zeta) = (i / (n * n), (i / n) % n, i % n);
        let expect = phi.get(eta, zeta, xi);
        if witness.is_none() && *v != expect {
            witness = Some([xi, eta, zeta]);
        }
        entries.push(json!({ "triple": [xi, eta, zeta], "value": v.to_string(), "expected": expect.to_string() }));
        rows.push(vec![xi.to_string(), eta.to_string(), zeta.to_string(), v.to_string(), expect.to_string()]);
    }
    Ok(Report::new(witness.is_none(), json!({ "matches": witness.is_none(), "witness": witness, "table": entries })).table(rows))
}

fn quantize(s: &Settings, q: &QuantizeCmd) -> Run {
    let g = s.group()?;
    let phi = s.phi(&g)?;
    let sigma = s.sigma(&g)?;
    let action = s
        .config
        .action
        .as_ref()
        .ok_or_else(|| Failure::Config("no action given (config \"action\")".into()))?
        .build(&g)?;
    let m = s.config.multiplicity.unwrap_or(1);
    if m == 0 {
        return Err(Failure::Config("multiplicity must be at least 1".into()));
    }
    let def = Deformation::with_sigma(&phi, sigma.as_ref())?;
    let untwisted = phi.is_zero() && sigma.as_ref().is_none_or(|x| x.is_zero());
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let n = g.order();
    match q {
        QuantizeCmd::Product => {
            let a = GradedElement::random(&action, m, !untwisted, &mut rng);
            let b = GradedElement::random(&action, m, !untwisted, &mut rng);
            let p = def.product(&a, &b)?;
            let norms: Vec<f64> = p.components().iter().map(|c| c.norm()).collect();
            let defect = untwisted.then(|| linalg::max_abs_diff(&p.intertwine(), &(a.intertwine() * b.intertwine())));
            let pass = defect.is_none_or(|d| d < s.tolerance);
            Ok(Report::new(
                pass,
                json!({ "block_dim": p.dim(), "degree_norms": norms, "intertwiner_defect": defect }),
            ))
        }
        QuantizeCmd::AssociatorTable => {
            let elems: Vec<GradedElement> = (0..n)
                .map(|chi| GradedElement::random_homogeneous(&action, m, chi, true, &mut rng))
                .collect();
            let mut entries = Vec::new();
            let mut rows = vec![vec!["xi".into(), "eta".into(), "zeta".into(), "phi".into(), "defect".into()]];
            let mut worst = (0.0f64, None);
            for i in 0..n * n * n {
                let t = [i / (n * n), (i / n) % n, i % n];
                let d = def.associator_defect(t, &elems[t[0]], &elems[t[1]], &elems[t[2]])?;
                if d > worst.0 {
                    worst = (d, Some(t));
                }
                let p = phi.get(t[0], t[1], t[2]).to_string();
                rows.push(vec![t[0].to_string(), t[1].to_string(), t[2].to_string(), p.clone(), format!("{d:e}")]);
                entries.push(json!({ "degrees": t, "phi": p, "defect": d }));
            }
            let pass = worst.0 < s.tolerance;
            Ok(Report::new(
                pass,
                json!({ "max_defect": worst.0, "witness": if pass { None } else { worst.1 }, "table": entries }),
            )
            .table(rows))
        }
        QuantizeCmd::Norm => {
            let a = GradedElement::random(&action, m, !untwisted, &mut rng);
            let norm = def.norm(&a)?;
            let unit = def.norm(&GradedElement::unit(&action, m))?;
            let reference = untwisted.then(|| linalg::operator_norm(&a.intertwine()));
            let pass = (unit - 1.0).abs() < 1e-8 && reference.is_none_or(|r| (r - norm).abs() < 1e-8 * r.max(1.0));
            Ok(Report::new(
                pass,
                json!({ "norm": norm, "unit_norm": unit, "untwisted_operator_norm": reference }),
            ))
        }
    }
}

fn duality(s: &Settings, omit: bool) -> Run {
    let g = s.group()?;
    let phi = s.phi(&g)?;
    let desc = s.config.duality.clone().unwrap_or(config::DualityDesc {
        block: None,
        coefficients: None,
        potential: None,
        psi: None,
    });
    let block = desc.block.unwrap_or(2);
    if block == 0 {
        return Err(Failure::Config("block must be at least 1".into()));
    }
    let potential = match &desc.potential {
        Some(p) => p.build(&g)?,
        None => solve_potential(&phi)?,
    };
    let tw = match desc.coefficients.unwrap_or_default() {
        Coefficients::Scalar => TwistData::scalar(&potential, &phi, block)?,
        Coefficients::Perturbed => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let v = TwistData::random_perturbation(&g, block, &mut rng);
            TwistData::perturbed(&potential, &phi, v)?
        }
    };
    let regimes = desc
        .psi
        .unwrap_or_else(|| vec![PsiDesc::Named(PsiName::Zero), PsiDesc::Named(PsiName::MinusPhi)]);
    let variant = if omit { TransformVariant::OmitMultiplier } else { TransformVariant::Full };
    let mut out = Vec::new();
    let mut pass = true;
    for (i, r) in regimes.iter().enumerate() {
        let (label, psi): (String, Cochain3) = match r {
            PsiDesc::Named(PsiName::Zero) => ("zero".into(), Cochain3::zero(&g)),
            PsiDesc::Named(PsiName::MinusPhi) => ("minus_phi".into(), phi.negate()),
            PsiDesc::Named(PsiName::Phi) => ("phi".into(), phi.clone()),
            PsiDesc::Cochain(d) => (format!("custom_{i}"), d.build(&g)?),
        };
        let rep = verify_duality_variant(&tw, &psi, s.trials, s.seed.wrapping_add(i as u64), s.tolerance, variant)?;
        pass &= rep.pass;
        out.push(json!({ "psi": label, "report": rep }));
    }
    Ok(Report::new(pass, json!({ "block": block, "regimes": out })))
}

fn load_bundle(s: &Settings) -> Result<NAPBundle, Failure> {
    let desc = s
        .config
        .bundle
        .as_ref()
        .ok_or_else(|| Failure::Config("no bundle given (config \"bundle\")".into()))?;
    let input = desc.build()?;
    Ok(build_nap_bundle(
        &input.base,
        &input.group,
        &input.phi,
        &input.sigma,
        input.potential.as_ref(),
    )?)
}

fn fiber_json(b: &NAPBundle, x: usize) -> Result<Value, Failure> {
    let f = &b.fibers()[x];
    Ok(json!({
        "point": f.point,
        "sigma": f.sigma,
        "multiplier": f.multiplier,
        "field": f.algebra.field(),
        "commutative": b.commutator_table(x).iter().flatten().all(|p| p.is_zero()),
        "quantization_defect": b.quantization_defect(x)?,
    }))
}

fn bundle(s: &Settings, cmd: &BundleCmd) -> Run {
    let b = load_bundle(s)?;
    match cmd {
        BundleCmd::Build => {
            let fibers = (0..b.base().len()).map(|x| fiber_json(&b, x)).collect::<Result<Vec<_>, _>>()?;
            let tables: Vec<_> = (0..b.base().len()).map(|x| b.commutator_table(x)).collect();
            let distinct = tables.windows(2).all(|w| w[0] != w[1]);
            Ok(Report::new(
                true,
                json!({
                    "base": b.base().points(),
                    "factors": b.group().factors(),
                    "phi": b.phi(),
                    "potential": b.potential(),
                    "fibers": fibers,
                    "pairwise_distinct_neighbours": distinct,
                }),
            ))
        }
        BundleCmd::Check => {
            let r = nap_condition_check(&b, s.trials, s.seed, s.tolerance)?;
            Ok(Report::new(r.pass, serde_json::to_value(&r).expect("serializable")))
        }
        BundleCmd::Fiber { point, emit_table } => {
            let x = b
                .base()
                .index_of(point)
                .ok_or_else(|| Failure::Config(format!("no base point {point:?}")))?;
            let mut v = fiber_json(&b, x)?;
            let mut report = Report::new(true, Value::Null);
            if *emit_table {
                let t = b.structure_table(x);
                let mut rows = vec![vec!["a".into(), "b".into(), "phase".into(), "product".into()]];
                let mut entries = Vec::new();
                for (a, row) in t.iter().enumerate() {
                    for (bb, (p, k)) in row.iter().enumerate() {
                        rows.push(vec![a.to_string(), bb.to_string(), p.to_string(), k.to_string()]);
                        entries.push(json!([p.to_string(), k]));
                    }
                }
                v["structure_table"] = json!(entries);
                report = report.table(rows);
            }
            report.result = v;
            Ok(report)
        }
    }
}

fn verify_all(s: &Settings, criterion: Option<u8>) -> Run {
    let cfg = SuiteConfig {
        seed: s.seed,
        trials: s.trials,
        tolerance: s.tolerance,
    };
    let report = match criterion {
        None => suite::run_all(&cfg),
        Some(id) => {
            let r = suite::run(id, &cfg).ok_or_else(|| Failure::Config(format!("no criterion {id}; expected 1-9")))?;
            suite::SuiteReport {
                pass: r.pass,
                config: cfg,
                criteria: vec![r],
            }
        }
    };
    let mut timing = serde_json::Map::new();
    let mut v = serde_json::to_value(&report).expect("serializable");
    if let Some(list) = v["criteria"].as_array_mut() {
        for c in list {
            if let Some(obj) = c.as_object_mut() {
                let id = obj["id"].to_string();
                if let Some(t) = obj.remove("elapsed_s") {
                    timing.insert(id, t);
                }
            }
        }
    }
    let rows = std::iter::once(vec!["criterion".into(), "title".into(), "pass".into()])
        .chain(report.criteria.iter().map(|c| vec![c.id.to_string(), c.title.to_string(), c.pass.to_string()]))
        .collect();
    let mut out = Report::new(report.pass, v).table(rows);
    out.timing = Some(Value::Object(timing));
    Ok(out)
}

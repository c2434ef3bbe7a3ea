//! Report engine: resolves a run configuration to a model, executes the
//! selected checks, and emits a structured verification report.
//!
//! Reports are deterministic for a fixed configuration and seed: random
//! probes, samples, and test operators are drawn from per-purpose
//! `ChaCha12` streams derived from the seed, and all report collections
//! have a fixed order. The only nondeterministic field is `wall_time_ms`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{
    anticommutator, check_adjoint_pairing, check_cyclicity, check_relations, commutator, dagger,
    FieldError, FockRep, Probe, RelationKind,
};
use crate::fock::{
    check_projection_commutation, enumerate_basis, fock_projection, second_quantization, FockError,
    GradedOperator, Statistics,
};
use crate::krein::{validate_metric, KreinError, KreinTriplet};
use crate::linalg;
use crate::models::{
    brs_build, brs_check, build_model, model_catalog, ModelError, ModelInfo, ModelKind, ModelSpec,
    Params,
};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SAMPLE_COUNT: usize = 50;
pub const DEFAULT_RANDOM_PROBES: usize = 10;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model build failed: {0}")]
    ModelBuildFailed(String),
    #[error("size overflow: {0}")]
    SizeOverflow(String),
    #[error("metric invalid: {0}")]
    MetricInvalid(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl SuiteError {
    /// Configuration and build problems share one exit code; check failures
    /// are reported through the report's overall verdict instead.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl From<KreinError> for SuiteError {
    fn from(e: KreinError) -> Self {
        match e {
            KreinError::DimensionMismatch { .. } => SuiteError::ModelBuildFailed(e.to_string()),
            other => SuiteError::MetricInvalid(other.to_string()),
        }
    }
}

impl From<FockError> for SuiteError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::SizeOverflow { .. } => SuiteError::SizeOverflow(e.to_string()),
            other => SuiteError::ModelBuildFailed(other.to_string()),
        }
    }
}

impl From<FieldError> for SuiteError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Krein(k) => k.into(),
            FieldError::Fock(f) => f.into(),
            FieldError::CutoffTooSmall { cutoff } => {
                SuiteError::ConfigInvalid(format!("cutoff {cutoff} too small"))
            }
            other => SuiteError::ModelBuildFailed(other.to_string()),
        }
    }
}

impl From<ModelError> for SuiteError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownModel { name } => SuiteError::UnknownModel(name),
            ModelError::BadParams { detail } => SuiteError::ConfigInvalid(detail),
            ModelError::Krein(k) => k.into(),
            ModelError::Field(f) => f.into(),
            ModelError::Fock(f) => f.into(),
        }
    }
}

/// Check families selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Relations,
    Adjoint,
    Vacuum,
    Cyclicity,
    Decomposition,
    DaggerSwap,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::Relations,
        CheckKind::Adjoint,
        CheckKind::Vacuum,
        CheckKind::Cyclicity,
        CheckKind::Decomposition,
        CheckKind::DaggerSwap,
    ];

    pub fn parse(name: &str) -> Result<Self, SuiteError> {
        match name {
            "relations" => Ok(CheckKind::Relations),
            "adjoint" => Ok(CheckKind::Adjoint),
            "vacuum" => Ok(CheckKind::Vacuum),
            "cyclicity" => Ok(CheckKind::Cyclicity),
            "decomposition" => Ok(CheckKind::Decomposition),
            "dagger-swap" => Ok(CheckKind::DaggerSwap),
            other => Err(SuiteError::ConfigInvalid(format!(
                "unknown check `{other}` (expected relations, adjoint, vacuum, cyclicity, decomposition, dagger-swap)"
            ))),
        }
    }
}

/// Where the model definition comes from.
#[derive(Debug, Clone)]
pub enum ModelRef {
    Name(String),
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelRef,
    pub params: Params,
    pub cutoff: Option<usize>,
    /// Overrides every check tolerance when set. Metric validation uses the
    /// `metric_tol` model parameter instead.
    pub tol: Option<f64>,
    pub seed: u64,
    pub checks: Option<Vec<CheckKind>>,
    pub basis_cap: Option<usize>,
}

impl RunConfig {
    pub fn for_model(name: &str) -> Self {
        RunConfig {
            model: ModelRef::Name(name.to_string()),
            params: Params::new(),
            cutoff: None,
            tol: None,
            seed: DEFAULT_SEED,
            checks: None,
            basis_cap: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ParamValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelIdentity {
    pub name: String,
    pub statistics: String,
    pub dim: usize,
    pub cutoff: usize,
    pub source: String,
    pub anchor: String,
    pub params: Vec<ParamValue>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunEnvironment {
    pub seed: u64,
    pub basis_size: usize,
    pub full_basis_size: usize,
    pub probe_count: usize,
    pub sample_count: usize,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexValue {
    fn from(z: C64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

/// One check record. `class` distinguishes verdict checks (they decide the
/// overall outcome) from informative records (measured quantities that are
/// reported but never fail the run).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub class: String,
    pub residual: f64,
    pub tolerance: Option<f64>,
    pub verdict: String,
    pub domain: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<ComplexValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    fn verdict_check(
        name: &str,
        anchor: &str,
        residual: f64,
        tolerance: f64,
        domain: &str,
    ) -> Self {
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            class: "verdict".to_string(),
            residual,
            tolerance: Some(tolerance),
            verdict: if residual <= tolerance {
                "pass"
            } else {
                "fail"
            }
            .to_string(),
            domain: domain.to_string(),
            measured: None,
            note: None,
        }
    }

    fn informative(name: &str, anchor: &str, residual: f64, domain: &str) -> Self {
        CheckRecord {
            name: name.to_string(),
            anchor: anchor.to_string(),
            class: "informative".to_string(),
            residual,
            tolerance: None,
            verdict: "info".to_string(),
            domain: domain.to_string(),
            measured: None,
            note: None,
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }

    fn with_measured(mut self, z: C64) -> Self {
        self.measured = Some(z.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != "fail"
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerificationReport {
    pub tool: String,
    pub version: String,
    pub model: ModelIdentity,
    pub environment: RunEnvironment,
    pub checks: Vec<CheckRecord>,
    pub overall: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.overall == "pass"
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

// Fixed anchor table: every record's anchor is one of these identity
// strings.
const ANCHOR_METRIC: &str = "η* = η, η² = I";
const ANCHOR_GAMMA: &str = "Γ(η)* = Γ(η), Γ(η)² = I";
const ANCHOR_PROJECTION: &str = "P± Γ(η) = Γ(η) P±";
const ANCHOR_DECOMPOSITION: &str = "η = E₊ − E₋ with ±(·|·) positive-definite on H±";
const ANCHOR_FEYNMAN_PARTITION: &str =
    "F₊(C⁴)± spanned by occupation vectors with even/odd e₀ count";
const ANCHOR_CCR: &str = "a(f)a†(g) − a†(g)a(f) = ⟨f|ηg⟩I";
const ANCHOR_CAR: &str = "a(f)a†(g) + a†(g)a(f) = ⟨f|ηg⟩I";
const ANCHOR_COEFFICIENTS: &str = "stated relation constants equal ⟨f|ηg⟩";
const ANCHOR_TOP_DEFECT: &str = "truncation defect above the verdict domain";
const ANCHOR_BRS: &str = "Q_B† = Q_B, Q_B² = 0, Q_C† = Q_C, Q_CQ_B − Q_BQ_C = cQ_B";
const ANCHOR_BRS_CONSTANT: &str = "Q_CQ_B − Q_BQ_C = cQ_B, measured c";
const ANCHOR_PAIRING: &str = "(a†(f)v|w) = (v|a(f)w)";
const ANCHOR_BRS_PAIRING: &str = "(x†v|w) = (v|xw) with (v|w) = ⟨v|Uw⟩";
const ANCHOR_VACUUM: &str = "a(f)Ω = 0 and a†(f)Ω = ηf";
const ANCHOR_CYCLICITY: &str = "a†-monomials applied to Ω span the truncated space";
const ANCHOR_DAGGER_FORMULA: &str = "a†(f) = a*(ηf) = Γ(η)a*(f)Γ(η)*";
const ANCHOR_DAGGER_ALGEBRA: &str = "(x†)† = x and (xy)† = y†x†";
const ANCHOR_SWAP: &str = "Γ(η)a(f)Γ(η)* with the * involution satisfies ordinary CCR/CAR";

/// Per-check tolerances; `--tol` collapses them to a single value.
#[derive(Debug, Clone, Copy)]
struct Tolerances {
    gamma: f64,
    projection: f64,
    decomposition: f64,
    relations_bose: f64,
    relations_fermi: f64,
    coefficients: f64,
    pairing: f64,
    vacuum: f64,
    dagger: f64,
    swap: f64,
    brs: f64,
}

impl Tolerances {
    fn new(override_tol: Option<f64>) -> Self {
        match override_tol {
            Some(t) => Tolerances {
                gamma: t,
                projection: t,
                decomposition: t,
                relations_bose: t,
                relations_fermi: t,
                coefficients: t,
                pairing: t,
                vacuum: t,
                dagger: t,
                swap: t,
                brs: t,
            },
            None => Tolerances {
                gamma: 1e-12,
                projection: 1e-12,
                decomposition: 1e-12,
                relations_bose: 1e-10,
                relations_fermi: 1e-12,
                coefficients: 1e-12,
                pairing: 1e-12,
                vacuum: 1e-12,
                dagger: 1e-12,
                swap: 1e-10,
                brs: 1e-14,
            },
        }
    }
}

fn selected(config: &RunConfig, kind: CheckKind) -> bool {
    match &config.checks {
        None => true,
        Some(list) => list.contains(&kind),
    }
}

/// Loads a model definition from a JSON file, validating the metric with
/// the default tolerance.
pub fn load_model_file(path: &Path) -> Result<ModelSpec, SuiteError> {
    load_model_file_with_tol(path, crate::krein::DEFAULT_METRIC_TOL)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    name: String,
    statistics: String,
    dim: usize,
    eta: EtaRows,
    cutoff: Option<usize>,
    probes: Option<Vec<ProbePair>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EtaRows {
    rows: Vec<Vec<ReIm>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReIm {
    re: f64,
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbePair {
    f: usize,
    g: usize,
}

/// Loads a model file, validating the metric at the given tolerance.
pub fn load_model_file_with_tol(path: &Path, metric_tol: f64) -> Result<ModelSpec, SuiteError> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| {
        if e.classify() == serde_json::error::Category::Syntax
            || e.classify() == serde_json::error::Category::Eof
        {
            SuiteError::ParseError(e.to_string())
        } else {
            SuiteError::SchemaError(e.to_string())
        }
    })?;
    let kind = match file.statistics.as_str() {
        "bose" => ModelKind::Bose,
        "fermi" => ModelKind::Fermi,
        other => {
            return Err(SuiteError::SchemaError(format!(
                "statistics must be `bose` or `fermi`, got `{other}`"
            )))
        }
    };
    if file.dim == 0 {
        return Err(SuiteError::SchemaError("dim must be at least 1".into()));
    }
    if file.eta.rows.len() != file.dim || file.eta.rows.iter().any(|r| r.len() != file.dim) {
        return Err(SuiteError::SchemaError(format!(
            "eta must be a {0}x{0} matrix of {{re, im}} entries",
            file.dim
        )));
    }
    let eta = DMatrix::from_fn(file.dim, file.dim, |i, j| {
        C64::new(file.eta.rows[i][j].re, file.eta.rows[i][j].im)
    });
    validate_metric(&eta, metric_tol)?;
    let rel_kind = match kind {
        ModelKind::Bose => RelationKind::Commutator,
        _ => RelationKind::Anticommutator,
    };
    let mut expected = Vec::new();
    if let Some(probes) = &file.probes {
        for p in probes {
            if p.f >= file.dim || p.g >= file.dim {
                return Err(SuiteError::SchemaError(format!(
                    "probe ({}, {}) out of range for dim {}",
                    p.f, p.g, file.dim
                )));
            }
            expected.push(crate::models::ExpectedRelation {
                label: format!("(e{},e{})", p.f + 1, p.g + 1),
                f_mode: p.f,
                g_mode: p.g,
                coefficient: eta[(p.f, p.g)],
                kind: rel_kind,
            });
        }
    }
    let cutoff = file.cutoff.unwrap_or(match kind {
        ModelKind::Bose => 3,
        _ => file.dim,
    });
    let anchor = match kind {
        ModelKind::Bose => ANCHOR_CCR,
        _ => ANCHOR_CAR,
    };
    Ok(ModelSpec {
        name: file.name,
        kind,
        dim: file.dim,
        eta,
        cutoff,
        params: vec![],
        expected,
        anchor: anchor.to_string(),
    })
}

/// The model catalog, one entry per registered model.
pub fn list_models() -> &'static [ModelInfo] {
    model_catalog()
}

fn resolve_model(
    config: &RunConfig,
    metric_tol: f64,
    model_params: &Params,
) -> Result<(ModelSpec, String), SuiteError> {
    match &config.model {
        ModelRef::Name(name) => {
            let spec = build_model(name, model_params)?;
            Ok((spec, "builtin".to_string()))
        }
        ModelRef::File(path) => {
            if !model_params.is_empty() {
                return Err(SuiteError::ConfigInvalid(
                    "file models take no model parameters (except metric_tol)".into(),
                ));
            }
            let spec = load_model_file_with_tol(path, metric_tol)?;
            Ok((spec, "file".to_string()))
        }
    }
}

/// Runs the configured checks and assembles the verification report.
pub fn run_suite(config: &RunConfig) -> Result<VerificationReport, SuiteError> {
    let started = Instant::now();
    if let Some(t) = config.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(SuiteError::ConfigInvalid(format!(
                "tolerance must be positive and finite, got {t}"
            )));
        }
    }
    let mut model_params = config.params.clone();
    let metric_tol = match model_params.remove("metric_tol") {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => {
            return Err(SuiteError::ConfigInvalid(format!(
                "metric_tol must be positive and finite, got {t}"
            )))
        }
        None => crate::krein::DEFAULT_METRIC_TOL,
    };
    let tols = Tolerances::new(config.tol);
    let (spec, source) = resolve_model(config, metric_tol, &model_params)?;
    let cutoff = config.cutoff.unwrap_or(spec.cutoff);

    let (checks, basis_size, full_basis_size, probe_count, sample_count) = match spec.kind {
        ModelKind::Matrix => {
            let checks = run_brs_checks(config, &spec, &tols)?;
            (checks, spec.dim, spec.dim, 0, 20)
        }
        ModelKind::Bose | ModelKind::Fermi => {
            run_fock_checks(config, &spec, cutoff, metric_tol, &tols)?
        }
    };

    let overall = if checks.iter().all(CheckRecord::passed) {
        "pass"
    } else {
        "fail"
    };
    Ok(VerificationReport {
        tool: "etafock".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        model: ModelIdentity {
            name: spec.name.clone(),
            statistics: spec.kind.to_string(),
            dim: spec.dim,
            cutoff,
            source,
            anchor: spec.anchor.clone(),
            params: spec
                .params
                .iter()
                .map(|(name, value)| ParamValue {
                    name: name.clone(),
                    value: *value,
                })
                .collect(),
        },
        environment: RunEnvironment {
            seed: config.seed,
            basis_size,
            full_basis_size,
            probe_count,
            sample_count,
            wall_time_ms: started.elapsed().as_millis() as u64,
        },
        checks,
        overall: overall.to_string(),
    })
}

#[allow(clippy::type_complexity)]
fn run_fock_checks(
    config: &RunConfig,
    spec: &ModelSpec,
    cutoff: usize,
    metric_tol: f64,
    tols: &Tolerances,
) -> Result<(Vec<CheckRecord>, usize, usize, usize, usize), SuiteError> {
    let stats = spec.statistics().expect("fock model");
    if stats == Statistics::Bose && cutoff < 2 && selected(config, CheckKind::Relations) {
        return Err(SuiteError::ConfigInvalid(format!(
            "bose relation checks need cutoff >= 2, got {cutoff}"
        )));
    }
    let residuals = validate_metric(&spec.eta, metric_tol)?;
    let triplet = KreinTriplet::new(spec.eta.clone(), metric_tol)?;
    let rep = FockRep::new(&triplet, stats, cutoff, config.basis_cap)?;
    let basis = rep.basis().clone();
    let dim = spec.dim;
    let relation_tol = match stats {
        Statistics::Bose => tols.relations_bose,
        _ => tols.relations_fermi,
    };

    // Independent random streams so that the selector does not shift the
    // draws of the checks that do run.
    let mut probe_rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut sample_rng = ChaCha12Rng::seed_from_u64(config.seed.wrapping_add(1));
    let mut op_rng = ChaCha12Rng::seed_from_u64(config.seed.wrapping_add(2));

    let mut probes: Vec<Probe> = spec
        .expected
        .iter()
        .map(|r| Probe {
            label: r.label.clone(),
            f: unit(dim, r.f_mode),
            g: unit(dim, r.g_mode),
        })
        .collect();
    if spec.expected.is_empty() {
        for i in 0..dim {
            for j in 0..dim {
                probes.push(Probe::basis_pair(dim, i, j));
            }
        }
    }
    for k in 0..DEFAULT_RANDOM_PROBES {
        probes.push(Probe {
            label: format!("r{k}"),
            f: linalg::random_vector(&mut probe_rng, dim),
            g: linalg::random_vector(&mut probe_rng, dim),
        });
    }
    let samples = crate::models::pairing_samples(&rep, DEFAULT_SAMPLE_COUNT, &mut sample_rng);

    let mut checks = Vec::new();
    checks.push(
        CheckRecord::verdict_check(
            "metric",
            ANCHOR_METRIC,
            residuals.selfadjoint.max(residuals.involutive),
            metric_tol,
            "one-particle space",
        )
        .with_note(format!(
            "selfadjointness {:e}, involutivity {:e}",
            residuals.selfadjoint, residuals.involutive
        )),
    );

    if selected(config, CheckKind::Decomposition) {
        let gamma_residual = linalg::hermiticity_residual(rep.gamma().matrix())
            .max(linalg::involution_residual(rep.gamma().matrix()));
        checks.push(CheckRecord::verdict_check(
            "gamma_involution",
            ANCHOR_GAMMA,
            gamma_residual,
            tols.gamma,
            &format!("{stats} basis, cutoff {}", basis.cutoff()),
        ));

        let full = rep.full_basis().clone();
        let gamma_full = second_quantization(&spec.eta, &full, metric_tol.max(1e-12))?;
        let mut projection_residual = 0.0f64;
        for kind in [Statistics::Bose, Statistics::Fermi] {
            let projection = fock_projection(&full, kind)?;
            projection_residual =
                projection_residual.max(check_projection_commutation(&gamma_full, &projection)?);
        }
        checks.push(CheckRecord::verdict_check(
            "projection_commutation",
            ANCHOR_PROJECTION,
            projection_residual,
            tols.projection,
            &format!("full basis, cutoff {}", full.cutoff()),
        ));

        checks.push(decomposition_record(&triplet, tols.decomposition)?);

        if spec.name == "feynman" {
            let dec = crate::models::feynman_decomposition_check(cutoff, tols.decomposition)?;
            let residual = dec
                .eigenvector_residual
                .max((1.0 - dec.gram_margin_plus).max(0.0))
                .max((1.0 - dec.gram_margin_minus).max(0.0));
            checks.push(
                CheckRecord::verdict_check(
                    "feynman_partition",
                    ANCHOR_FEYNMAN_PARTITION,
                    residual,
                    tols.decomposition,
                    &format!("bose basis, cutoff {cutoff}"),
                )
                .with_note(format!(
                    "{} even-parity labels, {} odd; gram margins {:.3}/{:.3}",
                    dec.plus_count, dec.minus_count, dec.gram_margin_plus, dec.gram_margin_minus
                )),
            );
        }
    }

    if selected(config, CheckKind::Relations) {
        let relation = check_relations(&rep, &probes, relation_tol)?;
        let anchor = match relation.kind {
            RelationKind::Commutator => ANCHOR_CCR,
            RelationKind::Anticommutator => ANCHOR_CAR,
        };
        checks.push(
            CheckRecord::verdict_check(
                "relations",
                anchor,
                relation.max_residual.max(relation.zero_relation_residual),
                relation_tol,
                &relation.domain,
            )
            .with_note(format!(
                "{} probes; zero-relation residual {:e}",
                relation.probes.len(),
                relation.zero_relation_residual
            )),
        );
        if !spec.expected.is_empty() {
            let deviation = spec.coefficient_consistency()?;
            checks.push(CheckRecord::verdict_check(
                "expected_coefficients",
                ANCHOR_COEFFICIENTS,
                deviation,
                tols.coefficients,
                "stated relation table",
            ));
        }
        if let Some(defect) = relation.max_top_defect {
            checks.push(
                CheckRecord::informative(
                    "top_sector_defect",
                    ANCHOR_TOP_DEFECT,
                    defect,
                    &format!("sectors {}..={}", cutoff.saturating_sub(1), cutoff),
                )
                .with_note("expected nonzero: creators truncate at the top sector".to_string()),
            );
        }
    }

    if selected(config, CheckKind::Adjoint) {
        let mut residual = 0.0f64;
        for k in 0..dim {
            let pair = rep.field_pair(&unit(dim, k))?;
            residual = residual
                .max(check_adjoint_pairing(&pair, rep.gamma(), &samples, tols.pairing)?.residual);
        }
        checks.push(CheckRecord::verdict_check(
            "adjoint",
            ANCHOR_PAIRING,
            residual,
            tols.pairing,
            &format!("{DEFAULT_SAMPLE_COUNT} seeded samples"),
        ));
    }

    if selected(config, CheckKind::Vacuum) {
        let mut residual = 0.0f64;
        for k in 0..dim {
            let pair = rep.field_pair(&unit(dim, k))?;
            residual = residual.max(crate::field::vacuum_residual(&pair));
            // a†(f) Omega = eta f embedded in sector 1
            let one = pair.creator_dagger.apply(&rep.vacuum());
            let eta_f = triplet.apply_eta(&unit(dim, k));
            let mut expect = DVector::<C64>::zeros(basis.total_len());
            for (j, label) in basis.sector_labels(1).iter().enumerate() {
                let mode = match stats {
                    Statistics::Bose => label.iter().position(|&o| o == 1).unwrap(),
                    _ => label[0],
                };
                expect[basis.sector_offset(1) + j] = eta_f[mode];
            }
            residual = residual.max(linalg::max_abs_vec(&(one - expect)));
        }
        checks.push(CheckRecord::verdict_check(
            "vacuum",
            ANCHOR_VACUUM,
            residual,
            tols.vacuum,
            "vacuum sector",
        ));
    }

    if selected(config, CheckKind::Cyclicity) {
        let cyc = check_cyclicity(&triplet, stats, cutoff)?;
        checks.push(
            CheckRecord::verdict_check(
                "cyclicity",
                ANCHOR_CYCLICITY,
                (cyc.expected as f64 - cyc.rank as f64).abs(),
                0.5,
                &format!("{} monomials", cyc.expected),
            )
            .with_note(format!("rank {}/{}", cyc.rank, cyc.expected)),
        );
    }

    if selected(config, CheckKind::DaggerSwap) {
        let mut formula_residual = 0.0f64;
        for k in 0..dim {
            let f = unit(dim, k);
            let a = rep.annihilator(&f)?;
            let via_gamma = dagger(&a, rep.gamma())?;
            let direct = rep.creator_star(&triplet.apply_eta(&f))?;
            formula_residual = formula_residual.max(via_gamma.sub(&direct)?.max_abs());
        }
        checks.push(CheckRecord::verdict_check(
            "dagger_formula",
            ANCHOR_DAGGER_FORMULA,
            formula_residual,
            tols.dagger,
            "mode annihilators",
        ));

        let total = basis.total_len();
        let mut algebra_residual = 0.0f64;
        for _ in 0..DEFAULT_SAMPLE_COUNT {
            let x = GradedOperator::from_matrix(
                basis.clone(),
                basis.clone(),
                linalg::random_matrix(&mut op_rng, total, total),
                None,
            )?;
            let y = GradedOperator::from_matrix(
                basis.clone(),
                basis.clone(),
                linalg::random_matrix(&mut op_rng, total, total),
                None,
            )?;
            let ddx = dagger(&dagger(&x, rep.gamma())?, rep.gamma())?;
            algebra_residual = algebra_residual.max(ddx.sub(&x)?.max_abs());
            let dxy = dagger(&x.compose(&y)?, rep.gamma())?;
            let dydx = dagger(&y, rep.gamma())?.compose(&dagger(&x, rep.gamma())?)?;
            algebra_residual = algebra_residual.max(dxy.sub(&dydx)?.max_abs());
        }
        checks.push(CheckRecord::verdict_check(
            "dagger_algebra",
            ANCHOR_DAGGER_ALGEBRA,
            algebra_residual,
            tols.dagger,
            &format!("{DEFAULT_SAMPLE_COUNT} seeded operator pairs"),
        ));

        checks.push(involution_swap_record(&rep, &probes, tols.swap)?);
    }

    Ok((
        checks,
        basis.total_len(),
        rep.full_basis().total_len(),
        probes.len(),
        DEFAULT_SAMPLE_COUNT,
    ))
}

fn decomposition_record(triplet: &KreinTriplet, tol: f64) -> Result<CheckRecord, SuiteError> {
    let dec = triplet.fundamental_decomposition()?;
    let reconstruction = dec.reconstruction_residual(triplet.eta());
    let margin = |basis: &[DVector<C64>], sign: f64| -> f64 {
        if basis.is_empty() {
            return f64::INFINITY;
        }
        let g = crate::krein::gram_matrix(
            |v, w| triplet.indefinite_form(v, w).expect("validated dims") * C64::new(sign, 0.0),
            basis,
        )
        .expect("equal-length eigenvectors");
        g.symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |acc, &l| acc.min(l))
    };
    let margin_plus = margin(&dec.basis_plus, 1.0);
    let margin_minus = margin(&dec.basis_minus, -1.0);
    let residual = reconstruction
        .max((1.0 - margin_plus).max(0.0))
        .max((1.0 - margin_minus).max(0.0));
    Ok(CheckRecord::verdict_check(
        "decomposition",
        ANCHOR_DECOMPOSITION,
        residual,
        tol,
        "one-particle space",
    )
    .with_note(format!(
        "dim H+ = {}, dim H- = {}",
        dec.dim_plus(),
        dec.dim_minus()
    )))
}

fn involution_swap_record(
    rep: &FockRep,
    probes: &[Probe],
    tol: f64,
) -> Result<CheckRecord, SuiteError> {
    let basis = rep.basis().clone();
    let identity = GradedOperator::identity(basis.clone());
    let bose = rep.statistics() == Statistics::Bose;
    let hi = if bose {
        basis.cutoff().saturating_sub(2)
    } else {
        basis.cutoff()
    };
    let mut residual = 0.0f64;
    for probe in probes {
        let conj_f = rep
            .gamma()
            .compose(&rep.annihilator(&probe.f)?)?
            .compose(&rep.gamma().adjoint())?;
        let conj_g = rep
            .gamma()
            .compose(&rep.annihilator(&probe.g)?)?
            .compose(&rep.gamma().adjoint())?;
        let bracket = if bose {
            commutator(&conj_f, &conj_g.adjoint())?
        } else {
            anticommutator(&conj_f, &conj_g.adjoint())?
        };
        let coeff = probe.f.dotc(&probe.g);
        let defect = bracket.sub(&identity.scale(coeff))?;
        residual = residual.max(defect.max_column_norm_over_sectors(0, hi));
    }
    Ok(CheckRecord::verdict_check(
        "involution_swap",
        ANCHOR_SWAP,
        residual,
        tol,
        &format!("sectors 0..={hi}"),
    ))
}

fn run_brs_checks(
    config: &RunConfig,
    spec: &ModelSpec,
    tols: &Tolerances,
) -> Result<Vec<CheckRecord>, SuiteError> {
    let a = spec
        .params
        .iter()
        .find(|(name, _)| name == "a")
        .map(|(_, v)| *v)
        .unwrap_or(0.0);
    let rep = brs_build(a);
    let check = brs_check(&rep, config.seed, tols.brs).map_err(SuiteError::from)?;
    let mut checks = Vec::new();

    let residuals = validate_metric(&rep.u, crate::krein::DEFAULT_METRIC_TOL)?;
    checks.push(CheckRecord::verdict_check(
        "metric",
        ANCHOR_METRIC,
        residuals.selfadjoint.max(residuals.involutive),
        crate::krein::DEFAULT_METRIC_TOL,
        "representation space C²",
    ));

    if selected(config, CheckKind::Decomposition) {
        checks.push(
            CheckRecord::verdict_check(
                "decomposition",
                ANCHOR_DECOMPOSITION,
                check.decomposition_residual.max(check.u_det_residual),
                tols.brs,
                "representation space C²",
            )
            .with_note("H± = C(e1 ± e2); |det U| = 1".to_string()),
        );
    }

    if selected(config, CheckKind::Relations) {
        let residual = check
            .q_b_selfadjoint
            .max(check.q_c_selfadjoint)
            .max(check.q_b_nilpotent)
            .max(check.proportionality_residual);
        checks.push(CheckRecord::verdict_check(
            "relations",
            ANCHOR_BRS,
            residual,
            tols.brs,
            "2x2 matrices",
        ));
        checks.push(
            CheckRecord::informative(
                "brs_commutator_constant",
                ANCHOR_BRS_CONSTANT,
                (check.measured_constant - C64::new(0.0, 1.0)).norm(),
                "2x2 matrices",
            )
            .with_measured(check.measured_constant)
            .with_note(
                "defining relation states c = -i; the displayed matrices realize c = +i \
                 (residual is the distance from +i)"
                    .to_string(),
            ),
        );
    }

    if selected(config, CheckKind::Adjoint) {
        checks.push(
            CheckRecord::verdict_check(
                "adjoint",
                ANCHOR_BRS_PAIRING,
                check.pairing_residual.max(check.null_vector_residual),
                tols.brs,
                "20 seeded samples",
            )
            .with_note("includes (Q_B v|Q_B v) = 0 null-vector check".to_string()),
        );
    }

    if selected(config, CheckKind::DaggerSwap) {
        let mut rng = ChaCha12Rng::seed_from_u64(config.seed.wrapping_add(2));
        let mut residual = 0.0f64;
        for _ in 0..DEFAULT_SAMPLE_COUNT {
            let x = linalg::random_matrix(&mut rng, 2, 2);
            let y = linalg::random_matrix(&mut rng, 2, 2);
            residual = residual.max(linalg::max_abs(&(rep.dagger(&rep.dagger(&x)) - &x)));
            let dxy = rep.dagger(&(&x * &y));
            let dydx = rep.dagger(&y) * rep.dagger(&x);
            residual = residual.max(linalg::max_abs(&(dxy - dydx)));
        }
        checks.push(CheckRecord::verdict_check(
            "dagger_algebra",
            ANCHOR_DAGGER_ALGEBRA,
            residual,
            tols.brs,
            &format!("{DEFAULT_SAMPLE_COUNT} seeded operator pairs"),
        ));
    }

    Ok(checks)
}

fn unit(dim: usize, k: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[k] = C64::new(1.0, 0.0);
    v
}

/// One-particle and Fock-level decomposition summary used by the
/// `decompose` CLI command.
pub fn decomposition_summary(
    spec: &ModelSpec,
    cutoff: usize,
    cap: Option<usize>,
) -> Result<String, SuiteError> {
    use std::fmt::Write;
    let mut out = String::new();
    let triplet = KreinTriplet::new(spec.eta.clone(), crate::krein::DEFAULT_METRIC_TOL)?;
    let dec = triplet.fundamental_decomposition()?;
    writeln!(out, "model: {}", spec.name).unwrap();
    writeln!(out, "statistics: {}", spec.kind).unwrap();
    writeln!(out, "one-particle dimension: {}", spec.dim).unwrap();
    writeln!(out, "dim H+: {}", dec.dim_plus()).unwrap();
    writeln!(out, "dim H-: {}", dec.dim_minus()).unwrap();
    let fmt_vec = |v: &DVector<C64>| -> String {
        let entries: Vec<String> = v
            .iter()
            .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
            .collect();
        format!("[{}]", entries.join(", "))
    };
    for (label, basis) in [("H+", &dec.basis_plus), ("H-", &dec.basis_minus)] {
        for v in basis {
            writeln!(out, "{label} basis vector: {}", fmt_vec(v)).unwrap();
        }
    }
    if let Some(stats) = spec.statistics() {
        let basis = enumerate_basis(stats, spec.dim, cutoff, cap)?;
        let gamma = second_quantization(
            &spec.eta,
            &basis,
            crate::krein::DEFAULT_METRIC_TOL.max(1e-12),
        )?;
        let eig = gamma.matrix().clone().symmetric_eigen();
        let plus = eig.eigenvalues.iter().filter(|l| **l > 0.0).count();
        let minus = basis.total_len() - plus;
        writeln!(out, "fock cutoff: {} ({} basis)", basis.cutoff(), stats).unwrap();
        writeln!(out, "fock basis size: {}", basis.total_len()).unwrap();
        writeln!(out, "Gamma(eta) +1 eigenspace: {plus}").unwrap();
        writeln!(out, "Gamma(eta) -1 eigenspace: {minus}").unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normalized(report: &VerificationReport) -> String {
        let mut r = report.clone();
        r.environment.wall_time_ms = 0;
        r.to_json()
    }

    #[test]
    fn abnormal_bose_run_passes() {
        let mut config = RunConfig::for_model("abnormal_bose");
        config.cutoff = Some(3);
        let report = run_suite(&config).unwrap();
        assert!(report.passed(), "{}", report.to_json());
        let relations = report.check("relations").unwrap();
        assert!(relations.residual <= 1e-12);
        let defect = report.check("top_sector_defect").unwrap();
        assert_eq!(defect.class, "informative");
        assert!(defect.residual > 0.0);
    }

    #[test]
    fn reports_are_deterministic_given_the_seed() {
        let mut config = RunConfig::for_model("froissart");
        config.seed = 4242;
        let a = run_suite(&config).unwrap();
        let b = run_suite(&config).unwrap();
        assert_eq!(normalized(&a), normalized(&b));
        // a different seed changes the drawn probes but not the verdicts
        config.seed = 11;
        let c = run_suite(&config).unwrap();
        assert!(c.passed());
    }

    #[test]
    fn brs_run_reports_the_measured_constant() {
        let mut config = RunConfig::for_model("brs");
        config.params.insert("a".into(), 1.0);
        let report = run_suite(&config).unwrap();
        assert!(report.passed(), "{}", report.to_json());
        let constant = report.check("brs_commutator_constant").unwrap();
        assert_eq!(constant.class, "informative");
        let measured = constant.measured.unwrap();
        assert!((measured.re - 0.0).abs() < 1e-15);
        assert!((measured.im - 1.0).abs() < 1e-15);
        // informative records never affect the verdict
        assert_eq!(constant.verdict, "info");
    }

    #[test]
    fn bose_relations_require_cutoff_two() {
        let mut config = RunConfig::for_model("feynman");
        config.cutoff = Some(1);
        match run_suite(&config) {
            Err(SuiteError::ConfigInvalid(msg)) => assert!(msg.contains("cutoff")),
            other => panic!("expected ConfigInvalid, got {other:?}"),
        }
    }

    #[test]
    fn deselecting_relations_allows_cutoff_one() {
        let mut config = RunConfig::for_model("feynman");
        config.cutoff = Some(1);
        config.checks = Some(vec![CheckKind::Vacuum, CheckKind::Decomposition]);
        let report = run_suite(&config).unwrap();
        assert!(report.passed());
        assert!(report.check("relations").is_none());
        assert!(report.check("vacuum").is_some());
    }

    #[test]
    fn every_builtin_model_passes_its_default_suite() {
        for name in crate::models::MODEL_NAMES {
            let report = run_suite(&RunConfig::for_model(name)).unwrap();
            assert!(report.passed(), "{name}: {}", report.to_json());
        }
    }

    #[test]
    fn model_files_round_trip() {
        let dir = std::env::temp_dir().join("etafock-suite-tests");
        std::fs::create_dir_all(&dir).unwrap();

        // identity metric
        let path = dir.join("identity.json");
        std::fs::write(
            &path,
            r#"{
  "name": "custom_identity",
  "statistics": "bose",
  "dim": 2,
  "eta": {"rows": [[{"re": 1.0, "im": 0.0}, {"re": 0.0, "im": 0.0}],
                    [{"re": 0.0, "im": 0.0}, {"re": 1.0, "im": 0.0}]]},
  "cutoff": 3
}"#,
        )
        .unwrap();
        let spec = load_model_file(&path).unwrap();
        assert_eq!(spec.name, "custom_identity");
        assert_eq!(spec.dim, 2);
        let mut config = RunConfig::for_model("ignored");
        config.model = ModelRef::File(path);
        let report = run_suite(&config).unwrap();
        assert!(report.passed());
        assert_eq!(report.model.source, "file");

        // swap metric reproduces the froissart single-pair relations
        let path = dir.join("swap.json");
        std::fs::write(
            &path,
            r#"{
  "name": "custom_swap",
  "statistics": "bose",
  "dim": 2,
  "eta": {"rows": [[{"re": 0.0, "im": 0.0}, {"re": 1.0, "im": 0.0}],
                    [{"re": 1.0, "im": 0.0}, {"re": 0.0, "im": 0.0}]]},
  "cutoff": 3,
  "probes": [{"f": 0, "g": 1}, {"f": 0, "g": 0}]
}"#,
        )
        .unwrap();
        let spec = load_model_file(&path).unwrap();
        assert_eq!(spec.expected.len(), 2);
        assert_eq!(spec.expected[0].coefficient, C64::new(1.0, 0.0));
        assert_eq!(spec.expected[1].coefficient, C64::new(0.0, 0.0));
        let mut config = RunConfig::for_model("ignored");
        config.model = ModelRef::File(path);
        let report = run_suite(&config).unwrap();
        assert!(report.passed());

        // non-involutive metric is rejected
        let path = dir.join("bad_metric.json");
        std::fs::write(
            &path,
            r#"{
  "name": "bad",
  "statistics": "bose",
  "dim": 1,
  "eta": {"rows": [[{"re": 2.0, "im": 0.0}]]}
}"#,
        )
        .unwrap();
        assert!(matches!(
            load_model_file(&path),
            Err(SuiteError::MetricInvalid(_))
        ));

        // malformed JSON
        let path = dir.join("malformed.json");
        std::fs::write(&path, "{not json").unwrap();
        assert!(matches!(
            load_model_file(&path),
            Err(SuiteError::ParseError(_))
        ));

        // missing field
        let path = dir.join("missing.json");
        std::fs::write(&path, r#"{"name": "x", "statistics": "bose"}"#).unwrap();
        assert!(matches!(
            load_model_file(&path),
            Err(SuiteError::SchemaError(_))
        ));
    }

    #[test]
    fn loose_metric_tolerance_shifts_failures_to_the_checks() {
        // a selfadjoint but non-involutive metric passes validation at a
        // loose tolerance and then fails the Krein-structure checks
        let dir = std::env::temp_dir().join("etafock-suite-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("loose.json");
        std::fs::write(
            &path,
            r#"{
  "name": "near_identity",
  "statistics": "bose",
  "dim": 2,
  "eta": {"rows": [[{"re": 1.05, "im": 0.0}, {"re": 0.0, "im": 0.0}],
                    [{"re": 0.0, "im": 0.0}, {"re": 1.0, "im": 0.0}]]},
  "cutoff": 3
}"#,
        )
        .unwrap();
        let mut config = RunConfig::for_model("ignored");
        config.model = ModelRef::File(path);
        config.params.insert("metric_tol".into(), 0.5);
        let report = run_suite(&config).unwrap();
        assert!(!report.passed());
        assert_eq!(report.check("metric").unwrap().verdict, "pass");
        assert_eq!(report.check("gamma_involution").unwrap().verdict, "fail");
    }

    #[test]
    fn tight_basis_caps_surface_as_size_overflow() {
        let mut config = RunConfig::for_model("feynman");
        config.basis_cap = Some(10);
        assert!(matches!(
            run_suite(&config),
            Err(SuiteError::SizeOverflow(_))
        ));
    }

    #[test]
    fn catalog_listing_is_stable() {
        let a: Vec<&str> = list_models().iter().map(|m| m.name).collect();
        let b: Vec<&str> = list_models().iter().map(|m| m.name).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
    }

    #[test]
    fn decomposition_summary_is_deterministic() {
        let spec = build_model("feynman", &Params::new()).unwrap();
        let a = decomposition_summary(&spec, 3, None).unwrap();
        let b = decomposition_summary(&spec, 3, None).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("dim H+: 3"));
        assert!(a.contains("dim H-: 1"));
    }
}

//! Ready-made model configurations and their structural checks.
//!
//! Each model names a metric construction, statistics, and the relations it
//! is expected to satisfy, with the expected coefficients stored as the
//! literal constants of the corresponding relation family (so that the
//! self-consistency check against `<f|eta g>` is meaningful). Two models
//! carry extra structure: the Feynman-gauge metric has an explicit
//! fundamental decomposition of its Bose-Fock space indexed by the parity
//! of the mode-0 occupation, and the BRS model is a 2x2 matrix
//! representation rather than a Fock-space one.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::field::{
    check_eta_car, check_eta_ccr, default_probes, FieldError, FockRep, RelationCheck, RelationKind,
};
use crate::fock::{FockError, Statistics};
use crate::krein::{validate_metric, KreinError, KreinTriplet, MetricResiduals};
use crate::linalg;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown model `{name}`")]
    UnknownModel { name: String },
    #[error("bad parameters: {detail}")]
    BadParams { detail: String },
    #[error(transparent)]
    Krein(#[from] KreinError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Bose,
    Fermi,
    Matrix,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Bose => write!(f, "bose"),
            ModelKind::Fermi => write!(f, "fermi"),
            ModelKind::Matrix => write!(f, "matrix"),
        }
    }
}

/// One displayed relation of a model: the probe `(e_f, e_g)`, the constant
/// the relation asserts, and whether it is a commutator or anticommutator.
#[derive(Debug, Clone)]
pub struct ExpectedRelation {
    pub label: String,
    pub f_mode: usize,
    pub g_mode: usize,
    pub coefficient: C64,
    pub kind: RelationKind,
}

/// A named verification configuration.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub name: String,
    pub kind: ModelKind,
    pub dim: usize,
    pub eta: DMatrix<C64>,
    pub cutoff: usize,
    pub params: Vec<(String, f64)>,
    pub expected: Vec<ExpectedRelation>,
    pub anchor: String,
}

impl ModelSpec {
    pub fn statistics(&self) -> Option<Statistics> {
        match self.kind {
            ModelKind::Bose => Some(Statistics::Bose),
            ModelKind::Fermi => Some(Statistics::Fermi),
            ModelKind::Matrix => None,
        }
    }

    pub fn triplet(&self, tol: f64) -> Result<KreinTriplet, KreinError> {
        KreinTriplet::new(self.eta.clone(), tol)
    }

    /// Max deviation of the stored relation constants from `<f|eta g>`.
    pub fn coefficient_consistency(&self) -> Result<f64, ModelError> {
        let mut out = 0.0f64;
        for rel in &self.expected {
            let form = (self.eta.column(rel.g_mode))[rel.f_mode];
            out = out.max((form - rel.coefficient).norm());
        }
        Ok(out)
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `eta = -I` on `C^d` (abnormal relations).
pub fn eta_minus_identity(d: usize) -> DMatrix<C64> {
    -DMatrix::<C64>::identity(d, d)
}

/// Block-diagonal pair-swap metric `eta e_{n,+} = e_{n,-}` on `C^(2m)`,
/// modes interleaved as `(1,+), (1,-), (2,+), (2,-), ...`.
pub fn eta_pair_swap(pairs: usize) -> DMatrix<C64> {
    let d = 2 * pairs;
    let mut m = DMatrix::<C64>::zeros(d, d);
    for p in 0..pairs {
        m[(2 * p, 2 * p + 1)] = re(1.0);
        m[(2 * p + 1, 2 * p)] = re(1.0);
    }
    m
}

/// Interleaved sign metric `eta e_{n,±} = ± e_{n,±}` on `C^(2m)`, laid out
/// so that 1-based mode `n` carries sign `(-1)^n`.
pub fn eta_interleaved_sign(pairs: usize) -> DMatrix<C64> {
    let d = 2 * pairs;
    DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            re(if (i + 1) % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            re(0.0)
        }
    })
}

/// The general 2x2 selfadjoint unitary besides `±I`:
/// `[[cos xi, e^{i theta} sin xi], [e^{-i theta} sin xi, -cos xi]]`.
pub fn eta_theta_xi(theta: f64, xi: f64) -> DMatrix<C64> {
    let phase = C64::from_polar(1.0, theta);
    DMatrix::from_row_slice(
        2,
        2,
        &[
            re(xi.cos()),
            phase * xi.sin(),
            phase.conj() * xi.sin(),
            re(-xi.cos()),
        ],
    )
}

/// `eta = -g = diag(-1, 1, 1, 1)` for the Feynman-gauge commutation
/// relations `[a_mu, a_nu†] = -g_mu_nu I`.
pub fn eta_minus_minkowski() -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![
        re(-1.0),
        re(1.0),
        re(1.0),
        re(1.0),
    ]))
}

/// The 2x2 swap matrix used both as `eta_0` in the two-field model and as
/// the BRS metric `U`.
pub fn eta_swap() -> DMatrix<C64> {
    eta_pair_swap(1)
}

pub const MODEL_NAMES: [&str; 8] = [
    "abnormal_bose",
    "abnormal_fermi",
    "froissart",
    "icar",
    "eta_theta_xi",
    "feynman",
    "brs",
    "two_field",
];

/// Catalog entry: name, statistics, parameter schema, and the relation the
/// model realizes.
#[derive(Debug, Clone, Copy)]
pub struct ModelInfo {
    pub name: &'static str,
    pub statistics: &'static str,
    pub params: &'static str,
    pub anchor: &'static str,
}

pub fn model_catalog() -> &'static [ModelInfo] {
    &[
        ModelInfo {
            name: "abnormal_bose",
            statistics: "bose",
            params: "(none)",
            anchor: "a a† − a† a = −I  (η = −I, d = 1)",
        },
        ModelInfo {
            name: "abnormal_fermi",
            statistics: "fermi",
            params: "(none)",
            anchor: "a a† + a† a = −I  (η = −I, d = 1)",
        },
        ModelInfo {
            name: "froissart",
            statistics: "bose",
            params: "m: pair count (default 2)",
            anchor: "[α_n, β_m†] = [β_n, α_m†] = δ_nm I, [α_n, α_m†] = [β_n, β_m†] = 0  (η e_{n,±} = e_{n,∓})",
        },
        ModelInfo {
            name: "icar",
            statistics: "fermi",
            params: "m: pair count (default 2)",
            anchor: "a_n a_m† + a_m† a_n = (−1)^n δ_nm I  (η e_{n,±} = ±e_{n,±}, interleaved)",
        },
        ModelInfo {
            name: "eta_theta_xi",
            statistics: "bose",
            params: "theta, xi in [0, 2π) (defaults 0, π/2)",
            anchor: "η(θ,ξ) = [[cos ξ, e^{iθ} sin ξ], [e^{−iθ} sin ξ, −cos ξ]] on C²",
        },
        ModelInfo {
            name: "feynman",
            statistics: "bose",
            params: "(none)",
            anchor: "a_μ a_ν† − a_ν† a_μ = −g_μν I  (η = −g = diag(−1,1,1,1))",
        },
        ModelInfo {
            name: "brs",
            statistics: "matrix",
            params: "a: real ghost-scaling offset (default 0)",
            anchor: "Q_B† = Q_B, Q_B² = 0, Q_C† = Q_C, Q_C Q_B − Q_B Q_C = c Q_B  (x† = U x* U*)",
        },
        ModelInfo {
            name: "two_field",
            statistics: "bose",
            params: "m: mode count per field (default 2)",
            anchor: "[c(f⊗v), c†(g⊗w)] = ⟨f⊗v|(I⊗η₀)(g⊗w)⟩ I  (η = I⊗η₀)",
        },
    ]
}

fn catalog_anchor(name: &str) -> String {
    model_catalog()
        .iter()
        .find(|info| info.name == name)
        .map(|info| info.anchor.to_string())
        .unwrap_or_default()
}

fn known_params(params: &Params, allowed: &[&str]) -> Result<(), ModelError> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ModelError::BadParams {
                detail: format!("unknown parameter `{key}`"),
            });
        }
    }
    Ok(())
}

fn real_param(params: &Params, key: &str, default: f64) -> Result<f64, ModelError> {
    let value = params.get(key).copied().unwrap_or(default);
    if !value.is_finite() {
        return Err(ModelError::BadParams {
            detail: format!("parameter `{key}` must be finite"),
        });
    }
    Ok(value)
}

fn count_param(params: &Params, key: &str, default: usize) -> Result<usize, ModelError> {
    let value = params.get(key).copied().unwrap_or(default as f64);
    if !value.is_finite() || value < 1.0 || value.fract() != 0.0 {
        return Err(ModelError::BadParams {
            detail: format!("parameter `{key}` must be a positive integer, got {value}"),
        });
    }
    Ok(value as usize)
}

/// Builds a registered model. Parameter keys not consumed by the model are
/// rejected as [`ModelError::BadParams`].
pub fn build_model(name: &str, params: &Params) -> Result<ModelSpec, ModelError> {
    let spec = match name {
        "abnormal_bose" => {
            known_params(params, &[])?;
            ModelSpec {
                name: name.into(),
                kind: ModelKind::Bose,
                dim: 1,
                eta: eta_minus_identity(1),
                cutoff: 3,
                params: vec![],
                expected: vec![ExpectedRelation {
                    label: "[a, a†]".into(),
                    f_mode: 0,
                    g_mode: 0,
                    coefficient: re(-1.0),
                    kind: RelationKind::Commutator,
                }],
                anchor: catalog_anchor(name),
            }
        }
        "abnormal_fermi" => {
            known_params(params, &[])?;
            ModelSpec {
                name: name.into(),
                kind: ModelKind::Fermi,
                dim: 1,
                eta: eta_minus_identity(1),
                cutoff: 1,
                params: vec![],
                expected: vec![ExpectedRelation {
                    label: "{a, a†}".into(),
                    f_mode: 0,
                    g_mode: 0,
                    coefficient: re(-1.0),
                    kind: RelationKind::Anticommutator,
                }],
                anchor: catalog_anchor(name),
            }
        }
        "froissart" => {
            known_params(params, &["m"])?;
            let pairs = count_param(params, "m", 2)?;
            let mut expected = Vec::new();
            for n in 0..pairs {
                for m in 0..pairs {
                    let delta = re(if n == m { 1.0 } else { 0.0 });
                    expected.push(ExpectedRelation {
                        label: format!("[α_{}, β_{}†]", n + 1, m + 1),
                        f_mode: 2 * n,
                        g_mode: 2 * m + 1,
                        coefficient: delta,
                        kind: RelationKind::Commutator,
                    });
                    expected.push(ExpectedRelation {
                        label: format!("[β_{}, α_{}†]", n + 1, m + 1),
                        f_mode: 2 * n + 1,
                        g_mode: 2 * m,
                        coefficient: delta,
                        kind: RelationKind::Commutator,
                    });
                    expected.push(ExpectedRelation {
                        label: format!("[α_{}, α_{}†]", n + 1, m + 1),
                        f_mode: 2 * n,
                        g_mode: 2 * m,
                        coefficient: re(0.0),
                        kind: RelationKind::Commutator,
                    });
                    expected.push(ExpectedRelation {
                        label: format!("[β_{}, β_{}†]", n + 1, m + 1),
                        f_mode: 2 * n + 1,
                        g_mode: 2 * m + 1,
                        coefficient: re(0.0),
                        kind: RelationKind::Commutator,
                    });
                }
            }
            ModelSpec {
                name: name.into(),
                kind: ModelKind::Bose,
                dim: 2 * pairs,
                eta: eta_pair_swap(pairs),
                cutoff: 3,
                params: vec![("m".into(), pairs as f64)],
                expected,
                anchor: catalog_anchor(name),
            }
        }
        "icar" => {
            known_params(params, &["m"])?;
            let pairs = count_param(params, "m", 2)?;
            let d = 2 * pairs;
            let mut expected = Vec::new();
            for n in 1..=d {
                for m in 1..=d {
                    let coeff = if n == m {
                        re(if n % 2 == 0 { 1.0 } else { -1.0 })
                    } else {
                        re(0.0)
                    };
                    expected.push(ExpectedRelation {
                        label: format!("{{a_{n}, a_{m}†}}"),
                        f_mode: n - 1,
                        g_mode: m - 1,
                        coefficient: coeff,
                        kind: RelationKind::Anticommutator,
                    });
                }
            }
            ModelSpec {
                name: name.into(),
                kind: ModelKind::Fermi,
                dim: d,
                eta: eta_interleaved_sign(pairs),
                cutoff: d,
                params: vec![("m".into(), pairs as f64)],
                expected,
                anchor: catalog_anchor(name),
            }
        }
        "eta_theta_xi" => {
            known_params(params, &["theta", "xi"])?;
            let theta = real_param(params, "theta", 0.0)?;
            let xi = real_param(params, "xi", std::f64::consts::FRAC_PI_2)?;
            let eta = eta_theta_xi(theta, xi);
            let mut expected = Vec::new();
            for i in 0..2 {
                for j in 0..2 {
                    expected.push(ExpectedRelation {
                        label: format!("[a_{}, a_{}†]", i + 1, j + 1),
                        f_mode: i,
                        g_mode: j,
                        coefficient: eta[(i, j)],
                        kind: RelationKind::Commutator,
                    });
                }
            }
            ModelSpec {
                name: name.into(),
                kind: ModelKind::Bose,
                dim: 2,
                eta,
                cutoff: 4,
                params: vec![("theta".into(), theta), ("xi".into(), xi)],
                expected,
                anchor: catalog_anchor(name),
            }
        }
        "feynman" => {
            known_params(params, &[])?;
            let minus_g = [
                [-1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ];
            let mut expected = Vec::new();
            for (mu, row) in minus_g.iter().enumerate() {
                for (nu, &entry) in row.iter().enumerate() {
                    expected.push(ExpectedRelation {
                        label: format!("[a_{mu}, a_{nu}†]"),
                        f_mode: mu,
                        g_mode: nu,
                        coefficient: re(entry),
                        kind: RelationKind::Commutator,
                    });
                }
            }
            ModelSpec {
                name: name.into(),
                kind: ModelKind::Bose,
                dim: 4,
                eta: eta_minus_minkowski(),
                cutoff: 4,
                params: vec![],
                expected,
                anchor: catalog_anchor(name),
            }
        }
        "brs" => {
            known_params(params, &["a"])?;
            let a = real_param(params, "a", 0.0)?;
            ModelSpec {
                name: name.into(),
                kind: ModelKind::Matrix,
                dim: 2,
                eta: eta_swap(),
                cutoff: 0,
                params: vec![("a".into(), a)],
                expected: vec![],
                anchor: catalog_anchor(name),
            }
        }
        "two_field" => {
            known_params(params, &["m"])?;
            let modes = count_param(params, "m", 2)?;
            return two_field_model(modes, 3);
        }
        other => {
            return Err(ModelError::UnknownModel {
                name: other.to_string(),
            })
        }
    };
    Ok(spec)
}

/// Finite-mode discretization of the two-field relations
/// `[a(p), b†(q)] = δ_pq I`, `[a(p), a†(q)] = 0`: `d = 2m` modes interleaved
/// as `(p,1), (p,2)` so that `eta = I (x) eta_0` is block diagonal.
pub fn two_field_model(modes: usize, cutoff: usize) -> Result<ModelSpec, ModelError> {
    if modes < 1 {
        return Err(ModelError::BadParams {
            detail: "two_field requires at least one mode".into(),
        });
    }
    let mut expected = Vec::new();
    for p in 0..modes {
        for q in 0..modes {
            let delta = re(if p == q { 1.0 } else { 0.0 });
            expected.push(ExpectedRelation {
                label: format!("[a_{}, b_{}†]", p + 1, q + 1),
                f_mode: 2 * p,
                g_mode: 2 * q + 1,
                coefficient: delta,
                kind: RelationKind::Commutator,
            });
            expected.push(ExpectedRelation {
                label: format!("[b_{}, a_{}†]", p + 1, q + 1),
                f_mode: 2 * p + 1,
                g_mode: 2 * q,
                coefficient: delta,
                kind: RelationKind::Commutator,
            });
            expected.push(ExpectedRelation {
                label: format!("[a_{}, a_{}†]", p + 1, q + 1),
                f_mode: 2 * p,
                g_mode: 2 * q,
                coefficient: re(0.0),
                kind: RelationKind::Commutator,
            });
            expected.push(ExpectedRelation {
                label: format!("[b_{}, b_{}†]", p + 1, q + 1),
                f_mode: 2 * p + 1,
                g_mode: 2 * q + 1,
                coefficient: re(0.0),
                kind: RelationKind::Commutator,
            });
        }
    }
    Ok(ModelSpec {
        name: "two_field".into(),
        kind: ModelKind::Bose,
        dim: 2 * modes,
        eta: eta_pair_swap(modes),
        cutoff,
        params: vec![("m".into(), modes as f64)],
        expected,
        anchor: catalog_anchor("two_field"),
    })
}

/// Fundamental decomposition of the Feynman-gauge Bose-Fock space: the
/// occupation basis splits by the parity of the mode-0 occupation, and that
/// split must coincide with the `±1` eigenspaces of `Gamma(-g)`, with
/// `±(.|.)` positive-definite on the respective parts.
#[derive(Debug, Clone)]
pub struct FeynmanDecomposition {
    pub plus_count: usize,
    pub minus_count: usize,
    /// Max over occupation basis vectors `v` of `|Gamma(eta) v -+ v|`,
    /// with the sign predicted by the parity of the mode-0 occupation.
    pub eigenvector_residual: f64,
    pub partition_matches: bool,
    /// Smallest eigenvalue of the Gram matrix of `+(.|.)` on the even part.
    pub gram_margin_plus: f64,
    /// Smallest eigenvalue of the Gram matrix of `-(.|.)` on the odd part.
    pub gram_margin_minus: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn feynman_decomposition_check(
    cutoff: usize,
    tol: f64,
) -> Result<FeynmanDecomposition, ModelError> {
    let triplet = KreinTriplet::new(eta_minus_minkowski(), crate::krein::DEFAULT_METRIC_TOL)?;
    let rep = FockRep::new(&triplet, Statistics::Bose, cutoff, None)?;
    let basis = rep.basis();
    let gamma = rep.gamma().matrix();
    let mut plus_indices = Vec::new();
    let mut minus_indices = Vec::new();
    let mut residual = 0.0f64;
    for idx in 0..basis.total_len() {
        let (_, label) = basis.label(idx);
        let even = label[0] % 2 == 0;
        let sign = if even { 1.0 } else { -1.0 };
        let mut defect = gamma.column(idx).into_owned();
        defect[idx] -= re(sign);
        residual = residual.max(defect.norm());
        if even {
            plus_indices.push(idx);
        } else {
            minus_indices.push(idx);
        }
    }
    // Gram matrices of (.|.) in the orthonormal occupation basis are the
    // corresponding principal submatrices of Gamma(eta).
    let margin = |indices: &[usize], sign: f64| -> f64 {
        if indices.is_empty() {
            return f64::INFINITY;
        }
        let g = DMatrix::from_fn(indices.len(), indices.len(), |i, j| {
            gamma[(indices[i], indices[j])] * re(sign)
        });
        g.symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |acc, &l| acc.min(l))
    };
    let gram_margin_plus = margin(&plus_indices, 1.0);
    let gram_margin_minus = margin(&minus_indices, -1.0);
    let partition_matches = residual <= tol;
    let pass = partition_matches && gram_margin_plus >= 1.0 - tol && gram_margin_minus >= 1.0 - tol;
    Ok(FeynmanDecomposition {
        plus_count: plus_indices.len(),
        minus_count: minus_indices.len(),
        eigenvector_residual: residual,
        partition_matches,
        gram_margin_plus,
        gram_margin_minus,
        tol,
        pass,
    })
}

/// The 2x2 BRS representation: `Q_B = [[0,1],[0,0]]`,
/// `Q_C = diag(a + i/2, a - i/2)`, metric `U = [[0,1],[1,0]]`, involution
/// `x† = U x* U*`, indefinite form `(v|w) = <v|U w>`.
#[derive(Debug, Clone)]
pub struct BrsRep {
    pub a: f64,
    pub q_b: DMatrix<C64>,
    pub q_c: DMatrix<C64>,
    pub u: DMatrix<C64>,
}

pub fn brs_build(a: f64) -> BrsRep {
    let q_b = DMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
    let q_c = DMatrix::from_diagonal(&DVector::from_vec(vec![
        C64::new(a, 0.5),
        C64::new(a, -0.5),
    ]));
    BrsRep {
        a,
        q_b,
        q_c,
        u: eta_swap(),
    }
}

impl BrsRep {
    /// The swapped involution `x† = U x* U*`.
    pub fn dagger(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        &self.u * x.adjoint() * self.u.adjoint()
    }

    /// `(v|w) = <v|U w>`.
    pub fn form(&self, v: &DVector<C64>, w: &DVector<C64>) -> C64 {
        v.dotc(&(&self.u * w))
    }
}

/// Residual report for the BRS relations under `x† = U x* U*`.
#[derive(Debug, Clone)]
pub struct BrsCheck {
    /// `|Q_B† - Q_B|`
    pub q_b_selfadjoint: f64,
    /// `|Q_C† - Q_C|`
    pub q_c_selfadjoint: f64,
    /// `|Q_B²|`
    pub q_b_nilpotent: f64,
    /// `c` with `Q_C Q_B - Q_B Q_C = c Q_B` (informative; the BRS algebra
    /// states `c = -i`, these matrices realize `c = +i`).
    pub measured_constant: C64,
    /// `|(Q_C Q_B - Q_B Q_C) - c Q_B|` for the measured `c`.
    pub proportionality_residual: f64,
    /// Max `|(x† v|w) - (v|x w)|` over seeded random `x, v, w`.
    pub pairing_residual: f64,
    /// `||det U| - 1|` (nondegeneracy of the form).
    pub u_det_residual: f64,
    /// Deviation of the `±1` eigenspaces of `U` from `C(e1 ± e2)`.
    pub decomposition_residual: f64,
    /// Max `|(Q_B v|Q_B v)|` over seeded random `v` (null vectors).
    pub null_vector_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn brs_check(rep: &BrsRep, seed: u64, tol: f64) -> Result<BrsCheck, ModelError> {
    let q_b_selfadjoint = linalg::max_abs(&(rep.dagger(&rep.q_b) - &rep.q_b));
    let q_c_selfadjoint = linalg::max_abs(&(rep.dagger(&rep.q_c) - &rep.q_c));
    let q_b_nilpotent = linalg::max_abs(&(&rep.q_b * &rep.q_b));

    let bracket = &rep.q_c * &rep.q_b - &rep.q_b * &rep.q_c;
    // Q_B has a single nonzero entry at (0, 1), so the proportionality
    // constant is read off there.
    let measured_constant = bracket[(0, 1)];
    let proportionality_residual = linalg::max_abs(&(bracket - &rep.q_b * measured_constant));

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut pairing_residual = 0.0f64;
    let mut null_vector_residual = 0.0f64;
    for _ in 0..20 {
        let x = linalg::random_matrix(&mut rng, 2, 2);
        let v = linalg::random_vector(&mut rng, 2);
        let w = linalg::random_vector(&mut rng, 2);
        let lhs = rep.form(&(rep.dagger(&x) * &v), &w);
        let rhs = rep.form(&v, &(&x * &w));
        pairing_residual = pairing_residual.max((lhs - rhs).norm());
        let qv = &rep.q_b * &v;
        null_vector_residual = null_vector_residual.max(rep.form(&qv, &qv).norm());
    }

    let u_det_residual = (rep.u.determinant().norm() - 1.0).abs();

    // H_+ = C(e1+e2), H_- = C(e1-e2)
    let triplet = KreinTriplet::new(rep.u.clone(), crate::krein::DEFAULT_METRIC_TOL)?;
    let dec = triplet.fundamental_decomposition()?;
    let half = re(0.5);
    let p_plus = DMatrix::from_row_slice(2, 2, &[half, half, half, half]);
    let p_minus = DMatrix::from_row_slice(2, 2, &[half, -half, -half, half]);
    let decomposition_residual = linalg::max_abs(&(&dec.proj_plus - p_plus))
        .max(linalg::max_abs(&(&dec.proj_minus - p_minus)));

    let pass = q_b_selfadjoint <= tol
        && q_c_selfadjoint <= tol
        && q_b_nilpotent <= tol
        && proportionality_residual <= tol
        && pairing_residual <= tol
        && u_det_residual <= tol
        && decomposition_residual <= tol
        && null_vector_residual <= tol;
    Ok(BrsCheck {
        q_b_selfadjoint,
        q_c_selfadjoint,
        q_b_nilpotent,
        measured_constant,
        proportionality_residual,
        pairing_residual,
        u_det_residual,
        decomposition_residual,
        null_vector_residual,
        tol,
        pass,
    })
}

/// Joint CCR/CAR verification for the `eta(theta, xi)` family on `C²`.
#[derive(Debug, Clone)]
pub struct EtaFamilyCheck {
    pub metric: MetricResiduals,
    pub determinant: C64,
    pub ccr: RelationCheck,
    pub car: RelationCheck,
    pub pass: bool,
}

pub fn eta_family_check(
    theta: f64,
    xi: f64,
    cutoff: usize,
    tol: f64,
    seed: u64,
) -> Result<EtaFamilyCheck, ModelError> {
    let eta = eta_theta_xi(theta, xi);
    let metric = validate_metric(&eta, crate::krein::DEFAULT_METRIC_TOL)?;
    let determinant = eta.determinant();
    let triplet = KreinTriplet::new(eta, crate::krein::DEFAULT_METRIC_TOL)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let probes = default_probes(2, 10, &mut rng);
    let ccr = check_eta_ccr(&triplet, cutoff, &probes, tol)?;
    let car = check_eta_car(&triplet, &probes, tol.min(1e-12))?;
    let pass = ccr.pass && car.pass;
    Ok(EtaFamilyCheck {
        metric,
        determinant,
        ccr,
        car,
        pass,
    })
}

/// Seeded sample pairs for pairing checks; for Bose bases both vectors are
/// supported below the top sector.
pub fn pairing_samples<R: Rng + ?Sized>(
    rep: &FockRep,
    count: usize,
    rng: &mut R,
) -> Vec<(DVector<C64>, DVector<C64>)> {
    let basis = rep.basis();
    let total = basis.total_len();
    let bose_top = if basis.statistics() == Statistics::Bose && basis.cutoff() > 0 {
        Some(basis.sector_offset(basis.cutoff()))
    } else {
        None
    };
    let sample = |rng: &mut R| {
        let mut v = linalg::random_vector(rng, total);
        if let Some(top) = bose_top {
            for i in top..total {
                v[i] = re(0.0);
            }
        }
        v
    };
    (0..count).map(|_| (sample(rng), sample(rng))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{check_relations, Probe};
    use crate::linalg::max_abs;

    fn c(re_: f64, im: f64) -> C64 {
        C64::new(re_, im)
    }

    fn unit(dim: usize, k: usize) -> DVector<C64> {
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn every_registered_model_builds_with_defaults() {
        for name in MODEL_NAMES {
            let spec = build_model(name, &Params::new()).unwrap();
            assert_eq!(spec.name, name);
            validate_metric(&spec.eta, 1e-10).unwrap();
        }
    }

    #[test]
    fn unknown_models_and_bad_params_are_rejected() {
        assert!(matches!(
            build_model("nonsense", &Params::new()),
            Err(ModelError::UnknownModel { .. })
        ));
        let mut params = Params::new();
        params.insert("m".into(), 0.0);
        assert!(matches!(
            build_model("froissart", &params),
            Err(ModelError::BadParams { .. })
        ));
        let mut params = Params::new();
        params.insert("m".into(), 1.5);
        assert!(matches!(
            build_model("icar", &params),
            Err(ModelError::BadParams { .. })
        ));
        let mut params = Params::new();
        params.insert("bogus".into(), 1.0);
        assert!(matches!(
            build_model("feynman", &params),
            Err(ModelError::BadParams { .. })
        ));
        let mut params = Params::new();
        params.insert("xi".into(), f64::NAN);
        assert!(matches!(
            build_model("eta_theta_xi", &params),
            Err(ModelError::BadParams { .. })
        ));
    }

    #[test]
    fn stored_coefficients_match_the_built_metric() {
        for name in MODEL_NAMES {
            let spec = build_model(name, &Params::new()).unwrap();
            let dev = spec.coefficient_consistency().unwrap();
            assert!(dev < 1e-12, "{name}: coefficient deviation {dev}");
        }
    }

    #[test]
    fn expected_relations_pass_on_the_built_representation() {
        for name in [
            "abnormal_bose",
            "abnormal_fermi",
            "froissart",
            "icar",
            "feynman",
        ] {
            let spec = build_model(name, &Params::new()).unwrap();
            let triplet = spec.triplet(1e-10).unwrap();
            let stats = spec.statistics().unwrap();
            let rep = FockRep::new(&triplet, stats, spec.cutoff.max(2), None).unwrap();
            let probes: Vec<Probe> = spec
                .expected
                .iter()
                .map(|r| Probe {
                    label: r.label.clone(),
                    f: unit(spec.dim, r.f_mode),
                    g: unit(spec.dim, r.g_mode),
                })
                .collect();
            let check = check_relations(&rep, &probes, 1e-10).unwrap();
            assert!(check.pass, "{name}: residual {}", check.max_residual);
            for (rel, probe) in spec.expected.iter().zip(check.probes.iter()) {
                assert!(
                    (rel.coefficient - probe.coefficient).norm() < 1e-12,
                    "{name} {}",
                    rel.label
                );
            }
        }
    }

    #[test]
    fn froissart_single_pair_equals_two_field_single_mode() {
        let mut params = Params::new();
        params.insert("m".into(), 1.0);
        let froissart = build_model("froissart", &params).unwrap();
        let two_field = two_field_model(1, 3).unwrap();
        assert_eq!(froissart.eta, two_field.eta);
        assert_eq!(froissart.expected.len(), two_field.expected.len());
        for (a, b) in froissart.expected.iter().zip(two_field.expected.iter()) {
            assert_eq!(a.f_mode, b.f_mode);
            assert_eq!(a.g_mode, b.g_mode);
            assert_eq!(a.coefficient, b.coefficient);
        }
    }

    #[test]
    fn two_field_cross_coefficients() {
        let spec = two_field_model(2, 3).unwrap();
        let find = |label: &str| {
            spec.expected
                .iter()
                .find(|r| r.label == label)
                .unwrap_or_else(|| panic!("missing {label}"))
        };
        assert_eq!(find("[a_1, b_1†]").coefficient, c(1.0, 0.0));
        assert_eq!(find("[a_1, b_2†]").coefficient, c(0.0, 0.0));
        assert_eq!(find("[a_1, a_1†]").coefficient, c(0.0, 0.0));
    }

    #[test]
    fn icar_coefficients_alternate_exactly() {
        let spec = build_model("icar", &Params::new()).unwrap();
        for n in 1..=4usize {
            let rel = spec
                .expected
                .iter()
                .find(|r| r.f_mode == n - 1 && r.g_mode == n - 1)
                .unwrap();
            let expect = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(rel.coefficient, c(expect, 0.0));
        }
    }

    #[test]
    fn eta_family_special_points() {
        let diag = eta_theta_xi(0.3, 0.0);
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!(max_abs(&(diag - expect)) < 1e-15);

        let swap = eta_theta_xi(0.0, std::f64::consts::FRAC_PI_2);
        assert!(max_abs(&(swap - eta_swap())) < 1e-15);
    }

    #[test]
    fn eta_family_determinant_is_minus_one() {
        for (theta, xi) in [(0.1, 0.9), (2.7, 4.4), (5.9, 0.02)] {
            let det = eta_theta_xi(theta, xi).determinant();
            assert!((det - c(-1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn eta_family_check_runs_both_statistics() {
        let check = eta_family_check(0.7, 1.3, 3, 1e-10, 99).unwrap();
        assert!(check.pass);
        assert!((check.determinant - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(check.ccr.max_top_defect.unwrap() > 0.0);
        assert!(check.car.max_top_defect.is_none());
    }

    #[test]
    fn feynman_decomposition_splits_by_mode_zero_parity() {
        let dec = feynman_decomposition_check(3, 1e-12).unwrap();
        assert!(dec.pass, "{dec:?}");
        // occupation vectors of C^4 with total <= 3: 35 labels; mode-0
        // occupation even for 20 (n0 = 0) + 4 (n0 = 2) of them
        assert_eq!(dec.plus_count + dec.minus_count, 35);
        assert_eq!(dec.plus_count, 24);
        assert_eq!(dec.minus_count, 11);
        assert!(dec.gram_margin_plus >= 1.0 - 1e-12);
        assert!(dec.gram_margin_minus >= 1.0 - 1e-12);
    }

    #[test]
    fn feynman_vacuum_and_single_quanta_signs() {
        let triplet = KreinTriplet::new(eta_minus_minkowski(), 1e-10).unwrap();
        let rep = FockRep::new(&triplet, Statistics::Bose, 2, None).unwrap();
        let gamma = rep.gamma().matrix();
        let basis = rep.basis();
        // vacuum has positive norm
        assert_eq!(gamma[(0, 0)], c(1.0, 0.0));
        // a single mode-0 quantum has (v|v) = -1
        let idx = basis.index_of(1, &[1, 0, 0, 0]).unwrap();
        assert!((gamma[(idx, idx)] - c(-1.0, 0.0)).norm() < 1e-14);
        // two mode-0 quanta are back in the plus part
        let idx = basis.index_of(2, &[2, 0, 0, 0]).unwrap();
        assert!((gamma[(idx, idx)] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn brs_matrices_match_the_displayed_form() {
        let rep = brs_build(0.0);
        assert_eq!(rep.q_c[(0, 0)], c(0.0, 0.5));
        assert_eq!(rep.q_c[(1, 1)], c(0.0, -0.5));
        assert_eq!(rep.q_b[(0, 1)], c(1.0, 0.0));
        // U is a selfadjoint involution
        assert!(crate::linalg::involution_residual(&rep.u) < 1e-15);
        assert!(crate::linalg::hermiticity_residual(&rep.u) < 1e-15);
        // Q_B is nilpotent for every a
        let rep = brs_build(-3.25);
        assert_eq!(max_abs(&(&rep.q_b * &rep.q_b)), 0.0);
    }

    #[test]
    fn brs_commutator_constant_is_plus_i() {
        // entrywise oracle: (Q_C Q_B)_{12} = a + i/2, (Q_B Q_C)_{12} = a - i/2
        for a in [0.0, 1.0, -2.5] {
            let rep = brs_build(a);
            let qcqb = &rep.q_c * &rep.q_b;
            let qbqc = &rep.q_b * &rep.q_c;
            assert_eq!(qcqb[(0, 1)], C64::new(a, 0.5));
            assert_eq!(qbqc[(0, 1)], C64::new(a, -0.5));
            let check = brs_check(&rep, 7, 1e-14).unwrap();
            assert!(check.pass, "a = {a}: {check:?}");
            assert!((check.measured_constant - c(0.0, 1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn brs_kernel_vector_is_not_cyclic() {
        // e1 spans the kernel of Q_B; its orbit under {Q_B, Q_C} stays
        // one-dimensional, so no Q_B-annihilated cyclic vector exists.
        let rep = brs_build(1.0);
        let kernel = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let orbit = [
            kernel.clone(),
            &rep.q_b * &kernel,
            &rep.q_c * &kernel,
            &rep.q_c * (&rep.q_b * &kernel),
            &rep.q_b * (&rep.q_c * &kernel),
        ];
        let m = DMatrix::from_columns(&orbit);
        assert_eq!(linalg::rank(&m, 1e-8), 1);
    }

    #[test]
    fn catalog_is_complete_and_ordered() {
        let names: Vec<&str> = model_catalog().iter().map(|i| i.name).collect();
        assert_eq!(names, MODEL_NAMES.to_vec());
        for info in model_catalog() {
            assert!(!info.anchor.is_empty());
        }
    }
}

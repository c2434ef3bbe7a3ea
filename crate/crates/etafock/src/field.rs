//! Annihilation/creation operators on truncated Fock spaces, the swapped
//! involution `x† = Gamma(eta) x* Gamma(eta)*`, and the relation checks.
//!
//! Operators are built two independent ways:
//!
//! * by compressing the full-Fock annihilator `a(f)` to the (anti)symmetric
//!   subspace through the [`crate::fock::embed_symmetric`] isometry, and
//! * directly in the occupation/subset basis ([`direct_bose`],
//!   [`direct_fermi`]), which serves as the oracle for the first route.
//!
//! Truncation semantics: creation out of the top sector maps to zero, so
//! `a*(f)` is exactly the conjugate transpose of `a(f)` on the truncated
//! space. The commutation-relation checks quantify over sub-top sectors and
//! report the top-sector defect separately.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use thiserror::Error;

use crate::fock::{
    embed_symmetric, enumerate_basis, same_basis, second_quantization, FockError, GradedOperator,
    SectorBasis, Statistics,
};
use crate::krein::{KreinError, KreinTriplet};
use crate::linalg;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error(transparent)]
    Krein(#[from] KreinError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("cutoff {cutoff} too small for the requested check")]
    CutoffTooSmall { cutoff: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis mismatch: {detail}")]
    BasisMismatch { detail: String },
}

fn unit_vector(dim: usize, k: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[k] = C64::new(1.0, 0.0);
    v
}

/// Full-Fock annihilator: `a(f) Omega = 0` and
/// `a(f)(e_{i1} (x) ... (x) e_{in}) = sqrt(n) conj(f_{i1}) e_{i2} (x) ...`.
pub fn annihilator_full(
    f: &DVector<C64>,
    full: &Arc<SectorBasis>,
) -> Result<GradedOperator, FieldError> {
    if full.statistics() != Statistics::Full {
        return Err(FieldError::BasisMismatch {
            detail: "annihilator_full requires a full-statistics basis".into(),
        });
    }
    let d = full.modes();
    if f.len() != d {
        return Err(FieldError::DimensionMismatch {
            expected: d,
            got: f.len(),
        });
    }
    let total = full.total_len();
    let mut m = DMatrix::<C64>::zeros(total, total);
    for n in 1..=full.cutoff() {
        let amp = (n as f64).sqrt();
        for (j, label) in full.sector_labels(n).iter().enumerate() {
            let col = full.sector_offset(n) + j;
            let head = label[0];
            let coeff = f[head].conj() * amp;
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            // tail index inside sector n-1 is the base-d value of the tail
            let tail = label[1..].iter().fold(0usize, |acc, &i| acc * d + i);
            let row = full.sector_offset(n - 1) + tail;
            m[(row, col)] += coeff;
        }
    }
    Ok(GradedOperator::from_matrix(
        full.clone(),
        full.clone(),
        m,
        Some(-1),
    )?)
}

/// Full-Fock creator: `a*(f) Omega = f` and
/// `a*(f) x = sqrt(n+1) f (x) x` on sector `n < N`; creation out of the top
/// sector is truncated to zero.
pub fn creator_full(
    f: &DVector<C64>,
    full: &Arc<SectorBasis>,
) -> Result<GradedOperator, FieldError> {
    if full.statistics() != Statistics::Full {
        return Err(FieldError::BasisMismatch {
            detail: "creator_full requires a full-statistics basis".into(),
        });
    }
    let d = full.modes();
    if f.len() != d {
        return Err(FieldError::DimensionMismatch {
            expected: d,
            got: f.len(),
        });
    }
    let total = full.total_len();
    let mut m = DMatrix::<C64>::zeros(total, total);
    for n in 0..full.cutoff() {
        let amp = ((n + 1) as f64).sqrt();
        let sector_dim = full.sector_size(n);
        for j in 0..sector_dim {
            let col = full.sector_offset(n) + j;
            for mode in 0..d {
                let coeff = f[mode] * amp;
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let row = full.sector_offset(n + 1) + mode * sector_dim + j;
                m[(row, col)] += coeff;
            }
        }
    }
    Ok(GradedOperator::from_matrix(
        full.clone(),
        full.clone(),
        m,
        Some(1),
    )?)
}

/// A smeared field operator in the three incarnations used by the checks:
/// the annihilator, its `<.|.>`-adjoint `a*(f)`, and its `(.|.)`-adjoint
/// `a†(f) = a*(eta f)`.
#[derive(Debug, Clone)]
pub struct FieldOperatorPair {
    pub f: DVector<C64>,
    pub annihilator: GradedOperator,
    pub creator_star: GradedOperator,
    pub creator_dagger: GradedOperator,
}

/// Projection-route construction: `a_pm(f) = V* a(f) V` with `V` the
/// occupation/subset embedding, i.e. the compression `P± a(f) P±`
/// expressed in the normalized (anti)symmetric basis.
pub fn compressed_field(
    f: &DVector<C64>,
    triplet: &KreinTriplet,
    sym: &Arc<SectorBasis>,
    full: &Arc<SectorBasis>,
) -> Result<FieldOperatorPair, FieldError> {
    if triplet.dim() != sym.modes() {
        return Err(FieldError::DimensionMismatch {
            expected: sym.modes(),
            got: triplet.dim(),
        });
    }
    let v = embed_symmetric(sym, full)?;
    let compress = |g: &GradedOperator| -> DMatrix<C64> { v.adjoint() * g.matrix() * &v };

    let a_full = annihilator_full(f, full)?;
    let annihilator =
        GradedOperator::from_matrix(sym.clone(), sym.clone(), compress(&a_full), Some(-1))?;
    let creator_star = annihilator.adjoint();
    let eta_f = triplet.apply_eta(f);
    let a_eta_full = annihilator_full(&eta_f, full)?;
    let creator_dagger = GradedOperator::from_matrix(
        sym.clone(),
        sym.clone(),
        compress(&a_eta_full).adjoint(),
        Some(1),
    )?;
    Ok(FieldOperatorPair {
        f: f.clone(),
        annihilator,
        creator_star,
        creator_dagger,
    })
}

/// Occupation-number oracle for the Bose annihilator: for `f = e_k` it maps
/// `|..n_k..>` to `sqrt(n_k) |..n_k - 1..>`; general `f` enters
/// conjugate-linearly.
pub fn direct_bose(f: &DVector<C64>, basis: &SectorBasis) -> Result<DMatrix<C64>, FieldError> {
    if basis.statistics() != Statistics::Bose {
        return Err(FieldError::BasisMismatch {
            detail: "direct_bose requires a bose basis".into(),
        });
    }
    let d = basis.modes();
    if f.len() != d {
        return Err(FieldError::DimensionMismatch {
            expected: d,
            got: f.len(),
        });
    }
    let total = basis.total_len();
    let mut m = DMatrix::<C64>::zeros(total, total);
    for n in 1..=basis.cutoff() {
        for (j, occ) in basis.sector_labels(n).iter().enumerate() {
            let col = basis.sector_offset(n) + j;
            for mode in 0..d {
                if occ[mode] == 0 {
                    continue;
                }
                let coeff = f[mode].conj() * (occ[mode] as f64).sqrt();
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let mut target = occ.clone();
                target[mode] -= 1;
                let row = basis
                    .index_of(n - 1, &target)
                    .expect("lowered occupation stays in the basis");
                m[(row, col)] += coeff;
            }
        }
    }
    Ok(m)
}

/// Subset-deletion oracle for the Fermi annihilator: for `f = e_k` it maps
/// `S` containing `k` to `S \ {k}` with sign `(-1)^(occupied modes below k)`.
pub fn direct_fermi(f: &DVector<C64>, basis: &SectorBasis) -> Result<DMatrix<C64>, FieldError> {
    if basis.statistics() != Statistics::Fermi {
        return Err(FieldError::BasisMismatch {
            detail: "direct_fermi requires a fermi basis".into(),
        });
    }
    let d = basis.modes();
    if f.len() != d {
        return Err(FieldError::DimensionMismatch {
            expected: d,
            got: f.len(),
        });
    }
    let total = basis.total_len();
    let mut m = DMatrix::<C64>::zeros(total, total);
    for n in 1..=basis.cutoff() {
        for (j, subset) in basis.sector_labels(n).iter().enumerate() {
            let col = basis.sector_offset(n) + j;
            for (pos, &mode) in subset.iter().enumerate() {
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let coeff = f[mode].conj() * sign;
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                let mut target = subset.clone();
                target.remove(pos);
                let row = basis
                    .index_of(n - 1, &target)
                    .expect("deleted subset stays in the basis");
                m[(row, col)] += coeff;
            }
        }
    }
    Ok(m)
}

/// The swapped involution `x† = Gamma(eta) x* Gamma(eta)*`. Involutive and
/// antimultiplicative; reduces to the conjugate transpose when `eta = I`.
pub fn dagger(x: &GradedOperator, gamma: &GradedOperator) -> Result<GradedOperator, FieldError> {
    if !same_basis(x.domain(), gamma.domain()) || !same_basis(x.codomain(), gamma.domain()) {
        return Err(FieldError::BasisMismatch {
            detail: "dagger requires a square operator on Gamma(eta)'s basis".into(),
        });
    }
    Ok(gamma.compose(&x.adjoint())?.compose(&gamma.adjoint())?)
}

/// `XY - YX`.
pub fn commutator(x: &GradedOperator, y: &GradedOperator) -> Result<GradedOperator, FieldError> {
    Ok(x.compose(y)?.sub(&y.compose(x)?)?)
}

/// `XY + YX`.
pub fn anticommutator(
    x: &GradedOperator,
    y: &GradedOperator,
) -> Result<GradedOperator, FieldError> {
    Ok(x.compose(y)?.add(&y.compose(x)?)?)
}

/// An eta-Fock representation: the Bose or Fermi basis at a cutoff, its
/// embedding into the full space, `Gamma(eta)`, and the compressed mode
/// annihilators (smeared operators are conjugate-linear combinations).
#[derive(Debug, Clone)]
pub struct FockRep {
    triplet: KreinTriplet,
    basis: Arc<SectorBasis>,
    full_basis: Arc<SectorBasis>,
    embedding: DMatrix<C64>,
    gamma: GradedOperator,
    mode_annihilators: Vec<DMatrix<C64>>,
}

impl FockRep {
    pub fn new(
        triplet: &KreinTriplet,
        statistics: Statistics,
        cutoff: usize,
        cap: Option<usize>,
    ) -> Result<Self, FieldError> {
        if statistics == Statistics::Full {
            return Err(FieldError::BasisMismatch {
                detail: "representations are built on bose or fermi bases".into(),
            });
        }
        let d = triplet.dim();
        let basis = enumerate_basis(statistics, d, cutoff, cap)?;
        let full_basis = enumerate_basis(Statistics::Full, d, basis.cutoff(), cap)?;
        let embedding = embed_symmetric(&basis, &full_basis)?;
        let gamma = second_quantization(triplet.eta(), &basis, triplet.tol().max(1e-12))?;
        let mut mode_annihilators = Vec::with_capacity(d);
        for k in 0..d {
            let a_full = annihilator_full(&unit_vector(d, k), &full_basis)?;
            mode_annihilators.push(embedding.adjoint() * a_full.matrix() * &embedding);
        }
        Ok(Self {
            triplet: triplet.clone(),
            basis,
            full_basis,
            embedding,
            gamma,
            mode_annihilators,
        })
    }

    pub fn triplet(&self) -> &KreinTriplet {
        &self.triplet
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn full_basis(&self) -> &Arc<SectorBasis> {
        &self.full_basis
    }

    pub fn embedding(&self) -> &DMatrix<C64> {
        &self.embedding
    }

    pub fn gamma(&self) -> &GradedOperator {
        &self.gamma
    }

    pub fn statistics(&self) -> Statistics {
        self.basis.statistics()
    }

    fn smear(&self, f: &DVector<C64>) -> Result<DMatrix<C64>, FieldError> {
        let d = self.triplet.dim();
        if f.len() != d {
            return Err(FieldError::DimensionMismatch {
                expected: d,
                got: f.len(),
            });
        }
        let total = self.basis.total_len();
        let mut m = DMatrix::<C64>::zeros(total, total);
        for k in 0..d {
            let c = f[k].conj();
            if c.norm_sqr() == 0.0 {
                continue;
            }
            m += &self.mode_annihilators[k] * c;
        }
        Ok(m)
    }

    /// `a(f)`, conjugate-linear in `f`.
    pub fn annihilator(&self, f: &DVector<C64>) -> Result<GradedOperator, FieldError> {
        Ok(GradedOperator::from_matrix(
            self.basis.clone(),
            self.basis.clone(),
            self.smear(f)?,
            Some(-1),
        )?)
    }

    /// `a*(f)`, the adjoint with respect to `<.|.>`.
    pub fn creator_star(&self, f: &DVector<C64>) -> Result<GradedOperator, FieldError> {
        Ok(self.annihilator(f)?.adjoint())
    }

    /// `a†(f) = a*(eta f)`, the adjoint with respect to `(.|.)`.
    pub fn creator_dagger(&self, f: &DVector<C64>) -> Result<GradedOperator, FieldError> {
        self.creator_star(&self.triplet.apply_eta(f))
    }

    pub fn field_pair(&self, f: &DVector<C64>) -> Result<FieldOperatorPair, FieldError> {
        Ok(FieldOperatorPair {
            f: f.clone(),
            annihilator: self.annihilator(f)?,
            creator_star: self.creator_star(f)?,
            creator_dagger: self.creator_dagger(f)?,
        })
    }

    pub fn mode_annihilator(&self, k: usize) -> Result<GradedOperator, FieldError> {
        self.annihilator(&unit_vector(self.triplet.dim(), k))
    }

    /// Unit vector at the vacuum label.
    pub fn vacuum(&self) -> DVector<C64> {
        let mut v = DVector::zeros(self.basis.total_len());
        v[self.basis.vacuum_index()] = C64::new(1.0, 0.0);
        v
    }
}

/// A pair of smearing vectors for a relation check.
#[derive(Debug, Clone)]
pub struct Probe {
    pub label: String,
    pub f: DVector<C64>,
    pub g: DVector<C64>,
}

impl Probe {
    pub fn basis_pair(dim: usize, i: usize, j: usize) -> Self {
        Probe {
            label: format!("(e{},e{})", i + 1, j + 1),
            f: unit_vector(dim, i),
            g: unit_vector(dim, j),
        }
    }
}

/// All basis pairs `(e_i, e_j)` plus `extra` seeded random pairs.
pub fn default_probes<R: Rng + ?Sized>(dim: usize, extra: usize, rng: &mut R) -> Vec<Probe> {
    let mut probes = Vec::with_capacity(dim * dim + extra);
    for i in 0..dim {
        for j in 0..dim {
            probes.push(Probe::basis_pair(dim, i, j));
        }
    }
    for k in 0..extra {
        probes.push(Probe {
            label: format!("r{k}"),
            f: linalg::random_vector(rng, dim),
            g: linalg::random_vector(rng, dim),
        });
    }
    probes
}

/// Outcome of one probed relation `a(f) a†(g) -+ a†(g) a(f) = <f|eta g> I`.
#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub label: String,
    /// `<f|eta g>`, the expected multiple of the identity.
    pub coefficient: C64,
    /// Max column norm of the defect over the check domain.
    pub residual: f64,
    /// Max column norm of the defect over the top sectors (Bose only).
    pub top_defect: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Commutator,
    Anticommutator,
}

impl std::fmt::Display for RelationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelationKind::Commutator => write!(f, "commutator"),
            RelationKind::Anticommutator => write!(f, "anticommutator"),
        }
    }
}

/// Residual report for a family of probed relations.
#[derive(Debug, Clone)]
pub struct RelationCheck {
    pub kind: RelationKind,
    pub probes: Vec<ProbeResult>,
    /// Max over probes of the relation residual on the check domain.
    pub max_residual: f64,
    /// Max over probes of the top-sector defect (Bose only).
    pub max_top_defect: Option<f64>,
    /// Max residual of the zero relations `[a(f), a(g)]_-+ = 0` and
    /// `[a†(f), a†(g)]_-+ = 0` over all probes, whole space.
    pub zero_relation_residual: f64,
    /// Sector range the verdict quantifies over.
    pub domain: String,
    pub tol: f64,
    pub pass: bool,
}

fn relation_check(
    rep: &FockRep,
    probes: &[Probe],
    kind: RelationKind,
    tol: f64,
) -> Result<RelationCheck, FieldError> {
    let basis = rep.basis();
    let cutoff = basis.cutoff();
    let bose = rep.statistics() == Statistics::Bose;
    // Bose relations hold below the top sector; the verdict domain stops at
    // cutoff - 2 and the defect is measured on the rest. Fermi relations at
    // full cutoff are exact on the whole space.
    let (domain_hi, defect_lo) = if bose {
        (cutoff.saturating_sub(2), cutoff.saturating_sub(1))
    } else {
        (cutoff, cutoff + 1)
    };
    let identity = GradedOperator::identity(basis.clone());
    let mut results = Vec::with_capacity(probes.len());
    let mut max_residual = 0.0f64;
    let mut max_top_defect = 0.0f64;
    let mut zero_residual = 0.0f64;
    for probe in probes {
        let a_f = rep.annihilator(&probe.f)?;
        let a_g = rep.annihilator(&probe.g)?;
        let dag_g = rep.creator_dagger(&probe.g)?;
        let dag_f = rep.creator_dagger(&probe.f)?;
        let coefficient = rep.triplet().indefinite_form(&probe.f, &probe.g)?;
        let bracket = match kind {
            RelationKind::Commutator => commutator(&a_f, &dag_g)?,
            RelationKind::Anticommutator => anticommutator(&a_f, &dag_g)?,
        };
        let defect = bracket.sub(&identity.scale(coefficient))?;
        let residual = defect.max_column_norm_over_sectors(0, domain_hi);
        let top_defect = if bose {
            Some(defect.max_column_norm_over_sectors(defect_lo, cutoff))
        } else {
            None
        };
        let zero_aa = match kind {
            RelationKind::Commutator => commutator(&a_f, &a_g)?,
            RelationKind::Anticommutator => anticommutator(&a_f, &a_g)?,
        };
        let zero_cc = match kind {
            RelationKind::Commutator => commutator(&dag_f, &dag_g)?,
            RelationKind::Anticommutator => anticommutator(&dag_f, &dag_g)?,
        };
        zero_residual = zero_residual.max(zero_aa.max_abs()).max(zero_cc.max_abs());
        max_residual = max_residual.max(residual);
        if let Some(t) = top_defect {
            max_top_defect = max_top_defect.max(t);
        }
        results.push(ProbeResult {
            label: probe.label.clone(),
            coefficient,
            residual,
            top_defect,
        });
    }
    let pass = max_residual <= tol && zero_residual <= tol;
    Ok(RelationCheck {
        kind,
        probes: results,
        max_residual,
        max_top_defect: if bose { Some(max_top_defect) } else { None },
        zero_relation_residual: zero_residual,
        domain: if bose {
            format!("sectors 0..={domain_hi}")
        } else if cutoff == basis.modes() {
            "full antisymmetric space".to_string()
        } else {
            format!("sectors 0..={cutoff} (truncated fermi space)")
        },
        tol,
        pass,
    })
}

/// eta-CCR check on the Bose representation at the given cutoff.
///
/// For each probe `(f, g)` the residual is the max column norm of
/// `[a(f), a†(g)] - <f|eta g> I` over sectors `0..=N-2`; the top-sector
/// defect (an artifact of truncation) is reported separately.
pub fn check_eta_ccr(
    triplet: &KreinTriplet,
    cutoff: usize,
    probes: &[Probe],
    tol: f64,
) -> Result<RelationCheck, FieldError> {
    if cutoff < 2 {
        return Err(FieldError::CutoffTooSmall { cutoff });
    }
    let rep = FockRep::new(triplet, Statistics::Bose, cutoff, None)?;
    relation_check(&rep, probes, RelationKind::Commutator, tol)
}

/// eta-CAR check on the Fermi representation over the whole (untruncated)
/// antisymmetric space.
pub fn check_eta_car(
    triplet: &KreinTriplet,
    probes: &[Probe],
    tol: f64,
) -> Result<RelationCheck, FieldError> {
    let rep = FockRep::new(triplet, Statistics::Fermi, triplet.dim(), None)?;
    relation_check(&rep, probes, RelationKind::Anticommutator, tol)
}

/// Same checks, but on an already-built representation.
pub fn check_relations(
    rep: &FockRep,
    probes: &[Probe],
    tol: f64,
) -> Result<RelationCheck, FieldError> {
    let kind = match rep.statistics() {
        Statistics::Bose => RelationKind::Commutator,
        Statistics::Fermi => RelationKind::Anticommutator,
        Statistics::Full => {
            return Err(FieldError::BasisMismatch {
                detail: "relations are checked on bose or fermi representations".into(),
            })
        }
    };
    if kind == RelationKind::Commutator && rep.basis().cutoff() < 2 {
        return Err(FieldError::CutoffTooSmall {
            cutoff: rep.basis().cutoff(),
        });
    }
    relation_check(rep, probes, kind, tol)
}

/// Pairing residual report.
#[derive(Debug, Clone, Copy)]
pub struct PairingCheck {
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Max residual of `(a†(f) v | w) = (v | a(f) w)` over sample vector pairs,
/// where `(x|y) = <x|Gamma(eta) y>`.
pub fn check_adjoint_pairing(
    pair: &FieldOperatorPair,
    gamma: &GradedOperator,
    samples: &[(DVector<C64>, DVector<C64>)],
    tol: f64,
) -> Result<PairingCheck, FieldError> {
    if !same_basis(pair.annihilator.domain(), gamma.domain()) {
        return Err(FieldError::BasisMismatch {
            detail: "pairing check requires operators on Gamma(eta)'s basis".into(),
        });
    }
    let g = gamma.matrix();
    let mut residual = 0.0f64;
    for (v, w) in samples {
        let lhs = pair.creator_dagger.apply(v).dotc(&(g * w));
        let rhs = v.dotc(&(g * &pair.annihilator.apply(w)));
        residual = residual.max((lhs - rhs).norm());
    }
    Ok(PairingCheck {
        residual,
        tol,
        pass: residual <= tol,
    })
}

/// Whether the annihilator kills the vacuum.
pub fn check_vacuum(pair: &FieldOperatorPair) -> bool {
    vacuum_residual(pair) <= 1e-14
}

/// Norm of the annihilator column at the vacuum label.
pub fn vacuum_residual(pair: &FieldOperatorPair) -> f64 {
    let vac = pair.annihilator.domain().vacuum_index();
    pair.annihilator.matrix().column(vac).norm()
}

/// Rank report for the creator-monomial span of the vacuum.
#[derive(Debug, Clone)]
pub struct CyclicityCheck {
    pub rank: usize,
    pub expected: usize,
    pub pass: bool,
}

/// Applies every canonical creator monomial of degree at most the cutoff to
/// the vacuum and measures the rank of the resulting family (singular
/// values above 1e-8).
pub fn check_cyclicity(
    triplet: &KreinTriplet,
    statistics: Statistics,
    cutoff: usize,
) -> Result<CyclicityCheck, FieldError> {
    let rep = FockRep::new(triplet, statistics, cutoff, None)?;
    let d = triplet.dim();
    let creators: Vec<DMatrix<C64>> = (0..d)
        .map(|k| Ok(rep.creator_dagger(&unit_vector(d, k))?.into_matrix()))
        .collect::<Result<_, FieldError>>()?;
    let basis = rep.basis();
    let mut columns = Vec::with_capacity(basis.total_len());
    for idx in 0..basis.total_len() {
        let (_, label) = basis.label(idx);
        // modes with multiplicity, applied right-to-left
        let modes: Vec<usize> = match statistics {
            Statistics::Bose => {
                let mut s = Vec::new();
                for (mode, &occ) in label.iter().enumerate() {
                    s.extend(std::iter::repeat_n(mode, occ));
                }
                s
            }
            Statistics::Fermi => label.to_vec(),
            Statistics::Full => unreachable!("FockRep rejects full statistics"),
        };
        let mut v = rep.vacuum();
        for &mode in modes.iter().rev() {
            v = &creators[mode] * v;
        }
        columns.push(v);
    }
    let m = DMatrix::from_columns(&columns);
    let rank = linalg::rank(&m, 1e-8);
    let expected = basis.total_len();
    Ok(CyclicityCheck {
        rank,
        expected,
        pass: rank == expected,
    })
}

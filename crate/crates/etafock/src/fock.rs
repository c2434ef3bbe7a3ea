//! Truncated Fock spaces: basis enumeration, (anti)symmetrizers, embeddings
//! of the occupation/subset bases into the full tensor space, and second
//! quantization `Gamma(U)`.
//!
//! The full Fock space over `C^d` truncated at total particle number `N` is
//! `C Omega (+) H (+) H^(x)2 (+) ... (+) H^(x)N`. Sector `n` of the full
//! space is spanned by length-`n` mode sequences; the Bose sector by
//! occupation vectors `(n_1..n_d)` with sum `n`; the Fermi sector by
//! strictly increasing mode subsets of size `n`. Labels within a sector are
//! kept in lexicographic order and sector 0 is the single vacuum label.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg;

/// Default cap on the number of basis labels.
pub const DEFAULT_BASIS_CAP: usize = 1_000_000;

/// Hard cap on dense matrix entries allocated by constructors.
const MATRIX_ENTRY_CAP: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("number of modes must be at least 1")]
    NoModes,
    #[error("size overflow: {detail}")]
    SizeOverflow { detail: String },
    #[error("operator is not unitary: residual {residual:e}")]
    NotUnitary { residual: f64 },
    #[error("basis mismatch: {detail}")]
    BasisMismatch { detail: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

fn ensure_matrix(rows: usize, cols: usize) -> Result<(), FockError> {
    let entries = rows as u128 * cols as u128;
    if entries > MATRIX_ENTRY_CAP {
        return Err(FockError::SizeOverflow {
            detail: format!("dense {rows}x{cols} matrix exceeds the entry cap"),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Full,
    Bose,
    Fermi,
}

impl std::fmt::Display for Statistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Statistics::Full => write!(f, "full"),
            Statistics::Bose => write!(f, "bose"),
            Statistics::Fermi => write!(f, "fermi"),
        }
    }
}

/// Graded basis of a truncated Fock space.
///
/// Labels are stored per sector. Full labels are mode sequences of length
/// `n`, Bose labels are occupation vectors of length `modes`, Fermi labels
/// are increasing subsets. Modes are indexed from 0 internally and printed
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    statistics: Statistics,
    modes: usize,
    cutoff: usize,
    sectors: Vec<Vec<Vec<usize>>>,
    offsets: Vec<usize>,
    total: usize,
}

impl SectorBasis {
    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Effective cutoff: for Fermi statistics the requested cutoff is
    /// clamped to the number of modes.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn total_len(&self) -> usize {
        self.total
    }

    pub fn sector_size(&self, n: usize) -> usize {
        self.sectors[n].len()
    }

    pub fn sector_offset(&self, n: usize) -> usize {
        self.offsets[n]
    }

    pub fn sector_labels(&self, n: usize) -> &[Vec<usize>] {
        &self.sectors[n]
    }

    /// Sector containing the flat basis index.
    pub fn sector_of(&self, index: usize) -> usize {
        debug_assert!(index < self.total);
        match self.offsets.binary_search(&index) {
            Ok(n) => n,
            Err(n) => n - 1,
        }
    }

    pub fn label(&self, index: usize) -> (usize, &[usize]) {
        let n = self.sector_of(index);
        (n, &self.sectors[n][index - self.offsets[n]])
    }

    /// Flat index of a label inside sector `n`, if present.
    pub fn index_of(&self, n: usize, label: &[usize]) -> Option<usize> {
        if n > self.cutoff {
            return None;
        }
        self.sectors[n]
            .binary_search_by(|probe| probe.as_slice().cmp(label))
            .ok()
            .map(|k| self.offsets[n] + k)
    }

    pub fn vacuum_index(&self) -> usize {
        0
    }

    pub fn label_string(&self, index: usize) -> String {
        let (n, label) = self.label(index);
        if n == 0 {
            return "Ω".to_string();
        }
        let one_based: Vec<String> = label.iter().map(|m| (m + 1).to_string()).collect();
        match self.statistics {
            Statistics::Full => format!("({})", one_based.join(",")),
            Statistics::Bose => format!(
                "({})",
                label
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Statistics::Fermi => format!("{{{}}}", one_based.join(",")),
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

fn full_sector_size(d: usize, n: usize) -> Option<u128> {
    (d as u128).checked_pow(n as u32)
}

fn full_labels(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut seq = vec![0usize; n];
    loop {
        out.push(seq.clone());
        // lexicographic odometer over base-d digits
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            seq[k] += 1;
            if seq[k] < d {
                break;
            }
            seq[k] = 0;
        }
    }
}

fn bose_labels(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(out: &mut Vec<Vec<usize>>, prefix: &mut Vec<usize>, slots: usize, remaining: usize) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=remaining {
            prefix.push(k);
            rec(out, prefix, slots - 1, remaining - k);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut out, &mut Vec::new(), d, n);
    out
}

fn fermi_labels(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(
        out: &mut Vec<Vec<usize>>,
        prefix: &mut Vec<usize>,
        start: usize,
        d: usize,
        left: usize,
    ) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in start..=(d - left) {
            prefix.push(k);
            rec(out, prefix, k + 1, d, left - 1);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n <= d {
        rec(&mut out, &mut Vec::new(), 0, d, n);
    }
    out
}

/// Enumerates the graded basis of a truncated Fock space.
pub fn enumerate_basis(
    statistics: Statistics,
    modes: usize,
    cutoff: usize,
    cap: Option<usize>,
) -> Result<Arc<SectorBasis>, FockError> {
    if modes == 0 {
        return Err(FockError::NoModes);
    }
    let cap = cap.unwrap_or(DEFAULT_BASIS_CAP);
    let effective = match statistics {
        Statistics::Fermi => cutoff.min(modes),
        _ => cutoff,
    };
    let mut total: u128 = 0;
    for n in 0..=effective {
        let size = match statistics {
            Statistics::Full => {
                full_sector_size(modes, n).ok_or_else(|| FockError::SizeOverflow {
                    detail: format!("full sector {n} over {modes} modes overflows"),
                })?
            }
            Statistics::Bose => binomial(modes + n - 1, n),
            Statistics::Fermi => binomial(modes, n),
        };
        total += size;
        if total > cap as u128 {
            return Err(FockError::SizeOverflow {
                detail: format!("basis size {total} exceeds cap {cap}"),
            });
        }
    }
    let mut sectors = Vec::with_capacity(effective + 1);
    let mut offsets = Vec::with_capacity(effective + 1);
    let mut offset = 0usize;
    for n in 0..=effective {
        let labels = match statistics {
            Statistics::Full => full_labels(modes, n),
            Statistics::Bose => bose_labels(modes, n),
            Statistics::Fermi => fermi_labels(modes, n),
        };
        offsets.push(offset);
        offset += labels.len();
        sectors.push(labels);
    }
    Ok(Arc::new(SectorBasis {
        statistics,
        modes,
        cutoff: effective,
        sectors,
        offsets,
        total: offset,
    }))
}

/// All permutations of `0..n` with their signs.
fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, f64)> {
    // Heap's algorithm; each step is a single transposition, so the sign
    // alternates.
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut counters = vec![0usize; n];
    out.push((perm.clone(), sign));
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn tensor_projector(d: usize, n: usize, signed: bool) -> Result<DMatrix<C64>, FockError> {
    let dim_u = full_sector_size(d, n).ok_or_else(|| FockError::SizeOverflow {
        detail: format!("tensor power {d}^{n} overflows"),
    })?;
    if dim_u > MATRIX_ENTRY_CAP {
        return Err(FockError::SizeOverflow {
            detail: format!("tensor power {d}^{n} exceeds the entry cap"),
        });
    }
    let dim = dim_u as usize;
    ensure_matrix(dim, dim)?;
    let perms = permutations_with_sign(n);
    let weight = 1.0 / factorial(n);
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    let labels = full_labels(d, n);
    for (col, seq) in labels.iter().enumerate() {
        for (perm, sign) in &perms {
            let mut row = 0usize;
            for &p in perm {
                row = row * d + seq[p];
            }
            let coeff = if signed { sign * weight } else { weight };
            m[(row, col)] += C64::new(coeff, 0.0);
        }
    }
    Ok(m)
}

/// Symmetrizer `P_+` on the `n`-particle full sector over `d` modes.
pub fn symmetrizer(d: usize, n: usize) -> Result<DMatrix<C64>, FockError> {
    tensor_projector(d, n, false)
}

/// Antisymmetrizer `P_-` on the `n`-particle full sector over `d` modes.
pub fn antisymmetrizer(d: usize, n: usize) -> Result<DMatrix<C64>, FockError> {
    tensor_projector(d, n, true)
}

/// Complex matrix over a sector basis with an optional sector-degree shift.
///
/// When `grade_shift` is `Some(s)`, all entries connecting sector `n`
/// columns to sector `m` rows with `m != n + s` vanish. Generic operators
/// (for example random test operators or mixed-shift sums) carry `None`.
#[derive(Debug, Clone)]
pub struct GradedOperator {
    domain: Arc<SectorBasis>,
    codomain: Arc<SectorBasis>,
    matrix: DMatrix<C64>,
    grade_shift: Option<i32>,
}

pub(crate) fn same_basis(a: &Arc<SectorBasis>, b: &Arc<SectorBasis>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl GradedOperator {
    pub fn from_matrix(
        domain: Arc<SectorBasis>,
        codomain: Arc<SectorBasis>,
        matrix: DMatrix<C64>,
        grade_shift: Option<i32>,
    ) -> Result<Self, FockError> {
        if matrix.ncols() != domain.total_len() {
            return Err(FockError::DimensionMismatch {
                expected: domain.total_len(),
                got: matrix.ncols(),
            });
        }
        if matrix.nrows() != codomain.total_len() {
            return Err(FockError::DimensionMismatch {
                expected: codomain.total_len(),
                got: matrix.nrows(),
            });
        }
        Ok(Self {
            domain,
            codomain,
            matrix,
            grade_shift,
        })
    }

    pub fn identity(basis: Arc<SectorBasis>) -> Self {
        let n = basis.total_len();
        Self {
            domain: basis.clone(),
            codomain: basis,
            matrix: DMatrix::identity(n, n),
            grade_shift: Some(0),
        }
    }

    pub fn domain(&self) -> &Arc<SectorBasis> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SectorBasis> {
        &self.codomain
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn grade_shift(&self) -> Option<i32> {
        self.grade_shift
    }

    /// Conjugate transpose with respect to `<.|.>`.
    pub fn adjoint(&self) -> Self {
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: self.matrix.adjoint(),
            grade_shift: self.grade_shift.map(|s| -s),
        }
    }

    /// Operator composition `self . rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self, FockError> {
        if !same_basis(&self.domain, &rhs.codomain) {
            return Err(FockError::BasisMismatch {
                detail: "composition domains disagree".into(),
            });
        }
        Ok(Self {
            domain: rhs.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * &rhs.matrix,
            grade_shift: match (self.grade_shift, rhs.grade_shift) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, FockError> {
        self.linear_combine(rhs, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, FockError> {
        self.linear_combine(rhs, C64::new(-1.0, 0.0))
    }

    fn linear_combine(&self, rhs: &Self, coeff: C64) -> Result<Self, FockError> {
        if !same_basis(&self.domain, &rhs.domain) || !same_basis(&self.codomain, &rhs.codomain) {
            return Err(FockError::BasisMismatch {
                detail: "sum of operators over different bases".into(),
            });
        }
        Ok(Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix + &rhs.matrix * coeff,
            grade_shift: match (self.grade_shift, rhs.grade_shift) {
                (Some(a), Some(b)) if a == b => Some(a),
                _ => None,
            },
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * c,
            grade_shift: self.grade_shift,
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.matrix)
    }

    /// Largest 2-norm of a column whose label lies in sectors
    /// `lo..=hi` of the domain.
    pub fn max_column_norm_over_sectors(&self, lo: usize, hi: usize) -> f64 {
        let mut out = 0.0f64;
        for n in lo..=hi.min(self.domain.cutoff()) {
            let range = self.domain.sector_offset(n)
                ..self.domain.sector_offset(n) + self.domain.sector_size(n);
            for j in range {
                out = out.max(self.matrix.column(j).norm());
            }
        }
        out
    }

    /// Residual of the sector-shift zero pattern, for diagnostics.
    pub fn grade_pattern_residual(&self) -> f64 {
        let Some(shift) = self.grade_shift else {
            return 0.0;
        };
        let mut out = 0.0f64;
        for j in 0..self.matrix.ncols() {
            let nj = self.domain.sector_of(j) as i32;
            for i in 0..self.matrix.nrows() {
                let ni = self.codomain.sector_of(i) as i32;
                if ni != nj + shift {
                    out = out.max(self.matrix[(i, j)].norm());
                }
            }
        }
        out
    }
}

/// Isometric embedding of a sector's occupation/subset labels into the full
/// tensor sector: columns are the normalized (anti)symmetrized product
/// vectors, in label order.
fn sector_embedding(
    statistics: Statistics,
    d: usize,
    labels: &[Vec<usize>],
    n: usize,
) -> Result<DMatrix<C64>, FockError> {
    let dim_u = full_sector_size(d, n).ok_or_else(|| FockError::SizeOverflow {
        detail: format!("tensor power {d}^{n} overflows"),
    })?;
    if dim_u > MATRIX_ENTRY_CAP {
        return Err(FockError::SizeOverflow {
            detail: format!("tensor power {d}^{n} exceeds the entry cap"),
        });
    }
    let dim = dim_u as usize;
    ensure_matrix(dim, labels.len())?;
    let perms = permutations_with_sign(n);
    let weight = 1.0 / factorial(n);
    let mut m = DMatrix::<C64>::zeros(dim, labels.len());
    for (col, label) in labels.iter().enumerate() {
        // mode sequence in ascending order
        let seq: Vec<usize> = match statistics {
            Statistics::Bose => {
                let mut s = Vec::with_capacity(n);
                for (mode, &occ) in label.iter().enumerate() {
                    s.extend(std::iter::repeat_n(mode, occ));
                }
                s
            }
            Statistics::Fermi => label.clone(),
            Statistics::Full => {
                return Err(FockError::BasisMismatch {
                    detail: "embedding requires a bose or fermi basis".into(),
                })
            }
        };
        for (perm, sign) in &perms {
            let mut row = 0usize;
            for &p in perm {
                row = row * d + seq[p];
            }
            let coeff = match statistics {
                Statistics::Fermi => sign * weight,
                _ => weight,
            };
            m[(row, col)] += C64::new(coeff, 0.0);
        }
        let norm = m.column(col).norm();
        let mut column = m.column_mut(col);
        column /= C64::new(norm, 0.0);
    }
    Ok(m)
}

/// Isometry from a Bose/Fermi basis into the full basis at the same modes
/// and cutoff. Columns are unit vectors; `V^* V = I` and `V V^*` is the
/// (anti)symmetric projection restricted to the truncated space.
pub fn embed_symmetric(
    sym: &Arc<SectorBasis>,
    full: &Arc<SectorBasis>,
) -> Result<DMatrix<C64>, FockError> {
    if full.statistics() != Statistics::Full {
        return Err(FockError::BasisMismatch {
            detail: "target basis must have full statistics".into(),
        });
    }
    if sym.statistics() == Statistics::Full {
        return Err(FockError::BasisMismatch {
            detail: "source basis must be bose or fermi".into(),
        });
    }
    if sym.modes() != full.modes() || sym.cutoff() != full.cutoff() {
        return Err(FockError::BasisMismatch {
            detail: format!(
                "incompatible bases: {}x{} modes, cutoffs {} and {}",
                sym.modes(),
                full.modes(),
                sym.cutoff(),
                full.cutoff()
            ),
        });
    }
    ensure_matrix(full.total_len(), sym.total_len())?;
    let mut v = DMatrix::<C64>::zeros(full.total_len(), sym.total_len());
    for n in 0..=sym.cutoff() {
        let block = sector_embedding(sym.statistics(), sym.modes(), sym.sector_labels(n), n)?;
        v.view_mut(
            (full.sector_offset(n), sym.sector_offset(n)),
            (block.nrows(), block.ncols()),
        )
        .copy_from(&block);
    }
    Ok(v)
}

/// Second quantization `Gamma(U) = I (+) U (+) U^(x)2 (+) ...` truncated to
/// the basis. On Bose/Fermi bases each sector block is the compression of
/// `U^(x)n` to the (anti)symmetric subspace in the normalized
/// occupation/subset basis.
pub fn second_quantization(
    u: &DMatrix<C64>,
    basis: &Arc<SectorBasis>,
    tol: f64,
) -> Result<GradedOperator, FockError> {
    let d = basis.modes();
    if u.nrows() != d || u.ncols() != d {
        return Err(FockError::DimensionMismatch {
            expected: d,
            got: u.nrows().max(u.ncols()),
        });
    }
    let residual = linalg::unitarity_residual(u);
    if residual > tol {
        return Err(FockError::NotUnitary { residual });
    }
    let total = basis.total_len();
    ensure_matrix(total, total)?;
    let mut m = DMatrix::<C64>::zeros(total, total);
    for n in 0..=basis.cutoff() {
        let un = linalg::kron_power(u, n);
        let block = match basis.statistics() {
            Statistics::Full => un,
            Statistics::Bose | Statistics::Fermi => {
                let v = sector_embedding(basis.statistics(), d, basis.sector_labels(n), n)?;
                v.adjoint() * un * &v
            }
        };
        m.view_mut(
            (basis.sector_offset(n), basis.sector_offset(n)),
            (block.nrows(), block.ncols()),
        )
        .copy_from(&block);
    }
    GradedOperator::from_matrix(basis.clone(), basis.clone(), m, Some(0))
}

/// Block-diagonal symmetric (`Bose`) or antisymmetric (`Fermi`) projection
/// on a full-statistics basis.
pub fn fock_projection(
    full: &Arc<SectorBasis>,
    kind: Statistics,
) -> Result<GradedOperator, FockError> {
    if full.statistics() != Statistics::Full {
        return Err(FockError::BasisMismatch {
            detail: "projection lives on the full Fock space".into(),
        });
    }
    let signed = match kind {
        Statistics::Bose => false,
        Statistics::Fermi => true,
        Statistics::Full => {
            return Err(FockError::BasisMismatch {
                detail: "projection kind must be bose or fermi".into(),
            })
        }
    };
    let total = full.total_len();
    ensure_matrix(total, total)?;
    let mut m = DMatrix::<C64>::zeros(total, total);
    for n in 0..=full.cutoff() {
        let block = tensor_projector(full.modes(), n, signed)?;
        m.view_mut(
            (full.sector_offset(n), full.sector_offset(n)),
            (block.nrows(), block.ncols()),
        )
        .copy_from(&block);
    }
    GradedOperator::from_matrix(full.clone(), full.clone(), m, Some(0))
}

/// `max |P Gamma - Gamma P|` for two operators over the same full basis.
pub fn check_projection_commutation(
    gamma: &GradedOperator,
    projection: &GradedOperator,
) -> Result<f64, FockError> {
    let pg = projection.compose(gamma)?;
    let gp = gamma.compose(projection)?;
    Ok(pg.sub(&gp)?.max_abs())
}

//! Krein triplets on a finite-dimensional one-particle space.
//!
//! A Krein triplet is the standard inner-product space `C^d` together with a
//! selfadjoint unitary metric operator `eta`. The inner product `<v|w>` is
//! conjugate-linear in the *left* argument, and the induced indefinite
//! hermitian form is `(v|w) = <v|eta w>`. The `+1`/`-1` eigenspaces of `eta`
//! give the fundamental decomposition `H = H_+ (+) H_-`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Error)]
pub enum KreinError {
    #[error("metric has dimension zero")]
    ZeroDim,
    #[error("metric is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("tolerance must be a nonnegative finite number, got {tol}")]
    InvalidTolerance { tol: f64 },
    #[error("metric is not selfadjoint: residual {residual:e}")]
    NotSelfadjoint { residual: f64 },
    #[error("metric is not an involution: residual {residual:e}")]
    NotInvolutive { residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("metric eigenvalue {value} does not snap to +1 or -1 within tolerance")]
    EigenvalueDrift { value: f64 },
}

/// Residuals measured while validating a metric candidate.
#[derive(Debug, Clone, Copy)]
pub struct MetricResiduals {
    /// `max |eta - eta^*|`
    pub selfadjoint: f64,
    /// `max |eta^2 - I|`
    pub involutive: f64,
}

/// Accepts `eta` iff it is a selfadjoint involution within `tol`.
pub fn validate_metric(eta: &DMatrix<C64>, tol: f64) -> Result<MetricResiduals, KreinError> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(KreinError::InvalidTolerance { tol });
    }
    if eta.nrows() != eta.ncols() {
        return Err(KreinError::NonSquare {
            rows: eta.nrows(),
            cols: eta.ncols(),
        });
    }
    if eta.nrows() == 0 {
        return Err(KreinError::ZeroDim);
    }
    let selfadjoint = linalg::hermiticity_residual(eta);
    if selfadjoint > tol {
        return Err(KreinError::NotSelfadjoint {
            residual: selfadjoint,
        });
    }
    let involutive = linalg::involution_residual(eta);
    if involutive > tol {
        return Err(KreinError::NotInvolutive {
            residual: involutive,
        });
    }
    Ok(MetricResiduals {
        selfadjoint,
        involutive,
    })
}

/// Default tolerance for metric validation.
pub const DEFAULT_METRIC_TOL: f64 = 1e-10;

/// A validated metric operator on `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct KreinTriplet {
    dim: usize,
    eta: DMatrix<C64>,
    tol: f64,
}

impl KreinTriplet {
    pub fn new(eta: DMatrix<C64>, tol: f64) -> Result<Self, KreinError> {
        validate_metric(&eta, tol)?;
        Ok(Self {
            dim: eta.nrows(),
            eta,
            tol,
        })
    }

    /// The trivial metric `eta = I`, for which `(.|.)` equals `<.|.>`.
    pub fn identity(dim: usize, tol: f64) -> Result<Self, KreinError> {
        Self::new(DMatrix::identity(dim, dim), tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eta(&self) -> &DMatrix<C64> {
        &self.eta
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn apply_eta(&self, f: &DVector<C64>) -> DVector<C64> {
        &self.eta * f
    }

    /// The indefinite form `(v|w) = <v|eta w>`, conjugate-linear in `v`.
    pub fn indefinite_form(&self, v: &DVector<C64>, w: &DVector<C64>) -> Result<C64, KreinError> {
        if v.len() != self.dim {
            return Err(KreinError::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        if w.len() != self.dim {
            return Err(KreinError::DimensionMismatch {
                expected: self.dim,
                got: w.len(),
            });
        }
        Ok(v.dotc(&(&self.eta * w)))
    }

    /// Orthonormal bases of the `+1`/`-1` eigenspaces of `eta` and the
    /// orthogonal projections onto them.
    pub fn fundamental_decomposition(&self) -> Result<FundamentalDecomposition, KreinError> {
        // Eigenvalues of a valid metric are exactly +-1; the snap tolerance
        // only has to absorb eigensolver roundoff.
        let snap = self.tol.max(1e-12);
        let eig = self.eta.clone().symmetric_eigen();
        let mut basis_plus = Vec::new();
        let mut basis_minus = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            let v: DVector<C64> = eig.eigenvectors.column(k).into_owned();
            if (lambda - 1.0).abs() <= snap {
                basis_plus.push(v);
            } else if (lambda + 1.0).abs() <= snap {
                basis_minus.push(v);
            } else {
                return Err(KreinError::EigenvalueDrift { value: lambda });
            }
        }
        let mut proj_plus = DMatrix::<C64>::zeros(self.dim, self.dim);
        for v in &basis_plus {
            proj_plus += v * v.adjoint();
        }
        let mut proj_minus = DMatrix::<C64>::zeros(self.dim, self.dim);
        for v in &basis_minus {
            proj_minus += v * v.adjoint();
        }
        Ok(FundamentalDecomposition {
            basis_plus,
            basis_minus,
            proj_plus,
            proj_minus,
        })
    }
}

/// Fundamental decomposition of a Krein triplet: `eta = E_+ - E_-`.
#[derive(Debug, Clone)]
pub struct FundamentalDecomposition {
    pub basis_plus: Vec<DVector<C64>>,
    pub basis_minus: Vec<DVector<C64>>,
    pub proj_plus: DMatrix<C64>,
    pub proj_minus: DMatrix<C64>,
}

impl FundamentalDecomposition {
    pub fn dim_plus(&self) -> usize {
        self.basis_plus.len()
    }

    pub fn dim_minus(&self) -> usize {
        self.basis_minus.len()
    }

    /// `max |E_+ - E_- - eta|`.
    pub fn reconstruction_residual(&self, eta: &DMatrix<C64>) -> f64 {
        linalg::max_abs(&(&self.proj_plus - &self.proj_minus - eta))
    }
}

/// Validates `eta` and decomposes it in one step.
pub fn fundamental_decomposition(
    eta: &DMatrix<C64>,
    tol: f64,
) -> Result<FundamentalDecomposition, KreinError> {
    KreinTriplet::new(eta.clone(), tol)?.fundamental_decomposition()
}

/// Gram matrix `G[i][j] = form(v_i, v_j)` of a hermitian form on a family
/// of vectors.
pub fn gram_matrix<F>(form: F, vectors: &[DVector<C64>]) -> Result<DMatrix<C64>, KreinError>
where
    F: Fn(&DVector<C64>, &DVector<C64>) -> C64,
{
    if let Some(first) = vectors.first() {
        let n = first.len();
        for v in vectors {
            if v.len() != n {
                return Err(KreinError::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
    }
    let k = vectors.len();
    Ok(DMatrix::from_fn(k, k, |i, j| {
        form(&vectors[i], &vectors[j])
    }))
}

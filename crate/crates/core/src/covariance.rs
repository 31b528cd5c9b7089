//! Asymptotic covariance estimators for maximum-likelihood estimates:
//! inverse negative Hessian, inverse outer product of per-observation
//! scores (BHHH), and the sandwich combining both.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::autodiff::{HessianMatrix, ScoreMatrix};
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovMethod {
    Hessian,
    Opg,
    Sandwich,
}

impl CovMethod {
    pub const ALL: [CovMethod; 3] = [CovMethod::Hessian, CovMethod::Opg, CovMethod::Sandwich];

    pub fn as_str(self) -> &'static str {
        match self {
            CovMethod::Hessian => "hessian",
            CovMethod::Opg => "opg",
            CovMethod::Sandwich => "sandwich",
        }
    }
}

impl fmt::Display for CovMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CovMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hessian" => Ok(CovMethod::Hessian),
            "opg" | "bhhh" => Ok(CovMethod::Opg),
            "sandwich" | "robust" => Ok(CovMethod::Sandwich),
            other => Err(Error::Argument(format!("unknown covariance method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
    method: CovMethod,
    jittered: bool,
}

impl CovarianceMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn method(&self) -> CovMethod {
        self.method
    }

    /// True when a ridge had to be added before the inversion succeeded.
    pub fn jittered(&self) -> bool {
        self.jittered
    }
}

/// Standard errors in parameter order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StdErrorVector(Vec<f64>);

impl StdErrorVector {
    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        StdErrorVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Inverse of a symmetric positive-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdInverse {
    pub inverse: DMatrix<f64>,
    /// Ridge added to the diagonal, zero when the first factorization held.
    pub ridge: f64,
}

/// Square-root-free Cholesky `M = L D Lᵀ` (unit lower `L`), or the first
/// non-positive pivot of `D`.
fn ldl(m: &DMatrix<f64>) -> std::result::Result<(DMatrix<f64>, Vec<f64>), f64> {
    let n = m.nrows();
    let mut l = DMatrix::<f64>::identity(n, n);
    let mut d = vec![0.0; n];
    for j in 0..n {
        let mut dj = m[(j, j)];
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        if !(dj > 0.0) || !dj.is_finite() {
            return Err(dj);
        }
        d[j] = dj;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok((l, d))
}

/// `M⁻¹ = L⁻ᵀ D⁻¹ L⁻¹`.
fn inverse_from_ldl(l: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    let n = l.nrows();
    let mut linv = DMatrix::<f64>::identity(n, n);
    for c in 0..n {
        for i in c + 1..n {
            let mut s = 0.0;
            for k in c..i {
                s -= l[(i, k)] * linv[(k, c)];
            }
            linv[(i, c)] = s;
        }
    }
    let mut scaled = linv.clone();
    for (i, mut row) in scaled.row_iter_mut().enumerate() {
        row /= d[i];
    }
    let inv = linv.tr_mul(&scaled);
    (&inv + inv.transpose()) * 0.5
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let gap = (m - m.transpose()).iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    gap / scale.max(f64::MIN_POSITIVE)
}

/// Cholesky-based inverse. If the factorization fails, retries once with
/// `1e-10 · trace(M)/p` added to the diagonal and reports the ridge.
pub fn invert_spd(m: &DMatrix<f64>) -> Result<SpdInverse> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::Argument(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if max_asymmetry(m) > SYMMETRY_TOL {
        return Err(Error::Argument("matrix is not symmetric".into()));
    }
    match ldl(m) {
        Ok((l, d)) => Ok(SpdInverse {
            inverse: inverse_from_ldl(&l, &d),
            ridge: 0.0,
        }),
        Err(pivot) => {
            let p = m.nrows();
            let ridge = 1e-10 * m.trace() / p as f64;
            if !(ridge > 0.0) {
                return Err(Error::Singular {
                    pivot,
                    hint: String::new(),
                });
            }
            let shifted = m + DMatrix::<f64>::identity(p, p) * ridge;
            match ldl(&shifted) {
                Ok((l, d)) => Ok(SpdInverse {
                    inverse: inverse_from_ldl(&l, &d),
                    ridge,
                }),
                Err(pivot) => Err(Error::Singular {
                    pivot,
                    hint: String::new(),
                }),
            }
        }
    }
}

fn with_hint(e: Error, hint: &str) -> Error {
    match e {
        Error::Singular { pivot, .. } => Error::Singular {
            pivot,
            hint: format!("; {hint}"),
        },
        other => other,
    }
}

/// `[−H]⁻¹`.
pub fn cov_from_hessian(h: &HessianMatrix) -> Result<CovarianceMatrix> {
    let neg = -h.matrix();
    let inv = invert_spd(&neg).map_err(|e| {
        with_hint(e, "negative Hessian is not positive definite; the point may not be a maximum")
    })?;
    Ok(CovarianceMatrix {
        matrix: inv.inverse,
        method: CovMethod::Hessian,
        jittered: inv.ridge > 0.0,
    })
}

/// `[GᵀG]⁻¹` with `GᵀG = Σᵢ gᵢgᵢᵀ` over per-observation scores.
pub fn cov_from_opg(g: &ScoreMatrix) -> Result<CovarianceMatrix> {
    if g.n_obs() < g.dim() {
        return Err(Error::Singular {
            pivot: 0.0,
            hint: format!(
                "; {} observations cannot identify {} parameters",
                g.n_obs(),
                g.dim()
            ),
        });
    }
    let inv = invert_spd(&g.outer_product())
        .map_err(|e| with_hint(e, "score outer product is rank deficient"))?;
    Ok(CovarianceMatrix {
        matrix: inv.inverse,
        method: CovMethod::Opg,
        jittered: inv.ridge > 0.0,
    })
}

/// `[−H]⁻¹ [GᵀG] [−H]⁻¹`.
pub fn cov_sandwich(h: &HessianMatrix, g: &ScoreMatrix) -> Result<CovarianceMatrix> {
    if g.dim() != h.dim() {
        return Err(Error::Argument(format!(
            "score matrix has {} columns, Hessian is {}x{}",
            g.dim(),
            h.dim(),
            h.dim()
        )));
    }
    let bread = cov_from_hessian(h)?;
    let meat = g.outer_product();
    let m = bread.matrix() * meat * bread.matrix();
    Ok(CovarianceMatrix {
        matrix: (&m + m.transpose()) * 0.5,
        method: CovMethod::Sandwich,
        jittered: bread.jittered,
    })
}

/// Square roots of the covariance diagonal.
pub fn standard_errors(c: &CovarianceMatrix) -> Result<StdErrorVector> {
    let se = c
        .matrix
        .diagonal()
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if value > 0.0 && value.is_finite() {
                Ok(value.sqrt())
            } else {
                Err(Error::NonPositiveVariance { index, value })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StdErrorVector(se))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
    }

    fn cov(matrix: DMatrix<f64>) -> CovarianceMatrix {
        CovarianceMatrix {
            matrix,
            method: CovMethod::Hessian,
            jittered: false,
        }
    }

    #[test]
    fn inverts_simple_matrices() {
        let inv = invert_spd(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(inv.inverse, DMatrix::identity(3, 3));
        assert_eq!(inv.ridge, 0.0);
        let inv = invert_spd(&diag(&[2.0, 0.5])).unwrap();
        assert_eq!(inv.inverse, diag(&[0.5, 2.0]));
    }

    #[test]
    fn ridge_rescues_semidefinite_and_is_flagged() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let inv = invert_spd(&m).unwrap();
        assert!(inv.ridge > 0.0);
        assert!((inv.ridge - 1e-10).abs() < 1e-24);
    }

    #[test]
    fn indefinite_matrix_reports_pivot() {
        let m = diag(&[1.0, -3.0]);
        match invert_spd(&m) {
            Err(Error::Singular { pivot, .. }) => assert!(pivot < 0.0),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            invert_spd(&DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn hessian_form() {
        let h = HessianMatrix::from_matrix(diag(&[-2.0, -4.0])).unwrap();
        let c = cov_from_hessian(&h).unwrap();
        assert_eq!(c.matrix(), &diag(&[0.5, 0.25]));
        assert_eq!(c.method(), CovMethod::Hessian);
        let h = HessianMatrix::from_matrix(diag(&[-25.0])).unwrap();
        let se = standard_errors(&cov_from_hessian(&h).unwrap()).unwrap();
        assert!((se.as_slice()[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn hessian_form_at_minimum_is_rejected() {
        let h = HessianMatrix::from_matrix(diag(&[2.0, 4.0])).unwrap();
        let err = cov_from_hessian(&h).unwrap_err();
        assert!(err.to_string().contains("may not be a maximum"), "{err}");
    }

    #[test]
    fn opg_form() {
        let g = ScoreMatrix::from_matrix(DMatrix::identity(2, 2));
        let c = cov_from_opg(&g).unwrap();
        assert_eq!(c.matrix(), &DMatrix::identity(2, 2));
        let g = ScoreMatrix::from_matrix(DMatrix::from_row_slice(1, 2, &[1.0, 2.0]));
        assert!(matches!(cov_from_opg(&g), Err(Error::Singular { .. })));
    }

    #[test]
    fn sandwich_arithmetic() {
        let h = HessianMatrix::from_matrix(diag(&[-2.0, -2.0])).unwrap();
        let g = ScoreMatrix::from_matrix(diag(&[8f64.sqrt(), 2f64.sqrt()]));
        let c = cov_sandwich(&h, &g).unwrap();
        assert!((c.matrix() - diag(&[2.0, 0.5])).amax() < 1e-15);
        let bad = ScoreMatrix::from_matrix(DMatrix::identity(3, 3));
        assert!(cov_sandwich(&h, &bad).is_err());
    }

    #[test]
    fn sandwich_collapses_under_information_equality() {
        let neg_h = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        // G with GᵀG = −H: G = D^½ Lᵀ.
        let (l, d) = ldl(&neg_h).unwrap();
        let root = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(2, d.iter().map(|v| v.sqrt())));
        let g = ScoreMatrix::from_matrix(root * l.transpose());
        let h = HessianMatrix::from_matrix(-neg_h).unwrap();
        let s = cov_sandwich(&h, &g).unwrap();
        let c = cov_from_hessian(&h).unwrap();
        assert!((s.matrix() - c.matrix()).amax() < 1e-10);
    }

    #[test]
    fn standard_error_extraction() {
        let se = standard_errors(&cov(diag(&[0.25, 4.0]))).unwrap();
        assert_eq!(se.as_slice(), &[0.5, 2.0]);
        let se = standard_errors(&cov(DMatrix::identity(3, 3))).unwrap();
        assert_eq!(se.as_slice(), &[1.0, 1.0, 1.0]);
        assert!(matches!(
            standard_errors(&cov(diag(&[1.0, 0.0]))),
            Err(Error::NonPositiveVariance { index: 1, .. })
        ));
    }
}

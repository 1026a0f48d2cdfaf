//! Linear state-space models `dx/dt = A x` with an optional quadratic energy
//! weight `P`, plus the linearized multi-machine swing builder.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{ModalError, Result};

/// Relative symmetry tolerance used when a model is constructed and the
/// caller did not run [`validate_model`] explicitly.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;

/// A real state matrix with an optional energy weight.
///
/// A model whose `P` fails validation is still constructible (lossy swing
/// systems produce indefinite weights); it is flagged, and physical energy
/// computations refuse it.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    a: DMatrix<f64>,
    p: Option<DMatrix<f64>>,
    labels: Option<Vec<String>>,
    p_flagged: bool,
}

impl StateSpaceModel {
    pub fn new(a: DMatrix<f64>, p: Option<DMatrix<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        if !a.is_square() {
            return Err(ModalError::DimensionMismatch(format!(
                "state matrix is {}x{}, expected square",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        if n == 0 {
            return Err(ModalError::InvalidInput("state matrix is empty".into()));
        }
        if let Some(p) = &p {
            if p.nrows() != n || p.ncols() != n {
                return Err(ModalError::DimensionMismatch(format!(
                    "P is {}x{} but A is {n}x{n}",
                    p.nrows(),
                    p.ncols()
                )));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(ModalError::DimensionMismatch(format!(
                    "{} labels for {n} states",
                    labels.len()
                )));
            }
        }
        let report = validate_parts(&a, p.as_ref(), DEFAULT_VALIDATION_TOL)?;
        Ok(Self { a, p, labels, p_flagged: !report.passed })
    }

    /// Model with no energy weight; physical computations use `P = I`.
    pub fn from_state_matrix(a: DMatrix<f64>) -> Result<Self> {
        Self::new(a, None, None)
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn p(&self) -> Option<&DMatrix<f64>> {
        self.p.as_ref()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// True when `P` is present but not symmetric positive definite.
    pub fn p_flagged(&self) -> bool {
        self.p_flagged
    }

    pub fn validate(&self, tol: f64) -> Result<ValidationReport> {
        validate_parts(&self.a, self.p.as_ref(), tol)
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            n: self.dim(),
            a: rows_of(&self.a),
            p: self.p.as_ref().map(rows_of),
            labels: self.labels.clone(),
        }
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        let a = matrix_from_rows(&file.a, "A")?;
        if a.nrows() != file.n {
            return Err(ModalError::DimensionMismatch(format!(
                "declared n = {} but A has {} rows",
                file.n,
                a.nrows()
            )));
        }
        let p = file.p.as_ref().map(|rows| matrix_from_rows(rows, "P")).transpose()?;
        Self::new(a, p, file.labels.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| ModalError::InvalidInput(format!("model file: {e}")))?;
        Self::from_file(&file)
    }
}

/// Outcome of checking the energy weight of a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `‖P − Pᵀ‖_F`, zero when no weight is present.
    pub symmetry_defect: f64,
    /// Smallest eigenvalue of `(P + Pᵀ)/2`, `None` when no weight is present.
    pub min_eigenvalue: Option<f64>,
    pub passed: bool,
}

pub fn validate_model(model: &StateSpaceModel, tol: f64) -> Result<ValidationReport> {
    model.validate(tol)
}

pub(crate) fn validate_parts(a: &DMatrix<f64>, p: Option<&DMatrix<f64>>, tol: f64) -> Result<ValidationReport> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(ModalError::non_finite("state matrix A"));
    }
    let Some(p) = p else {
        return Ok(ValidationReport { symmetry_defect: 0.0, min_eigenvalue: None, passed: true });
    };
    if p.iter().any(|v| !v.is_finite()) {
        return Err(ModalError::non_finite("energy weight P"));
    }
    let symmetry_defect = (p - p.transpose()).norm();
    let sym = (p + p.transpose()) * 0.5;
    let min_eigenvalue = SymmetricEigen::new(sym).eigenvalues.min();
    let passed = symmetry_defect <= tol * p.norm() && min_eigenvalue > 0.0;
    Ok(ValidationReport { symmetry_defect, min_eigenvalue: Some(min_eigenvalue), passed })
}

/// Parameters of `m` linearized swing equations
/// `M δ̈ + D δ̇ + K δ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwingParams {
    inertia: DVector<f64>,
    damping: DVector<f64>,
    stiffness: DMatrix<f64>,
}

impl SwingParams {
    pub fn new(inertia: Vec<f64>, damping: Vec<f64>, stiffness: DMatrix<f64>) -> Result<Self> {
        let m = inertia.len();
        if m == 0 {
            return Err(ModalError::InvalidInput("no machines".into()));
        }
        if damping.len() != m || stiffness.nrows() != m || stiffness.ncols() != m {
            return Err(ModalError::DimensionMismatch(format!(
                "{m} inertias, {} dampings, {}x{} stiffness",
                damping.len(),
                stiffness.nrows(),
                stiffness.ncols()
            )));
        }
        if inertia.iter().chain(&damping).chain(stiffness.iter()).any(|v| !v.is_finite()) {
            return Err(ModalError::non_finite("swing parameters"));
        }
        if let Some((machine, &value)) = inertia.iter().enumerate().find(|(_, &v)| v <= 0.0) {
            return Err(ModalError::SingularM { machine, value });
        }
        if let Some((i, d)) = damping.iter().enumerate().find(|(_, &v)| v < 0.0) {
            return Err(ModalError::InvalidInput(format!("damping of machine {i} is negative ({d})")));
        }
        Ok(Self {
            inertia: DVector::from_vec(inertia),
            damping: DVector::from_vec(damping),
            stiffness,
        })
    }

    pub fn machines(&self) -> usize {
        self.inertia.len()
    }

    pub fn inertia(&self) -> &DVector<f64> {
        &self.inertia
    }

    pub fn damping(&self) -> &DVector<f64> {
        &self.damping
    }

    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.stiffness
    }

    pub fn from_file(file: &SwingFile) -> Result<Self> {
        let k = matrix_from_rows(&file.k, "K")?;
        Self::new(file.m.clone(), file.d.clone(), k)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SwingFile = serde_json::from_str(text)
            .map_err(|e| ModalError::InvalidInput(format!("swing file: {e}")))?;
        Self::from_file(&file)
    }
}

/// Builds the `2m`-state model with states `[δ, ω]`:
///
/// ```text
/// A = [[0, I], [-M⁻¹K, -M⁻¹D]],   P = blockdiag((K + Kᵀ)/2, M)
/// ```
///
/// An asymmetric `K` (lossy network) only contributes its symmetric part to
/// `P`. If that part is not positive definite the model is flagged.
pub fn build_swing_system(params: &SwingParams) -> StateSpaceModel {
    let m = params.machines();
    let n = 2 * m;
    let mut a = DMatrix::zeros(n, n);
    let mut p = DMatrix::zeros(n, n);
    let k_sym = (&params.stiffness + params.stiffness.transpose()) * 0.5;
    for i in 0..m {
        let inv_m = 1.0 / params.inertia[i];
        a[(i, m + i)] = 1.0;
        for j in 0..m {
            a[(m + i, j)] = -inv_m * params.stiffness[(i, j)];
            p[(i, j)] = k_sym[(i, j)];
        }
        a[(m + i, m + i)] = -inv_m * params.damping[i];
        p[(m + i, m + i)] = params.inertia[i];
    }
    let labels = (1..=m)
        .map(|i| format!("delta_{i}"))
        .chain((1..=m).map(|i| format!("omega_{i}")))
        .collect();
    // Parameters are finite and the shapes are consistent by construction.
    StateSpaceModel::new(a, Some(p), Some(labels)).expect("swing model is well formed")
}

/// A step change of the state applied at the disturbance instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Disturbance {
    x0: DVector<f64>,
}

impl Disturbance {
    pub fn new(x0: DVector<f64>) -> Result<Self> {
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(ModalError::non_finite("disturbance x0"));
        }
        Ok(Self { x0 })
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.x0
    }

    /// A zero step produces identically zero energy traces.
    pub fn is_trivial(&self) -> bool {
        self.x0.iter().all(|&v| v == 0.0)
    }
}

/// On-disk model: `{"n": int, "A": [[real]], "P": [[real]] | null, "labels": [string] | null}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "P", default)]
    pub p: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

/// On-disk swing parameters: `{"M": [real], "D": [real], "K": [[real]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwingFile {
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
    #[serde(rename = "K")]
    pub k: Vec<Vec<f64>>,
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(ModalError::DimensionMismatch(format!(
            "row {bad} of {name} has {} entries, expected {ncols}",
            rows[bad].len()
        )));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub(crate) fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn report(p: DMatrix<f64>) -> ValidationReport {
        let a = DMatrix::zeros(p.nrows(), p.nrows());
        validate_parts(&a, Some(&p), 1e-9).unwrap()
    }

    #[test]
    fn identity_weight_passes() {
        let m = StateSpaceModel::new(dmatrix![0.0, 1.0; -1.0, 0.0], Some(DMatrix::identity(2, 2)), None).unwrap();
        let r = m.validate(1e-9).unwrap();
        assert!(r.passed);
        assert_eq!(r.symmetry_defect, 0.0);
        assert_eq!(r.min_eigenvalue, Some(1.0));
        assert!(!m.p_flagged());
    }

    #[test]
    fn asymmetric_weight_fails() {
        let r = report(dmatrix![1.0, 2.0; 0.0, 1.0]);
        assert!(!r.passed);
        assert!((r.symmetry_defect - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn indefinite_weight_fails() {
        let r = report(dmatrix![1.0, 0.0; 0.0, -1.0]);
        assert!(!r.passed);
        assert!((r.min_eigenvalue.unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_entries_are_errors() {
        let err = StateSpaceModel::from_state_matrix(dmatrix![f64::NAN, 0.0; 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, ModalError::NonFinite { .. }));
        let err = StateSpaceModel::new(DMatrix::identity(2, 2), Some(dmatrix![1.0, 0.0; 0.0, f64::INFINITY]), None)
            .unwrap_err();
        assert!(matches!(err, ModalError::NonFinite { .. }));
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            StateSpaceModel::from_state_matrix(DMatrix::zeros(2, 3)),
            Err(ModalError::DimensionMismatch(_))
        ));
        assert!(matches!(
            StateSpaceModel::new(DMatrix::zeros(2, 2), Some(DMatrix::identity(3, 3)), None),
            Err(ModalError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn unit_single_machine() {
        let params = SwingParams::new(vec![1.0], vec![0.0], dmatrix![1.0]).unwrap();
        let model = build_swing_system(&params);
        assert_eq!(model.a(), &dmatrix![0.0, 1.0; -1.0, 0.0]);
        assert_eq!(model.p().unwrap(), &DMatrix::<f64>::identity(2, 2));
        assert_eq!(model.labels().unwrap(), ["delta_1", "omega_1"]);
    }

    #[test]
    fn two_machine_lower_left_block() {
        let params = SwingParams::new(vec![1.0, 2.0], vec![0.0, 0.0], dmatrix![2.0, -1.0; -1.0, 2.0]).unwrap();
        let model = build_swing_system(&params);
        let block = model.a().view((2, 0), (2, 2)).into_owned();
        assert_eq!(block, dmatrix![-2.0, 1.0; 0.5, -1.0]);
        assert!(!model.p_flagged());
    }

    #[test]
    fn damped_single_machine() {
        let params = SwingParams::new(vec![1.0], vec![1.0], dmatrix![1.0]).unwrap();
        assert_eq!(build_swing_system(&params).a(), &dmatrix![0.0, 1.0; -1.0, -1.0]);
    }

    #[test]
    fn asymmetric_stiffness_uses_symmetric_part() {
        let params = SwingParams::new(vec![1.0, 1.0], vec![0.1, 0.1], dmatrix![2.0, -1.5; -0.5, 2.0]).unwrap();
        let model = build_swing_system(&params);
        let p = model.p().unwrap();
        assert_eq!(p[(0, 1)], -1.0);
        assert_eq!(p[(1, 0)], -1.0);
        assert!(!model.p_flagged());
    }

    #[test]
    fn indefinite_stiffness_is_flagged() {
        let params = SwingParams::new(vec![1.0, 1.0], vec![0.0, 0.0], dmatrix![1.0, -1.0; -1.0, 1.0]).unwrap();
        assert!(build_swing_system(&params).p_flagged());
    }

    #[test]
    fn swing_parameter_errors() {
        assert!(matches!(
            SwingParams::new(vec![1.0, 0.0], vec![0.0, 0.0], DMatrix::identity(2, 2)),
            Err(ModalError::SingularM { machine: 1, .. })
        ));
        assert!(matches!(
            SwingParams::new(vec![1.0], vec![-0.1], dmatrix![1.0]),
            Err(ModalError::InvalidInput(_))
        ));
        assert!(matches!(
            SwingParams::new(vec![1.0], vec![0.0, 0.0], dmatrix![1.0]),
            Err(ModalError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn model_file_round_trip() {
        let text = r#"{"n": 2, "A": [[0, 1], [-1, -1]], "P": null, "labels": ["a", "b"]}"#;
        let model = StateSpaceModel::from_json(text).unwrap();
        assert_eq!(model.a(), &dmatrix![0.0, 1.0; -1.0, -1.0]);
        assert!(model.p().is_none());
        let again = StateSpaceModel::from_file(&model.to_file()).unwrap();
        assert_eq!(again, model);
    }

    #[test]
    fn model_file_rejects_bad_documents() {
        assert!(StateSpaceModel::from_json(r#"{"n": 3, "A": [[0, 1], [-1, -1]]}"#).is_err());
        assert!(StateSpaceModel::from_json(r#"{"n": 2, "A": [[0, 1], [-1]]}"#).is_err());
        assert!(StateSpaceModel::from_json(r#"{"n": 1, "A": [[0]], "extra": 1}"#).is_err());
    }

    #[test]
    fn disturbance_rejects_nan() {
        assert!(Disturbance::new(DVector::from_vec(vec![1.0, f64::NAN])).is_err());
        assert!(Disturbance::new(DVector::zeros(3)).unwrap().is_trivial());
    }
}

//! Total and modal energy/power of a linear system `dx/dt = A x`.
//!
//! Stored energy is `V(x) = ½ xᵀ P x` and its rate along the flow is
//! `dV/dt = xᵀ P A x`. Four decompositions of these totals into modal
//! contributions are provided, each in a normalized (`P = I`) and a
//! physical (system `P`) variant:
//!
//! | method        | modal energy            | modal power              |
//! |---------------|-------------------------|--------------------------|
//! | moving frame  | `½ xᵀ P x` (shared)     | `ψᵢᵀ P ẋ`                |
//! | eigenvector   | `½ xᵀ P vᵢ uᵢᵀ x`       | `xᵀ P vᵢ uᵢᵀ ẋ`          |
//! | Hermitian PF  | `½ zᵢᴴ P zᵢ`            | `zᵢᴴ P żᵢ`               |
//! | transpose PF  | `½ zᵢᵀ P zᵢ`            | `zᵢᵀ P żᵢ`               |
//!
//! with `zᵢ = vᵢ uᵢᵀ x`. Powers are always evaluated from `ẋ = A x`, never
//! from the eigenvalues, so `sᵢ = 2 λᵢ eᵢ` is a checkable identity.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{ModalError, Result};
use crate::linalg::{complexify, compensated_sum, compensated_sum_real, dot_t, quad_form, C64};
use crate::model::{validate_parts, StateSpaceModel, DEFAULT_VALIDATION_TOL};
use crate::spectral::{EigenBasis, ModeGroup};

/// Threshold on `‖x‖_P` below which the moving frame is undefined.
pub const FRAME_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MethodKind {
    #[serde(rename = "moving")]
    MovingFrame,
    #[serde(rename = "eigvec")]
    Eigenvector,
    #[serde(rename = "hermitian")]
    HermitianPF,
    #[serde(rename = "transpose")]
    TransposePF,
}

impl MethodKind {
    pub const ALL: [MethodKind; 4] =
        [MethodKind::MovingFrame, MethodKind::Eigenvector, MethodKind::HermitianPF, MethodKind::TransposePF];

    /// Short name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            MethodKind::MovingFrame => "moving",
            MethodKind::Eigenvector => "eigvec",
            MethodKind::HermitianPF => "hermitian",
            MethodKind::TransposePF => "transpose",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = ModalError;

    fn from_str(s: &str) -> Result<Self> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| ModalError::InvalidInput(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyKind {
    Normalized,
    Physical,
}

impl EnergyKind {
    pub fn name(self) -> &'static str {
        match self {
            EnergyKind::Normalized => "normalized",
            EnergyKind::Physical => "physical",
        }
    }
}

impl fmt::Display for EnergyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnergyKind {
    type Err = ModalError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(EnergyKind::Normalized),
            "physical" => Ok(EnergyKind::Physical),
            _ => Err(ModalError::InvalidInput(format!("unknown energy kind '{s}'"))),
        }
    }
}

/// The matrix `P` of the quadratic energy, already checked to be SPD.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyWeight {
    kind: EnergyKind,
    p: DMatrix<f64>,
}

impl EnergyWeight {
    pub fn normalized(n: usize) -> Self {
        Self { kind: EnergyKind::Normalized, p: DMatrix::identity(n, n) }
    }

    pub fn physical(p: DMatrix<f64>) -> Result<Self> {
        if !p.is_square() {
            return Err(ModalError::DimensionMismatch(format!("P is {}x{}", p.nrows(), p.ncols())));
        }
        let report = validate_parts(&DMatrix::zeros(1, 1), Some(&p), DEFAULT_VALIDATION_TOL)?;
        if !report.passed {
            return Err(ModalError::RefusedIndefiniteP);
        }
        Ok(Self { kind: EnergyKind::Physical, p })
    }

    /// Weight for `model`. A physical request on a model without `P` falls
    /// back to the normalized weight; a flagged `P` is refused.
    pub fn for_model(model: &StateSpaceModel, kind: EnergyKind) -> Result<Self> {
        match (kind, model.p()) {
            (EnergyKind::Normalized, _) | (EnergyKind::Physical, None) => Ok(Self::normalized(model.dim())),
            (EnergyKind::Physical, Some(_)) if model.p_flagged() => Err(ModalError::RefusedIndefiniteP),
            (EnergyKind::Physical, Some(p)) => Self::physical(p.clone()),
        }
    }

    pub fn kind(&self) -> EnergyKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    fn check(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(ModalError::DimensionMismatch(format!(
                "state has {} entries, weight is {}x{}",
                x.len(),
                self.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// `V(x) = ½ xᵀ P x`.
pub fn total_energy(x: &DVector<f64>, weight: &EnergyWeight) -> Result<f64> {
    weight.check(x)?;
    Ok(0.5 * quad_form(x, &weight.p, x))
}

/// `dV/dt = xᵀ P A x`.
pub fn total_power(x: &DVector<f64>, a: &DMatrix<f64>, weight: &EnergyWeight) -> Result<f64> {
    weight.check(x)?;
    check_square(a, x.len())?;
    Ok(quad_form(x, &weight.p, &(a * x)))
}

fn check_square(a: &DMatrix<f64>, n: usize) -> Result<()> {
    if a.nrows() != n || a.ncols() != n {
        return Err(ModalError::DimensionMismatch(format!("A is {}x{}, state has {n} entries", a.nrows(), a.ncols())));
    }
    Ok(())
}

/// Per-mode amplitudes `uᵢᵀ y` for every mode.
fn amplitudes(basis: &EigenBasis, y: &DVector<f64>) -> DVector<C64> {
    basis.left().tr_mul(&complexify(y))
}

fn real_hermitian_form(v: &DVector<C64>, p: &DMatrix<f64>) -> f64 {
    // vᴴ P v is real for symmetric P; only the real part is accumulated.
    let pv = p.map(|x| C64::new(x, 0.0)) * v;
    compensated_sum_real(v.iter().zip(pv.iter()).map(|(a, b)| (a.conj() * b).re))
}

fn transpose_form(v: &DVector<C64>, p: &DMatrix<f64>) -> C64 {
    let pv = p.map(|x| C64::new(x, 0.0)) * v;
    dot_t(v, &pv)
}

/// Per-mode modal energy for `method`.
///
/// The moving-frame method has one shared energy `½ xᵀ P x`, replicated in
/// every entry.
pub fn modal_energy(
    method: MethodKind,
    basis: &EigenBasis,
    x: &DVector<f64>,
    weight: &EnergyWeight,
) -> Result<DVector<C64>> {
    basis.check_state(x)?;
    weight.check(x)?;
    let n = basis.len();
    let p = &weight.p;
    let half = C64::new(0.5, 0.0);
    let out = match method {
        MethodKind::MovingFrame => {
            let e = total_energy(x, weight)?;
            DVector::from_element(n, C64::new(e, 0.0))
        }
        MethodKind::Eigenvector => {
            let a = amplitudes(basis, x);
            let px = complexify(&(p.transpose() * x));
            DVector::from_fn(n, |i, _| half * dot_t(&px, &basis.right_vector(i)) * a[i])
        }
        MethodKind::HermitianPF => {
            let a = amplitudes(basis, x);
            DVector::from_fn(n, |i, _| {
                C64::new(0.5 * a[i].norm_sqr() * real_hermitian_form(&basis.right_vector(i), p), 0.0)
            })
        }
        MethodKind::TransposePF => {
            let a = amplitudes(basis, x);
            DVector::from_fn(n, |i, _| half * a[i] * a[i] * transpose_form(&basis.right_vector(i), p))
        }
    };
    Ok(out)
}

/// Per-mode modal power for `method`, evaluated with `ẋ = A x`.
pub fn modal_power(
    method: MethodKind,
    basis: &EigenBasis,
    x: &DVector<f64>,
    a: &DMatrix<f64>,
    weight: &EnergyWeight,
) -> Result<DVector<C64>> {
    basis.check_state(x)?;
    weight.check(x)?;
    check_square(a, x.len())?;
    let n = basis.len();
    let p = &weight.p;
    let xdot = a * x;
    let out = match method {
        MethodKind::MovingFrame => {
            let frame = moving_frame(x, a, weight, FRAME_TOL)?;
            let pxdot = p * &xdot;
            DVector::from_fn(n, |i, _| {
                C64::new(compensated_sum_real(frame.column(i).iter().zip(pxdot.iter()).map(|(s, t)| s * t)), 0.0)
            })
        }
        MethodKind::Eigenvector => {
            let b = amplitudes(basis, &xdot);
            let px = complexify(&(p.transpose() * x));
            DVector::from_fn(n, |i, _| dot_t(&px, &basis.right_vector(i)) * b[i])
        }
        MethodKind::HermitianPF => {
            let a_x = amplitudes(basis, x);
            let b = amplitudes(basis, &xdot);
            DVector::from_fn(n, |i, _| {
                a_x[i].conj() * b[i] * C64::new(real_hermitian_form(&basis.right_vector(i), p), 0.0)
            })
        }
        MethodKind::TransposePF => {
            let a_x = amplitudes(basis, x);
            let b = amplitudes(basis, &xdot);
            DVector::from_fn(n, |i, _| a_x[i] * b[i] * transpose_form(&basis.right_vector(i), p))
        }
    };
    Ok(out)
}

/// `P`-orthonormal frame anchored at the state.
///
/// `ψ₁ = x / ‖x‖_P`; later vectors come from Gram–Schmidt (two passes, `P`
/// inner product) over the Krylov sequence `A ψ₁, A ψ₂, …`. When the Krylov
/// space closes, the remaining directions are taken from the coordinate
/// axes. Every vector after the first has its largest-magnitude entry
/// positive. Columns of the result are `ψ₁ … ψₙ`.
pub fn moving_frame(x: &DVector<f64>, a: &DMatrix<f64>, weight: &EnergyWeight, tol: f64) -> Result<DMatrix<f64>> {
    weight.check(x)?;
    check_square(a, x.len())?;
    let n = x.len();
    let p = &weight.p;
    let norm = quad_form(x, p, x).max(0.0).sqrt();
    if !(norm > tol) {
        return Err(ModalError::NearZeroState { norm });
    }
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(n);
    frame.push(x / norm);

    let p_norm = |v: &DVector<f64>| quad_form(v, p, v).max(0.0).sqrt();
    let orthogonalize = |frame: &[DVector<f64>], mut w: DVector<f64>| {
        for _ in 0..2 {
            for psi in frame {
                let c = quad_form(psi, p, &w);
                w.axpy(-c, psi, 1.0);
            }
        }
        w
    };
    const ACCEPT: f64 = 1e-10;

    let mut krylov_open = true;
    let mut axis = 0;
    while frame.len() < n {
        let candidate = if krylov_open {
            a * frame.last().expect("frame is non-empty")
        } else {
            let mut e = DVector::zeros(n);
            e[axis] = 1.0;
            axis += 1;
            e
        };
        let scale = p_norm(&candidate);
        let w = orthogonalize(&frame, candidate);
        let w_norm = p_norm(&w);
        if scale > 0.0 && w_norm > ACCEPT * scale {
            let mut psi = w / w_norm;
            let lead = psi.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            if lead < 0.0 {
                psi.neg_mut();
            }
            frame.push(psi);
        } else if krylov_open {
            krylov_open = false;
        } else if axis >= n {
            return Err(ModalError::Numerical("could not complete the moving frame".into()));
        }
    }
    Ok(DMatrix::from_columns(&frame))
}

/// Cross energy matrix `Eᵢⱼ = ½ zᵢᴴ P zⱼ`.
///
/// The diagonal holds the Hermitian PF modal energies; the full sum is
/// `V(x)`; the off-diagonal sum is the energy those modal energies miss.
pub fn cross_energy(basis: &EigenBasis, x: &DVector<f64>, weight: &EnergyWeight) -> Result<DMatrix<C64>> {
    basis.check_state(x)?;
    weight.check(x)?;
    let z = basis.modal_projections(x)?;
    let pc = weight.p.map(|v| C64::new(v, 0.0));
    Ok((z.adjoint() * pc * &z) * C64::new(0.5, 0.0))
}

/// Sum of the off-diagonal entries of a cross-energy matrix.
pub fn off_diagonal_sum(cross: &DMatrix<C64>) -> C64 {
    let n = cross.nrows();
    compensated_sum((0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|ij| cross[ij]))
}

/// `A♯ = P⁻¹ Aᵀ P`, the adjoint of `A` in the `P` inner product
/// (`Aᵀ` when `p` is `None`).
pub fn sharp_adjoint(a: &DMatrix<f64>, p: Option<&DMatrix<f64>>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(ModalError::DimensionMismatch(format!("A is {}x{}", a.nrows(), a.ncols())));
    }
    let Some(p) = p else {
        return Ok(a.transpose());
    };
    if p.nrows() != a.nrows() || p.ncols() != a.ncols() {
        return Err(ModalError::DimensionMismatch(format!(
            "P is {}x{}, A is {}x{}",
            p.nrows(),
            p.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    let chol = p.clone().cholesky().ok_or(ModalError::SingularP)?;
    Ok(chol.solve(&(a.transpose() * p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normality {
    /// `1 / (1 + ‖A♯A − AA♯‖_F / ‖A‖_F²)`; equals one for a normal matrix.
    pub index: f64,
    /// `‖A♯A − AA♯‖_F`
    pub commutator_norm: f64,
}

/// Departure of `A` from normality in the `P` inner product.
pub fn normality(a: &DMatrix<f64>, p: Option<&DMatrix<f64>>) -> Result<Normality> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(ModalError::non_finite("state matrix A"));
    }
    let a_norm2 = a.norm_squared();
    if a_norm2 == 0.0 {
        return Err(ModalError::ZeroMatrix);
    }
    let sharp = sharp_adjoint(a, p)?;
    let commutator_norm = (&sharp * a - a * &sharp).norm();
    Ok(Normality { index: 1.0 / (1.0 + commutator_norm / a_norm2), commutator_norm })
}

pub fn normality_index(a: &DMatrix<f64>, p: Option<&DMatrix<f64>>) -> Result<f64> {
    normality(a, p).map(|n| n.index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumError {
    /// `100 |Re Σ eᵢ − V(x)| / V(x)`
    pub percent: f64,
    /// `Im Σ eᵢ`, reported separately.
    pub imag_residue: f64,
}

/// Relative mismatch between the summed modal energies and `V(x)`.
pub fn sum_error_pct(
    method: MethodKind,
    basis: &EigenBasis,
    x: &DVector<f64>,
    weight: &EnergyWeight,
) -> Result<SumError> {
    let total = total_energy(x, weight)?;
    if !(total > 0.0) {
        return Err(ModalError::NearZeroState { norm: (2.0 * total.max(0.0)).sqrt() });
    }
    let sum = energy_sum(method, &modal_energy(method, basis, x, weight)?, total);
    Ok(SumError { percent: 100.0 * (sum.re - total).abs() / total, imag_residue: sum.im })
}

fn energy_sum(method: MethodKind, energies: &DVector<C64>, total: f64) -> C64 {
    match method {
        MethodKind::MovingFrame => C64::new(total, 0.0),
        _ => compensated_sum(energies.iter().copied()),
    }
}

/// Everything one method says about one state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub method: MethodKind,
    pub kind: EnergyKind,
    pub per_mode_energy: Vec<C64>,
    pub per_mode_power: Vec<C64>,
    /// `Σ eᵢ`; the shared energy itself for the moving frame.
    pub energy_sum: C64,
    /// `Σ sᵢ`; for the moving frame the active power `xᵀ P ẋ`.
    pub power_sum: C64,
    pub total_energy: f64,
    pub total_power: f64,
    /// `V(x) − Σ eᵢ`; for Hermitian PF the off-diagonal cross energy.
    pub missing_energy: C64,
    /// `|sᵢ − 2 λᵢ eᵢ|`
    pub mapping_residuals: Vec<f64>,
    /// `None` when `V(x) = 0`.
    pub sum_error_pct: Option<f64>,
}

/// Energy report of `method` at state `x`.
///
/// At `x = 0` every energy and power is zero (the moving frame is not built).
pub fn energy_report(
    method: MethodKind,
    basis: &EigenBasis,
    x: &DVector<f64>,
    a: &DMatrix<f64>,
    weight: &EnergyWeight,
) -> Result<EnergyReport> {
    let n = basis.len();
    let total_energy = total_energy(x, weight)?;
    let total_power = total_power(x, a, weight)?;
    let zero = C64::new(0.0, 0.0);
    let energies = modal_energy(method, basis, x, weight)?;
    let powers = if method == MethodKind::MovingFrame && x.iter().all(|&v| v == 0.0) {
        DVector::from_element(n, zero)
    } else {
        modal_power(method, basis, x, a, weight)?
    };
    let energy_sum = energy_sum(method, &energies, total_energy);
    let power_sum = match method {
        MethodKind::MovingFrame => C64::new(total_power, 0.0),
        _ => compensated_sum(powers.iter().copied()),
    };
    let missing_energy = match method {
        MethodKind::HermitianPF => off_diagonal_sum(&cross_energy(basis, x, weight)?),
        _ => C64::new(total_energy, 0.0) - energy_sum,
    };
    let mapping_residuals =
        (0..n).map(|i| (powers[i] - C64::new(2.0, 0.0) * basis.lambda(i) * energies[i]).norm()).collect();
    let sum_error_pct =
        (total_energy > 0.0).then(|| 100.0 * (energy_sum.re - total_energy).abs() / total_energy);
    Ok(EnergyReport {
        method,
        kind: weight.kind(),
        per_mode_energy: energies.iter().copied().collect(),
        per_mode_power: powers.iter().copied().collect(),
        energy_sum,
        power_sum,
        total_energy,
        total_power,
        missing_energy,
        mapping_residuals,
        sum_error_pct,
    })
}

/// Values of one real mode or one conjugate pair summed together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedEntry {
    pub group: ModeGroup,
    pub lambda: C64,
    pub energy: C64,
    pub power: C64,
}

impl EnergyReport {
    /// Conjugate partners summed, in the basis' group order. The `lambda`
    /// of a pair is the member with positive imaginary part.
    pub fn paired(&self, basis: &EigenBasis) -> Vec<PairedEntry> {
        basis
            .groups()
            .iter()
            .map(|&group| match group {
                ModeGroup::Real(i) => PairedEntry {
                    group,
                    lambda: basis.lambda(i),
                    energy: self.per_mode_energy[i],
                    power: self.per_mode_power[i],
                },
                ModeGroup::Pair(i, j) => PairedEntry {
                    group,
                    lambda: basis.lambda(i),
                    energy: self.per_mode_energy[i] + self.per_mode_energy[j],
                    power: self.per_mode_power[i] + self.per_mode_power[j],
                },
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{decompose, DEFAULT_TOL};
    use nalgebra::dmatrix;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn oscillator() -> (DMatrix<f64>, EigenBasis) {
        let a = dmatrix![0.0, 1.0; -1.0, 0.0];
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        (a, basis)
    }

    fn damped() -> (DMatrix<f64>, EigenBasis) {
        let a = dmatrix![0.0, 1.0; -1.0, -1.0];
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        (a, basis)
    }

    fn x10() -> DVector<f64> {
        DVector::from_vec(vec![1.0, 0.0])
    }

    #[test]
    fn total_energy_examples() {
        let eye = EnergyWeight::normalized(2);
        assert_eq!(total_energy(&x10(), &eye).unwrap(), 0.5);
        assert_eq!(total_energy(&DVector::zeros(2), &eye).unwrap(), 0.0);
        let w = EnergyWeight::physical(dmatrix![2.0, 0.0; 0.0, 3.0]).unwrap();
        assert_eq!(total_energy(&DVector::from_vec(vec![1.0, 1.0]), &w).unwrap(), 2.5);
        assert!(total_energy(&DVector::zeros(3), &eye).is_err());
    }

    #[test]
    fn total_power_examples() {
        let eye = EnergyWeight::normalized(2);
        let (a, _) = oscillator();
        assert_eq!(total_power(&x10(), &a, &eye).unwrap(), 0.0);
        let (a, _) = damped();
        // xᵀAx with x = [0, 1] picks A[1][1] = −1.
        assert_eq!(total_power(&DVector::from_vec(vec![0.0, 1.0]), &a, &eye).unwrap(), -1.0);
        assert_eq!(total_power(&DVector::zeros(2), &a, &eye).unwrap(), 0.0);
    }

    #[test]
    fn oscillator_modal_energies() {
        // z = [0.5, 0.5j] for λ = +j and its conjugate for λ = −j.
        let (_, basis) = oscillator();
        let eye = EnergyWeight::normalized(2);
        let herm = modal_energy(MethodKind::HermitianPF, &basis, &x10(), &eye).unwrap();
        assert!(close(herm[0], c(0.25, 0.0), 1e-15) && close(herm[1], c(0.25, 0.0), 1e-15));
        let tr = modal_energy(MethodKind::TransposePF, &basis, &x10(), &eye).unwrap();
        assert!(close(tr[0], c(0.0, 0.0), 1e-15) && close(tr[1], c(0.0, 0.0), 1e-15));
        let ev = modal_energy(MethodKind::Eigenvector, &basis, &x10(), &eye).unwrap();
        assert!(close(ev[0], c(0.25, 0.0), 1e-15) && close(ev[1], c(0.25, 0.0), 1e-15));
        assert!(close(ev[0] + ev[1], c(0.5, 0.0), 1e-15));
        let mf = modal_energy(MethodKind::MovingFrame, &basis, &x10(), &eye).unwrap();
        assert_eq!(mf.as_slice(), &[c(0.5, 0.0), c(0.5, 0.0)]);
    }

    #[test]
    fn damped_hermitian_shortfall() {
        // λ = (−1 + j√3)/2, v = [1, λ], u = [1, −λ]/(1 − λ²) ⇒ eᵢ = 1/3 each.
        let (_, basis) = damped();
        let eye = EnergyWeight::normalized(2);
        let herm = modal_energy(MethodKind::HermitianPF, &basis, &x10(), &eye).unwrap();
        assert!(close(herm[0], c(1.0 / 3.0, 0.0), 1e-14), "{herm}");
        assert!(close(herm[1], c(1.0 / 3.0, 0.0), 1e-14));
        let err = sum_error_pct(MethodKind::HermitianPF, &basis, &x10(), &eye).unwrap();
        assert!((err.percent - 100.0 / 3.0).abs() < 1e-10, "{err:?}");
        assert_eq!(err.imag_residue, 0.0);
    }

    #[test]
    fn oscillator_hermitian_power() {
        // ż = j z, so s = zᴴ ż = j |z|² = 0.5j = 2 · j · 0.25.
        let (a, basis) = oscillator();
        let eye = EnergyWeight::normalized(2);
        let s = modal_power(MethodKind::HermitianPF, &basis, &x10(), &a, &eye).unwrap();
        assert!(close(s[0], c(0.0, 0.5), 1e-15), "{s}");
    }

    #[test]
    fn zero_mode_has_zero_power() {
        let a = dmatrix![0.0, 1.0; 0.0, -1.0];
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        let zero_mode = (0..2).find(|&i| basis.lambda(i).norm() == 0.0).expect("exact zero eigenvalue");
        let eye = EnergyWeight::normalized(2);
        let x = DVector::from_vec(vec![0.7, -1.3]);
        for method in [MethodKind::Eigenvector, MethodKind::HermitianPF, MethodKind::TransposePF] {
            let s = modal_power(method, &basis, &x, &a, &eye).unwrap();
            assert!(s[zero_mode].norm() <= 1e-15, "{method}: {}", s[zero_mode]);
        }
    }

    #[test]
    fn eigenvector_mapping_identity() {
        let a = dmatrix![0.2, 1.0, -0.3; -2.0, -0.5, 0.1; 0.4, 0.0, -1.2];
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        let w = EnergyWeight::physical(dmatrix![2.0, 0.3, 0.0; 0.3, 1.0, 0.1; 0.0, 0.1, 0.5]).unwrap();
        let x = DVector::from_vec(vec![0.3, -0.8, 1.1]);
        let r = energy_report(MethodKind::Eigenvector, &basis, &x, &a, &w).unwrap();
        assert!(r.mapping_residuals.iter().all(|&v| v < 1e-12), "{:?}", r.mapping_residuals);
        assert!((r.energy_sum.re - r.total_energy).abs() < 1e-12);
        assert!(r.energy_sum.im.abs() < 1e-15);
        assert!((r.power_sum.re - r.total_power).abs() < 1e-12);
    }

    #[test]
    fn moving_frame_by_hand() {
        // Gram–Schmidt on {x, Ax} = {[1, 0], [0, −1]}; sign fixed positive.
        let (a, _) = oscillator();
        let eye = EnergyWeight::normalized(2);
        let frame = moving_frame(&x10(), &a, &eye, FRAME_TOL).unwrap();
        assert_eq!(frame, dmatrix![1.0, 0.0; 0.0, 1.0]);
    }

    #[test]
    fn moving_frame_is_p_orthonormal() {
        let a = dmatrix![0.0, 1.0, 0.0, 0.0; -2.0, -0.3, 1.0, 0.0; 0.0, 0.0, 0.0, 1.0; 1.0, 0.0, -3.0, -0.2];
        let w = EnergyWeight::physical(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 3.0, 0.5]))).unwrap();
        // x in an invariant subspace forces the coordinate-axis fill.
        for x in [vec![0.3, -0.2, 0.5, 1.0], vec![1.0, 0.0, 0.0, 0.0]] {
            let x = DVector::from_vec(x);
            let frame = moving_frame(&x, &a, &w, FRAME_TOL).unwrap();
            let gram = frame.transpose() * w.matrix() * &frame;
            assert!((gram - DMatrix::<f64>::identity(4, 4)).norm() < 1e-10);
            let first: DVector<f64> = frame.column(0).into_owned();
            let norm = total_energy(&x, &w).unwrap().mul_add(2.0, 0.0).sqrt();
            let active = norm * quad_form(&first, w.matrix(), &(&a * &x));
            assert!((active - total_power(&x, &a, &w).unwrap()).abs() < 1e-12);
        }
        let eye = EnergyWeight::normalized(2);
        let frame = moving_frame(&DVector::from_vec(vec![1.0, 0.0]), &DMatrix::zeros(2, 2), &eye, FRAME_TOL).unwrap();
        assert_eq!(frame, DMatrix::<f64>::identity(2, 2));
    }

    #[test]
    fn moving_frame_rejects_zero_state() {
        let (a, _) = oscillator();
        let err = moving_frame(&DVector::zeros(2), &a, &EnergyWeight::normalized(2), FRAME_TOL).unwrap_err();
        assert!(matches!(err, ModalError::NearZeroState { .. }));
    }

    #[test]
    fn cross_energy_examples() {
        let eye = EnergyWeight::normalized(2);
        let (_, basis) = oscillator();
        let cross = cross_energy(&basis, &x10(), &eye).unwrap();
        assert!(off_diagonal_sum(&cross).norm() < 1e-15);

        let (_, basis) = damped();
        let cross = cross_energy(&basis, &x10(), &eye).unwrap();
        assert!(close(off_diagonal_sum(&cross), c(-1.0 / 6.0, 0.0), 1e-14));
        assert!(close(cross.trace(), c(2.0 / 3.0, 0.0), 1e-14));
        assert!(close(cross.sum(), c(0.5, 0.0), 1e-14));

        let zero = cross_energy(&basis, &DVector::zeros(2), &eye).unwrap();
        assert!(zero.iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn sharp_adjoint_examples() {
        let a = dmatrix![0.3, -1.0; 2.0, 0.5];
        assert_eq!(sharp_adjoint(&a, None).unwrap(), a.transpose());
        assert_eq!(sharp_adjoint(&a, Some(&DMatrix::identity(2, 2))).unwrap(), a.transpose());

        // Lossless two-machine swing system: A♯ = [[0, −I], [M⁻¹K, 0]].
        let k = dmatrix![2.0, -1.0; -1.0, 2.0];
        let m_inv = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.5]));
        let mut a = DMatrix::zeros(4, 4);
        a.view_mut((0, 2), (2, 2)).fill_with_identity();
        a.view_mut((2, 0), (2, 2)).copy_from(&(-(&m_inv * &k)));
        let mut p = DMatrix::zeros(4, 4);
        p.view_mut((0, 0), (2, 2)).copy_from(&k);
        p.view_mut((2, 2), (2, 2)).copy_from(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])));
        let mut expected = DMatrix::zeros(4, 4);
        expected.view_mut((0, 2), (2, 2)).copy_from(&-DMatrix::<f64>::identity(2, 2));
        expected.view_mut((2, 0), (2, 2)).copy_from(&(&m_inv * &k));
        let sharp = sharp_adjoint(&a, Some(&p)).unwrap();
        assert!((&sharp - &expected).norm() < 1e-14, "{sharp}");
        let back = sharp_adjoint(&sharp, Some(&p)).unwrap();
        assert!((back - a).norm() < 1e-14);
    }

    #[test]
    fn sharp_adjoint_rejects_singular_weight() {
        let a = dmatrix![0.0, 1.0; -1.0, 0.0];
        assert_eq!(sharp_adjoint(&a, Some(&dmatrix![1.0, 0.0; 0.0, 0.0])), Err(ModalError::SingularP));
    }

    #[test]
    fn normality_examples() {
        let sym = dmatrix![1.0, 2.0; 2.0, -3.0];
        assert_eq!(normality_index(&sym, None).unwrap(), 1.0);
        let skew = dmatrix![0.0, 2.0; -2.0, 0.0];
        assert_eq!(normality_index(&skew, None).unwrap(), 1.0);
        // [A, Aᵀ] = [[0, −2], [−2, 0]]: ‖C‖_F = 2√2 and ‖A‖_F² = 3.
        let (a, _) = damped();
        let nrm = normality(&a, None).unwrap();
        assert!((nrm.commutator_norm - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((nrm.index - 1.0 / (1.0 + 2.0 * 2f64.sqrt() / 3.0)).abs() < 1e-15);
        assert_eq!(normality_index(&DMatrix::zeros(2, 2), None), Err(ModalError::ZeroMatrix));
    }

    #[test]
    fn sum_error_requires_energy() {
        let (_, basis) = oscillator();
        let err = sum_error_pct(MethodKind::Eigenvector, &basis, &DVector::zeros(2), &EnergyWeight::normalized(2));
        assert!(matches!(err, Err(ModalError::NearZeroState { .. })));
    }

    #[test]
    fn physical_weight_validation() {
        assert_eq!(EnergyWeight::physical(dmatrix![1.0, 0.0; 0.0, -1.0]), Err(ModalError::RefusedIndefiniteP));
        let flagged = StateSpaceModel::new(DMatrix::zeros(2, 2), Some(dmatrix![1.0, 2.0; 0.0, 1.0]), None).unwrap();
        assert!(flagged.p_flagged());
        assert_eq!(EnergyWeight::for_model(&flagged, EnergyKind::Physical), Err(ModalError::RefusedIndefiniteP));
        assert!(EnergyWeight::for_model(&flagged, EnergyKind::Normalized).is_ok());
        let bare = StateSpaceModel::from_state_matrix(DMatrix::zeros(2, 2)).unwrap();
        let w = EnergyWeight::for_model(&bare, EnergyKind::Physical).unwrap();
        assert_eq!(w.kind(), EnergyKind::Normalized);
    }

    #[test]
    fn zero_state_report_is_all_zero() {
        let (a, basis) = damped();
        let eye = EnergyWeight::normalized(2);
        for method in MethodKind::ALL {
            let r = energy_report(method, &basis, &DVector::zeros(2), &a, &eye).unwrap();
            assert!(r.per_mode_energy.iter().chain(&r.per_mode_power).all(|v| v.norm() == 0.0));
            assert_eq!(r.sum_error_pct, None);
        }
    }

    #[test]
    fn paired_view_sums_partners() {
        let (a, basis) = damped();
        let eye = EnergyWeight::normalized(2);
        let r = energy_report(MethodKind::Eigenvector, &basis, &x10(), &a, &eye).unwrap();
        let paired = r.paired(&basis);
        assert_eq!(paired.len(), 1);
        assert!(paired[0].energy.im.abs() < 1e-15);
        assert!((paired[0].energy.re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn method_names_round_trip() {
        for m in MethodKind::ALL {
            assert_eq!(m.name().parse::<MethodKind>().unwrap(), m);
        }
        assert!("bogus".parse::<MethodKind>().is_err());
        assert_eq!("physical".parse::<EnergyKind>().unwrap(), EnergyKind::Physical);
    }
}

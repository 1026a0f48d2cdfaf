//! Evaluation of the three modal-energy requirements for each method at a
//! given state: eigenvalue mapping `sᵢ = 2 λᵢ eᵢ`, real-valued modal energy,
//! and modal energies summing to `V(x)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::energy::{energy_report, normality, EnergyKind, EnergyReport, EnergyWeight, MethodKind, Normality};
use crate::error::{ModalError, Result};
use crate::spectral::EigenBasis;

/// Verdict of one requirement for one method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
}

impl Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyRow {
    pub method: MethodKind,
    pub eigenvalue_mapping: Verdict,
    pub energy_real: Verdict,
    pub energy_sum: Verdict,
    /// `maxᵢ |sᵢ − 2λᵢeᵢ| / ((1 + |eᵢ|)(1 + |λᵢ|))`
    pub mapping_residual: f64,
    /// `maxᵢ |Im eᵢ| / max(1, V)`
    pub imag_energy: f64,
    /// `|Σ eᵢ − V| / max(1, V)`
    pub sum_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyGrid {
    pub kind: EnergyKind,
    pub tol: f64,
    pub normality: Normality,
    pub total_energy: f64,
    pub total_power: f64,
    pub rows: Vec<PropertyRow>,
}

/// Checks every method at state `x`. Needs `V(x) > 0`.
pub fn check_properties(
    basis: &EigenBasis,
    x: &DVector<f64>,
    a: &DMatrix<f64>,
    weight: &EnergyWeight,
    tol: f64,
) -> Result<PropertyGrid> {
    let p = match weight.kind() {
        EnergyKind::Physical => Some(weight.matrix()),
        EnergyKind::Normalized => None,
    };
    let normality = normality(a, p)?;
    let mut rows = Vec::with_capacity(4);
    let mut totals = (0.0, 0.0);
    for method in MethodKind::ALL {
        let report = energy_report(method, basis, x, a, weight)?;
        if !(report.total_energy > 0.0) {
            return Err(ModalError::NearZeroState { norm: (2.0 * report.total_energy.max(0.0)).sqrt() });
        }
        totals = (report.total_energy, report.total_power);
        rows.push(row(method, basis, &report, tol));
    }
    Ok(PropertyGrid { kind: weight.kind(), tol, normality, total_energy: totals.0, total_power: totals.1, rows })
}

fn row(method: MethodKind, basis: &EigenBasis, report: &EnergyReport, tol: f64) -> PropertyRow {
    let scale = report.total_energy.max(1.0);
    let mapping_residual = (0..basis.len())
        .map(|i| report.mapping_residuals[i] / ((1.0 + report.per_mode_energy[i].norm()) * (1.0 + basis.lambda(i).norm())))
        .fold(0.0, f64::max);
    let imag_energy = report.per_mode_energy.iter().map(|e| e.im.abs()).fold(0.0, f64::max) / scale;
    let sum_residual = (report.energy_sum - report.total_energy).norm() / scale;
    PropertyRow {
        method,
        eigenvalue_mapping: Verdict::from(mapping_residual <= tol),
        energy_real: Verdict::from(imag_energy <= tol),
        energy_sum: Verdict::from(sum_residual <= tol),
        mapping_residual,
        imag_energy,
        sum_residual,
    }
}

impl PropertyGrid {
    pub fn row(&self, method: MethodKind) -> &PropertyRow {
        self.rows.iter().find(|r| r.method == method).expect("every method is checked")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{decompose, DEFAULT_TOL};
    use nalgebra::dmatrix;

    #[test]
    fn damped_oscillator_grid() {
        let a = dmatrix![0.0, 1.0; -1.0, -1.0];
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        let x = DVector::from_vec(vec![1.0, 0.0]);
        let grid = check_properties(&basis, &x, &a, &EnergyWeight::normalized(2), 1e-9).unwrap();

        let mf = grid.row(MethodKind::MovingFrame);
        assert_eq!((mf.eigenvalue_mapping, mf.energy_real, mf.energy_sum), (Verdict::Fails, Verdict::Holds, Verdict::Holds));
        let ev = grid.row(MethodKind::Eigenvector);
        assert_eq!((ev.eigenvalue_mapping, ev.energy_real, ev.energy_sum), (Verdict::Holds, Verdict::Fails, Verdict::Holds));
        let h = grid.row(MethodKind::HermitianPF);
        assert_eq!((h.eigenvalue_mapping, h.energy_real, h.energy_sum), (Verdict::Holds, Verdict::Holds, Verdict::Fails));
        let t = grid.row(MethodKind::TransposePF);
        assert_eq!((t.eigenvalue_mapping, t.energy_real, t.energy_sum), (Verdict::Holds, Verdict::Fails, Verdict::Fails));
    }

    #[test]
    fn zero_state_is_rejected() {
        let a = dmatrix![0.0, 1.0; -1.0, -1.0];
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        let err = check_properties(&basis, &DVector::zeros(2), &a, &EnergyWeight::normalized(2), 1e-9);
        assert!(matches!(err, Err(ModalError::NearZeroState { .. })));
    }
}

//! Step-disturbance response of the linear system and the modal energy
//! traces along it.
//!
//! The state is zero before the disturbance instant `t_dist` and jumps to
//! `x0` there; afterwards `x(t) = exp(A (t − t_dist)) x0`. Propagation uses
//! one precomputed `exp(A dt)` step, so no integrator error enters.

use nalgebra::{DMatrix, DVector};

use crate::energy::{energy_report, EnergyKind, EnergyReport, EnergyWeight, MethodKind};
use crate::error::{ModalError, Result};
use crate::expm::expm;
use crate::linalg::C64;
use crate::model::{Disturbance, StateSpaceModel};
use crate::spectral::EigenBasis;

/// Uniform sampling `t0, t0 + dt, …` up to `t_end`, with a step applied at
/// `t_dist`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t_dist: f64,
    t_end: f64,
    dt: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t_dist: f64, t_end: f64, dt: f64) -> Result<Self> {
        if ![t0, t_dist, t_end, dt].iter().all(|v| v.is_finite()) {
            return Err(ModalError::non_finite("time grid"));
        }
        if !(dt > 0.0) {
            return Err(ModalError::InvalidInput(format!("dt must be positive, got {dt}")));
        }
        if !(t0 <= t_dist && t_dist < t_end) {
            return Err(ModalError::InvalidInput(format!(
                "need t0 <= t_dist < t_end, got {t0}, {t_dist}, {t_end}"
            )));
        }
        let grid = Self { t0, t_dist, t_end, dt };
        if grid.len() < 2 {
            return Err(ModalError::InvalidInput("time grid has fewer than two samples".into()));
        }
        Ok(grid)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_dist(&self) -> f64 {
        self.t_dist
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        ((self.t_end - self.t0) / self.dt * (1.0 + 1e-12)).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.t0 + k as f64 * self.dt).collect()
    }

    /// Time since the disturbance for samples at or after it.
    fn offset(&self, t: f64) -> Option<f64> {
        let slack = 1e-9 * self.dt;
        (t >= self.t_dist - slack).then(|| (t - self.t_dist).max(0.0))
    }
}

/// Sampled state trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
}

/// Samples `x(t)` on the grid.
pub fn propagate(a: &DMatrix<f64>, disturbance: &Disturbance, grid: &TimeGrid) -> Result<Trajectory> {
    let x0 = disturbance.state();
    if !a.is_square() || a.nrows() != x0.len() {
        return Err(ModalError::DimensionMismatch(format!(
            "A is {}x{}, x0 has {} entries",
            a.nrows(),
            a.ncols(),
            x0.len()
        )));
    }
    let n = x0.len();
    let step = expm(&(a * grid.dt))?;
    let times = grid.times();
    let mut states = Vec::with_capacity(times.len());
    let mut current: Option<DVector<f64>> = None;
    for &t in &times {
        let next = match (&current, grid.offset(t)) {
            (_, None) => {
                states.push(DVector::zeros(n));
                continue;
            }
            (None, Some(offset)) if offset <= 1e-12 * grid.dt => x0.clone(),
            (None, Some(offset)) => expm(&(a * offset))? * x0,
            (Some(prev), Some(_)) => &step * prev,
        };
        if next.iter().any(|v| !v.is_finite()) {
            return Err(ModalError::Overflow { time: t });
        }
        states.push(next.clone());
        current = Some(next);
    }
    Ok(Trajectory { times, states })
}

/// Closed-form modal components `zᵢ(t) = e^{λᵢ (t − t_dist)} vᵢ (uᵢᵀ x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalTrajectory {
    pub times: Vec<f64>,
    /// One matrix per sample; column `i` is `zᵢ(t)`.
    pub components: Vec<DMatrix<C64>>,
}

impl ModalTrajectory {
    /// `Σᵢ zᵢ(t_k)`.
    pub fn reconstruct(&self, k: usize) -> DVector<C64> {
        let z = &self.components[k];
        DVector::from_fn(z.nrows(), |r, _| z.row(r).sum())
    }
}

pub fn modal_trajectory(basis: &EigenBasis, disturbance: &Disturbance, grid: &TimeGrid) -> Result<ModalTrajectory> {
    let x0 = disturbance.state();
    let start = basis.modal_projections(x0)?;
    let n = basis.len();
    let times = grid.times();
    let components = times
        .iter()
        .map(|&t| match grid.offset(t) {
            None => DMatrix::zeros(n, n),
            Some(tau) => {
                let mut z = start.clone();
                for i in 0..n {
                    let growth = (basis.lambda(i) * C64::new(tau, 0.0)).exp();
                    z.column_mut(i).iter_mut().for_each(|c| *c *= growth);
                }
                z
            }
        })
        .collect();
    Ok(ModalTrajectory { times, components })
}

/// One line of an energy trace: a mode of a method at a sample, or the
/// method's summary (`mode = None`).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub t: f64,
    pub method: MethodKind,
    pub kind: EnergyKind,
    pub mode: Option<usize>,
    pub energy: C64,
    pub power: C64,
    /// The method's summed modal energy at this sample.
    pub sum: C64,
    pub total_energy: f64,
    pub total_power: f64,
}

/// Energy traces of several methods along a step response.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTable {
    pub kind: EnergyKind,
    pub rows: Vec<EnergyRow>,
}

impl EnergyTable {
    /// Summary rows of `method` in time order.
    pub fn summary(&self, method: MethodKind) -> impl Iterator<Item = &EnergyRow> {
        self.rows.iter().filter(move |r| r.method == method && r.mode.is_none())
    }

    /// Rows of one mode of `method` in time order.
    pub fn mode(&self, method: MethodKind, mode: usize) -> impl Iterator<Item = &EnergyRow> {
        self.rows.iter().filter(move |r| r.method == method && r.mode == Some(mode))
    }
}

/// Rows of one method at one sample: every mode, then the summary.
pub fn energy_rows(t: f64, report: &EnergyReport) -> Vec<EnergyRow> {
    let base = EnergyRow {
        t,
        method: report.method,
        kind: report.kind,
        mode: None,
        energy: report.energy_sum,
        power: report.power_sum,
        sum: report.energy_sum,
        total_energy: report.total_energy,
        total_power: report.total_power,
    };
    let mut rows: Vec<EnergyRow> = (0..report.per_mode_energy.len())
        .map(|i| EnergyRow {
            mode: Some(i),
            energy: report.per_mode_energy[i],
            power: report.per_mode_power[i],
            ..base.clone()
        })
        .collect();
    rows.push(base);
    rows
}

/// Rows are ordered by sample, then by method (in the order given), then by
/// mode, with the summary row last.
pub fn energy_timeseries(
    model: &StateSpaceModel,
    basis: &EigenBasis,
    disturbance: &Disturbance,
    grid: &TimeGrid,
    methods: &[MethodKind],
    weight: &EnergyWeight,
) -> Result<EnergyTable> {
    let a = model.a();
    let trajectory = propagate(a, disturbance, grid)?;
    let mut rows = Vec::with_capacity(trajectory.times.len() * methods.len() * (basis.len() + 1));
    for (t, x) in trajectory.times.iter().zip(&trajectory.states) {
        for &method in methods {
            let report = energy_report(method, basis, x, a, weight)?;
            rows.extend(energy_rows(*t, &report));
        }
    }
    Ok(EnergyTable { kind: weight.kind(), rows })
}

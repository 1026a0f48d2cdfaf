//! Energy traces after a step disturbance on a damped three-machine swing
//! model, written as CSV for plotting (summary rows only).
//!
//! cargo run --example step_response > traces.csv

use modal_energy::energy::{EnergyKind, EnergyWeight, MethodKind};
use modal_energy::model::{build_swing_system, Disturbance, SwingParams};
use modal_energy::simulate::{energy_timeseries, TimeGrid};
use modal_energy::spectral::{decompose, DEFAULT_TOL};
use nalgebra::{dmatrix, dvector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = dmatrix![
         2.5, -1.0, -0.5;
        -1.0,  2.0, -0.6;
        -0.5, -0.6,  1.6
    ];
    let params = SwingParams::new(vec![1.0, 2.0, 1.5], vec![0.3, 0.5, 0.4], k)?;
    let model = build_swing_system(&params);
    let basis = decompose(model.a(), DEFAULT_TOL)?;
    let weight = EnergyWeight::for_model(&model, EnergyKind::Physical)?;
    let step = Disturbance::new(dvector![0.1, -0.05, 0.02, 0.0, 0.0, 0.0])?;
    let grid = TimeGrid::new(0.0, 1.0, 10.0, 0.05)?;

    let table = energy_timeseries(&model, &basis, &step, &grid, &MethodKind::ALL, &weight)?;
    println!("t,total_energy,total_power,moving,eigvec,hermitian,transpose_re,transpose_im");
    let columns: Vec<Vec<_>> = MethodKind::ALL.iter().map(|&m| table.summary(m).collect()).collect();
    for k in 0..grid.len() {
        let row = columns[0][k];
        println!(
            "{:.2},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            row.t,
            row.total_energy,
            row.total_power,
            columns[0][k].sum.re,
            columns[1][k].sum.re,
            columns[2][k].sum.re,
            columns[3][k].sum.re,
            columns[3][k].sum.im
        );
    }
    Ok(())
}

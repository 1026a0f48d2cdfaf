//! Normality of a three-machine swing model in the energy inner product:
//! exactly normal without damping, increasingly non-normal as damping grows,
//! and the Hermitian participation-factor energy error that follows.
//!
//! cargo run --example swing_normality

use modal_energy::energy::{energy_report, normality, EnergyKind, EnergyWeight, MethodKind};
use modal_energy::model::{build_swing_system, SwingParams};
use modal_energy::spectral::{decompose, DEFAULT_TOL};
use nalgebra::{dmatrix, dvector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = dmatrix![
         2.5, -1.0, -0.5;
        -1.0,  2.0, -0.6;
        -0.5, -0.6,  1.6
    ];
    let x = dvector![0.1, -0.05, 0.02, 0.0, 0.0, 0.0];

    println!("{:>8} {:>16} {:>16} {:>14}", "damping", "index (P-inner)", "index (P = I)", "Hermitian err");
    for d in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0] {
        let params = SwingParams::new(vec![1.0, 2.0, 1.5], vec![d; 3], k.clone())?;
        let model = build_swing_system(&params);
        let physical = normality(model.a(), model.p())?;
        let plain = normality(model.a(), None)?;
        let basis = decompose(model.a(), DEFAULT_TOL)?;
        let weight = EnergyWeight::for_model(&model, EnergyKind::Physical)?;
        let r = energy_report(MethodKind::HermitianPF, &basis, &x, model.a(), &weight)?;
        println!(
            "{d:>8.2} {:>16.12} {:>16.6} {:>13.4}%",
            physical.index,
            plain.index,
            r.sum_error_pct.unwrap_or(0.0)
        );
    }
    Ok(())
}

//! Hermitian participation-factor energy error against the normality index
//! on a family that moves continuously away from a normal matrix.
//!
//! cargo run --example nonnormality_sweep

use modal_energy::energy::{energy_report, normality_index, EnergyWeight, MethodKind};
use modal_energy::spectral::{decompose, DEFAULT_TOL};
use nalgebra::{dmatrix, dvector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = dvector![1.0, 1.0];
    let weight = EnergyWeight::normalized(2);
    println!("{:>6} {:>10} {:>14}", "c", "index", "sum error %");
    for c in [0.0, 0.1, 0.3, 0.6, 1.0, 2.0, 4.0, 8.0] {
        // Eigenvalues stay at -1 and -2; the coupling c alone breaks normality.
        let a = dmatrix![-1.0, c; 0.0, -2.0];
        let basis = decompose(&a, DEFAULT_TOL)?;
        let r = energy_report(MethodKind::HermitianPF, &basis, &x, &a, &weight)?;
        println!("{c:>6.1} {:>10.6} {:>14.6}", normality_index(&a, None)?, r.sum_error_pct.unwrap_or(0.0));
    }
    Ok(())
}

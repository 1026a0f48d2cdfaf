//! The four modal energy definitions side by side on a damped oscillator,
//! with the verdict on each requirement (eigenvalue mapping, real energy,
//! energies summing to the total).
//!
//! cargo run --example four_definitions

use modal_energy::energy::{energy_report, EnergyWeight, MethodKind};
use modal_energy::properties::check_properties;
use modal_energy::spectral::{decompose, DEFAULT_TOL};
use nalgebra::{dmatrix, dvector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = dmatrix![0.0, 1.0; -1.0, -1.0];
    let x = dvector![1.0, 0.0];
    let basis = decompose(&a, DEFAULT_TOL)?;
    let weight = EnergyWeight::normalized(2);

    for method in MethodKind::ALL {
        let r = energy_report(method, &basis, &x, &a, &weight)?;
        println!("{method}:");
        for i in 0..basis.len() {
            let (e, s) = (r.per_mode_energy[i], r.per_mode_power[i]);
            println!("  mode {i}: e = {:+.4}{:+.4}j   s = {:+.4}{:+.4}j", e.re, e.im, s.re, s.im);
        }
        println!(
            "  sum e = {:+.4}{:+.4}j   V = {:.4}   missing {:+.4}",
            r.energy_sum.re, r.energy_sum.im, r.total_energy, r.missing_energy.re
        );
    }

    let grid = check_properties(&basis, &x, &a, &weight, 1e-9)?;
    println!("\nnormality index {:.6}", grid.normality.index);
    println!("{:<10} {:<10} {:<10} {:<10}", "method", "mapping", "real", "sum");
    for row in &grid.rows {
        println!(
            "{:<10} {:<10} {:<10} {:<10}",
            row.method.name(),
            row.eigenvalue_mapping.name(),
            row.energy_real.name(),
            row.energy_sum.name()
        );
    }
    Ok(())
}

//! The moving frame anchored at the state: its first power term is the
//! actual dissipation, and the power/energy ratio equals 2λ only when the
//! state lies on a real eigenvector.
//!
//! cargo run --example moving_frame

use modal_energy::energy::{energy_report, moving_frame, EnergyWeight, MethodKind, FRAME_TOL};
use modal_energy::spectral::{decompose, DEFAULT_TOL};
use nalgebra::{dmatrix, dvector, DVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Overdamped: eigenvalues -0.5 and -2.
    let a = dmatrix![0.0, 1.0; -1.0, -2.5];
    let basis = decompose(&a, DEFAULT_TOL)?;
    let weight = EnergyWeight::normalized(2);

    let eigen_state: DVector<f64> = basis.right_vector(0).map(|z| z.re);
    let generic = dvector![1.0, 0.3];
    for (label, x) in [("on eigenvector 0", eigen_state), ("generic", generic)] {
        let frame = moving_frame(&x, &a, &weight, FRAME_TOL)?;
        let r = energy_report(MethodKind::MovingFrame, &basis, &x, &a, &weight)?;
        let ratio = r.power_sum.re / r.energy_sum.re;
        println!("{label}: x = {:?}", x.as_slice());
        println!("  psi_1 = {:?}, psi_2 = {:?}", frame.column(0).as_slice(), frame.column(1).as_slice());
        println!(
            "  s = [{:+.6}, {:+.6}], active power {:+.6}, energy {:.6}",
            r.per_mode_power[0].re, r.per_mode_power[1].re, r.power_sum.re, r.energy_sum.re
        );
        println!(
            "  power/energy = {ratio:+.6}; 2 lambda = {:+.6}, {:+.6}",
            2.0 * basis.lambda(0).re,
            2.0 * basis.lambda(1).re
        );
    }
    Ok(())
}

//! Where the Hermitian participation-factor energy goes missing: the
//! off-diagonal entries of the cross-energy matrix.
//!
//! cargo run --example cross_energy

use modal_energy::energy::{cross_energy, off_diagonal_sum, total_energy, EnergyWeight};
use modal_energy::spectral::{decompose, DEFAULT_TOL};
use nalgebra::{dmatrix, dvector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = dmatrix![0.0, 1.0; -1.0, -1.0];
    let basis = decompose(&a, DEFAULT_TOL)?;
    let weight = EnergyWeight::normalized(2);

    for x in [dvector![1.0, 0.0], dvector![0.0, 1.0], dvector![1.0, -0.5]] {
        let cross = cross_energy(&basis, &x, &weight)?;
        let diagonal: f64 = (0..2).map(|i| cross[(i, i)].re).sum();
        let off = off_diagonal_sum(&cross);
        let v = total_energy(&x, &weight)?;
        println!("x = {:?}", x.as_slice());
        for row in cross.row_iter() {
            println!("  {}", row.iter().map(|c| format!("{:+.5}{:+.5}j", c.re, c.im)).collect::<Vec<_>>().join("  "));
        }
        println!("  Hermitian sum {diagonal:.6} + cross {:+.6} = {:.6}  (V = {v:.6})\n", off.re, diagonal + off.re);
    }
    Ok(())
}

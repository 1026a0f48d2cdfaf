//! Right and left eigenvectors, the modal expansion of a state and the
//! participation factors of a damped two-mass system.
//!
//! cargo run --example eigenbasis

use modal_energy::spectral::{decompose, ModeGroup, DEFAULT_TOL};
use nalgebra::{dmatrix, dvector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = dmatrix![
         0.0,  0.0,  1.0,  0.0;
         0.0,  0.0,  0.0,  1.0;
        -2.0,  1.0, -0.2,  0.0;
         1.0, -1.5,  0.0, -0.1
    ];
    let basis = decompose(&a, DEFAULT_TOL)?;

    println!("eigenvalues (descending real part):");
    for (i, l) in basis.lambdas().iter().enumerate() {
        println!("  {i}: {:+.6} {:+.6}j   overlap {:.3}", l.re, l.im, basis.overlaps()[i]);
    }
    for g in basis.groups() {
        match g {
            ModeGroup::Real(i) => println!("mode {i} is real"),
            ModeGroup::Pair(i, j) => println!("modes {i} and {j} form a conjugate pair"),
        }
    }

    let r = basis.residuals();
    println!("residuals: right {:.1e}, left {:.1e}, |V U^T - I| {:.1e}", r.right, r.left, r.biorthogonality);

    let x = dvector![1.0, -0.5, 0.0, 0.2];
    let z = basis.modal_projections(&x)?;
    let rebuilt = z.column_sum();
    println!("x            = {:?}", x.as_slice());
    println!("sum of z_i   = {:?}", rebuilt.iter().map(|c| format!("{:.6}{:+.1e}j", c.re, c.im)).collect::<Vec<_>>());

    println!("participation |p_ki| (rows = states, columns = modes):");
    let pf = basis.participation_matrix();
    for row in pf.row_iter() {
        println!("  {}", row.iter().map(|p| format!("{:7.4}", p.norm())).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}

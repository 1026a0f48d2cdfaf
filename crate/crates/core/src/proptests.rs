//! Property tests over random systems.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use crate::energy::{
    cross_energy, energy_report, modal_energy, modal_power, normality_index, off_diagonal_sum, sharp_adjoint,
    EnergyKind, EnergyWeight, MethodKind,
};
use crate::expm::expm;
use crate::linalg::C64;
use crate::model::{build_swing_system, Disturbance, SwingParams};
use crate::simulate::{modal_trajectory, propagate, TimeGrid};
use crate::spectral::{decompose, ModeGroup, DEFAULT_TOL};

fn matrix(max_n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| DMatrix::from_row_slice(n, n, &v))
    })
}

fn system(max_n: usize) -> impl Strategy<Value = (DMatrix<f64>, DVector<f64>, DMatrix<f64>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(-1.0f64..1.0, n * n),
            proptest::collection::vec(-1.0f64..1.0, n),
            proptest::collection::vec(-1.0f64..1.0, n * n),
        )
            .prop_map(move |(a, x, b)| {
                let b = DMatrix::from_row_slice(n, n, &b) / (n as f64).sqrt();
                let p = &b * b.transpose() + DMatrix::identity(n, n) * 0.5;
                (DMatrix::from_row_slice(n, n, &a), DVector::from_vec(x), (&p + p.transpose()) * 0.5)
            })
    })
}

/// Inertias, dampings and a symmetric positive definite stiffness.
fn swing(max_m: usize, damped: bool) -> impl Strategy<Value = SwingParams> {
    (1..=max_m).prop_flat_map(move |m| {
        let d_range = if damped { 0.05f64..2.0 } else { 0.0f64..f64::MIN_POSITIVE };
        (
            proptest::collection::vec(0.2f64..5.0, m),
            proptest::collection::vec(d_range, m),
            proptest::collection::vec(-1.0f64..1.0, m * m),
        )
            .prop_map(move |(inertia, damping, b)| {
                let b = DMatrix::from_row_slice(m, m, &b);
                let k = &b * b.transpose() + DMatrix::identity(m, m) * 0.3;
                let k = (&k + k.transpose()) * 0.5;
                let damping = if damped { damping } else { vec![0.0; m] };
                SwingParams::new(inertia, damping, k).unwrap()
            })
    })
}

fn stable(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let shift = decompose(a, DEFAULT_TOL).unwrap().lambdas().iter().map(|l| l.re).fold(f64::MIN, f64::max);
    a - DMatrix::identity(n, n) * (shift + 0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reconstruction_and_residuals(a in matrix(50), seed in proptest::collection::vec(-1.0f64..1.0, 50)) {
        let n = a.nrows();
        let x = DVector::from_iterator(n, seed.into_iter().take(n));
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        let z = basis.modal_projections(&x).unwrap();
        let sum: DVector<C64> = z.column_sum();
        let err = sum.iter().zip(x.iter()).map(|(s, v)| (s - C64::new(*v, 0.0)).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-9 * x.norm().max(f64::MIN_POSITIVE));

        let ac = a.map(|v| C64::new(v, 0.0));
        let av = &ac * basis.right();
        let vl = basis.right() * DMatrix::from_diagonal(basis.lambdas());
        prop_assert!((av - vl).norm() <= 1e-9 * a.norm().max(1e-300));
    }

    #[test]
    fn conjugate_pairs_are_exact_mirrors(a in matrix(30)) {
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        for g in basis.groups() {
            if let ModeGroup::Pair(i, j) = *g {
                prop_assert_eq!(basis.lambda(j), basis.lambda(i).conj());
                prop_assert_eq!(basis.right_vector(j), basis.right_vector(i).map(|c| c.conj()));
                prop_assert_eq!(basis.left_vector(j), basis.left_vector(i).map(|c| c.conj()));
                prop_assert_eq!(basis.partner(i), Some(j));
            }
        }
    }

    #[test]
    fn energy_identities((a, x, p) in system(30)) {
        let n = a.nrows();
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        for weight in [EnergyWeight::normalized(n), EnergyWeight::physical(p).unwrap()] {
            let v = 0.5 * x.dot(&(weight.matrix() * &x));
            for method in [MethodKind::Eigenvector, MethodKind::HermitianPF, MethodKind::TransposePF] {
                let r = energy_report(method, &basis, &x, &a, &weight).unwrap();
                for i in 0..n {
                    let (e, l) = (r.per_mode_energy[i], basis.lambda(i));
                    prop_assert!((r.per_mode_power[i] - 2.0 * l * e).norm() <= 1e-9 * (1.0 + e.norm()) * (1.0 + l.norm()));
                }
                for g in basis.groups() {
                    if let ModeGroup::Pair(i, j) = *g {
                        prop_assert!((r.per_mode_energy[i] + r.per_mode_energy[j]).im.abs() <= 1e-10);
                    }
                }
                if method == MethodKind::Eigenvector {
                    prop_assert!((r.energy_sum - C64::new(v, 0.0)).norm() <= 1e-9 * v.max(1.0));
                }
                if method == MethodKind::HermitianPF {
                    prop_assert!(r.per_mode_energy.iter().all(|e| e.im == 0.0 && e.re >= -1e-12));
                    let cross = cross_energy(&basis, &x, &weight).unwrap();
                    let closure = r.energy_sum + off_diagonal_sum(&cross);
                    prop_assert!((closure - C64::new(v, 0.0)).norm() <= 1e-9 * v.max(1.0));
                }
            }
        }
    }

    #[test]
    fn normal_matrices_keep_hermitian_additivity(b in matrix(20), skew in any::<bool>(), seed in proptest::collection::vec(-1.0f64..1.0, 20)) {
        let n = b.nrows();
        let a = if skew { (&b - b.transpose()) * 0.5 } else { (&b + b.transpose()) * 0.5 };
        prop_assume!(a.norm() > 1e-6);
        let x = DVector::from_iterator(n, seed.into_iter().take(n));
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        let r = energy_report(MethodKind::HermitianPF, &basis, &x, &a, &EnergyWeight::normalized(n)).unwrap();
        prop_assert!((r.energy_sum.re - r.total_energy).abs() <= 1e-9 * r.total_energy.max(1.0));
    }

    #[test]
    fn sharp_adjoint_is_an_involution((a, _x, p) in system(20)) {
        let once = sharp_adjoint(&a, Some(&p)).unwrap();
        let twice = sharp_adjoint(&once, Some(&p)).unwrap();
        prop_assert!((twice - &a).norm() <= 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn lossless_swing_is_p_normal(params in swing(8, false)) {
        let model = build_swing_system(&params);
        let index = normality_index(model.a(), model.p()).unwrap();
        prop_assert!((index - 1.0).abs() <= 1e-12, "index {}", index);
    }

    #[test]
    fn damped_swing_is_not_normal(params in swing(8, true)) {
        let model = build_swing_system(&params);
        prop_assert!(normality_index(model.a(), model.p()).unwrap() < 1.0);
    }

    #[test]
    fn swing_block_structure(params in swing(8, true)) {
        let m = params.machines();
        let model = build_swing_system(&params);
        let a = model.a();
        prop_assert_eq!(a.view((0, 0), (m, m)).clone_owned(), DMatrix::zeros(m, m));
        prop_assert_eq!(a.view((0, m), (m, m)).clone_owned(), DMatrix::identity(m, m));
        prop_assert!(!model.p_flagged());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn modal_trajectory_matches_matrix_exponential(b in matrix(20), seed in proptest::collection::vec(-1.0f64..1.0, 20)) {
        let a = stable(&(b / 2.0));
        let n = a.nrows();
        let x0 = DVector::from_iterator(n, seed.into_iter().take(n));
        let dist = Disturbance::new(x0).unwrap();
        let grid = TimeGrid::new(0.0, 0.0, 9.98, 0.02).unwrap();
        prop_assert_eq!(grid.len(), 500);
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        let traj = propagate(&a, &dist, &grid).unwrap();
        let modal = modal_trajectory(&basis, &dist, &grid).unwrap();
        let scale = traj.states.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for (k, x) in traj.states.iter().enumerate() {
            let z = modal.reconstruct(k);
            let err = z.iter().zip(x.iter()).map(|(zi, xi)| (zi - C64::new(*xi, 0.0)).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-8 * scale, "sample {}: {:e}", k, err);
        }
    }

    /// Central differences of the energy converge to the power at second order:
    /// per mode for the PF methods, in aggregate for the other two.
    #[test]
    fn power_is_the_time_derivative_of_energy((b, x0, p) in system(8)) {
        let a = stable(&b);
        let n = a.nrows();
        let basis = decompose(&a, DEFAULT_TOL).unwrap();
        let weight = EnergyWeight::physical(p).unwrap();
        prop_assume!(weight.kind() == EnergyKind::Physical);
        let state = |t: f64| expm(&(&a * t)).unwrap() * &x0;
        let t = 0.3;
        for method in MethodKind::ALL {
            let diff = |h: f64| -> f64 {
                let (lo, hi, mid) = (state(t - h), state(t + h), state(t));
                if matches!(method, MethodKind::HermitianPF | MethodKind::TransposePF) {
                    let (elo, ehi) = (modal_energy(method, &basis, &lo, &weight).unwrap(), modal_energy(method, &basis, &hi, &weight).unwrap());
                    let s = modal_power(method, &basis, &mid, &a, &weight).unwrap();
                    (0..n).map(|i| {
                        let d = (ehi[i] - elo[i]) / (2.0 * h);
                        if method == MethodKind::HermitianPF { (d.re - s[i].re).abs() } else { (d - s[i]).norm() }
                    }).fold(0.0, f64::max)
                } else {
                    let (rlo, rhi) = (energy_report(method, &basis, &lo, &a, &weight).unwrap(), energy_report(method, &basis, &hi, &a, &weight).unwrap());
                    let r = energy_report(method, &basis, &mid, &a, &weight).unwrap();
                    ((rhi.energy_sum - rlo.energy_sum) / (2.0 * h) - r.power_sum).norm()
                }
            };
            let (coarse, fine) = (diff(2e-2), diff(1e-2));
            // Below ~1e-9 the difference is at the rounding floor and no rate can be seen.
            if coarse > 1e-9 {
                let ratio = coarse / fine;
                prop_assert!((3.0..5.0).contains(&ratio), "{:?}: ratio {} ({:e} / {:e})", method, ratio, coarse, fine);
            }
        }
    }
}

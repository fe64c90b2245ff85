mod common;

use common::{dist, gaussian, random_qp, rng, unit_set};
use nalgebra::{DVector, SymmetricEigen};
use rateamp_core::oracle::reference_solve;
use rateamp_core::{
    admm_setup, build_lifted, contains, fgm_setup, AdmmConfig, DykstraConfig, FgmConfig,
};

fn fgm_converged() -> FgmConfig {
    FgmConfig {
        max_iter: 3000,
        dykstra: DykstraConfig::STANDALONE,
        ..FgmConfig::default()
    }
}

fn admm_converged() -> AdmmConfig {
    AdmmConfig {
        max_iter: 200_000,
        tolerance: Some(1e-10),
        ..AdmmConfig::default()
    }
}

#[test]
fn step_matrix_norm_matches_eigen_oracle() {
    let mut g = rng(1);
    for n in [2, 3, 5, 8] {
        let qp = random_qp(&mut g, n, 50.0);
        let ws = fgm_setup(&qp, FgmConfig::default()).unwrap();
        let eig = SymmetricEigen::new(ws.step_matrix().clone()).eigenvalues;
        let norm = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(
            (norm - ws.contraction()).abs() <= 1e-9,
            "{norm} {}",
            ws.contraction()
        );
        let m = ws.step_matrix();
        assert!((m - m.transpose()).amax() == 0.0);
    }
}

#[test]
fn fgm_and_admm_reach_reference_on_t8() {
    let mut g = rng(2);
    let set = unit_set(8);
    for _ in 0..5 {
        let qp = random_qp(&mut g, 8, 100.0);
        let x0 = gaussian(&mut g, 8, 10.0);
        let reference = reference_solve(&qp, &x0, &set).unwrap();
        assert!(reference.kkt_residual <= 1e-8);

        let mut fgm = fgm_setup(&qp, fgm_converged()).unwrap();
        let u_fgm = fgm.solve(&x0, &set, None, None).unwrap().u_opt;
        assert!(dist(&u_fgm, &reference.u) <= 1e-4);

        let mut admm = admm_setup(&qp, &build_lifted(&set), admm_converged()).unwrap();
        let (res, _) = admm.solve(&x0, None, None).unwrap();
        assert!(dist(&res.u_opt, &reference.u) <= 1e-4);
        assert!(dist(&u_fgm, &res.u_opt) <= 1e-3);
    }
}

#[test]
fn fgm_iterates_feasible_and_above_optimum() {
    let mut g = rng(3);
    let set = unit_set(6);
    for _ in 0..5 {
        let qp = random_qp(&mut g, 6, 100.0);
        let x0 = gaussian(&mut g, 6, 10.0);
        let q = qp.linear_term(&x0);
        let reference = reference_solve(&qp, &x0, &set).unwrap();
        let f_star = qp.objective(&reference.u, &q);
        let cfg = FgmConfig {
            max_iter: 200,
            dykstra: DykstraConfig::STANDALONE,
            record_trace: true,
            ..FgmConfig::default()
        };
        let mut ws = fgm_setup(&qp, cfg).unwrap();
        let res = ws.solve(&x0, &set, None, None).unwrap();
        assert_eq!(res.trace.len(), 200);
        for entry in &res.trace {
            let u = entry.snapshot.as_ref().unwrap();
            assert!(qp.objective(u, &q) >= f_star - 1e-8);
            // Dykstra leaves at most its last correction increment of infeasibility.
            assert!(contains(u, &set, entry.inner_step.max(1e-12)));
        }
    }
}

#[test]
fn admm_residual_and_dual_update() {
    let mut g = rng(4);
    let set = unit_set(8);
    let qp = random_qp(&mut g, 8, 100.0);
    let x0 = gaussian(&mut g, 8, 10.0);
    let lifted = build_lifted(&set);
    let mut ws = admm_setup(
        &qp,
        &lifted,
        AdmmConfig {
            max_iter: 1,
            ..AdmmConfig::default()
        },
    )
    .unwrap();
    let (_, mut state) = ws.solve(&x0, None, None).unwrap();
    let mut primal = f64::INFINITY;
    for _ in 0..5000 {
        let (_, next) = ws.solve(&x0, Some(&state), None).unwrap();
        let ku = &lifted.k * DVector::from_column_slice(&next.u);
        for i in 0..lifted.n_v() {
            let expect = state.gamma[i] + (ku[i] - next.v[i]);
            assert_eq!(next.gamma[i], expect);
        }
        primal = (ku - DVector::from_column_slice(&next.v)).norm();
        state = next;
    }
    assert!(primal <= 1e-6);
}

#[test]
fn zero_state_gives_zero_input() {
    let mut g = rng(5);
    let set = unit_set(5);
    let qp = random_qp(&mut g, 5, 10.0);
    let mut fgm = fgm_setup(&qp, FgmConfig::default()).unwrap();
    assert!(fgm
        .solve(&[0.0; 5], &set, None, None)
        .unwrap()
        .u_opt
        .iter()
        .all(|v| *v == 0.0));
    let mut admm = admm_setup(&qp, &build_lifted(&set), AdmmConfig::default()).unwrap();
    assert!(admm
        .solve(&[0.0; 5], None, None)
        .unwrap()
        .0
        .u_opt
        .iter()
        .all(|v| *v == 0.0));
}

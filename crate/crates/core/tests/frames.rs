use std::f64::consts::PI;

use geomphase::evolver::{evolve, steady_state};
use geomphase::gp::{sorted_eigen, GpOptions};
use geomphase::oracles::{vdp_populations, RwaSteadyState};
use geomphase::spinops::{rotation_operator, spin1_operators, Operator};
use geomphase::vdp::{
    build_axis_frame_model, build_lab_frame_model, build_rwa_model, gp_numeric, initial_state, VdpParams,
};
use geomphase::{ConeAxis, C64};

fn params(alpha: f64, omega: f64, strength: f64, tau: f64, n_step: usize) -> VdpParams {
    VdpParams {
        omega0: 1.0,
        gamma_g: 0.5,
        gamma_d: 1.0,
        axis: ConeAxis::new(alpha, omega).unwrap(),
        strength,
        omega_sig: 1.0,
        phi_sig: 0.0,
        tau,
        n_step,
    }
}

fn trace_norm(a: &Operator) -> f64 {
    a.clone().symmetric_eigenvalues().iter().map(|x| x.abs()).sum()
}

/// Without a signal the co-rotating steady state is carried along rigidly, so
/// each eigenvector only picks up its rotation overlap and the dynamical phase
/// of `ω n·S`.
#[test]
fn unsignalled_phase_matches_rigid_rotation() {
    for (alpha, tau) in [(PI / 4.0, 200.0), (PI / 3.0, 2.0 * PI / 0.05)] {
        let p = params(alpha, 0.05, 0.0, tau, 10_000);
        let chi = initial_state(&p).unwrap();
        let (vals, vecs) = sorted_eigen(&chi);
        let ns = spin1_operators().along(p.axis.direction());
        let r = rotation_operator(p.axis, tau);
        let z: C64 = (0..3)
            .map(|k| {
                let v = &vecs[k];
                let dynamical = v.dotc(&(&ns * v)).re * p.axis.omega * tau;
                v.dotc(&(&r * v)) * C64::from_polar(vals[k], dynamical)
            })
            .sum();
        let g = gp_numeric(&p, &GpOptions::default()).unwrap();
        assert!((g.gamma - z.arg()).abs() < 1e-8, "alpha {alpha}: {} vs {}", g.gamma, z.arg());
    }
}

#[test]
fn lab_frame_rotating_with_signal_reproduces_rwa() {
    let (omega0, strength) = (10.0, 0.01);
    let p = VdpParams { omega0, omega_sig: omega0, ..params(0.6, 0.0, strength, 20.0, 8000) };
    let lab = build_lab_frame_model(&p).unwrap();
    let rwa = build_rwa_model(&p).unwrap();
    let rho0 = RwaSteadyState::new(p.gamma_g, p.gamma_d, 0.0, 0.0).density_matrix(0.3);
    let a = evolve(&lab, &rho0, p.tau, p.n_step).unwrap();
    let b = evolve(&rwa, &rho0, p.tau, p.n_step).unwrap();
    let sz = spin1_operators().sz;
    let mut worst = 0.0f64;
    for j in (0..=p.n_step).step_by(100) {
        let u = (&sz * C64::new(0.0, p.omega_sig * a.time(j))).exp();
        let rotated = &u * &a.states[j] * u.adjoint();
        worst = worst.max(trace_norm(&(rotated - &b.states[j])));
    }
    assert!(worst <= 5e-3, "{worst}");
}

#[test]
fn populations_are_the_unsignalled_fixed_point() {
    for (gg, gd) in [(0.1, 1.0), (0.5, 1.0), (2.0, 0.7)] {
        let p = VdpParams { gamma_g: gg, gamma_d: gd, ..params(0.4, 0.0, 0.0, 1.0, 10) };
        let rho = steady_state(&build_rwa_model(&p).unwrap(), 0.0).unwrap();
        let pops = vdp_populations(gg, gd);
        for k in 0..3 {
            assert!((rho[(k, k)].re - pops[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn initial_state_is_the_lab_state_at_time_zero() {
    let p = params(PI / 4.0, 0.05, 0.2, 40.0, 4000);
    let rho0 = initial_state(&p).unwrap();
    let axis = build_axis_frame_model(&p).unwrap();
    let lab = build_lab_frame_model(&p).unwrap();
    let a = evolve(&axis, &rho0, p.tau, p.n_step).unwrap();
    let b = evolve(&lab, &rho0, p.tau, p.n_step).unwrap();
    for j in [0, 1000, 4000] {
        let r = rotation_operator(p.axis, a.time(j));
        let expected = &r * &a.states[j] * r.adjoint();
        assert!(trace_norm(&(expected - &b.states[j])) < 1e-8);
    }
}

#[test]
fn unsignalled_lab_spectrum_stays_at_the_populations() {
    let p = params(PI / 4.0, 0.05, 0.0, 200.0, 10_000);
    let lab = build_lab_frame_model(&p).unwrap();
    let traj = evolve(&lab, &initial_state(&p).unwrap(), p.tau, p.n_step).unwrap();
    let mut pops = vdp_populations(p.gamma_g, p.gamma_d);
    pops.sort_by(f64::total_cmp);
    for rho in traj.states.iter().step_by(250) {
        let (vals, _) = sorted_eigen(rho);
        for k in 0..3 {
            assert!((vals[k] - pops[k]).abs() < 1e-3, "{vals:?} vs {pops:?}");
        }
    }
}

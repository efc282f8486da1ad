//! Closed-form reference results for the spin-1 van der Pol oscillator and
//! the dephasing qubit.

use std::f64::consts::{PI, SQRT_2};

use crate::evolver::StaticModel;
use crate::gp::principal_arg;
use crate::spinops::{pauli, Operator};
use crate::vdp::VdpParams;
use crate::{Error, Result, C64};

/// `(p₊₁, p₀, p₋₁)` of the unperturbed oscillator.
pub fn vdp_populations(gamma_g: f64, gamma_d: f64) -> [f64; 3] {
    let norm = 3.0 * gamma_d + gamma_g;
    [gamma_g / norm, gamma_d / norm, 2.0 * gamma_d / norm]
}

/// Coherences per unit signal strength, `(c₊₁,₀, c₀,₋₁)`, in the frame
/// rotating with the signal.
pub fn vdp_coherences(gamma_g: f64, gamma_d: f64, delta: f64, phi_sig: f64) -> (C64, C64) {
    let i = C64::i();
    let (gg, gd) = (gamma_g, gamma_d);
    let pre = -i * C64::from_polar(1.0, -phi_sig);
    let a = pre
        * ((4.0 + 3.0 * SQRT_2) * gg * gd - 2.0 * SQRT_2 * i * gd * delta - SQRT_2 * gg * (3.0 * gg - 2.0 * i * delta));
    let b = 4.0 * (3.0 * gd + gg) * (gd + gg - i * delta) * (3.0 * gg - 2.0 * i * delta);
    let c0m = pre * gd / (SQRT_2 * (3.0 * gd + gg) * (3.0 * gg - 2.0 * i * delta));
    (a / b, c0m)
}

/// Steady state of the rotating-wave model to first order in the signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaSteadyState {
    pub p_plus1: f64,
    pub p_0: f64,
    pub p_minus1: f64,
    pub c_plus1_0: C64,
    pub c_0_minus1: C64,
}

impl RwaSteadyState {
    pub fn new(gamma_g: f64, gamma_d: f64, delta: f64, phi_sig: f64) -> Self {
        let [p_plus1, p_0, p_minus1] = vdp_populations(gamma_g, gamma_d);
        let (c_plus1_0, c_0_minus1) = vdp_coherences(gamma_g, gamma_d, delta, phi_sig);
        RwaSteadyState { p_plus1, p_0, p_minus1, c_plus1_0, c_0_minus1 }
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.p_plus1, self.p_0, self.p_minus1]
    }

    /// `diag(p) + T·(coherences)` in the `(+1, 0, -1)` basis.
    pub fn density_matrix(&self, strength: f64) -> Operator {
        let mut rho = Operator::zeros(3, 3);
        for (k, p) in self.populations().into_iter().enumerate() {
            rho[(k, k)] = C64::from(p);
        }
        rho[(0, 1)] = self.c_plus1_0 * strength;
        rho[(1, 0)] = rho[(0, 1)].conj();
        rho[(1, 2)] = self.c_0_minus1 * strength;
        rho[(2, 1)] = rho[(1, 2)].conj();
        rho
    }
}

/// `(3/(8√2))·T·|c₊₁,₀ + c₀,₋₁|`
pub fn sync_measure_closed_form(strength: f64, coherences: (C64, C64)) -> f64 {
    3.0 / (8.0 * SQRT_2) * strength * (coherences.0 + coherences.1).norm()
}

/// Relative phase maximizing the phase distribution, `−arg(c₊₁,₀ + c₀,₋₁)`.
pub fn sync_phase_closed_form(coherences: (C64, C64)) -> f64 {
    -(coherences.0 + coherences.1).arg()
}

/// Gain-to-damping ratio at which the two resonant coherences cancel:
/// the positive root of `3γ² − (5 + 2√2)γ − 2 = 0`.
pub fn blockade_ratio() -> f64 {
    let b = 5.0 + 2.0 * SQRT_2;
    (b + (b * b + 24.0).sqrt()) / 6.0
}

fn cone_phase(alpha: f64, sign: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * sign * alpha.cos())
}

/// Phase of the unperturbed oscillator after one adiabatic turn of the axis.
pub fn gp_no_signal(alpha: f64, populations: [f64; 3]) -> f64 {
    gp_no_signal_directed(alpha, populations, 1.0)
}

fn gp_no_signal_directed(alpha: f64, [p1, p0, pm]: [f64; 3], sign: f64) -> f64 {
    principal_arg(cone_phase(alpha, sign) * p1 + p0 + cone_phase(alpha, -sign) * pm)
}

/// Ingredients shared by the signal-dependent phase formulas.
struct SignalTerms {
    pops: [f64; 3],
    c10: C64,
    c0m: C64,
    /// `c₊₁,₀ / (p₊₁ − p₀)`
    u: C64,
    /// `c₀,₋₁ / (p₀ − p₋₁)`
    v: C64,
    /// `√2·T·sin α·ω/ω₀`
    kick: f64,
}

impl SignalTerms {
    fn new(p: &VdpParams) -> Self {
        let alpha = p.axis.alpha;
        let delta = p.detuning() - p.axis.omega * alpha.cos();
        let pops = vdp_populations(p.gamma_g, p.gamma_d);
        let (c10, c0m) = vdp_coherences(p.gamma_g, p.gamma_d, delta, p.phi_sig);
        SignalTerms {
            pops,
            c10,
            c0m,
            u: c10 / (pops[0] - pops[1]),
            v: c0m / (pops[1] - pops[2]),
            kick: SQRT_2 * p.strength * alpha.sin() * p.axis.omega / p.omega0,
        }
    }

    /// `−∫<φ_m|φ̇_m>` for `m = +1, 0, −1` after rotation angle `ωτ`.
    fn connections(&self, omega_tau: f64, cos_alpha: f64) -> [C64; 3] {
        let i = C64::i();
        let (u, v) = (self.u.im, self.v.im);
        [
            i * (omega_tau * cos_alpha + self.kick * u),
            i * self.kick * (v - u),
            -i * (omega_tau * cos_alpha + self.kick * v),
        ]
    }
}

/// Phase after one full turn of the axis in the presence of the signal,
/// with the detuning inside the coherences shifted by `−ω cos α`.
pub fn gp_cyclic_with_signal(p: &VdpParams) -> f64 {
    let terms = SignalTerms::new(p);
    let omega_tau = 2.0 * PI * p.axis.omega.signum();
    let conn = terms.connections(omega_tau, p.axis.alpha.cos());
    let z: C64 = (0..3).map(|m| conn[m].exp() * terms.pops[m]).sum();
    principal_arg(z)
}

/// Phase after evolution time `tau` from the resonant small-signal overlaps
/// and connection integrals. The expressions are accurate near full turns of
/// the axis; their signal terms do not vanish as `tau → 0`.
pub fn gp_noncyclic(p: &VdpParams, tau: f64) -> f64 {
    let terms = SignalTerms::new(p);
    let i = C64::i();
    let (ca, sa) = (p.axis.alpha.cos(), p.axis.alpha.sin());
    let half = 0.5 * p.axis.omega * tau;
    let minus = C64::new(half.cos(), -ca * half.sin());
    let plus = C64::new(half.cos(), ca * half.sin());
    let shift = i * SQRT_2 * p.strength * sa * half.sin();
    let overlaps = [
        minus * (minus - shift * terms.u),
        C64::from(ca * ca + sa * sa * (2.0 * half).cos()) - shift * (-minus * terms.u.conj() + plus * terms.v),
        plus * (plus + shift * terms.v.conj()),
    ];
    let conn = terms.connections(p.axis.omega * tau, ca);
    let z: C64 = (0..3).map(|m| overlaps[m] * conn[m].exp() * terms.pops[m]).sum();
    principal_arg(z)
}

/// Coherences entering the signal-dependent phase formulas.
pub fn shifted_coherences(p: &VdpParams) -> (C64, C64) {
    let terms = SignalTerms::new(p);
    (terms.c10, terms.c0m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDephasingParams {
    pub eta: f64,
    pub lambda: f64,
    pub theta0: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDephasingGp {
    /// Sum of both terms, principal value.
    pub gamma: f64,
    pub arg_term: f64,
    pub log_term: f64,
    /// Initial state on a pole of the Bloch sphere, where the log term diverges.
    pub pole: bool,
}

/// Exact phase of the dephasing qubit started at polar angle `θ₀`.
pub fn qubit_dephasing_gp(q: &QubitDephasingParams) -> QubitDephasingGp {
    let QubitDephasingParams { eta, lambda, theta0, tau } = *q;
    let (s0, c0) = theta0.sin_cos();
    if s0.abs() < 1e-15 {
        let gamma = principal_arg(C64::from_polar(1.0, -0.5 * eta * tau));
        return QubitDephasingGp { gamma, arg_term: gamma, log_term: 0.0, pole: true };
    }
    let theta_tau = (((-lambda * tau).exp() * theta0.tan()).atan() + PI).rem_euclid(PI);
    let amp = C64::from_polar((0.5 * theta_tau).cos() * (0.5 * theta0).cos(), -0.5 * eta * tau)
        + C64::from_polar((0.5 * theta_tau).sin() * (0.5 * theta0).sin(), 0.5 * eta * tau);
    let arg_term = principal_arg(amp);
    // ln of (1 − c)(r + c) / ((1 + c)(r − c)), with r² − c² = s²e^{−2Λτ}
    // used for whichever of r ± c suffers cancellation
    let decay = -2.0 * lambda * tau;
    let root = (c0 * c0 + s0 * s0 * decay.exp()).sqrt();
    let ln_gap = 2.0 * s0.abs().ln() + decay;
    let (ln_plus, ln_minus) = if c0 >= 0.0 {
        let ln_plus = (root + c0).ln();
        (ln_plus, ln_gap - ln_plus)
    } else {
        let ln_minus = (root - c0).ln();
        (ln_gap - ln_minus, ln_minus)
    };
    let ln_ratio = 2.0 * (0.5 * theta0).sin().abs().ln() - 2.0 * (0.5 * theta0).cos().abs().ln() + ln_plus - ln_minus;
    let log_term = eta / (4.0 * lambda) * ln_ratio;
    QubitDephasingGp {
        gamma: principal_arg(C64::from_polar(1.0, arg_term + log_term)),
        arg_term,
        log_term,
        pole: false,
    }
}

/// `H = (η/2)σz` with the single jump operator `√(Λ/2)·σz`.
pub fn qubit_dephasing_model(eta: f64, lambda: f64) -> Result<StaticModel> {
    if !(lambda >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("need finite eta and lambda >= 0, got {eta} and {lambda}"),
        });
    }
    let [_, _, sz] = pauli();
    StaticModel::new(&sz * C64::from(0.5 * eta), vec![&sz * C64::from((0.5 * lambda).sqrt())])
}

/// `(1 + r·σ)/2` with `r = (sin θ₀, 0, cos θ₀)`.
pub fn qubit_initial_state(theta0: f64) -> Operator {
    let [sx, _, sz] = pauli();
    let (s, c) = theta0.sin_cos();
    (Operator::identity(2, 2) + sx * C64::from(s) + sz * C64::from(c)) * C64::from(0.5)
}

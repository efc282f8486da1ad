//! Spin-1 van der Pol limit-cycle oscillator with a quantization axis that
//! rotates on a cone and an optional external signal.

use std::f64::consts::{PI, SQRT_2};

use crate::evolver::{periodic_state, steady_state, Generator, LindbladModel, Propagator, StaticModel};
use crate::gp::{geometric_phase_stream, GpOptions, GpResult};
use crate::spinops::{spin1_operators, ConeAxis, ConeRotation, Operator, SpinOperators};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdpParams {
    pub omega0: f64,
    pub gamma_g: f64,
    pub gamma_d: f64,
    pub axis: ConeAxis,
    /// Signal strength `T`.
    pub strength: f64,
    pub omega_sig: f64,
    pub phi_sig: f64,
    pub tau: f64,
    pub n_step: usize,
}

impl VdpParams {
    /// `ω̃ − ω₀`
    pub fn detuning(&self) -> f64 {
        self.omega_sig - self.omega0
    }

    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.omega_sig = self.omega0 + delta;
        self
    }

    pub fn dt(&self) -> f64 {
        self.tau / self.n_step as f64
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("must be positive, got {x}") })
            }
        };
        positive("gamma_g", self.gamma_g)?;
        positive("gamma_d", self.gamma_d)?;
        positive("tau", self.tau)?;
        for (name, x) in
            [("omega0", self.omega0), ("T", self.strength), ("omega_sig", self.omega_sig), ("phi_sig", self.phi_sig)]
        {
            if !x.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("must be finite, got {x}") });
            }
        }
        if self.strength < 0.0 {
            return Err(Error::InvalidParameter {
                name: "T",
                reason: format!("must be non-negative, got {}", self.strength),
            });
        }
        if self.n_step < 4 {
            return Err(Error::InvalidParameter {
                name: "n_step",
                reason: format!("must be at least 4, got {}", self.n_step),
            });
        }
        ConeAxis::new(self.axis.alpha, self.axis.omega)?;
        Ok(())
    }
}

/// `Γ₁ = √(γg/2)(√2 Sz S₊ − S₊ Sz)` and `Γ₂ = √(γd/2) S₋²`.
pub fn vdp_jump_operators(gamma_g: f64, gamma_d: f64) -> (Operator, Operator) {
    let s = spin1_operators();
    let g1 = (&s.sz * &s.splus * C64::from(SQRT_2) - &s.splus * &s.sz) * C64::from((0.5 * gamma_g).sqrt());
    let g2 = &s.sminus * &s.sminus * C64::from((0.5 * gamma_d).sqrt());
    (g1, g2)
}

fn signal(p: &VdpParams, s: &SpinOperators, t: f64) -> Operator {
    &s.sx * C64::from(p.strength * (p.omega_sig * t + p.phi_sig).cos())
}

/// Oscillator in the laboratory frame: `H(t) = R(ω₀Sz + T cos(ω̃t + φ̃)Sx)R†`
/// with jump operators `RΓR†`.
#[derive(Debug, Clone)]
pub struct LabFrameModel {
    params: VdpParams,
    spin: SpinOperators,
    rotation: ConeRotation,
    jumps: [Operator; 2],
}

impl LabFrameModel {
    fn rotated(&self, t: f64) -> (Operator, [Operator; 2]) {
        let r = self.rotation.at(t);
        let rd = r.adjoint();
        let h = &self.spin.sz * C64::from(self.params.omega0) + signal(&self.params, &self.spin, t);
        let jumps = self.jumps.clone().map(|g| &r * g * &rd);
        (&r * h * &rd, jumps)
    }
}

impl LindbladModel for LabFrameModel {
    fn dim(&self) -> usize {
        3
    }

    fn hamiltonian_at(&self, t: f64) -> Operator {
        self.rotated(t).0
    }

    fn jump_operators_at(&self, t: f64) -> Vec<Operator> {
        self.rotated(t).1.to_vec()
    }

    fn is_time_independent(&self) -> bool {
        self.params.axis.omega == 0.0 && self.params.strength == 0.0
    }

    fn generator_at(&self, t: f64) -> Generator {
        let (h, jumps) = self.rotated(t);
        Generator::new(&h, jumps.to_vec())
    }
}

pub fn build_lab_frame_model(p: &VdpParams) -> Result<LabFrameModel> {
    p.validate()?;
    let (g1, g2) = vdp_jump_operators(p.gamma_g, p.gamma_d);
    Ok(LabFrameModel { params: *p, spin: spin1_operators(), rotation: ConeRotation::new(2, p.axis), jumps: [g1, g2] })
}

/// Time-independent model in the frame rotating with the signal.
pub fn build_rwa_model(p: &VdpParams) -> Result<StaticModel> {
    p.validate()?;
    let s = spin1_operators();
    let dz = p.omega0 - p.omega_sig + p.axis.omega * p.axis.alpha.cos();
    let drive = C64::from_polar(0.25 * p.strength, -p.phi_sig);
    let h = &s.sz * C64::from(dz) + &s.splus * drive + &s.sminus * drive.conj();
    let (g1, g2) = vdp_jump_operators(p.gamma_g, p.gamma_d);
    StaticModel::new(h, vec![g1, g2])
}

/// Oscillator in the frame co-rotating with the quantization axis:
/// `H(t) = ω₀Sz − ω n·S + T cos(ω̃t + φ̃)Sx` with unrotated jumps. Its only
/// time dependence is the signal.
#[derive(Debug, Clone)]
pub struct AxisFrameModel {
    params: VdpParams,
    spin: SpinOperators,
    static_part: Operator,
    jumps: Vec<Operator>,
}

impl LindbladModel for AxisFrameModel {
    fn dim(&self) -> usize {
        3
    }

    fn hamiltonian_at(&self, t: f64) -> Operator {
        &self.static_part + signal(&self.params, &self.spin, t)
    }

    fn jump_operators_at(&self, _t: f64) -> Vec<Operator> {
        self.jumps.clone()
    }

    fn is_time_independent(&self) -> bool {
        self.params.strength == 0.0 || self.params.omega_sig == 0.0
    }
}

pub fn build_axis_frame_model(p: &VdpParams) -> Result<AxisFrameModel> {
    p.validate()?;
    let spin = spin1_operators();
    let static_part = &spin.sz * C64::from(p.omega0) - spin.along(p.axis.direction()) * C64::from(p.axis.omega);
    let (g1, g2) = vdp_jump_operators(p.gamma_g, p.gamma_d);
    Ok(AxisFrameModel { params: *p, spin, static_part, jumps: vec![g1, g2] })
}

/// Steps per signal period used to locate the periodic initial state.
fn steps_per_period(p: &VdpParams, period: f64) -> usize {
    let rate = p.omega0.abs() + p.axis.omega.abs() + p.strength + 2.0 * (p.gamma_g + p.gamma_d);
    ((period * rate / 0.05).ceil() as usize).max(64)
}

/// Lab-frame state at `t = 0` on the oscillator's long-time attractor: the
/// periodic state of the co-rotating frame, or its steady state when the
/// signal is absent or constant.
pub fn initial_state(p: &VdpParams) -> Result<Operator> {
    let model = build_axis_frame_model(p)?;
    if model.is_time_independent() {
        return steady_state(&model, 0.0);
    }
    let period = 2.0 * PI / p.omega_sig.abs();
    periodic_state(&model, 0.0, period, steps_per_period(p, period))
}

/// Lab-frame evolution from [`initial_state`] over `[0, τ]`, streamed.
pub fn lab_frame_path(p: &VdpParams) -> Result<(LabFrameModel, Operator)> {
    Ok((build_lab_frame_model(p)?, initial_state(p)?))
}

/// Geometric phase of the lab-frame evolution over `[0, τ]`.
pub fn gp_numeric(p: &VdpParams, options: &GpOptions) -> Result<GpResult> {
    let (model, rho0) = lab_frame_path(p)?;
    let states = Propagator::new(&model, rho0, 0.0, p.tau, p.n_step)?;
    geometric_phase_stream(states, p.dt(), options)
}

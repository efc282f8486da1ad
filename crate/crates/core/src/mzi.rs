//! Interferometric visibility and phase of a dissipative system.
//!
//! Postselecting on no quantum jump, the arm containing the system evolves
//! with `U = T exp(−i∫H_eff dt)`, `H_eff = H − (i/2)ΣL†L`. The interference
//! pattern then has visibility `|Tr(Uρ₀)|` and is shifted by `arg Tr(Uρ₀)`.

use crate::evolver::{Generator, LindbladModel};
use crate::gp::{principal_arg, MIN_MODULUS};
use crate::spinops::{validate_density, Operator};
use crate::{Error, Result, C64};

/// Largest `‖H_eff‖·dt` of one factor in the time-ordered product.
pub const MAX_PHASE_PER_FACTOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziResult {
    pub visibility: f64,
    /// Principal value in `(−π, π]`.
    pub phase: f64,
}

fn exp_step(h_eff: &Operator, dt: f64) -> Operator {
    (h_eff * C64::new(0.0, -dt)).exp()
}

/// `T exp(−i∫₀^τ H_eff dt)` as a product of `n_sub` midpoint exponentials,
/// or a single exponential for time-independent models.
pub fn effective_propagator<M: LindbladModel + ?Sized>(model: &M, tau: f64, n_sub: usize) -> Result<Operator> {
    if n_sub == 0 {
        return Err(Error::InvalidParameter { name: "n_sub", reason: "must be at least 1".into() });
    }
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidParameter { name: "tau", reason: format!("must be >= 0, got {tau}") });
    }
    if model.is_time_independent() {
        return Ok(exp_step(&model.generator_at(0.0).h_eff, tau));
    }
    let dt = tau / n_sub as f64;
    let d = model.dim();
    let mut u = Operator::identity(d, d);
    for j in 0..n_sub {
        let h = model.generator_at((j as f64 + 0.5) * dt).h_eff;
        u = exp_step(&h, dt) * u;
    }
    Ok(u)
}

/// Number of factors keeping `‖H_eff‖·dt` at most [`MAX_PHASE_PER_FACTOR`],
/// with the norm taken at the start of the interval.
pub fn substeps_for<M: LindbladModel + ?Sized>(model: &M, tau: f64) -> usize {
    if model.is_time_independent() {
        return 1;
    }
    let norm = model.generator_at(0.0).h_eff.norm();
    ((norm * tau / MAX_PHASE_PER_FACTOR).ceil() as usize).max(1)
}

/// `Tr(U ρ₀)` without conditioning checks.
pub fn interference_amplitude<M: LindbladModel + ?Sized>(rho0: &Operator, model: &M, tau: f64) -> Result<C64> {
    validate_density(rho0)?;
    if rho0.nrows() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: rho0.nrows() });
    }
    let u = effective_propagator(model, tau, substeps_for(model, tau))?;
    Ok((u * rho0).trace())
}

pub fn visibility_and_phase<M: LindbladModel + ?Sized>(rho0: &Operator, model: &M, tau: f64) -> Result<MziResult> {
    let z = interference_amplitude(rho0, model, tau)?;
    let visibility = z.norm();
    if !(visibility >= MIN_MODULUS) {
        return Err(Error::IllConditionedPhase { modulus: visibility });
    }
    Ok(MziResult { visibility, phase: principal_arg(z) })
}

/// Model with the reference energy `χ/τ` added to its Hamiltonian, which
/// multiplies the interference amplitude after time `τ` by `e^{−iχ}`.
pub struct ReferencePhase<'m, M: ?Sized> {
    pub model: &'m M,
    pub chi: f64,
    pub tau: f64,
}

impl<M: LindbladModel + ?Sized> LindbladModel for ReferencePhase<'_, M> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn hamiltonian_at(&self, t: f64) -> Operator {
        let d = self.dim();
        self.model.hamiltonian_at(t) + Operator::identity(d, d) * C64::from(self.chi / self.tau)
    }

    fn jump_operators_at(&self, t: f64) -> Vec<Operator> {
        self.model.jump_operators_at(t)
    }

    fn is_time_independent(&self) -> bool {
        self.model.is_time_independent()
    }

    fn generator_at(&self, t: f64) -> Generator {
        let mut g = self.model.generator_at(t);
        for k in 0..self.dim() {
            g.h_eff[(k, k)] += self.chi / self.tau;
        }
        g
    }
}

//! Lindblad time evolution on equidistant grids and steady states.

use nalgebra::{DMatrix, DVector};

use crate::spinops::{hermitize, Operator};
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Trace drift that aborts an integration.
pub const MAX_TRACE_DRIFT: f64 = 1e-6;

/// Right-hand side of a Lindblad equation frozen at one instant, stored as
/// the non-Hermitian `H - (i/2) Σ L†L` together with the jump operators.
#[derive(Debug, Clone)]
pub struct Generator {
    pub h_eff: Operator,
    pub jumps: Vec<Operator>,
}

impl Generator {
    pub fn new(hamiltonian: &Operator, jumps: Vec<Operator>) -> Self {
        let dim = hamiltonian.nrows();
        let mut decay = Operator::zeros(dim, dim);
        for l in &jumps {
            decay += l.adjoint() * l;
        }
        Generator { h_eff: hamiltonian - decay * (0.5 * I), jumps }
    }

    pub fn dim(&self) -> usize {
        self.h_eff.nrows()
    }

    /// `-i[H, ρ] + Σ D[L]ρ`
    pub fn apply(&self, rho: &Operator) -> Operator {
        let mut out = &self.h_eff * rho * (-I);
        out += rho * self.h_eff.adjoint() * I;
        for l in &self.jumps {
            out += l * rho * l.adjoint();
        }
        out
    }

    /// Matrix of the generator acting on column-major `vec(ρ)`.
    pub fn superoperator(&self) -> DMatrix<C64> {
        let d = self.dim();
        let id = Operator::identity(d, d);
        let mut sup = id.kronecker(&self.h_eff) * (-I);
        sup += self.h_eff.adjoint().transpose().kronecker(&id) * I;
        for l in &self.jumps {
            sup += l.conjugate().kronecker(l);
        }
        sup
    }
}

/// A Lindblad master equation with possibly time-dependent operators. Jump
/// operators carry their rates as prefactors.
pub trait LindbladModel: Send + Sync {
    fn dim(&self) -> usize;

    fn hamiltonian_at(&self, t: f64) -> Operator;

    fn jump_operators_at(&self, t: f64) -> Vec<Operator>;

    fn is_time_independent(&self) -> bool {
        false
    }

    fn generator_at(&self, t: f64) -> Generator {
        Generator::new(&self.hamiltonian_at(t), self.jump_operators_at(t))
    }
}

/// Time-independent model.
#[derive(Debug, Clone)]
pub struct StaticModel {
    hamiltonian: Operator,
    jumps: Vec<Operator>,
    generator: Generator,
}

impl StaticModel {
    pub fn new(hamiltonian: Operator, jumps: Vec<Operator>) -> Result<Self> {
        let dim = hamiltonian.nrows();
        if !hamiltonian.is_square() {
            return Err(Error::DimensionMismatch { expected: dim, found: hamiltonian.ncols() });
        }
        if let Some(bad) = jumps.iter().find(|l| l.shape() != (dim, dim)) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.nrows() });
        }
        let generator = Generator::new(&hamiltonian, jumps.clone());
        Ok(StaticModel { hamiltonian, jumps, generator })
    }
}

impl LindbladModel for StaticModel {
    fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    fn hamiltonian_at(&self, _t: f64) -> Operator {
        self.hamiltonian.clone()
    }

    fn jump_operators_at(&self, _t: f64) -> Vec<Operator> {
        self.jumps.clone()
    }

    fn is_time_independent(&self) -> bool {
        true
    }

    fn generator_at(&self, _t: f64) -> Generator {
        self.generator.clone()
    }
}

fn check_dim(model: &(impl LindbladModel + ?Sized), rho: &Operator) -> Result<()> {
    if rho.shape() != (model.dim(), model.dim()) {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: rho.nrows() });
    }
    Ok(())
}

/// `dρ/dt` of the model at time `t`.
pub fn liouvillian_apply(model: &(impl LindbladModel + ?Sized), rho: &Operator, t: f64) -> Result<Operator> {
    check_dim(model, rho)?;
    Ok(model.generator_at(t).apply(rho))
}

/// Density matrices at `t0 + j dt` for `j = 0..=n_step`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<Operator>,
}

impl Trajectory {
    pub fn n_step(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        self.n_step() as f64 * self.dt
    }
}

/// Streaming classical RK4 integration yielding one state per grid point,
/// the initial state included.
pub struct Propagator<'m, M: LindbladModel + ?Sized> {
    model: &'m M,
    rho: Operator,
    t0: f64,
    dt: f64,
    n_step: usize,
    next: usize,
    trace0: C64,
    generator: Option<Generator>,
    failed: bool,
}

impl<'m, M: LindbladModel + ?Sized> Propagator<'m, M> {
    pub fn new(model: &'m M, rho0: Operator, t0: f64, tau: f64, n_step: usize) -> Result<Self> {
        check_dim(model, &rho0)?;
        if n_step < 4 {
            return Err(Error::InvalidParameter { name: "n_step", reason: format!("{n_step} < 4") });
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter { name: "tau", reason: format!("{tau}") });
        }
        let trace0 = rho0.trace();
        Ok(Propagator {
            model,
            rho: rho0,
            t0,
            dt: tau / n_step as f64,
            n_step,
            next: 0,
            trace0,
            generator: None,
            failed: false,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_step(&self) -> usize {
        self.n_step
    }

    fn generator(&self, t: f64) -> Generator {
        self.model.generator_at(t)
    }

    fn step(&mut self, t: f64) {
        let h = self.dt;
        let g0 = match self.generator.take() {
            Some(g) if !self.model.is_time_independent() => g,
            Some(g) => {
                self.generator = Some(g.clone());
                g
            }
            None => self.generator(t),
        };
        let (g_half, g_end) = if self.model.is_time_independent() {
            (g0.clone(), g0.clone())
        } else {
            (self.generator(t + 0.5 * h), self.generator(t + h))
        };
        let rho = &self.rho;
        let k1 = g0.apply(rho);
        let k2 = g_half.apply(&(rho + &k1 * C64::from(0.5 * h)));
        let k3 = g_half.apply(&(rho + &k2 * C64::from(0.5 * h)));
        let k4 = g_end.apply(&(rho + &k3 * C64::from(h)));
        let incr = (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(h / 6.0);
        self.rho = hermitize(&(rho + incr));
        self.generator = Some(g_end);
    }
}

impl<M: LindbladModel + ?Sized> Iterator for Propagator<'_, M> {
    type Item = Result<Operator>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.next > self.n_step {
            return None;
        }
        let j = self.next;
        if j > 0 {
            self.step(self.t0 + (j - 1) as f64 * self.dt);
            let drift = (self.rho.trace() - self.trace0).norm();
            if !(drift <= MAX_TRACE_DRIFT) {
                self.failed = true;
                return Some(Err(Error::StepInstability { step: j, drift }));
            }
        }
        self.next += 1;
        Some(Ok(self.rho.clone()))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.n_step + 1).saturating_sub(self.next);
        (0, Some(left))
    }
}

/// Propagates `rho0` over `[0, tau]` with `n_step` RK4 steps of equal size.
pub fn evolve(model: &(impl LindbladModel + ?Sized), rho0: &Operator, tau: f64, n_step: usize) -> Result<Trajectory> {
    evolve_from(model, rho0, 0.0, tau, n_step)
}

pub fn evolve_from(
    model: &(impl LindbladModel + ?Sized),
    rho0: &Operator,
    t0: f64,
    tau: f64,
    n_step: usize,
) -> Result<Trajectory> {
    let prop = Propagator::new(model, rho0.clone(), t0, tau, n_step)?;
    let dt = prop.dt();
    let states = prop.collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { t0, dt, states })
}

/// Final state of a propagation without keeping the intermediate states.
pub fn propagate_final(
    model: &(impl LindbladModel + ?Sized),
    rho0: &Operator,
    t0: f64,
    tau: f64,
    n_step: usize,
) -> Result<Operator> {
    let mut last = rho0.clone();
    for state in Propagator::new(model, rho0.clone(), t0, tau, n_step)? {
        last = state?;
    }
    Ok(last)
}

/// Smallest singular value allowed for the null vector, relative to the
/// largest one.
pub const NULL_TOL: f64 = 1e-10;
/// Smallest admissible second-smallest singular value, relative to the largest.
pub const GAP_TOL: f64 = 1e-8;

/// Unique trace-one fixed point of the model frozen at time `t`.
pub fn steady_state(model: &(impl LindbladModel + ?Sized), t: f64) -> Result<Operator> {
    steady_state_of(&model.generator_at(t))
}

pub fn steady_state_of(generator: &Generator) -> Result<Operator> {
    fixed_point(&generator.superoperator(), generator.dim())
}

/// Density matrix spanning the one-dimensional null space of `sup`, which
/// acts on column-major vectorized operators.
fn fixed_point(sup: &DMatrix<C64>, d: usize) -> Result<Operator> {
    let svd = sup.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let scale = svd.singular_values[order[order.len() - 1]].max(1.0);
    let smallest = svd.singular_values[order[0]];
    let next = svd.singular_values[order[1]];
    if smallest > NULL_TOL * scale || next < GAP_TOL * scale {
        return Err(Error::NonUniqueSteadyState { smallest, next });
    }
    let row = v_t.row(order[0]);
    let rho = Operator::from_fn(d, d, |r, c| row[c * d + r].conj());
    let rho = hermitize(&(&rho / rho.trace()));
    let vec = DVector::from_column_slice(rho.as_slice());
    let residual = (sup * vec).camax();
    if residual > NULL_TOL * scale {
        return Err(Error::SteadyStateResidual { residual });
    }
    Ok(rho)
}

/// Superoperator of the evolution from `t0` to `t0 + period`, integrated
/// with `n_step` RK4 steps.
pub fn period_map(model: &(impl LindbladModel + ?Sized), t0: f64, period: f64, n_step: usize) -> Result<DMatrix<C64>> {
    if !(period > 0.0) || n_step == 0 {
        return Err(Error::InvalidParameter {
            name: "period",
            reason: format!("need period > 0 and steps > 0, got {period} and {n_step}"),
        });
    }
    let d2 = model.dim() * model.dim();
    let dt = period / n_step as f64;
    let mut map = DMatrix::<C64>::identity(d2, d2);
    let mut end = model.generator_at(t0).superoperator();
    for j in 0..n_step {
        let t = t0 + j as f64 * dt;
        let start = end;
        let mid = model.generator_at(t + 0.5 * dt).superoperator();
        end = model.generator_at(t + dt).superoperator();
        let k1 = &start * &map;
        let k2 = &mid * (&map + &k1 * C64::from(0.5 * dt));
        let k3 = &mid * (&map + &k2 * C64::from(0.5 * dt));
        let k4 = &end * (&map + &k3 * C64::from(dt));
        map += (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(dt / 6.0);
    }
    Ok(map)
}

/// State at `t0` of the unique periodic solution of a model whose generator
/// has period `period`.
pub fn periodic_state(model: &(impl LindbladModel + ?Sized), t0: f64, period: f64, n_step: usize) -> Result<Operator> {
    let d = model.dim();
    let map = period_map(model, t0, period, n_step)?;
    fixed_point(&(map - DMatrix::<C64>::identity(d * d, d * d)), d)
}

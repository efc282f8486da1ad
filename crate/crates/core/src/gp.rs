//! Kinematic geometric phase of a path of density matrices.
//!
//! For a path `ρ(t) = Σ_k p_k(t) |φ_k(t)><φ_k(t)|` with nondegenerate
//! populations the phase is
//!
//! ```text
//! γ = arg Σ_k sqrt(p_k(0) p_k(τ)) <φ_k(0)|φ_k(τ)> exp(-∫ <φ_k|φ̇_k> dt)
//! ```
//!
//! The pipeline works on equidistant samples: each `ρ_j` is diagonalized,
//! eigenvectors are labeled and gauge fixed so that a pivot entry is real and
//! positive, differentiated with fourth-order five-point stencils, and the
//! overlaps `<φ_k|φ̇_k>` are integrated with the extended Simpson rule.
//!
//! The pivot of eigenvector `k` starts at entry `k`. When its magnitude drops
//! below [`GpOptions::pivot_tol`] the pivot moves to the largest entry and
//! stays there. Each move splits the connection integral into segments that
//! are smooth in their own gauge; the phase between the two gauges at the
//! junction is folded back into the result, which keeps the assembled phase
//! identical to a single smooth gauge.

use std::collections::VecDeque;

use nalgebra::SymmetricEigen;

use crate::evolver::Trajectory;
use crate::quadrature::{SimpsonAccumulator, Stencil};
use crate::spinops::{hermitize, Operator, StateVector};
use crate::{Error, Result, C64};

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;
pub const DEFAULT_PIVOT_TOL: f64 = 0.1;
/// Smallest admissible overlap when tracking eigenvectors between steps.
pub const MIN_TRACKING_OVERLAP: f64 = 0.5;
/// Below this modulus the assembled phase is considered undefined.
pub const MIN_MODULUS: f64 = 1e-12;

/// How eigenvectors are matched between consecutive steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Labeling {
    /// Sort by ascending population at every step.
    #[default]
    Ascending,
    /// Greedy matching to the previous step by largest overlap.
    TrackOverlap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpOptions {
    pub degeneracy_tol: f64,
    pub pivot_tol: f64,
    pub labeling: Labeling,
}

impl Default for GpOptions {
    fn default() -> Self {
        GpOptions {
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            pivot_tol: DEFAULT_PIVOT_TOL,
            labeling: Labeling::Ascending,
        }
    }
}

impl GpOptions {
    pub fn with_degeneracy_tol(degeneracy_tol: f64) -> Self {
        GpOptions { degeneracy_tol, ..Default::default() }
    }
}

/// Labeled and gauge-fixed eigen-decomposition of one density matrix.
#[derive(Debug, Clone)]
pub struct EigenStep {
    pub populations: Vec<f64>,
    pub vectors: Vec<StateVector>,
    pub pivots: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct EigenPath {
    pub steps: Vec<EigenStep>,
}

impl EigenPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.steps.first().map_or(0, |s| s.vectors.len())
    }
}

/// `v` multiplied by the phase that makes `v[pivot]` real and non-negative.
pub fn regauge(v: &StateVector, pivot: usize) -> StateVector {
    let p = v[pivot];
    let r = p.norm();
    if r == 0.0 {
        v.clone()
    } else {
        v * (p.conj() / r)
    }
}

fn largest_entry(v: &StateVector) -> usize {
    v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).map_or(0, |(i, _)| i)
}

fn inner(a: &StateVector, b: &StateVector) -> C64 {
    a.dotc(b)
}

/// Hermitian eigen-decomposition with eigenvalues in ascending order.
pub fn sorted_eigen(rho: &Operator) -> (Vec<f64>, Vec<StateVector>) {
    let eig = SymmetricEigen::new(hermitize(rho));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (values, vectors)
}

/// Labels eigenpairs consistently along a path and fixes their gauge.
#[derive(Debug, Clone)]
struct Labeler {
    options: GpOptions,
    previous: Option<EigenStep>,
    step: usize,
}

impl Labeler {
    fn new(options: GpOptions) -> Self {
        Labeler { options, previous: None, step: 0 }
    }

    /// Consumes one decomposition with eigenvalues sorted ascending.
    fn push(&mut self, values: Vec<f64>, vectors: Vec<StateVector>) -> Result<EigenStep> {
        let step = self.step;
        self.step += 1;
        let gap = values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if gap < self.options.degeneracy_tol {
            return Err(Error::DegeneratePopulations { step, gap });
        }
        let (values, vectors) = match (&self.previous, self.options.labeling) {
            (Some(prev), Labeling::TrackOverlap) => track(prev, values, vectors, step)?,
            _ => (values, vectors),
        };
        let dim = vectors.len();
        let pivots: Vec<usize> = (0..dim)
            .map(|k| {
                let v = &vectors[k];
                let keep = self.previous.as_ref().map_or(k, |p| p.pivots[k]);
                if v[keep].norm() >= self.options.pivot_tol {
                    keep
                } else {
                    largest_entry(v)
                }
            })
            .collect();
        let vectors = vectors.iter().zip(&pivots).map(|(v, &p)| regauge(v, p)).collect();
        let out = EigenStep { populations: values, vectors, pivots };
        self.previous = Some(out.clone());
        Ok(out)
    }
}

fn track(
    prev: &EigenStep,
    values: Vec<f64>,
    vectors: Vec<StateVector>,
    step: usize,
) -> Result<(Vec<f64>, Vec<StateVector>)> {
    let dim = vectors.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(dim * dim);
    for (k, old) in prev.vectors.iter().enumerate() {
        for (l, new) in vectors.iter().enumerate() {
            pairs.push((inner(old, new).norm(), k, l));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut assigned: Vec<Option<usize>> = vec![None; dim];
    let mut taken = vec![false; dim];
    for (overlap, k, l) in pairs {
        if assigned[k].is_some() || taken[l] {
            continue;
        }
        if overlap < MIN_TRACKING_OVERLAP {
            return Err(Error::LabelTracking { step, overlap });
        }
        assigned[k] = Some(l);
        taken[l] = true;
    }
    let order: Vec<usize> = assigned.into_iter().map(|l| l.expect("complete matching")).collect();
    Ok((order.iter().map(|&l| values[l]).collect(), order.iter().map(|&l| vectors[l].clone()).collect()))
}

/// Labeled, gauge-fixed eigen-decomposition of every state of a trajectory.
pub fn eigen_decompose_path(traj: &Trajectory, degeneracy_tol: f64) -> Result<EigenPath> {
    eigen_decompose_path_with(traj, &GpOptions::with_degeneracy_tol(degeneracy_tol))
}

pub fn eigen_decompose_path_with(traj: &Trajectory, options: &GpOptions) -> Result<EigenPath> {
    let mut labeler = Labeler::new(*options);
    let steps = traj
        .states
        .iter()
        .map(|rho| {
            let (values, vectors) = sorted_eigen(rho);
            labeler.push(values, vectors)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenPath { steps })
}

/// Derivative at one point of a five-point window of vectors, all expressed
/// in the gauge defined by `pivot`.
fn derivative_in_gauge(window: [&StateVector; 5], stencil: Stencil, pivot: usize, dt: f64) -> StateVector {
    let gauged: [StateVector; 5] = window.map(|v| regauge(v, pivot));
    let dim = gauged[0].len();
    StateVector::from_fn(dim, |c, _| {
        let samples: [C64; 5] = std::array::from_fn(|q| gauged[q][c]);
        stencil.apply(samples, dt)
    })
}

fn window_of(path: &EigenPath, start: usize, k: usize) -> [&StateVector; 5] {
    std::array::from_fn(|q| &path.steps[start + q].vectors[k])
}

/// Time derivative of every eigenvector at every step, each in the gauge of
/// its own step.
pub fn differentiate_eigenvectors(path: &EigenPath, dt: f64) -> Result<Vec<Vec<StateVector>>> {
    let n = path.len();
    if n < 5 {
        return Err(Error::InvalidParameter {
            name: "n_step",
            reason: format!("{} steps, need at least 4", n.saturating_sub(1)),
        });
    }
    Ok((0..n)
        .map(|j| {
            let (stencil, start) = Stencil::for_point(j, n);
            let step = &path.steps[j];
            (0..step.vectors.len())
                .map(|k| derivative_in_gauge(window_of(path, start, k), stencil, step.pivots[k], dt))
                .collect()
        })
        .collect())
}

/// Connection integral of one eigenvector, split into gauge segments.
#[derive(Debug, Clone)]
struct ConnectionIntegral {
    segment: SimpsonAccumulator<C64>,
    closed: C64,
    /// Product of the phases between adjacent gauges at segment junctions.
    junctions: C64,
    pivot: Option<usize>,
    switches: usize,
}

impl ConnectionIntegral {
    fn new() -> Self {
        ConnectionIntegral {
            segment: SimpsonAccumulator::new(),
            closed: C64::default(),
            junctions: C64::from(1.0),
            pivot: None,
            switches: 0,
        }
    }

    /// Adds the integrand at the next grid point. `in_gauge(p)` returns the
    /// eigenvector and its derivative at this point in the gauge of pivot `p`.
    fn push(&mut self, pivot: usize, dt: f64, in_gauge: impl Fn(usize) -> (StateVector, StateVector)) {
        let (phi, dphi) = in_gauge(pivot);
        match self.pivot {
            Some(old) if old != pivot => {
                let (phi_old, dphi_old) = in_gauge(old);
                self.segment.push(inner(&phi_old, &dphi_old));
                self.closed += self.segment.integral(dt);
                self.segment = SimpsonAccumulator::new();
                let link = inner(&phi, &phi_old);
                self.junctions *= link / link.norm();
                self.switches += 1;
            }
            _ => {}
        }
        self.pivot = Some(pivot);
        self.segment.push(inner(&phi, &dphi));
    }

    /// Integral of `<φ|φ̇>` in one smooth gauge, modulo `2πi`.
    fn value(&self, dt: f64) -> C64 {
        let raw = self.closed + self.segment.integral(dt);
        raw - C64::new(0.0, self.junctions.arg())
    }
}

/// Per-eigenvector integrals `∫ <φ_k|φ̇_k> dt`, expressed in a single smooth
/// gauge.
pub fn accumulate_connection(path: &EigenPath, derivatives: &[Vec<StateVector>], dt: f64) -> Result<Vec<C64>> {
    let n = path.len();
    if derivatives.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: derivatives.len() });
    }
    if n < 5 {
        return differentiate_eigenvectors(path, dt).map(|_| Vec::new());
    }
    let dim = path.dim();
    let mut integrals: Vec<ConnectionIntegral> = (0..dim).map(|_| ConnectionIntegral::new()).collect();
    for (j, (step, deriv)) in path.steps.iter().zip(derivatives).enumerate() {
        let (stencil, start) = Stencil::for_point(j, n);
        for (k, integral) in integrals.iter_mut().enumerate() {
            let own = step.pivots[k];
            integral.push(own, dt, |p| {
                if p == own {
                    (step.vectors[k].clone(), deriv[k].clone())
                } else {
                    let window = window_of(path, start, k);
                    (regauge(&step.vectors[k], p), derivative_in_gauge(window, stencil, p, dt))
                }
            });
        }
    }
    Ok(integrals.iter().map(|c| c.value(dt)).collect())
}

/// Geometric phase and its ingredients.
#[derive(Debug, Clone)]
pub struct GpResult {
    /// `arg z` in `(-π, π]`.
    pub gamma: f64,
    pub z: C64,
    /// `|z|`
    pub visibility: f64,
    /// `<φ_k(0)|φ_k(τ)>`
    pub overlaps: Vec<C64>,
    /// `∫ <φ_k|φ̇_k> dt`
    pub connections: Vec<C64>,
    pub populations_start: Vec<f64>,
    pub populations_end: Vec<f64>,
    /// Pivot moves per eigenvector.
    pub pivot_switches: Vec<usize>,
}

/// Principal value of the argument in `(-π, π]`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

fn assemble(first: &EigenStep, last: &EigenStep, connections: Vec<C64>, switches: Vec<usize>) -> Result<GpResult> {
    let overlaps: Vec<C64> = first.vectors.iter().zip(&last.vectors).map(|(a, b)| inner(a, b)).collect();
    let z = (0..overlaps.len())
        .map(|k| {
            let weight = (first.populations[k] * last.populations[k]).max(0.0).sqrt();
            overlaps[k] * (-connections[k]).exp() * weight
        })
        .sum::<C64>();
    let visibility = z.norm();
    if !(visibility >= MIN_MODULUS) {
        return Err(Error::IllConditionedPhase { modulus: visibility });
    }
    Ok(GpResult {
        gamma: principal_arg(z),
        z,
        visibility,
        overlaps,
        connections,
        populations_start: first.populations.clone(),
        populations_end: last.populations.clone(),
        pivot_switches: switches,
    })
}

/// Geometric phase from a precomputed eigen path.
pub fn geometric_phase_of_path(path: &EigenPath, dt: f64) -> Result<GpResult> {
    let derivatives = differentiate_eigenvectors(path, dt)?;
    let connections = accumulate_connection(path, &derivatives, dt)?;
    let switches =
        (0..path.dim()).map(|k| path.steps.windows(2).filter(|w| w[0].pivots[k] != w[1].pivots[k]).count()).collect();
    assemble(&path.steps[0], &path.steps[path.len() - 1], connections, switches)
}

/// Streaming evaluation holding a five-step window of eigenvectors.
#[derive(Debug, Clone)]
pub struct GpAccumulator {
    dt: f64,
    labeler: Labeler,
    window: VecDeque<EigenStep>,
    first: Option<EigenStep>,
    pushed: usize,
    integrals: Vec<ConnectionIntegral>,
}

impl GpAccumulator {
    pub fn new(dt: f64, options: GpOptions) -> Self {
        GpAccumulator {
            dt,
            labeler: Labeler::new(options),
            window: VecDeque::with_capacity(5),
            first: None,
            pushed: 0,
            integrals: Vec::new(),
        }
    }

    pub fn push(&mut self, rho: &Operator) -> Result<()> {
        let (values, vectors) = sorted_eigen(rho);
        self.push_decomposition(values, vectors)
    }

    /// Adds one step given its eigenvalues (ascending) and eigenvectors in
    /// any phase convention.
    pub fn push_decomposition(&mut self, values: Vec<f64>, vectors: Vec<StateVector>) -> Result<()> {
        let step = self.labeler.push(values, vectors)?;
        if self.first.is_none() {
            self.integrals = (0..step.vectors.len()).map(|_| ConnectionIntegral::new()).collect();
            self.first = Some(step.clone());
        }
        if self.window.len() == 5 {
            self.window.pop_front();
        }
        self.window.push_back(step);
        self.pushed += 1;
        match self.pushed {
            0..=4 => {}
            5 => {
                for (pos, stencil) in [(0, Stencil::First), (1, Stencil::Second), (2, Stencil::Central)] {
                    self.emit(pos, stencil);
                }
            }
            _ => self.emit(2, Stencil::Central),
        }
        Ok(())
    }

    fn emit(&mut self, pos: usize, stencil: Stencil) {
        let dt = self.dt;
        let window: [&EigenStep; 5] = std::array::from_fn(|q| &self.window[q]);
        let step = window[pos];
        for (k, integral) in self.integrals.iter_mut().enumerate() {
            let vectors: [&StateVector; 5] = window.map(|s| &s.vectors[k]);
            integral.push(step.pivots[k], dt, |p| {
                (regauge(&step.vectors[k], p), derivative_in_gauge(vectors, stencil, p, dt))
            });
        }
    }

    pub fn finish(mut self) -> Result<GpResult> {
        if self.pushed < 5 {
            return Err(Error::InvalidParameter {
                name: "n_step",
                reason: format!("{} steps, need at least 4", self.pushed.saturating_sub(1)),
            });
        }
        self.emit(3, Stencil::SecondToLast);
        self.emit(4, Stencil::Last);
        let connections = self.integrals.iter().map(|c| c.value(self.dt)).collect();
        let switches = self.integrals.iter().map(|c| c.switches).collect();
        let first = self.first.take().expect("at least five steps");
        let last = self.window.back().expect("nonempty window");
        assemble(&first, last, connections, switches)
    }
}

/// Geometric phase of a stream of equidistant states.
pub fn geometric_phase_stream<I>(states: I, dt: f64, options: &GpOptions) -> Result<GpResult>
where
    I: IntoIterator<Item = Result<Operator>>,
{
    let mut acc = GpAccumulator::new(dt, *options);
    for rho in states {
        acc.push(&rho?)?;
    }
    acc.finish()
}

pub fn geometric_phase(traj: &Trajectory, degeneracy_tol: f64) -> Result<GpResult> {
    geometric_phase_with(traj, &GpOptions::with_degeneracy_tol(degeneracy_tol))
}

pub fn geometric_phase_with(traj: &Trajectory, options: &GpOptions) -> Result<GpResult> {
    geometric_phase_stream(traj.states.iter().cloned().map(Ok), traj.dt, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinops::{rotation_operator, ConeAxis};
    use nalgebra::DVector;
    use std::f64::consts::PI;

    fn diag(p: &[f64]) -> Operator {
        Operator::from_diagonal(&DVector::from_iterator(p.len(), p.iter().map(|&x| C64::from(x))))
    }

    fn static_traj(rho: Operator, n: usize) -> Trajectory {
        Trajectory { t0: 0.0, dt: 0.1, states: vec![rho; n + 1] }
    }

    /// Mixed spin-1 state rotated about the cone, sampled on `n` steps.
    fn rotated_traj(axis: ConeAxis, pops: [f64; 3], n: usize) -> Trajectory {
        let tau = 2.0 * PI / axis.omega.abs();
        let dt = tau / n as f64;
        let rho0 = diag(&pops);
        let states = (0..=n)
            .map(|j| {
                let r = rotation_operator(axis, j as f64 * dt);
                &r * &rho0 * r.adjoint()
            })
            .collect();
        Trajectory { t0: 0.0, dt, states }
    }

    #[test]
    fn constant_diagonal_path_uses_canonical_basis() {
        let traj = static_traj(diag(&[0.1, 0.3, 0.6]), 6);
        let path = eigen_decompose_path(&traj, DEFAULT_DEGENERACY_TOL).unwrap();
        for step in &path.steps {
            for (k, v) in step.vectors.iter().enumerate() {
                for c in 0..3 {
                    let expected = if c == k { 1.0 } else { 0.0 };
                    assert!((v[c] - C64::from(expected)).norm() < 1e-14);
                }
            }
        }
        let res = geometric_phase(&traj, DEFAULT_DEGENERACY_TOL).unwrap();
        assert_eq!(res.gamma, 0.0);
        assert!((res.visibility - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_populations_rejected() {
        let traj = static_traj(diag(&[0.5, 0.5, 0.0]), 6);
        assert!(matches!(
            eigen_decompose_path(&traj, DEFAULT_DEGENERACY_TOL),
            Err(Error::DegeneratePopulations { step: 0, .. })
        ));
        assert!(matches!(geometric_phase(&traj, DEFAULT_DEGENERACY_TOL), Err(Error::DegeneratePopulations { .. })));
    }

    #[test]
    fn too_short_path_rejected() {
        let traj = static_traj(diag(&[0.1, 0.3, 0.6]), 3);
        assert!(geometric_phase(&traj, DEFAULT_DEGENERACY_TOL).is_err());
    }

    #[test]
    fn derivative_of_rotating_vector_is_fourth_order() {
        // φ(t) = (cos ωt, sin ωt, 0): real, pivot entry 0 positive on [0, 1]
        let omega = 1.3;
        let err = |n: usize| {
            let dt = 1.0 / n as f64;
            let steps = (0..=n)
                .map(|j| {
                    let t = j as f64 * dt;
                    let v = DVector::from_vec(vec![
                        C64::from((omega * t).cos()),
                        C64::from((omega * t).sin()),
                        C64::default(),
                    ]);
                    EigenStep { populations: vec![1.0], vectors: vec![v], pivots: vec![0] }
                })
                .collect();
            let path = EigenPath { steps };
            let d = differentiate_eigenvectors(&path, dt).unwrap();
            (0..=n)
                .map(|j| {
                    let t = j as f64 * dt;
                    let exact = [-(omega * t).sin() * omega, (omega * t).cos() * omega];
                    (d[j][0][0].re - exact[0]).abs().max((d[j][0][1].re - exact[1]).abs())
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(40) / err(80);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn global_phase_is_removed_by_gauge() {
        // φ(t) = e^{iωt} v before gauge fixing: no connection after it
        let v = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let mut labeler = Labeler::new(GpOptions::default());
        let n = 20;
        let dt = 0.05;
        let steps = (0..=n)
            .map(|j| {
                let ph = C64::from_polar(1.0, 2.0 * j as f64 * dt);
                let other = DVector::from_vec(vec![C64::new(0.0, 0.8), C64::new(0.6, 0.0)]);
                labeler.push(vec![0.3, 0.7], vec![&v * ph, other * ph]).unwrap()
            })
            .collect();
        let path = EigenPath { steps };
        let d = differentiate_eigenvectors(&path, dt).unwrap();
        let conn = accumulate_connection(&path, &d, dt).unwrap();
        assert!(conn.iter().all(|c| c.norm() < 1e-14));
    }

    /// `|m>` carried once around a cone of half-angle α: geometric factor
    /// `exp(2πi m cos α)`.
    #[test]
    fn rotated_eigenstates_pick_up_solid_angle() {
        let alpha = PI / 5.0;
        let axis = ConeAxis::new(alpha, 0.7).unwrap();
        let traj = rotated_traj(axis, [0.6, 0.3, 0.1], 400);
        let path = eigen_decompose_path(&traj, DEFAULT_DEGENERACY_TOL).unwrap();
        let d = differentiate_eigenvectors(&path, traj.dt).unwrap();
        let conn = accumulate_connection(&path, &d, traj.dt).unwrap();
        // ascending populations: k = 0 ↔ m = -1, k = 2 ↔ m = +1
        for (k, m) in [(0usize, -1.0), (1, 0.0), (2, 1.0)] {
            let ov = inner(&path.steps[0].vectors[k], &path.steps[400].vectors[k]);
            assert!((ov.norm() - 1.0).abs() < 1e-10);
            let factor = ov * (-conn[k]).exp();
            let expected = C64::from_polar(1.0, 2.0 * PI * m * alpha.cos());
            assert!((factor - expected).norm() < 1e-8, "m = {m}: {factor} vs {expected}");
        }
    }

    #[test]
    fn materialized_and_streaming_agree() {
        let axis = ConeAxis::new(1.2, -0.5).unwrap();
        let traj = rotated_traj(axis, [0.2, 0.5, 0.3], 301);
        let path = eigen_decompose_path(&traj, DEFAULT_DEGENERACY_TOL).unwrap();
        let a = geometric_phase_of_path(&path, traj.dt).unwrap();
        let b = geometric_phase(&traj, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!((a.z - b.z).norm() < 1e-13);
        assert_eq!(a.pivot_switches, b.pivot_switches);
        // α = 1.2 > π/4 makes the m = 0 pivot cross zero
        assert!(b.pivot_switches.iter().any(|&s| s > 0));
    }

    #[test]
    fn pivot_switches_do_not_change_phase() {
        let axis = ConeAxis::new(3.0 * PI / 8.0, 0.9).unwrap();
        let traj = rotated_traj(axis, [0.15, 0.35, 0.5], 800);
        let loose = GpOptions { pivot_tol: 0.02, ..Default::default() };
        let strict = GpOptions { pivot_tol: 0.5, ..Default::default() };
        let a = geometric_phase_with(&traj, &loose).unwrap();
        let b = geometric_phase_with(&traj, &strict).unwrap();
        assert!((a.gamma - b.gamma).abs() < 1e-6, "{} vs {}", a.gamma, b.gamma);
        // unitary mixed-state path: weighted solid angles
        let c = (3.0 * PI / 8.0).cos();
        let z = C64::from_polar(0.15, 2.0 * PI * c) + 0.35 + C64::from_polar(0.5, -2.0 * PI * c);
        assert!((a.gamma - z.arg()).abs() < 1e-6, "{} vs {}", a.gamma, z.arg());
        assert!((b.gamma - z.arg()).abs() < 1e-8, "{} vs {}", b.gamma, z.arg());
    }

    #[test]
    fn tracking_labeling_follows_crossing_free_path() {
        let axis = ConeAxis::new(0.6, 1.0).unwrap();
        let traj = rotated_traj(axis, [0.6, 0.1, 0.3], 200);
        let opts = GpOptions { labeling: Labeling::TrackOverlap, ..Default::default() };
        let a = geometric_phase_with(&traj, &opts).unwrap();
        let b = geometric_phase(&traj, DEFAULT_DEGENERACY_TOL).unwrap();
        assert!((a.gamma - b.gamma).abs() < 1e-12);
    }
}

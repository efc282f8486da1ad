//! Spin algebra, cone rotations, coherent spin states and phase-space
//! synchronization measures.
//!
//! Every spin matrix uses the basis order `m = S, S-1, …, -S`; for spin 1 this
//! is `(+1, 0, -1)`. Spins are identified by `two_s = 2S` so that spin-1/2 is
//! available alongside spin-1.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::quadrature::simpson;
use crate::{Error, Result, C64};

pub type Operator = DMatrix<C64>;
pub type StateVector = DVector<C64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

const I: C64 = C64::new(0.0, 1.0);

pub fn max_abs(a: &Operator) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn hermiticity_defect(a: &Operator) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn is_hermitian(a: &Operator, tol: f64) -> bool {
    a.is_square() && hermiticity_defect(a) <= tol
}

/// `(A + A†) / 2`
pub fn hermitize(a: &Operator) -> Operator {
    (a + a.adjoint()) * C64::from(0.5)
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

pub fn identity(dim: usize) -> Operator {
    Operator::identity(dim, dim)
}

/// Checks the density-matrix invariants: square, Hermitian, unit trace,
/// no eigenvalue below `-1e-10`.
pub fn validate_density(rho: &Operator) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::NotDensityMatrix(format!("{}x{} matrix is not square", rho.nrows(), rho.ncols())));
    }
    let defect = hermiticity_defect(rho);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotDensityMatrix(format!("hermiticity defect {defect:.3e}")));
    }
    let tr = rho.trace();
    if (tr - C64::from(1.0)).norm() > TRACE_TOL {
        return Err(Error::NotDensityMatrix(format!("trace {tr}")));
    }
    let min = hermitize(rho).symmetric_eigenvalues().iter().fold(f64::INFINITY, |m, &x| m.min(x));
    if min < -POSITIVITY_TOL {
        return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Magnetic quantum number of basis index `idx` for spin `two_s / 2`.
pub fn magnetic_number(two_s: usize, idx: usize) -> f64 {
    two_s as f64 / 2.0 - idx as f64
}

#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub sx: Operator,
    pub sy: Operator,
    pub sz: Operator,
    pub splus: Operator,
    pub sminus: Operator,
}

impl SpinOperators {
    pub fn dim(&self) -> usize {
        self.sz.nrows()
    }

    /// `n·S` for a real unit vector `n`.
    pub fn along(&self, n: [f64; 3]) -> Operator {
        &self.sx * C64::from(n[0]) + &self.sy * C64::from(n[1]) + &self.sz * C64::from(n[2])
    }
}

/// Spin operators for spin `two_s / 2`.
pub fn spin_operators(two_s: usize) -> SpinOperators {
    let dim = two_s + 1;
    let s = two_s as f64 / 2.0;
    let sz =
        Operator::from_fn(dim, dim, |r, c| if r == c { C64::from(magnetic_number(two_s, r)) } else { C64::default() });
    // <m+1|S+|m> = sqrt(s(s+1) - m(m+1)); index r = c - 1 raises m by one.
    let splus = Operator::from_fn(dim, dim, |r, c| {
        if r + 1 == c {
            let m = magnetic_number(two_s, c);
            C64::from((s * (s + 1.0) - m * (m + 1.0)).sqrt())
        } else {
            C64::default()
        }
    });
    let sminus = splus.adjoint();
    let sx = (&splus + &sminus) * C64::from(0.5);
    let sy = (&splus - &sminus) * (-0.5 * I);
    SpinOperators { sx, sy, sz, splus, sminus }
}

pub fn spin1_operators() -> SpinOperators {
    spin_operators(2)
}

/// Pauli matrices `(σx, σy, σz)` in the basis order `(↑, ↓)`.
pub fn pauli() -> [Operator; 3] {
    let s = spin_operators(1);
    let two = C64::from(2.0);
    [s.sx * two, s.sy * two, s.sz * two]
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Wigner small-d matrix `d[m'][m] = <m'| exp(-i β S_y) |m>`.
pub fn wigner_small_d(two_s: usize, beta: f64) -> DMatrix<f64> {
    let dim = two_s + 1;
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    // With j = S, m = j - a, m' = j - b all the factorial arguments are
    // integers expressed through the doubled spin.
    DMatrix::from_fn(dim, dim, |b, a| {
        let (jpm_p, jmm_p) = (two_s - b, b); // j + m', j - m'
        let (jpm, jmm) = (two_s - a, a); // j + m, j - m
        let norm = (factorial(jpm_p) * factorial(jmm_p) * factorial(jpm) * factorial(jmm)).sqrt();
        let mut sum = 0.0;
        for k in 0..=two_s {
            // (j+m-k)!, k!, (j-k-m')!, (k-m+m')!
            if k > jpm || k > jmm_p || k + a < b {
                continue;
            }
            let m_minus_mp = b as i64 - a as i64; // m - m'
            let denom = factorial(jpm - k) * factorial(k) * factorial(jmm_p - k) * factorial(k + a - b);
            let sign = if (k as i64 - m_minus_mp).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let pc = (two_s as i64 - 2 * k as i64 + m_minus_mp) as i32;
            let ps = (2 * k as i64 - m_minus_mp) as i32;
            sum += sign * c.powi(pc) * s.powi(ps) / denom;
        }
        norm * sum
    })
}

/// Axis of a cone with opening angle `alpha` about which the quantization
/// axis rotates at angular frequency `omega`; the sign of `omega` selects the
/// direction of travel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeAxis {
    pub alpha: f64,
    pub omega: f64,
}

impl ConeAxis {
    pub fn new(alpha: f64, omega: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&alpha) {
            return Err(Error::InvalidParameter { name: "alpha", reason: format!("{alpha} outside [0, π]") });
        }
        if !omega.is_finite() {
            return Err(Error::InvalidParameter { name: "omega", reason: "not finite".into() });
        }
        Ok(ConeAxis { alpha, omega })
    }

    /// Unit symmetry axis `(sin α, 0, cos α)`.
    pub fn direction(&self) -> [f64; 3] {
        [self.alpha.sin(), 0.0, self.alpha.cos()]
    }

    pub fn reversed(self) -> Self {
        ConeAxis { omega: -self.omega, ..self }
    }
}

/// `exp(-i ω t n(α)·S)` evaluated through `exp(-iαS_y) exp(-iωt S_z) exp(iαS_y)`.
#[derive(Debug, Clone)]
pub struct ConeRotation {
    two_s: usize,
    omega: f64,
    tilt: Operator,
}

impl ConeRotation {
    pub fn new(two_s: usize, axis: ConeAxis) -> Self {
        let tilt = wigner_small_d(two_s, axis.alpha).map(C64::from);
        ConeRotation { two_s, omega: axis.omega, tilt }
    }

    pub fn at(&self, t: f64) -> Operator {
        let dim = self.two_s + 1;
        let angle = self.omega * t;
        let phases = DVector::from_fn(dim, |k, _| C64::from_polar(1.0, -angle * magnetic_number(self.two_s, k)));
        let mut left = self.tilt.clone();
        for (mut col, ph) in left.column_iter_mut().zip(phases.iter()) {
            col *= *ph;
        }
        left * self.tilt.transpose()
    }
}

/// Spin-1 rotation operator `R(α, t)`.
pub fn rotation_operator(axis: ConeAxis, t: f64) -> Operator {
    ConeRotation::new(2, axis).at(t)
}

/// Coherent spin state `exp(-iφS_z) exp(-iθS_y) |S, S>`.
pub fn coherent_state(two_s: usize, theta: f64, phi: f64) -> StateVector {
    let d = wigner_small_d(two_s, theta);
    StateVector::from_fn(two_s + 1, |k, _| C64::from_polar(d[(k, 0)], -phi * magnetic_number(two_s, k)))
}

pub fn coherent_spin_state(theta: f64, phi: f64) -> StateVector {
    coherent_state(2, theta, phi)
}

fn spin_of(rho: &Operator) -> usize {
    rho.nrows() - 1
}

fn husimi_unchecked(rho: &Operator, theta: f64, phi: f64) -> f64 {
    let two_s = spin_of(rho);
    let v = coherent_state(two_s, theta, phi);
    let q = (v.adjoint() * rho * &v)[(0, 0)].re;
    (two_s as f64 + 1.0) / (4.0 * PI) * q
}

/// Husimi function `((2S+1)/4π) <θ,φ|ρ|θ,φ>`, normalized to one over the sphere.
pub fn husimi_q(rho: &Operator, theta: f64, phi: f64) -> Result<f64> {
    validate_density(rho)?;
    Ok(husimi_unchecked(rho, theta, phi))
}

pub const DEFAULT_THETA_NODES: usize = 129;

/// Shifted phase distribution sampled on a uniform grid over `[0, 2π)`.
#[derive(Debug, Clone)]
pub struct PhaseDistribution {
    pub phi_grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Angular weights `∫ sinθ d_m(θ) d_m'(θ) dθ` of the Husimi function, by
/// Simpson quadrature over `n_theta` nodes.
#[derive(Debug, Clone)]
struct PhaseKernel {
    two_s: usize,
    weights: DMatrix<f64>,
}

impl PhaseKernel {
    fn new(two_s: usize, n_theta: usize) -> Self {
        let dim = two_s + 1;
        let n_theta = n_theta.max(3);
        let h = PI / (n_theta - 1) as f64;
        let columns: Vec<DVector<f64>> = (0..n_theta)
            .map(|j| {
                let theta = j as f64 * h;
                wigner_small_d(two_s, theta).column(0).into_owned()
            })
            .collect();
        let weights = DMatrix::from_fn(dim, dim, |a, b| {
            let samples: Vec<f64> =
                columns.iter().enumerate().map(|(j, d)| (j as f64 * h).sin() * d[a] * d[b]).collect();
            simpson(&samples, h)
        });
        PhaseKernel { two_s, weights }
    }

    fn eval(&self, rho: &Operator, phi: f64) -> f64 {
        let dim = self.two_s + 1;
        // The φ-independent part of the Husimi function integrates to
        // Tr ρ / 2π over the polar angle; only the coherences use quadrature.
        let mut acc = 0.0;
        for a in 0..dim {
            for b in (0..dim).filter(|&b| b != a) {
                let dm = magnetic_number(self.two_s, a) - magnetic_number(self.two_s, b);
                acc += (C64::from_polar(1.0, phi * dm) * rho[(a, b)]).re * self.weights[(a, b)];
            }
        }
        (self.two_s as f64 + 1.0) / (4.0 * PI) * acc + (rho.trace().re - 1.0) / (2.0 * PI)
    }
}

pub fn phase_distribution(rho: &Operator, n_phi: usize) -> Result<PhaseDistribution> {
    phase_distribution_with(rho, n_phi, DEFAULT_THETA_NODES)
}

pub fn phase_distribution_with(rho: &Operator, n_phi: usize, n_theta: usize) -> Result<PhaseDistribution> {
    if n_phi < 16 {
        return Err(Error::InvalidParameter { name: "n_phi", reason: format!("{n_phi} < 16") });
    }
    validate_density(rho)?;
    let kernel = PhaseKernel::new(spin_of(rho), n_theta);
    let phi_grid: Vec<f64> = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();
    let values = phi_grid.iter().map(|&phi| kernel.eval(rho, phi)).collect();
    Ok(PhaseDistribution { phi_grid, values })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncMeasure {
    pub value: f64,
    pub phi_max: f64,
}

pub const DEFAULT_PHI_NODES: usize = 360;

/// Maximum of the shifted phase distribution and its location.
///
/// The discrete arg-max is refined by a parabola through its neighbours and
/// the distribution is re-evaluated there. States without phase preference
/// report `(0, 0)`.
pub fn sync_measure_numeric(rho: &Operator) -> Result<SyncMeasure> {
    let dist = phase_distribution(rho, DEFAULT_PHI_NODES)?;
    let n = dist.values.len();
    let (imax, &smax) = dist.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("grid is nonempty");
    let spread = dist.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if spread <= 1e-14 {
        return Ok(SyncMeasure { value: 0.0, phi_max: 0.0 });
    }
    let h = 2.0 * PI / n as f64;
    let left = dist.values[(imax + n - 1) % n];
    let right = dist.values[(imax + 1) % n];
    let curvature = left - 2.0 * smax + right;
    let mut phi_max = dist.phi_grid[imax];
    let mut value = smax;
    if curvature < 0.0 {
        let offset = 0.5 * h * (left - right) / curvature;
        let candidate = (phi_max + offset).rem_euclid(2.0 * PI);
        let kernel = PhaseKernel::new(spin_of(rho), DEFAULT_THETA_NODES);
        let refined = kernel.eval(rho, candidate);
        if refined >= value {
            value = refined;
            phi_max = candidate;
        }
    }
    Ok(SyncMeasure { value, phi_max })
}

/// Spin-1 state `|1, m>` for `m ∈ {+1, 0, -1}`.
pub fn spin1_basis(m: i32) -> StateVector {
    let idx = (1 - m) as usize;
    StateVector::from_fn(3, |k, _| if k == idx { C64::from(1.0) } else { C64::default() })
}

/// `|ψ><ψ|`
pub fn projector(v: &StateVector) -> Operator {
    v * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn close(a: &Operator, b: &Operator, tol: f64) -> bool {
        max_abs(&(a - b)) <= tol
    }

    fn expm_i(gen: &Operator, angle: f64) -> Operator {
        (gen * C64::new(0.0, -angle)).exp()
    }

    #[test]
    fn ladder_matrix_element() {
        let s = spin1_operators();
        // <1,0|S+|1,-1> = sqrt(2): row m=0 (index 1), column m=-1 (index 2)
        assert!((s.splus[(1, 2)] - C64::from(SQRT_2)).norm() < 1e-15);
        assert!((s.splus[(0, 1)] - C64::from(SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn commutation_relations_and_casimir() {
        for two_s in [1, 2, 3] {
            let s = spin_operators(two_s);
            let tol = 1e-14;
            assert!(close(&commutator(&s.sx, &s.sy), &(&s.sz * I), tol));
            assert!(close(&commutator(&s.sy, &s.sz), &(&s.sx * I), tol));
            assert!(close(&commutator(&s.sz, &s.sx), &(&s.sy * I), tol));
            let casimir = &s.sx * &s.sx + &s.sy * &s.sy + &s.sz * &s.sz;
            let ss = two_s as f64 / 2.0 * (two_s as f64 / 2.0 + 1.0);
            assert!(close(&casimir, &(identity(two_s + 1) * C64::from(ss)), 1e-13));
        }
        let s = spin1_operators();
        let diag: Vec<f64> = s.sz.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn pauli_matrices() {
        let [x, y, z] = pauli();
        assert!(close(&(&x * &y), &(&z * I), 1e-15));
        assert_eq!(z[(0, 0)], C64::from(1.0));
    }

    #[test]
    fn wigner_d_matches_matrix_exponential() {
        for two_s in [1, 2, 3, 4] {
            let s = spin_operators(two_s);
            for beta in [0.0, 0.3, 1.1, 2.9] {
                let d = wigner_small_d(two_s, beta).map(C64::from);
                assert!(close(&d, &expm_i(&s.sy, beta), 1e-12), "2S={two_s} β={beta}");
            }
        }
    }

    #[test]
    fn rotation_operator_examples() {
        let s = spin1_operators();
        let axis = ConeAxis::new(0.7, 0.4).unwrap();
        assert!(close(&rotation_operator(axis, 0.0), &identity(3), 1e-15));

        let theta = 1.3;
        let z = ConeAxis::new(0.0, 1.0).unwrap();
        let expected = Operator::from_diagonal(&DVector::from_vec(vec![
            C64::from_polar(1.0, -theta),
            C64::from(1.0),
            C64::from_polar(1.0, theta),
        ]));
        assert!(close(&rotation_operator(z, theta), &expected, 1e-14));

        let cone = ConeAxis::new(PI / 4.0, 1.0).unwrap();
        assert!(close(&rotation_operator(cone, 2.0 * PI), &identity(3), 1e-12));

        // independent route: matrix exponential of the generator
        let t = 0.83;
        let gen = s.along(cone.direction());
        assert!(close(&rotation_operator(cone, t), &expm_i(&gen, cone.omega * t), 1e-12));
    }

    #[test]
    fn coherent_state_examples() {
        let v = coherent_spin_state(0.0, 1.7);
        assert!((v[0].norm() - 1.0).abs() < 1e-15);
        let v = coherent_spin_state(PI, 0.0);
        assert!((v[2].norm() - 1.0).abs() < 1e-15);
        for theta in [0.2, 1.0, 2.5] {
            let v = coherent_spin_state(theta, 0.0);
            assert!((v[0].re - (theta / 2.0).cos().powi(2)).abs() < 1e-15);
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
        // definition through exponentials
        let s = spin1_operators();
        let (theta, phi) = (0.9, -2.1);
        let direct = expm_i(&s.sz, phi) * expm_i(&s.sy, theta) * spin1_basis(1);
        assert!((direct - coherent_spin_state(theta, phi)).norm() < 1e-12);
    }

    #[test]
    fn husimi_examples() {
        let mixed = identity(3) / C64::from(3.0);
        for (t, p) in [(0.0, 0.0), (1.0, 2.0), (2.5, 5.0)] {
            assert!((husimi_q(&mixed, t, p).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15);
        }
        let up = projector(&spin1_basis(1));
        assert!((husimi_q(&up, 0.0, 0.0).unwrap() - 3.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(husimi_q(&(identity(3) * C64::from(0.5)), 0.0, 0.0).is_err());
    }

    #[test]
    fn phase_distribution_vanishes_without_coherence() {
        let rho = Operator::from_diagonal(&DVector::from_vec(vec![C64::from(0.1), C64::from(0.3), C64::from(0.6)]));
        let dist = phase_distribution(&rho, 64).unwrap();
        assert!(dist.values.iter().all(|v| v.abs() < 1e-12));
        let m = sync_measure_numeric(&rho).unwrap();
        assert_eq!((m.value, m.phi_max), (0.0, 0.0));
        assert!(phase_distribution(&rho, 8).is_err());
    }

    #[test]
    fn sync_measure_matches_coherence_formula() {
        // ρ with coherences x on (+1,0) and y on (0,-1): S_max = 3/(8√2)|x + y|
        let x = C64::new(0.02, -0.03);
        let y = C64::new(-0.01, 0.05);
        let mut rho = Operator::from_diagonal(&DVector::from_vec(vec![C64::from(0.2), C64::from(0.3), C64::from(0.5)]));
        rho[(0, 1)] = x;
        rho[(1, 0)] = x.conj();
        rho[(1, 2)] = y;
        rho[(2, 1)] = y.conj();
        let m = sync_measure_numeric(&rho).unwrap();
        let expected = 3.0 / (8.0 * SQRT_2) * (x + y).norm();
        assert!((m.value - expected).abs() < 1e-9, "{} vs {}", m.value, expected);
        let lag = (-(x + y).arg()).rem_euclid(2.0 * PI);
        assert!((m.phi_max - lag).abs() < 2e-3);
    }
}

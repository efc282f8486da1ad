//! Fourth-order quadrature and finite-difference stencils on equidistant grids.

use std::ops::{Add, Mul, Sub};

/// Values that can be combined linearly with real weights.
pub trait Linear: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Linear for T where T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Streaming composite Simpson rule.
///
/// Samples are pushed one at a time. An even number of intervals uses the
/// plain 1/3 rule; an odd number of at least three replaces the last three
/// intervals by the 3/8 rule; a single interval falls back to the trapezoid.
#[derive(Debug, Clone, Default)]
pub struct SimpsonAccumulator<T> {
    samples: usize,
    /// Sum of complete 1/3-rule panels, without the h/3 factor.
    panels: T,
    recent: [T; 4],
}

impl<T: Linear> SimpsonAccumulator<T> {
    pub fn new() -> Self {
        SimpsonAccumulator { samples: 0, panels: T::default(), recent: [T::default(); 4] }
    }

    pub fn push(&mut self, value: T) {
        self.recent.rotate_left(1);
        self.recent[3] = value;
        self.samples += 1;
        if self.samples >= 3 && self.samples % 2 == 1 {
            let [_, a, b, c] = self.recent;
            self.panels = self.panels + a + b * 4.0 + c;
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Integral over all pushed samples with spacing `h`.
    pub fn integral(&self, h: f64) -> T {
        let n = self.samples.saturating_sub(1);
        let [f0, f1, f2, f3] = self.recent;
        match n {
            0 => T::default(),
            1 => (f2 + f3) * (0.5 * h),
            n if n % 2 == 0 => self.panels * (h / 3.0),
            _ => {
                let head = self.panels - (f0 + f1 * 4.0 + f2);
                head * (h / 3.0) + (f0 + f1 * 3.0 + f2 * 3.0 + f3) * (3.0 * h / 8.0)
            }
        }
    }
}

/// Composite Simpson integral of equidistant samples.
pub fn simpson<T: Linear>(samples: &[T], h: f64) -> T {
    let mut acc = SimpsonAccumulator::new();
    samples.iter().for_each(|&v| acc.push(v));
    acc.integral(h)
}

/// Where a derivative is taken inside a five-point window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// Window starts at the evaluation point.
    First,
    /// Window starts one step before the evaluation point.
    Second,
    /// Symmetric window.
    Central,
    /// Window ends one step after the evaluation point.
    SecondToLast,
    /// Window ends at the evaluation point.
    Last,
}

impl Stencil {
    /// Weights over five consecutive samples, to be divided by `12 h`.
    pub const fn weights(self) -> [f64; 5] {
        match self {
            Stencil::First => [-25.0, 48.0, -36.0, 16.0, -3.0],
            Stencil::Second => [-3.0, -10.0, 18.0, -6.0, 1.0],
            Stencil::Central => [1.0, -8.0, 0.0, 8.0, -1.0],
            Stencil::SecondToLast => [-1.0, 6.0, -18.0, 10.0, 3.0],
            Stencil::Last => [3.0, -16.0, 36.0, -48.0, 25.0],
        }
    }

    /// Stencil for point `j` of a grid with `n_points` samples, together with
    /// the index of the first sample in its window.
    pub fn for_point(j: usize, n_points: usize) -> (Stencil, usize) {
        assert!(n_points >= 5, "fourth-order stencils need at least five samples");
        match j {
            0 => (Stencil::First, 0),
            1 => (Stencil::Second, 0),
            j if j + 2 == n_points => (Stencil::SecondToLast, n_points - 5),
            j if j + 1 == n_points => (Stencil::Last, n_points - 5),
            j => (Stencil::Central, j - 2),
        }
    }

    pub fn apply<T: Linear>(self, window: [T; 5], h: f64) -> T {
        // Weights sum to zero, so differences against the first sample give
        // an exact zero on constant input.
        let w = self.weights();
        let base = window[0];
        let mut acc = T::default();
        for (v, c) in window.into_iter().zip(w).skip(1) {
            if c != 0.0 {
                acc = acc + (v - base) * c;
            }
        }
        acc * (1.0 / (12.0 * h))
    }
}

/// Fourth-order derivative of equidistant samples at every grid point.
pub fn differentiate<T: Linear>(samples: &[T], h: f64) -> Vec<T> {
    let n = samples.len();
    (0..n)
        .map(|j| {
            let (stencil, start) = Stencil::for_point(j, n);
            let window: [T; 5] = std::array::from_fn(|i| samples[start + i]);
            stencil.apply(window, h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    fn poly(t: f64) -> f64 {
        1.5 - 2.0 * t + 0.75 * t * t - 0.3 * t.powi(3) + 0.05 * t.powi(4)
    }

    fn dpoly(t: f64) -> f64 {
        -2.0 + 1.5 * t - 0.9 * t * t + 0.2 * t.powi(3)
    }

    #[test]
    fn simpson_exact_on_cubics_for_all_interval_parities() {
        let f = |t: f64| 0.3 - t + 2.0 * t * t - 0.7 * t.powi(3);
        let antideriv = |t: f64| 0.3 * t - 0.5 * t * t + 2.0 / 3.0 * t.powi(3) - 0.175 * t.powi(4);
        for n in 2..12 {
            let h = 0.37;
            let samples: Vec<f64> = (0..=n).map(|j| f(j as f64 * h)).collect();
            let exact = antideriv(n as f64 * h);
            assert!((simpson(&samples, h) - exact).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn simpson_degenerate_lengths() {
        assert_eq!(simpson::<f64>(&[], 0.1), 0.0);
        assert_eq!(simpson(&[3.0], 0.1), 0.0);
        assert!((simpson(&[1.0, 3.0], 0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn simpson_fourth_order_on_smooth_function() {
        let err = |n: usize| {
            let h = 2.0 / n as f64;
            let s: Vec<f64> = (0..=n).map(|j| (j as f64 * h).exp()).collect();
            (simpson(&s, h) - (2f64.exp() - 1.0)).abs()
        };
        let ratio = err(41) / err(81);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn stencils_exact_on_quartics() {
        let h = 0.21;
        let samples: Vec<f64> = (0..9).map(|j| poly(j as f64 * h)).collect();
        for (j, d) in differentiate(&samples, h).into_iter().enumerate() {
            assert!((d - dpoly(j as f64 * h)).abs() < 1e-11, "j = {j}: {d}");
        }
    }

    #[test]
    fn constant_signal_has_zero_derivative() {
        let v = C64::new(0.3, -1.2);
        let d = differentiate(&[v; 7], 0.01);
        assert!(d.iter().all(|x| *x == C64::default()));
    }

    #[test]
    fn stencil_weights_sum_to_zero() {
        for s in [Stencil::First, Stencil::Second, Stencil::Central, Stencil::SecondToLast, Stencil::Last] {
            assert_eq!(s.weights().iter().sum::<f64>(), 0.0);
        }
    }
}

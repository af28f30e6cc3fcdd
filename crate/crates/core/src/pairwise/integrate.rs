//! Dormand–Prince 5(4) with step rejection and cubic Hermite dense output.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Difference between the fifth- and fourth-order weights. The fifth-order
/// weights equal the last row of `A`, so the seventh stage is the new state.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Upper bound on the step size; `None` leaves it unbounded.
    pub max_step: Option<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_steps: 10_000_000,
            max_step: None,
        }
    }
}

impl IntegrateOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }
}

/// Accepted steps of an integration, with derivatives for interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    derivatives: Vec<Vec<f64>>,
}

impl OdeSolution {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("solution holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("solution holds the initial time")
    }

    /// Cubic Hermite interpolation between the bracketing accepted steps.
    /// Times outside the solved span are clamped to its ends.
    pub fn at(&self, t: f64) -> Vec<f64> {
        let last = self.times.len() - 1;
        if t <= self.times[0] || last == 0 {
            return self.states[0].clone();
        }
        if t >= self.times[last] {
            return self.states[last].clone();
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        if t == t0 {
            return self.states[k].clone();
        }
        let h = t1 - t0;
        let s = (t - t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let (y0, y1) = (&self.states[k], &self.states[k + 1]);
        let (f0, f1) = (&self.derivatives[k], &self.derivatives[k + 1]);
        (0..y0.len())
            .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
            .collect()
    }

    pub fn sample(&self, grid: &[f64]) -> Vec<Vec<f64>> {
        grid.iter().map(|&t| self.at(t)).collect()
    }
}

/// Integrates `y' = rhs(t, y)` over `t_span`, keeping every accepted step.
pub fn integrate<F>(rhs: F, y0: &[f64], t_span: (f64, f64), opts: &IntegrateOptions) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    solve(rhs, y0, t_span, &[], opts)
}

/// Integrates through every point of an ascending `grid`, landing exactly on
/// each, and returns the states there.
pub fn integrate_grid<F>(rhs: F, y0: &[f64], grid: &[f64], opts: &IntegrateOptions) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("grid", "grid must be ascending"));
    }
    let t0 = grid[0];
    let t1 = *grid.last().unwrap();
    let sol = solve(rhs, y0, (t0, t1), grid, opts)?;
    // every grid point is an accepted step time
    let mut out = Vec::with_capacity(grid.len());
    let mut k = 0;
    for &t in grid {
        while sol.times[k] < t {
            k += 1;
        }
        out.push(sol.states[k].clone());
    }
    Ok(out)
}

fn solve<F>(
    mut rhs: F,
    y0: &[f64],
    (t0, t1): (f64, f64),
    stops: &[f64],
    opts: &IntegrateOptions,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::invalid("tolerances", "rel_tol and abs_tol must be positive"));
    }
    if !(t1 >= t0) {
        return Err(Error::invalid("t_span", format!("end {t1} precedes start {t0}")));
    }
    let dim = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; dim];
    rhs(t, &y, &mut f);

    let mut sol = OdeSolution {
        times: vec![t],
        states: vec![y.clone()],
        derivatives: vec![f.clone()],
    };
    if t1 == t0 {
        return Ok(sol);
    }

    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; dim]);
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let max_step = opts.max_step.unwrap_or(f64::INFINITY).min(t1 - t0);
    let mut h = initial_step(&mut rhs, t, &y, &f, opts, &mut stage, &mut y_new).min(max_step);
    let mut next_stop = stops.iter().copied().filter(|&s| s > t0).peekable();
    let mut steps = 0usize;
    let mut last_rejected = false;

    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps {
                steps,
                time: t,
                target: t1,
            });
        }
        let mut target = t1;
        while let Some(&s) = next_stop.peek() {
            if s <= t {
                next_stop.next();
            } else {
                target = target.min(s);
                break;
            }
        }
        let mut step = h.min(max_step);
        let landing = t + step >= target;
        if landing {
            step = target - t;
        }
        if step <= 16.0 * f64::EPSILON * t.abs().max(1.0) && !landing {
            return Err(Error::StepSizeUnderflow { time: t, step });
        }

        k[0].copy_from_slice(&f);
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().take(s).enumerate() {
                    acc += a * k[j][i];
                }
                stage[i] = y[i] + step * acc;
            }
            rhs(t + C[s] * step, &stage, &mut k[s]);
        }
        // stage 7 was evaluated at the fifth-order solution
        y_new.copy_from_slice(&stage);

        let mut err = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for s in 0..7 {
                e += E[s] * k[s][i];
            }
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            let ratio = step * e / scale;
            err += ratio * ratio;
        }
        let err = (err / dim.max(1) as f64).sqrt();
        steps += 1;

        if err <= 1.0 {
            t = if landing { target } else { t + step };
            std::mem::swap(&mut y, &mut y_new);
            f.copy_from_slice(&k[6]);
            sol.times.push(t);
            sol.states.push(y.clone());
            sol.derivatives.push(f.clone());
            let mut factor = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
            factor = factor.clamp(0.2, 5.0);
            if last_rejected {
                factor = factor.min(1.0);
            }
            // a landing step may have been shortened; keep the earlier proposal
            h = if landing { h.max(step * factor) } else { step * factor };
            last_rejected = false;
        } else {
            let factor = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h = step * factor;
            last_rejected = true;
            if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { time: t, step: h });
            }
        }
    }
    Ok(sol)
}

/// Starting step from the size of the solution and its first two derivatives.
fn initial_step<F>(
    rhs: &mut F,
    t: f64,
    y: &[f64],
    f: &[f64],
    opts: &IntegrateOptions,
    scratch_y: &mut [f64],
    scratch_f: &mut [f64],
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y.len().max(1) as f64;
    let scale: Vec<f64> = y.iter().map(|v| opts.abs_tol + opts.rel_tol * v.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&scale).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / dim).sqrt();
    let d0 = norm(y);
    let d1 = norm(f);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    for i in 0..y.len() {
        scratch_y[i] = y[i] + h0 * f[i];
    }
    rhs(t + h0, scratch_y, scratch_f);
    let diff: Vec<f64> = scratch_f.iter().zip(f).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rhs_is_constant() {
        let sol = integrate(|_, _, dy| dy.fill(0.0), &[1.0, 2.0], (0.0, 10.0), &IntegrateOptions::default()).unwrap();
        assert_eq!(sol.final_state(), &[1.0, 2.0]);
        assert_eq!(sol.at(3.3), vec![1.0, 2.0]);
    }

    #[test]
    fn exponential_decay() {
        let opts = IntegrateOptions::with_tolerances(1e-10, 1e-12);
        let sol = integrate(|_, y, dy| dy[0] = -y[0], &[1.0], (0.0, 1.0), &opts).unwrap();
        let exact = (-1.0f64).exp();
        assert!((sol.final_state()[0] - exact).abs() < 1e-10 * exact);
        assert_eq!(sol.final_time(), 1.0);
        // dense output between steps stays close
        let mid = sol.at(0.37)[0];
        assert!((mid - (-0.37f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let opts = IntegrateOptions::with_tolerances(1e-10, 1e-12);
        let period = 2.0 * std::f64::consts::PI;
        let sol = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            &[1.0, 0.0],
            (0.0, period),
            &opts,
        )
        .unwrap();
        let y = sol.final_state();
        assert!((y[0] - 1.0).abs() < 1e-8 && y[1].abs() < 1e-8);
    }

    #[test]
    fn grid_points_are_hit_exactly() {
        let opts = IntegrateOptions::with_tolerances(1e-10, 1e-12);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let ys = integrate_grid(|_, y, dy| dy[0] = -2.0 * y[0], &[3.0], &grid, &opts).unwrap();
        for (t, y) in grid.iter().zip(&ys) {
            let exact = 3.0 * (-2.0 * t).exp();
            assert!((y[0] - exact).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn bad_tolerances_rejected() {
        let opts = IntegrateOptions::with_tolerances(0.0, 1e-9);
        assert!(integrate(|_, _, dy| dy.fill(0.0), &[1.0], (0.0, 1.0), &opts).is_err());
    }

    #[test]
    fn blow_up_reports_failure_time() {
        // y' = y^2 from y(0) = 1 blows up at t = 1
        let opts = IntegrateOptions::with_tolerances(1e-8, 1e-8);
        match integrate(|_, y, dy| dy[0] = y[0] * y[0], &[1.0], (0.0, 2.0), &opts) {
            Err(Error::StepSizeUnderflow { time, .. }) => assert!((time - 1.0).abs() < 1e-3),
            Err(Error::TooManySteps { time, .. }) => assert!((time - 1.0).abs() < 1e-3),
            other => panic!("expected a failure, got {:?}", other.map(|s| s.final_time())),
        }
    }
}

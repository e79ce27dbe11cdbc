//! Adaptive Dormand–Prince 5(4) integrator with dense output and event location.
//!
//! Used by the Delaunay profile oracle; kept generic over the state dimension.

/// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-3,
            h_max: 0.05,
            max_steps: 1_000_000,
        }
    }
}

/// One accepted step, retained for Hermite dense output.
#[derive(Debug, Clone)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub f0: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    /// Cubic Hermite interpolation inside the step.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        std::array::from_fn(|i| {
            h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i]
        })
    }
}

/// Result of an integration: the accepted steps and the terminal state.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub steps: Vec<Step<N>>,
    pub t_end: f64,
    pub y_end: [f64; N],
    /// True when integration stopped at a located event.
    pub event_hit: bool,
}

impl<const N: usize> Solution<N> {
    fn step_index(&self, t: f64) -> usize {
        self.steps
            .partition_point(|s| s.t1 < t)
            .min(self.steps.len().saturating_sub(1))
    }

    /// Cubic Hermite dense output.
    pub fn eval(&self, t: f64) -> [f64; N] {
        self.steps[self.step_index(t)].eval(t)
    }

    /// Re-takes a single Dormand–Prince step from the start of the containing
    /// step to `t`. Accurate to the integration tolerance, unlike the cubic
    /// dense output, and smooth in `t`.
    pub fn eval_exact(&self, rhs: impl Fn(f64, &[f64; N]) -> [f64; N], t: f64) -> [f64; N] {
        let st = &self.steps[self.step_index(t)];
        if t == st.t0 {
            return st.y0;
        }
        single_step(&rhs, st.t0, &st.y0, t - st.t0)
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[( f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// Integrates `y' = rhs(t, y)` from `t0` until `t_max` or until `event(t, y)`
/// changes sign from positive to non-positive after `t_min_event`.
pub fn integrate<const N: usize>(
    rhs: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_max: f64,
    event: Option<&dyn Fn(f64, &[f64; N]) -> f64>,
    t_min_event: f64,
    opts: Options,
) -> Solution<N> {
    let mut t = t0;
    let mut y = y0;
    let mut f = rhs(t, &y);
    let mut h = opts.h_init.min(t_max - t0);
    let mut steps = Vec::new();
    let mut event_hit = false;

    for _ in 0..opts.max_steps {
        if t >= t_max {
            break;
        }
        h = h.min(t_max - t).min(opts.h_max);
        let mut k: [[f64; N]; 7] = [[0.0; N]; 7];
        k[0] = f;
        for s in 1..7 {
            let terms: Vec<(f64, &[f64; N])> = (0..s).map(|r| (A[s][r], &k[r])).collect();
            let ys = axpy(&y, h, &terms);
            k[s] = rhs(t + C[s] * h, &ys);
        }
        let y5: [f64; N] =
            std::array::from_fn(|i| y[i] + h * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>());
        let y4: [f64; N] =
            std::array::from_fn(|i| y[i] + h * (0..7).map(|s| B4[s] * k[s][i]).sum::<f64>());
        let err = (0..N)
            .map(|i| {
                let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                ((y5[i] - y4[i]) / sc).powi(2)
            })
            .sum::<f64>()
            / N as f64;
        let err = err.sqrt();
        if err <= 1.0 {
            let t1 = t + h;
            let f1 = k[6];
            let step = Step {
                t0: t,
                t1,
                y0: y,
                y1: y5,
                f0: f,
                f1,
            };
            if let Some(ev) = event {
                let g0 = ev(t, &y);
                let g1 = ev(t1, &y5);
                if t1 > t_min_event && g0 > 0.0 && g1 <= 0.0 {
                    let te = locate(&step, ev, t.max(t_min_event), t1);
                    let ye = step.eval(te);
                    let fe = rhs(te, &ye);
                    let trimmed = Step {
                        t1: te,
                        y1: ye,
                        f1: fe,
                        ..step
                    };
                    // Re-take the truncated step so the stored endpoint is a true RK state.
                    let exact = single_step(&rhs, t, &y, te - t);
                    let trimmed = Step {
                        y1: exact,
                        f1: rhs(te, &exact),
                        ..trimmed
                    };
                    steps.push(trimmed);
                    t = te;
                    y = exact;
                    event_hit = true;
                    break;
                }
            }
            steps.push(step);
            t = t1;
            y = y5;
            f = f1;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }

    Solution {
        steps,
        t_end: t,
        y_end: y,
        event_hit,
    }
}

fn single_step<const N: usize>(
    rhs: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let mut k: [[f64; N]; 7] = [[0.0; N]; 7];
    k[0] = rhs(t, y);
    for s in 1..7 {
        let terms: Vec<(f64, &[f64; N])> = (0..s).map(|r| (A[s][r], &k[r])).collect();
        let ys = axpy(y, h, &terms);
        k[s] = rhs(t + C[s] * h, &ys);
    }
    std::array::from_fn(|i| y[i] + h * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>())
}

/// Bisection-secant on the dense output.
fn locate<const N: usize>(
    step: &Step<N>,
    ev: &dyn Fn(f64, &[f64; N]) -> f64,
    mut a: f64,
    mut b: f64,
) -> f64 {
    let mut ga = ev(a, &step.eval(a));
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let gm = ev(m, &step.eval(m));
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
        if b - a < 1e-15 * (1.0 + b.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

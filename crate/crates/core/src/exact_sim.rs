//! Pulse-by-pulse integration of `dx/dt = f(x, drive(t))` and the sliding
//! one-period average of the resulting trajectory.
//!
//! Integration is split at every pulse edge. Inside a constant-drive segment
//! a fixed number of classical RK4 steps is taken, so refining the step never
//! moves the switching times. Output samples are taken on a uniform grid of
//! `samples_per_period` points per period; a sample falling inside a step is
//! produced by a partial RK4 step from the preceding grid point and never
//! feeds back into the trajectory.

use crate::error::{domain, Result};
use crate::models::{Model, PulseTrain};

/// Fixed-step integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegratorConfig {
    pub substeps_per_segment: usize,
    pub samples_per_period: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { substeps_per_segment: 16, samples_per_period: 8 }
    }
}

impl IntegratorConfig {
    pub fn new(substeps_per_segment: usize, samples_per_period: usize) -> Result<Self> {
        if substeps_per_segment == 0 {
            return domain("substeps_per_segment must be >= 1");
        }
        if samples_per_period == 0 {
            return domain("samples_per_period must be >= 1");
        }
        Ok(Self { substeps_per_segment, samples_per_period })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
}

/// Provenance of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub model: Option<Model>,
    pub train: Option<PulseTrain>,
    pub x0: f64,
    pub config: Option<IntegratorConfig>,
    /// Set when the samples are a sliding average over this window.
    pub averaging_window: Option<f64>,
}

/// Time-ordered state samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    /// Wraps externally produced samples (e.g. a densely sampled closed form).
    pub fn from_samples(samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return domain("trajectory needs at least one sample");
        }
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return domain("sample times must be strictly increasing");
        }
        let x0 = samples[0].x;
        Ok(Self {
            samples,
            meta: TrajectoryMeta { model: None, train: None, x0, config: None, averaging_window: None },
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    /// Samples whose time is an integer multiple of `period` (to 1e-9 periods).
    pub fn at_period_starts(&self, period: f64) -> Vec<Sample> {
        self.samples
            .iter()
            .copied()
            .filter(|s| {
                let k = s.t / period;
                (k - k.round()).abs() < 1e-9
            })
            .collect()
    }
}

#[inline]
fn rk4_step(model: &Model, x: f64, drive: f64, h: f64) -> f64 {
    let k1 = model.rate_unchecked(x, drive);
    let k2 = model.rate_unchecked(x + 0.5 * h * k1, drive);
    let k3 = model.rate_unchecked(x + 0.5 * h * k2, drive);
    let k4 = model.rate_unchecked(x + h * k3, drive);
    x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates the exact state equation from `x0` over `[0, t_end]`.
pub fn simulate(model: &Model, train: &PulseTrain, x0: f64, t_end: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    if !(0.0..=1.0).contains(&x0) {
        return domain(format!("initial state x0 = {x0} lies outside [0, 1]"));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return domain(format!("t_end must be positive, got {t_end}"));
    }
    let cfg = IntegratorConfig::new(cfg.substeps_per_segment, cfg.samples_per_period)?;

    let period = train.period();
    let spp = cfg.samples_per_period as f64;
    let eps_t = 1e-12 * period;
    let n_samples = (t_end * spp / period + 1e-9).floor() as usize + 1;
    let sample_time = |j: usize| j as f64 * period / spp;

    // the threshold law has no window; the state is held at a boundary once reached
    let hold_at_boundary = matches!(model, Model::Threshold(_));

    let mut samples = Vec::with_capacity(n_samples);
    let mut next = 0usize;
    let mut x = x0;
    let segments = train.segments();
    let n_sub = cfg.substeps_per_segment;

    let mut k = 0usize;
    'periods: loop {
        let t_period = k as f64 * period;
        if t_period >= t_end - eps_t {
            break;
        }
        for &(offset, len, drive) in &segments {
            let a = t_period + offset;
            if a >= t_end - eps_t {
                break 'periods;
            }
            let b = (a + len).min(t_end);
            let h = len / n_sub as f64;
            let mut held = false;
            let mut i = 0usize;
            loop {
                let t_i = a + i as f64 * h;
                if t_i >= b - eps_t {
                    break;
                }
                let t_next = (a + (i + 1) as f64 * h).min(b);
                while next < n_samples && sample_time(next) < t_next - eps_t {
                    let s = sample_time(next);
                    let dt = (s - t_i).max(0.0);
                    let xs = if held || dt == 0.0 { x } else { rk4_step(model, x, drive, dt).clamp(0.0, 1.0) };
                    samples.push(Sample { t: s, x: xs });
                    next += 1;
                }
                if !held {
                    let stepped = rk4_step(model, x, drive, t_next - t_i);
                    if hold_at_boundary && !(0.0..=1.0).contains(&stepped) {
                        held = true;
                    }
                    x = stepped.clamp(0.0, 1.0);
                }
                i += 1;
            }
        }
        k += 1;
    }
    while next < n_samples {
        samples.push(Sample { t: sample_time(next), x });
        next += 1;
    }

    Ok(Trajectory {
        samples,
        meta: TrajectoryMeta {
            model: Some(*model),
            train: Some(*train),
            x0,
            config: Some(cfg),
            averaging_window: None,
        },
    })
}

/// Sliding average `(1/W) * integral_t^{t+W} x` by trapezoidal quadrature on
/// the trajectory's own grid, defined for `t` in `[t_start, t_end - W]`.
pub fn time_average(traj: &Trajectory, window: f64) -> Result<Trajectory> {
    if !(window.is_finite() && window > 0.0) {
        return domain(format!("averaging window must be positive, got {window}"));
    }
    let s = traj.samples();
    let span = traj.t_end() - traj.t_start();
    let tol = 1e-9 * window;
    if window > span + tol {
        return domain(format!("averaging window {window} is longer than the trajectory span {span}"));
    }

    let mut cumulative = Vec::with_capacity(s.len());
    cumulative.push(0.0);
    for w in s.windows(2) {
        let last = *cumulative.last().unwrap();
        cumulative.push(last + 0.5 * (w[1].t - w[0].t) * (w[0].x + w[1].x));
    }
    let last_idx = s.len() - 1;
    let integral_to = |target: f64, hint: &mut usize| -> f64 {
        if target >= s[last_idx].t - tol {
            return cumulative[last_idx];
        }
        while *hint + 1 < s.len() && s[*hint + 1].t <= target + tol {
            *hint += 1;
        }
        let m = *hint;
        if (target - s[m].t).abs() <= tol {
            return cumulative[m];
        }
        let dt = target - s[m].t;
        let slope = (s[m + 1].x - s[m].x) / (s[m + 1].t - s[m].t);
        let x_target = s[m].x + slope * dt;
        cumulative[m] + 0.5 * dt * (s[m].x + x_target)
    };

    let mut out = Vec::new();
    let mut hint = 0usize;
    for (i, si) in s.iter().enumerate() {
        let target = si.t + window;
        if target > s[last_idx].t + tol {
            break;
        }
        let avg = (integral_to(target, &mut hint) - cumulative[i]) / window;
        out.push(Sample { t: si.t, x: avg });
    }

    let mut meta = traj.meta().clone();
    meta.averaging_window = Some(window);
    Ok(Trajectory { samples: out, meta })
}

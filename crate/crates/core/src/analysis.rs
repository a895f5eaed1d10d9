//! Exact-versus-averaged comparison and empirical relaxation times.

use crate::averaged::{
    biolek_fixed_point, biolek_relaxation_time, biolek_solution, circuit_fixed_point, circuit_relaxation_time,
    circuit_solution, BiolekAveragedParams, CircuitAveragedParams,
};
use crate::error::{domain, Error, Result};
use crate::exact_sim::{time_average, Sample, Trajectory};
use crate::models::{state_from_memristance, ThresholdCircuit};

/// A closed-form averaged trajectory in state coordinates.
pub trait ClosedForm {
    fn value(&self, t: f64) -> Result<f64>;
    fn fixed_point(&self) -> f64;
    fn relaxation_time(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiolekClosedForm {
    pub params: BiolekAveragedParams,
    pub x0: f64,
}

impl ClosedForm for BiolekClosedForm {
    fn value(&self, t: f64) -> Result<f64> {
        biolek_solution(&self.params, self.x0, t)
    }

    fn fixed_point(&self) -> f64 {
        biolek_fixed_point(self.params.alpha).expect("alpha validated by params")
    }

    fn relaxation_time(&self) -> f64 {
        biolek_relaxation_time(&self.params)
    }
}

/// Implicit circuit solution mapped back to state coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitClosedForm {
    circ: ThresholdCircuit,
    params: CircuitAveragedParams,
    r0: f64,
    r_a: f64,
    tau_a: f64,
}

impl CircuitClosedForm {
    pub fn new(circ: ThresholdCircuit, params: CircuitAveragedParams, r0: f64) -> Result<Self> {
        let tau_a = circuit_relaxation_time(&circ, &params)?;
        let r_a = circuit_fixed_point(&circ, &params)?.location.expect("circuit report has a location");
        if !(circ.r_on()..=circ.r_off()).contains(&r0) {
            return domain(format!("R0 = {r0} lies outside [{}, {}]", circ.r_on(), circ.r_off()));
        }
        Ok(Self { circ, params, r0, r_a, tau_a })
    }

    /// Starting from a state rather than a memristance.
    pub fn from_state(circ: ThresholdCircuit, params: CircuitAveragedParams, x0: f64) -> Result<Self> {
        let r0 = circ.memristance(x0)?;
        Self::new(circ, params, r0)
    }

    pub fn memristance_at(&self, t: f64) -> Result<f64> {
        circuit_solution(&self.circ, &self.params, self.r0, t)
    }
}

impl ClosedForm for CircuitClosedForm {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(state_from_memristance(self.memristance_at(t)?, self.circ.r_on(), self.circ.r_off()))
    }

    fn fixed_point(&self) -> f64 {
        state_from_memristance(self.r_a, self.circ.r_on(), self.circ.r_off())
    }

    fn relaxation_time(&self) -> f64 {
        self.tau_a
    }
}

/// Sup and RMS norms of the pointwise difference of two equally long series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationMetrics {
    pub sup: f64,
    pub rms: f64,
}

impl DeviationMetrics {
    pub fn between(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return domain(format!("series lengths differ or are empty ({} vs {})", a.len(), b.len()));
        }
        let mut sup = 0.0f64;
        let mut sq = 0.0;
        for (x, y) in a.iter().zip(b) {
            let d = (x - y).abs();
            sup = sup.max(d);
            sq += d * d;
        }
        Ok(Self { sup, rms: (sq / a.len() as f64).sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// Max over the averaged grid of |averaged exact - closed form|.
    pub sup_deviation: f64,
    pub rms_deviation: f64,
    /// Largest change of the exact state over one period.
    pub per_pulse_increment: f64,
    /// Log-linear fit of the averaged exact trajectory, when it is long and
    /// clean enough to fit.
    pub fitted_relaxation_time: Option<f64>,
    pub analytic_relaxation_time: f64,
    /// The sliding average of the exact trajectory that was compared.
    pub averaged: Trajectory,
    /// Closed form on the grid of `averaged`.
    pub closed_form: Vec<f64>,
}

/// Minimum trajectory length, in averaging windows, accepted by [`compare`].
pub const MIN_COMPARE_PERIODS: f64 = 10.0;

/// Averages `exact` over `window` and measures its distance to `closed_form`
/// on the averaged sample times.
pub fn compare(exact: &Trajectory, closed_form: &dyn ClosedForm, window: f64) -> Result<ComparisonReport> {
    let span = exact.t_end() - exact.t_start();
    if span < MIN_COMPARE_PERIODS * window * (1.0 - 1e-9) {
        return domain(format!(
            "trajectory spans {span}, comparison needs at least {MIN_COMPARE_PERIODS} periods of {window}"
        ));
    }
    let averaged = time_average(exact, window)?;
    let numeric: Vec<f64> = averaged.samples().iter().map(|s| s.x).collect();
    let closed = averaged.samples().iter().map(|s| closed_form.value(s.t)).collect::<Result<Vec<_>>>()?;
    let metrics = DeviationMetrics::between(&numeric, &closed)?;

    let starts = exact.at_period_starts(window);
    let per_pulse_increment = starts.windows(2).map(|w| (w[1].x - w[0].x).abs()).fold(0.0, f64::max);

    let tau_a = closed_form.relaxation_time();
    let fitted_relaxation_time = fit_averaged_tail(&averaged, window, tau_a);

    Ok(ComparisonReport {
        sup_deviation: metrics.sup,
        rms_deviation: metrics.rms,
        per_pulse_increment,
        fitted_relaxation_time,
        analytic_relaxation_time: tau_a,
        averaged,
        closed_form: closed,
    })
}

/// As [`compare`], with the closed form started from the averaged state at
/// `t = 0` (the one-period mean of the exact trajectory) rather than from the
/// raw initial state.
pub fn compare_from_averaged_start<C, F>(exact: &Trajectory, make: F, window: f64) -> Result<ComparisonReport>
where
    C: ClosedForm,
    F: FnOnce(f64) -> Result<C>,
{
    let head = time_average(exact, window)?;
    let xbar0 = head.samples()[0].x.clamp(0.0, 1.0);
    compare(exact, &make(xbar0)?, window)
}

/// Relaxation time from the phase-aligned averaged samples over
/// `[tau_a, 4 tau_a]`, with the asymptote taken from the last such sample.
fn fit_averaged_tail(averaged: &Trajectory, period: f64, tau_a: f64) -> Option<f64> {
    let aligned = averaged.at_period_starts(period);
    let last = aligned.last()?;
    if last.t < 8.0 * tau_a {
        return None;
    }
    fit_relaxation_time(&aligned, last.x, (tau_a, 4.0 * tau_a)).ok()
}

/// Least-squares slope of `ln|x - x_fp|` against `t` over `window`; returns
/// `-1/slope`.
///
/// The samples in the window must sit strictly on one side of the fixed point
/// and approach it monotonically; a trajectory with ripple around the fixed
/// point should be averaged first.
pub fn fit_relaxation_time(samples: &[Sample], fixed_point: f64, window: (f64, f64)) -> Result<f64> {
    let (t1, t2) = window;
    if !(t2 > t1) {
        return domain(format!("empty fit window [{t1}, {t2}]"));
    }
    let picked: Vec<&Sample> = samples.iter().filter(|s| s.t >= t1 && s.t <= t2).collect();
    if picked.len() < 3 {
        return Err(Error::FitQuality(format!("only {} samples in the fit window", picked.len())));
    }
    let side = (picked[0].x - fixed_point).signum();
    if side == 0.0 || picked.iter().any(|s| (s.x - fixed_point).signum() != side) {
        return Err(Error::FitQuality("samples touch or cross the fixed point".into()));
    }
    let dist: Vec<f64> = picked.iter().map(|s| (s.x - fixed_point).abs()).collect();
    if dist.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::FitQuality("distance to the fixed point is not monotone".into()));
    }

    let n = picked.len() as f64;
    let mean_t = picked.iter().map(|s| s.t).sum::<f64>() / n;
    let logs: Vec<f64> = dist.iter().map(|d| d.ln()).collect();
    let mean_l = logs.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (s, l) in picked.iter().zip(&logs) {
        let dt = s.t - mean_t;
        sxy += dt * (l - mean_l);
        sxx += dt * dt;
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return Err(Error::FitQuality(format!("non-decaying log distance (slope {slope})")));
    }
    Ok(-1.0 / slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_sim::{simulate, IntegratorConfig};
    use crate::models::{BiolekModel, PulseTrain};
    use proptest::prelude::*;

    fn exp_samples(tau: f64, x_fp: f64, amp: f64) -> Vec<Sample> {
        (0..=200)
            .map(|i| {
                let t = i as f64 * 0.5;
                Sample { t, x: x_fp + amp * (-t / tau).exp() }
            })
            .collect()
    }

    #[test]
    fn fit_pure_exponential() {
        let s = exp_samples(13.0, 0.4, 0.3);
        let tau = fit_relaxation_time(&s, 0.4, (5.0, 90.0)).unwrap();
        assert!((tau - 13.0).abs() < 1e-9);
        let s = exp_samples(13.0, 0.4, -0.3);
        assert!((fit_relaxation_time(&s, 0.4, (5.0, 90.0)).unwrap() - 13.0).abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let s = exp_samples(13.0, 0.4, 0.3);
        assert!(matches!(fit_relaxation_time(&s, 0.5, (0.0, 90.0)), Err(Error::FitQuality(_))));
        assert!(matches!(fit_relaxation_time(&s, 0.4, (5.0, 5.6)), Err(Error::FitQuality(_))));
        assert!(fit_relaxation_time(&s, 0.4, (5.0, 1.0)).is_err());
        let growing: Vec<Sample> = (0..20).map(|i| Sample { t: i as f64, x: 0.1 * (i as f64 * 0.1).exp() }).collect();
        assert!(matches!(fit_relaxation_time(&growing, 0.0, (0.0, 20.0)), Err(Error::FitQuality(_))));
    }

    #[test]
    fn biolek_alpha_one_fit() {
        let params = BiolekAveragedParams::new(1.0, 0.01).unwrap();
        let s: Vec<Sample> = (0..=1000)
            .map(|i| {
                let t = i as f64;
                Sample { t, x: biolek_solution(&params, 0.0, t).unwrap() }
            })
            .collect();
        let tau = fit_relaxation_time(&s, 0.5, (250.0, 500.0)).unwrap();
        assert!((tau / 50.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn self_comparison_is_tight() {
        let params = BiolekAveragedParams::new(2.0, 0.01).unwrap();
        let cf = BiolekClosedForm { params, x0: 1.0 };
        // closed form sampled densely stands in for the exact trajectory and is
        // compared with its own one-period mean
        let s: Vec<Sample> = (0..=4000)
            .map(|i| {
                let t = i as f64 / 16.0;
                Sample { t, x: cf.value(t).unwrap() }
            })
            .collect();
        let traj = Trajectory::from_samples(s).unwrap();
        let rep = compare(&traj, &PeriodMean { inner: cf }, 1.0).unwrap();
        assert!(rep.sup_deviation < 1e-6, "{}", rep.sup_deviation);
        assert!(rep.rms_deviation <= rep.sup_deviation);
    }

    struct PeriodMean {
        inner: BiolekClosedForm,
    }

    impl ClosedForm for PeriodMean {
        fn value(&self, t: f64) -> Result<f64> {
            // composite Simpson over [t, t + 1]
            let n = 64;
            let h = 1.0 / n as f64;
            let mut acc = self.inner.value(t)? + self.inner.value(t + 1.0)?;
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * self.inner.value(t + i as f64 * h)?;
            }
            Ok(acc * h / 3.0)
        }
        fn fixed_point(&self) -> f64 {
            self.inner.fixed_point()
        }
        fn relaxation_time(&self) -> f64 {
            self.inner.relaxation_time()
        }
    }

    #[test]
    fn short_trajectory_rejected() {
        let m = BiolekModel::linear(0.05, -0.05).unwrap();
        let tr = PulseTrain::new(1.0, 0.2, 0.2, 1.0, -1.0).unwrap();
        let traj = simulate(&m.into(), &tr, 0.0, 5.0, &IntegratorConfig::default()).unwrap();
        let cf = BiolekClosedForm { params: BiolekAveragedParams::new(1.0, 0.01).unwrap(), x0: 0.0 };
        assert!(compare(&traj, &cf, 1.0).is_err());
    }

    #[test]
    fn exact_vs_closed_form_alpha_half() {
        let m = BiolekModel::linear(0.05, -0.025).unwrap();
        let tr = PulseTrain::new(1.0, 0.2, 0.2, 1.0, -1.0).unwrap();
        let params = BiolekAveragedParams::from_model(&m, &tr).unwrap();
        let tau = biolek_relaxation_time(&params);
        let traj = simulate(&m.into(), &tr, 0.0, 15.0 * tau, &IntegratorConfig::default()).unwrap();
        let rep = compare_from_averaged_start(&traj, |x| Ok(BiolekClosedForm { params, x0: x }), 1.0).unwrap();
        assert!(rep.sup_deviation < 0.01, "{}", rep.sup_deviation);
        assert!(rep.per_pulse_increment <= 0.01 + 1e-12);
        let fitted = rep.fitted_relaxation_time.expect("long enough to fit");
        assert!((fitted / tau - 1.0).abs() < 0.05, "{fitted} vs {tau}");
    }

    #[test]
    fn circuit_closed_form_in_state_coordinates() {
        let c = ThresholdCircuit::new(0.05, 1.0, -0.7, 2000.0, 2000.0, 10000.0).unwrap();
        let tr = PulseTrain::new(1.0, 0.4, 0.25, 2.2, -2.2).unwrap();
        let cf = CircuitClosedForm::from_state(c, CircuitAveragedParams::new(&c, &tr), 0.0).unwrap();
        assert_eq!(cf.value(0.0).unwrap(), 0.0);
        assert!((cf.fixed_point() - 5.0 / 7.0).abs() < 1e-12);
        assert!((cf.value(5000.0).unwrap() - 5.0 / 7.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn deviation_symmetric(v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..50)) {
            let (a, b): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let ab = DeviationMetrics::between(&a, &b).unwrap();
            let ba = DeviationMetrics::between(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert!(ab.sup >= ab.rms && ab.rms >= 0.0);
        }

        #[test]
        fn fit_affine_invariant(scale in 0.1f64..10.0, offset in -5.0f64..5.0, tau in 1.0f64..50.0) {
            let s = exp_samples(tau, 0.2, 0.5);
            let mapped: Vec<Sample> = s.iter().map(|p| Sample { t: p.t, x: scale * p.x + offset }).collect();
            let a = fit_relaxation_time(&s, 0.2, (1.0, 3.0 * tau)).unwrap();
            let b = fit_relaxation_time(&mapped, scale * 0.2 + offset, (1.0, 3.0 * tau)).unwrap();
            prop_assert!((a - b).abs() < 1e-6 * a);
        }
    }
}

//! Pulse-train drive and the two first-order memristor models.
//!
//! The state variable `x` is dimensionless and confined to `[0, 1]`, with
//! `x = 0` the high-resistance (off) state and `x = 1` the low-resistance
//! (on) state.

use crate::error::{domain, Result};

fn check_state(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        domain(format!("state x = {x} lies outside [0, 1]"))
    }
}

/// Periodic two-pulse drive.
///
/// Within each period the positive pulse occupies `[0, tau_plus)`, the
/// negative pulse `[tau_plus, tau_plus + tau_minus)` and the drive is zero for
/// the remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTrain {
    period: f64,
    tau_plus: f64,
    tau_minus: f64,
    amp_plus: f64,
    amp_minus: f64,
}

impl PulseTrain {
    pub fn new(period: f64, tau_plus: f64, tau_minus: f64, amp_plus: f64, amp_minus: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return domain(format!("period must be positive, got {period}"));
        }
        if !(tau_plus.is_finite() && tau_plus >= 0.0) {
            return domain(format!("tau_plus must be non-negative, got {tau_plus}"));
        }
        if !(tau_minus.is_finite() && tau_minus >= 0.0) {
            return domain(format!("tau_minus must be non-negative, got {tau_minus}"));
        }
        if tau_plus + tau_minus > period * (1.0 + 1e-12) {
            return domain(format!("tau_plus + tau_minus = {} exceeds the period {period}", tau_plus + tau_minus));
        }
        if !(amp_plus.is_finite() && amp_plus > 0.0) {
            return domain(format!("amp_plus must be positive, got {amp_plus}"));
        }
        if !(amp_minus.is_finite() && amp_minus < 0.0) {
            return domain(format!("amp_minus must be negative, got {amp_minus}"));
        }
        Ok(Self { period, tau_plus, tau_minus, amp_plus, amp_minus })
    }

    /// Same pulse shape (widths as fractions of the period), different period.
    pub fn with_period(&self, period: f64) -> Result<Self> {
        let c = period / self.period;
        Self::new(period, self.tau_plus * c, self.tau_minus * c, self.amp_plus, self.amp_minus)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn tau_plus(&self) -> f64 {
        self.tau_plus
    }

    pub fn tau_minus(&self) -> f64 {
        self.tau_minus
    }

    /// Length of the zero-drive gap.
    pub fn tau_zero(&self) -> f64 {
        (self.period - self.tau_plus - self.tau_minus).max(0.0)
    }

    pub fn amp_plus(&self) -> f64 {
        self.amp_plus
    }

    pub fn amp_minus(&self) -> f64 {
        self.amp_minus
    }

    /// Drive amplitude at time `t`.
    pub fn drive_at(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return domain(format!("time must be non-negative, got {t}"));
        }
        Ok(self.drive_at_phase(t.rem_euclid(self.period)))
    }

    pub(crate) fn drive_at_phase(&self, phase: f64) -> f64 {
        if phase < self.tau_plus {
            self.amp_plus
        } else if phase < self.tau_plus + self.tau_minus {
            self.amp_minus
        } else {
            0.0
        }
    }

    /// Constant-drive pieces of one period as `(start offset, length, amplitude)`.
    /// Zero-length pieces are omitted.
    pub fn segments(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(3);
        let pieces = [
            (0.0, self.tau_plus, self.amp_plus),
            (self.tau_plus, self.tau_minus, self.amp_minus),
            (self.tau_plus + self.tau_minus, self.tau_zero(), 0.0),
        ];
        for (start, len, amp) in pieces {
            if len > 0.0 {
                out.push((start, len, amp));
            }
        }
        out
    }
}

/// Sign of the instantaneous drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveSign {
    Positive,
    Negative,
    Zero,
}

impl DriveSign {
    pub fn of(drive: f64) -> Self {
        if drive > 0.0 {
            DriveSign::Positive
        } else if drive < 0.0 {
            DriveSign::Negative
        } else {
            DriveSign::Zero
        }
    }
}

/// Biolek window `1 - (x - H(-drive))^(2p)`, with `H(0) = 0`.
pub fn biolek_window(x: f64, drive: f64, p: u32) -> Result<f64> {
    check_state(x)?;
    if p == 0 {
        return domain("window exponent p must be >= 1");
    }
    Ok(window_unchecked(x, DriveSign::of(drive), p))
}

#[inline]
fn window_unchecked(x: f64, sign: DriveSign, p: u32) -> f64 {
    let shift = if sign == DriveSign::Negative { 1.0 } else { 0.0 };
    1.0 - (x - shift).powi(2 * p as i32)
}

/// Current-controlled memristor with a Biolek window.
///
/// Only the rate magnitudes at the two pulse amplitudes enter the dynamics,
/// so the model stores `h(I+)` and `h(I-)` directly; `h(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiolekModel {
    h_plus: f64,
    h_minus: f64,
    p: u32,
}

impl BiolekModel {
    pub fn new(h_plus: f64, h_minus: f64, p: u32) -> Result<Self> {
        if !(h_plus.is_finite() && h_plus > 0.0) {
            return domain(format!("h_plus must be positive, got {h_plus}"));
        }
        if !(h_minus.is_finite() && h_minus < 0.0) {
            return domain(format!("h_minus must be negative, got {h_minus}"));
        }
        if p == 0 {
            return domain("window exponent p must be >= 1");
        }
        Ok(Self { h_plus, h_minus, p })
    }

    /// Window exponent p = 1.
    pub fn linear(h_plus: f64, h_minus: f64) -> Result<Self> {
        Self::new(h_plus, h_minus, 1)
    }

    pub fn h_plus(&self) -> f64 {
        self.h_plus
    }

    pub fn h_minus(&self) -> f64 {
        self.h_minus
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    fn h(&self, sign: DriveSign) -> f64 {
        match sign {
            DriveSign::Positive => self.h_plus,
            DriveSign::Negative => self.h_minus,
            DriveSign::Zero => 0.0,
        }
    }

    /// `h(I) g_B(x, I)` for a drive of the given sign.
    pub fn rate(&self, x: f64, sign: DriveSign) -> Result<f64> {
        check_state(x)?;
        Ok(self.rate_unchecked(x, sign))
    }

    #[inline]
    pub(crate) fn rate_unchecked(&self, x: f64, sign: DriveSign) -> f64 {
        match sign {
            DriveSign::Zero => 0.0,
            s => self.h(s) * window_unchecked(x, s, self.p),
        }
    }
}

/// Linear memristance: `R_off` at `x = 0`, `R_on` at `x = 1`.
pub fn memristance(x: f64, r_on: f64, r_off: f64) -> Result<f64> {
    check_state(x)?;
    Ok(memristance_unchecked(x, r_on, r_off))
}

#[inline]
pub(crate) fn memristance_unchecked(x: f64, r_on: f64, r_off: f64) -> f64 {
    r_off + x * (r_on - r_off)
}

/// Inverse of [`memristance`].
pub fn state_from_memristance(r: f64, r_on: f64, r_off: f64) -> f64 {
    (r - r_off) / (r_on - r_off)
}

/// Voltage-controlled threshold memristor in series with a resistor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCircuit {
    beta: f64,
    v_on: f64,
    v_off: f64,
    r_series: f64,
    r_on: f64,
    r_off: f64,
}

/// Worst-case divider margins for [`ThresholdCircuit::validate_above_threshold`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCheck {
    pub above_threshold: bool,
    /// `V_M - V_on` during the positive pulse at `R_M = R_on`; must be > 0.
    pub margin_plus: f64,
    /// `V_M - V_off` during the negative pulse at `R_M = R_on`; must be < 0.
    pub margin_minus: f64,
}

impl ThresholdCircuit {
    pub fn new(beta: f64, v_on: f64, v_off: f64, r_series: f64, r_on: f64, r_off: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return domain(format!("beta must be positive, got {beta}"));
        }
        if !(v_on.is_finite() && v_on > 0.0) {
            return domain(format!("v_on must be positive, got {v_on}"));
        }
        if !(v_off.is_finite() && v_off < 0.0) {
            return domain(format!("v_off must be negative, got {v_off}"));
        }
        if !(r_series.is_finite() && r_series > 0.0) {
            return domain(format!("r_series must be positive, got {r_series}"));
        }
        if !(r_on.is_finite() && r_on > 0.0) {
            return domain(format!("r_on must be positive, got {r_on}"));
        }
        if !(r_off.is_finite() && r_off > r_on) {
            return domain(format!("r_off must exceed r_on = {r_on}, got {r_off}"));
        }
        Ok(Self { beta, v_on, v_off, r_series, r_on, r_off })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn v_on(&self) -> f64 {
        self.v_on
    }

    pub fn v_off(&self) -> f64 {
        self.v_off
    }

    pub fn r_series(&self) -> f64 {
        self.r_series
    }

    pub fn r_on(&self) -> f64 {
        self.r_on
    }

    pub fn r_off(&self) -> f64 {
        self.r_off
    }

    pub fn memristance(&self, x: f64) -> Result<f64> {
        memristance(x, self.r_on, self.r_off)
    }

    /// Voltage across the memristor for an applied voltage, via the divider.
    pub fn divider_voltage(&self, r_m: f64, v_applied: f64) -> f64 {
        r_m / (self.r_series + r_m) * v_applied
    }

    pub fn rate(&self, x: f64, v_applied: f64) -> Result<f64> {
        check_state(x)?;
        Ok(self.rate_unchecked(x, v_applied))
    }

    #[inline]
    pub(crate) fn rate_unchecked(&self, x: f64, v_applied: f64) -> f64 {
        let v_m = self.divider_voltage(memristance_unchecked(x, self.r_on, self.r_off), v_applied);
        self.threshold_law(v_m)
    }

    /// Three-branch threshold law on the memristor voltage.
    #[inline]
    pub fn threshold_law(&self, v_m: f64) -> f64 {
        if v_m > self.v_on {
            self.beta * (v_m - self.v_on)
        } else if v_m < self.v_off {
            self.beta * (v_m - self.v_off)
        } else {
            0.0
        }
    }

    /// Whether every memristance in `[R_on, R_off]` sees a supra-threshold
    /// voltage during both pulses. The divider voltage grows with `R_M`, so
    /// `R_M = R_on` is the worst case. A pulse of zero width is not checked.
    pub fn validate_above_threshold(&self, train: &PulseTrain) -> ThresholdCheck {
        let margin_plus = self.divider_voltage(self.r_on, train.amp_plus()) - self.v_on;
        let margin_minus = self.divider_voltage(self.r_on, train.amp_minus()) - self.v_off;
        let plus_ok = train.tau_plus() == 0.0 || margin_plus > 0.0;
        let minus_ok = train.tau_minus() == 0.0 || margin_minus < 0.0;
        ThresholdCheck { above_threshold: plus_ok && minus_ok, margin_plus, margin_minus }
    }
}

/// Either model, as consumed by the simulator and the averaged analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Biolek(BiolekModel),
    Threshold(ThresholdCircuit),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Biolek(_) => "biolek",
            Model::Threshold(_) => "threshold",
        }
    }

    /// Instantaneous `f(x, drive)`.
    pub fn rate(&self, x: f64, drive: f64) -> Result<f64> {
        check_state(x)?;
        Ok(self.rate_unchecked(x, drive))
    }

    #[inline]
    pub(crate) fn rate_unchecked(&self, x: f64, drive: f64) -> f64 {
        match self {
            Model::Biolek(m) => m.rate_unchecked(x, DriveSign::of(drive)),
            Model::Threshold(c) => c.rate_unchecked(x, drive),
        }
    }
}

impl From<BiolekModel> for Model {
    fn from(m: BiolekModel) -> Self {
        Model::Biolek(m)
    }
}

impl From<ThresholdCircuit> for Model {
    fn from(c: ThresholdCircuit) -> Self {
        Model::Threshold(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig3_train() -> PulseTrain {
        PulseTrain::new(1.0, 0.4, 0.25, 2.2, -2.2).unwrap()
    }

    fn fig3_circuit() -> ThresholdCircuit {
        ThresholdCircuit::new(0.05, 1.0, -0.7, 2000.0, 2000.0, 10000.0).unwrap()
    }

    #[test]
    fn drive_windows() {
        let tr = fig3_train();
        assert_eq!(tr.drive_at(0.1).unwrap(), 2.2);
        assert_eq!(tr.drive_at(0.5).unwrap(), -2.2);
        assert_eq!(tr.drive_at(0.9).unwrap(), 0.0);
        assert_eq!(tr.drive_at(0.4).unwrap(), -2.2);
        assert_eq!(tr.drive_at(3.0).unwrap(), 2.2);
        assert!(tr.drive_at(-0.1).is_err());
    }

    #[test]
    fn train_invariants() {
        assert!(PulseTrain::new(1.0, 0.6, 0.5, 1.0, -1.0).is_err());
        assert!(PulseTrain::new(1.0, 0.2, 0.2, -1.0, -1.0).is_err());
        assert!(PulseTrain::new(1.0, 0.2, 0.2, 1.0, 1.0).is_err());
        assert!(PulseTrain::new(0.0, 0.0, 0.0, 1.0, -1.0).is_err());
        let full = PulseTrain::new(1.0, 0.5, 0.5, 1.0, -1.0).unwrap();
        assert_eq!(full.tau_zero(), 0.0);
        assert_eq!(full.segments().len(), 2);
    }

    #[test]
    fn window_values() {
        assert_eq!(biolek_window(0.5, 1.0, 1).unwrap(), 0.75);
        assert_eq!(biolek_window(1.0, 1.0, 1).unwrap(), 0.0);
        assert_eq!(biolek_window(1.0, -1.0, 1).unwrap(), 1.0);
        assert_eq!(biolek_window(0.0, -1.0, 1).unwrap(), 0.0);
        // H(0) = 0: zero drive uses the positive-drive window
        assert_eq!(biolek_window(0.5, 0.0, 1).unwrap(), 0.75);
        assert!(biolek_window(1.5, 1.0, 1).is_err());
        assert!(biolek_window(-0.1, 1.0, 1).is_err());
    }

    #[test]
    fn biolek_rates() {
        let m = BiolekModel::linear(0.05, -0.025).unwrap();
        assert!((m.rate(0.5, DriveSign::Positive).unwrap() - 0.0375).abs() < 1e-15);
        assert!((m.rate(0.5, DriveSign::Negative).unwrap() + 0.01875).abs() < 1e-15);
        assert_eq!(m.rate(0.3, DriveSign::Zero).unwrap(), 0.0);
        assert_eq!(m.rate(1.0, DriveSign::Positive).unwrap(), 0.0);
        assert_eq!(m.rate(0.0, DriveSign::Negative).unwrap(), 0.0);
        assert!(BiolekModel::new(0.05, 0.01, 1).is_err());
        assert!(BiolekModel::new(0.05, -0.01, 0).is_err());
    }

    #[test]
    fn memristance_map() {
        assert_eq!(memristance(0.0, 2000.0, 10000.0).unwrap(), 10000.0);
        assert_eq!(memristance(1.0, 2000.0, 10000.0).unwrap(), 2000.0);
        assert_eq!(memristance(0.5, 2000.0, 10000.0).unwrap(), 6000.0);
        assert!(memristance(1.01, 2000.0, 10000.0).is_err());
        assert_eq!(state_from_memristance(6000.0, 2000.0, 10000.0), 0.5);
    }

    #[test]
    fn circuit_rates() {
        let c = fig3_circuit();
        // R_M = 2000 at x = 1: V_M = 1.1 V
        let r = c.rate(1.0, 2.2).unwrap();
        assert!((r - 0.1 * 0.05).abs() < 1e-12);
        // R_M = 10000 at x = 0: V_M = -1.8333 V
        let r = c.rate(0.0, -2.2).unwrap();
        assert!((r - (-(10.0 / 12.0) * 2.2 + 0.7) * 0.05).abs() < 1e-12);
        // dead zone
        assert_eq!(c.rate(0.5, 0.5).unwrap(), 0.0);
        assert_eq!(c.rate(0.5, -0.5).unwrap(), 0.0);
        assert!(ThresholdCircuit::new(0.05, 1.0, -0.7, 2000.0, 5000.0, 4000.0).is_err());
        assert!(ThresholdCircuit::new(0.05, -1.0, -0.7, 2000.0, 2000.0, 4000.0).is_err());
    }

    #[test]
    fn above_threshold_check() {
        let c = fig3_circuit();
        let chk = c.validate_above_threshold(&fig3_train());
        assert!(chk.above_threshold);
        assert!((chk.margin_plus - 0.1).abs() < 1e-12);
        assert!((chk.margin_minus + 0.4).abs() < 1e-12);

        let weak = PulseTrain::new(1.0, 0.4, 0.25, 1.0, -1.0).unwrap();
        assert!(!c.validate_above_threshold(&weak).above_threshold);

        let tiny = ThresholdCircuit::new(0.05, 1e-9, -1e-9, 2000.0, 2000.0, 10000.0).unwrap();
        let small = PulseTrain::new(1.0, 0.4, 0.25, 0.01, -0.01).unwrap();
        let chk = tiny.validate_above_threshold(&small);
        assert!(chk.above_threshold && chk.margin_plus > 0.0);
    }

    proptest! {
        #[test]
        fn window_in_unit_interval(x in 0.0f64..=1.0, drive in -5.0f64..5.0, p in 1u32..6) {
            let w = biolek_window(x, drive, p).unwrap();
            prop_assert!((0.0..=1.0).contains(&w));
        }

        #[test]
        fn biolek_rate_sign(x in 1e-9f64..(1.0 - 1e-9), hp in 1e-4f64..1.0, hm in -1.0f64..-1e-4, p in 1u32..4) {
            let m = BiolekModel::new(hp, hm, p).unwrap();
            prop_assert!(m.rate(x, DriveSign::Positive).unwrap() > 0.0);
            prop_assert!(m.rate(x, DriveSign::Negative).unwrap() < 0.0);
            prop_assert_eq!(m.rate(1.0, DriveSign::Positive).unwrap(), 0.0);
            prop_assert_eq!(m.rate(0.0, DriveSign::Negative).unwrap(), 0.0);
        }

        #[test]
        fn memristance_decreasing(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            prop_assume!(a < b);
            prop_assert!(memristance(a, 2000.0, 10000.0).unwrap() > memristance(b, 2000.0, 10000.0).unwrap());
        }

        #[test]
        fn drive_periodic(t in 0.0f64..50.0, k in 1u32..5) {
            // dyadic widths keep t and t + k*T on the same side of each edge
            let tr = PulseTrain::new(1.0, 0.375, 0.25, 2.0, -1.5).unwrap();
            let t = (t * 1024.0).round() / 1024.0;
            prop_assert_eq!(tr.drive_at(t).unwrap(), tr.drive_at(t + k as f64).unwrap());
        }

        #[test]
        fn threshold_rate_continuous(x in 0.0f64..=1.0) {
            let c = fig3_circuit();
            let r_m = c.memristance(x).unwrap();
            let ratio = r_m / (c.r_series() + r_m);
            for v_thr in [c.v_on(), c.v_off()] {
                let v_edge = v_thr / ratio;
                let below = c.rate(x, v_edge * (1.0 - 1e-9)).unwrap();
                let above = c.rate(x, v_edge * (1.0 + 1e-9)).unwrap();
                prop_assert!(below.abs() < 1e-8 && above.abs() < 1e-8);
            }
        }
    }
}

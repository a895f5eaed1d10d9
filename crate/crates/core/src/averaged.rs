//! Time-averaged evolution of a pulse-driven memristor.
//!
//! Over one period the state changes by `f(x, A+) tau+ + f(x, A-) tau-` (the
//! zero-drive gap contributes nothing), so the one-period average obeys
//!
//! ```text
//! d xbar / dt = ( f(xbar, A+) tau+ + f(xbar, A-) tau- ) / T
//! ```
//!
//! A zero of the right-hand side is a fixed point, stable when the
//! derivative there is negative. For the Biolek model with `p = 1` the
//! equation is a Riccati equation with a tanh solution; for the threshold
//! circuit it separates in the memristance and has an implicit logarithmic
//! solution.

use crate::error::{domain, Error, Result};
use crate::exact_sim::{Sample, Trajectory};
use crate::models::{BiolekModel, Model, PulseTrain, ThresholdCircuit};

/// Below this distance from `alpha = 1` the exponential form is used.
pub const ALPHA_BRANCH_TOLERANCE: f64 = 1e-8;

/// Default number of uniform cells scanned by [`numeric_fixed_point`].
pub const DEFAULT_SCAN_CELLS: usize = 1024;

const ROOT_TOLERANCE: f64 = 1e-12;
const RESISTANCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    /// Zero linearized rate.
    Marginal,
}

impl Stability {
    fn from_rate_derivative(d: f64) -> Self {
        if d < 0.0 {
            Stability::Stable
        } else if d > 0.0 {
            Stability::Unstable
        } else {
            Stability::Marginal
        }
    }
}

/// Location and character of the fixed point of an averaged field.
///
/// `location` is in state coordinates for the Biolek model and for
/// [`numeric_fixed_point`], and in ohms for [`circuit_fixed_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointReport {
    pub location: Option<f64>,
    pub stability: Option<Stability>,
    /// Present only for a stable, in-range fixed point.
    pub relaxation_time: Option<f64>,
    pub in_range: bool,
    /// Boundary the state saturates at when no fixed point is in range.
    pub saturation_target: Option<f64>,
}

impl FixedPointReport {
    pub fn is_stable(&self) -> bool {
        self.stability == Some(Stability::Stable)
    }
}

/// The averaged vector field `xbar -> d xbar / dt` of a model under a pulse train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedField {
    model: Model,
    train: PulseTrain,
}

impl AveragedField {
    /// Fails with [`Error::Validity`] for a threshold circuit that is not
    /// driven above threshold at every admissible memristance.
    pub fn new(model: Model, train: PulseTrain) -> Result<Self> {
        if let Model::Threshold(c) = &model {
            let chk = c.validate_above_threshold(&train);
            if !chk.above_threshold {
                return Err(Error::Validity(format!(
                    "memristor voltage is not above threshold for all R_M (margins {:+.6} V, {:+.6} V)",
                    chk.margin_plus, chk.margin_minus
                )));
            }
        }
        Ok(Self { model, train })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn train(&self) -> &PulseTrain {
        &self.train
    }

    pub fn rate(&self, xbar: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&xbar) {
            return domain(format!("averaged state {xbar} lies outside [0, 1]"));
        }
        Ok(self.rate_unchecked(xbar))
    }

    #[inline]
    pub(crate) fn rate_unchecked(&self, xbar: f64) -> f64 {
        let tr = &self.train;
        (self.model.rate_unchecked(xbar, tr.amp_plus()) * tr.tau_plus()
            + self.model.rate_unchecked(xbar, tr.amp_minus()) * tr.tau_minus())
            / tr.period()
    }
}

/// Free function form of [`AveragedField::rate`].
pub fn averaged_rate(field: &AveragedField, xbar: f64) -> Result<f64> {
    field.rate(xbar)
}

/// RK4 integration of the averaged equation with the state clamped to `[0, 1]`.
pub fn integrate_averaged(field: &AveragedField, x0: f64, t_end: f64, dt: f64) -> Result<Trajectory> {
    if !(0.0..=1.0).contains(&x0) {
        return domain(format!("initial state x0 = {x0} lies outside [0, 1]"));
    }
    if !(t_end > 0.0 && dt > 0.0) {
        return domain("t_end and dt must be positive");
    }
    let n = (t_end / dt).ceil() as usize;
    let h = t_end / n as f64;
    let f = |x: f64| field.rate_unchecked(x);
    let mut x = x0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(Sample { t: 0.0, x });
    for i in 0..n {
        let k1 = f(x);
        let k2 = f(x + 0.5 * h * k1);
        let k3 = f(x + 0.5 * h * k2);
        let k4 = f(x + h * k3);
        x = (x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).clamp(0.0, 1.0);
        out.push(Sample { t: (i + 1) as f64 * h, x });
    }
    Trajectory::from_samples(out)
}

// ---------------------------------------------------------------------------
// Biolek window, p = 1

/// Reduced parameters of the averaged Biolek equation
/// `d xbar/dt = k [ (alpha - 1) xbar^2 - 2 alpha xbar + 1 ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiolekAveragedParams {
    /// `|h(I-) tau-| / (h(I+) tau+)`.
    pub alpha: f64,
    /// `h(I+) tau+ / T`.
    pub k: f64,
}

impl BiolekAveragedParams {
    pub fn new(alpha: f64, k: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return domain(format!("alpha must be positive, got {alpha}"));
        }
        if !(k.is_finite() && k > 0.0) {
            return domain(format!("k must be positive, got {k}"));
        }
        Ok(Self { alpha, k })
    }

    /// Requires `p = 1` and two pulses of non-zero width.
    pub fn from_model(model: &BiolekModel, train: &PulseTrain) -> Result<Self> {
        if model.p() != 1 {
            return Err(Error::InvalidRequest(format!(
                "closed-form averaged dynamics needs window exponent p = 1, got {}",
                model.p()
            )));
        }
        // through duty ratios, so that rescaling T leaves both values bit-identical
        let ratio = model.h_minus().abs() / model.h_plus() * (train.tau_minus() / train.tau_plus());
        Self::new(ratio, model.h_plus() * (train.tau_plus() / train.period()))
    }

    /// `D[alpha] = sqrt(1 - alpha + alpha^2)`, never below `sqrt(3)/2`.
    pub fn discriminant(&self) -> f64 {
        discriminant(self.alpha)
    }
}

fn discriminant(alpha: f64) -> f64 {
    (1.0 - alpha + alpha * alpha).sqrt()
}

fn check_state(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        domain(format!("state {x} lies outside [0, 1]"))
    }
}

pub fn biolek_averaged_ode_rhs(params: &BiolekAveragedParams, xbar: f64) -> Result<f64> {
    check_state(xbar)?;
    let a = params.alpha;
    Ok(params.k * ((a - 1.0) * xbar * xbar - 2.0 * a * xbar + 1.0))
}

/// Closed-form averaged trajectory from `xbar(0) = x0`.
pub fn biolek_solution(params: &BiolekAveragedParams, x0: f64, t: f64) -> Result<f64> {
    check_state(x0)?;
    if !(t >= 0.0) {
        return domain(format!("time must be non-negative, got {t}"));
    }
    let a = params.alpha;
    if (a - 1.0).abs() <= ALPHA_BRANCH_TOLERANCE {
        return Ok(0.5 + (x0 - 0.5) * (-2.0 * params.k * t).exp());
    }
    let d = params.discriminant();
    let th = (params.k * d * t).tanh();
    let num = (a * x0 - 1.0) * th - d * x0;
    let den = ((a - 1.0) * x0 - a) * th - d;
    Ok(num / den)
}

/// Stable fixed point `(alpha - D) / (alpha - 1)`, evaluated in the
/// equivalent form `1 / (alpha + D)` which is exact at `alpha = 1`.
pub fn biolek_fixed_point(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    Ok(1.0 / (alpha + discriminant(alpha)))
}

/// `T / (2 h(I+) tau+ D) = 1 / (2 k D)`.
pub fn biolek_relaxation_time(params: &BiolekAveragedParams) -> f64 {
    1.0 / (2.0 * params.k * params.discriminant())
}

/// Image of `(alpha, x0, t)` under the `alpha -> 1/alpha` symmetry:
/// `biolek_solution(1/alpha, 1 - x0, t) = 1 - biolek_solution(alpha, x0, t/alpha)`
/// at equal `k`.
pub fn biolek_symmetry_map(alpha: f64, x0: f64, t: f64) -> Result<(f64, f64, f64)> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    check_state(x0)?;
    Ok((1.0 / alpha, 1.0 - x0, t / alpha))
}

fn biolek_report(params: &BiolekAveragedParams) -> FixedPointReport {
    FixedPointReport {
        location: Some(1.0 / (params.alpha + params.discriminant())),
        stability: Some(Stability::Stable),
        relaxation_time: Some(biolek_relaxation_time(params)),
        in_range: true,
        saturation_target: None,
    }
}

// ---------------------------------------------------------------------------
// Threshold memristor in series with a resistor

/// `kappa = V+ tau+ + V- tau-`, `p = V_on tau+ + V_off tau-`, and the period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitAveragedParams {
    pub kappa: f64,
    pub p: f64,
    pub period: f64,
}

impl CircuitAveragedParams {
    pub fn new(circ: &ThresholdCircuit, train: &PulseTrain) -> Self {
        Self {
            kappa: train.amp_plus() * train.tau_plus() + train.amp_minus() * train.tau_minus(),
            p: circ.v_on() * train.tau_plus() + circ.v_off() * train.tau_minus(),
            period: train.period(),
        }
    }
}

/// `dR_M/dt = -(beta (R_off - R_on) / T) [ R_M/(R + R_M) kappa - p ]`.
pub fn circuit_resistance_rate(circ: &ThresholdCircuit, params: &CircuitAveragedParams, r_m: f64) -> f64 {
    let scale = circ.beta() * (circ.r_off() - circ.r_on()) / params.period;
    -scale * (r_m / (circ.r_series() + r_m) * params.kappa - params.p)
}

/// `R_a = R p / (kappa - p)`, its stability, and where the memristance goes
/// when `R_a` is outside `[R_on, R_off]`.
pub fn circuit_fixed_point(circ: &ThresholdCircuit, params: &CircuitAveragedParams) -> Result<FixedPointReport> {
    let denom = params.kappa - params.p;
    if denom == 0.0 {
        return Err(Error::DegenerateFixedPoint);
    }
    let r = circ.r_series();
    let r_a = r * params.p / denom;
    let decay = circ.beta() * (circ.r_off() - circ.r_on()) / params.period * params.kappa * r / (r + r_a).powi(2);
    let stability = if decay > 0.0 {
        Stability::Stable
    } else if decay < 0.0 {
        Stability::Unstable
    } else {
        Stability::Marginal
    };
    let in_range = circ.r_on() < r_a && r_a < circ.r_off();
    let saturation_target = if in_range {
        None
    } else {
        let mid = 0.5 * (circ.r_on() + circ.r_off());
        let drift = circuit_resistance_rate(circ, params, mid);
        if drift > 0.0 {
            Some(circ.r_off())
        } else if drift < 0.0 {
            Some(circ.r_on())
        } else {
            None
        }
    };
    let relaxation_time = (in_range && stability == Stability::Stable).then(|| 1.0 / decay);
    Ok(FixedPointReport {
        location: Some(r_a),
        stability: Some(stability),
        relaxation_time,
        in_range,
        saturation_target,
    })
}

/// `T kappa R / (beta (R_off - R_on) (kappa - p)^2)` for a stable in-range fixed point.
pub fn circuit_relaxation_time(circ: &ThresholdCircuit, params: &CircuitAveragedParams) -> Result<f64> {
    let report = circuit_fixed_point(circ, params)?;
    if !(report.in_range && report.is_stable()) {
        return Err(Error::InvalidRequest("relaxation time requires a stable fixed point inside [R_on, R_off]".into()));
    }
    let dk = params.kappa - params.p;
    Ok(params.period * params.kappa * circ.r_series() / (circ.beta() * (circ.r_off() - circ.r_on()) * dk * dk))
}

/// Memristance at time `t` from the implicit solution
///
/// ```text
/// R_M - R0 + (R + R_a) ln((R_M - R_a)/(R0 - R_a)) = -(beta (R_off - R_on)/T)(kappa - p) t
/// ```
///
/// solved by bisection between `R0` and `R_a`, then polished with Newton
/// steps that are only accepted inside the bracket.
pub fn circuit_solution(circ: &ThresholdCircuit, params: &CircuitAveragedParams, r0: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be non-negative, got {t}"));
    }
    if !(circ.r_on()..=circ.r_off()).contains(&r0) {
        return domain(format!("R0 = {r0} lies outside [{}, {}]", circ.r_on(), circ.r_off()));
    }
    let report = circuit_fixed_point(circ, params)?;
    if !(report.in_range && report.is_stable()) {
        return Err(Error::InvalidRequest(
            "implicit solution needs a stable fixed point inside [R_on, R_off]; use the simulator".into(),
        ));
    }
    let r_a = report.location.expect("circuit report always has a location");
    if (r0 - r_a).abs() < RESISTANCE_TOLERANCE {
        return Ok(r_a);
    }
    if t == 0.0 {
        return Ok(r0);
    }
    let rhs = circ.beta() * (circ.r_off() - circ.r_on()) / params.period * (params.kappa - params.p) * t;
    let g = circ.r_series() + r_a;
    let residual = |r: f64| r - r0 + g * ((r - r_a) / (r0 - r_a)).ln() + rhs;

    // residual(r0) = rhs > 0 and residual -> -inf towards r_a
    let mut far = r0;
    let mut near = r_a;
    let mut iterations = 0;
    while (far - near).abs() > RESISTANCE_TOLERANCE {
        let mid = 0.5 * (far + near);
        if mid == far || mid == near {
            break;
        }
        if residual(mid) > 0.0 {
            far = mid;
        } else {
            near = mid;
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NonConvergence("bisection on the implicit memristance equation".into()));
        }
    }
    let (lo, hi) = if far < near { (far, near) } else { (near, far) };
    let mut r = 0.5 * (far + near);
    for _ in 0..4 {
        let slope = (circ.r_series() + r) / (r - r_a);
        let next = r - residual(r) / slope;
        if !(next > lo && next < hi) || next == r {
            break;
        }
        r = next;
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Numerical fixed points

/// A zero of the averaged field with its linearized rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRoot {
    pub location: f64,
    pub derivative: f64,
}

fn central_derivative(field: &AveragedField, x: f64) -> f64 {
    let h = 1e-6;
    (field.rate_unchecked(x + h) - field.rate_unchecked(x - h)) / (2.0 * h)
}

fn bisect(field: &AveragedField, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = field.rate_unchecked(lo);
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = field.rate_unchecked(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All sign changes of the averaged field on `[0, 1]`, found by a uniform
/// scan over `cells` cells followed by bisection.
pub fn field_roots(field: &AveragedField, cells: usize) -> Result<Vec<FieldRoot>> {
    if cells == 0 {
        return domain("scan needs at least one cell");
    }
    let grid: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&x| field.rate_unchecked(x)).collect();
    let mut roots = Vec::new();
    for i in 0..cells {
        let (a, b) = (values[i], values[i + 1]);
        let x = if a == 0.0 {
            // an exact zero on the grid; a dead band of zeros reports its left end only
            if i > 0 && values[i - 1] == 0.0 {
                continue;
            }
            grid[i]
        } else if a * b < 0.0 {
            bisect(field, grid[i], grid[i + 1])
        } else {
            continue;
        };
        roots.push(FieldRoot { location: x, derivative: central_derivative(field, x) });
    }
    if values[cells] == 0.0 && values[cells - 1] != 0.0 {
        roots.push(FieldRoot { location: 1.0, derivative: central_derivative(field, 1.0) });
    }
    Ok(roots)
}

/// Scan-and-bisect fixed point of the averaged field in state coordinates.
///
/// When several roots exist the stable one is reported. Without a root the
/// report carries no location and names the boundary the state drifts to.
pub fn numeric_fixed_point(field: &AveragedField, cells: usize) -> Result<FixedPointReport> {
    let roots = field_roots(field, cells)?;
    let chosen = roots.iter().find(|r| r.derivative < 0.0).or_else(|| roots.first());
    Ok(match chosen {
        Some(root) => {
            let stability = Stability::from_rate_derivative(root.derivative);
            FixedPointReport {
                location: Some(root.location),
                stability: Some(stability),
                relaxation_time: (stability == Stability::Stable).then(|| -1.0 / root.derivative),
                in_range: true,
                saturation_target: None,
            }
        }
        None => {
            let drift = field.rate_unchecked(0.5);
            FixedPointReport {
                location: None,
                stability: None,
                relaxation_time: None,
                in_range: false,
                saturation_target: Some(if drift > 0.0 { 1.0 } else { 0.0 }),
            }
        }
    })
}

/// Fixed-point analysis with the closed forms where they apply: Biolek with
/// `p = 1` (state coordinates), the threshold circuit (ohms); otherwise the
/// numerical scan (state coordinates).
pub fn analyze(model: &Model, train: &PulseTrain) -> Result<FixedPointReport> {
    match model {
        Model::Biolek(m) if m.p() == 1 => Ok(biolek_report(&BiolekAveragedParams::from_model(m, train)?)),
        Model::Biolek(_) => numeric_fixed_point(&AveragedField::new(*model, *train)?, DEFAULT_SCAN_CELLS),
        Model::Threshold(c) => {
            AveragedField::new(*model, *train)?;
            circuit_fixed_point(c, &CircuitAveragedParams::new(c, train))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::memristance;
    use proptest::prelude::*;

    fn fig3() -> (ThresholdCircuit, PulseTrain) {
        (
            ThresholdCircuit::new(0.05, 1.0, -0.7, 2000.0, 2000.0, 10000.0).unwrap(),
            PulseTrain::new(1.0, 0.4, 0.25, 2.2, -2.2).unwrap(),
        )
    }

    fn biolek_field(alpha: f64, h_plus_tau: f64) -> AveragedField {
        let train = PulseTrain::new(1.0, 0.2, 0.2, 1.0, -1.0).unwrap();
        let m = BiolekModel::linear(h_plus_tau / 0.2, -alpha * h_plus_tau / 0.2).unwrap();
        AveragedField::new(m.into(), train).unwrap()
    }

    #[test]
    fn biolek_field_values() {
        assert!(biolek_field(1.0, 0.01).rate(0.5).unwrap().abs() < 1e-16);
        assert!((biolek_field(2.0, 0.01).rate(0.0).unwrap() - 0.01).abs() < 1e-15);
        assert!(biolek_field(1.0, 0.01).rate(1.5).is_err());
    }

    #[test]
    fn biolek_rhs_matches_generic_field() {
        let field = biolek_field(1.7, 0.01);
        let Model::Biolek(m) = field.model() else { unreachable!() };
        let params = BiolekAveragedParams::from_model(m, field.train()).unwrap();
        assert!((params.alpha - 1.7).abs() < 1e-14);
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let a = biolek_averaged_ode_rhs(&params, x).unwrap();
            let b = field.rate(x).unwrap();
            assert!((a - b).abs() < 1e-15, "{x}: {a} {b}");
        }
    }

    #[test]
    fn rhs_examples() {
        let p = BiolekAveragedParams::new(1.0, 0.01).unwrap();
        assert_eq!(biolek_averaged_ode_rhs(&p, 0.5).unwrap(), 0.0);
        let p = BiolekAveragedParams::new(2.0, 0.01).unwrap();
        assert_eq!(biolek_averaged_ode_rhs(&p, 0.0).unwrap(), 0.01);
        let x_a = biolek_fixed_point(2.0).unwrap();
        assert!(biolek_averaged_ode_rhs(&p, x_a).unwrap().abs() < 1e-17);
        assert!(BiolekAveragedParams::new(0.0, 0.01).is_err());
    }

    #[test]
    fn fixed_point_values() {
        assert_eq!(biolek_fixed_point(1.0).unwrap(), 0.5);
        assert!((biolek_fixed_point(2.0).unwrap() - (2.0 - 3f64.sqrt())).abs() < 1e-15);
        let half = biolek_fixed_point(0.5).unwrap();
        assert!((half - (0.5 - 0.75f64.sqrt()) / -0.5).abs() < 1e-15);
        assert!((half - (1.0 - biolek_fixed_point(2.0).unwrap())).abs() < 1e-15);
        assert!(biolek_fixed_point(0.0).is_err());
        assert!(biolek_fixed_point(-1.0).is_err());
        // rationalized form agrees with the textbook quotient away from alpha = 1
        for a in [0.1, 0.7, 1.3, 4.0, 9.0] {
            let direct = (a - discriminant(a)) / (a - 1.0);
            assert!((biolek_fixed_point(a).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn relaxation_time_values() {
        let p = BiolekAveragedParams::new(1.0, 0.01).unwrap();
        assert!((biolek_relaxation_time(&p) - 50.0).abs() < 1e-12);
        let p2 = BiolekAveragedParams::new(2.0, 0.01).unwrap();
        assert!((biolek_relaxation_time(&p2) - 1.0 / (0.02 * 3f64.sqrt())).abs() < 1e-12);
        let inv = BiolekAveragedParams::new(0.5, 0.01).unwrap();
        assert!((biolek_relaxation_time(&inv) - 2.0 * biolek_relaxation_time(&p2)).abs() < 1e-10);
    }

    #[test]
    fn solution_at_alpha_one() {
        let p = BiolekAveragedParams::new(1.0, 0.01).unwrap();
        for t in [0.0, 10.0, 50.0, 300.0] {
            let want = 0.5 + 0.25 * (-0.02_f64 * t).exp();
            assert!((biolek_solution(&p, 0.75, t).unwrap() - want).abs() < 1e-15);
        }
        // tanh branch just outside the tolerance meets the exponential branch
        let near = BiolekAveragedParams::new(1.0 + 2.0 * ALPHA_BRANCH_TOLERANCE, 0.01).unwrap();
        assert!((biolek_solution(&near, 0.75, 40.0).unwrap() - biolek_solution(&p, 0.75, 40.0).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn solution_stationary_at_fixed_point() {
        for a in [0.3, 1.0, 2.0, 7.0] {
            let p = BiolekAveragedParams::new(a, 0.02).unwrap();
            let x_a = biolek_fixed_point(a).unwrap();
            for t in [0.0, 5.0, 500.0] {
                assert!((biolek_solution(&p, x_a, t).unwrap() - x_a).abs() < 1e-14);
            }
        }
        let p = BiolekAveragedParams::new(2.0, 0.01).unwrap();
        assert!(biolek_solution(&p, 0.5, -1.0).is_err());
        assert!(biolek_solution(&p, 1.5, 1.0).is_err());
    }

    #[test]
    fn symmetry_map_examples() {
        assert_eq!(biolek_symmetry_map(1.0, 0.5, 3.0).unwrap(), (1.0, 0.5, 3.0));
        assert_eq!(biolek_symmetry_map(2.0, 0.0, 4.0).unwrap(), (0.5, 1.0, 2.0));
        assert!(biolek_symmetry_map(0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn circuit_fixed_point_fig3() {
        let (c, tr) = fig3();
        let params = CircuitAveragedParams::new(&c, &tr);
        assert!((params.kappa - 0.33).abs() < 1e-12);
        assert!((params.p - 0.225).abs() < 1e-12);
        let rep = circuit_fixed_point(&c, &params).unwrap();
        assert!((rep.location.unwrap() - 30000.0 / 7.0).abs() < 1e-8);
        assert!(rep.is_stable() && rep.in_range && rep.saturation_target.is_none());
        let tau = circuit_relaxation_time(&c, &params).unwrap();
        assert!((tau - 0.33 * 2000.0 / (0.05 * 8000.0 * 0.105 * 0.105)).abs() < 1e-9);
        assert!((rep.relaxation_time.unwrap() - tau).abs() < 1e-9);
        assert!((tau - 149.659863945578).abs() < 1e-9);
    }

    #[test]
    fn circuit_degenerate_and_out_of_range() {
        let (c, tr) = fig3();
        let mut params = CircuitAveragedParams::new(&c, &tr);
        params.p = params.kappa;
        assert_eq!(circuit_fixed_point(&c, &params), Err(Error::DegenerateFixedPoint));

        params.p = 0.0;
        let rep = circuit_fixed_point(&c, &params).unwrap();
        assert_eq!(rep.location, Some(0.0));
        assert!(!rep.in_range);
        assert_eq!(rep.saturation_target, Some(c.r_on()));
        assert!(circuit_relaxation_time(&c, &params).is_err());
        assert!(circuit_solution(&c, &params, 5000.0, 1.0).is_err());
    }

    #[test]
    fn circuit_unstable_when_kappa_negative() {
        let (c, _) = fig3();
        // kappa < p < 0 places R_a in range with the wrong sign of decay
        let params = CircuitAveragedParams { kappa: -0.2, p: -0.15, period: 1.0 };
        let rep = circuit_fixed_point(&c, &params).unwrap();
        assert!(rep.in_range, "{rep:?}");
        assert_eq!(rep.stability, Some(Stability::Unstable));
        assert!(rep.relaxation_time.is_none());
        assert!(circuit_relaxation_time(&c, &params).is_err());
    }

    #[test]
    fn circuit_relaxation_scales() {
        let (c, tr) = fig3();
        let base = circuit_relaxation_time(&c, &CircuitAveragedParams::new(&c, &tr)).unwrap();
        let c2 = ThresholdCircuit::new(0.1, 1.0, -0.7, 2000.0, 2000.0, 10000.0).unwrap();
        let doubled = circuit_relaxation_time(&c2, &CircuitAveragedParams::new(&c2, &tr)).unwrap();
        assert!((doubled - base / 2.0).abs() < 1e-10);
        for scale in [0.2, 5.0, 25.0] {
            let tr_c = tr.with_period(scale).unwrap();
            let tau = circuit_relaxation_time(&c, &CircuitAveragedParams::new(&c, &tr_c)).unwrap();
            assert!((tau - base).abs() < 1e-9 * base, "{scale}: {tau}");
        }
    }

    #[test]
    fn circuit_solution_basics() {
        let (c, tr) = fig3();
        let params = CircuitAveragedParams::new(&c, &tr);
        let r_a = 30000.0 / 7.0;
        assert_eq!(circuit_solution(&c, &params, 8000.0, 0.0).unwrap(), 8000.0);
        assert!((circuit_solution(&c, &params, r_a, 123.0).unwrap() - r_a).abs() < 1e-9);
        assert!(circuit_solution(&c, &params, 8000.0, -1.0).is_err());
        assert!(circuit_solution(&c, &params, 12000.0, 1.0).is_err());
        let tau = circuit_relaxation_time(&c, &params).unwrap();
        // small displacement decays exponentially
        let delta = 1e-3;
        for t in [0.5 * tau, tau, 3.0 * tau] {
            let r = circuit_solution(&c, &params, r_a + delta, t).unwrap();
            let want = r_a + delta * (-t / tau).exp();
            assert!((r - want).abs() < 1e-6 * delta + 2e-12 * r_a, "{t}: {r} {want}");
        }
    }

    #[test]
    fn circuit_field_equals_reduced_form() {
        let (c, tr) = fig3();
        let field = AveragedField::new(c.into(), tr).unwrap();
        let params = CircuitAveragedParams::new(&c, &tr);
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            let r_m = memristance(x, c.r_on(), c.r_off()).unwrap();
            let reduced = c.beta() / tr.period() * (r_m / (c.r_series() + r_m) * params.kappa - params.p);
            assert!((field.rate(x).unwrap() - reduced).abs() < 1e-15);
        }
    }

    #[test]
    fn field_rejects_below_threshold() {
        let (c, _) = fig3();
        let weak = PulseTrain::new(1.0, 0.4, 0.25, 1.0, -1.0).unwrap();
        assert!(matches!(AveragedField::new(c.into(), weak), Err(Error::Validity(_))));
    }

    #[test]
    fn numeric_matches_closed_forms() {
        let rep = numeric_fixed_point(&biolek_field(2.0, 0.01), DEFAULT_SCAN_CELLS).unwrap();
        assert!((rep.location.unwrap() - (2.0 - 3f64.sqrt())).abs() < 1e-10);
        assert!(rep.is_stable());
        let tau = rep.relaxation_time.unwrap();
        assert!((tau - 1.0 / (0.02 * 3f64.sqrt())).abs() < 1e-5 * tau);

        let (c, tr) = fig3();
        let rep = numeric_fixed_point(&AveragedField::new(c.into(), tr).unwrap(), DEFAULT_SCAN_CELLS).unwrap();
        assert!((rep.location.unwrap() - 5.0 / 7.0).abs() < 1e-10);
        assert!(rep.is_stable());
    }

    #[test]
    fn numeric_saturation_report() {
        let (c, _) = fig3();
        // tau- = 0.05: R_a below R_on, memristance drops to R_on (x -> 1)
        let tr = PulseTrain::new(1.0, 0.4, 0.05, 2.2, -2.2).unwrap();
        let rep = numeric_fixed_point(&AveragedField::new(c.into(), tr).unwrap(), 256).unwrap();
        assert!(!rep.in_range && rep.location.is_none());
        assert_eq!(rep.saturation_target, Some(1.0));
        let circ = circuit_fixed_point(&c, &CircuitAveragedParams::new(&c, &tr)).unwrap();
        assert_eq!(circ.saturation_target, Some(c.r_on()));
    }

    #[test]
    fn analyze_dispatch() {
        let (c, tr) = fig3();
        let rep = analyze(&c.into(), &tr).unwrap();
        assert!((rep.location.unwrap() - 30000.0 / 7.0).abs() < 1e-8);
        let field = biolek_field(1.0, 0.01);
        let rep = analyze(field.model(), field.train()).unwrap();
        assert_eq!(rep.location, Some(0.5));
        assert!((rep.relaxation_time.unwrap() - 50.0).abs() < 1e-12);
        let m = BiolekModel::new(0.05, -0.05, 2).unwrap();
        let rep = analyze(&m.into(), field.train()).unwrap();
        assert!((rep.location.unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn integrate_matches_closed_form() {
        let field = biolek_field(2.0, 0.01);
        let traj = integrate_averaged(&field, 1.0, 100.0, 0.1).unwrap();
        let p = BiolekAveragedParams::new(2.0, 0.01).unwrap();
        for s in traj.samples() {
            assert!((s.x - biolek_solution(&p, 1.0, s.t).unwrap()).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn solution_monotone_towards_fixed_point(alpha in 0.1f64..10.0, x0 in 0.0f64..=1.0) {
            let p = BiolekAveragedParams::new(alpha, 0.01).unwrap();
            let x_a = biolek_fixed_point(alpha).unwrap();
            let tau = biolek_relaxation_time(&p);
            let mut prev = (x0 - x_a).abs();
            for i in 1..=50 {
                let x = biolek_solution(&p, x0, i as f64 * tau / 5.0).unwrap();
                prop_assert!((0.0..=1.0).contains(&x));
                let d = (x - x_a).abs();
                prop_assert!(d <= prev + 1e-15);
                prev = d;
            }
        }

        #[test]
        fn symmetry_identity(alpha in 0.1f64..10.0, x0 in 0.0f64..=1.0, t in 0.0f64..2000.0) {
            let p = BiolekAveragedParams::new(alpha, 0.01).unwrap();
            let (a2, x2, t2) = biolek_symmetry_map(alpha, x0, t).unwrap();
            let q = BiolekAveragedParams::new(a2, 0.01).unwrap();
            let lhs = biolek_solution(&q, x2, t).unwrap();
            let rhs = biolek_solution(&p, x0, t2).unwrap();
            prop_assert!((lhs + rhs - 1.0).abs() < 1e-12);
        }

        #[test]
        fn circuit_solution_monotone(r0 in 2000.0f64..=10000.0) {
            let (c, tr) = fig3();
            let params = CircuitAveragedParams::new(&c, &tr);
            let r_a = 30000.0 / 7.0;
            let mut prev = (r0 - r_a).abs();
            for i in 1..=40 {
                let r = circuit_solution(&c, &params, r0, i as f64 * 20.0).unwrap();
                let d = (r - r_a).abs();
                prop_assert!(d <= prev);
                prev = d;
            }
        }
    }
}

use std::str::FromStr;

use super::csv::{format_bool, format_number, CsvTable};
use super::scenario::{ModelBlock, Prepared, Scenario, SweepBlock};
use super::CliError;
use crate::analysis::{compare_from_averaged_start, BiolekClosedForm, CircuitClosedForm, ComparisonReport};
use crate::averaged::{
    analyze, AveragedField, BiolekAveragedParams, CircuitAveragedParams, FixedPointReport, Stability,
};
use crate::batch;
use crate::error::Error;
use crate::exact_sim::{simulate, Trajectory};
use crate::models::Model;

/// Comment lines shared by every scenario-driven command.
pub fn header_comments(command: &str, sc: &Scenario) -> Vec<String> {
    vec![
        format!("memrelax {command}"),
        format!("scenario_sha256: {}", sc.sha256()),
        format!("scenario: {}", sc.canonical_json()),
    ]
}

/// Recovers the scenario echoed in a CSV comment block.
pub fn scenario_from_comments(csv_text: &str) -> Option<Result<Scenario, CliError>> {
    csv_text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# scenario: "))
        .map(Scenario::from_json)
}

fn column_names(base: &[&str], runs: usize) -> Vec<String> {
    if runs == 1 {
        return base.iter().map(|b| b.to_string()).collect();
    }
    (0..runs).flat_map(|i| base.iter().map(move |b| format!("{b}_{i}"))).collect()
}

fn simulate_all(p: &Prepared) -> Result<Vec<Trajectory>, CliError> {
    Ok(batch::try_map(&p.x0, |&x0| simulate(&p.model, &p.train, x0, p.t_end, &p.config))?)
}

/// Exact simulation of every initial state; columns `t, drive, x, R_M`
/// (suffixed `_i` per run when there are several).
pub fn run_simulate(sc: &Scenario) -> Result<CsvTable, CliError> {
    let p = sc.prepare()?;
    let runs = simulate_all(&p)?;

    let mut columns = vec!["t".to_string(), "drive".to_string()];
    columns.extend(column_names(&["x", "R_M"], runs.len()));
    let mut table = CsvTable::new(columns);
    for c in header_comments("simulate", sc) {
        table.comment(c);
    }
    table.comment(format!("model: {}", p.model.name()));
    table.comment(format!("x0: {}", p.x0.iter().map(|&x| format_number(x)).collect::<Vec<_>>().join(" ")));

    let n = runs[0].len();
    let mut row = Vec::with_capacity(2 + 2 * runs.len());
    for i in (0..n).step_by(p.decimation) {
        let t = runs[0].samples()[i].t;
        row.clear();
        row.push(t);
        row.push(p.train.drive_at(t)?);
        for r in &runs {
            let x = r.samples()[i].x;
            row.push(x);
            row.push(p.memristance(x));
        }
        table.push_numbers(&row);
    }
    Ok(table)
}

/// Parameter sweep specification `param:min:max:n[:log]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl FromStr for Sweep {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| CliError::Invalid { field: "sweep".into(), message: format!("{m} in '{s}'") };
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad("expected param:min:max:n[:log]"));
        }
        let min = parts[1].parse().map_err(|_| bad("bad min"))?;
        let max = parts[2].parse().map_err(|_| bad("bad max"))?;
        let points = parts[3].parse().map_err(|_| bad("bad point count"))?;
        let log = match parts.get(4) {
            None => false,
            Some(&"log") => true,
            Some(_) => return Err(bad("fifth field must be 'log'")),
        };
        Sweep { parameter: parts[0].to_string(), min, max, points, log }.checked()
    }
}

impl From<&SweepBlock> for Sweep {
    fn from(b: &SweepBlock) -> Self {
        Sweep { parameter: b.parameter.clone(), min: b.min, max: b.max, points: b.points, log: b.log }
    }
}

impl Sweep {
    fn checked(self) -> Result<Self, CliError> {
        let bad = |m: String| Err(CliError::Invalid { field: "sweep".into(), message: m });
        if self.points == 0 {
            return bad("point count must be >= 1".into());
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("range must be finite".into());
        }
        if self.log && !(self.min > 0.0 && self.max > 0.0) {
            return bad("log sweep needs a positive range".into());
        }
        Ok(self)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let f = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                if self.log {
                    (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + f * (self.max - self.min)
                }
            })
            .collect()
    }
}

const BIOLEK_SWEEPABLE: &[&str] = &["alpha", "h_plus", "h_minus", "period", "tau_plus", "tau_minus"];
const THRESHOLD_SWEEPABLE: &[&str] =
    &["beta", "v_on", "v_off", "r_series", "r_on", "r_off", "period", "tau_plus", "tau_minus", "amp_plus", "amp_minus"];

/// Copy of `sc` with one named parameter replaced.
pub fn with_parameter(sc: &Scenario, name: &str, value: f64) -> Result<Scenario, CliError> {
    let mut out = sc.clone();
    let pulse = &mut out.pulse;
    match (name, &mut out.model) {
        ("period", _) => pulse.period = value,
        ("tau_plus", _) => pulse.tau_plus = value,
        ("tau_minus", _) => pulse.tau_minus = value,
        ("alpha", ModelBlock::Biolek(b)) => {
            if pulse.tau_minus <= 0.0 {
                return Err(CliError::Invalid {
                    field: "sweep.parameter".into(),
                    message: "alpha needs tau_minus > 0".into(),
                });
            }
            b.h_minus = -value * b.h_plus * pulse.tau_plus / pulse.tau_minus;
        }
        ("h_plus", ModelBlock::Biolek(b)) => b.h_plus = value,
        ("h_minus", ModelBlock::Biolek(b)) => b.h_minus = value,
        ("amp_plus", ModelBlock::Threshold(_)) => pulse.amp_plus = value,
        ("amp_minus", ModelBlock::Threshold(_)) => pulse.amp_minus = value,
        ("beta", ModelBlock::Threshold(t)) => t.beta = value,
        ("v_on", ModelBlock::Threshold(t)) => t.v_on = value,
        ("v_off", ModelBlock::Threshold(t)) => t.v_off = value,
        ("r_series", ModelBlock::Threshold(t)) => t.r_series = value,
        ("r_on", ModelBlock::Threshold(t)) => t.r_on = value,
        ("r_off", ModelBlock::Threshold(t)) => t.r_off = value,
        (_, m) => {
            let allowed = match m {
                ModelBlock::Biolek(_) => BIOLEK_SWEEPABLE,
                ModelBlock::Threshold(_) => THRESHOLD_SWEEPABLE,
            };
            return Err(CliError::Invalid {
                field: "sweep.parameter".into(),
                message: format!("unknown parameter '{name}'; expected one of {}", allowed.join(", ")),
            });
        }
    }
    Ok(out)
}

fn stability_name(s: Option<Stability>) -> &'static str {
    match s {
        Some(Stability::Stable) => "stable",
        Some(Stability::Unstable) => "unstable",
        Some(Stability::Marginal) => "marginal",
        None => "none",
    }
}

fn opt_number(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_else(|| "nan".into())
}

/// Human-readable fixed-point summary, one `key: value` per line.
pub fn fixed_point_summary(model: &Model, train: &crate::models::PulseTrain, rep: &FixedPointReport) -> Vec<String> {
    let mut lines = vec![format!("model: {}", model.name())];
    match model {
        Model::Biolek(m) => {
            if let Ok(params) = BiolekAveragedParams::from_model(m, train) {
                lines.push(format!("alpha: {}", format_number(params.alpha)));
                lines.push(format!("k: {}", format_number(params.k)));
            }
            lines.push("location_units: state".into());
        }
        Model::Threshold(c) => {
            let params = CircuitAveragedParams::new(c, train);
            let chk = c.validate_above_threshold(train);
            lines.push(format!("kappa: {}", format_number(params.kappa)));
            lines.push(format!("p: {}", format_number(params.p)));
            lines.push(format!("threshold_margin_plus: {}", format_number(chk.margin_plus)));
            lines.push(format!("threshold_margin_minus: {}", format_number(chk.margin_minus)));
            lines.push("location_units: ohm".into());
        }
    }
    lines.push(format!("location: {}", opt_number(rep.location)));
    lines.push(format!("stability: {}", stability_name(rep.stability)));
    lines.push(format!("relaxation_time: {}", opt_number(rep.relaxation_time)));
    lines.push(format!("in_range: {}", rep.in_range));
    lines.push(format!(
        "saturation_target: {}",
        rep.saturation_target.map(format_number).unwrap_or_else(|| "none".into())
    ));
    lines
}

pub struct FixedPointOutput {
    pub summary: Vec<String>,
    pub table: Option<CsvTable>,
}

/// Fixed-point report, or a CSV sweep of `(parameter, location, tau_a, stable, in_range)`.
pub fn run_fixed_point(sc: &Scenario, sweep: Option<&Sweep>) -> Result<FixedPointOutput, CliError> {
    let owned;
    let sweep = match (sweep, &sc.sweep) {
        (Some(s), _) => Some(s),
        (None, Some(block)) => {
            owned = Sweep::from(block).checked()?;
            Some(&owned)
        }
        (None, None) => None,
    };
    let Some(sweep) = sweep else {
        let model = sc.build_model()?.0;
        let train = sc.build_train()?;
        let rep = analyze(&model, &train)?;
        return Ok(FixedPointOutput { summary: fixed_point_summary(&model, &train, &rep), table: None });
    };

    // reject an unknown name before doing any work
    with_parameter(sc, &sweep.parameter, sweep.min)?;
    let values = sweep.values();
    let rows = batch::try_map(&values, |&v| -> Result<Vec<String>, CliError> {
        let point = with_parameter(sc, &sweep.parameter, v)?;
        let model = point.build_model()?.0;
        let train = point.build_train()?;
        Ok(match analyze(&model, &train) {
            Ok(rep) => vec![
                format_number(v),
                opt_number(rep.location),
                opt_number(rep.relaxation_time),
                format_bool(rep.is_stable()),
                format_bool(rep.in_range),
            ],
            Err(Error::DegenerateFixedPoint | Error::Validity(_)) => {
                vec![format_number(v), "nan".into(), "nan".into(), format_bool(false), format_bool(false)]
            }
            Err(e) => return Err(e.into()),
        })
    })?;

    let mut table = CsvTable::new(
        [sweep.parameter.as_str(), "location", "tau_a", "stable", "in_range"].iter().map(|s| s.to_string()).collect(),
    );
    for c in header_comments("fixed-point", sc) {
        table.comment(c);
    }
    table.comment(format!(
        "sweep: {}:{}:{}:{}{}",
        sweep.parameter,
        format_number(sweep.min),
        format_number(sweep.max),
        sweep.points,
        if sweep.log { ":log" } else { "" }
    ));
    table.comment(match sc.model {
        ModelBlock::Biolek(_) => "location_units: state",
        ModelBlock::Threshold(_) => "location_units: ohm",
    });
    for r in rows {
        table.push_row(r);
    }
    Ok(FixedPointOutput { summary: vec![format!("{} sweep points", values.len())], table: Some(table) })
}

/// Exact run against the closed-form averaged solution, one run per initial state.
pub fn compare_runs(p: &Prepared) -> Result<Vec<(Trajectory, ComparisonReport)>, CliError> {
    let window = p.train.period();
    let closed: ClosedKind = match &p.model {
        Model::Biolek(m) => ClosedKind::Biolek(BiolekAveragedParams::from_model(m, &p.train)?),
        Model::Threshold(c) => {
            AveragedField::new(p.model, p.train)?;
            ClosedKind::Circuit(*c, CircuitAveragedParams::new(c, &p.train))
        }
    };
    Ok(batch::try_map(&p.x0, |&x0| -> Result<_, Error> {
        let traj = simulate(&p.model, &p.train, x0, p.t_end, &p.config)?;
        let rep = match closed {
            ClosedKind::Biolek(params) => {
                compare_from_averaged_start(&traj, |x| Ok(BiolekClosedForm { params, x0: x }), window)?
            }
            ClosedKind::Circuit(c, params) => {
                compare_from_averaged_start(&traj, |x| CircuitClosedForm::from_state(c, params, x), window)?
            }
        };
        Ok((traj, rep))
    })?)
}

#[derive(Clone, Copy)]
enum ClosedKind {
    Biolek(BiolekAveragedParams),
    Circuit(crate::models::ThresholdCircuit, CircuitAveragedParams),
}

pub fn comparison_line(i: usize, x0: f64, rep: &ComparisonReport) -> String {
    format!(
        "run {i}: x0={} sup_deviation={} rms_deviation={} per_pulse_increment={} fitted_relaxation_time={} analytic_relaxation_time={}",
        format_number(x0),
        format_number(rep.sup_deviation),
        format_number(rep.rms_deviation),
        format_number(rep.per_pulse_increment),
        opt_number(rep.fitted_relaxation_time),
        format_number(rep.analytic_relaxation_time),
    )
}

/// Columns `t, x, xbar, xbar_closed` on the averaged grid (suffixed per run).
pub fn comparison_table(runs: &[(Trajectory, ComparisonReport)], decimation: usize) -> CsvTable {
    let mut columns = vec!["t".to_string()];
    columns.extend(column_names(&["x", "xbar", "xbar_closed"], runs.len()));
    let mut table = CsvTable::new(columns);
    let n = runs.iter().map(|(_, r)| r.averaged.len()).min().unwrap_or(0);
    let mut row = Vec::new();
    for i in (0..n).step_by(decimation.max(1)) {
        row.clear();
        row.push(runs[0].1.averaged.samples()[i].t);
        for (traj, rep) in runs {
            row.push(traj.samples()[i].x);
            row.push(rep.averaged.samples()[i].x);
            row.push(rep.closed_form[i]);
        }
        table.push_numbers(&row);
    }
    table
}

pub struct CompareOutput {
    pub table: CsvTable,
    pub summary: Vec<String>,
}

pub fn run_compare(sc: &Scenario) -> Result<CompareOutput, CliError> {
    let p = sc.prepare()?;
    let runs = compare_runs(&p)?;
    let summary: Vec<String> = runs.iter().enumerate().map(|(i, (_, rep))| comparison_line(i, p.x0[i], rep)).collect();
    let mut table = comparison_table(&runs, p.decimation);
    let mut comments = header_comments("compare", sc);
    comments.push(format!("model: {}", p.model.name()));
    comments.push("closed form starts from the one-period mean of the exact run at t = 0".into());
    comments.extend(summary.iter().cloned());
    table.comments = comments;
    Ok(CompareOutput { table, summary })
}

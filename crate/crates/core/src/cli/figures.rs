//! One-command regeneration of the data behind each figure.
//!
//! Caption parameters are fixed. Initial-condition sets, families and sweep
//! grids that captions leave open are defaults, marked `default:` in the
//! output comments and overridable through [`FigureOptions`].

use clap::ValueEnum;

use super::commands::{compare_runs, comparison_line, comparison_table};
use super::csv::{format_bool, format_number, CsvTable};
use super::scenario::Prepared;
use super::CliError;
use crate::averaged::{
    analyze, biolek_fixed_point, biolek_relaxation_time, biolek_solution, circuit_solution, BiolekAveragedParams,
    CircuitAveragedParams,
};
use crate::batch;
use crate::error::Error;
use crate::exact_sim::IntegratorConfig;
use crate::models::{memristance, BiolekModel, Model, PulseTrain, ThresholdCircuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
}

impl FigureId {
    pub const ALL: [FigureId; 6] =
        [FigureId::Fig2a, FigureId::Fig2b, FigureId::Fig3a, FigureId::Fig3b, FigureId::Fig4a, FigureId::Fig4b];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
        }
    }
}

/// Overrides for the non-caption defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureOptions {
    /// Initial states (fig2a, fig3a, fig4a, fig4b).
    pub x0: Option<Vec<f64>>,
    /// fig4a: values of |h(I-)| tau_minus. fig4b: period multiples of T0.
    pub family: Option<Vec<f64>>,
}

pub const DEFAULT_X0: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const FIG4A_FAMILY: [f64; 3] = [0.005, 0.01, 0.02];
pub const FIG4B_MULTIPLES: [f64; 3] = [1.0, 5.0, 25.0];
const FIG4A_T_END: f64 = 600.0;
const FIG4B_T_END: f64 = 300.0;
const FIG3B_RANGE: (f64, f64, usize) = (0.05, 0.30, 251);

/// Reference circuit for fig3a and fig3b: beta T = 0.05, V_on = 1, V_off = -0.7, R = R_on = 2k, R_off = 10k.
pub fn fig3_circuit() -> ThresholdCircuit {
    ThresholdCircuit::new(0.05, 1.0, -0.7, 2000.0, 2000.0, 10000.0).expect("fig3 circuit")
}

pub fn fig3_train(tau_minus: f64) -> Result<PulseTrain, Error> {
    PulseTrain::new(1.0, 0.4, tau_minus, 2.2, -2.2)
}

fn list(values: &[f64]) -> String {
    values.iter().map(|&v| format_number(v)).collect::<Vec<_>>().join(" ")
}

fn check_state(values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Invalid { field: "x0".into(), message: "list is empty".into() });
    }
    if let Some(bad) = values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(CliError::Invalid { field: "x0".into(), message: format!("{bad} lies outside [0, 1]") });
    }
    Ok(())
}

fn positive_family(values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(CliError::Invalid {
            field: "family".into(),
            message: "need a non-empty list of positive values".into(),
        });
    }
    Ok(())
}

fn reject(id: FigureId, what: &str) -> CliError {
    CliError::Usage(format!("{} does not take --{what}", id.name()))
}

/// Returns `(file name, table)` pairs.
pub fn run_figure(id: FigureId, opts: &FigureOptions) -> Result<Vec<(String, CsvTable)>, CliError> {
    let uses_x0 = !matches!(id, FigureId::Fig2b | FigureId::Fig3b);
    let uses_family = matches!(id, FigureId::Fig4a | FigureId::Fig4b);
    if opts.x0.is_some() && !uses_x0 {
        return Err(reject(id, "x0"));
    }
    if opts.family.is_some() && !uses_family {
        return Err(reject(id, "family"));
    }
    if let Some(x0) = &opts.x0 {
        check_state(x0)?;
    }
    if let Some(f) = &opts.family {
        positive_family(f)?;
    }

    let mut out = match id {
        FigureId::Fig2a => vec![(format!("{}.csv", id.name()), fig2a(opts)?)],
        FigureId::Fig2b => vec![(format!("{}.csv", id.name()), fig2b()?)],
        FigureId::Fig3a => vec![(format!("{}.csv", id.name()), fig3a(opts)?)],
        FigureId::Fig3b => vec![(format!("{}.csv", id.name()), fig3b()?)],
        FigureId::Fig4a => vec![(format!("{}.csv", id.name()), fig4a(opts)?)],
        FigureId::Fig4b => fig4b(opts)?,
    };
    for (_, table) in &mut out {
        table.comments.insert(0, format!("memrelax figure {}", id.name()));
    }
    Ok(out)
}

fn suffixed(base: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{base}_{i}")).collect()
}

fn fig2a(opts: &FigureOptions) -> Result<CsvTable, CliError> {
    let x0 = opts.x0.clone().unwrap_or_else(|| DEFAULT_X0.to_vec());
    let params = BiolekAveragedParams::new(2.0, 0.01)?;
    let mut columns = vec!["t".to_string()];
    columns.extend(suffixed("xbar", x0.len()));
    let mut table = CsvTable::new(columns);
    table.comment("averaged closed-form solution, alpha = 2, h+ tau+ = 0.01, T = 1");
    table.comment(format!("{}x0 = {}", default_tag(opts.x0.is_none(), "x0"), list(&x0)));
    for step in 0..=300 {
        let t = step as f64;
        let mut row = vec![t];
        for &x in &x0 {
            row.push(biolek_solution(&params, x, t)?);
        }
        table.push_numbers(&row);
    }
    Ok(table)
}

fn default_tag(is_default: bool, flag: &str) -> String {
    if is_default {
        format!("default (not from caption, override with --{flag}): ")
    } else {
        String::new()
    }
}

fn fig2b() -> Result<CsvTable, CliError> {
    let mut table = CsvTable::new(vec!["alpha".into(), "x_a".into(), "tau_a".into()]);
    table.comment("fixed point and relaxation time versus alpha, h+ tau+ = 0.01, T = 1");
    table.comment("alpha: 200 log-spaced points on [0.1, 10]");
    let n = 200;
    for i in 0..n {
        let alpha = (0.1f64.ln() + (i as f64 / (n - 1) as f64) * (10f64.ln() - 0.1f64.ln())).exp();
        let params = BiolekAveragedParams::new(alpha, 0.01)?;
        table.push_numbers(&[alpha, biolek_fixed_point(alpha)?, biolek_relaxation_time(&params)]);
    }
    Ok(table)
}

fn fig3a(opts: &FigureOptions) -> Result<CsvTable, CliError> {
    let x0 = opts.x0.clone().unwrap_or_else(|| DEFAULT_X0.to_vec());
    let circ = fig3_circuit();
    let params = CircuitAveragedParams::new(&circ, &fig3_train(0.25)?);
    let r0: Vec<f64> = x0.iter().map(|&x| memristance(x, circ.r_on(), circ.r_off())).collect::<Result<_, _>>()?;
    let mut columns = vec!["t".to_string()];
    columns.extend(suffixed("R_M", r0.len()));
    let mut table = CsvTable::new(columns);
    table.comment("averaged closed-form memristance, V+ = -V- = 2.2, tau+ = 0.4, tau- = 0.25, T = 1");
    table.comment("V_on = 1, V_off = -0.7, R = R_on = 2000, R_off = 10000, beta T = 0.05");
    table.comment(format!("{}x0 = {}", default_tag(opts.x0.is_none(), "x0"), list(&x0)));
    table.comment(format!("R_M(0) = {}", list(&r0)));
    for step in 0..=450 {
        let t = 2.0 * step as f64;
        let mut row = vec![t];
        for &r in &r0 {
            row.push(circuit_solution(&circ, &params, r, t)?);
        }
        table.push_numbers(&row);
    }
    Ok(table)
}

fn fig3b() -> Result<CsvTable, CliError> {
    let (lo, hi, n) = FIG3B_RANGE;
    let circ = fig3_circuit();
    let mut table =
        CsvTable::new(["tau_minus", "R_a", "tau_a", "stable", "in_range"].iter().map(|s| s.to_string()).collect());
    table.comment("circuit fixed point and relaxation time versus tau-, other parameters as fig3a");
    table.comment(format!(
        "default (not from caption): tau- grid of {n} points on [{}, {}]",
        format_number(lo),
        format_number(hi)
    ));
    let taus: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let rows = batch::try_map(&taus, |&tau| -> Result<Vec<String>, Error> {
        let train = fig3_train(tau)?;
        Ok(match analyze(&Model::Threshold(circ), &train) {
            Ok(rep) => vec![
                format_number(tau),
                rep.location.map(format_number).unwrap_or_else(|| "nan".into()),
                rep.relaxation_time.map(format_number).unwrap_or_else(|| "nan".into()),
                format_bool(rep.is_stable()),
                format_bool(rep.in_range),
            ],
            Err(Error::DegenerateFixedPoint | Error::Validity(_)) => {
                vec![format_number(tau), "nan".into(), "nan".into(), format_bool(false), format_bool(false)]
            }
            Err(e) => return Err(e),
        })
    })?;
    for r in rows {
        table.push_row(r);
    }
    Ok(table)
}

fn biolek_prepared(h_plus: f64, h_minus: f64, period: f64, x0: Vec<f64>, t_end: f64) -> Result<Prepared, CliError> {
    let model = Model::from(BiolekModel::linear(h_plus, h_minus)?);
    let train = PulseTrain::new(period, 0.2 * period, 0.2 * period, 1.0, -1.0)?;
    let spp = IntegratorConfig::default().samples_per_period * period.round().max(1.0) as usize;
    Ok(Prepared {
        model,
        train,
        config: IntegratorConfig::new(IntegratorConfig::default().substeps_per_segment, spp)?,
        x0,
        t_end,
        r_on: 2000.0,
        r_off: 10000.0,
        decimation: 1,
    })
}

fn fig4a(opts: &FigureOptions) -> Result<CsvTable, CliError> {
    let x0 = opts.x0.clone().unwrap_or_else(|| vec![0.0]);
    let family = opts.family.clone().unwrap_or_else(|| FIG4A_FAMILY.to_vec());
    let h_plus = 0.05;
    let mut runs = Vec::new();
    let mut members = Vec::new();
    for &hm_tau in &family {
        let p = biolek_prepared(h_plus, -hm_tau / 0.2, 1.0, x0.clone(), FIG4A_T_END)?;
        for (j, run) in compare_runs(&p)?.into_iter().enumerate() {
            members.push((hm_tau, x0[j]));
            runs.push(run);
        }
    }
    let mut table = comparison_table(&runs, 1);
    table.comment("exact, time-averaged exact and closed-form trajectories");
    table.comment("tau+ = tau- = 0.2 T, T = 1, h+ tau+ = 0.01");
    table.comment(format!("{}|h-| tau- = {}", default_tag(opts.family.is_none(), "family"), list(&family)));
    table.comment(format!("{}x0 = {}, t_end = {}", default_tag(opts.x0.is_none(), "x0"), list(&x0), FIG4A_T_END));
    for (i, ((hm_tau, x), (_, rep))) in members.iter().zip(&runs).enumerate() {
        table.comment(format!("column suffix {i}: |h-| tau- = {}", format_number(*hm_tau)));
        table.comment(comparison_line(i, *x, rep));
    }
    Ok(table)
}

fn fig4b(opts: &FigureOptions) -> Result<Vec<(String, CsvTable)>, CliError> {
    let x0 = opts.x0.clone().unwrap_or_else(|| vec![0.0]);
    let multiples = opts.family.clone().unwrap_or_else(|| FIG4B_MULTIPLES.to_vec());
    // |h-| 0.2 T0 = 0.01 with T0 = 1
    let (h_plus, h_minus, t0) = (0.1, -0.05, 1.0);
    let mut out = Vec::new();
    for &c in &multiples {
        let period = c * t0;
        let p = biolek_prepared(h_plus, h_minus, period, x0.clone(), FIG4B_T_END)?;
        let runs = compare_runs(&p)?;
        let mut table = comparison_table(&runs, 1);
        table.comment("exact, time-averaged exact and closed-form trajectories");
        table.comment(format!(
            "alpha = 0.5, tau+ = tau- = 0.2 T, h+ = {}, h- = {}, T0 = {}",
            format_number(h_plus),
            format_number(h_minus),
            format_number(t0)
        ));
        table.comment(format!(
            "{}T / T0 = {} of {}",
            default_tag(opts.family.is_none(), "family"),
            format_number(c),
            list(&multiples)
        ));
        table.comment(format!("{}x0 = {}, t_end = {}", default_tag(opts.x0.is_none(), "x0"), list(&x0), FIG4B_T_END));
        for (i, (_, rep)) in runs.iter().enumerate() {
            table.comment(comparison_line(i, x0[i], rep));
        }
        out.push((format!("fig4b_T{}.csv", format_number(c)), table));
    }
    Ok(out)
}

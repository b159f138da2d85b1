use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use belltransfer_core::ledger::{audit, Audit, CheckStatus, AUDIT_DEPARTURE};
use belltransfer_core::protocol::{Tolerances, Violation};
use belltransfer_core::sweep::{random_input, Axis, GridSpec, InputMode, SweepRow};
use belltransfer_core::{paper_channels, paper_trace, run_full_protocol, InputState, LedgerEntry, ORACLE_TOLERANCE};

use crate::config::RunConfig;
use crate::format::{csv_number, write_operator};
use crate::parallel::{run_sweep_parallel, threads_from_env};
use crate::report::{TraceJson, TransferJson, VERSION};
use crate::CliError;

/// Where report bytes go: the `--out` file or the provided stream.
fn with_output<F>(cfg: &RunConfig, stdout: &mut dyn Write, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

fn write_json<T: serde::Serialize>(value: &T, w: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn message(cfg: &RunConfig) -> InputState {
    cfg.input
        .clone()
        .unwrap_or_else(|| random_input(cfg.k, cfg.seed.unwrap_or(0), 0))
}

fn tolerances(cfg: &RunConfig) -> Tolerances {
    match cfg.tolerance {
        None => Tolerances::default(),
        Some(t) => Tolerances {
            probability_agreement: t,
            fidelity: t,
            conservation: t,
            unitarity: t,
        },
    }
}

/// Ledger entries for the published material of size `k`.
fn ledger_for(k: usize) -> Result<Vec<LedgerEntry>, CliError> {
    Ok(audit(&vec![AUDIT_DEPARTURE; k])?.entries)
}

fn describe(v: &Violation) -> String {
    match v {
        Violation::ProbabilityMismatch { simulated, analytic } => {
            format!("simulated probability {simulated} differs from analytic {analytic}")
        }
        Violation::LowFidelity { fidelity } => format!("branch fidelity {fidelity} below 1"),
        Violation::MassNotConserved { total } => format!("measurement probabilities sum to {total}"),
        Violation::SuccessExceedsOne { total } => format!("success probability {total} exceeds 1"),
        Violation::NonUnitary { deviation } => format!("correction operator deviates from unitarity by {deviation}"),
    }
}

pub fn transfer(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let channels = paper_channels(&cfg.deltas)?;
    let input = message(cfg);
    let report = run_full_protocol(&input, &channels)?;
    let ledger = ledger_for(cfg.k)?;
    with_output(cfg, stdout, |w| {
        write_json(&TransferJson::new(&report, &input, &ledger), w)
    })?;
    let violations = report.violations(&tolerances(cfg));
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(
            violations.iter().map(describe).collect::<Vec<_>>().join("; "),
        ))
    }
}

pub fn trace(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let channels = paper_channels(&cfg.deltas)?;
    let input = message(cfg);
    let report = paper_trace(&input, &channels)?;
    let ledger = ledger_for(cfg.k)?;
    with_output(cfg, stdout, |w| {
        write_json(&TraceJson::new(&report, &cfg.deltas, &input, &ledger), w)
    })?;
    let expected = belltransfer_core::analytic_success_probability(&channels)?;
    let tol = cfg.tolerance.unwrap_or(ORACLE_TOLERANCE);
    if (report.total_probability - expected).abs() <= tol {
        Ok(())
    } else {
        Err(CliError::Violation(format!(
            "traced probability {} differs from analytic {expected}",
            report.total_probability
        )))
    }
}

fn grid_text(axes: &[Axis]) -> String {
    axes.iter()
        .map(|a| format!("{}:{}:{}", a.min(), a.max(), a.steps()))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn sweep_grid(cfg: &RunConfig) -> Result<GridSpec, CliError> {
    let axes = cfg.grid.clone().unwrap_or_else(|| vec![Axis::default_axis(); cfg.k]);
    let mode = if cfg.analytic_only {
        InputMode::AnalyticOnly
    } else if let Some(input) = &cfg.input {
        InputMode::Fixed(input.clone())
    } else {
        InputMode::Random {
            seed: cfg.seed.unwrap_or(0),
        }
    };
    Ok(GridSpec::new(axes, mode)?)
}

/// Full CSV text: metadata comment, header, one line per row, LF endings.
pub fn sweep_csv(grid: &GridSpec, rows: &[SweepRow]) -> Result<Vec<u8>, CliError> {
    let (input, seed) = match &grid.input_mode {
        InputMode::AnalyticOnly => ("analytic", "none".to_string()),
        InputMode::Fixed(_) => ("fixed", "none".to_string()),
        InputMode::Random { seed } => ("random", seed.to_string()),
    };
    let mut out = format!(
        "# belltransfer sweep version={VERSION} k={} grid={} input={input} seed={seed}\n",
        grid.k(),
        grid_text(&grid.axes)
    )
    .into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        let mut header: Vec<&str> = ["delta_a", "delta_b", "delta_c"][..grid.k()].to_vec();
        header.push("p_analytic");
        if grid.simulates() {
            header.extend(["p_simulated", "fidelity_min"]);
        }
        w.write_record(&header).map_err(std::io::Error::from)?;
        for row in rows {
            let mut record: Vec<String> = row.deltas.iter().map(|&d| csv_number(d)).collect();
            record.push(csv_number(row.p_analytic));
            if grid.simulates() {
                record.push(row.p_simulated.map(csv_number).unwrap_or_default());
                record.push(row.fidelity_min.map(csv_number).unwrap_or_default());
            }
            w.write_record(&record).map_err(std::io::Error::from)?;
        }
        w.flush()?;
    }
    Ok(out)
}

fn row_violation(row: &SweepRow, tol: &Tolerances) -> Option<String> {
    if let Some(p) = row.p_simulated {
        if !((p - row.p_analytic).abs() <= tol.probability_agreement) {
            return Some(format!(
                "at {:?}: simulated {p} vs analytic {}",
                row.deltas, row.p_analytic
            ));
        }
    }
    match row.fidelity_min {
        Some(f) if !(f >= 1.0 - tol.fidelity) => Some(format!("at {:?}: fidelity {f}", row.deltas)),
        _ => None,
    }
}

pub fn sweep(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let grid = sweep_grid(cfg)?;
    let rows = run_sweep_parallel(&grid, threads_from_env()?)?;
    let bytes = sweep_csv(&grid, &rows)?;
    with_output(cfg, stdout, |w| Ok(w.write_all(&bytes)?))?;
    let tol = tolerances(cfg);
    let bad: Vec<String> = rows.iter().filter_map(|r| row_violation(r, &tol)).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(format!(
            "{} grid points fail: {}",
            bad.len(),
            bad[0]
        )))
    }
}

fn dump(audits: &[Audit], dir: &Path) -> Result<Vec<String>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for a in audits {
        let k = a.k;
        for (name, op) in [
            (format!("u_k{k}.txt"), &a.trace.permutation),
            (format!("f_k{k}_literal.txt"), &a.literal_filter),
            (format!("f_k{k}_constructive.txt"), &a.trace.constructive_filter),
        ] {
            let path = dir.join(&name);
            let mut w = BufWriter::new(File::create(&path)?);
            write_operator(op, &mut w)?;
            w.flush()?;
            written.push(path.display().to_string());
        }
    }
    Ok(written)
}

pub fn verify_report(audits: &[Audit]) -> String {
    let mut out = format!("belltransfer verify {VERSION}\n");
    let mut entries: Vec<&LedgerEntry> = Vec::new();
    for a in audits {
        let deltas: Vec<String> = a.departures.iter().map(|&d| csv_number(d)).collect();
        out.push_str(&format!("\nk = {} at departures {}\n", a.k, deltas.join(",")));
        for c in &a.checks {
            out.push_str(&format!("{:<6} {}: {}\n", c.status.as_str(), c.name, c.detail));
        }
        out.push_str(&format!(
            "       published filter unitarity deviation: {:.3e}\n",
            a.literal_filter_deviation
        ));
        entries.extend(&a.entries);
    }
    out.push_str(&format!("\nledger: {} entries\n", entries.len()));
    for (i, e) in entries.iter().enumerate() {
        out.push_str(&format!(
            "[{}] {} ({})\n    printed: {}\n    derived: {}\n",
            i + 1,
            e.location,
            e.severity.as_str(),
            e.printed,
            e.derived
        ));
    }
    let overall = if audits.iter().all(Audit::passed) {
        "PASS"
    } else {
        "FAIL"
    };
    out.push_str(&format!("\noverall: {overall}\n"));
    out
}

pub fn verify(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    if cfg.tolerance.is_some() {
        return Err(CliError::Usage(
            "verify uses fixed tolerances; --tolerance does not apply".into(),
        ));
    }
    let audits = if cfg.deltas_given {
        vec![audit(&cfg.deltas)?]
    } else {
        vec![audit(&[AUDIT_DEPARTURE; 2])?, audit(&[AUDIT_DEPARTURE; 3])?]
    };
    let mut text = verify_report(&audits);
    if let Some(dir) = &cfg.dump_operators {
        for path in dump(&audits, dir)? {
            text.push_str(&format!("wrote {path}\n"));
        }
    }
    with_output(cfg, stdout, |w| Ok(w.write_all(text.as_bytes())?))?;
    if audits.iter().all(Audit::passed) {
        Ok(())
    } else {
        let failed: Vec<String> = audits
            .iter()
            .flat_map(|a| {
                a.checks
                    .iter()
                    .filter(|c| c.status == CheckStatus::Fail)
                    .map(|c| c.name.clone())
            })
            .collect();
        Err(CliError::Violation(format!("checks failed: {}", failed.join(", "))))
    }
}

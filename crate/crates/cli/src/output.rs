//! CSV emission. All floats are printed with 17 significant digits so
//! identical runs produce identical bytes.

use std::collections::BTreeMap;

use coopsim_core::experiments::{CellResult, CellStatus, RunMetrics};

/// Fixed float formatting: 17 significant digits, scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn sanitize(message: &str) -> String {
    message.replace([',', '\n'], ";")
}

fn status_field(status: &CellStatus) -> String {
    match status {
        CellStatus::Ok => "ok".to_string(),
        CellStatus::Failed(reason) => format!("error: {}", sanitize(reason)),
    }
}

/// Per-tick series plus a trailing summary line.
pub fn series_csv(metrics: &RunMetrics, iterations: u64, seed: u64) -> String {
    let mut out = String::from("tick,cooperator_fraction\n");
    for (tick, fraction) in metrics.series.iter().enumerate() {
        out.push_str(&tick.to_string());
        out.push(',');
        out.push_str(&fmt_f64(*fraction));
        out.push('\n');
    }
    out.push_str(&format!(
        "# tail_mean={} final_fraction={} window={} iterations={} seed={}\n",
        fmt_f64(metrics.tail_mean),
        fmt_f64(metrics.final_fraction),
        metrics.window,
        iterations,
        seed,
    ));
    out
}

/// Sweep rows in the base schema: one row per executed cell.
pub fn sweep_csv(cells: &[CellResult], header_comment: &str) -> String {
    let mut out = String::new();
    out.push_str(header_comment);
    out.push_str("strategy,x,seed,tail_mean,final_fraction,status\n");
    for cell in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            cell.config.spec.strategy,
            fmt_f64(cell.config.spec.prob),
            cell.seed,
            fmt_f64(cell.tail_mean),
            fmt_f64(cell.final_fraction),
            status_field(&cell.status),
        ));
    }
    out
}

/// Sweep rows for named experiments: the base schema extended with the
/// schedule's varying dimensions.
pub fn experiment_csv(cells: &[CellResult], header_comment: &str) -> String {
    let mut out = String::new();
    out.push_str(header_comment);
    out.push_str(
        "strategy,x,seed,tail_mean,final_fraction,status,population,ipc,icpc,icpd,tc,rep\n",
    );
    for cell in cells {
        let init = &cell.config.init;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            cell.config.spec.strategy,
            fmt_f64(cell.config.spec.prob),
            cell.seed,
            fmt_f64(cell.tail_mean),
            fmt_f64(cell.final_fraction),
            status_field(&cell.status),
            init.population,
            fmt_f64(init.ipc),
            fmt_f64(init.icpc),
            fmt_f64(init.icpd),
            cell.config.tuning.criterion,
            cell.repetition,
        ));
    }
    out
}

/// Two-column x-vs-mean file for plotting: cells that ran are grouped by
/// exact x value (ascending) and their tail means averaged.
pub fn plot_data(cells: &[CellResult]) -> String {
    let mut by_x: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
    for cell in cells {
        if cell.status.is_ok() {
            let x = cell.config.spec.prob;
            by_x.entry(x.to_bits()).or_insert((x, Vec::new())).1.push(cell.tail_mean);
        }
    }
    let mut rows: Vec<(f64, f64)> = by_x
        .into_values()
        .map(|(x, tails)| (x, tails.iter().sum::<f64>() / tails.len() as f64))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = String::from("x,mean_tail\n");
    for (x, mean) in rows {
        out.push_str(&fmt_f64(x));
        out.push(',');
        out.push_str(&fmt_f64(mean));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_float_formatting() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f64(2.0 / 3.0), "6.6666666666666663e-1");
    }

    #[test]
    fn series_csv_shape() {
        let metrics = RunMetrics::from_series(vec![0.5, 0.6, 0.7], 2);
        let csv = series_csv(&metrics, 2, 42);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "tick,cooperator_fraction");
        assert_eq!(lines[1], "0,5.0000000000000000e-1");
        assert!(lines[4].starts_with("# tail_mean="));
        assert!(lines[4].contains("seed=42"));
    }
}

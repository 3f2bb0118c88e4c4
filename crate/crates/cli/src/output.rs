//! File emission: UTF-8 CSV with a fixed header, comma separators and LF
//! line ends, floats at 17 significant digits so a parse round-trips
//! bit-exactly; summaries as pretty JSON.

use std::fs;
use std::path::{Path, PathBuf};

use wavesearch::engine::Trajectory;
use wavesearch::oscillator::{total_energy, OscillatorParams};

use crate::CliError;

/// 17 significant digits: one leading digit plus 16 after the point.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
        }
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A CSV table with a fixed column order.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_text(path, &self.to_csv())
    }
}

/// Fixed trajectory schema:
/// t,X,Xdot,x_1..x_N,xdot_1..xdot_N,E_total,E_big,E_register,target_fraction
pub fn trajectory_table(
    trajectory: &Trajectory,
    params: &OscillatorParams,
    targets: &[usize],
) -> Table {
    let n = params.n_items();
    let mut header: Vec<String> = vec!["t".into(), "X".into(), "Xdot".into()];
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.extend((1..=n).map(|i| format!("xdot_{i}")));
    header.extend(
        ["E_total", "E_big", "E_register", "target_fraction"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut table = Table::new(header);
    for state in &trajectory.states {
        let ledger = total_energy(state, params);
        let register = ledger.register_energy();
        let target_kinetic: f64 = targets.iter().map(|&t| 0.5 * state.vel[t] * state.vel[t]).sum();
        let fraction = if register > 0.0 {
            target_kinetic / register
        } else {
            f64::NAN
        };
        let mut row = Vec::with_capacity(2 * n + 7);
        row.push(fmt_float(state.time));
        row.push(fmt_float(state.big_pos));
        row.push(fmt_float(state.big_vel));
        row.extend(state.pos.iter().map(|&x| fmt_float(x)));
        row.extend(state.vel.iter().map(|&v| fmt_float(v)));
        row.push(fmt_float(ledger.total));
        row.push(fmt_float(ledger.big_kinetic + ledger.big_potential));
        row.push(fmt_float(register));
        row.push(fmt_float(fraction));
        table.push_row(row);
    }
    table
}

/// Summary JSON: config echo, seed, output list, and per-command results.
pub fn summary_json(
    config: &crate::config::RunConfig,
    outputs: &[PathBuf],
    results: serde_json::Value,
) -> Result<String, CliError> {
    let doc = serde_json::json!({
        "config": config,
        "seed": config.seed(),
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "results": results,
    });
    serde_json::to_string_pretty(&doc)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_csv_format() {
        for x in [
            1.0,
            -0.3333333333333333,
            std::f64::consts::PI,
            1.2345678901234567e-200,
            -9.87e250,
            0.0,
        ] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s} -> {back}");
        }
    }

    #[test]
    fn table_layout_is_header_plus_rows_lf_terminated() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push_row(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,2\n");
    }
}

use std::fmt::Write;
use std::path::Path;

use srt_core::{Method, Scheme, SweepRow};

use crate::Command;

/// Distinct (scheme, n_relays, method) series in first-seen order.
fn series(rows: &[SweepRow]) -> Vec<(Scheme, usize, Method)> {
    let mut out = Vec::new();
    for r in rows.iter().filter(|r| r.is_ok()) {
        let key = (r.scheme, r.n_relays, r.method);
        if !out.contains(&key) {
            out.push(key);
        }
    }
    out
}

fn quoted(path: &Path) -> String {
    format!("'{}'", path.display().to_string().replace('\'', "''"))
}

/// A gnuplot script that plots `csv_path`. Sweeps get outage and intercept
/// against SNR; SRT curves get intercept against outage on log-log axes.
pub fn gnuplot_script(command: &Command, rows: &[SweepRow], csv_path: &Path) -> String {
    let mut s = String::new();
    let data = quoted(csv_path);
    s.push_str("set datafile separator ','\nset key outside right\nset grid\n");
    let select = |scheme: Scheme, n: usize, method: Method, col: usize| {
        format!(
            "(strcol(1) eq '{}' && $2 == {n} && strcol(5) eq '{}' && strlen(strcol({col})) > 0 ? ${col} : 1/0)",
            scheme.as_str(),
            method.as_str()
        )
    };
    let title = |scheme: Scheme, n: usize, method: Method| match scheme {
        Scheme::Direct => format!("{} ({})", scheme.as_str(), method.as_str()),
        _ => format!("{} N={n} ({})", scheme.as_str(), method.as_str()),
    };
    let style = |method: Method| {
        if method == Method::MonteCarlo {
            "points"
        } else {
            "linespoints"
        }
    };
    let all = series(rows);

    match command {
        Command::SrtCurve { .. } => {
            s.push_str("set logscale xy\nset format xy '10^{%L}'\n");
            s.push_str("set xlabel 'outage probability'\nset ylabel 'intercept probability'\n");
            let plots: Vec<String> = all
                .iter()
                .map(|&(sc, n, m)| {
                    format!(
                        "{data} using {}:{} with {} title '{}'",
                        select(sc, n, m, 6),
                        select(sc, n, m, 7),
                        style(m),
                        title(sc, n, m)
                    )
                })
                .collect();
            let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        }
        Command::Point | Command::Sweep => {
            s.push_str("set logscale y\nset xlabel 'transmit SNR (dB)'\nset multiplot layout 1,2\n");
            for (col, label) in [(6, "outage probability"), (7, "intercept probability")] {
                let _ = writeln!(s, "set ylabel '{label}'");
                let plots: Vec<String> = all
                    .iter()
                    .map(|&(sc, n, m)| {
                        format!(
                            "{data} using 3:{} with {} title '{}'",
                            select(sc, n, m, col),
                            style(m),
                            title(sc, n, m)
                        )
                    })
                    .collect();
                let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
            }
            s.push_str("unset multiplot\n");
        }
    }
    s.push_str("pause mouse close\n");
    s
}

use std::io::Write;
use std::path::Path;

use srt_core::SweepRow;

use crate::CliError;

pub const CSV_HEADER: [&str; 11] = [
    "scheme",
    "n_relays",
    "gamma_db",
    "rate",
    "method",
    "op",
    "ip",
    "op_stderr",
    "ip_stderr",
    "trials",
    "seed",
];

fn prob(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.8e}")).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV fields of one row. Failed rows keep their identifying columns and
/// leave the probability columns empty.
pub fn record(row: &SweepRow) -> [String; 11] {
    let point = row.outcome.as_ref().ok();
    [
        row.scheme.as_str().to_string(),
        row.n_relays.to_string(),
        row.gamma_db.to_string(),
        row.rate.to_string(),
        row.method.as_str().to_string(),
        prob(point.map(|p| p.op)),
        prob(point.map(|p| p.ip)),
        prob(point.and_then(|p| p.op_stderr)),
        prob(point.and_then(|p| p.ip_stderr)),
        opt(row.trials),
        opt(row.seed),
    ]
}

pub fn write_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv(rows, &mut buf)?;
    buf.flush().map_err(io_err)
}

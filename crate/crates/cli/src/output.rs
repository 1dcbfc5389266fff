use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use vdw_relax::EosParams;

use crate::CliError;

pub type CsvWriter = csv::Writer<BufWriter<File>>;

/// Opens `dir/name`, writes the EoS parameters and `notes` as `#` lines, then the header row.
pub fn csv_file(
    dir: &Path,
    name: &str,
    params: &EosParams,
    notes: &[String],
    header: &[&str],
) -> Result<CsvWriter, CliError> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    writeln!(
        w,
        "# eos a={} b={} R={} cv={} s0={}",
        params.a, params.b, params.r, params.cv, params.s0
    )
    .map_err(io)?;
    for n in notes {
        writeln!(w, "# {n}").map_err(io)?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

/// Shortest round-trip formatting, so reruns are byte-identical.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn row(w: &mut CsvWriter, fields: impl IntoIterator<Item = String>) -> Result<(), CliError> {
    w.write_record(fields.into_iter().collect::<Vec<_>>())?;
    Ok(())
}

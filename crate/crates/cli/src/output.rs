//! CSV and JSON-lines writers.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use fnls_core::{Complex64, SpectralField};
use serde::Deserialize;

use crate::exit::{invalid, CliResult};

/// Schema version stamped into every CSV header comment.
pub const SCHEMA_VERSION: u32 = 1;

fn open(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            crate::exit::CliError::Io(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// RFC-4180 table preceded by a `# schema` comment line naming the columns.
pub struct Table {
    writer: csv::Writer<Box<dyn Write>>,
}

impl Table {
    pub fn create(path: Option<&Path>, schema: &str, columns: &[&str]) -> CliResult<Self> {
        let mut sink = open(path)?;
        writeln!(sink, "# schema: fnls.{schema}.v{SCHEMA_VERSION} ({})", columns.join(","))?;
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(columns)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal, in exponent form outside `[1e-4, 1e15)`; empty for NaN
/// so that missing values stay blank.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        String::new()
    } else if x == 0.0 || (1e-4..1e15).contains(&a) || a.is_infinite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `[re,im]` pairs at 17 significant digits.
fn coeff_json(c: Complex64) -> String {
    format!("[{:.16e},{:.16e}]", c.re, c.im)
}

pub fn snapshot_line(time: f64, f: &SpectralField) -> String {
    let coeffs: Vec<String> = f.coeffs().iter().map(|&c| coeff_json(c)).collect();
    format!(
        "{{\"time\":{:.16e},\"cutoff\":{},\"coeffs\":[{}]}}",
        time,
        f.cutoff(),
        coeffs.join(",")
    )
}

pub struct JsonLines {
    sink: Box<dyn Write>,
}

impl JsonLines {
    pub fn create(path: &Path) -> CliResult<Self> {
        Ok(Self {
            sink: open(Some(path))?,
        })
    }

    pub fn write(&mut self, line: &str) -> CliResult<()> {
        writeln!(self.sink, "{line}")?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.sink.flush()?;
        Ok(())
    }
}

/// `--out results.csv` pairs with `results.jsonl` for trajectories.
pub fn sibling_jsonl(out: &Path) -> PathBuf {
    out.with_extension("jsonl")
}

#[derive(Deserialize)]
struct Snapshot {
    cutoff: Option<usize>,
    coeffs: Vec<[f64; 2]>,
}

/// Reads a field from the first non-empty line of a snapshot file; the format is the
/// one written by [`snapshot_line`], with `cutoff` optional.
pub fn read_field(path: &Path) -> CliResult<SpectralField> {
    let file = File::open(path)
        .map_err(|e| invalid(format!("cannot open initial file {}: {e}", path.display())))?;
    let line = BufReader::new(file)
        .lines()
        .map_while(|l| l.ok())
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| invalid(format!("initial file {} is empty", path.display())))?;
    let snap: Snapshot = serde_json::from_str(&line)
        .map_err(|e| invalid(format!("initial file {}: {e}", path.display())))?;
    let len = snap.coeffs.len();
    if len.is_multiple_of(2) {
        return Err(invalid("initial coefficient count must be odd (2N+1)"));
    }
    let cutoff = (len - 1) / 2;
    if let Some(c) = snap.cutoff {
        if c != cutoff {
            return Err(invalid(format!(
                "initial file declares cutoff {c} but holds {len} coefficients"
            )));
        }
    }
    let coeffs = snap.coeffs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    Ok(SpectralField::from_coeffs(cutoff, coeffs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trips_exactly() {
        let f = SpectralField::from_modes(
            2,
            &[(-2, Complex64::new(0.1, -1.0 / 3.0)), (1, Complex64::new(std::f64::consts::PI, 1e-300))],
        )
        .unwrap();
        let dir = std::env::temp_dir().join(format!("fnls-snap-{}", std::process::id()));
        std::fs::write(&dir, snapshot_line(0.25, &f)).unwrap();
        let g = read_field(&dir).unwrap();
        std::fs::remove_file(&dir).ok();
        assert_eq!(f, g);
    }
}

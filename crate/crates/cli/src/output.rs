//! CSV and text writers. Numbers are written in plain decimal notation with
//! 12 significant digits; lines end in LF.

use std::fs;
use std::path::{Path, PathBuf};

use focp_core::costeff::Ratio;

use crate::CliError;

const SIGNIFICANT: i32 = 12;

/// Plain decimal with 12 significant digits.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if mag >= SIGNIFICANT {
        let unit = 10f64.powi(mag + 1 - SIGNIFICANT);
        return format!("{:.0}", (x / unit).round() * unit);
    }
    let decimals = (SIGNIFICANT - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new leading digit
    let digits = s.bytes().filter(u8::is_ascii_digit).skip_while(|d| *d == b'0').count();
    if digits > SIGNIFICANT as usize && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

pub fn ratio(r: Ratio) -> String {
    match r {
        Ratio::Finite(v) => num(v),
        other => other.to_string(),
    }
}

/// Output directory of one command run.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn csv<I, R>(&self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(self.path(name))
            .map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r.into_iter().collect::<Vec<_>>()).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn text(&self, name: &str, body: &str) -> Result<(), CliError> {
        fs::write(self.path(name), body)?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

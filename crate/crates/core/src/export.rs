//! Deterministic report formatting: 17 significant digits in JSON, 9 in CSV.

use std::io;

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::cplx::C64;
use crate::error::{FockError, Result};

/// Pretty JSON formatter writing every float with 17 significant digits.
struct Fixed17 {
    inner: PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for Fixed17 {
    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );

    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fixed17 { inner: PrettyFormatter::new() });
    value.serialize(&mut ser).map_err(|e| FockError::Parse(e.to_string()))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| FockError::Parse(e.to_string()))
}

/// A float rounded to 9 significant digits in its shortest form.
pub fn fmt_csv(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let r: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    if r == 0.0 {
        "0".into()
    } else if (1e-4..1e9).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn fmt_csv_complex(z: C64) -> String {
    format!("{},{}", fmt_csv(z.re), fmt_csv(z.im))
}

fn write_rows(rows: impl IntoIterator<Item = Vec<String>>, header: Option<&[&str]>) -> Result<String> {
    let csv_err = |e: csv::Error| FockError::Parse(e.to_string());
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h).map_err(csv_err)?;
    }
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| FockError::Parse(e.to_string()))?)
        .map_err(|e| FockError::Parse(e.to_string()))
}

/// Row-major complex matrix with one quoted `re,im` cell per entry.
pub fn matrix_to_csv(m: &DMatrix<C64>) -> Result<String> {
    write_rows((0..m.nrows()).map(|i| (0..m.ncols()).map(|k| fmt_csv_complex(m[(i, k)])).collect()), None)
}

/// Generic table with a header row.
pub fn table_to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    write_rows(rows, Some(header))
}

/// Parses a matrix written by [`matrix_to_csv`].
pub fn matrix_from_csv(text: &str) -> Result<DMatrix<C64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| FockError::Parse(e.to_string()))?;
        let row = rec
            .iter()
            .map(|cell| {
                let (a, b) = cell.split_once(',').ok_or_else(|| FockError::Parse(format!("bad cell {cell:?}")))?;
                let re = a.parse::<f64>().map_err(|e| FockError::Parse(e.to_string()))?;
                let im = b.parse::<f64>().map_err(|e| FockError::Parse(e.to_string()))?;
                Ok(C64::new(re, im))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(FockError::Parse("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, k| rows[i][k]))
}

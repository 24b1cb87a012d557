//! Byte-stable JSON and CSV output.
//!
//! Floats are always written in C `%.12e` style (`-1.234567890123e-04`),
//! object keys in sorted order, so identical inputs give identical files.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};

/// Formats `x` like C's `printf("%.12e", x)`.
pub fn fmt_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent always present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Pretty JSON formatter that writes every float with [`fmt_sci`].
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(fmt_sci(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with sorted keys and `%.12e` floats,
/// terminated by a newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    // Round-trip through Value so that map keys come out sorted.
    let value = serde_json::to_value(value).map_err(|e| Error::Serialization(e.to_string()))?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Serialization(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
}

/// Writes a numeric CSV table with a header row.
pub fn csv_table<const N: usize>(header: &[&str; N], rows: impl IntoIterator<Item = [f64; N]>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Serialization(e.to_string()))?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_sci(*x))).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::UnsupportedFormat(format!("unknown format '{other}'"))),
        }
    }
}

/// Objects that can be written to disk by [`export`].
pub trait Export {
    /// Short name used in error messages.
    fn kind(&self) -> &'static str;

    fn to_json(&self) -> Result<String>;

    fn to_csv(&self) -> Result<String> {
        Err(Error::UnsupportedFormat(format!("{} has no CSV form", self.kind())))
    }
}

pub fn export(object: &dyn Export, format: Format) -> Result<String> {
    match format {
        Format::Json => object.to_json(),
        Format::Csv => object.to_csv(),
    }
}

impl Export for crate::spectral::ComplexSpectrum {
    fn kind(&self) -> &'static str {
        "spectrum"
    }

    fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }

    fn to_csv(&self) -> Result<String> {
        crate::spectral::ComplexSpectrum::to_csv(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_matches_printf() {
        assert_eq!(fmt_sci(1.0), "1.000000000000e+00");
        assert_eq!(fmt_sci(-0.00012345), "-1.234500000000e-04");
        assert_eq!(fmt_sci(6.02214076e23), "6.022140760000e+23");
        assert_eq!(fmt_sci(0.0), "0.000000000000e+00");
        assert_eq!(fmt_sci(1e-300), "1.000000000000e-300");
    }

    #[test]
    fn json_is_sorted_and_sci() {
        #[derive(Serialize)]
        struct S {
            zeta: f64,
            alpha: u32,
            mid: Vec<f64>,
        }
        let s = to_json_string(&S { zeta: 0.5, alpha: 3, mid: vec![1.0, -2.0] }).unwrap();
        let a = s.find("alpha").unwrap();
        let z = s.find("zeta").unwrap();
        assert!(a < z);
        assert!(s.contains("5.000000000000e-01"));
        assert!(s.contains("\"alpha\": 3"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["mid"][1].as_f64(), Some(-2.0));
    }

    #[test]
    fn non_finite_floats_become_null() {
        let s = to_json_string(&vec![f64::INFINITY]).unwrap();
        assert!(s.contains("null"));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = csv_table(&["a", "b"], [[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "a,b");
        assert_eq!(lines[2], "3.000000000000e+00,4.000000000000e+00");
    }

    #[test]
    fn format_parsing() {
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert!(matches!("xml".parse::<Format>(), Err(Error::UnsupportedFormat(_))));
    }
}

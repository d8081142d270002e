//! Serialization helpers: every float leaves the program with 17 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::ser::Formatter;
use sha2::{Digest, Sha256};

/// Version of the CSV column layouts and NDJSON record shapes.
pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float with 17 significant digits, which round-trips any `f64`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// `serde_json` formatter that writes floats through [`sig17`] and delegates layout to
/// the wrapped formatter. Non-finite values are mapped to `null` by `serde_json` before
/// they reach the formatter.
struct Sig17<F>(F);

macro_rules! delegate {
    ($($name:ident),*) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
            self.0.$name(w)
        })*
    };
}

impl<F: Formatter> Formatter for Sig17<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(sig17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    delegate!(begin_array, end_array, end_array_value, begin_object, end_object, begin_object_value, end_object_value);
}

fn to_json<T: Serialize, F: Formatter>(value: &T, fmt: F) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(fmt));
    value.serialize(&mut ser).context("serializing JSON record")?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// One compact JSON object, no trailing newline.
pub fn json_line<T: Serialize>(value: &T) -> Result<String> {
    to_json(value, serde_json::ser::CompactFormatter)
}

/// Pretty-printed JSON with 17-digit floats and a trailing newline.
pub fn json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = to_json(value, serde_json::ser::PrettyFormatter::new())?;
    s.push('\n');
    Ok(s)
}

/// Line-oriented writer for NDJSON and CSV files.
pub struct LineWriter {
    inner: BufWriter<File>,
}

impl LineWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        Ok(LineWriter {
            inner: BufWriter::new(file),
        })
    }

    pub fn line(&mut self, line: &str) -> Result<()> {
        self.inner.write_all(line.as_bytes())?;
        self.inner.write_all(b"\n")?;
        Ok(())
    }

    pub fn record<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let s = json_line(value)?;
        self.line(&s)
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        self.line(&fields.join(","))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Hex SHA-256 of a file's contents.
pub fn file_sha256(path: &Path) -> Result<String> {
    let mut file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher)?;
    Ok(hex::encode(hasher.finalize()))
}

pub fn text_sha256(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Rec {
        t: f64,
        k: i32,
        v: Vec<f64>,
    }

    #[test]
    fn floats_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(sig17(f64::NAN), "nan");
    }

    #[test]
    fn json_uses_seventeen_digits() {
        let line = json_line(&Rec {
            t: 0.1,
            k: -2,
            v: vec![1.0, f64::NAN],
        })
        .unwrap();
        assert_eq!(
            line,
            r#"{"t":1.0000000000000001e-1,"k":-2,"v":[1.0000000000000000e0,null]}"#
        );
        let back: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(back["t"].as_f64().unwrap(), 0.1);
        let pretty = json_pretty(&Rec { t: 0.5, k: 1, v: vec![] }).unwrap();
        assert!(pretty.contains("\"t\": 5.0000000000000000e-1"), "{pretty}");
        assert!(pretty.ends_with("}\n"));
    }
}

//! JSON emission with fixed 17-significant-digit floats.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

pub const SCHEMA_VERSION: &str = "1";

/// Compact JSON whose floats always carry 17 significant digits.
struct Fixed17;

impl Formatter for Fixed17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// `d.dddddddddddddddde±x`, a valid JSON number.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, Fixed17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Envelope shared by every JSON document the CLI writes.
#[derive(Debug, Serialize)]
pub struct OutputRecord<'a, T: Serialize> {
    pub schema_version: &'static str,
    pub command: &'a str,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
    pub results: T,
}

//! Output emission: JSON (stable field order, big integers as decimal
//! strings), CSV (big-integer fields always quoted), and the human format.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

pub fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Quotes a CSV field unconditionally, escaping embedded quotes.
pub fn csv_quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

pub fn csv_row(fields: &[String]) -> String {
    fields.join(",")
}

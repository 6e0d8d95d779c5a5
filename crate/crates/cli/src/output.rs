use std::io::Write;

use cubic_genus::exact::RationalRepr;
use rug::Rational;
use serde::Serialize;

use crate::{Common, Format};

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Computation(String),
    Acceptance(Vec<u8>),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Computation(_) => 2,
            Failure::Acceptance(_) => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            Failure::Validation(m) => ("validation", m.clone()),
            Failure::Computation(m) => ("computation", m.clone()),
            Failure::Acceptance(ids) => ("acceptance", format!("failed criteria: {ids:?}")),
        };
        serde_json::json!({ "error": kind, "message": message }).to_string()
    }
}

pub fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

pub fn computation<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Computation(format!("{context}: {e}"))
}

/// `num/den`, or just `num` for integers.
pub fn rational_cell(r: &Rational) -> String {
    r.to_string()
}

pub fn repr(r: &Rational) -> RationalRepr {
    r.into()
}

/// A rendered document: JSON value, CSV table and a human-readable text.
pub struct Document<T: Serialize> {
    pub json: T,
    pub csv: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    pub pretty: String,
}

impl<T: Serialize> Document<T> {
    pub fn emit(&self, common: &Common) -> Result<(), Failure> {
        let text = match common.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(computation("serialize"))?;
                s.push('\n');
                s
            }
            Format::Csv => {
                let (header, rows) = self.csv.as_ref().ok_or_else(|| invalid("this subcommand has no CSV form"))?;
                let mut s = header.join(",");
                s.push('\n');
                for row in rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Pretty => self.pretty.clone(),
        };
        match &common.output {
            Some(path) => std::fs::write(path, text).map_err(computation("write output")),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(computation("write stdout"))
            }
        }
    }
}

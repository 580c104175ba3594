//! CSV, JSON and SVG emission with a reproducibility header.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run metadata written ahead of every table and report.
#[derive(Debug, Clone)]
pub struct Meta {
    pub command: &'static str,
    pub seed: u64,
    pub quadrature: String,
    pub timestamp: Option<u64>,
    pub extra: Vec<(String, String)>,
}

impl Meta {
    fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("riesz {VERSION}"),
            format!("command: {}", self.command),
            format!("seed: {}", self.seed),
            format!("quadrature: {}", self.quadrature),
        ];
        out.extend(self.extra.iter().map(|(k, v)| format!("{k}: {v}")));
        if let Some(t) = self.timestamp {
            out.push(format!("timestamp: {t}"));
        }
        out
    }

    fn json(&self) -> serde_json::Value {
        let mut meta = json!({
            "tool": "riesz",
            "version": VERSION,
            "command": self.command,
            "seed": self.seed,
            "quadrature": self.quadrature,
        });
        for (k, v) in &self.extra {
            meta[k] = json!(v);
        }
        if let Some(t) = self.timestamp {
            meta["timestamp"] = json!(t);
        }
        meta
    }
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", p.display()))),
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("write failed: {e}"))
}

pub fn write_csv(out: Box<dyn Write>, meta: &Meta, columns: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = out;
    for line in meta.lines() {
        writeln!(out, "# {line}").map_err(io_err)?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns).map_err(io_err)?;
    for row in rows {
        w.write_record(row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_json(mut out: Box<dyn Write>, meta: &Meta, report: &impl Serialize) -> Result<(), CliError> {
    let doc = json!({ "meta": meta.json(), "report": report });
    serde_json::to_writer_pretty(&mut out, &doc).map_err(io_err)?;
    writeln!(out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn cell_color(count: usize) -> &'static str {
    match count {
        0 => "#bdbdbd",
        1 => "#c7e9c0",
        2 => "#fdae6b",
        _ => "#e6550d",
    }
}

/// Heatmap of center multiplicity; parameters across, λ down.
pub fn heatmap_svg(parameters: &[f64], lambdas: &[f64], count: impl Fn(usize, usize) -> usize) -> String {
    let (cw, ch, left, top) = (64.0, 28.0, 70.0, 40.0);
    let width = left + cw * parameters.len() as f64 + 20.0;
    let height = top + ch * lambdas.len() as f64 + 50.0;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"11\">\n"
    );
    s += &format!("<text x=\"{left}\" y=\"20\" font-size=\"13\">number of centers</text>\n");
    for (j, l) in lambdas.iter().enumerate() {
        let y = top + ch * j as f64;
        s += &format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{l}</text>\n",
            left - 6.0,
            y + ch / 2.0 + 4.0
        );
        for i in 0..parameters.len() {
            let x = left + cw * i as f64;
            let c = count(i, j);
            s += &format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cw}\" height=\"{ch}\" fill=\"{}\" stroke=\"white\"/>\n",
                cell_color(c)
            );
            s += &format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{c}</text>\n",
                x + cw / 2.0,
                y + ch / 2.0 + 4.0
            );
        }
    }
    let base = top + ch * lambdas.len() as f64;
    for (i, p) in parameters.iter().enumerate() {
        s += &format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{p}</text>\n",
            left + cw * (i as f64 + 0.5),
            base + 16.0
        );
    }
    s += &format!("<text x=\"{}\" y=\"{}\">parameter</text>\n", left, base + 36.0);
    s += &format!("<text x=\"10\" y=\"{}\">lambda</text>\n", top - 8.0);
    s += "</svg>\n";
    s
}

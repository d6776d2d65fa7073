//! CSV and JSON writers. Every file carries the tool version and config hash.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use mqc_core::MqcSpectrum;
use serde::Serialize;

use crate::config::{Format, SweepParam};
use crate::engine::PointRecord;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits in positional notation; zero prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Provenance stamped into every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Stamp {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
}

impl Stamp {
    pub fn new(hash: String) -> Self {
        Self { tool: "mqc", version: VERSION, config_sha256: hash }
    }
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub fn write_csv(path: &Path, stamp: &Stamp, table: &Table) -> io::Result<()> {
    let mut buf = format!("# {} {} config_sha256={}\n", stamp.tool, stamp.version, stamp.config_sha256).into_bytes();
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    fs::write(path, buf)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Creates `dir` and checks that it accepts files.
pub fn prepare_dir(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".mqc-write-probe");
    fs::File::create(&probe)?.write_all(b"")?;
    fs::remove_file(probe)
}

fn coord_columns(coords: &[SweepParam]) -> Vec<String> {
    coords.iter().map(|p| p.name().to_string()).collect()
}

fn coord_values(coords: &[(SweepParam, f64)]) -> Vec<String> {
    coords.iter().map(|&(_, v)| fmt_f64(v)).collect()
}

pub fn summary_table(swept: &[SweepParam], points: &[(&[(SweepParam, f64)], &PointRecord)], entropies: bool) -> Table {
    let mut header = coord_columns(swept);
    header.extend(
        [
            "n", "j", "omega", "t", "gamma", "gamma_ud", "gamma_du", "gamma_el", "backend", "axis_x", "axis_y",
            "axis_z", "f_i", "f_q", "f_i_over_n", "f_q_over_n", "purity", "entanglement_depth", "qfi_depth",
            "squeezing_xi2", "violated_orders", "valid",
        ]
        .map(String::from),
    );
    if entropies {
        header.extend(["s_vn", "s_2", "traced_particles", "s_vn_reduced", "s_2_reduced"].map(String::from));
    }
    let mut table = Table::new(header);
    for (coords, r) in points {
        let n = r.n as f64;
        let w = &r.witness;
        let mut row = coord_values(coords);
        row.extend([
            r.n.to_string(),
            fmt_f64(r.j),
            fmt_f64(r.omega),
            fmt_f64(r.t),
            fmt_f64(r.rates.total()),
            fmt_f64(r.rates.gamma_ud),
            fmt_f64(r.rates.gamma_du),
            fmt_f64(r.rates.gamma_el),
            r.backend.name().to_string(),
            fmt_f64(r.axis[0]),
            fmt_f64(r.axis[1]),
            fmt_f64(r.axis[2]),
            fmt_f64(w.f_i),
            fmt_f64(r.f_q()),
            fmt_f64(w.f_i / n),
            fmt_f64(r.f_q() / n),
            fmt_f64(r.spectrum().total()),
            w.entanglement_depth.to_string(),
            w.qfi_depth.map_or(String::new(), |d| d.to_string()),
            w.squeezing_xi2.map_or(String::new(), fmt_f64),
            w.violated_orders().len().to_string(),
            r.diagnostics.valid.to_string(),
        ]);
        if entropies {
            match &r.entropies {
                Some(e) => row.extend([
                    fmt_f64(e.state.von_neumann),
                    fmt_f64(e.state.renyi2),
                    e.traced_particles.to_string(),
                    fmt_f64(e.reduced.von_neumann),
                    fmt_f64(e.reduced.renyi2),
                ]),
                None => row.extend(std::iter::repeat_n(String::new(), 5)),
            }
        }
        table.push(row);
    }
    table
}

pub fn spectra_table(swept: &[SweepParam], points: &[(&[(SweepParam, f64)], &PointRecord)]) -> Table {
    let mut header = coord_columns(swept);
    header.extend(["m", "intensity", "bound", "violated", "ratio", "f_q_over_n"].map(String::from));
    let mut table = Table::new(header);
    for (coords, r) in points {
        let w = &r.witness;
        let ratios = w.violation_ratios();
        let fq = fmt_f64(r.f_q() / r.n as f64);
        for (i, (m, value)) in w.spectrum.orders().enumerate() {
            let mut row = coord_values(coords);
            row.extend([
                m.to_string(),
                fmt_f64(value),
                fmt_f64(w.separable_bounds[i]),
                w.violations[i].to_string(),
                fmt_f64(ratios[i]),
                fq.clone(),
            ]);
            table.push(row);
        }
    }
    table
}

pub fn echo_table(swept: &[SweepParam], points: &[(&[(SweepParam, f64)], &PointRecord)]) -> Table {
    let mut header = coord_columns(swept);
    header.extend(["phi", "signal"].map(String::from));
    let mut table = Table::new(header);
    for (coords, r) in points {
        for (phi, f) in r.phi.iter().zip(&r.signal) {
            let mut row = coord_values(coords);
            row.extend([fmt_f64(*phi), fmt_f64(*f)]);
            table.push(row);
        }
    }
    table
}

pub fn spectrum_table(spec: &MqcSpectrum) -> Table {
    let mut table = Table::new(["m", "intensity"]);
    for (m, v) in spec.orders() {
        table.push(vec![m.to_string(), fmt_f64(v)]);
    }
    table
}

/// Writes `name.csv` / `name.json` according to `formats`; returns the paths written.
pub fn emit<T: Serialize>(
    dir: &Path,
    formats: &[Format],
    stamp: &Stamp,
    tables: &[(&str, &Table)],
    report: Option<(&str, &T)>,
) -> io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if formats.contains(&Format::Csv) {
        for (name, table) in tables {
            let path = dir.join(format!("{name}.csv"));
            write_csv(&path, stamp, table)?;
            written.push(path);
        }
    }
    if let (true, Some((name, value))) = (formats.contains(&Format::Json), report) {
        let path = dir.join(format!("{name}.json"));
        write_json(&path, value)?;
        written.push(path);
    }
    Ok(written)
}

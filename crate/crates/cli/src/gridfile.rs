//! Grid files: one JSON header line, then a CSV body `i,j,re,im`.
//!
//! For data grids `i` indexes `β` and `j` indexes `α`; for disk grids `i`
//! indexes the angle and `j` the radial node. Values are written with 17
//! significant digits so a write-read cycle is lossless.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use hyperxray::grid::{DATA_CONVENTION, DISK_CONVENTION};
use hyperxray::{Complex64, DataGrid, DataLayout, DiskGrid, DiskLayout};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSpace {
    Data,
    Disk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub schema_version: String,
    pub space: GridSpace,
    pub gamma: f64,
    pub nodes: [usize; 2],
    pub convention: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridFile {
    Data(DataGrid),
    Disk(DiskGrid),
}

impl GridFile {
    pub fn header(&self) -> Header {
        match self {
            GridFile::Data(g) => Header {
                schema_version: SCHEMA_VERSION.into(),
                space: GridSpace::Data,
                gamma: g.layout.gamma,
                nodes: [g.layout.n_beta, g.layout.n_alpha],
                convention: g.convention.clone(),
            },
            GridFile::Disk(g) => Header {
                schema_version: SCHEMA_VERSION.into(),
                space: GridSpace::Disk,
                gamma: g.layout.gamma,
                nodes: [g.layout.n_angle, g.layout.n_radial],
                convention: g.convention.clone(),
            },
        }
    }

    pub fn samples(&self) -> &[Complex64] {
        match self {
            GridFile::Data(g) => &g.samples,
            GridFile::Disk(g) => &g.samples,
        }
    }

    pub fn into_data(self) -> Result<DataGrid, CliError> {
        match self {
            GridFile::Data(g) => Ok(g),
            GridFile::Disk(_) => Err(CliError::Input("expected a data-space grid, found a disk grid".into())),
        }
    }

    pub fn into_disk(self) -> Result<DiskGrid, CliError> {
        match self {
            GridFile::Disk(g) => Ok(g),
            GridFile::Data(_) => Err(CliError::Input("expected a disk grid, found a data-space grid".into())),
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), CliError> {
        serde_json::to_writer(&mut w, &self.header()).map_err(|e| CliError::Input(e.to_string()))?;
        writeln!(w)?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["i", "j", "re", "im"]).map_err(csv_err)?;
        let cols = self.header().nodes[1];
        for (p, v) in self.samples().iter().enumerate() {
            csv.write_record([
                (p / cols).to_string(),
                (p % cols).to_string(),
                format!("{:.16e}", v.re),
                format!("{:.16e}", v.im),
            ])
            .map_err(csv_err)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let file = fs::File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::read_from(BufReader::new(file))
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self, CliError> {
        let mut first = String::new();
        r.read_line(&mut first)?;
        let header: Header =
            serde_json::from_str(first.trim()).map_err(|e| CliError::Input(format!("bad grid header: {e}")))?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "schema version {} not supported (expected {SCHEMA_VERSION})",
                header.schema_version
            )));
        }
        let [n0, n1] = header.nodes;
        let mut grid = match header.space {
            GridSpace::Data => {
                check_convention(&header, DATA_CONVENTION)?;
                GridFile::Data(DataGrid::zeros(DataLayout { gamma: header.gamma, n_beta: n0, n_alpha: n1 })?)
            }
            GridSpace::Disk => {
                check_convention(&header, DISK_CONVENTION)?;
                GridFile::Disk(DiskGrid::zeros(DiskLayout { gamma: header.gamma, n_angle: n0, n_radial: n1 })?)
            }
        };
        let samples = match &mut grid {
            GridFile::Data(g) => &mut g.samples,
            GridFile::Disk(g) => &mut g.samples,
        };
        let mut seen = vec![false; samples.len()];
        let mut csv = csv::Reader::from_reader(r);
        let head = csv.headers().map_err(csv_err)?.clone();
        if head.iter().collect::<Vec<_>>() != ["i", "j", "re", "im"] {
            return Err(CliError::Input(format!("bad CSV header {head:?}")));
        }
        for rec in csv.records() {
            let rec = rec.map_err(csv_err)?;
            let field = |k: usize| rec.get(k).ok_or_else(|| CliError::Input(format!("short row {rec:?}")));
            let i: usize = field(0)?.parse().map_err(|_| bad_row(&rec))?;
            let j: usize = field(1)?.parse().map_err(|_| bad_row(&rec))?;
            let re: f64 = field(2)?.parse().map_err(|_| bad_row(&rec))?;
            let im: f64 = field(3)?.parse().map_err(|_| bad_row(&rec))?;
            if i >= n0 || j >= n1 {
                return Err(CliError::Input(format!("row index ({i}, {j}) outside {n0}x{n1}")));
            }
            samples[i * n1 + j] = Complex64::new(re, im);
            seen[i * n1 + j] = true;
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(CliError::Input(format!("missing sample ({}, {})", p / n1, p % n1)));
        }
        Ok(grid)
    }
}

fn check_convention(h: &Header, expected: &str) -> Result<(), CliError> {
    if h.convention != expected {
        return Err(CliError::Input(format!("measure convention '{}' does not match '{expected}'", h.convention)));
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Input(format!("csv: {e}"))
}

fn bad_row(rec: &csv::StringRecord) -> CliError {
    CliError::Input(format!("unparsable row {rec:?}"))
}

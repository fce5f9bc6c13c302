//! CSV serialisation of fields. Every file starts with one comment line
//! `# {json}` carrying the grid header, followed by a CSV table.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bdvarmin_core::relaxation::{DiscreteBDField, FaceOrientation, SymMeasure};
use bdvarmin_core::{GridDomain, Sym2, SymTensorField, VectorField};
use serde::{Deserialize, Serialize};

/// Scientific notation with 17 significant digits, enough to read back
/// the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub kind: String,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl FieldHeader {
    pub fn for_grid(kind: &str, g: GridDomain) -> Self {
        FieldHeader { kind: kind.into(), nx: g.nx(), ny: g.ny(), h: g.h(), meta: BTreeMap::new() }
    }

    pub fn grid(&self) -> Result<GridDomain> {
        Ok(GridDomain::new(self.nx, self.ny, self.h)?)
    }
}

fn write_header<W: Write>(w: &mut W, header: &FieldHeader) -> Result<()> {
    writeln!(w, "# {}", serde_json::to_string(header)?)?;
    Ok(())
}

fn csv_writer<W: Write>(w: W, cols: &[&str]) -> Result<csv::Writer<W>> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(cols)?;
    Ok(c)
}

fn split_header<R: Read>(r: R) -> Result<(FieldHeader, csv::Reader<BufReader<R>>)> {
    let mut br = BufReader::new(r);
    let mut first = String::new();
    br.read_line(&mut first)?;
    let json = first.trim().strip_prefix('#').ok_or_else(|| anyhow!("missing `# {{header}}` line"))?;
    let header: FieldHeader = serde_json::from_str(json.trim()).context("bad header json")?;
    let rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(br);
    Ok((header, rdr))
}

pub fn write_vector_field<W: Write>(w: W, u: &VectorField, meta: &BTreeMap<String, String>) -> Result<()> {
    let mut w = BufWriter::new(w);
    let mut header = FieldHeader::for_grid("vector", u.grid);
    header.meta = meta.clone();
    write_header(&mut w, &header)?;
    let mut c = csv_writer(w, &["x", "y", "component", "value"])?;
    let g = u.grid;
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let (x, y) = g.node_coords(i, j);
            let v = u.at(i, j);
            for (k, val) in v.iter().enumerate() {
                c.write_record([fmt_f64(x), fmt_f64(y), k.to_string(), fmt_f64(*val)])?;
            }
        }
    }
    c.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct Row {
    x: f64,
    y: f64,
    component: String,
    value: f64,
}

fn lattice_index(v: f64, h: f64, n: usize, offset: f64) -> Result<usize> {
    let t = v / h - offset;
    let k = t.round();
    if (t - k).abs() > 1e-6 || k < 0.0 || k as usize >= n {
        bail!("coordinate {v} is not on the lattice");
    }
    Ok(k as usize)
}

pub fn read_vector_field<R: Read>(r: R) -> Result<(VectorField, FieldHeader)> {
    let (header, mut rdr) = split_header(r)?;
    if header.kind != "vector" {
        bail!("expected a vector field, found `{}`", header.kind);
    }
    let g = header.grid()?;
    let mut vals = vec![[f64::NAN; 2]; g.num_nodes()];
    for rec in rdr.deserialize() {
        let row: Row = rec?;
        let i = lattice_index(row.x, g.h(), g.nx(), 0.0)?;
        let j = lattice_index(row.y, g.h(), g.ny(), 0.0)?;
        let k: usize = row.component.parse().with_context(|| format!("component `{}`", row.component))?;
        if k > 1 {
            bail!("component {k} out of range");
        }
        vals[g.node(i, j)][k] = row.value;
    }
    if vals.iter().flatten().any(|v| v.is_nan()) {
        bail!("field file does not cover every node");
    }
    Ok((VectorField::new(g, vals)?, header))
}

const SYM_NAMES: [&str; 3] = ["xx", "yy", "xy"];

pub fn write_sym_field<W: Write>(w: W, s: &SymTensorField) -> Result<()> {
    let mut w = BufWriter::new(w);
    write_header(&mut w, &FieldHeader::for_grid("sym_tensor", s.grid))?;
    let mut c = csv_writer(w, &["x", "y", "component", "value"])?;
    let g = s.grid;
    for cj in 0..g.cells_y() {
        for ci in 0..g.cells_x() {
            let (x, y) = g.cell_center(ci, cj);
            let v = s.at(ci, cj);
            for (name, val) in SYM_NAMES.iter().zip([v.xx, v.yy, v.xy]) {
                c.write_record([fmt_f64(x), fmt_f64(y), name.to_string(), fmt_f64(val)])?;
            }
        }
    }
    c.flush()?;
    Ok(())
}

pub fn read_sym_field<R: Read>(r: R) -> Result<SymTensorField> {
    let (header, mut rdr) = split_header(r)?;
    if header.kind != "sym_tensor" {
        bail!("expected a sym_tensor field, found `{}`", header.kind);
    }
    let g = header.grid()?;
    let mut vals = vec![[f64::NAN; 3]; g.num_cells()];
    for rec in rdr.deserialize() {
        let row: Row = rec?;
        let ci = lattice_index(row.x, g.h(), g.cells_x(), 0.5)?;
        let cj = lattice_index(row.y, g.h(), g.cells_y(), 0.5)?;
        let k = SYM_NAMES.iter().position(|n| *n == row.component).ok_or_else(|| anyhow!("component `{}`", row.component))?;
        vals[g.cell(ci, cj)][k] = row.value;
    }
    if vals.iter().flatten().any(|v| v.is_nan()) {
        bail!("tensor file does not cover every cell");
    }
    Ok(SymTensorField::new(g, vals.into_iter().map(|v| Sym2::new(v[0], v[1], v[2])).collect())?)
}

/// Piecewise-constant part of a BD field: one row per cell.
pub fn write_bd_cells<W: Write>(w: W, u: &DiscreteBDField) -> Result<()> {
    let mut w = BufWriter::new(w);
    write_header(&mut w, &FieldHeader::for_grid("bd_cells", u.grid))?;
    let mut c = csv_writer(w, &["ci", "cj", "u1", "u2"])?;
    let g = u.grid;
    for cj in 0..g.cells_y() {
        for ci in 0..g.cells_x() {
            let v = u.cell_values[g.cell(ci, cj)];
            c.write_record([ci.to_string(), cj.to_string(), fmt_f64(v[0]), fmt_f64(v[1])])?;
        }
    }
    c.flush()?;
    Ok(())
}

pub fn read_bd_cells<R: Read>(r: R) -> Result<DiscreteBDField> {
    let (header, mut rdr) = split_header(r)?;
    if header.kind != "bd_cells" {
        bail!("expected bd_cells, found `{}`", header.kind);
    }
    let g = header.grid()?;
    let mut vals = vec![[f64::NAN; 2]; g.num_cells()];
    for rec in rdr.deserialize() {
        let (ci, cj, u1, u2): (usize, usize, f64, f64) = rec?;
        if ci >= g.cells_x() || cj >= g.cells_y() {
            bail!("cell ({ci}, {cj}) outside the grid");
        }
        vals[g.cell(ci, cj)] = [u1, u2];
    }
    if vals.iter().flatten().any(|v| v.is_nan()) {
        bail!("cell file does not cover every cell");
    }
    Ok(DiscreteBDField::new(g, vals, None)?)
}

/// Face jumps of a measure: `(u+ - u-) ⊙ nu` per unit length.
pub fn write_face_jumps<W: Write>(w: W, m: &SymMeasure) -> Result<()> {
    let mut w = BufWriter::new(w);
    write_header(&mut w, &FieldHeader::for_grid("face_jumps", m.ac.grid))?;
    let mut c = csv_writer(w, &["ci", "cj", "orientation", "xx", "yy", "xy", "length"])?;
    for j in &m.jumps {
        let o = match j.orientation {
            FaceOrientation::Vertical => "vertical",
            FaceOrientation::Horizontal => "horizontal",
        };
        c.write_record([
            j.cell.0.to_string(),
            j.cell.1.to_string(),
            o.to_string(),
            fmt_f64(j.jump.xx),
            fmt_f64(j.jump.yy),
            fmt_f64(j.jump.xy),
            fmt_f64(j.length),
        ])?;
    }
    c.flush()?;
    Ok(())
}

pub fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

pub fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

/// Plain CSV table with a header row.
pub fn write_table<W: Write>(w: W, cols: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut c = csv_writer(BufWriter::new(w), cols)?;
    for r in rows {
        c.write_record(r)?;
    }
    c.flush()?;
    Ok(())
}

//! File formats: CSV sample exchange with JSON sidecars, sweep outputs, and
//! the dense-operator cache dump.
//!
//! Numbers are written with 17 significant digits so a read-back reproduces
//! the exact double. Row order follows grid order, making outputs
//! byte-identical across runs.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfline::{HalfLineFunction, LogGrid, MuGrid};
use crate::model::model_matrix;
use crate::operator::DenseOperator;
use crate::spectral::{eigenvalues, ResolventBounds, SpectrumSegment, WitnessRow};
use crate::unitary::ModelElement;

/// 17 significant digits; round-trip safe for 8-byte reals.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct GridSidecar {
    pub eta_min: f64,
    pub eta_max: f64,
    pub n: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct MuSidecar {
    pub mu_max: f64,
    pub m: usize,
}

/// Sidecar path: the data path with its extension replaced by `json`.
pub fn sidecar_path(data: &Path) -> PathBuf {
    data.with_extension("json")
}

fn parse_f64(tok: &str, what: &str) -> Result<f64> {
    tok.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("{what}: {e} (token {tok:?})")))
}

/// Write samples as `xi,re,im` rows plus the grid sidecar.
pub fn write_halfline_csv(path: &Path, x: &HalfLineFunction) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "xi,re,im")?;
    for (&xi, v) in x.grid().xi().iter().zip(x.values()) {
        writeln!(w, "{},{},{}", fmt17(xi), fmt17(v.re), fmt17(v.im))?;
    }
    w.flush()?;
    let side = GridSidecar {
        eta_min: x.grid().eta_min(),
        eta_max: x.grid().eta_max(),
        n: x.grid().len(),
    };
    let mut sw = BufWriter::new(File::create(sidecar_path(path))?);
    serde_json::to_writer_pretty(&mut sw, &side).map_err(|e| Error::Parse(e.to_string()))?;
    sw.flush()?;
    Ok(())
}

/// Read samples against the grid declared in the sidecar. The xi column must
/// match the declared grid.
pub fn read_halfline_csv(path: &Path) -> Result<HalfLineFunction> {
    let side: GridSidecar = serde_json::from_reader(File::open(sidecar_path(path))?)
        .map_err(|e| Error::Parse(format!("grid sidecar: {e}")))?;
    let grid = Arc::new(LogGrid::new(side.eta_min, side.eta_max, side.n)?);
    let reader = BufReader::new(File::open(path)?);
    let mut values = Vec::with_capacity(side.n);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != "xi,re,im" {
                return Err(Error::Parse(format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let (xi_tok, re_tok, im_tok) = (
            it.next().ok_or_else(|| Error::Parse("missing xi".into()))?,
            it.next().ok_or_else(|| Error::Parse("missing re".into()))?,
            it.next().ok_or_else(|| Error::Parse("missing im".into()))?,
        );
        let k = values.len();
        let xi = parse_f64(xi_tok, "xi")?;
        let expect = grid.xi().get(k).copied().ok_or_else(|| {
            Error::Parse(format!("more rows than the declared {} nodes", side.n))
        })?;
        if (xi - expect).abs() > 1e-12 * expect.max(1e-300) {
            return Err(Error::GridMismatch(format!(
                "row {k}: xi = {xi} but the declared grid has {expect}"
            )));
        }
        values.push(Complex64::new(
            parse_f64(re_tok, "re")?,
            parse_f64(im_tok, "im")?,
        ));
    }
    HalfLineFunction::new(grid, values)
}

/// Write a model element as `mu,re_plus,im_plus,re_minus,im_minus` rows plus
/// the mu sidecar.
pub fn write_model_csv(path: &Path, phi: &ModelElement) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "mu,re_plus,im_plus,re_minus,im_minus")?;
    for (j, &mu) in phi.mu_grid().nodes().iter().enumerate() {
        let p = phi.plus()[j];
        let q = phi.minus()[j];
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt17(mu),
            fmt17(p.re),
            fmt17(p.im),
            fmt17(q.re),
            fmt17(q.im)
        )?;
    }
    w.flush()?;
    let side = MuSidecar {
        mu_max: phi.mu_grid().mu_max(),
        m: phi.mu_grid().len(),
    };
    let mut sw = BufWriter::new(File::create(sidecar_path(path))?);
    serde_json::to_writer_pretty(&mut sw, &side).map_err(|e| Error::Parse(e.to_string()))?;
    sw.flush()?;
    Ok(())
}

pub fn read_model_csv(path: &Path) -> Result<ModelElement> {
    let side: MuSidecar = serde_json::from_reader(File::open(sidecar_path(path))?)
        .map_err(|e| Error::Parse(format!("mu sidecar: {e}")))?;
    let mu_grid = Arc::new(MuGrid::new(side.mu_max, side.m)?);
    let reader = BufReader::new(File::open(path)?);
    let mut plus = Vec::with_capacity(side.m);
    let mut minus = Vec::with_capacity(side.m);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != "mu,re_plus,im_plus,re_minus,im_minus" {
                return Err(Error::Parse(format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != 5 {
            return Err(Error::Parse(format!("expected 5 columns, got {}", toks.len())));
        }
        let j = plus.len();
        let mu = parse_f64(toks[0], "mu")?;
        let expect = mu_grid
            .nodes()
            .get(j)
            .copied()
            .ok_or_else(|| Error::Parse(format!("more rows than the declared {} nodes", side.m)))?;
        if (mu - expect).abs() > 1e-12 * expect.max(1.0) {
            return Err(Error::GridMismatch(format!(
                "row {j}: mu = {mu} but the declared grid has {expect}"
            )));
        }
        plus.push(Complex64::new(
            parse_f64(toks[1], "re_plus")?,
            parse_f64(toks[2], "im_plus")?,
        ));
        minus.push(Complex64::new(
            parse_f64(toks[3], "re_minus")?,
            parse_f64(toks[4], "im_minus")?,
        ));
    }
    ModelElement::new(mu_grid, plus, minus)
}

/// Matrix-entry sweep: `mu,re_fpm,im_fpm,re_fmp,im_fmp,norm` per node.
pub fn write_entry_sweep_csv(path: &Path, mu_grid: &MuGrid) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "mu,re_fpm,im_fpm,re_fmp,im_fmp,norm")?;
    for &mu in mu_grid.nodes() {
        let f = model_matrix(mu)?;
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt17(mu),
            fmt17(f.f_plus_minus().re),
            fmt17(f.f_plus_minus().im),
            fmt17(f.f_minus_plus().re),
            fmt17(f.f_minus_plus().im),
            fmt17(crate::model::matrix_norm(mu))
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Eigenvalue curves with the segment endpoints as comment metadata.
pub fn write_eigencurve_csv(path: &Path, mu_grid: &MuGrid) -> Result<()> {
    let seg = SpectrumSegment;
    let mut w = BufWriter::new(File::create(path)?);
    let ep = seg.endpoint_plus();
    let em = seg.endpoint_minus();
    writeln!(w, "# endpoint_plus = {} + {}i", fmt17(ep.re), fmt17(ep.im))?;
    writeln!(w, "# endpoint_minus = {} + {}i", fmt17(em.re), fmt17(em.im))?;
    writeln!(w, "mu,re_zeta_plus,im_zeta_plus,re_zeta_minus,im_zeta_minus")?;
    for &mu in mu_grid.nodes() {
        let (p, m) = eigenvalues(mu)?;
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt17(mu),
            fmt17(p.re),
            fmt17(p.im),
            fmt17(m.re),
            fmt17(m.im)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Resolvent field rows `re_z,im_z,lower,upper,numeric`.
pub fn write_resolvent_field_csv(path: &Path, rows: &[ResolventBounds]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "re_z,im_z,lower,upper,numeric")?;
    for b in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt17(b.z.re),
            fmt17(b.z.im),
            fmt17(b.lower),
            fmt17(b.upper),
            fmt17(b.numeric.unwrap_or(f64::NAN))
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Witness table rows `delta,dist,resolvent,product`.
pub fn write_witness_csv(path: &Path, rows: &[WitnessRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "delta,dist,resolvent,product")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt17(r.delta),
            fmt17(r.dist),
            fmt17(r.resolvent),
            fmt17(r.product)
        )?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct DenseHeader {
    n: usize,
    eta_min: f64,
    eta_max: f64,
}

/// Dense-operator cache: one JSON header line, then row-major complex pairs
/// as little-endian 8-byte reals.
pub fn write_dense_binary(path: &Path, op: &DenseOperator) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header = DenseHeader {
        n: op.n(),
        eta_min: op.grid().eta_min(),
        eta_max: op.grid().eta_max(),
    };
    let mut line = serde_json::to_string(&header).map_err(|e| Error::Parse(e.to_string()))?;
    line.push('\n');
    w.write_all(line.as_bytes())?;
    for e in op.entries() {
        w.write_all(&e.re.to_le_bytes())?;
        w.write_all(&e.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dense_binary(path: &Path) -> Result<DenseOperator> {
    let mut r = BufReader::new(File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: DenseHeader =
        serde_json::from_str(line.trim()).map_err(|e| Error::Parse(format!("dense header: {e}")))?;
    let grid = Arc::new(LogGrid::new(header.eta_min, header.eta_max, header.n)?);
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    let expect = header.n * header.n * 16;
    if payload.len() != expect {
        return Err(Error::Parse(format!(
            "dense payload is {} bytes, expected {expect}",
            payload.len()
        )));
    }
    let entries: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|chunk| {
            let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    DenseOperator::from_parts(grid, entries)
}

//! Point-cloud CSV: one point per row, one column per coordinate, optional
//! `#` comment lines. The dimension is taken from the first row.

use std::io::{Read, Write};
use std::path::Path;

use medial_core::{Point, SiteSet};

use crate::error::{io_err, HarnessError, Result};

/// Reads a site set from a CSV file.
pub fn parse_points(path: impl AsRef<Path>) -> Result<SiteSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    read_points(file, &path.display().to_string())
}

/// Parses CSV text; `origin` labels errors.
pub fn parse_points_str(text: &str, origin: &str) -> Result<SiteSet> {
    read_points(text.as_bytes(), origin)
}

fn read_points<R: Read>(input: R, origin: &str) -> Result<SiteSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let fail = |line: u64, message: String| HarnessError::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut sites = Vec::new();
    let mut dim = None;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            fail(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let coords = record
            .iter()
            .map(|field| {
                let v: f64 = field
                    .parse()
                    .map_err(|_| fail(line, format!("not a number: {field:?}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(fail(line, format!("non-finite coordinate {field:?}")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        match dim {
            None => dim = Some(coords.len()),
            Some(k) if k != coords.len() => {
                return Err(fail(
                    line,
                    format!("expected {k} columns, found {}", coords.len()),
                ))
            }
            _ => {}
        }
        sites.push(Point::new(coords).map_err(|e| fail(line, e.to_string()))?);
    }
    if sites.is_empty() {
        return Err(fail(0, "no points".into()));
    }
    Ok(SiteSet::new(sites)?)
}

/// Writes sites with shortest round-trip float formatting, so re-parsing
/// yields bit-identical coordinates.
pub fn write_points<W: Write>(sites: &SiteSet, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for p in sites.sites() {
        w.write_record(p.coords().iter().map(|c| format!("{c:?}")))?;
    }
    w.flush().map_err(io_err("<csv output>"))?;
    Ok(())
}

pub fn write_points_file(sites: &SiteSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    write_points(sites, std::io::BufWriter::new(file))
}

//! Text formats for index maps, far-field data and indicator maps.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64` exactly. Lines starting with `#` are comments and are skipped by
//! the readers.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::farfield::FarFieldMatrix;
use crate::sampling::{IndicatorMap, LOG10_FLOOR};
use crate::scattering::{DirectionSet, Grid2D, RefractionIndexField};

/// Numbered, non-comment, non-blank lines.
struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R) -> Self {
        Self {
            inner: reader.lines(),
            number: 0,
        }
    }

    fn next_line(&mut self) -> Result<Option<(usize, String)>> {
        for line in self.inner.by_ref() {
            let line = line?;
            self.number += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Ok(Some((self.number, trimmed.to_string())));
        }
        Ok(None)
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, String)> {
        self.next_line()?
            .ok_or_else(|| Error::parse(self.number + 1, format!("unexpected end of file, expected {what}")))
    }

    fn expect_end(&mut self) -> Result<()> {
        match self.next_line()? {
            None => Ok(()),
            Some((n, _)) => Err(Error::parse(n, "unexpected trailing data")),
        }
    }
}

fn parse_field<T: std::str::FromStr>(line: usize, token: Option<&str>, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{token}`")))
}

fn parse_complex(line: usize, text: &str) -> Result<Complex64> {
    let mut it = text.split_whitespace();
    let re = parse_field(line, it.next(), "real part")?;
    let im = parse_field(line, it.next(), "imaginary part")?;
    if it.next().is_some() {
        return Err(Error::parse(line, "expected two numbers"));
    }
    Ok(Complex64::new(re, im))
}

fn header<'a>(line: usize, text: &'a str, tag: &str) -> Result<std::str::SplitWhitespace<'a>> {
    let mut it = text.split_whitespace();
    if it.next() != Some(tag) {
        return Err(Error::parse(line, format!("expected `{tag}` header")));
    }
    Ok(it)
}

pub fn write_index(w: &mut impl Write, index: &RefractionIndexField) -> Result<()> {
    let g = index.grid();
    writeln!(
        w,
        "INDEX2D {} {} {:.16e} {:.16e} {:.16e} {:.16e}",
        g.nx, g.ny, g.origin.0, g.origin.1, g.spacing.0, g.spacing.1
    )?;
    for v in index.values() {
        writeln!(w, "{:.16e} {:.16e}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_index(r: impl BufRead) -> Result<RefractionIndexField> {
    let mut lines = Lines::new(r);
    let (n, text) = lines.expect_line("INDEX2D header")?;
    let mut it = header(n, &text, "INDEX2D")?;
    let nx: usize = parse_field(n, it.next(), "nx")?;
    let ny: usize = parse_field(n, it.next(), "ny")?;
    let x0: f64 = parse_field(n, it.next(), "x0")?;
    let y0: f64 = parse_field(n, it.next(), "y0")?;
    let dx: f64 = parse_field(n, it.next(), "dx")?;
    let dy: f64 = parse_field(n, it.next(), "dy")?;
    let grid = Grid2D::new(nx, ny, (x0, y0), (dx, dy)).map_err(|e| Error::parse(n, e.to_string()))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let (n, text) = lines.expect_line("index value")?;
        values.push(parse_complex(n, &text)?);
    }
    lines.expect_end()?;
    RefractionIndexField::new(grid, values)
}

/// Writes far-field data; `comments` become `#` lines after the header.
pub fn write_farfield(w: &mut impl Write, data: &FarFieldMatrix, comments: &[String]) -> Result<()> {
    let (a0, a1) = data.directions.aperture();
    writeln!(w, "FARFIELD {} {:.16e} {:.16e} {:.16e}", data.len(), data.k, a0, a1)?;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    for a in data.directions.angles() {
        writeln!(w, "{a:.16e}")?;
    }
    for i in 0..data.len() {
        for j in 0..data.len() {
            let v = data.entries[(i, j)];
            writeln!(w, "{:.16e} {:.16e}", v.re, v.im)?;
        }
    }
    Ok(())
}

pub fn read_farfield(r: impl BufRead) -> Result<FarFieldMatrix> {
    let mut lines = Lines::new(r);
    let (n, text) = lines.expect_line("FARFIELD header")?;
    let mut it = header(n, &text, "FARFIELD")?;
    let count: usize = parse_field(n, it.next(), "direction count")?;
    let k: f64 = parse_field(n, it.next(), "wavenumber")?;
    let a0: f64 = parse_field(n, it.next(), "aperture start")?;
    let a1: f64 = parse_field(n, it.next(), "aperture end")?;
    if !(k > 0.0) {
        return Err(Error::parse(n, format!("wavenumber must be positive, got {k}")));
    }
    let directions = DirectionSet::with_aperture(count, a0, a1).map_err(|e| Error::parse(n, e.to_string()))?;
    for &expected in directions.angles() {
        let (n, text) = lines.expect_line("angle")?;
        let angle: f64 = parse_field(n, Some(text.as_str()), "angle")?;
        if (angle - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
            return Err(Error::parse(
                n,
                format!("angle {angle} does not match the aperture (expected {expected})"),
            ));
        }
    }
    let mut entries = faer::Mat::<Complex64>::zeros(count, count);
    for i in 0..count {
        for j in 0..count {
            let (n, text) = lines.expect_line("far-field entry")?;
            entries[(i, j)] = parse_complex(n, &text)?;
        }
    }
    lines.expect_end()?;
    Ok(FarFieldMatrix { directions, k, entries })
}

pub const MAP_HEADER: &str = "x,y,log10_value,value,iterations,converged";

/// One row of a map CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapRow {
    pub x: f64,
    pub y: f64,
    pub log10_value: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn map_rows(map: &IndicatorMap) -> Vec<MapRow> {
    (0..map.len())
        .map(|i| {
            let [x, y] = map.grid.point(i);
            MapRow {
                x,
                y,
                log10_value: map.log10_values[i],
                value: map.values[i],
                iterations: map.iterations[i],
                converged: map.converged[i],
            }
        })
        .collect()
}

pub fn write_map_csv(w: &mut impl Write, map: &IndicatorMap) -> Result<()> {
    writeln!(w, "{MAP_HEADER}")?;
    for r in map_rows(map) {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            r.x, r.y, r.log10_value, r.value, r.iterations, r.converged
        )?;
    }
    Ok(())
}

pub fn read_map_csv(r: impl BufRead) -> Result<Vec<MapRow>> {
    let mut lines = Lines::new(r);
    let (n, text) = lines.expect_line("map header")?;
    if text != MAP_HEADER {
        return Err(Error::parse(n, format!("expected header `{MAP_HEADER}`")));
    }
    let mut rows = Vec::new();
    while let Some((n, text)) = lines.next_line()? {
        let mut it = text.split(',');
        let row = MapRow {
            x: parse_field(n, it.next(), "x")?,
            y: parse_field(n, it.next(), "y")?,
            log10_value: parse_field(n, it.next(), "log10_value")?,
            value: parse_field(n, it.next(), "value")?,
            iterations: parse_field(n, it.next(), "iterations")?,
            converged: parse_field(n, it.next(), "converged")?,
        };
        if it.next().is_some() {
            return Err(Error::parse(n, "too many columns"));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyMap);
    }
    Ok(rows)
}

/// Range of the graymap: finite log values are mapped linearly from
/// `floor` (black) to `max` (white).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrayScale {
    pub floor: f64,
    pub max: f64,
}

impl GrayScale {
    pub fn of(map: &IndicatorMap) -> Self {
        let finite = map.log10_values.iter().copied().filter(|v| v.is_finite());
        let (floor, max) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if floor.is_finite() {
            Self { floor, max }
        } else {
            Self {
                floor: LOG10_FLOOR,
                max: LOG10_FLOOR,
            }
        }
    }

    pub fn level(&self, v: f64) -> u8 {
        if v.is_nan() || self.max <= self.floor {
            return 0;
        }
        let t = ((v - self.floor) / (self.max - self.floor)).clamp(0.0, 1.0);
        (255.0 * t).round() as u8
    }
}

/// Plain (P2) graymap with the largest `y` on the first row.
pub fn write_pgm(w: &mut impl Write, map: &IndicatorMap, scale: &GrayScale) -> Result<()> {
    let (mx, my) = map.grid.resolution;
    writeln!(w, "P2")?;
    writeln!(w, "{mx} {my}")?;
    writeln!(w, "255")?;
    for row in (0..my).rev() {
        let mut line = String::new();
        for col in 0..mx {
            if col > 0 {
                line.push(' ');
            }
            let _ = write!(line, "{}", scale.level(map.log10_values[row * mx + col]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Sidecar metadata: `key = value` lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MapMeta {
    pub entries: Vec<(String, String)>,
}

impl MapMeta {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "{k} = {v}")?;
        }
        Ok(())
    }

    pub fn read(r: impl BufRead) -> Result<Self> {
        let mut lines = Lines::new(r);
        let mut meta = Self::default();
        while let Some((n, text)) = lines.next_line()? {
            let (k, v) = text
                .split_once('=')
                .ok_or_else(|| Error::parse(n, "expected `key = value`"))?;
            meta.push(k.trim(), v.trim());
        }
        Ok(meta)
    }
}

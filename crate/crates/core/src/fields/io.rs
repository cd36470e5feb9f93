//! Field serialization: a one-line text header followed by little-endian
//! `f64` components, and CSV for 1D fields.
//!
//! Header format:
//! `udfield v1 dims=<1|1+1|3> kind=<kind> components=<c> shape=<n,..> start=<x,..> spacing=<h,..>`

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::algebra::Spinor4;
use crate::grid::{Axis, Grid, GridField, LineField};

use super::FieldError;

const MAGIC: &str = "udfield v1";

/// A site value that flattens to a fixed number of `f64` components.
pub trait Sample: Sized {
    const KIND: &'static str;
    const COMPONENTS: usize;
    /// Column names for CSV output.
    const COLUMNS: &'static [&'static str];
    fn push_components(&self, out: &mut Vec<f64>);
    fn from_components(c: &[f64]) -> Self;
}

impl Sample for f64 {
    const KIND: &'static str = "f64";
    const COMPONENTS: usize = 1;
    const COLUMNS: &'static [&'static str] = &["value"];
    fn push_components(&self, out: &mut Vec<f64>) {
        out.push(*self);
    }
    fn from_components(c: &[f64]) -> Self {
        c[0]
    }
}

impl Sample for Complex64 {
    const KIND: &'static str = "c64";
    const COMPONENTS: usize = 2;
    const COLUMNS: &'static [&'static str] = &["re", "im"];
    fn push_components(&self, out: &mut Vec<f64>) {
        out.extend([self.re, self.im]);
    }
    fn from_components(c: &[f64]) -> Self {
        Complex64::new(c[0], c[1])
    }
}

impl Sample for [f64; 3] {
    const KIND: &'static str = "vec3";
    const COMPONENTS: usize = 3;
    const COLUMNS: &'static [&'static str] = &["x", "y", "z"];
    fn push_components(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self);
    }
    fn from_components(c: &[f64]) -> Self {
        [c[0], c[1], c[2]]
    }
}

impl Sample for [f64; 4] {
    const KIND: &'static str = "vec4";
    const COMPONENTS: usize = 4;
    const COLUMNS: &'static [&'static str] = &["v0", "v1", "v2", "v3"];
    fn push_components(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(self);
    }
    fn from_components(c: &[f64]) -> Self {
        [c[0], c[1], c[2], c[3]]
    }
}

impl Sample for Spinor4 {
    const KIND: &'static str = "spinor4";
    const COMPONENTS: usize = 8;
    const COLUMNS: &'static [&'static str] =
        &["re0", "im0", "re1", "im1", "re2", "im2", "re3", "im3"];
    fn push_components(&self, out: &mut Vec<f64>) {
        for z in self.iter() {
            out.extend([z.re, z.im]);
        }
    }
    fn from_components(c: &[f64]) -> Self {
        Spinor4::from_fn(|i, _| Complex64::new(c[2 * i], c[2 * i + 1]))
    }
}

fn join(v: impl Iterator<Item = String>) -> String {
    v.collect::<Vec<_>>().join(",")
}

/// Text header describing `field`, without the trailing newline.
pub fn header<G: Grid, T: Sample>(field: &GridField<G, T>) -> String {
    let axes = field.grid().axes();
    format!(
        "{MAGIC} dims={} kind={} components={} shape={} start={} spacing={}",
        G::DIMS,
        T::KIND,
        T::COMPONENTS,
        join(axes.iter().map(|a| a.len.to_string())),
        join(axes.iter().map(|a| format!("{:e}", a.start))),
        join(axes.iter().map(|a| format!("{:e}", a.step))),
    )
}

pub fn write_binary<G: Grid, T: Sample, W: Write>(field: &GridField<G, T>, mut w: W) -> Result<(), FieldError> {
    writeln!(w, "{}", header(field))?;
    let mut buf = Vec::with_capacity(T::COMPONENTS);
    for v in field.values() {
        buf.clear();
        v.push_components(&mut buf);
        for c in &buf {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, FieldError> {
    s.split(',')
        .map(|p| p.parse::<T>().map_err(|_| FieldError::Format(format!("bad {what} entry '{p}'"))))
        .collect()
}

pub fn read_binary<G: Grid, T: Sample, R: BufRead>(mut r: R) -> Result<GridField<G, T>, FieldError> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let rest = line
        .trim_end()
        .strip_prefix(MAGIC)
        .ok_or_else(|| FieldError::Format("missing field header".into()))?;
    let mut keys = std::collections::HashMap::new();
    for kv in rest.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| FieldError::Format(format!("bad header token '{kv}'")))?;
        keys.insert(k, v);
    }
    let get = |k: &str| {
        keys.get(k)
            .copied()
            .ok_or_else(|| FieldError::Format(format!("header lacks '{k}'")))
    };
    if get("dims")? != G::DIMS || get("kind")? != T::KIND {
        return Err(FieldError::Format(format!(
            "header describes dims={} kind={}, expected dims={} kind={}",
            get("dims")?,
            get("kind")?,
            G::DIMS,
            T::KIND
        )));
    }
    let shape: Vec<usize> = parse_list(get("shape")?, "shape")?;
    let start: Vec<f64> = parse_list(get("start")?, "start")?;
    let step: Vec<f64> = parse_list(get("spacing")?, "spacing")?;
    if shape.len() != start.len() || shape.len() != step.len() {
        return Err(FieldError::Format("shape, start and spacing lengths differ".into()));
    }
    let axes = shape
        .iter()
        .zip(&start)
        .zip(&step)
        .map(|((&n, &a), &h)| Axis::new(n, a, h))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = G::from_axes(&axes)?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let want = grid.len() * T::COMPONENTS * 8;
    if bytes.len() != want {
        return Err(FieldError::Format(format!(
            "payload has {} bytes, header implies {want}",
            bytes.len()
        )));
    }
    let flat: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect();
    let values = flat.chunks_exact(T::COMPONENTS).map(T::from_components).collect();
    Ok(GridField::new(grid, values)?)
}

/// CSV with an `x` column and one column per component, 9 significant digits.
pub fn write_csv<T: Sample, W: Write>(field: &LineField<T>, mut w: W) -> Result<(), FieldError> {
    writeln!(w, "x,{}", T::COLUMNS.join(","))?;
    let mut buf = Vec::with_capacity(T::COMPONENTS);
    for (i, v) in field.values().iter().enumerate() {
        buf.clear();
        v.push_components(&mut buf);
        let cols = join(buf.iter().map(|c| format!("{c:.8e}")));
        writeln!(w, "{:.8e},{cols}", field.grid().point(i))?;
    }
    Ok(())
}

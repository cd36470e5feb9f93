//! Uniformly sampled fields on 1D, 1+1 and 3D grids.

use std::fmt::Debug;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("InvalidAxis: {0}")]
    InvalidAxis(String),
    #[error("LengthMismatch: grid has {expected} sites, got {got} values")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
}

/// One uniformly spaced coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub len: usize,
    pub start: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(len: usize, start: f64, step: f64) -> Result<Self, GridError> {
        if len == 0 {
            return Err(GridError::InvalidAxis("axis needs at least one sample".into()));
        }
        if !(step.is_finite() && step > 0.0) || !start.is_finite() {
            return Err(GridError::InvalidAxis(format!(
                "step must be positive and finite (start={start}, step={step})"
            )));
        }
        Ok(Self { len, start, step })
    }

    /// Axis centred on zero: samples at `(i - (len-1)/2) * step`.
    pub fn centered(len: usize, step: f64) -> Result<Self, GridError> {
        let start = -0.5 * (len.max(1) - 1) as f64 * step;
        Self::new(len, start, step)
    }

    /// Cell-centred axis covering `[lo, hi]` with `len` cells.
    pub fn cells(len: usize, lo: f64, hi: f64) -> Result<Self, GridError> {
        if len == 0 || !(hi > lo) {
            return Err(GridError::InvalidAxis(format!("bad cell range [{lo}, {hi}]")));
        }
        let step = (hi - lo) / len as f64;
        Self::new(len, lo + 0.5 * step, step)
    }

    /// Coordinate of sample `i`. Axes starting on a multiple of the step are
    /// evaluated as `(i + k) * step`, which keeps `coord` exactly odd about zero.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        let k = (self.start / self.step).round();
        if k * self.step == self.start {
            (i as f64 + k) * self.step
        } else {
            self.start + i as f64 * self.step
        }
    }

    pub fn end(&self) -> f64 {
        self.coord(self.len - 1)
    }

    /// Odd sample count with the middle sample at exactly zero (up to rounding).
    pub fn is_symmetric(&self) -> bool {
        if self.len.is_multiple_of(2) {
            return false;
        }
        let mid = self.coord((self.len - 1) / 2);
        mid == 0.0
    }
}

pub trait Grid: Clone + PartialEq + Debug + Send + Sync {
    type Point: Copy;
    const DIMS: &'static str;

    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn point(&self, index: usize) -> Self::Point;
    fn axes(&self) -> Vec<Axis>;
    /// Rebuilds the grid from its axes, as returned by [`Grid::axes`].
    fn from_axes(axes: &[Axis]) -> Result<Self, GridError>;
    fn cell_volume(&self) -> f64 {
        self.axes().iter().map(|a| a.step).product()
    }
}

fn axis_count(want: usize, got: usize) -> GridError {
    GridError::ShapeMismatch(format!("expected {want} axes, got {got}"))
}

/// A single periodic or open line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1 {
    pub x: Axis,
}

/// Time-major 1+1 spacetime grid; site `(it, ix)` lives at `it * nx + ix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1p1 {
    pub t: Axis,
    pub x: Axis,
}

/// Row-major 3D grid; site `(i, j, k)` lives at `(i * ny + j) * nz + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    pub axes: [Axis; 3],
}

impl Grid for Grid1 {
    type Point = f64;
    const DIMS: &'static str = "1";

    fn len(&self) -> usize {
        self.x.len
    }
    fn point(&self, index: usize) -> f64 {
        self.x.coord(index)
    }
    fn axes(&self) -> Vec<Axis> {
        vec![self.x]
    }
    fn from_axes(axes: &[Axis]) -> Result<Self, GridError> {
        match axes {
            [x] => Ok(Self { x: *x }),
            _ => Err(axis_count(1, axes.len())),
        }
    }
}

impl Grid1p1 {
    #[inline]
    pub fn index(&self, it: usize, ix: usize) -> usize {
        it * self.x.len + ix
    }
}

impl Grid for Grid1p1 {
    type Point = (f64, f64);
    const DIMS: &'static str = "1+1";

    fn len(&self) -> usize {
        self.t.len * self.x.len
    }
    fn point(&self, index: usize) -> (f64, f64) {
        let nx = self.x.len;
        (self.t.coord(index / nx), self.x.coord(index % nx))
    }
    fn axes(&self) -> Vec<Axis> {
        vec![self.t, self.x]
    }
    fn from_axes(axes: &[Axis]) -> Result<Self, GridError> {
        match axes {
            [t, x] => Ok(Self { t: *t, x: *x }),
            _ => Err(axis_count(2, axes.len())),
        }
    }
}

impl Grid3 {
    /// Cubic grid of `n` cells per axis covering `[-half_width, half_width]^3`.
    pub fn cube(n: usize, half_width: f64) -> Result<Self, GridError> {
        let a = Axis::cells(n, -half_width, half_width)?;
        Ok(Self { axes: [a; 3] })
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.axes[0].len, self.axes[1].len, self.axes[2].len]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.axes[1].len + j) * self.axes[2].len + k
    }

    #[inline]
    pub fn unravel(&self, index: usize) -> [usize; 3] {
        let nz = self.axes[2].len;
        let ny = self.axes[1].len;
        [index / (ny * nz), (index / nz) % ny, index % nz]
    }

    /// True when all three axes share one spacing.
    pub fn is_isotropic(&self) -> bool {
        let h = self.axes[0].step;
        self.axes
            .iter()
            .all(|a| (a.step - h).abs() <= 1e-12 * h)
    }
}

impl Grid for Grid3 {
    type Point = [f64; 3];
    const DIMS: &'static str = "3";

    fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len).product()
    }
    fn point(&self, index: usize) -> [f64; 3] {
        let [i, j, k] = self.unravel(index);
        [
            self.axes[0].coord(i),
            self.axes[1].coord(j),
            self.axes[2].coord(k),
        ]
    }
    fn axes(&self) -> Vec<Axis> {
        self.axes.to_vec()
    }
    fn from_axes(axes: &[Axis]) -> Result<Self, GridError> {
        match axes {
            [a, b, c] => Ok(Self { axes: [*a, *b, *c] }),
            _ => Err(axis_count(3, axes.len())),
        }
    }
}

/// Samples of type `T` on grid `G`, stored in the grid's site order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<G, T> {
    grid: G,
    values: Vec<T>,
}

pub type LineField<T> = GridField<Grid1, T>;
pub type SpacetimeField<T> = GridField<Grid1p1, T>;
pub type SpaceField<T> = GridField<Grid3, T>;

impl<G: Grid, T> GridField<G, T> {
    pub fn new(grid: G, values: Vec<T>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: G, mut f: impl FnMut(G::Point) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> GridField<G, U> {
        GridField {
            grid: self.grid.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map<U, V>(
        &self,
        other: &GridField<G, U>,
        mut f: impl FnMut(&T, &U) -> V,
    ) -> Result<GridField<G, V>, GridError> {
        if self.grid != other.grid {
            return Err(GridError::ShapeMismatch(format!(
                "grids differ: {:?} vs {:?}",
                self.grid.axes(),
                other.grid.axes()
            )));
        }
        Ok(GridField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }
}

impl<G: Grid, T: Clone> GridField<G, T> {
    pub fn filled(grid: G, value: T) -> Self {
        let values = vec![value; grid.len()];
        Self { grid, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_axis_is_symmetric() {
        let a = Axis::centered(9, 0.25).unwrap();
        assert!(a.is_symmetric());
        assert_eq!(a.coord(4), 0.0);
        assert!(!Axis::centered(8, 0.25).unwrap().is_symmetric());
        assert!(!Axis::new(9, 0.0, 0.25).unwrap().is_symmetric());
    }

    #[test]
    fn grid3_index_roundtrip() {
        let g = Grid3 {
            axes: [
                Axis::new(3, 0.0, 1.0).unwrap(),
                Axis::new(4, 0.0, 1.0).unwrap(),
                Axis::new(5, 0.0, 1.0).unwrap(),
            ],
        };
        for idx in 0..g.len() {
            let [i, j, k] = g.unravel(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
        assert_eq!(g.point(g.index(2, 3, 4)), [2.0, 3.0, 4.0]);
    }

    #[test]
    fn length_mismatch_rejected() {
        let g = Grid1 {
            x: Axis::new(4, 0.0, 1.0).unwrap(),
        };
        assert!(matches!(
            GridField::new(g, vec![0.0; 3]),
            Err(GridError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn bad_axes_rejected() {
        assert!(Axis::new(0, 0.0, 1.0).is_err());
        assert!(Axis::new(3, 0.0, 0.0).is_err());
        assert!(Axis::new(3, 0.0, f64::NAN).is_err());
        assert!(Axis::cells(4, 1.0, 1.0).is_err());
    }
}

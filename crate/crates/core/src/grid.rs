//! Uniform Cartesian grids in one or two dimensions and cell-average fields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    /// Ghost cells copy the nearest interior cell.
    Outflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub cells: usize,
    pub lo: f64,
    pub hi: f64,
    pub boundary: Boundary,
}

impl Axis {
    pub fn new(cells: usize, lo: f64, hi: f64, boundary: Boundary) -> Result<Self> {
        if cells < 4 {
            return Err(Error::config(format!("axis needs at least 4 cells, got {cells}")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::config(format!("invalid axis extent [{lo}, {hi}]")));
        }
        Ok(Axis {
            cells,
            lo,
            hi,
            boundary,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.spacing()
    }
}

/// Row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if !(1..=2).contains(&axes.len()) {
            return Err(Error::config("grids are one- or two-dimensional"));
        }
        Ok(Grid { axes })
    }

    pub fn uniform_1d(cells: usize, lo: f64, hi: f64, boundary: Boundary) -> Result<Self> {
        Grid::new(vec![Axis::new(cells, lo, hi, boundary)?])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn cells(&self, k: usize) -> usize {
        self.axes[k].cells
    }

    pub fn spacing(&self, k: usize) -> f64 {
        self.axes[k].spacing()
    }

    pub fn min_spacing(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).fold(f64::INFINITY, f64::min)
    }

    pub fn center(&self, k: usize, i: usize) -> f64 {
        self.axes[k].center(i)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.cells).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// Multi-index of a flat cell index.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        match self.axes.len() {
            1 => [idx, 0],
            _ => [idx / self.axes[1].cells, idx % self.axes[1].cells],
        }
    }

    pub fn cell_center(&self, idx: usize) -> Vec<f64> {
        let m = self.multi_index(idx);
        (0..self.dimension()).map(|k| self.center(k, m[k])).collect()
    }
}

/// Cell averages of `u` at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub time: f64,
}

impl SolutionField {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite cell value {bad}")));
        }
        if !(time >= 0.0) {
            return Err(Error::domain(format!("time {time} must be nonnegative")));
        }
        Ok(SolutionField { grid, values, time })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sum u * |cell|`
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_volume()
    }

    /// Discrete L1 distance; grids must agree.
    pub fn l1_distance(&self, other: &SolutionField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::config("fields live on different grids"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.grid.cell_volume())
    }

    /// One-dimensional total variation, including the wrap-around jump on a periodic axis.
    pub fn total_variation(&self) -> f64 {
        let v = &self.values;
        let mut tv: f64 = v.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        if self.grid.dimension() == 1 && self.grid.axis(0).boundary == Boundary::Periodic {
            tv += (v[0] - v[v.len() - 1]).abs();
        }
        tv
    }

    /// Value at the cell containing `x`, if inside the grid.
    pub fn sample(&self, x: &[f64]) -> Option<f64> {
        let mut m = [0usize; 2];
        for (k, a) in self.grid.axes().iter().enumerate() {
            if x[k] < a.lo || x[k] > a.hi {
                return None;
            }
            m[k] = (((x[k] - a.lo) / a.spacing()) as usize).min(a.cells - 1);
        }
        let idx = match self.grid.dimension() {
            1 => m[0],
            _ => m[0] * self.grid.cells(1) + m[1],
        };
        Some(self.values[idx])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_centers() {
        let g = Grid::new(vec![
            Axis::new(8, -1.0, 1.0, Boundary::Periodic).unwrap(),
            Axis::new(4, 0.0, 2.0, Boundary::Outflow).unwrap(),
        ])
        .unwrap();
        assert_eq!(g.spacing(0), 0.25);
        assert_eq!(g.len(), 32);
        assert_eq!(g.cell_volume(), 0.125);
        assert_eq!(g.cell_center(5), vec![-0.625, 0.75]);
        assert_eq!(g.multi_index(13), [3, 1]);
    }

    #[test]
    fn too_few_cells_rejected() {
        assert!(Axis::new(3, 0.0, 1.0, Boundary::Outflow).is_err());
        assert!(Axis::new(4, 1.0, 1.0, Boundary::Outflow).is_err());
        assert!(Grid::new(vec![]).is_err());
    }

    #[test]
    fn field_invariants() {
        let g = Grid::uniform_1d(4, 0.0, 1.0, Boundary::Periodic).unwrap();
        assert!(SolutionField::new(g.clone(), vec![0.0; 3], 0.0).is_err());
        assert!(SolutionField::new(g.clone(), vec![0.0, f64::NAN, 0.0, 0.0], 0.0).is_err());
        let f = SolutionField::new(g, vec![0.0, 1.0, 0.0, 2.0], 0.0).unwrap();
        assert_eq!(f.total_variation(), 6.0);
        assert_eq!(f.mass(), 0.75);
        assert_eq!(f.sample(&[0.3]), Some(1.0));
        assert_eq!(f.sample(&[1.3]), None);
    }
}

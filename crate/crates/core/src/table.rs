//! Response tables: values indexed by tuples of scales.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::{Extended, Scalar};

/// A named ascending grid of scales.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis<T> {
    pub name: String,
    pub grid: Vec<T>,
}

impl<T: Scalar> Axis<T> {
    pub fn new(name: impl Into<String>, grid: Vec<T>) -> Result<Self> {
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("scale grid must be strictly ascending".into()));
        }
        Ok(Self {
            name: name.into(),
            grid,
        })
    }

    /// Integer grid `lo..=hi`.
    pub fn integers(name: impl Into<String>, lo: u64, hi: u64) -> Self {
        Self {
            name: name.into(),
            grid: (lo..=hi).map(T::from_count).collect(),
        }
    }
}

/// How a cell renders in CSV output.
pub trait CellValue: Clone + Send + Sync {
    fn render(&self) -> String;
}

impl<T: Scalar> CellValue for Extended<T> {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl CellValue for f64 {
    fn render(&self) -> String {
        format!("{self}")
    }
}

impl CellValue for usize {
    fn render(&self) -> String {
        self.to_string()
    }
}

/// `None` renders as `top`: no witness within the searched bounds.
impl<T: Scalar> CellValue for Option<T> {
    fn render(&self) -> String {
        match self {
            Some(v) => v.to_string(),
            None => "top".into(),
        }
    }
}

/// A value for every tuple of a product of scale grids, row-major with the
/// last axis varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct ResponseTable<T, V = Extended<T>> {
    axes: Vec<Axis<T>>,
    cells: Vec<V>,
}

impl<T: Scalar, V: CellValue> ResponseTable<T, V> {
    pub fn new(axes: Vec<Axis<T>>, cells: Vec<V>) -> Result<Self> {
        let expected: usize = axes.iter().map(|a| a.grid.len()).product();
        if cells.len() != expected {
            return Err(Error::Parse(format!(
                "table expects {expected} cells, got {}",
                cells.len()
            )));
        }
        Ok(Self { axes, cells })
    }

    /// Builds a table by evaluating every grid tuple, in parallel.
    pub fn build(axes: Vec<Axis<T>>, cell: impl Fn(&[T]) -> V + Sync) -> Self {
        use rayon::prelude::*;
        let shape: Vec<usize> = axes.iter().map(|a| a.grid.len()).collect();
        let total: usize = shape.iter().product();
        let cells = (0..total)
            .into_par_iter()
            .map(|flat| {
                let point: Vec<T> = unflatten(flat, &shape)
                    .into_iter()
                    .zip(&axes)
                    .map(|(i, axis)| axis.grid[i])
                    .collect();
                cell(&point)
            })
            .collect();
        Self { axes, cells }
    }

    pub fn axes(&self) -> &[Axis<T>] {
        &self.axes
    }

    pub fn cells(&self) -> &[V] {
        &self.cells
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.grid.len()).collect()
    }

    /// Cell at grid indices.
    pub fn at(&self, index: &[usize]) -> &V {
        &self.cells[flatten(index, &self.shape())]
    }

    /// Cell at grid values (exact match on each axis).
    pub fn get(&self, values: &[T]) -> Option<&V> {
        let index: Option<Vec<usize>> = values
            .iter()
            .zip(&self.axes)
            .map(|(v, axis)| axis.grid.iter().position(|g| g == v))
            .collect();
        index.map(|i| self.at(&i))
    }

    /// Every grid tuple with its cell.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<T>, &V)> + '_ {
        let shape = self.shape();
        self.cells.iter().enumerate().map(move |(flat, v)| {
            let point = unflatten(flat, &shape)
                .into_iter()
                .zip(&self.axes)
                .map(|(i, axis)| axis.grid[i])
                .collect();
            (point, v)
        })
    }

    pub fn map<W: CellValue>(&self, f: impl Fn(&V) -> W) -> ResponseTable<T, W> {
        ResponseTable {
            axes: self.axes.clone(),
            cells: self.cells.iter().map(f).collect(),
        }
    }

    /// CSV with a header naming the axes and `value_name`.
    pub fn to_csv(&self, value_name: &str) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        let _ = writeln!(out, "{},{}", names.join(","), value_name);
        for (point, v) in self.rows() {
            let coords: Vec<String> = point.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{},{}", coords.join(","), v.render());
        }
        out
    }
}

fn unflatten(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut index = vec![0; shape.len()];
    for (slot, &len) in index.iter_mut().zip(shape).rev() {
        *slot = flat % len;
        flat /= len;
    }
    index
}

fn flatten(index: &[usize], shape: &[usize]) -> usize {
    index
        .iter()
        .zip(shape)
        .fold(0, |acc, (&i, &len)| acc * len + i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_and_lookup() {
        let axes = vec![Axis::<i64>::integers("r", 0, 2), Axis::integers("s", 1, 3)];
        let table: ResponseTable<i64> =
            ResponseTable::build(axes, |p| Extended::Finite(p[0] * 10 + p[1]));
        assert_eq!(table.get(&[2, 3]), Some(&Extended::Finite(23)));
        assert_eq!(table.at(&[1, 0]), &Extended::Finite(11));
        assert_eq!(table.get(&[5, 1]), None);
        let csv = table.to_csv("L");
        assert!(csv.starts_with("r,s,L\n0,1,1\n0,2,2\n"));
        assert_eq!(csv.lines().count(), 10);
    }

    #[test]
    fn rejects_descending_grid() {
        assert!(Axis::new("r", vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn top_renders() {
        assert_eq!(CellValue::render(&None::<f64>), "top");
    }
}

//! Finite metric windows.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::{Extended, Scalar};

/// A finite set of points with a symmetric extended pseudo-metric.
///
/// Points are identified by their index in load order; labels are opaque
/// strings carried along for output. Distances are stored densely.
#[derive(Clone)]
pub struct FiniteMetricSpace<T> {
    labels: Vec<String>,
    dist: Vec<Extended<T>>,
    basepoint: Option<usize>,
    neighbors: OnceLock<Vec<Vec<u32>>>,
}

/// Metric used for coordinate point clouds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointMetric {
    Euclidean,
    Linf,
    L1,
}

impl<T: Scalar> FiniteMetricSpace<T> {
    /// Builds a space from a full distance matrix, checking the metric axioms
    /// with the scalar type's default slack.
    pub fn from_matrix(
        labels: Vec<String>,
        matrix: Vec<Vec<Extended<T>>>,
        basepoint: Option<usize>,
    ) -> Result<Self> {
        Self::from_matrix_with_tolerance(labels, matrix, basepoint, T::triangle_slack())
    }

    pub fn from_matrix_with_tolerance(
        labels: Vec<String>,
        matrix: Vec<Vec<Extended<T>>>,
        basepoint: Option<usize>,
        tolerance: T,
    ) -> Result<Self> {
        let n = labels.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!(
                "distance matrix must be {n}x{n}"
            )));
        }
        let dist: Vec<Extended<T>> = matrix.into_iter().flatten().collect();
        let space = Self::assemble(labels, dist, basepoint)?;
        space.validate(tolerance)?;
        Ok(space)
    }

    /// Builds a space from a distance function that is already known to be a
    /// metric (shortest paths, max metrics, word metrics).
    pub(crate) fn from_fn_trusted(
        labels: Vec<String>,
        basepoint: Option<usize>,
        mut dist: impl FnMut(usize, usize) -> Extended<T>,
    ) -> Self {
        let n = labels.len();
        let mut flat = vec![Extended::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist(i, j);
                flat[i * n + j] = d;
                flat[j * n + i] = d;
            }
        }
        Self::assemble(labels, flat, basepoint).expect("trusted constructor")
    }

    fn assemble(
        labels: Vec<String>,
        dist: Vec<Extended<T>>,
        basepoint: Option<usize>,
    ) -> Result<Self> {
        if let Some(b) = basepoint {
            if b >= labels.len() {
                return Err(Error::PointOutOfRange {
                    index: b,
                    len: labels.len(),
                });
            }
        }
        Ok(Self {
            labels,
            dist,
            basepoint,
            neighbors: OnceLock::new(),
        })
    }

    /// Checks zero diagonal, symmetry, non-negativity and the triangle
    /// inequality (for finite values, up to `tolerance`).
    pub fn validate(&self, tolerance: T) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if self.dist(i, i) != Extended::zero() {
                return Err(Error::InvalidMetric(format!("d({i},{i}) is not zero")));
            }
            for j in (i + 1)..n {
                let d = self.dist(i, j);
                if d != self.dist(j, i) {
                    return Err(Error::InvalidMetric(format!("d({i},{j}) != d({j},{i})")));
                }
                if let Extended::Finite(v) = d {
                    if v < T::zero() {
                        return Err(Error::InvalidMetric(format!("d({i},{j}) is negative")));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let Extended::Finite(dij) = self.dist(i, j) else {
                    continue;
                };
                for k in 0..n {
                    if let (Extended::Finite(dik), Extended::Finite(dkj)) =
                        (self.dist(i, k), self.dist(k, j))
                    {
                        if dij > dik + dkj + tolerance {
                            return Err(Error::InvalidMetric(format!(
                                "triangle inequality fails for ({i},{k},{j})"
                            )));
                        }
                    } else if self.dist(i, k).is_finite() != self.dist(k, j).is_finite() {
                        // d(i,j) finite with exactly one leg infinite is impossible
                        // in an extended metric: the finite leg and d(i,j) would
                        // bound the other leg.
                        return Err(Error::InvalidMetric(format!(
                            "infinite distance inconsistent with ({i},{k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Shortest-path metric of a weighted undirected graph; `∞` across
    /// components.
    pub fn graph(
        labels: Vec<String>,
        edges: &[(usize, usize, T)],
        basepoint: Option<usize>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut adjacency: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            for idx in [a, b] {
                if idx >= n {
                    return Err(Error::PointOutOfRange { index: idx, len: n });
                }
            }
            if w < T::zero() {
                return Err(Error::InvalidMetric(format!("edge ({a},{b}) has negative weight")));
            }
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        let mut flat = vec![Extended::Infinite; n * n];
        for source in 0..n {
            let row = dijkstra(&adjacency, source);
            flat[source * n..(source + 1) * n].copy_from_slice(&row);
        }
        Self::assemble(labels, flat, basepoint)
    }

    /// Point cloud in `R^k` under the chosen metric.
    pub fn points(coords: &[Vec<f64>], metric: PointMetric, basepoint: Option<usize>) -> Result<Self> {
        if let Some(first) = coords.first() {
            if coords.iter().any(|c| c.len() != first.len()) {
                return Err(Error::InvalidMetric("coordinates of unequal dimension".into()));
            }
        }
        if coords.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMetric("non-finite coordinate".into()));
        }
        let labels = (0..coords.len()).map(|i| i.to_string()).collect();
        let mut bad = None;
        let space = Self::from_fn_trusted(labels, None, |i, j| {
            let pairs = coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b).abs());
            let d = match metric {
                PointMetric::Euclidean => pairs.map(|v| v * v).sum::<f64>().sqrt(),
                PointMetric::Linf => pairs.fold(0.0, f64::max),
                PointMetric::L1 => pairs.sum(),
            };
            match T::from_f64(d) {
                Some(v) => Extended::Finite(v),
                None => {
                    bad = Some((i, j));
                    Extended::Infinite
                }
            }
        });
        if let Some((i, j)) = bad {
            return Err(Error::InvalidMetric(format!("distance d({i},{j}) not representable")));
        }
        space.with_basepoint(basepoint)
    }

    /// The integer window `[lo..=hi]` with `|i - j|`; basepoint at `0` when it
    /// lies in the window, otherwise at `lo`.
    pub fn integer_window(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty integer window");
        let values: Vec<i64> = (lo..=hi).collect();
        Self::integer_set(&values)
    }

    /// A finite subset of `Z` with the induced metric, in the given order.
    pub fn integer_set(values: &[i64]) -> Self {
        let labels = values.iter().map(|v| v.to_string()).collect();
        let base = values.iter().position(|&v| v == 0).or(if values.is_empty() { None } else { Some(0) });
        Self::from_fn_trusted(labels, base, |i, j| {
            Extended::from_count(values[i].abs_diff(values[j]))
        })
    }

    pub fn with_basepoint(mut self, basepoint: Option<usize>) -> Result<Self> {
        if let Some(b) = basepoint {
            if b >= self.len() {
                return Err(Error::PointOutOfRange {
                    index: b,
                    len: self.len(),
                });
            }
        }
        self.basepoint = basepoint;
        Ok(self)
    }

    /// The subspace on `points` (in the given order), with the basepoint kept
    /// when it is among them.
    pub fn subspace(&self, points: &[usize]) -> Self {
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        let base = self
            .basepoint
            .and_then(|b| points.iter().position(|&p| p == b));
        Self::from_fn_trusted(labels, base, |i, j| self.dist(points[i], points[j]))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> Extended<T> {
        self.dist[i * self.labels.len() + j]
    }

    pub fn row(&self, i: usize) -> &[Extended<T>] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    /// Other points at finite distance from `x`, nearest first (ties by index).
    pub fn neighbors(&self, x: usize) -> &[u32] {
        &self.neighbor_lists()[x]
    }

    fn neighbor_lists(&self) -> &Vec<Vec<u32>> {
        self.neighbors.get_or_init(|| {
            let n = self.len();
            (0..n)
                .map(|x| {
                    let row = self.row(x);
                    let mut list: Vec<u32> = (0..n)
                        .filter(|&y| y != x && row[y].is_finite())
                        .map(|y| y as u32)
                        .collect();
                    list.sort_by(|&a, &b| {
                        row[a as usize]
                            .total_cmp(&row[b as usize])
                            .then(a.cmp(&b))
                    });
                    list
                })
                .collect()
        })
    }

    /// Other points within distance `r` of `x`, nearest first.
    pub fn within(&self, x: usize, r: T) -> &[u32] {
        let list = self.neighbors(x);
        let row = self.row(x);
        let end = list.partition_point(|&y| row[y as usize].le_scale(r));
        &list[..end]
    }

    /// Closed ball `B(y, s)`, sorted by index.
    pub fn ball(&self, y: usize, s: T) -> Vec<usize> {
        let mut ball: Vec<usize> = if s < T::zero() {
            Vec::new()
        } else {
            std::iter::once(y)
                .chain(self.within(y, s).iter().map(|&p| p as usize))
                .collect()
        };
        ball.sort_unstable();
        ball
    }

    /// Diameter of a point subset; `0` for the empty set and singletons.
    pub fn diameter_of(&self, points: &[usize]) -> Extended<T> {
        let mut best = Extended::zero();
        for (k, &a) in points.iter().enumerate() {
            let row = self.row(a);
            for &b in &points[k + 1..] {
                let d = row[b];
                if d > best {
                    best = d;
                    if best == Extended::Infinite {
                        return best;
                    }
                }
            }
        }
        best
    }

    pub fn diameter(&self) -> Extended<T> {
        self.dist.iter().fold(Extended::zero(), |acc, &d| acc.max(d))
    }

    /// Distance from `x` to a non-empty set; `∞` for the empty set.
    pub fn dist_to_set(&self, x: usize, set: &[usize]) -> Extended<T> {
        set.iter()
            .map(|&p| self.dist(x, p))
            .fold(Extended::Infinite, Extended::min)
    }

    /// Whether two spaces carry the same points and distances.
    pub fn same_as(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.labels == other.labels && self.dist == other.dist)
    }

    pub fn check_index(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                index: x,
                len: self.len(),
            })
        }
    }
}

impl<T> fmt::Debug for FiniteMetricSpace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("points", &self.labels.len())
            .field("basepoint", &self.basepoint)
            .finish()
    }
}

#[derive(PartialEq)]
struct HeapEntry<T> {
    dist: T,
    node: usize,
}

impl<T: Scalar> Eq for HeapEntry<T> {}

impl<T: Scalar> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for HeapEntry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap.
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then(other.node.cmp(&self.node))
    }
}

fn dijkstra<T: Scalar>(adjacency: &[Vec<(usize, T)>], source: usize) -> Vec<Extended<T>> {
    let mut best = vec![Extended::Infinite; adjacency.len()];
    best[source] = Extended::zero();
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry {
        dist: T::zero(),
        node: source,
    });
    while let Some(HeapEntry { dist, node }) = heap.pop() {
        if Extended::Finite(dist) > best[node] {
            continue;
        }
        for &(next, w) in &adjacency[node] {
            let candidate = dist + w;
            if Extended::Finite(candidate) < best[next] {
                best[next] = Extended::Finite(candidate);
                heap.push(HeapEntry {
                    dist: candidate,
                    node: next,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn fin(v: i64) -> Extended<Rational64> {
        Extended::Finite(Rational64::from_integer(v))
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let m = vec![vec![fin(0), fin(1)], vec![fin(2), fin(0)]];
        assert!(matches!(
            FiniteMetricSpace::from_matrix(labels, m, None),
            Err(Error::InvalidMetric(_))
        ));
    }

    #[test]
    fn rejects_triangle_violation() {
        let labels: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let m = vec![
            vec![fin(0), fin(1), fin(5)],
            vec![fin(1), fin(0), fin(1)],
            vec![fin(5), fin(1), fin(0)],
        ];
        assert!(FiniteMetricSpace::from_matrix(labels, m, None).is_err());
    }

    #[test]
    fn accepts_infinite_blocks() {
        let labels: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let inf = Extended::Infinite;
        let m = vec![
            vec![fin(0), fin(2), inf],
            vec![fin(2), fin(0), inf],
            vec![inf, inf, fin(0)],
        ];
        let space = FiniteMetricSpace::from_matrix(labels, m, Some(2)).unwrap();
        assert_eq!(space.diameter(), Extended::Infinite);
        assert_eq!(space.within(0, Rational64::from_integer(10)), &[1]);
    }

    #[test]
    fn graph_shortest_paths() {
        let labels: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let one = Rational64::from_integer(1);
        let edges = [(0, 1, one), (1, 2, one), (2, 3, one), (0, 3, Rational64::from_integer(5))];
        let space = FiniteMetricSpace::graph(labels, &edges, None).unwrap();
        assert_eq!(space.dist(0, 3), fin(3));
        assert_eq!(space.dist(0, 4), Extended::Infinite);
        space.validate(Rational64::from_integer(0)).unwrap();
    }

    #[test]
    fn balls_in_integer_window() {
        let space: FiniteMetricSpace<Rational64> = FiniteMetricSpace::integer_window(0, 10);
        assert_eq!(space.ball(0, Rational64::from_integer(2)), vec![0, 1, 2]);
        assert_eq!(space.ball(5, Rational64::from_integer(1)), vec![4, 5, 6]);
        assert_eq!(space.diameter_of(&[1, 4, 9]), fin(8));
        assert_eq!(space.basepoint(), Some(0));
    }

    #[test]
    fn euclidean_points() {
        let coords = vec![vec![0.0, 0.0], vec![3.0, 4.0]];
        let space: FiniteMetricSpace<f64> =
            FiniteMetricSpace::points(&coords, PointMetric::Euclidean, Some(0)).unwrap();
        assert_eq!(space.dist(0, 1), Extended::Finite(5.0));
        let linf: FiniteMetricSpace<f64> =
            FiniteMetricSpace::points(&coords, PointMetric::Linf, None).unwrap();
        assert_eq!(linf.dist(0, 1), Extended::Finite(4.0));
    }
}

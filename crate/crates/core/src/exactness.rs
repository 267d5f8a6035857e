//! Partitions of unity into l¹ simplices and their transfer along maps.

use crate::components::components_at;
use crate::cover::{Block, ScaledCover};
use crate::error::{Error, Result};
use crate::maps::LsMap;
use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;

pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// A map from points to finitely supported probability vectors over a vertex
/// set. Rows are sparse, sorted by vertex, and free of zero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionOfUnity {
    pub vertices: Vec<String>,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl PartitionOfUnity {
    pub fn new(vertices: Vec<String>, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(rows.len());
        for (x, row) in rows.into_iter().enumerate() {
            let mut row: Vec<(usize, f64)> = row.into_iter().filter(|&(_, w)| w != 0.0).collect();
            row.sort_by_key(|&(v, _)| v);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidPartition(format!("row {x} repeats a vertex")));
            }
            for &(v, w) in &row {
                if v >= vertices.len() {
                    return Err(Error::InvalidPartition(format!("row {x} names unknown vertex {v}")));
                }
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::InvalidPartition(format!("row {x} has weight {w}")));
                }
            }
            let sum: f64 = row.iter().map(|&(_, w)| w).sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidPartition(format!("row {x} sums to {sum}")));
            }
            clean.push(row);
        }
        Ok(Self { vertices, rows: clean })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `{ x : φ(x)_v ≠ 0 }` for every vertex `v`.
    pub fn star_preimages(&self) -> Vec<Block> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (x, row) in self.rows.iter().enumerate() {
            for &(v, _) in row {
                out[v].push(x);
            }
        }
        out
    }

    fn check_domain<T: Scalar>(&self, space: &FiniteMetricSpace<T>) -> Result<()> {
        if self.rows.len() != space.len() {
            return Err(Error::InvalidPartition(format!(
                "{} rows for a space of {} points",
                self.rows.len(),
                space.len()
            )));
        }
        Ok(())
    }
}

/// `|a - b|₁` for sparse sorted rows.
pub fn l1_distance(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut total) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(va, wa)), Some(&(vb, wb))) => match va.cmp(&vb) {
                std::cmp::Ordering::Equal => {
                    total += (wa - wb).abs();
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => {
                    total += wa;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    total += wb;
                    j += 1;
                }
            },
            (Some(&(_, wa)), None) => {
                total += wa;
                i += 1;
            }
            (None, Some(&(_, wb))) => {
                total += wb;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    total
}

/// Largest `|φ(x) - φ(x')|₁` over pairs with `d(x, x') <= r`.
pub fn pou_mesh<T: Scalar>(phi: &PartitionOfUnity, space: &FiniteMetricSpace<T>, r: T) -> Result<f64> {
    phi.check_domain(space)?;
    let mut best = 0.0f64;
    for x in 0..space.len() {
        for &x2 in space.within(x, r) {
            best = best.max(l1_distance(&phi.rows[x], &phi.rows[x2 as usize]));
        }
    }
    Ok(best)
}

/// Largest diameter of a vertex star preimage.
pub fn star_preimage_mesh<T: Scalar>(
    phi: &PartitionOfUnity,
    space: &FiniteMetricSpace<T>,
) -> Result<Extended<T>> {
    phi.check_domain(space)?;
    Ok(phi
        .star_preimages()
        .iter()
        .map(|s| space.diameter_of(s))
        .fold(Extended::zero(), Extended::max))
}

/// Weights `max(0, 1 - d(x, U)/sharpness)` over the blocks `U`, normalized.
pub fn make_pou_from_cover<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    cover: &ScaledCover<T>,
    sharpness: f64,
) -> Result<PartitionOfUnity> {
    if !(sharpness > 0.0) {
        return Err(Error::InvalidPartition("sharpness must be positive".into()));
    }
    let vertices = (0..cover.len()).map(|k| format!("U{k}")).collect();
    let mut rows = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        let raw: Vec<(usize, f64)> = cover
            .blocks()
            .iter()
            .enumerate()
            .map(|(k, block)| {
                let d = space.dist_to_set(x, block).to_f64();
                (k, (1.0 - d / sharpness).max(0.0))
            })
            .filter(|&(_, w)| w > 0.0)
            .collect();
        let total: f64 = raw.iter().map(|&(_, w)| w).sum();
        if total <= 0.0 {
            return Err(Error::DegeneratePartition { point: x });
        }
        rows.push(raw.into_iter().map(|(k, w)| (k, w / total)).collect());
    }
    PartitionOfUnity::new(vertices, rows)
}

/// Radial tents of width `2L`: vertex `k` peaks at distance `kL` from the
/// basepoint, and `φ(x)_k = max(0, 1 - |d(x₀, x) - kL| / L)`.
pub fn tent_partition<T: Scalar>(space: &FiniteMetricSpace<T>, width: f64) -> Result<PartitionOfUnity> {
    if !(width > 0.0) {
        return Err(Error::InvalidPartition("tent width must be positive".into()));
    }
    let base = space.basepoint().ok_or(Error::MissingBasepoint("space"))?;
    let radii: Vec<f64> = (0..space.len()).map(|x| space.dist(base, x).to_f64()).collect();
    if radii.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidPartition("tents need finite distances to the basepoint".into()));
    }
    let top = radii.iter().fold(0.0f64, |a, &b| a.max(b));
    let count = (top / width).ceil() as usize + 1;
    let vertices = (0..count).map(|k| format!("t{k}")).collect();
    let rows = radii
        .iter()
        .map(|&t| {
            let k = (t / width).floor() as usize;
            let frac = t / width - k as f64;
            let mut row = vec![(k, 1.0 - frac)];
            if frac > 0.0 {
                row.push((k + 1, frac));
            }
            row
        })
        .collect();
    PartitionOfUnity::new(vertices, rows)
}

/// Pulls `φ` on `Y` back along `f`, splitting each vertex star preimage
/// `f⁻¹(star(v))` into its `r`-components. Vertices of the result are
/// `(v, component ordinal)`.
pub fn transfer_pou<T: Scalar>(f: &LsMap<T>, phi: &PartitionOfUnity, r: T) -> Result<PartitionOfUnity> {
    phi.check_domain(f.codomain())?;
    let x_space = f.domain();
    let mut vertices = Vec::new();
    // owner[v][x]: new vertex index of the component of x in the star preimage of v.
    let mut owner: Vec<std::collections::HashMap<usize, usize>> = Vec::new();
    for (v, star) in phi.star_preimages().iter().enumerate() {
        let pulled = f.preimage(star);
        let part = components_at(x_space, &pulled, r);
        let mut map = std::collections::HashMap::new();
        for (j, class) in part.classes.iter().enumerate() {
            let id = vertices.len();
            vertices.push(format!("({},{})", phi.vertices[v], j));
            for &x in class {
                map.insert(x, id);
            }
        }
        owner.push(map);
    }
    let rows = (0..x_space.len())
        .map(|x| {
            phi.rows[f.apply(x)]
                .iter()
                .map(|&(v, w)| (owner[v][&x], w))
                .collect()
        })
        .collect();
    PartitionOfUnity::new(vertices, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::ball_cover;
    use num_rational::Rational64;
    use std::sync::Arc;

    type Q = Rational64;

    fn q(v: i64) -> Q {
        Q::from_integer(v)
    }

    #[test]
    fn constant_partition() {
        let x = FiniteMetricSpace::<Q>::integer_window(0, 9);
        let whole = ScaledCover::new(&x, vec![(0..10).collect()], None);
        let phi = make_pou_from_cover(&x, &whole, 3.0).unwrap();
        assert!(phi.rows.iter().all(|r| r == &vec![(0, 1.0)]));
        assert_eq!(pou_mesh(&phi, &x, q(5)).unwrap(), 0.0);
        assert_eq!(star_preimage_mesh(&phi, &x).unwrap(), Extended::Finite(q(9)));
    }

    #[test]
    fn tents_have_analytic_mesh() {
        let x = FiniteMetricSpace::<Q>::integer_window(0, 40);
        for width in [2.0, 4.0, 5.0] {
            let phi = tent_partition(&x, width).unwrap();
            let m = pou_mesh(&phi, &x, q(1)).unwrap();
            assert!((m - 2.0 / width).abs() < 1e-12, "width {width}: {m}");
            let star = star_preimage_mesh(&phi, &x).unwrap().to_f64();
            assert!(star <= 2.0 * width);
        }
    }

    #[test]
    fn indicator_partition() {
        let x = FiniteMetricSpace::<Q>::integer_set(&[0, 1, 2, 20, 21]);
        let cover = ScaledCover::new(&x, vec![vec![0, 1, 2], vec![3, 4]], None);
        let phi = make_pou_from_cover(&x, &cover, 1.0).unwrap();
        assert!(phi.rows.iter().all(|r| r.len() == 1));
        assert_eq!(pou_mesh(&phi, &x, q(18)).unwrap(), 2.0);
        assert_eq!(pou_mesh(&phi, &x, q(1)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(PartitionOfUnity::new(vec!["a".into()], vec![vec![(0, 0.5)]]).is_err());
        assert!(PartitionOfUnity::new(vec!["a".into()], vec![vec![(1, 1.0)]]).is_err());
        let x = FiniteMetricSpace::<Q>::integer_set(&[0, 10]);
        let cover = ScaledCover::new(&x, vec![vec![0]], None);
        assert!(matches!(
            make_pou_from_cover(&x, &cover, 2.0),
            Err(Error::DegeneratePartition { point: 1 })
        ));
    }

    #[test]
    fn cover_partition_star_bound() {
        let x = FiniteMetricSpace::<Q>::integer_window(0, 30);
        let cover = ball_cover(&x, q(2));
        let phi = make_pou_from_cover(&x, &cover, 2.0).unwrap();
        let star = star_preimage_mesh(&phi, &x).unwrap().to_f64();
        assert!(star <= cover.mesh().to_f64() + 4.0);
    }

    #[test]
    fn transfer_along_identity_keeps_mesh() {
        let x = Arc::new(FiniteMetricSpace::<Q>::integer_window(0, 30));
        let phi = tent_partition(&x, 4.0).unwrap();
        let id = LsMap::identity(x.clone());
        let psi = transfer_pou(&id, &phi, q(1)).unwrap();
        assert_eq!(psi.vertices.len(), phi.vertices.len());
        assert_eq!(pou_mesh(&psi, &x, q(1)).unwrap(), pou_mesh(&phi, &x, q(1)).unwrap());
    }

    #[test]
    fn transfer_along_fold_splits_vertices() {
        let n = 20;
        let fold = LsMap::new(
            Arc::new(FiniteMetricSpace::<Q>::integer_window(-n, n)),
            Arc::new(FiniteMetricSpace::integer_window(0, n)),
            (-n..=n).map(|k| k.unsigned_abs() as usize).collect(),
        )
        .unwrap();
        let phi = tent_partition(fold.codomain(), 4.0).unwrap();
        let psi = transfer_pou(&fold, &phi, q(1)).unwrap();
        // Vertex 0 stays whole, every later vertex splits into two branches.
        assert_eq!(psi.vertices.len(), 2 * phi.vertices.len() - 1);
        for row in &psi.rows {
            let sum: f64 = row.iter().map(|&(_, w)| w).sum();
            assert!((sum - 1.0).abs() < ROW_SUM_TOLERANCE);
        }

        let constant = LsMap::constant(fold.domain().clone(), Arc::new(FiniteMetricSpace::integer_window(0, 0)), 0)
            .unwrap();
        let single = PartitionOfUnity::new(vec!["v".into()], vec![vec![(0, 1.0)]]).unwrap();
        let psi = transfer_pou(&constant, &single, q(1)).unwrap();
        assert_eq!(psi.vertices.len(), 1);
        assert_eq!(
            star_preimage_mesh(&psi, fold.domain()).unwrap(),
            Extended::Finite(q(2 * n))
        );
    }
}

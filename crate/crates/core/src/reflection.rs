//! The dimension-zero reflection and the membership defect of maps it inverts.

use std::sync::Arc;

use rayon::prelude::*;

use crate::components::{components_at, joining_scale};
use crate::maps::LsMap;
use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;
use crate::table::{Axis, ResponseTable};

/// `I(X)`: the points of `X` with `d_I(x, x')` the least grid scale at which
/// `x` and `x'` share a component (`∞` if no grid scale joins them).
#[derive(Clone, Debug)]
pub struct ReflectionMetric<T> {
    pub space: Arc<FiniteMetricSpace<T>>,
    pub grid: Vec<T>,
}

/// All-pairs bottleneck distances: entry `(x, x')` is the least `r` for which
/// `x` and `x'` are `r`-connected in the whole space.
pub fn bottleneck_matrix<T: Scalar>(space: &FiniteMetricSpace<T>) -> Vec<Extended<T>> {
    let n = space.len();
    // Minimum spanning forest by Prim, then max-edge along tree paths.
    let mut parent = vec![usize::MAX; n];
    let mut key = vec![Extended::Infinite; n];
    let mut done = vec![false; n];
    let mut adjacency: Vec<Vec<(usize, Extended<T>)>> = vec![Vec::new(); n];
    for root in 0..n {
        if done[root] {
            continue;
        }
        key[root] = Extended::zero();
        loop {
            let mut pick = None;
            for v in 0..n {
                if !done[v] && key[v].is_finite() && pick.map_or(true, |p: usize| key[v] < key[p]) {
                    pick = Some(v);
                }
            }
            let Some(u) = pick else { break };
            done[u] = true;
            if parent[u] != usize::MAX {
                adjacency[u].push((parent[u], key[u]));
                adjacency[parent[u]].push((u, key[u]));
            }
            let row = space.row(u);
            for v in 0..n {
                if !done[v] && row[v] < key[v] {
                    key[v] = row[v];
                    parent[v] = u;
                }
            }
        }
    }
    let rows: Vec<Vec<Extended<T>>> = (0..n)
        .into_par_iter()
        .map(|source| {
            let mut best = vec![Extended::Infinite; n];
            best[source] = Extended::zero();
            let mut stack = vec![source];
            let mut seen = vec![false; n];
            seen[source] = true;
            while let Some(u) = stack.pop() {
                for &(v, w) in &adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        best[v] = best[u].max(w);
                        stack.push(v);
                    }
                }
            }
            best
        })
        .collect();
    rows.into_iter().flatten().collect()
}

pub fn reflect_0<T: Scalar>(space: &FiniteMetricSpace<T>, r_grid: &[T]) -> ReflectionMetric<T> {
    let n = space.len();
    let bottleneck = bottleneck_matrix(space);
    let snapped = FiniteMetricSpace::from_fn_trusted(space.labels().to_vec(), space.basepoint(), |i, j| {
        let b = bottleneck[i * n + j];
        r_grid
            .iter()
            .find(|&&r| b.le_scale(r))
            .map_or(Extended::Infinite, |&r| Extended::Finite(r))
    });
    ReflectionMetric {
        space: Arc::new(snapped),
        grid: r_grid.to_vec(),
    }
}

/// For each `s`, the least `r <= r_bound` such that the preimage of every
/// `s`-component of `Y` lies in a single `r`-component of `X`; `None` (⊤)
/// beyond the bound.
pub fn ei_defect<T: Scalar>(f: &LsMap<T>, s_grid: &[T], r_bound: T) -> ResponseTable<T, Option<T>> {
    let x_all: Vec<usize> = (0..f.domain().len()).collect();
    let y_all: Vec<usize> = (0..f.codomain().len()).collect();
    let axis = Axis {
        name: "s".into(),
        grid: s_grid.to_vec(),
    };
    ResponseTable::build(vec![axis], |p| {
        let comps = components_at(f.codomain(), &y_all, p[0]);
        let needed = comps
            .classes
            .iter()
            .map(|c| joining_scale(f.domain(), &x_all, &f.preimage(c)))
            .fold(Extended::zero(), Extended::max);
        needed.finite().filter(|&r| r <= r_bound)
    })
}

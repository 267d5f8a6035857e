//! Chain components at a scale.
//!
//! Two points of a carrier set are `r`-connected when a chain of steps of
//! length at most `r` joins them without leaving the carrier.

use crate::cover::Block;
use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two elements were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    /// Groups `0..n` into classes, each sorted, ordered by least member.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let root = self.find(x);
            if slot[root] == usize::MAX {
                slot[root] = out.len();
                out.push(Vec::new());
            }
            out[slot[root]].push(x);
        }
        out
    }
}

/// Disjoint classes covering a carrier set.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition<T> {
    pub classes: Vec<Block>,
    pub class_mesh: Extended<T>,
}

impl<T: Scalar> Partition<T> {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Maps global point indices to positions inside a carrier.
pub(crate) struct CarrierIndex {
    position: Vec<u32>,
}

impl CarrierIndex {
    pub(crate) fn new(n_points: usize, carrier: &[usize]) -> Self {
        let mut position = vec![u32::MAX; n_points];
        for (k, &p) in carrier.iter().enumerate() {
            position[p] = k as u32;
        }
        Self { position }
    }

    #[inline]
    pub(crate) fn get(&self, p: usize) -> Option<usize> {
        match self.position[p] {
            u32::MAX => None,
            k => Some(k as usize),
        }
    }
}

/// Union-find over a carrier (positions `0..carrier.len()`) joined by steps of
/// length at most `r`.
pub(crate) fn carrier_union_find<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    carrier: &[usize],
    r: T,
) -> UnionFind {
    let k = carrier.len();
    let mut uf = UnionFind::new(k);
    if k < 2 || r < T::zero() {
        return uf;
    }
    let index = CarrierIndex::new(space.len(), carrier);
    for (i, &x) in carrier.iter().enumerate() {
        let near = space.within(x, r);
        if near.len() <= k {
            for &y in near {
                if let Some(j) = index.get(y as usize) {
                    uf.union(i, j);
                }
            }
        } else {
            let row = space.row(x);
            for (j, &y) in carrier.iter().enumerate().skip(i + 1) {
                if row[y].le_scale(r) {
                    uf.union(i, j);
                }
            }
        }
    }
    uf
}

/// The `r`-chain components of `carrier`, chains taken inside the carrier.
///
/// Classes are sorted and ordered by least point index.
pub fn components_at<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    carrier: &[usize],
    r: T,
) -> Partition<T> {
    let mut carrier = carrier.to_vec();
    carrier.sort_unstable();
    carrier.dedup();
    let mut uf = carrier_union_find(space, &carrier, r);
    let classes: Vec<Block> = uf
        .classes()
        .into_iter()
        .map(|class| class.into_iter().map(|i| carrier[i]).collect())
        .collect();
    let class_mesh = classes
        .iter()
        .map(|c| space.diameter_of(c))
        .fold(Extended::zero(), Extended::max);
    Partition {
        classes,
        class_mesh,
    }
}

/// Largest diameter of an `r`-component of any block of `family`.
pub fn component_mesh<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    family: &[Block],
    r: T,
) -> Extended<T> {
    family
        .iter()
        .map(|block| components_at(space, block, r).class_mesh)
        .fold(Extended::zero(), Extended::max)
}

/// Components of `carrier` under the relation "some block of `family`
/// contains both points" (blocks may reach outside the carrier).
pub fn family_components(carrier: &[usize], family: &[Block]) -> Vec<Block> {
    let mut carrier = carrier.to_vec();
    carrier.sort_unstable();
    carrier.dedup();
    let Some(&max_point) = carrier.iter().chain(family.iter().flatten()).max() else {
        return Vec::new();
    };
    let index = CarrierIndex::new(max_point + 1, &carrier);
    let mut uf = UnionFind::new(carrier.len());
    for block in family {
        let mut first = None;
        for &p in block {
            if let Some(k) = index.get(p) {
                match first {
                    None => first = Some(k),
                    Some(f) => {
                        uf.union(f, k);
                    }
                }
            }
        }
    }
    uf.classes()
        .into_iter()
        .map(|class| class.into_iter().map(|i| carrier[i]).collect())
        .collect()
}

/// Minimax ("bottleneck") chain length from `source` to each carrier point,
/// chains inside the carrier. Entry `k` refers to `carrier[k]`.
///
/// The least `r` for which `source` and `carrier[k]` are `r`-connected is
/// exactly entry `k`.
pub fn bottleneck_from<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    carrier: &[usize],
    source: usize,
) -> Vec<Extended<T>> {
    let k = carrier.len();
    let mut best = vec![Extended::Infinite; k];
    let mut done = vec![false; k];
    let Some(start) = carrier.iter().position(|&p| p == source) else {
        return best;
    };
    best[start] = Extended::zero();
    // Prim-style widest path on the complete graph of the carrier.
    for _ in 0..k {
        let mut pick = None;
        for i in 0..k {
            if !done[i] && (pick.is_none() || best[i] < best[pick.unwrap()]) {
                pick = Some(i);
            }
        }
        let Some(u) = pick else { break };
        if best[u] == Extended::Infinite {
            break;
        }
        done[u] = true;
        let row = space.row(carrier[u]);
        for v in 0..k {
            if !done[v] {
                let through = best[u].max(row[carrier[v]]);
                if through < best[v] {
                    best[v] = through;
                }
            }
        }
    }
    best
}

/// Least `r` such that all of `set` lies in a single `r`-component of
/// `carrier` (`set` must be a subset of `carrier`); `0` for sets of at most
/// one point.
pub fn joining_scale<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    carrier: &[usize],
    set: &[usize],
) -> Extended<T> {
    let Some(&first) = set.first() else {
        return Extended::zero();
    };
    let reach = bottleneck_from(space, carrier, first);
    let index = CarrierIndex::new(space.len(), carrier);
    set.iter()
        .map(|&p| match index.get(p) {
            Some(k) => reach[k],
            None => Extended::Infinite,
        })
        .fold(Extended::zero(), Extended::max)
}

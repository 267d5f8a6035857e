//! Dimension-zero tests, uniform families, multiplicity-bounded covers and
//! cover transfer along maps.

use std::sync::Arc;

use rayon::prelude::*;

use crate::components::{components_at, UnionFind};
use crate::cover::{ball_cover, mesh_of, normalize_block, Block, ScaledCover};
use crate::error::{Error, Result};
use crate::maps::LsMap;
use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;
use crate::table::{Axis, ResponseTable};

fn r_axis<T: Scalar>(r_grid: &[T]) -> Vec<Axis<T>> {
    vec![Axis {
        name: "r".into(),
        grid: r_grid.to_vec(),
    }]
}

/// `D(r)`: the largest diameter of an `r`-component of the whole space.
pub fn asdim0_response<T: Scalar>(space: &FiniteMetricSpace<T>, r_grid: &[T]) -> ResponseTable<T> {
    let all: Vec<usize> = (0..space.len()).collect();
    ResponseTable::build(r_axis(r_grid), |p| components_at(space, &all, p[0]).class_mesh)
}

/// Subsets of a common ambient space, treated as a disjoint union: chains
/// never pass between members or through ambient points outside a member.
#[derive(Clone, Debug)]
pub struct UniformFamily<T> {
    pub ambient: Arc<FiniteMetricSpace<T>>,
    pub members: Vec<Block>,
}

impl<T: Scalar> UniformFamily<T> {
    pub fn new(ambient: Arc<FiniteMetricSpace<T>>, members: Vec<Block>) -> Result<Self> {
        for &p in members.iter().flatten() {
            ambient.check_index(p)?;
        }
        let members = members.into_iter().map(normalize_block).collect();
        Ok(Self { ambient, members })
    }

    /// The family `{ f⁻¹(B(y, s)) : y in Y }`.
    pub fn preimages_of_balls(f: &LsMap<T>, s: T) -> Self {
        let members = (0..f.codomain().len()).map(|y| f.preimage_ball(y, s)).collect();
        Self {
            ambient: f.domain().clone(),
            members,
        }
    }

    /// Materializes the disjoint union as one space with infinite distance
    /// between members. Point `k` of member `i` comes after all points of
    /// earlier members.
    pub fn disjoint_union(&self) -> FiniteMetricSpace<T> {
        let mut owner = Vec::new();
        let mut points = Vec::new();
        for (i, member) in self.members.iter().enumerate() {
            for &p in member {
                owner.push(i);
                points.push(p);
            }
        }
        let labels = owner
            .iter()
            .zip(&points)
            .map(|(i, &p)| format!("{}:{}", i, self.ambient.label(p)))
            .collect();
        FiniteMetricSpace::from_fn_trusted(labels, None, |a, b| {
            if owner[a] == owner[b] {
                self.ambient.dist(points[a], points[b])
            } else {
                Extended::Infinite
            }
        })
    }
}

/// `D(r) = max` over members of the largest `r`-component diameter, each member
/// taken as a space of its own.
pub fn uniform_asdim0_response<T: Scalar>(family: &UniformFamily<T>, r_grid: &[T]) -> ResponseTable<T> {
    let per_member: Vec<Vec<Extended<T>>> = family
        .members
        .par_iter()
        .map(|member| {
            let sub = family.ambient.subspace(member);
            let all: Vec<usize> = (0..sub.len()).collect();
            r_grid
                .iter()
                .map(|&r| components_at(&sub, &all, r).class_mesh)
                .collect()
        })
        .collect();
    let cells = (0..r_grid.len())
        .map(|k| {
            per_member
                .iter()
                .map(|row| row[k])
                .fold(Extended::zero(), Extended::max)
        })
        .collect();
    ResponseTable::new(r_axis(r_grid), cells).expect("one cell per scale")
}

/// A cover coarsening the `r`-balls with bounded point multiplicity.
#[derive(Clone, Debug)]
pub struct UpperCover<T> {
    pub cover: ScaledCover<T>,
    /// Achieved mesh `R`.
    pub mesh: Extended<T>,
    /// True only for `n = 0`, where the `r`-components are optimal.
    pub exact: bool,
}

/// Cover of `X`, coarsening the `r`-balls, with multiplicity at most `n + 1`.
///
/// For `n = 0` the `r`-components. For `n >= 1` a greedy upper bound: start
/// from the ball cover and, while some point lies in more than `n + 1` blocks,
/// merge the two blocks through the most loaded point whose union is
/// smallest. The merge sequence does not depend on `n`, so the mesh is
/// non-increasing in `n`.
pub fn asdim_upper_at<T: Scalar>(space: &FiniteMetricSpace<T>, r: T, n: usize) -> UpperCover<T> {
    if n == 0 {
        let all: Vec<usize> = (0..space.len()).collect();
        let part = components_at(space, &all, r);
        let cover = ScaledCover::new(space, part.classes, Some(r));
        let mesh = cover.mesh();
        return UpperCover {
            cover,
            mesh,
            exact: true,
        };
    }
    let mut blocks = drop_contained(ball_cover(space, r).into_blocks());
    loop {
        let Some(point) = overloaded_point(&blocks, space.len(), n + 1) else {
            break;
        };
        let holders: Vec<usize> = (0..blocks.len())
            .filter(|&k| blocks[k].binary_search(&point).is_ok())
            .collect();
        let mut best: Option<(Extended<T>, usize, usize)> = None;
        for (a, &i) in holders.iter().enumerate() {
            for &j in &holders[a + 1..] {
                let union = union_of(&blocks[i], &blocks[j]);
                let d = space.diameter_of(&union);
                if best.map_or(true, |(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("an overloaded point lies in two blocks");
        let merged = union_of(&blocks[i], &blocks[j]);
        blocks.remove(j);
        blocks[i] = merged;
        blocks = drop_contained(blocks);
    }
    let cover = ScaledCover::new(space, blocks, Some(r));
    let mesh = cover.mesh();
    UpperCover {
        cover,
        mesh,
        exact: false,
    }
}

fn union_of(a: &[usize], b: &[usize]) -> Block {
    normalize_block(a.iter().chain(b).copied().collect())
}

/// Removes duplicate blocks and blocks contained in another, keeping order.
fn drop_contained(blocks: Vec<Block>) -> Vec<Block> {
    let mut keep = vec![true; blocks.len()];
    for i in 0..blocks.len() {
        for j in 0..blocks.len() {
            if i != j && keep[j] && keep[i] {
                let sub = blocks[i].len() <= blocks[j].len()
                    && blocks[i].iter().all(|p| blocks[j].binary_search(p).is_ok());
                // Equal blocks: keep the earlier one.
                if sub && (blocks[i].len() < blocks[j].len() || j < i) {
                    keep[i] = false;
                }
            }
        }
    }
    blocks
        .into_iter()
        .zip(keep)
        .filter_map(|(b, k)| k.then_some(b))
        .collect()
}

/// Least-index point lying in more than `limit` blocks, preferring the
/// largest count.
fn overloaded_point(blocks: &[Block], n_points: usize, limit: usize) -> Option<usize> {
    let mut counts = vec![0usize; n_points];
    for &p in blocks.iter().flatten() {
        counts[p] += 1;
    }
    let (point, &count) = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
    (count > limit).then_some(point)
}

/// Pulls a cover of `Y` back along `f`: the `r`-components of each `f⁻¹(V)`.
///
/// Requires every image `f(B(x, r))` to lie inside some block of `cover`.
pub fn transfer_cover<T: Scalar>(
    f: &LsMap<T>,
    cover: &ScaledCover<T>,
    r: T,
) -> Result<ScaledCover<T>> {
    let x_space = f.domain();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); f.codomain().len()];
    for (k, block) in cover.blocks().iter().enumerate() {
        for &y in block {
            f.codomain().check_index(y)?;
            containing[y].push(k);
        }
    }
    for x in 0..x_space.len() {
        let image = f.image(&x_space.ball(x, r));
        let ok = containing[image[0]]
            .iter()
            .any(|&k| image.iter().all(|y| cover.blocks()[k].binary_search(y).is_ok()));
        if !ok {
            return Err(Error::CoverPrecondition {
                block: x_space.ball(x, r),
            });
        }
    }
    let blocks: Vec<Block> = cover
        .blocks()
        .par_iter()
        .flat_map_iter(|block| components_at(x_space, &f.preimage(block), r).classes)
        .collect();
    Ok(ScaledCover::new(x_space, blocks, Some(r)))
}

/// The cover produced by merging component families of two pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct UnionMerge<T> {
    pub cover: Vec<Block>,
    pub mesh: Extended<T>,
    /// Largest `r`-component diameter of `A` and of `B` as subspaces.
    pub piece_meshes: (Extended<T>, Extended<T>),
}

/// For `X = A ∪ B`, builds a cover of `X` coarsening its `r`-components out
/// of the `r`-component families `V_A`, `V_B` of the pieces.
///
/// `W_1` is the family of components of `A` under `st(st(V_B, U)|_A, V_A)`
/// together with `V_A` (`U` the pair relation `d <= r`), `W_2` symmetrically;
/// `W` joins `W_1` and `W_2` blocks that are `r`-close.
pub fn finite_union_merge<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    a: &[usize],
    b: &[usize],
    r: T,
) -> Result<UnionMerge<T>> {
    let n = space.len();
    let mut covered = vec![false; n];
    for &p in a.iter().chain(b) {
        space.check_index(p)?;
        covered[p] = true;
    }
    if covered.iter().any(|c| !c) {
        return Err(Error::Parse("A and B must cover the space".into()));
    }
    let a = normalize_block(a.to_vec());
    let b = normalize_block(b.to_vec());
    let sub_a = space.subspace(&a);
    let sub_b = space.subspace(&b);
    let lift = |classes: Vec<Block>, piece: &[usize]| -> Vec<Block> {
        classes
            .into_iter()
            .map(|c| c.into_iter().map(|i| piece[i]).collect())
            .collect()
    };
    let part_a = components_at(&sub_a, &(0..a.len()).collect::<Vec<_>>(), r);
    let part_b = components_at(&sub_b, &(0..b.len()).collect::<Vec<_>>(), r);
    let v_a = lift(part_a.classes, &a);
    let v_b = lift(part_b.classes, &b);

    let w1 = merge_side(space, &v_a, &v_b, r);
    let w2 = merge_side(space, &v_b, &v_a, r);

    let mut uf = UnionFind::new(n);
    for block in w1.iter().chain(&w2) {
        for w in block.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    for &p in &a {
        for &q in space.within(p, r) {
            if b.binary_search(&(q as usize)).is_ok() {
                uf.union(p, q as usize);
            }
        }
    }
    let cover = uf.classes();
    let mesh = mesh_of(space, &cover);
    Ok(UnionMerge {
        cover,
        mesh,
        piece_meshes: (part_a.class_mesh, part_b.class_mesh),
    })
}

/// Components of the piece covered by `own` under `own` together with the
/// `own`-stars of the `r`-neighbourhoods (inside the piece) of `other` blocks.
fn merge_side<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    own: &[Block],
    other: &[Block],
    r: T,
) -> Vec<Block> {
    let mut owner = vec![usize::MAX; space.len()];
    for (k, block) in own.iter().enumerate() {
        for &p in block {
            owner[p] = k;
        }
    }
    let mut uf = UnionFind::new(own.len());
    for block in other {
        let mut touched: Vec<usize> = block
            .iter()
            .flat_map(|&p| {
                std::iter::once(p as u32)
                    .chain(space.within(p, r).iter().copied())
                    .map(|q| owner[q as usize])
            })
            .filter(|&k| k != usize::MAX)
            .collect();
        touched.sort_unstable();
        touched.dedup();
        for w in touched.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    uf.classes()
        .into_iter()
        .map(|ks| normalize_block(ks.into_iter().flat_map(|k| own[k].iter().copied()).collect()))
        .collect()
}

//! Families of point subsets: scaled covers, stars and refinement.

use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;

/// A set of point indices, kept sorted and duplicate free.
pub type Block = Vec<usize>;

pub(crate) fn normalize_block(mut block: Block) -> Block {
    block.sort_unstable();
    block.dedup();
    block
}

/// A uniformly bounded family on a finite window: its blocks, the parameter
/// that generated it (if any) and its mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledCover<T> {
    blocks: Vec<Block>,
    scale: Option<T>,
    mesh: Extended<T>,
}

impl<T: Scalar> ScaledCover<T> {
    pub fn new(space: &FiniteMetricSpace<T>, blocks: Vec<Block>, scale: Option<T>) -> Self {
        let blocks: Vec<Block> = blocks.into_iter().map(normalize_block).collect();
        let mesh = mesh_of(space, &blocks);
        Self { blocks, scale, mesh }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Block> {
        self.blocks
    }

    pub fn scale(&self) -> Option<T> {
        self.scale
    }

    pub fn mesh(&self) -> Extended<T> {
        self.mesh
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Largest number of blocks containing a single point.
    pub fn multiplicity(&self) -> usize {
        multiplicity(&self.blocks)
    }

    pub fn covers(&self, n_points: usize) -> bool {
        let mut seen = vec![false; n_points];
        for &p in self.blocks.iter().flatten() {
            seen[p] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

/// Maximum diameter over blocks (`0` for an empty family).
pub fn mesh_of<T: Scalar>(space: &FiniteMetricSpace<T>, blocks: &[Block]) -> Extended<T> {
    blocks
        .iter()
        .map(|b| space.diameter_of(b))
        .fold(Extended::zero(), Extended::max)
}

pub fn multiplicity(blocks: &[Block]) -> usize {
    let Some(max_point) = blocks.iter().flatten().max() else {
        return 0;
    };
    let mut counts = vec![0usize; max_point + 1];
    for &p in blocks.iter().flatten() {
        counts[p] += 1;
    }
    counts.into_iter().max().unwrap_or(0)
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut j = 0;
    for &x in small {
        while j < big.len() && big[j] < x {
            j += 1;
        }
        if j == big.len() || big[j] != x {
            return false;
        }
    }
    true
}

/// Union of the blocks of `family` that meet `set`.
pub fn star_set(set: &[usize], family: &[Block]) -> Block {
    let set = normalize_block(set.to_vec());
    let mut out = Vec::new();
    for block in family {
        if intersects(&set, block) {
            out.extend_from_slice(block);
        }
    }
    normalize_block(out)
}

/// `{ star_set(B, U) : B in B }`, with the mesh recomputed.
pub fn star_family<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    family: &ScaledCover<T>,
    by: &ScaledCover<T>,
) -> ScaledCover<T> {
    let blocks = family
        .blocks()
        .iter()
        .map(|b| star_set(b, by.blocks()))
        .collect();
    ScaledCover::new(space, blocks, None)
}

/// Adds a singleton for every point not covered by `family`.
pub fn trivial_extension<T: Scalar>(
    family: &ScaledCover<T>,
    space: &FiniteMetricSpace<T>,
) -> ScaledCover<T> {
    let mut covered = vec![false; space.len()];
    for &p in family.blocks().iter().flatten() {
        covered[p] = true;
    }
    let mut blocks = family.blocks().to_vec();
    blocks.extend(
        covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(p, _)| vec![p]),
    );
    ScaledCover {
        blocks,
        scale: family.scale(),
        mesh: family.mesh(),
    }
}

/// Least `s` such that every block lies in some closed ball `B(y, s)`.
pub fn cover_radius<T: Scalar>(space: &FiniteMetricSpace<T>, blocks: &[Block]) -> Extended<T> {
    blocks
        .iter()
        .filter(|b| !b.is_empty())
        .map(|b| {
            (0..space.len())
                .map(|y| {
                    b.iter()
                        .map(|&p| space.dist(y, p))
                        .fold(Extended::zero(), Extended::max)
                })
                .fold(Extended::Infinite, Extended::min)
        })
        .fold(Extended::zero(), Extended::max)
}

/// Closed balls `B(y, s)` for every point `y`, in point order.
pub fn ball_cover<T: Scalar>(space: &FiniteMetricSpace<T>, s: T) -> ScaledCover<T> {
    let blocks = (0..space.len()).map(|y| space.ball(y, s)).collect();
    ScaledCover::new(space, blocks, Some(s))
}

/// True iff every block of `fine` lies inside some block of `coarse`.
pub fn is_refinement(fine: &[Block], coarse: &[Block]) -> bool {
    let max_point = fine
        .iter()
        .chain(coarse)
        .flatten()
        .copied()
        .max()
        .unwrap_or(0);
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); max_point + 1];
    for (k, block) in coarse.iter().enumerate() {
        for &p in block {
            containing[p].push(k);
        }
    }
    fine.iter().all(|block| match block.first() {
        // The empty set refines any non-empty family.
        None => !coarse.is_empty(),
        Some(&first) => containing[first]
            .iter()
            .any(|&k| is_subset(block, &coarse[k])),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn window(n: i64) -> FiniteMetricSpace<Rational64> {
        FiniteMetricSpace::integer_window(0, n)
    }

    fn q(v: i64) -> Rational64 {
        Rational64::from_integer(v)
    }

    #[test]
    fn star_set_examples() {
        let u = vec![vec![0, 1], vec![1, 2], vec![3]];
        assert_eq!(star_set(&[1], &u), vec![0, 1, 2]);
        assert_eq!(star_set(&[], &u), Vec::<usize>::new());
        assert_eq!(star_set(&[3], &u[..2]), Vec::<usize>::new());
    }

    #[test]
    fn star_family_examples() {
        let labels: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let one = Extended::Finite(q(1));
        let zero = Extended::Finite(q(0));
        let m = vec![
            vec![zero, one, one],
            vec![one, zero, one],
            vec![one, one, zero],
        ];
        let space = FiniteMetricSpace::from_matrix(labels, m, None).unwrap();
        let singles = ScaledCover::new(&space, vec![vec![0], vec![1], vec![2]], None);
        assert_eq!(star_family(&space, &singles, &singles).blocks(), singles.blocks());

        let b = ScaledCover::new(&space, vec![vec![0]], None);
        let u = ScaledCover::new(&space, vec![vec![0, 1]], None);
        assert_eq!(star_family(&space, &b, &u).blocks(), &[vec![0, 1]]);
    }

    #[test]
    fn star_of_path_balls() {
        // Path 0-1-2-3 with unit edges.
        let space = window(3);
        let balls = ball_cover(&space, q(1));
        let star = star_family(&space, &balls, &balls);
        assert_eq!(star.blocks()[1], vec![0, 1, 2, 3]);
        assert_eq!(star.mesh(), Extended::Finite(q(3)));
    }

    #[test]
    fn trivial_extension_examples() {
        let space = window(1);
        let empty = ScaledCover::new(&space, vec![], None);
        assert_eq!(trivial_extension(&empty, &space).blocks(), &[vec![0], vec![1]]);

        let space = window(2);
        let u = ScaledCover::new(&space, vec![vec![0, 1]], None);
        let ext = trivial_extension(&u, &space);
        assert_eq!(ext.blocks(), &[vec![0, 1], vec![2]]);
        assert_eq!(ext.mesh(), u.mesh());
        assert_eq!(trivial_extension(&ext, &space).blocks(), ext.blocks());
    }

    #[test]
    fn ball_cover_examples() {
        let space = window(10);
        let zero = ball_cover(&space, q(0));
        assert_eq!(zero.len(), 11);
        assert!(zero.blocks().iter().all(|b| b.len() == 1));
        let one = ball_cover(&space, q(1));
        assert_eq!(one.blocks()[0], vec![0, 1]);
        assert_eq!(one.blocks()[5], vec![4, 5, 6]);
        assert_eq!(one.mesh(), Extended::Finite(q(2)));

        let point = window(0);
        assert_eq!(ball_cover(&point, q(7)).blocks(), &[vec![0]]);
    }

    #[test]
    fn refinement_examples() {
        let v = vec![vec![0, 1], vec![1, 2]];
        assert!(is_refinement(&v, &v));
        assert!(is_refinement(&[vec![0], vec![1], vec![2]], &v));
        assert!(!is_refinement(&[vec![0, 2]], &v));
    }

    #[test]
    fn radius_of_intervals() {
        let space = window(20);
        let blocks: Vec<Block> = (0..4).map(|k| (3 * k..=3 * k + 5).collect()).collect();
        assert_eq!(cover_radius(&space, &blocks), Extended::Finite(q(3)));
        assert_eq!(cover_radius(&space, &[vec![4]]), Extended::zero());
    }

    #[test]
    fn multiplicity_counts_overlaps() {
        assert_eq!(multiplicity(&[vec![0, 1], vec![1, 2], vec![1]]), 3);
        assert_eq!(multiplicity(&[]), 0);
    }
}

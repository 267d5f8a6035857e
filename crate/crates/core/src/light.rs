//! Light structures, the light pseudo-metric and the monotone-light
//! factorization.

use std::sync::Arc;

use rayon::prelude::*;

use crate::components::{components_at, joining_scale, UnionFind};
use crate::cover::Block;
use crate::error::{Error, Result};
use crate::maps::{closeness_gap, modulus_at, LsMap};
use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;
use crate::table::{Axis, ResponseTable};

/// The `r`-components of the preimages `f⁻¹(B(y, s))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LightFamily<T> {
    pub r: T,
    pub s: T,
    pub blocks: Vec<Block>,
    /// Codomain point whose ball produced each block.
    pub parents: Vec<usize>,
    pub mesh: Extended<T>,
}

pub fn light_component_family<T: Scalar>(f: &LsMap<T>, r: T, s: T) -> LightFamily<T> {
    let per_y: Vec<(usize, Vec<Block>, Extended<T>)> = (0..f.codomain().len())
        .into_par_iter()
        .map(|y| {
            let part = components_at(f.domain(), &f.preimage_ball(y, s), r);
            (y, part.classes, part.class_mesh)
        })
        .collect();
    let mut blocks = Vec::new();
    let mut parents = Vec::new();
    let mut mesh = Extended::zero();
    for (y, classes, m) in per_y {
        mesh = mesh.max(m);
        parents.extend(std::iter::repeat(y).take(classes.len()));
        blocks.extend(classes);
    }
    LightFamily {
        r,
        s,
        blocks,
        parents,
        mesh,
    }
}

/// Mesh of [`light_component_family`] without keeping the blocks.
pub fn light_mesh<T: Scalar>(f: &LsMap<T>, r: T, s: T) -> Extended<T> {
    (0..f.codomain().len())
        .into_par_iter()
        .map(|y| components_at(f.domain(), &f.preimage_ball(y, s), r).class_mesh)
        .reduce(Extended::zero, Extended::max)
}

/// `L(r, s)`: the mesh of the light family over an `r × s` grid.
pub fn light_response<T: Scalar>(f: &LsMap<T>, r_grid: &[T], s_grid: &[T]) -> ResponseTable<T> {
    let axes = vec![
        Axis {
            name: "r".into(),
            grid: r_grid.to_vec(),
        },
        Axis {
            name: "s".into(),
            grid: s_grid.to_vec(),
        },
    ];
    ResponseTable::build(axes, |p| light_mesh(f, p[0], p[1]))
}

/// Mesh of `c(U_r, f, c(f(U_r), g, V_s))` for a composable pair `X -f-> Y -g-> Z`.
///
/// `U_r` is the pair relation `d <= r` on `X`. The inner family consists of
/// the `f(U_r)`-components of each `g⁻¹(B(z, s))`; the outer one of the
/// `r`-components of their preimages under `f`.
pub fn nested_light_mesh<T: Scalar>(f: &LsMap<T>, g: &LsMap<T>, r: T, s: T) -> Result<Extended<T>> {
    if !f.codomain().same_as(g.domain()) {
        return Err(Error::NotComposable("codomain of f is not the domain of g".into()));
    }
    let x_space = f.domain();
    let mut image_pairs = Vec::new();
    for x in 0..x_space.len() {
        for &x2 in x_space.within(x, r) {
            let (a, b) = (f.apply(x), f.apply(x2 as usize));
            if a < b {
                image_pairs.push((a, b));
            }
        }
    }
    image_pairs.sort_unstable();
    image_pairs.dedup();
    let y_len = g.domain().len();
    let mesh = (0..g.codomain().len())
        .into_par_iter()
        .map(|z| {
            let carrier = g.preimage_ball(z, s);
            let mut inside = vec![false; y_len];
            for &y in &carrier {
                inside[y] = true;
            }
            let mut uf = UnionFind::new(y_len);
            for &(a, b) in &image_pairs {
                if inside[a] && inside[b] {
                    uf.union(a, b);
                }
            }
            let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for &y in &carrier {
                groups.entry(uf.find(y)).or_default().push(y);
            }
            groups
                .values()
                .map(|block| components_at(x_space, &f.preimage(block), r).class_mesh)
                .fold(Extended::zero(), Extended::max)
        })
        .reduce(Extended::zero, Extended::max);
    Ok(mesh)
}

/// Outcome of an `n`-to-1 search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NToOne<T> {
    /// Least scale found, `None` when it exceeds the bound.
    pub value: Option<T>,
    /// False when a greedy clustering produced an upper bound only.
    pub exact: bool,
}

const EXACT_THREE_LIMIT: usize = 20;

/// Least `r <= r_bound` such that every `f⁻¹(B(y, s))` is a union of `n` sets
/// of diameter at most `r`.
pub fn n_to_1_response<T: Scalar>(f: &LsMap<T>, s: T, n: usize, r_bound: T) -> NToOne<T> {
    assert!(n >= 1, "n must be positive");
    let x_space = f.domain();
    let per_y: Vec<(Extended<T>, bool)> = (0..f.codomain().len())
        .into_par_iter()
        .map(|y| min_cluster_diameter(x_space, &f.preimage_ball(y, s), n))
        .collect();
    let mut worst = Extended::zero();
    let mut exact = true;
    for (v, e) in per_y {
        worst = worst.max(v);
        exact &= e;
    }
    let value = worst.finite().filter(|&v| v <= r_bound);
    NToOne { value, exact }
}

/// Least achievable maximum diameter when splitting `points` into `n` parts.
fn min_cluster_diameter<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    points: &[usize],
    n: usize,
) -> (Extended<T>, bool) {
    if points.len() <= n {
        return (Extended::zero(), true);
    }
    if n == 1 {
        return (space.diameter_of(points), true);
    }
    if n == 3 && points.len() > EXACT_THREE_LIMIT || n > 3 {
        return (greedy_clusters(space, points, n), false);
    }
    let mut thresholds: Vec<Extended<T>> = Vec::new();
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            thresholds.push(space.dist(a, b));
        }
    }
    thresholds.push(Extended::zero());
    thresholds.sort_by(|a, b| a.total_cmp(b));
    thresholds.dedup();
    let feasible = |t: Extended<T>| colorable(space, points, t, n);
    // Feasibility is monotone in the threshold.
    let (mut lo, mut hi) = (0, thresholds.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    (thresholds[lo], true)
}

/// Whether the conflict graph "distance above `t`" is `n`-colorable.
fn colorable<T: Scalar>(space: &FiniteMetricSpace<T>, points: &[usize], t: Extended<T>, n: usize) -> bool {
    let k = points.len();
    let conflict = |i: usize, j: usize| space.dist(points[i], points[j]) > t;
    let mut color = vec![usize::MAX; k];
    if n == 2 {
        for start in 0..k {
            if color[start] != usize::MAX {
                continue;
            }
            color[start] = 0;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for v in 0..k {
                    if v != u && conflict(u, v) {
                        if color[v] == usize::MAX {
                            color[v] = 1 - color[u];
                            stack.push(v);
                        } else if color[v] == color[u] {
                            return false;
                        }
                    }
                }
            }
        }
        return true;
    }
    fn assign(
        i: usize,
        n: usize,
        color: &mut Vec<usize>,
        conflict: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        if i == color.len() {
            return true;
        }
        // Symmetry breaking: a new color may only be the next unused one.
        let used = color[..i].iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..n.min(used + 1) {
            if (0..i).all(|j| color[j] != c || !conflict(i, j)) {
                color[i] = c;
                if assign(i + 1, n, color, conflict) {
                    return true;
                }
            }
        }
        color[i] = usize::MAX;
        false
    }
    assign(0, n, &mut color, &conflict)
}

/// Farthest-point clustering: an upper bound on the optimal max diameter.
fn greedy_clusters<T: Scalar>(space: &FiniteMetricSpace<T>, points: &[usize], n: usize) -> Extended<T> {
    let mut centers = vec![points[0]];
    while centers.len() < n {
        let next = points
            .iter()
            .copied()
            .max_by(|&a, &b| {
                space
                    .dist_to_set(a, &centers)
                    .total_cmp(&space.dist_to_set(b, &centers))
                    .then(b.cmp(&a))
            })
            .expect("non-empty");
        centers.push(next);
    }
    let mut clusters = vec![Vec::new(); n];
    for &p in points {
        let k = (0..n)
            .min_by(|&a, &b| space.dist(p, centers[a]).total_cmp(&space.dist(p, centers[b])))
            .expect("n >= 1");
        clusters[k].push(p);
    }
    clusters
        .iter()
        .map(|c| space.diameter_of(c))
        .fold(Extended::zero(), Extended::max)
}

/// The domain re-metrized by the light structure of `f`.
#[derive(Clone, Debug)]
pub struct LightPseudoMetric<T> {
    pub space: Arc<FiniteMetricSpace<T>>,
    /// Largest diagonal scale `n` used for the base relation.
    pub n_max: u64,
}

/// `d_f`: the chain completion of `δ(x, x') = min { n <= n_max : x, x' share a
/// block of c(f, n, n) }`.
pub fn light_pseudometric<T: Scalar>(f: &LsMap<T>, n_max: u64) -> LightPseudoMetric<T> {
    assert!(n_max >= 1, "n_max must be positive");
    const NONE: u32 = u32::MAX;
    let size = f.domain().len();
    let mut delta = vec![NONE; size * size];
    for i in 0..size {
        delta[i * size + i] = 0;
    }
    for n in 1..=n_max {
        let scale = T::from_count(n);
        let family = light_component_family(f, scale, scale);
        for block in &family.blocks {
            for &a in block {
                for &b in block {
                    let cell = &mut delta[a * size + b];
                    if *cell == NONE {
                        *cell = n as u32;
                    }
                }
            }
        }
    }
    let dist = floyd_warshall(delta, size);
    let space = FiniteMetricSpace::from_fn_trusted(
        f.domain().labels().to_vec(),
        f.domain().basepoint(),
        |i, j| match dist[i * size + j] {
            NONE => Extended::Infinite,
            d => Extended::from_count(d as u64),
        },
    );
    LightPseudoMetric {
        space: Arc::new(space),
        n_max,
    }
}

fn floyd_warshall(mut d: Vec<u32>, n: usize) -> Vec<u32> {
    for k in 0..n {
        let row_k: Vec<u32> = d[k * n..(k + 1) * n].to_vec();
        d.par_chunks_mut(n).for_each(|row| {
            let dik = row[k];
            if dik == u32::MAX {
                return;
            }
            for (cell, &dkj) in row.iter_mut().zip(&row_k) {
                if dkj != u32::MAX {
                    let through = dik + dkj;
                    if through < *cell {
                        *cell = through;
                    }
                }
            }
        });
    }
    d
}

/// `f = f' ∘ e` through the light pseudo-metric space `X_f`.
#[derive(Clone, Debug)]
pub struct Factorization<T> {
    pub light_space: Arc<FiniteMetricSpace<T>>,
    /// Identity on points, `X -> X_f`.
    pub e: LsMap<T>,
    /// `f` on points, `X_f -> Y`.
    pub f_prime: LsMap<T>,
}

pub fn factorize<T: Scalar>(f: &LsMap<T>, n_max: u64) -> Factorization<T> {
    let metric = light_pseudometric(f, n_max);
    let light_space = metric.space;
    let e = LsMap::new(
        f.domain().clone(),
        light_space.clone(),
        (0..f.domain().len()).collect(),
    )
    .expect("identity on points");
    let f_prime = LsMap::new(light_space.clone(), f.codomain().clone(), f.values().to_vec())
        .expect("same values");
    Factorization {
        light_space,
        e,
        f_prime,
    }
}

/// Least `(r, t)` for one `s`, or `None` (⊤) within the searched grids.
pub type FrontierCell<T> = Option<(T, T)>;

/// Per-`s` least `(r, t)`, lexicographic in `t` then `r`, such that every
/// `f⁻¹(B(y, s))` lies in a single `r`-component of `f⁻¹(B(y, t))`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneFrontier<T> {
    pub s_grid: Vec<T>,
    pub cells: Vec<FrontierCell<T>>,
}

impl<T: Scalar> MonotoneFrontier<T> {
    pub fn get(&self, s: T) -> Option<FrontierCell<T>> {
        self.s_grid.iter().position(|&g| g == s).map(|i| self.cells[i])
    }

    pub fn is_finite(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,r,t\n");
        for (s, cell) in self.s_grid.iter().zip(&self.cells) {
            match cell {
                Some((r, t)) => out.push_str(&format!("{s},{r},{t}\n")),
                None => out.push_str(&format!("{s},top,top\n")),
            }
        }
        out
    }
}

/// Frontier over explicit ascending grids of candidate `r` and `t`.
pub fn monotone_frontier_on<T: Scalar>(
    f: &LsMap<T>,
    s_grid: &[T],
    r_grid: &[T],
    t_grid: &[T],
) -> MonotoneFrontier<T> {
    let cells = s_grid
        .par_iter()
        .map(|&s| {
            t_grid.iter().find_map(|&t| {
                let needed = required_scale(f, s, t);
                r_grid.iter().copied().find(|&r| needed.le_scale(r)).map(|r| (r, t))
            })
        })
        .collect();
    MonotoneFrontier {
        s_grid: s_grid.to_vec(),
        cells,
    }
}

/// Frontier with `r` ranging over `1..=r_bound` and `t` over `0..=t_bound`.
pub fn monotone_frontier<T: Scalar>(
    f: &LsMap<T>,
    s_grid: &[T],
    r_bound: u64,
    t_bound: u64,
) -> MonotoneFrontier<T> {
    let r_grid: Vec<T> = (1..=r_bound).map(T::from_count).collect();
    let t_grid: Vec<T> = (0..=t_bound).map(T::from_count).collect();
    monotone_frontier_on(f, s_grid, &r_grid, &t_grid)
}

/// Least `r` joining each `f⁻¹(B(y, s))` inside `f⁻¹(B(y, t))`, maximized over
/// `y`; `∞` when the smaller preimage is not contained in the larger.
fn required_scale<T: Scalar>(f: &LsMap<T>, s: T, t: T) -> Extended<T> {
    (0..f.codomain().len())
        .map(|y| {
            let inner = f.preimage_ball(y, s);
            let outer = f.preimage_ball(y, t);
            joining_scale(f.domain(), &outer, &inner)
        })
        .fold(Extended::zero(), Extended::max)
}

/// Result of checking a commutative square against the diagonal fill.
#[derive(Clone, Debug, PartialEq)]
pub struct FillReport<T> {
    /// Control modulus of the diagonal on the scale grid, in the metric of
    /// the left light space.
    pub modulus: Vec<(T, Extended<T>)>,
    /// `gap(g ∘ e, e' ∘ u)`.
    pub upper_gap: Extended<T>,
    /// `gap(m' ∘ g, v ∘ m)`.
    pub lower_gap: Extended<T>,
    pub pass: bool,
}

/// Fills the square
///
/// ```text
///   X  --e-->  X_f  --m-->  Y
///   |u                      |v
///   X' --e'--> X'_f --m'--> Y'
/// ```
///
/// with the diagonal `g = e' ∘ u : X_f -> X'_f` (`e` is the identity on
/// points). Passes when both gaps are within `tol` and the modulus of `g` is
/// finite on `r_grid`.
#[allow(clippy::too_many_arguments)]
pub fn verify_fill_square<T: Scalar>(
    u: &LsMap<T>,
    v: &LsMap<T>,
    e: &LsMap<T>,
    e_prime: &LsMap<T>,
    m: &LsMap<T>,
    m_prime: &LsMap<T>,
    r_grid: &[T],
    tol: T,
) -> Result<FillReport<T>> {
    let shapes = [
        (u.domain(), e.domain(), "u and e must share a domain"),
        (e.codomain(), m.domain(), "e must land in the domain of m"),
        (u.codomain(), e_prime.domain(), "u must land in the domain of e'"),
        (e_prime.codomain(), m_prime.domain(), "e' must land in the domain of m'"),
        (m.codomain(), v.domain(), "m must land in the domain of v"),
        (v.codomain(), m_prime.codomain(), "v and m' must share a codomain"),
    ];
    for (a, b, why) in shapes {
        if !a.same_as(b) {
            return Err(Error::NotComposable(why.into()));
        }
    }
    let identity_on_points = e.domain().len() == e.codomain().len()
        && e.values().iter().enumerate().all(|(i, &v)| i == v);
    if !identity_on_points {
        return Err(Error::NotComposable("e must be the identity on points".into()));
    }
    let g = LsMap::new(e.codomain().clone(), e_prime.codomain().clone(), u.then(e_prime)?.values().to_vec())?;
    let modulus: Vec<(T, Extended<T>)> = r_grid.iter().map(|&r| (r, modulus_at(&g, r))).collect();
    let upper_gap = closeness_gap(&e.then(&g)?, &u.then(e_prime)?)?;
    let lower_gap = closeness_gap(&g.then(m_prime)?, &m.then(v)?)?;
    let pass = upper_gap.le_scale(tol)
        && lower_gap.le_scale(tol)
        && modulus.iter().all(|(_, m)| m.is_finite());
    Ok(FillReport {
        modulus,
        upper_gap,
        lower_gap,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    type Q = Rational64;

    fn q(v: i64) -> Q {
        Q::from_integer(v)
    }

    fn fin(v: i64) -> Extended<Q> {
        Extended::Finite(q(v))
    }

    fn window(lo: i64, hi: i64) -> Arc<FiniteMetricSpace<Q>> {
        Arc::new(FiniteMetricSpace::integer_window(lo, hi))
    }

    fn fold(n: i64) -> LsMap<Q> {
        LsMap::new(
            window(-n, n),
            window(0, n),
            (-n..=n).map(|k| k.unsigned_abs() as usize).collect(),
        )
        .unwrap()
    }

    #[test]
    fn family_examples() {
        let id = LsMap::identity(window(0, 20));
        let fam = light_component_family(&id, q(1), q(2));
        assert_eq!(fam.mesh, fin(4));
        assert_eq!(fam.blocks[10], (8..=12).collect::<Vec<_>>());

        let constant = LsMap::constant(window(0, 12), window(0, 0), 0).unwrap();
        let fam = light_component_family(&constant, q(1), q(0));
        assert_eq!(fam.blocks, vec![(0..=12).collect::<Vec<_>>()]);
        assert_eq!(fam.mesh, fin(12));

        let f = fold(6);
        let fam = light_component_family(&f, q(0), q(0));
        assert!(fam.blocks.iter().all(|b| b.len() == 1));
        assert_eq!(fam.mesh, fin(0));
    }

    #[test]
    fn response_examples() {
        let id = LsMap::identity(window(0, 40));
        let table = light_response(&id, &[q(1)], &[q(0), q(1), q(2), q(3)]);
        assert_eq!(table.cells(), &[fin(0), fin(2), fin(4), fin(6)]);
        for n in [10, 20] {
            let c = LsMap::constant(window(0, n), window(0, 0), 0).unwrap();
            assert_eq!(light_mesh(&c, q(1), q(0)), fin(n));
        }
    }

    #[test]
    fn n_to_1_examples() {
        let id = LsMap::identity(window(0, 10));
        let out = n_to_1_response(&id, q(0), 1, q(5));
        assert_eq!(out.value, Some(q(0)));
        assert!(out.exact);

        let f = fold(10);
        assert_eq!(n_to_1_response(&f, q(0), 2, q(5)).value, Some(q(0)));
        assert_eq!(n_to_1_response(&f, q(0), 1, q(5)).value, None);

        let constant = LsMap::constant(window(0, 10), window(0, 0), 0).unwrap();
        let out = n_to_1_response(&constant, q(0), 2, q(10));
        assert_eq!(out.value, Some(q(5)));
        let out = n_to_1_response(&constant, q(0), 3, q(10));
        assert_eq!(out.value, Some(q(3)));
        assert!(out.exact);
    }

    #[test]
    fn pseudometric_examples() {
        let x = window(0, 24);
        let id = LsMap::identity(x.clone());
        let m = light_pseudometric(&id, 4);
        for a in 0..x.len() {
            for b in 0..x.len() {
                let d = x.dist(a, b).finite().unwrap();
                let df = m.space.dist(a, b).finite().unwrap();
                assert!(df <= d);
                assert!(df * q(3) >= d);
            }
        }
        let constant = LsMap::constant(x.clone(), window(0, 0), 0).unwrap();
        let m = light_pseudometric(&constant, 3);
        assert_eq!(m.space.diameter(), fin(1));
    }

    #[test]
    fn factorization_recovers_f() {
        let f = fold(8);
        let fact = factorize(&f, 4);
        assert_eq!(fact.e.then(&fact.f_prime).unwrap().values(), f.values());
    }

    #[test]
    fn frontier_examples() {
        let id = LsMap::identity(window(0, 20));
        let fr = monotone_frontier(&id, &[q(0), q(1), q(2)], 8, 8);
        assert_eq!(fr.cells, vec![Some((q(1), q(0))), Some((q(1), q(1))), Some((q(1), q(2)))]);

        let constant = LsMap::constant(window(0, 20), window(0, 0), 0).unwrap();
        let fr = monotone_frontier(&constant, &[q(0), q(3)], 8, 8);
        assert_eq!(fr.cells, vec![Some((q(1), q(0))); 2]);

        let fr = monotone_frontier(&fold(16), &[q(0)], 8, 8);
        assert_eq!(fr.cells, vec![None]);
        assert!(fr.to_csv().contains("0,top,top"));
    }

    #[test]
    fn nested_mesh_bounds_composite() {
        let f = fold(10);
        let g = LsMap::new(window(0, 10), window(0, 5), (0..=10).map(|n| n / 2).collect()).unwrap();
        let gf = f.then(&g).unwrap();
        for r in 0..4 {
            for s in 0..4 {
                let lhs = light_mesh(&gf, q(r), q(s));
                let rhs = nested_light_mesh(&f, &g, q(r), q(s)).unwrap();
                assert!(lhs <= rhs, "r={r} s={s}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn fill_square_identity_rows() {
        let f = fold(6);
        let fact = factorize(&f, 3);
        let u = LsMap::identity(f.domain().clone());
        let v = LsMap::identity(f.codomain().clone());
        let report = verify_fill_square(
            &u,
            &v,
            &fact.e,
            &fact.e,
            &fact.f_prime,
            &fact.f_prime,
            &[q(1), q(2)],
            q(0),
        )
        .unwrap();
        assert!(report.pass);
        assert_eq!(report.upper_gap, fin(0));
        assert_eq!(report.lower_gap, fin(0));
    }

    #[test]
    fn fill_square_rejects_non_identity_e() {
        let f = fold(3);
        let u = LsMap::identity(f.domain().clone());
        let v = LsMap::identity(f.codomain().clone());
        let shift = LsMap::new(
            f.domain().clone(),
            f.domain().clone(),
            (0..7).map(|i| (i + 1).min(6)).collect(),
        )
        .unwrap();
        let m = f.clone();
        assert!(matches!(
            verify_fill_square(&u, &v, &shift, &shift, &m, &m, &[q(1)], q(0)),
            Err(Error::NotComposable(_))
        ));
    }
}

//! Maps between finite windows and their quantitative moduli.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;
use crate::table::{Axis, ResponseTable};

/// A point map between two finite windows.
#[derive(Clone, Debug)]
pub struct LsMap<T> {
    domain: Arc<FiniteMetricSpace<T>>,
    codomain: Arc<FiniteMetricSpace<T>>,
    values: Vec<usize>,
    fibers: OnceLock<Vec<Vec<usize>>>,
}

impl<T: Scalar> LsMap<T> {
    pub fn new(
        domain: Arc<FiniteMetricSpace<T>>,
        codomain: Arc<FiniteMetricSpace<T>>,
        values: Vec<usize>,
    ) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Parse(format!(
                "map has {} values for a domain of {} points",
                values.len(),
                domain.len()
            )));
        }
        for &v in &values {
            codomain.check_index(v)?;
        }
        Ok(Self {
            domain,
            codomain,
            values,
            fibers: OnceLock::new(),
        })
    }

    pub fn identity(space: Arc<FiniteMetricSpace<T>>) -> Self {
        let values = (0..space.len()).collect();
        Self::new(space.clone(), space, values).expect("identity is total")
    }

    pub fn constant(
        domain: Arc<FiniteMetricSpace<T>>,
        codomain: Arc<FiniteMetricSpace<T>>,
        target: usize,
    ) -> Result<Self> {
        let values = vec![target; domain.len()];
        Self::new(domain, codomain, values)
    }

    pub fn domain(&self) -> &Arc<FiniteMetricSpace<T>> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FiniteMetricSpace<T>> {
        &self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &LsMap<T>) -> Result<LsMap<T>> {
        if !self.codomain.same_as(&next.domain) {
            return Err(Error::NotComposable(
                "codomain of the first map is not the domain of the second".into(),
            ));
        }
        let values = self.values.iter().map(|&y| next.values[y]).collect();
        LsMap::new(self.domain.clone(), next.codomain.clone(), values)
    }

    /// The same point map with a different domain metric on the same points.
    pub fn with_domain(&self, domain: Arc<FiniteMetricSpace<T>>) -> Result<LsMap<T>> {
        LsMap::new(domain, self.codomain.clone(), self.values.clone())
    }

    /// Point preimages, indexed by codomain point.
    pub fn fibers(&self) -> &[Vec<usize>] {
        self.fibers.get_or_init(|| {
            let mut fibers = vec![Vec::new(); self.codomain.len()];
            for (x, &y) in self.values.iter().enumerate() {
                fibers[y].push(x);
            }
            fibers
        })
    }

    /// Sorted preimage of a codomain subset.
    pub fn preimage(&self, set: &[usize]) -> Vec<usize> {
        let fibers = self.fibers();
        let mut out: Vec<usize> = set.iter().flat_map(|&y| fibers[y].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `f⁻¹(B(y, s))`.
    pub fn preimage_ball(&self, y: usize, s: T) -> Vec<usize> {
        self.preimage(&self.codomain.ball(y, s))
    }

    /// Sorted image of a domain subset.
    pub fn image(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&x| self.values[x]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_injective(&self) -> bool {
        self.fibers().iter().all(|f| f.len() <= 1)
    }
}

/// `ρ(r) = max { d_Y(f x, f x') : d_X(x, x') <= r }`.
pub fn control_modulus<T: Scalar>(f: &LsMap<T>, r_grid: &[T]) -> ResponseTable<T> {
    let axis = Axis {
        name: "r".into(),
        grid: r_grid.to_vec(),
    };
    ResponseTable::build(vec![axis], |p| modulus_at(f, p[0]))
}

pub fn modulus_at<T: Scalar>(f: &LsMap<T>, r: T) -> Extended<T> {
    let x_space = f.domain();
    let y_space = f.codomain();
    (0..x_space.len())
        .into_par_iter()
        .map(|x| {
            let fx = f.apply(x);
            x_space
                .within(x, r)
                .iter()
                .map(|&x2| y_space.dist(fx, f.apply(x2 as usize)))
                .fold(Extended::zero(), Extended::max)
        })
        .reduce(Extended::zero, Extended::max)
}

/// `sup_x d(f x, g x)`.
pub fn closeness_gap<T: Scalar>(f: &LsMap<T>, g: &LsMap<T>) -> Result<Extended<T>> {
    if !f.domain().same_as(g.domain()) || !f.codomain().same_as(g.codomain()) {
        return Err(Error::MismatchedSpaces);
    }
    let y = f.codomain();
    Ok((0..f.domain().len())
        .map(|x| y.dist(f.apply(x), g.apply(x)))
        .fold(Extended::zero(), Extended::max))
}

/// `max_y min_x d(y, f x)`; `0` iff every codomain point is hit at distance 0.
pub fn surjectivity_defect<T: Scalar>(f: &LsMap<T>) -> Extended<T> {
    let image = f.image(&(0..f.domain().len()).collect::<Vec<_>>());
    let y = f.codomain();
    (0..y.len())
        .map(|p| y.dist_to_set(p, &image))
        .fold(Extended::zero(), Extended::max)
}

/// `E(s) = max_y diam f⁻¹(B(y, s))`.
pub fn embedding_response<T: Scalar>(f: &LsMap<T>, s_grid: &[T]) -> ResponseTable<T> {
    let axis = Axis {
        name: "s".into(),
        grid: s_grid.to_vec(),
    };
    ResponseTable::build(vec![axis], |p| {
        (0..f.codomain().len())
            .map(|y| f.domain().diameter_of(&f.preimage_ball(y, p[0])))
            .fold(Extended::zero(), Extended::max)
    })
}

/// `P(s) = diam f⁻¹(B(basepoint_Y, s))`.
pub fn properness_response<T: Scalar>(f: &LsMap<T>, s_grid: &[T]) -> Result<ResponseTable<T>> {
    if f.domain().basepoint().is_none() {
        return Err(Error::MissingBasepoint("domain"));
    }
    let base = f
        .codomain()
        .basepoint()
        .ok_or(Error::MissingBasepoint("codomain"))?;
    let axis = Axis {
        name: "s".into(),
        grid: s_grid.to_vec(),
    };
    Ok(ResponseTable::build(vec![axis], |p| {
        f.domain().diameter_of(&f.preimage_ball(base, p[0]))
    }))
}

/// `A × C` with the max metric; point `(a, c)` has index `a * |C| + c`.
pub fn product_space<T: Scalar>(
    a: &FiniteMetricSpace<T>,
    c: &FiniteMetricSpace<T>,
) -> FiniteMetricSpace<T> {
    let nc = c.len();
    let labels = (0..a.len() * nc)
        .map(|k| format!("({},{})", a.label(k / nc), c.label(k % nc)))
        .collect();
    let base = match (a.basepoint(), c.basepoint()) {
        (Some(ba), Some(bc)) => Some(ba * nc + bc),
        _ => None,
    };
    FiniteMetricSpace::from_fn_trusted(labels, base, |i, j| {
        a.dist(i / nc, j / nc).max(c.dist(i % nc, j % nc))
    })
}

/// The subspace `{(a, c) : d_B(h a, f c) <= S}` of `A × C` with its
/// projections and its inclusion into the product.
#[derive(Clone, Debug)]
pub struct FiberProduct<T> {
    pub space: Arc<FiniteMetricSpace<T>>,
    pub product: Arc<FiniteMetricSpace<T>>,
    pub pairs: Vec<(usize, usize)>,
    /// Projection to `A`.
    pub to_a: LsMap<T>,
    /// Projection to `C`.
    pub to_c: LsMap<T>,
    pub inclusion: LsMap<T>,
}

pub fn scaled_fiber_product<T: Scalar>(
    h: &LsMap<T>,
    f: &LsMap<T>,
    witness: T,
) -> Result<FiberProduct<T>> {
    if !h.codomain().same_as(f.codomain()) {
        return Err(Error::NotComposable("fiber product needs a common codomain".into()));
    }
    let a = h.domain().clone();
    let c = f.domain().clone();
    let b = h.codomain();
    let product = Arc::new(product_space(&a, &c));
    let nc = c.len();
    let mut pairs = Vec::new();
    for ai in 0..a.len() {
        for ci in 0..nc {
            if b.dist(h.apply(ai), f.apply(ci)).le_scale(witness) {
                pairs.push((ai, ci));
            }
        }
    }
    let indices: Vec<usize> = pairs.iter().map(|&(ai, ci)| ai * nc + ci).collect();
    let space = Arc::new(product.subspace(&indices));
    let to_a = LsMap::new(space.clone(), a, pairs.iter().map(|p| p.0).collect())?;
    let to_c = LsMap::new(space.clone(), c, pairs.iter().map(|p| p.1).collect())?;
    let inclusion = LsMap::new(space.clone(), product.clone(), indices)?;
    Ok(FiberProduct {
        space,
        product,
        pairs,
        to_a,
        to_c,
        inclusion,
    })
}

/// `osc(R, w) = max { |g(x) - g(x')|₁ : d(x, x') <= R, both at distance >= w
/// from the basepoint }`.
pub fn oscillation_profile<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    g: &[(f64, f64)],
    radius: T,
    w_grid: &[T],
) -> Result<ResponseTable<T, f64>> {
    let base = space.basepoint().ok_or(Error::MissingBasepoint("space"))?;
    if g.len() != space.len() {
        return Err(Error::Parse(format!(
            "oscillation input has {} values for {} points",
            g.len(),
            space.len()
        )));
    }
    let axis = Axis {
        name: "w".into(),
        grid: w_grid.to_vec(),
    };
    let far = |x: usize, w: T| space.dist(base, x) >= Extended::Finite(w);
    Ok(ResponseTable::build(vec![axis], |p| {
        let w = p[0];
        let mut best = 0.0f64;
        for x in (0..space.len()).filter(|&x| far(x, w)) {
            for &x2 in space.within(x, radius) {
                let x2 = x2 as usize;
                if far(x2, w) {
                    let d = (g[x].0 - g[x2].0).abs() + (g[x].1 - g[x2].1).abs();
                    best = best.max(d);
                }
            }
        }
        best
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn q(v: i64) -> Rational64 {
        Rational64::from_integer(v)
    }

    fn fin(v: i64) -> Extended<Rational64> {
        Extended::Finite(q(v))
    }

    fn window(lo: i64, hi: i64) -> Arc<FiniteMetricSpace<Rational64>> {
        Arc::new(FiniteMetricSpace::integer_window(lo, hi))
    }

    fn grid(values: &[i64]) -> Vec<Rational64> {
        values.iter().map(|&v| q(v)).collect()
    }

    #[test]
    fn modulus_examples() {
        let x = window(0, 10);
        let id = LsMap::identity(x.clone());
        let rho = control_modulus(&id, &grid(&[0, 1, 3, 20]));
        assert_eq!(rho.cells(), &[fin(0), fin(1), fin(3), fin(10)]);

        let y = window(0, 20);
        let double = LsMap::new(x.clone(), y.clone(), (0..=10).map(|n| 2 * n).collect()).unwrap();
        let rho = control_modulus(&double, &grid(&[1, 3]));
        assert_eq!(rho.cells(), &[fin(2), fin(6)]);

        let constant = LsMap::constant(x.clone(), y, 4).unwrap();
        let rho = control_modulus(&constant, &grid(&[0, 5]));
        assert_eq!(rho.cells(), &[fin(0), fin(0)]);
    }

    #[test]
    fn closeness_examples() {
        let x = window(0, 10);
        let id = LsMap::identity(x.clone());
        assert_eq!(closeness_gap(&id, &id).unwrap(), fin(0));
        let shift = LsMap::new(x.clone(), x.clone(), (0..=10).map(|n| (n + 1).min(10)).collect())
            .unwrap();
        assert_eq!(closeness_gap(&id, &shift).unwrap(), fin(1));
        let zero = LsMap::constant(x.clone(), x.clone(), 0).unwrap();
        assert_eq!(closeness_gap(&id, &zero).unwrap(), fin(10));

        let other = LsMap::identity(window(0, 3));
        assert!(matches!(closeness_gap(&id, &other), Err(Error::MismatchedSpaces)));
    }

    #[test]
    fn surjectivity_examples() {
        let y = window(0, 20);
        assert_eq!(surjectivity_defect(&LsMap::identity(y.clone())), fin(0));
        let evens: Vec<i64> = (0..=10).map(|n| 2 * n).collect();
        let x = Arc::new(FiniteMetricSpace::integer_set(&evens));
        let inclusion = LsMap::new(x, y.clone(), (0..=10).map(|n| 2 * n).collect()).unwrap();
        assert_eq!(surjectivity_defect(&inclusion), fin(1));
        let point = window(0, 0);
        let zero = LsMap::new(point, y, vec![0]).unwrap();
        assert_eq!(surjectivity_defect(&zero), fin(20));
    }

    #[test]
    fn embedding_examples() {
        let x = window(0, 30);
        let id = LsMap::identity(x.clone());
        let e = embedding_response(&id, &grid(&[0, 1, 2, 5]));
        for (p, v) in e.rows() {
            assert!(*v <= Extended::Finite(p[0] * q(2)));
        }
        let pt = window(0, 0);
        let constant = LsMap::constant(x.clone(), pt, 0).unwrap();
        assert_eq!(embedding_response(&constant, &grid(&[0])).cells(), &[fin(30)]);
        let y = window(0, 10);
        let third = LsMap::new(x, y, (0..=30).map(|n| n / 3).collect()).unwrap();
        assert_eq!(embedding_response(&third, &grid(&[0])).cells(), &[fin(2)]);
    }

    #[test]
    fn properness_examples() {
        let x = window(0, 12);
        let id = LsMap::identity(x.clone());
        let p = properness_response(&id, &grid(&[0, 3, 20])).unwrap();
        assert_eq!(p.cells(), &[fin(0), fin(3), fin(12)]);
        let constant = LsMap::constant(x.clone(), x.clone(), 0).unwrap();
        assert_eq!(properness_response(&constant, &grid(&[0])).unwrap().cells(), &[fin(12)]);
        // Nothing maps near the basepoint 0 of the codomain.
        let far = LsMap::constant(x.clone(), x.clone(), 12).unwrap();
        assert_eq!(properness_response(&far, &grid(&[2])).unwrap().cells(), &[fin(0)]);

        let no_base = Arc::new(
            FiniteMetricSpace::integer_window(0, 3)
                .with_basepoint(None)
                .unwrap(),
        );
        let m = LsMap::identity(no_base);
        assert!(matches!(
            properness_response(&m, &grid(&[0])),
            Err(Error::MissingBasepoint(_))
        ));
    }

    #[test]
    fn product_examples() {
        let pt = FiniteMetricSpace::<Rational64>::integer_window(0, 0);
        let c = FiniteMetricSpace::integer_window(0, 5);
        let pc = product_space(&pt, &c);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(pc.dist(i, j), c.dist(i, j));
            }
        }
        let a = FiniteMetricSpace::<Rational64>::integer_window(0, 2);
        let sq = product_space(&a, &a);
        assert_eq!(sq.dist(0, 2 * 3 + 1), fin(2));
        let b = FiniteMetricSpace::integer_window(0, 7);
        assert_eq!(product_space(&a, &b).diameter(), fin(7));
    }

    #[test]
    fn fiber_product_examples() {
        let z = window(-5, 5);
        let pt = window(0, 0);
        let h = LsMap::new(pt, z.clone(), vec![5]).unwrap();
        let id = LsMap::identity(z.clone());
        let fp = scaled_fiber_product(&h, &id, q(2)).unwrap();
        let cs: Vec<usize> = fp.pairs.iter().map(|p| p.1).collect();
        assert_eq!(cs, vec![3, 4, 5, 6, 7]);

        let diag = scaled_fiber_product(&id, &id, q(0)).unwrap();
        assert_eq!(diag.space.len(), z.len());
        for i in 0..z.len() {
            for j in 0..z.len() {
                assert_eq!(diag.space.dist(i, j), z.dist(i, j));
            }
        }

        let x = window(-10, 10);
        let y = window(0, 10);
        let fold = LsMap::new(x.clone(), y.clone(), (-10i64..=10).map(|n| n.unsigned_abs() as usize).collect())
            .unwrap();
        let fp = scaled_fiber_product(&LsMap::identity(y), &fold, q(0)).unwrap();
        assert_eq!(fp.space.len(), 21);
        assert_eq!(fp.space.diameter(), fin(20));
        for &(a, c) in &fp.pairs {
            assert_eq!(a, fold.apply(c));
        }
        let hg = fp.to_a.then(&LsMap::identity(window(0, 10))).unwrap();
        let fj = fp.to_c.then(&fold).unwrap();
        // Both land in the same codomain window by construction.
        let gap = (0..fp.space.len())
            .map(|p| fold.codomain().dist(hg.apply(p), fj.apply(p)))
            .fold(Extended::zero(), Extended::max);
        assert_eq!(gap, fin(0));
    }

    #[test]
    fn oscillation_examples() {
        let x = FiniteMetricSpace::<f64>::integer_window(0, 40);
        let w_grid: Vec<f64> = vec![0.0, 5.0, 10.0, 20.0];
        let constant = vec![(3.0, 1.0); x.len()];
        let osc = oscillation_profile(&x, &constant, 1.0, &w_grid).unwrap();
        assert!(osc.cells().iter().all(|&v| v == 0.0));

        let parity: Vec<(f64, f64)> = (0..=40).map(|n| ((n % 2) as f64, 0.0)).collect();
        let osc = oscillation_profile(&x, &parity, 1.0, &w_grid).unwrap();
        assert!(osc.cells().iter().all(|&v| v == 1.0));

        let log: Vec<(f64, f64)> = (0..=40).map(|n| ((1.0 + n as f64).ln(), 0.0)).collect();
        let osc = oscillation_profile(&x, &log, 1.0, &w_grid).unwrap();
        for (p, &v) in osc.rows() {
            let expected = (1.0 + 1.0 / (1.0 + p[0])).ln();
            assert!((v - expected).abs() < 1e-12, "w={} got {v}", p[0]);
        }
    }
}

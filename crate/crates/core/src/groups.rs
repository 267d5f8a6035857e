//! Finitely generated groups with canonical forms, word-metric balls and
//! homomorphisms between them.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::components::family_components;
use crate::cover::ScaledCover;
use crate::error::{Error, Result};
use crate::light::light_response;
use crate::maps::{embedding_response, LsMap};
use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;
use crate::table::ResponseTable;

/// Default cap on the number of elements in a word ball.
pub const BALL_CAP: usize = 200_000;
/// Default cap for subgroup closure in the local finiteness probe.
pub const CLOSURE_CAP: usize = 100_000;
/// Largest ball whose full distance matrix is materialized.
pub const DENSE_LIMIT: usize = 4_096;

/// A group element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Coordinates in `Zⁿ`.
    Zn(Vec<i64>),
    /// Freely reduced word; letter `±(i + 1)` is generator `i` or its inverse.
    Free(Vec<i32>),
    /// Lit lamps (sorted) and the lamplighter position.
    Lamp { lamps: Vec<i64>, pos: i64 },
    /// Images of `0..degree`.
    Perm(Vec<u32>),
    Product(Vec<Element>),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Zn(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            Element::Free(w) if w.is_empty() => write!(f, "e"),
            Element::Free(w) => {
                for &l in w {
                    let base = (b'a' + ((l.unsigned_abs() - 1) % 26) as u8) as char;
                    if l > 0 {
                        write!(f, "{base}")?;
                    } else {
                        write!(f, "{}", base.to_ascii_uppercase())?;
                    }
                }
                Ok(())
            }
            Element::Lamp { lamps, pos } => {
                let parts: Vec<String> = lamps.iter().map(i64::to_string).collect();
                write!(f, "[{}]@{}", parts.join(","), pos)
            }
            Element::Perm(p) => {
                let parts: Vec<String> = p.iter().map(u32::to_string).collect();
                write!(f, "<{}>", parts.join(","))
            }
            Element::Product(parts) => {
                let parts: Vec<String> = parts.iter().map(Element::to_string).collect();
                write!(f, "({})", parts.join(";"))
            }
        }
    }
}

/// A finite permutation group given by generators, with its Cayley table of
/// word lengths.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Vec<u32>>,
    elements: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    length: Vec<u32>,
    /// BFS tree: parent element and the base generator step `(index, inverse)`.
    parent: Vec<Option<(usize, usize, bool)>>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Vec<u32>>) -> Result<Self> {
        for g in &gens {
            let mut seen = vec![false; degree];
            if g.len() != degree
                || g.iter().any(|&i| {
                    let bad = i as usize >= degree || seen[i as usize];
                    if !bad {
                        seen[i as usize] = true;
                    }
                    bad
                })
            {
                return Err(Error::InvalidGroup(format!(
                    "{g:?} is not a permutation of 0..{degree}"
                )));
            }
        }
        let identity: Vec<u32> = (0..degree as u32).collect();
        let steps: Vec<(usize, bool, Vec<u32>)> = gens
            .iter()
            .enumerate()
            .flat_map(|(k, g)| [(k, false, g.clone()), (k, true, perm_inverse(g))])
            .collect();
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut length = vec![0u32];
        let mut parent = vec![None];
        let mut head = 0;
        while head < elements.len() {
            let current = elements[head].clone();
            for (k, inv, step) in &steps {
                let next = perm_compose(&current, step);
                if !index.contains_key(&next) {
                    if elements.len() >= BALL_CAP {
                        return Err(Error::InvalidGroup(format!(
                            "permutation group exceeds {BALL_CAP} elements"
                        )));
                    }
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                    length.push(length[head] + 1);
                    parent.push(Some((head, *k, *inv)));
                }
            }
            head += 1;
        }
        Ok(Self {
            degree,
            gens,
            elements,
            index,
            length,
            parent,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base_generators(&self) -> &[Vec<u32>] {
        &self.gens
    }
}

/// `(p · q)(i) = p(q(i))`: apply `q` first.
fn perm_compose(p: &[u32], q: &[u32]) -> Vec<u32> {
    q.iter().map(|&i| p[i as usize]).collect()
}

fn perm_inverse(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        inv[pi as usize] = i as u32;
    }
    inv
}

/// A builtin group with its standard finite generating set.
#[derive(Clone, Debug)]
pub enum Group {
    /// `Zⁿ` with the unit vectors.
    Zn(usize),
    /// Free group on `k` letters.
    Free(usize),
    /// `⊕Z/2 ⋊ Z` with `t` (move) and `a` (toggle the lamp at the position).
    Lamplighter,
    Perm(Arc<PermGroup>),
    Product(Vec<Group>),
}

impl Group {
    pub fn identity(&self) -> Element {
        match self {
            Group::Zn(n) => Element::Zn(vec![0; *n]),
            Group::Free(_) => Element::Free(Vec::new()),
            Group::Lamplighter => Element::Lamp {
                lamps: Vec::new(),
                pos: 0,
            },
            Group::Perm(p) => Element::Perm((0..p.degree as u32).collect()),
            Group::Product(gs) => Element::Product(gs.iter().map(Group::identity).collect()),
        }
    }

    /// Checks that `x` is a canonical element of this group.
    pub fn validate(&self, x: &Element) -> Result<()> {
        let ok = match (self, x) {
            (Group::Zn(n), Element::Zn(v)) => v.len() == *n,
            (Group::Free(k), Element::Free(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *k)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (Group::Lamplighter, Element::Lamp { lamps, .. }) => lamps.windows(2).all(|p| p[0] < p[1]),
            (Group::Perm(p), Element::Perm(v)) => p.index.contains_key(v),
            (Group::Product(gs), Element::Product(parts)) => {
                return if gs.len() == parts.len() {
                    gs.iter().zip(parts).try_for_each(|(g, x)| g.validate(x))
                } else {
                    Err(Error::InvalidGroup(format!("{x} has the wrong number of factors")))
                };
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGroup(format!("{x} is not an element of this group")))
        }
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        match (self, a, b) {
            (Group::Zn(_), Element::Zn(x), Element::Zn(y)) => {
                Element::Zn(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (Group::Free(_), Element::Free(x), Element::Free(y)) => {
                let mut out = x.clone();
                for &l in y {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Element::Free(out)
            }
            (
                Group::Lamplighter,
                Element::Lamp { lamps: f, pos: p },
                Element::Lamp { lamps: g, pos: q },
            ) => {
                let shifted: Vec<i64> = g.iter().map(|s| s + p).collect();
                Element::Lamp {
                    lamps: symmetric_difference(f, &shifted),
                    pos: p + q,
                }
            }
            (Group::Perm(_), Element::Perm(x), Element::Perm(y)) => Element::Perm(perm_compose(x, y)),
            (Group::Product(gs), Element::Product(xs), Element::Product(ys)) => Element::Product(
                gs.iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(g, (x, y))| g.multiply(x, y))
                    .collect(),
            ),
            _ => panic!("elements {a} and {b} do not belong to the same group"),
        }
    }

    pub fn inverse(&self, a: &Element) -> Element {
        match (self, a) {
            (Group::Zn(_), Element::Zn(x)) => Element::Zn(x.iter().map(|v| -v).collect()),
            (Group::Free(_), Element::Free(w)) => Element::Free(w.iter().rev().map(|l| -l).collect()),
            (Group::Lamplighter, Element::Lamp { lamps, pos }) => Element::Lamp {
                lamps: lamps.iter().map(|s| s - pos).collect(),
                pos: -pos,
            },
            (Group::Perm(_), Element::Perm(x)) => Element::Perm(perm_inverse(x)),
            (Group::Product(gs), Element::Product(xs)) => {
                Element::Product(gs.iter().zip(xs).map(|(g, x)| g.inverse(x)).collect())
            }
            _ => panic!("element {a} does not belong to this group"),
        }
    }

    /// The generators homomorphisms are specified on, in a fixed order.
    pub fn base_generators(&self) -> Vec<Element> {
        match self {
            Group::Zn(n) => (0..*n)
                .map(|i| {
                    let mut v = vec![0; *n];
                    v[i] = 1;
                    Element::Zn(v)
                })
                .collect(),
            Group::Free(k) => (1..=*k as i32).map(|l| Element::Free(vec![l])).collect(),
            Group::Lamplighter => vec![
                Element::Lamp {
                    lamps: Vec::new(),
                    pos: 1,
                },
                Element::Lamp {
                    lamps: vec![0],
                    pos: 0,
                },
            ],
            Group::Perm(p) => p.gens.iter().cloned().map(Element::Perm).collect(),
            Group::Product(gs) => {
                let ids: Vec<Element> = gs.iter().map(Group::identity).collect();
                gs.iter()
                    .enumerate()
                    .flat_map(|(i, g)| {
                        let ids = ids.clone();
                        g.base_generators().into_iter().map(move |x| {
                            let mut parts = ids.clone();
                            parts[i] = x;
                            Element::Product(parts)
                        })
                    })
                    .collect()
            }
        }
    }

    /// Base generators and their inverses, distinct and without the identity.
    pub fn generators(&self) -> Vec<Element> {
        let id = self.identity();
        let mut out: Vec<Element> = Vec::new();
        for g in self.base_generators() {
            for x in [self.inverse(&g), g] {
                if x != id && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out.sort();
        out
    }

    /// Exact word length with respect to [`Group::generators`].
    pub fn word_length(&self, x: &Element) -> u64 {
        match (self, x) {
            (Group::Zn(_), Element::Zn(v)) => v.iter().map(|c| c.unsigned_abs()).sum(),
            (Group::Free(_), Element::Free(w)) => w.len() as u64,
            (Group::Lamplighter, Element::Lamp { lamps, pos }) => {
                let lo = lamps.first().map_or(0, |&s| s.min(0)).min(*pos);
                let hi = lamps.last().map_or(0, |&s| s.max(0)).max(*pos);
                // Sweep left first or right first, then walk to the final position.
                let left_first = -lo + (hi - lo) + (hi - pos);
                let right_first = hi + (hi - lo) + (pos - lo);
                lamps.len() as u64 + left_first.min(right_first) as u64
            }
            (Group::Perm(p), Element::Perm(v)) => p.length[p.index[v]] as u64,
            (Group::Product(gs), Element::Product(xs)) => {
                gs.iter().zip(xs).map(|(g, x)| g.word_length(x)).sum()
            }
            _ => panic!("element {x} does not belong to this group"),
        }
    }

    /// A word in the base generators evaluating to `x`: `(generator, inverted)`.
    pub fn express(&self, x: &Element) -> Vec<(usize, bool)> {
        match (self, x) {
            (Group::Zn(_), Element::Zn(v)) => v
                .iter()
                .enumerate()
                .flat_map(|(i, &c)| std::iter::repeat((i, c < 0)).take(c.unsigned_abs() as usize))
                .collect(),
            (Group::Free(_), Element::Free(w)) => w
                .iter()
                .map(|&l| (l.unsigned_abs() as usize - 1, l < 0))
                .collect(),
            (Group::Lamplighter, Element::Lamp { lamps, pos }) => {
                let mut word = Vec::new();
                let walk = |word: &mut Vec<(usize, bool)>, k: i64| {
                    word.extend(std::iter::repeat((0, k < 0)).take(k.unsigned_abs() as usize));
                };
                let mut at = 0;
                for &s in lamps {
                    walk(&mut word, s - at);
                    word.push((1, false));
                    at = s;
                }
                walk(&mut word, pos - at);
                word
            }
            (Group::Perm(p), Element::Perm(v)) => {
                let mut word = Vec::new();
                let mut k = p.index[v];
                while let Some((prev, g, inv)) = p.parent[k] {
                    word.push((g, inv));
                    k = prev;
                }
                word.reverse();
                word
            }
            (Group::Product(gs), Element::Product(xs)) => {
                let mut offset = 0;
                let mut word = Vec::new();
                for (g, x) in gs.iter().zip(xs) {
                    word.extend(g.express(x).into_iter().map(|(i, inv)| (i + offset, inv)));
                    offset += g.base_generators().len();
                }
                word
            }
            _ => panic!("element {x} does not belong to this group"),
        }
    }

    /// Word distance `|x⁻¹ y|`.
    pub fn distance(&self, x: &Element, y: &Element) -> u64 {
        self.word_length(&self.multiply(&self.inverse(x), y))
    }
}

fn symmetric_difference(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(*x);
                i += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (_, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Elements of word length at most `r`, in breadth-first order.
pub fn ball_elements(group: &Group, r: u64, cap: usize) -> Result<Vec<Element>> {
    let gens = group.generators();
    let id = group.identity();
    let mut seen: HashSet<Element> = HashSet::from([id.clone()]);
    let mut out = vec![id];
    let mut layer_start = 0;
    for _ in 0..r {
        let layer_end = out.len();
        for k in layer_start..layer_end {
            for g in &gens {
                let next = group.multiply(&out[k], g);
                if seen.insert(next.clone()) {
                    out.push(next);
                    if out.len() > cap {
                        return Err(Error::CapExceeded {
                            count: out.len(),
                            cap,
                        });
                    }
                }
            }
        }
        if out.len() == layer_end {
            break;
        }
        layer_start = layer_end;
    }
    Ok(out)
}

/// A word-metric ball materialized as a finite metric space.
#[derive(Clone, Debug)]
pub struct WordBall<T> {
    pub radius: u64,
    pub elements: Vec<Element>,
    index: HashMap<Element, usize>,
    /// Basepoint is the identity (index 0).
    pub space: Arc<FiniteMetricSpace<T>>,
}

impl<T: Scalar> WordBall<T> {
    pub fn position(&self, x: &Element) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The ball of radius `r` with the exact word metric `d(x, y) = |x⁻¹ y|`.
pub fn word_ball<T: Scalar>(group: &Group, r: u64, cap: usize) -> Result<WordBall<T>> {
    let elements = ball_elements(group, r, cap)?;
    let n = elements.len();
    if n > DENSE_LIMIT {
        return Err(Error::CapExceeded {
            count: n,
            cap: DENSE_LIMIT,
        });
    }
    let inverses: Vec<Element> = elements.iter().map(|x| group.inverse(x)).collect();
    let flat: Vec<u64> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i < j {
                group.word_length(&group.multiply(&inverses[i], &elements[j]))
            } else {
                0
            }
        })
        .collect();
    let labels = elements.iter().map(Element::to_string).collect();
    let space = FiniteMetricSpace::from_fn_trusted(labels, Some(0), |i, j| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Extended::from_count(flat[a * n + b])
    });
    let index = elements.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    Ok(WordBall {
        radius: r,
        elements,
        index,
        space: Arc::new(space),
    })
}

/// Blocks `{x · F'} ∩ window` for every `x` in the window.
pub fn group_cover<T: Scalar>(group: &Group, ball: &WordBall<T>, fset: &[Element]) -> ScaledCover<T> {
    let blocks = ball
        .elements
        .iter()
        .map(|x| {
            fset.iter()
                .filter_map(|f| ball.position(&group.multiply(x, f)))
                .collect()
        })
        .collect();
    ScaledCover::new(&ball.space, blocks, None)
}

/// Whether the window is a single component under the `{x · F'}` relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Connectivity {
    pub connected: bool,
    pub components: usize,
}

pub fn connectivity_generators(
    group: &Group,
    fset: &[Element],
    window_r: u64,
    cap: usize,
) -> Result<Connectivity> {
    for f in fset {
        group.validate(f)?;
    }
    let ball = word_ball::<i64>(group, window_r, cap)?;
    let cover = group_cover(group, &ball, fset);
    let all: Vec<usize> = (0..ball.len()).collect();
    let components = family_components(&all, cover.blocks()).len();
    Ok(Connectivity {
        connected: components == 1,
        components,
    })
}

/// A homomorphism given by the images of the source's base generators.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: Group,
    pub target: Group,
    images: Vec<Element>,
}

/// Radius of the source ball on which homomorphism relations are checked.
const RELATION_CHECK_RADIUS: u64 = 4;
const RELATION_CHECK_CAP: usize = 20_000;

impl GroupHom {
    pub fn new(source: Group, target: Group, images: Vec<Element>) -> Result<Self> {
        let gens = source.base_generators();
        if images.len() != gens.len() {
            return Err(Error::InvalidHom(format!(
                "{} generator images for {} generators",
                images.len(),
                gens.len()
            )));
        }
        for img in &images {
            target.validate(img)?;
        }
        let hom = Self {
            source,
            target,
            images,
        };
        hom.check_relations()?;
        Ok(hom)
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn apply(&self, x: &Element) -> Element {
        let inverses: Vec<Element> = self.images.iter().map(|g| self.target.inverse(g)).collect();
        self.source
            .express(x)
            .into_iter()
            .fold(self.target.identity(), |acc, (g, inv)| {
                let step = if inv { &inverses[g] } else { &self.images[g] };
                self.target.multiply(&acc, step)
            })
    }

    /// Checks `h(x · g) = h(x) h(g)` on a source ball, which catches images
    /// violating the relations of the source presentation.
    fn check_relations(&self) -> Result<()> {
        let mut radius = RELATION_CHECK_RADIUS;
        let ball = loop {
            match ball_elements(&self.source, radius, RELATION_CHECK_CAP) {
                Ok(b) => break b,
                Err(_) if radius > 1 => radius -= 1,
                Err(e) => return Err(e),
            }
        };
        let gens = self.source.base_generators();
        for x in &ball {
            let hx = self.apply(x);
            for (k, g) in gens.iter().enumerate() {
                let lhs = self.apply(&self.source.multiply(x, g));
                let rhs = self.target.multiply(&hx, &self.images[k]);
                if lhs != rhs {
                    return Err(Error::InvalidHom(format!(
                        "h({x} * {g}) = {lhs} but h({x}) h({g}) = {rhs}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest word length of a generator image (at least 1).
    pub fn stretch(&self) -> u64 {
        self.images
            .iter()
            .map(|x| self.target.word_length(x))
            .max()
            .unwrap_or(0)
            .max(1)
    }
}

/// `{ x : |x| <= r, h(x) = e }`.
pub fn kernel_ball(hom: &GroupHom, r: u64, cap: usize) -> Result<Vec<Element>> {
    let id = hom.target.identity();
    Ok(ball_elements(&hom.source, r, cap)?
        .into_iter()
        .filter(|x| hom.apply(x) == id)
        .collect())
}

/// Verdict of closing a kernel ball under multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    /// The generated subgroup has this many elements.
    Finite(usize),
    /// Closure passed the cap; the count reached is reported.
    CapExceeded(usize),
}

/// Closes the nontrivial kernel elements of word length at most `r` under
/// multiplication. The closure passes the cap at more than `cap` elements or
/// at an element longer than `sqrt(cap)`, which bounds memory for infinite
/// cyclic closures.
pub fn local_finiteness_probe(hom: &GroupHom, r: u64, cap: usize) -> Result<Probe> {
    let max_length = (cap as f64).sqrt() as u64;
    let id = hom.source.identity();
    let gens: Vec<Element> = kernel_ball(hom, r, BALL_CAP)?
        .into_iter()
        .filter(|x| *x != id)
        .collect();
    let mut seen: HashSet<Element> = HashSet::from([id.clone()]);
    let mut queue = vec![id];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head].clone();
        head += 1;
        for g in &gens {
            let next = hom.source.multiply(&x, g);
            if seen.insert(next.clone()) {
                if seen.len() > cap || hom.source.word_length(&next) > max_length {
                    return Ok(Probe::CapExceeded(seen.len()));
                }
                queue.push(next);
            }
        }
    }
    Ok(Probe::Finite(seen.len()))
}

/// The map between word balls induced by `hom`: source radius `R` into target
/// radius `R · K`, `K` the largest generator image length.
pub fn induced_map<T: Scalar>(hom: &GroupHom, window_r: u64, cap: usize) -> Result<LsMap<T>> {
    let source = word_ball::<T>(&hom.source, window_r, cap)?;
    let target = word_ball::<T>(&hom.target, window_r * hom.stretch(), cap)?;
    let values = source
        .elements
        .iter()
        .map(|x| {
            let y = hom.apply(x);
            target
                .position(&y)
                .ok_or_else(|| Error::InvalidHom(format!("image {y} of {x} leaves the target window")))
        })
        .collect::<Result<Vec<usize>>>()?;
    LsMap::new(source.space, target.space, values)
}

pub fn hom_light_window<T: Scalar>(
    hom: &GroupHom,
    window_r: u64,
    r_grid: &[T],
    s_grid: &[T],
    cap: usize,
) -> Result<ResponseTable<T>> {
    let f = induced_map(hom, window_r, cap)?;
    Ok(light_response(&f, r_grid, s_grid))
}

/// Embedding response of a subgroup inclusion on word-ball windows.
pub fn subgroup_window_embedding<T: Scalar>(
    inclusion: &GroupHom,
    window_r: u64,
    s_grid: &[T],
    cap: usize,
) -> Result<ResponseTable<T>> {
    let f = induced_map(inclusion, window_r, cap)?;
    if !f.is_injective() {
        return Err(Error::InvalidHom("inclusion is not injective on the window".into()));
    }
    Ok(embedding_response(&f, s_grid))
}

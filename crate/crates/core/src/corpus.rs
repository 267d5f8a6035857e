//! Builtin maps and homomorphisms, parameterized by window size.

use std::sync::Arc;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::groups::{induced_map, Element, Group, GroupHom, BALL_CAP};
use crate::maps::LsMap;
use crate::scalar::Extended;
use crate::space::FiniteMetricSpace;

type Space = FiniteMetricSpace<Rational64>;

/// Names of the builtin maps between integer windows.
pub const MAP_NAMES: &[&str] = &[
    "identity",
    "constant",
    "fold",
    "proj0",
    "shift",
    "parity",
    "scale2",
    "floor3",
    "inclusion_2z",
];

/// Names of the builtin homomorphisms.
pub const HOM_NAMES: &[&str] = &[
    "lamplighter_to_Z",
    "F2_to_Z",
    "Z_to_Z",
    "2Z_to_Z",
    "Z_to_Z2",
    "a_in_F2",
];

/// A corpus entry: a window family of maps, or a homomorphism whose windows
/// are word balls.
#[derive(Clone, Debug)]
pub enum Entry {
    Map(&'static str),
    Hom(GroupHom),
}

impl Entry {
    /// The map at window size `n`. For homomorphisms `n` is the source ball
    /// radius.
    pub fn at_window(&self, n: u64) -> Result<LsMap<Rational64>> {
        match self {
            Entry::Map(name) => corpus_map(name, n),
            Entry::Hom(h) => induced_map(h, n, BALL_CAP),
        }
    }
}

pub fn corpus(name: &str) -> Result<Entry> {
    if let Some(&n) = MAP_NAMES.iter().find(|&&n| n == name) {
        return Ok(Entry::Map(n));
    }
    corpus_hom(name).map(Entry::Hom)
}

fn window(lo: i64, hi: i64) -> Arc<Space> {
    Arc::new(FiniteMetricSpace::integer_window(lo, hi))
}

/// `[-m..m]²` with the `l¹` metric, row-major in the first coordinate.
pub fn lattice_box(m: i64) -> Space {
    let side = (2 * m + 1) as usize;
    let coord = |k: usize| ((k / side) as i64 - m, (k % side) as i64 - m);
    let labels = (0..side * side)
        .map(|k| {
            let (a, b) = coord(k);
            format!("({a},{b})")
        })
        .collect();
    let base = side * side / 2;
    FiniteMetricSpace::from_fn_trusted(labels, Some(base), |i, j| {
        let (a, b) = (coord(i), coord(j));
        Extended::from_count(a.0.abs_diff(b.0) + a.1.abs_diff(b.1))
    })
}

/// The named builtin map at window size `n` (at least 1).
pub fn corpus_map(name: &str, n: u64) -> Result<LsMap<Rational64>> {
    let n = n.max(1) as i64;
    let nu = n as usize;
    match name {
        "identity" => Ok(LsMap::identity(window(0, n))),
        "constant" => LsMap::constant(window(0, n), window(0, 0), 0),
        "fold" => LsMap::new(
            window(-n, n),
            window(0, n),
            (-n..=n).map(|k| k.unsigned_abs() as usize).collect(),
        ),
        "proj0" => {
            let m = (n / 4).max(1);
            let side = (2 * m + 1) as usize;
            LsMap::new(
                Arc::new(lattice_box(m)),
                window(-m, m),
                (0..side * side).map(|k| k / side).collect(),
            )
        }
        "shift" => LsMap::new(window(0, n), window(0, n), (0..=nu).map(|k| (k + 1).min(nu)).collect()),
        "parity" => LsMap::new(
            window(0, n),
            Arc::new(FiniteMetricSpace::integer_set(&[0, 1])),
            (0..=nu).map(|k| k % 2).collect(),
        ),
        "scale2" => LsMap::new(window(0, n), window(0, 2 * n), (0..=nu).map(|k| 2 * k).collect()),
        "floor3" => LsMap::new(window(0, n), window(0, n / 3), (0..=nu).map(|k| k / 3).collect()),
        "inclusion_2z" => {
            let evens: Vec<i64> = (0..=n).map(|k| 2 * k).collect();
            LsMap::new(
                Arc::new(FiniteMetricSpace::integer_set(&evens)),
                window(0, 2 * n),
                (0..=nu).map(|k| 2 * k).collect(),
            )
        }
        _ => Err(Error::UnknownCorpusEntry(name.to_string())),
    }
}

fn zn(v: &[i64]) -> Element {
    Element::Zn(v.to_vec())
}

/// The named builtin homomorphism.
pub fn corpus_hom(name: &str) -> Result<GroupHom> {
    match name {
        "lamplighter_to_Z" => GroupHom::new(Group::Lamplighter, Group::Zn(1), vec![zn(&[1]), zn(&[0])]),
        "F2_to_Z" => GroupHom::new(Group::Free(2), Group::Zn(1), vec![zn(&[1]), zn(&[0])]),
        "Z_to_Z" => GroupHom::new(Group::Zn(1), Group::Zn(1), vec![zn(&[1])]),
        "2Z_to_Z" => GroupHom::new(Group::Zn(1), Group::Zn(1), vec![zn(&[2])]),
        "Z_to_Z2" => GroupHom::new(Group::Zn(1), Group::Zn(2), vec![zn(&[1, 0])]),
        "a_in_F2" => GroupHom::new(Group::Free(1), Group::Free(2), vec![Element::Free(vec![1])]),
        _ => Err(Error::UnknownCorpusEntry(name.to_string())),
    }
}

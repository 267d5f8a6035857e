//! Coarse geometry on finite metric windows.
//!
//! Every construction works on a finite sample ("window") of a large-scale
//! space and reports scale-indexed response tables; coarse properties are
//! judged by how those tables behave across nested windows.
//!
//! The library is generic over the distance scalar. Graph, explicit and word
//! metrics use exact rationals ([`ExactSpace`]); point clouds use `f64`
//! ([`Space`]).

pub mod asdim;
pub mod components;
pub mod corpus;
pub mod cover;
pub mod error;
pub mod exactness;
pub mod groups;
pub mod io;
pub mod light;
pub mod maps;
pub mod reflection;
pub mod scalar;
pub mod space;
pub mod table;

pub use components::{components_at, component_mesh, Partition};
pub use cover::{ball_cover, is_refinement, star_family, star_set, trivial_extension, Block, ScaledCover};
pub use error::{Error, Result};
pub use maps::LsMap;
pub use scalar::{Extended, Scalar};
pub use space::{FiniteMetricSpace, PointMetric};
pub use table::{Axis, ResponseTable};

pub use num_rational::Rational64;

/// Floating point window.
pub type Space = FiniteMetricSpace<f64>;
/// Exact rational window.
pub type ExactSpace = FiniteMetricSpace<Rational64>;
pub type Map = LsMap<f64>;
pub type ExactMap = LsMap<Rational64>;
pub type Table = ResponseTable<f64>;
pub type ExactTable = ResponseTable<Rational64>;
pub type Cover = ScaledCover<f64>;
pub type ExactCover = ScaledCover<Rational64>;

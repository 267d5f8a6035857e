use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "coarsekit", version, about = "Coarse geometry diagnostics on finite metric windows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Window sizes (ball radii for group verbs), ascending.
    #[arg(long, default_value = "16")]
    pub windows: String,
    /// Output path; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// A map: a builtin corpus name, or three JSON files.
#[derive(Args, Debug, Clone, Default)]
pub struct MapInput {
    /// Builtin corpus map, evaluated at every window.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, requires_all = ["codomain", "values"], conflicts_with = "map")]
    pub domain: Option<PathBuf>,
    #[arg(long)]
    pub codomain: Option<PathBuf>,
    /// JSON file `{"values": [...]}`.
    #[arg(long)]
    pub values: Option<PathBuf>,
}

/// A space: a JSON file, or the domain of a builtin map at every window.
#[derive(Args, Debug, Clone, Default)]
pub struct SpaceInput {
    #[arg(long, conflicts_with = "map")]
    pub space: Option<PathBuf>,
    /// Use the domain of this builtin corpus map.
    #[arg(long)]
    pub map: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Light response L(r, s) of a map.
    LightResponse {
        #[command(flatten)]
        map: MapInput,
        #[arg(long, default_value = "0:4")]
        r: String,
        #[arg(long, default_value = "0:4")]
        s: String,
        #[command(flatten)]
        common: Common,
    },
    /// Least (r, t) per s for the monotonicity criterion.
    MonotoneFrontier {
        #[command(flatten)]
        map: MapInput,
        #[arg(long, default_value = "0:4")]
        s: String,
        #[arg(long, default_value_t = 8)]
        r_bound: u64,
        #[arg(long, default_value_t = 8)]
        t_bound: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Monotone-light factorization; emits the light pseudometric space.
    Factorize {
        #[command(flatten)]
        map: MapInput,
        #[arg(long, default_value_t = 8)]
        n_max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Least r covering every preimage of an s-ball by n sets of diameter r.
    #[command(name = "n-to-1")]
    NTo1 {
        #[command(flatten)]
        map: MapInput,
        #[arg(long, default_value = "0:4")]
        s: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "64")]
        r_bound: String,
        #[command(flatten)]
        common: Common,
    },
    /// Defect of membership in the class inverted by the reflection.
    EiDefect {
        #[command(flatten)]
        map: MapInput,
        #[arg(long, default_value = "0:4")]
        s: String,
        #[arg(long, default_value = "64")]
        r_bound: String,
        #[command(flatten)]
        common: Common,
    },
    /// The dimension-zero reflection I(X) as an explicit metric.
    Reflect {
        #[command(flatten)]
        space: SpaceInput,
        #[arg(long, default_value = "0:8")]
        r: String,
        #[command(flatten)]
        common: Common,
    },
    /// D(r): the largest r-component diameter.
    Asdim0 {
        #[command(flatten)]
        space: SpaceInput,
        #[arg(long, default_value = "0:4")]
        r: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cover coarsening the r-balls with multiplicity at most n + 1.
    AsdimUpper {
        #[command(flatten)]
        space: SpaceInput,
        #[arg(long, default_value = "1:4")]
        r: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Pull a cover of the codomain back along a map.
    TransferCover {
        #[command(flatten)]
        map: MapInput,
        /// JSON array of index arrays on the codomain.
        #[arg(long, conflicts_with = "interval")]
        cover: Option<PathBuf>,
        /// Interval cover `LENGTH:STEP` of an integer codomain.
        #[arg(long)]
        interval: Option<String>,
        #[arg(long, default_value = "1")]
        r: String,
        #[command(flatten)]
        common: Common,
    },
    /// Mesh and star-preimage mesh of a partition of unity.
    PouMesh {
        #[command(flatten)]
        space: SpaceInput,
        #[arg(long, conflicts_with = "tent")]
        pou: Option<PathBuf>,
        /// Radial tents of width 2L around the basepoint.
        #[arg(long)]
        tent: Option<f64>,
        #[arg(long, default_value = "1")]
        r: String,
        #[command(flatten)]
        common: Common,
    },
    /// Transfer a partition of unity on the codomain back along a map.
    PouTransfer {
        #[command(flatten)]
        map: MapInput,
        #[arg(long, conflicts_with = "tent")]
        pou: Option<PathBuf>,
        #[arg(long)]
        tent: Option<f64>,
        #[arg(long, default_value = "1")]
        r: String,
        #[command(flatten)]
        common: Common,
    },
    /// Word-metric ball of a group; windows are radii.
    GroupBall {
        /// Group JSON (file or inline).
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = coarsekit::groups::BALL_CAP)]
        cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Local finiteness probe of a homomorphism's kernel.
    KernelProbe {
        /// Builtin homomorphism name or hom JSON (file or inline).
        #[arg(long)]
        hom: String,
        #[arg(long, default_value = "0:3")]
        r: String,
        #[arg(long, default_value_t = coarsekit::groups::CLOSURE_CAP)]
        closure_cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Light response of a homomorphism on word-ball windows.
    HomLight {
        #[arg(long)]
        hom: String,
        #[arg(long, default_value = "0:2")]
        r: String,
        #[arg(long, default_value = "0:2")]
        s: String,
        #[arg(long, default_value_t = coarsekit::groups::BALL_CAP)]
        cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Embedding response of a subgroup inclusion.
    SubgroupEmbed {
        #[arg(long)]
        hom: String,
        #[arg(long, default_value = "0:4")]
        s: String,
        #[arg(long, default_value_t = coarsekit::groups::BALL_CAP)]
        cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Whether the blocks x·F' connect the window.
    GenConnectivity {
        #[arg(long)]
        group: String,
        /// JSON array of elements (file or inline).
        #[arg(long)]
        fset: String,
        #[arg(long, default_value_t = coarsekit::groups::BALL_CAP)]
        cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Scaled fiber product of two builtin maps with a common codomain.
    FiberProduct {
        #[arg(long)]
        h: String,
        #[arg(long)]
        f: String,
        /// Witness scales S.
        #[arg(long = "scale", default_value = "0:2")]
        scale: String,
        #[arg(long, default_value = "0:4")]
        s: String,
        #[command(flatten)]
        common: Common,
    },
    /// Oscillation profile osc(R, w) of a function to the plane.
    Oscillation {
        #[command(flatten)]
        space: SpaceInput,
        /// `parity`, `log1p`, `constant`, or a JSON file of [a, b] pairs.
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "1")]
        radius: String,
        #[arg(long, default_value = "0:8")]
        w: String,
        #[command(flatten)]
        common: Common,
    },
    /// Quick internal consistency checks.
    Selftest,
}

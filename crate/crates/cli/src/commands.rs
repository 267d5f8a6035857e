//! One function per verb; each fills a [`Report`].

use std::path::Path;

use coarsekit::asdim::{asdim0_response, asdim_upper_at, transfer_cover};
use coarsekit::cover::{cover_radius, multiplicity, ScaledCover};
use coarsekit::exactness::{pou_mesh, star_preimage_mesh, tent_partition, transfer_pou, PartitionOfUnity};
use coarsekit::groups::{
    connectivity_generators, hom_light_window, local_finiteness_probe, subgroup_window_embedding, word_ball, Probe,
};
use coarsekit::io::{parse_pou, pou_to_json, space_to_json};
use coarsekit::light::{factorize, light_mesh, light_response, monotone_frontier, n_to_1_response};
use coarsekit::maps::{closeness_gap, embedding_response, modulus_at, oscillation_profile, scaled_fiber_product};
use coarsekit::reflection::{ei_defect, reflect_0};
use coarsekit::table::CellValue;
use coarsekit::corpus::corpus_map;
use coarsekit::{Extended, FiniteMetricSpace, LsMap, Rational64, ResponseTable, Scalar};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Command, Common, Format};
use crate::error::{CliError, Result};
use crate::grid::{parse_grid, parse_scale, parse_windows};
use crate::input::{json_arg, load_elements, load_group, load_hom, read, MapSet, SpaceSet, Windowed};
use crate::report::{Provenance, Report, Section};

type Q = Rational64;

/// Dispatches a generic per-window function on exact or floating inputs.
macro_rules! dispatch {
    ($set:expr, $kind:ident, $f:ident ( $($arg:expr),* )) => {
        match $set {
            $kind::Exact(items) => $f(&items, $($arg),*),
            $kind::Float(items) => $f(&items, $($arg),*),
        }
    };
}

fn cell_f64<V: CellValue>(v: &V) -> f64 {
    match v.render().as_str() {
        "inf" | "top" => f64::INFINITY,
        text => coarsekit::scalar::parse_scalar::<f64>(text).unwrap_or(f64::NAN),
    }
}

fn table_section<T: Scalar, V: CellValue>(window: &str, table: &ResponseTable<T, V>) -> Section {
    let mut section = Section {
        window: window.to_string(),
        ..Section::default()
    };
    for (point, v) in table.rows() {
        let mut row: Vec<String> = point.iter().map(|x| x.to_string()).collect();
        row.push(v.render());
        section.rows.push(row);
        section.values.push(cell_f64(v));
    }
    section
}

fn opt_render<T: Scalar>(v: Option<T>) -> String {
    v.map_or_else(|| "top".into(), |x| x.to_string())
}

fn window_json(window: &str, key: &str, value: Value) -> Value {
    json!({ "window": window, key: value })
}

/// One artifact for a single window, otherwise a list tagged by window.
fn collect_artifacts(items: Vec<(String, Value)>) -> Value {
    if items.len() == 1 {
        items.into_iter().next().expect("one item").1
    } else {
        Value::Array(items.into_iter().map(|(w, v)| window_json(&w, "result", v)).collect())
    }
}

struct Run {
    report: Report,
    default_format: Format,
}

impl Run {
    fn new(command: &str, common: &Common, inputs: String) -> Self {
        Run {
            report: Report {
                provenance: Provenance {
                    command: command.into(),
                    inputs,
                    grids: Vec::new(),
                    windows: common.windows.clone(),
                },
                ..Report::default()
            },
            default_format: Format::Csv,
        }
    }

    fn grid(mut self, name: &str, text: impl ToString) -> Self {
        self.report.provenance.grids.push((name.into(), text.to_string()));
        self
    }

    fn columns(mut self, names: &[&str]) -> Self {
        self.report.columns = names.iter().map(|s| s.to_string()).collect();
        self
    }
}

/// Runs a verb and returns the rendered output with its destination.
pub fn run(command: Command) -> Result<(String, Option<std::path::PathBuf>)> {
    let (mut run, common) = match command {
        Command::Selftest => return Ok((crate::selftest::run()?, None)),
        other => execute(other)?,
    };
    let sections = &run.report.sections;
    if !sections.is_empty() && sections.iter().all(|s| s.window == "input") {
        run.report.provenance.windows = "input".into();
    }
    let format = common.format.unwrap_or(run.default_format);
    Ok((run.report.render(format), common.output))
}

fn execute(command: Command) -> Result<(Run, Common)> {
    match command {
        Command::LightResponse { map, r, s, common } => {
            let windows = parse_windows(&common.windows)?;
            let mut run = Run::new("light-response", &common, map.describe())
                .grid("r", &r)
                .grid("s", &s)
                .columns(&["r", "s", "L"]);
            run.report.sections = dispatch!(map.load(&windows)?, MapSet, light_sections(&r, &s))?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::MonotoneFrontier {
            map,
            s,
            r_bound,
            t_bound,
            common,
        } => {
            let windows = parse_windows(&common.windows)?;
            let mut run = Run::new("monotone-frontier", &common, map.describe())
                .grid("s", &s)
                .grid("r_bound", r_bound)
                .grid("t_bound", t_bound)
                .columns(&["s", "r", "t"]);
            run.report.sections =
                dispatch!(map.load(&windows)?, MapSet, frontier_sections(&s, r_bound, t_bound))?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::Factorize { map, n_max, common } => {
            if n_max == 0 {
                return Err(CliError::Usage("--n-max must be positive".into()));
            }
            let windows = parse_windows(&common.windows)?;
            let mut run = Run::new("factorize", &common, map.describe())
                .grid("n_max", n_max)
                .columns(&["points", "diameter"]);
            run.default_format = Format::Json;
            let (sections, artifacts) = dispatch!(map.load(&windows)?, MapSet, factorize_windows(n_max));
            run.report.sections = sections;
            run.report.artifact = Some(collect_artifacts(artifacts));
            Ok((run, common))
        }
        Command::NTo1 {
            map,
            s,
            n,
            r_bound,
            common,
        } => {
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let windows = parse_windows(&common.windows)?;
            let mut run = Run::new("n-to-1", &common, map.describe())
                .grid("s", &s)
                .grid("n", n)
                .grid("r_bound", &r_bound)
                .columns(&["s", "r", "exact"]);
            run.report.sections = dispatch!(map.load(&windows)?, MapSet, n_to_1_sections(&s, n, &r_bound))?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::EiDefect { map, s, r_bound, common } => {
            let windows = parse_windows(&common.windows)?;
            let mut run = Run::new("ei-defect", &common, map.describe())
                .grid("s", &s)
                .grid("r_bound", &r_bound)
                .columns(&["s", "r"]);
            run.report.sections = dispatch!(map.load(&windows)?, MapSet, ei_sections(&s, &r_bound))?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::Reflect { space, r, common } => {
            let windows = parse_windows(&common.windows)?;
            let mut run = Run::new("reflect", &common, space.describe())
                .grid("r", &r)
                .columns(&["i", "j", "d_I"]);
            run.default_format = Format::Json;
            let (sections, artifacts) = dispatch!(space.load(&windows)?, SpaceSet, reflect_windows(&r))?;
            run.report.sections = sections;
            run.report.artifact = Some(collect_artifacts(artifacts));
            Ok((run, common))
        }
        Command::Asdim0 { space, r, common } => {
            let windows = parse_windows(&common.windows)?;
            let mut run = Run::new("asdim0", &common, space.describe())
                .grid("r", &r)
                .columns(&["r", "D"]);
            run.report.sections = dispatch!(space.load(&windows)?, SpaceSet, asdim0_sections(&r))?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::AsdimUpper { space, r, n, common } => {
            let windows = parse_windows(&common.windows)?;
            let mut run = Run::new("asdim-upper", &common, space.describe())
                .grid("r", &r)
                .grid("n", n)
                .columns(&["r", "n", "R", "exact", "blocks", "multiplicity"]);
            let (sections, artifacts) = dispatch!(space.load(&windows)?, SpaceSet, asdim_upper_windows(&r, n))?;
            run.report.sections = sections;
            run.report.artifact = Some(Value::Array(artifacts));
            run.report.stability = true;
            Ok((run, common))
        }
        Command::TransferCover {
            map,
            cover,
            interval,
            r,
            common,
        } => {
            let windows = parse_windows(&common.windows)?;
            let source = match (&cover, &interval) {
                (Some(path), _) => CoverSource::File(serde_json::from_str(&read(path)?).map_err(coarsekit::Error::from)?),
                (None, Some(spec)) => CoverSource::interval(spec)?,
                (None, None) => return Err(CliError::Usage("give --cover FILE or --interval LENGTH:STEP".into())),
            };
            let inputs = match &cover {
                Some(path) => format!("{};cover={}", map.describe(), path.display()),
                None => format!("{};interval={}", map.describe(), interval.as_deref().unwrap_or("")),
            };
            let mut run = Run::new("transfer-cover", &common, inputs)
                .grid("r", &r)
                .columns(&["r", "blocks", "multiplicity_V", "multiplicity_W", "mesh_W", "L_bound"]);
            let (sections, artifacts) = dispatch!(map.load(&windows)?, MapSet, transfer_windows(&source, &r))?;
            run.report.sections = sections;
            run.report.artifact = Some(Value::Array(artifacts));
            Ok((run, common))
        }
        Command::PouMesh {
            space,
            pou,
            tent,
            r,
            common,
        } => {
            let windows = parse_windows(&common.windows)?;
            let source = PouSource::new(pou.as_deref(), tent)?;
            let mut run = Run::new("pou-mesh", &common, format!("{};{}", space.describe(), source.describe()))
                .grid("r", &r)
                .columns(&["r", "pou_mesh", "star_preimage_mesh"]);
            run.report.sections = dispatch!(space.load(&windows)?, SpaceSet, pou_mesh_sections(&source, &r))?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::PouTransfer {
            map,
            pou,
            tent,
            r,
            common,
        } => {
            let windows = parse_windows(&common.windows)?;
            let source = PouSource::new(pou.as_deref(), tent)?;
            let mut run = Run::new("pou-transfer", &common, format!("{};{}", map.describe(), source.describe()))
                .grid("r", &r)
                .columns(&["r", "psi_mesh", "phi_mesh_at_rho", "psi_star_mesh"]);
            let (sections, artifacts) = dispatch!(map.load(&windows)?, MapSet, pou_transfer_windows(&source, &r))?;
            run.report.sections = sections;
            run.report.artifact = Some(Value::Array(artifacts));
            Ok((run, common))
        }
        Command::GroupBall { group, cap, common } => {
            let windows = parse_windows(&common.windows)?;
            let g = load_group(&group)?;
            let mut run = Run::new("group-ball", &common, group.clone())
                .grid("cap", cap)
                .columns(&["size", "diameter"]);
            let mut artifacts = Vec::new();
            for &w in &windows {
                let ball = word_ball::<Q>(&g, w, cap)?;
                let diameter = ball.space.diameter();
                run.report.sections.push(Section {
                    window: w.to_string(),
                    rows: vec![vec![ball.len().to_string(), diameter.to_string()]],
                    values: vec![ball.len() as f64],
                });
                artifacts.push(window_json(&w.to_string(), "space", space_to_json(&ball.space)));
            }
            run.report.artifact = Some(Value::Array(artifacts));
            Ok((run, common))
        }
        Command::KernelProbe {
            hom,
            r,
            closure_cap,
            common,
        } => {
            let h = load_hom(&hom)?;
            let radii = parse_grid::<i64>(&r)?;
            let mut run = Run::new("kernel-probe", &common, hom.clone())
                .grid("r", &r)
                .grid("closure_cap", closure_cap)
                .columns(&["r", "verdict", "elements"]);
            let rows = radii
                .par_iter()
                .map(|&radius| {
                    let verdict = local_finiteness_probe(&h, radius as u64, closure_cap)?;
                    Ok(match verdict {
                        Probe::Finite(n) => vec![radius.to_string(), "FINITE".into(), n.to_string()],
                        Probe::CapExceeded(n) => vec![radius.to_string(), "CAP-EXCEEDED".into(), n.to_string()],
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            run.report.sections.push(Section {
                window: "-".into(),
                values: vec![0.0; rows.len()],
                rows,
            });
            Ok((run, common))
        }
        Command::HomLight { hom, r, s, cap, common } => {
            let windows = parse_windows(&common.windows)?;
            let h = load_hom(&hom)?;
            let (rg, sg) = (parse_grid::<Q>(&r)?, parse_grid::<Q>(&s)?);
            let mut run = Run::new("hom-light", &common, hom.clone())
                .grid("r", &r)
                .grid("s", &s)
                .columns(&["r", "s", "L"]);
            run.report.sections = windows
                .par_iter()
                .map(|&w| Ok(table_section(&w.to_string(), &hom_light_window(&h, w, &rg, &sg, cap)?)))
                .collect::<Result<_>>()?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::SubgroupEmbed { hom, s, cap, common } => {
            let windows = parse_windows(&common.windows)?;
            let h = load_hom(&hom)?;
            let sg = parse_grid::<Q>(&s)?;
            let mut run = Run::new("subgroup-embed", &common, hom.clone())
                .grid("s", &s)
                .columns(&["s", "E"]);
            run.report.sections = windows
                .par_iter()
                .map(|&w| Ok(table_section(&w.to_string(), &subgroup_window_embedding(&h, w, &sg, cap)?)))
                .collect::<Result<_>>()?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::GenConnectivity {
            group,
            fset,
            cap,
            common,
        } => {
            let windows = parse_windows(&common.windows)?;
            let g = load_group(&group)?;
            let elements = load_elements(&g, &fset)?;
            let mut run = Run::new("gen-connectivity", &common, format!("{group};fset={fset}"))
                .columns(&["connected", "components"]);
            for &w in &windows {
                let c = connectivity_generators(&g, &elements, w, cap)?;
                run.report.sections.push(Section {
                    window: w.to_string(),
                    rows: vec![vec![c.connected.to_string(), c.components.to_string()]],
                    values: vec![c.components as f64],
                });
            }
            run.report.stability = true;
            Ok((run, common))
        }
        Command::FiberProduct { h, f, scale, s, common } => {
            let windows = parse_windows(&common.windows)?;
            let (scales, sg) = (parse_grid::<Q>(&scale)?, parse_grid::<Q>(&s)?);
            let mut run = Run::new("fiber-product", &common, format!("h={h};f={f}"))
                .grid("S", &scale)
                .grid("s", &s)
                .columns(&["S", "s", "points", "gap", "E"]);
            run.report.sections = windows
                .par_iter()
                .map(|&w| fiber_section(&h, &f, w, &scales, &sg))
                .collect::<Result<_>>()?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::Oscillation {
            space,
            function,
            radius,
            w,
            common,
        } => {
            let windows = parse_windows(&common.windows)?;
            let mut run = Run::new("oscillation", &common, format!("{};g={function}", space.describe()))
                .grid("R", &radius)
                .grid("w", &w)
                .columns(&["w", "osc"]);
            run.report.sections =
                dispatch!(space.load(&windows)?, SpaceSet, oscillation_sections(&function, &radius, &w))?;
            run.report.stability = true;
            Ok((run, common))
        }
        Command::Selftest => unreachable!("handled by run"),
    }
}

fn light_sections<T: Scalar>(maps: &Windowed<LsMap<T>>, r: &str, s: &str) -> Result<Vec<Section>> {
    let (rg, sg) = (parse_grid::<T>(r)?, parse_grid::<T>(s)?);
    Ok(maps
        .par_iter()
        .map(|(w, f)| table_section(w, &light_response(f, &rg, &sg)))
        .collect())
}

fn frontier_sections<T: Scalar>(
    maps: &Windowed<LsMap<T>>,
    s: &str,
    r_bound: u64,
    t_bound: u64,
) -> Result<Vec<Section>> {
    let sg = parse_grid::<T>(s)?;
    Ok(maps
        .par_iter()
        .map(|(w, f)| {
            let fr = monotone_frontier(f, &sg, r_bound, t_bound);
            let mut section = Section {
                window: w.clone(),
                ..Section::default()
            };
            for (s, cell) in fr.s_grid.iter().zip(&fr.cells) {
                let (r, t) = match cell {
                    Some((r, t)) => (r.to_string(), t.to_string()),
                    None => ("top".into(), "top".into()),
                };
                section.values.push(cell.map_or(f64::INFINITY, |(_, t)| t.to_f64_lossy()));
                section.rows.push(vec![s.to_string(), r, t]);
            }
            section
        })
        .collect())
}

fn factorize_windows<T: Scalar>(maps: &Windowed<LsMap<T>>, n_max: u64) -> (Vec<Section>, Vec<(String, Value)>) {
    maps.par_iter()
        .map(|(w, f)| {
            let fact = factorize(f, n_max);
            let diameter = fact.light_space.diameter();
            let section = Section {
                window: w.clone(),
                rows: vec![vec![fact.light_space.len().to_string(), diameter.to_string()]],
                values: vec![diameter.to_f64()],
            };
            (section, (w.clone(), space_to_json(&fact.light_space)))
        })
        .unzip()
}

fn n_to_1_sections<T: Scalar>(maps: &Windowed<LsMap<T>>, s: &str, n: usize, r_bound: &str) -> Result<Vec<Section>> {
    let sg = parse_grid::<T>(s)?;
    let bound = parse_scale::<T>(r_bound)?;
    Ok(maps
        .par_iter()
        .map(|(w, f)| {
            let mut section = Section {
                window: w.clone(),
                ..Section::default()
            };
            for &s in &sg {
                let out = n_to_1_response(f, s, n, bound);
                section.rows.push(vec![s.to_string(), opt_render(out.value), out.exact.to_string()]);
                section.values.push(out.value.map_or(f64::INFINITY, Scalar::to_f64_lossy));
            }
            section
        })
        .collect())
}

fn ei_sections<T: Scalar>(maps: &Windowed<LsMap<T>>, s: &str, r_bound: &str) -> Result<Vec<Section>> {
    let sg = parse_grid::<T>(s)?;
    let bound = parse_scale::<T>(r_bound)?;
    Ok(maps
        .par_iter()
        .map(|(w, f)| table_section(w, &ei_defect(f, &sg, bound)))
        .collect())
}

type Artifacts = Vec<(String, Value)>;

fn reflect_windows<T: Scalar>(
    spaces: &Windowed<FiniteMetricSpace<T>>,
    r: &str,
) -> Result<(Vec<Section>, Artifacts)> {
    let rg = parse_grid::<T>(r)?;
    Ok(spaces
        .par_iter()
        .map(|(w, x)| {
            let refl = reflect_0(x, &rg);
            let mut section = Section {
                window: w.clone(),
                ..Section::default()
            };
            for i in 0..x.len() {
                for j in (i + 1)..x.len() {
                    let d = refl.space.dist(i, j);
                    section.rows.push(vec![i.to_string(), j.to_string(), d.to_string()]);
                    section.values.push(d.to_f64());
                }
            }
            (section, (w.clone(), space_to_json(&refl.space)))
        })
        .unzip())
}

fn asdim0_sections<T: Scalar>(spaces: &Windowed<FiniteMetricSpace<T>>, r: &str) -> Result<Vec<Section>> {
    let rg = parse_grid::<T>(r)?;
    Ok(spaces
        .par_iter()
        .map(|(w, x)| table_section(w, &asdim0_response(x, &rg)))
        .collect())
}

fn asdim_upper_windows<T: Scalar>(
    spaces: &Windowed<FiniteMetricSpace<T>>,
    r: &str,
    n: usize,
) -> Result<(Vec<Section>, Vec<Value>)> {
    let rg = parse_grid::<T>(r)?;
    let mut sections = Vec::new();
    let mut artifacts = Vec::new();
    for (w, x) in spaces {
        let mut section = Section {
            window: w.clone(),
            ..Section::default()
        };
        let covers: Vec<_> = rg.par_iter().map(|&r| (r, asdim_upper_at(x, r, n))).collect();
        for (r, upper) in covers {
            section.rows.push(vec![
                r.to_string(),
                n.to_string(),
                upper.mesh.to_string(),
                upper.exact.to_string(),
                upper.cover.len().to_string(),
                multiplicity(upper.cover.blocks()).to_string(),
            ]);
            section.values.push(upper.mesh.to_f64());
            artifacts.push(json!({
                "window": w,
                "r": r.to_string(),
                "n": n,
                "mesh": upper.mesh.to_string(),
                "exact": upper.exact,
                "cover": upper.cover.blocks(),
            }));
        }
        sections.push(section);
    }
    Ok((sections, artifacts))
}

enum CoverSource {
    File(Vec<Vec<usize>>),
    /// Blocks of `length + 1` consecutive point indices every `step` points.
    Interval { length: usize, step: usize },
}

impl CoverSource {
    fn interval(spec: &str) -> Result<Self> {
        let bad = || CliError::Usage(format!("--interval `{spec}` is not LENGTH:STEP"));
        let (a, b) = spec.split_once(':').ok_or_else(bad)?;
        let length: usize = a.trim().parse().map_err(|_| bad())?;
        let step: usize = b.trim().parse().map_err(|_| bad())?;
        if step == 0 {
            return Err(bad());
        }
        Ok(CoverSource::Interval { length, step })
    }

    fn blocks(&self, n_points: usize) -> Vec<Vec<usize>> {
        match self {
            CoverSource::File(blocks) => blocks.clone(),
            CoverSource::Interval { length, step } => {
                let mut out = Vec::new();
                let mut start = 0;
                while start < n_points {
                    out.push((start..=(start + length).min(n_points - 1)).collect());
                    if start + length >= n_points - 1 {
                        break;
                    }
                    start += step;
                }
                out
            }
        }
    }
}

fn transfer_windows<T: Scalar>(
    maps: &Windowed<LsMap<T>>,
    source: &CoverSource,
    r: &str,
) -> Result<(Vec<Section>, Vec<Value>)> {
    let rg = parse_grid::<T>(r)?;
    let mut sections = Vec::new();
    let mut artifacts = Vec::new();
    for (w, f) in maps {
        let y = f.codomain();
        let blocks = source.blocks(y.len());
        for block in &blocks {
            for &p in block {
                y.check_index(p)?;
            }
        }
        let cover = ScaledCover::new(y, blocks, None);
        let radius = cover_radius(y, cover.blocks());
        let mut section = Section {
            window: w.clone(),
            ..Section::default()
        };
        for &r in &rg {
            let transferred = transfer_cover(f, &cover, r)?;
            let bound = match radius {
                Extended::Finite(s) => light_mesh(f, r, s),
                Extended::Infinite => Extended::Infinite,
            };
            section.rows.push(vec![
                r.to_string(),
                transferred.len().to_string(),
                multiplicity(cover.blocks()).to_string(),
                multiplicity(transferred.blocks()).to_string(),
                transferred.mesh().to_string(),
                bound.to_string(),
            ]);
            section.values.push(transferred.mesh().to_f64());
            artifacts.push(json!({ "window": w, "r": r.to_string(), "cover": transferred.blocks() }));
        }
        sections.push(section);
    }
    Ok((sections, artifacts))
}

enum PouSource {
    File(PartitionOfUnity, String),
    Tent(f64),
}

impl PouSource {
    fn new(pou: Option<&Path>, tent: Option<f64>) -> Result<Self> {
        match (pou, tent) {
            (Some(path), _) => Ok(PouSource::File(parse_pou(&read(path)?)?, path.display().to_string())),
            (None, Some(width)) => Ok(PouSource::Tent(width)),
            (None, None) => Err(CliError::Usage("give --pou FILE or --tent L".into())),
        }
    }

    fn describe(&self) -> String {
        match self {
            PouSource::File(_, path) => format!("pou={path}"),
            PouSource::Tent(width) => format!("tent={width}"),
        }
    }

    fn on<T: Scalar>(&self, space: &FiniteMetricSpace<T>) -> Result<PartitionOfUnity> {
        match self {
            PouSource::File(phi, _) => Ok(phi.clone()),
            PouSource::Tent(width) => Ok(tent_partition(space, *width)?),
        }
    }
}

fn pou_mesh_sections<T: Scalar>(
    spaces: &Windowed<FiniteMetricSpace<T>>,
    source: &PouSource,
    r: &str,
) -> Result<Vec<Section>> {
    let rg = parse_grid::<T>(r)?;
    spaces
        .iter()
        .map(|(w, x)| {
            let phi = source.on(x)?;
            let star = star_preimage_mesh(&phi, x)?;
            let mut section = Section {
                window: w.clone(),
                ..Section::default()
            };
            for &r in &rg {
                let mesh = pou_mesh(&phi, x, r)?;
                section.rows.push(vec![r.to_string(), format!("{mesh}"), star.to_string()]);
                section.values.push(mesh);
            }
            Ok(section)
        })
        .collect()
}

fn pou_transfer_windows<T: Scalar>(
    maps: &Windowed<LsMap<T>>,
    source: &PouSource,
    r: &str,
) -> Result<(Vec<Section>, Vec<Value>)> {
    let rg = parse_grid::<T>(r)?;
    let mut sections = Vec::new();
    let mut artifacts = Vec::new();
    for (w, f) in maps {
        let phi = source.on(f.codomain())?;
        let mut section = Section {
            window: w.clone(),
            ..Section::default()
        };
        for &r in &rg {
            let psi = transfer_pou(f, &phi, r)?;
            let psi_mesh = pou_mesh(&psi, f.domain(), r)?;
            let phi_mesh = match modulus_at(f, r) {
                Extended::Finite(rho) => format!("{}", pou_mesh(&phi, f.codomain(), rho)?),
                Extended::Infinite => "inf".into(),
            };
            let star = star_preimage_mesh(&psi, f.domain())?;
            section.rows.push(vec![r.to_string(), format!("{psi_mesh}"), phi_mesh, star.to_string()]);
            section.values.push(psi_mesh);
            artifacts.push(json!({ "window": w, "r": r.to_string(), "pou": pou_to_json(&psi) }));
        }
        sections.push(section);
    }
    Ok((sections, artifacts))
}

fn fiber_section(h_name: &str, f_name: &str, window: u64, scales: &[Q], sg: &[Q]) -> Result<Section> {
    let h = corpus_map(h_name, window)?;
    let f = corpus_map(f_name, window)?;
    let mut section = Section {
        window: window.to_string(),
        ..Section::default()
    };
    for &scale in scales {
        let fp = scaled_fiber_product(&h, &f, scale)?;
        let gap = if fp.space.is_empty() {
            Extended::zero()
        } else {
            closeness_gap(&fp.to_a.then(&h)?, &fp.to_c.then(&f)?)?
        };
        let table = embedding_response(&fp.inclusion, sg);
        for (p, e) in table.rows() {
            section.rows.push(vec![
                scale.to_string(),
                p[0].to_string(),
                fp.space.len().to_string(),
                gap.to_string(),
                e.to_string(),
            ]);
            section.values.push(e.to_f64());
        }
    }
    Ok(section)
}

fn oscillation_values<T: Scalar>(space: &FiniteMetricSpace<T>, function: &str) -> Result<Vec<(f64, f64)>> {
    let base = space.basepoint().ok_or(coarsekit::Error::MissingBasepoint("space"))?;
    let radial = |g: fn(f64) -> f64| -> Vec<(f64, f64)> {
        (0..space.len()).map(|x| (g(space.dist(base, x).to_f64()), 0.0)).collect()
    };
    match function {
        "parity" => Ok(radial(|n| n.rem_euclid(2.0))),
        "log1p" => Ok(radial(f64::ln_1p)),
        "constant" => Ok(vec![(0.0, 0.0); space.len()]),
        path => {
            let value = json_arg(path)?;
            serde_json::from_value(value).map_err(|e| CliError::Core(e.into()))
        }
    }
}

fn oscillation_sections<T: Scalar>(
    spaces: &Windowed<FiniteMetricSpace<T>>,
    function: &str,
    radius: &str,
    w: &str,
) -> Result<Vec<Section>> {
    let radius = parse_scale::<T>(radius)?;
    let wg = parse_grid::<T>(w)?;
    spaces
        .iter()
        .map(|(window, x)| {
            let g = oscillation_values(x, function)?;
            Ok(table_section(window, &oscillation_profile(x, &g, radius, &wg)?))
        })
        .collect()
}

//! Loading spaces, maps, groups and homomorphisms for every window.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use coarsekit::corpus::{corpus_hom, corpus_map, HOM_NAMES};
use coarsekit::groups::{Element, Group, GroupHom};
use coarsekit::io::{element_from_value, group_from_value, parse_hom, parse_map, parse_space, LoadedSpace};
use coarsekit::{FiniteMetricSpace, LsMap, Rational64};
use serde_json::Value;

use crate::args::{MapInput, SpaceInput};
use crate::error::{CliError, Result};

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Inline JSON when the argument starts with `{` or `[`, otherwise a path.
pub fn json_arg(arg: &str) -> Result<Value> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Core(e.into()))
}

/// Per-window items, labelled by window (`input` for file inputs).
pub type Windowed<T> = Vec<(String, T)>;

pub enum MapSet {
    Exact(Windowed<LsMap<Rational64>>),
    Float(Windowed<LsMap<f64>>),
}

pub enum SpaceSet {
    Exact(Windowed<FiniteMetricSpace<Rational64>>),
    Float(Windowed<FiniteMetricSpace<f64>>),
}

impl MapInput {
    pub fn describe(&self) -> String {
        match (&self.map, &self.domain, &self.codomain, &self.values) {
            (Some(name), ..) => name.clone(),
            (None, Some(d), Some(c), Some(v)) => format!("{}|{}|{}", d.display(), c.display(), v.display()),
            _ => String::new(),
        }
    }

    pub fn load(&self, windows: &[u64]) -> Result<MapSet> {
        if let Some(name) = &self.map {
            let maps = windows
                .iter()
                .map(|&w| Ok((w.to_string(), corpus_map(name, w)?)))
                .collect::<Result<_>>()?;
            return Ok(MapSet::Exact(maps));
        }
        let (Some(d), Some(c), Some(v)) = (&self.domain, &self.codomain, &self.values) else {
            return Err(CliError::Usage("give --map NAME or --domain, --codomain and --values".into()));
        };
        let values = read(v)?;
        match (parse_space(&read(d)?)?, parse_space(&read(c)?)?) {
            (LoadedSpace::Exact(a), LoadedSpace::Exact(b)) => Ok(MapSet::Exact(vec![(
                "input".into(),
                parse_map(&values, Arc::new(a), Arc::new(b))?,
            )])),
            (LoadedSpace::Float(a), LoadedSpace::Float(b)) => Ok(MapSet::Float(vec![(
                "input".into(),
                parse_map(&values, Arc::new(a), Arc::new(b))?,
            )])),
            _ => Err(CliError::Usage(
                "domain and codomain must both be point clouds or both be graph/explicit spaces".into(),
            )),
        }
    }
}

impl SpaceInput {
    pub fn describe(&self) -> String {
        match (&self.space, &self.map) {
            (Some(p), _) => p.display().to_string(),
            (None, Some(name)) => format!("domain({name})"),
            _ => String::new(),
        }
    }

    pub fn load(&self, windows: &[u64]) -> Result<SpaceSet> {
        if let Some(path) = &self.space {
            return Ok(match parse_space(&read(path)?)? {
                LoadedSpace::Exact(s) => SpaceSet::Exact(vec![("input".into(), s)]),
                LoadedSpace::Float(s) => SpaceSet::Float(vec![("input".into(), s)]),
            });
        }
        let Some(name) = &self.map else {
            return Err(CliError::Usage("give --space FILE or --map NAME".into()));
        };
        let spaces = windows
            .iter()
            .map(|&w| {
                let f = corpus_map(name, w)?;
                Ok((w.to_string(), f.domain().as_ref().clone()))
            })
            .collect::<Result<_>>()?;
        Ok(SpaceSet::Exact(spaces))
    }
}

pub fn load_group(arg: &str) -> Result<Group> {
    Ok(group_from_value(&json_arg(arg)?)?)
}

/// A builtin homomorphism name, or hom JSON.
pub fn load_hom(arg: &str) -> Result<GroupHom> {
    if HOM_NAMES.contains(&arg) {
        return Ok(corpus_hom(arg)?);
    }
    Ok(parse_hom(&json_arg(arg)?.to_string())?)
}

pub fn load_elements(group: &Group, arg: &str) -> Result<Vec<Element>> {
    let value = json_arg(arg)?;
    let items = value
        .as_array()
        .ok_or_else(|| CliError::Usage("--fset must be a JSON array of elements".into()))?;
    Ok(items
        .iter()
        .map(|v| element_from_value(group, v))
        .collect::<coarsekit::Result<_>>()?)
}

//! JSON files describing subbases.
//!
//! ```json
//! {"kind": "distance", "space": "square", "resolution": "1/32",
//!  "cuts": [{"center_index": 0, "center": "(0, 0)", "c": "380181/262144"}]}
//! {"kind": "gray", "pairs": 16}
//! {"kind": "compactified", "pairs": 16, "resolution": "1/1024"}
//! ```
//!
//! A distance subbase cuts `d(center, ·)` at `c`; `center_index` is the
//! position of the centre in the dense sequence of the named space and is
//! used when `center` is absent. Rationals are strings so they stay exact.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::builder::{Build, DistanceCut};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Q};
use crate::space::{builtin_space, compactified_example, gray_subbase, parse_point, SpaceModel, SpaceName};
use crate::subbase::{Cut, FunctionalSubbase};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutRecord {
    pub center_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<String>,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SubbaseFile {
    Distance {
        space: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<String>,
        cuts: Vec<CutRecord>,
    },
    Gray {
        pairs: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<String>,
    },
    Compactified {
        pairs: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<String>,
    },
}

/// A subbase read from a file, with the sample space it was made for.
#[derive(Clone, Debug)]
pub struct LoadedSubbase {
    pub subbase: FunctionalSubbase,
    pub space: SpaceName,
    pub model: SpaceModel,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `text` to `path`, reporting the path on failure.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    write_text(path, &format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn malformed(what: impl std::fmt::Display) -> Error {
    Error::MalformedSubbaseFile(what.to_string())
}

fn resolution_or(text: &Option<String>, space: &SpaceName) -> Result<Q> {
    match text {
        Some(t) => parse_rational(t).map_err(|_| malformed(format!("bad resolution {t:?}"))),
        None => Ok(space.default_resolution()),
    }
}

impl SubbaseFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(malformed)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("subbase files always serialize")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &format!("{}\n", self.to_json_string()))
    }

    /// The record of a build on `space` sampled at `resolution`.
    pub fn from_build(space: &SpaceName, resolution: &Q, build: &Build) -> Self {
        SubbaseFile::Distance {
            space: space.to_string(),
            resolution: Some(resolution.to_string()),
            cuts: build
                .cuts
                .iter()
                .map(|c| CutRecord {
                    center_index: c.n0,
                    center: Some(c.centre.to_string()),
                    c: c.level.to_string(),
                })
                .collect(),
        }
    }

    pub fn space_name(&self) -> Result<SpaceName> {
        match self {
            SubbaseFile::Distance { space, .. } => space.parse(),
            SubbaseFile::Gray { .. } => Ok(SpaceName::Interval),
            SubbaseFile::Compactified { .. } => Ok(SpaceName::Compactified),
        }
    }

    pub fn pairs(&self) -> usize {
        match self {
            SubbaseFile::Distance { cuts, .. } => cuts.len(),
            SubbaseFile::Gray { pairs, .. } | SubbaseFile::Compactified { pairs, .. } => *pairs,
        }
    }

    /// Builds the subbase and the sample space named in the file.
    pub fn instantiate(&self) -> Result<LoadedSubbase> {
        let space = self.space_name()?;
        match self {
            SubbaseFile::Distance { resolution, cuts, .. } => {
                let model = builtin_space(&space, &resolution_or(resolution, &space)?)?;
                let subbase = FunctionalSubbase::new(
                    cuts.iter()
                        .map(|rec| {
                            let centre = match &rec.center {
                                Some(text) => parse_point(text)?,
                                None => model.dense_point(rec.center_index).clone(),
                            };
                            model.validate_point(&centre)?;
                            let level =
                                parse_rational(&rec.c).map_err(|_| malformed(format!("bad level {:?}", rec.c)))?;
                            let f = DistanceCut::new(centre, model.metric().clone());
                            Ok(Cut::new(Arc::new(f), level))
                        })
                        .collect::<Result<Vec<_>>>()?,
                );
                Ok(LoadedSubbase { subbase, space, model })
            }
            SubbaseFile::Gray { pairs, resolution } => {
                let model = builtin_space(&space, &resolution_or(resolution, &space)?)?;
                Ok(LoadedSubbase {
                    subbase: gray_subbase(*pairs),
                    space,
                    model,
                })
            }
            SubbaseFile::Compactified { pairs, resolution } => {
                let (model, subbase) = compactified_example(&resolution_or(resolution, &space)?, *pairs)?;
                Ok(LoadedSubbase { subbase, space, model })
            }
        }
    }
}

/// Loads and instantiates a subbase file.
pub fn load_subbase(path: &Path) -> Result<LoadedSubbase> {
    SubbaseFile::load(path)?.instantiate()
}

/// Checks that every pair of `subbase` can be evaluated at every sample of
/// `model`, so a subbase is never run on a space it was not made for.
pub fn check_domain(subbase: &FunctionalSubbase, model: &SpaceModel) -> Result<()> {
    for x in model.samples() {
        for cut in subbase.cuts() {
            let known = cut.func.exact_sign(x, &cut.level).is_some() || cut.func.eval(x).is_finite();
            if !known {
                return Err(Error::Domain {
                    point: x.to_string(),
                    space: format!("the domain of the subbase ({:?})", cut.func),
                });
            }
        }
    }
    Ok(())
}

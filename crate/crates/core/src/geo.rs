//! Areas and the tract → province → region → country nesting.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{header_matches, numbered_lines, split_fields};

/// Reserved code for the foreign side of a cross-border movement.
pub const EXTERNAL_CODE: &str = "EXT";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("area code must be non-empty")]
    EmptyCode,
    #[error("area code `{0}` is reserved")]
    ReservedCode(String),
    #[error("area `{0}` declared twice")]
    DuplicateArea(String),
    #[error("area `{area}` names unknown parent `{parent}`")]
    UnknownParent { area: String, parent: String },
    #[error("area `{area}` ({level}) cannot have parent `{parent}` ({parent_level})")]
    BadParentLevel { area: String, level: AreaLevel, parent: String, parent_level: AreaLevel },
    #[error("area `{0}` has no parent")]
    MissingParent(String),
    #[error("country `{0}` must not have a parent")]
    CountryWithParent(String),
    #[error("hierarchy has no country node")]
    NoCountry,
    #[error("hierarchy has more than one country node: `{0}`, `{1}`")]
    MultipleCountries(String, String),
    #[error("unknown area `{0}`")]
    UnknownArea(String),
    #[error("area `{area}` is at level {level}, above the requested {target}")]
    LevelMismatch { area: String, level: AreaLevel, target: AreaLevel },
    #[error("registry header must be `code,level,parent`")]
    HeaderMismatch,
    #[error("registry line {line}: {reason}")]
    BadLine { line: usize, reason: String },
}

/// Spatial granularity, ordered from finest to coarsest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaLevel {
    Tract,
    Province,
    Region,
    Country,
}

impl AreaLevel {
    pub const ALL: [AreaLevel; 4] = [AreaLevel::Tract, AreaLevel::Province, AreaLevel::Region, AreaLevel::Country];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tract" => Some(AreaLevel::Tract),
            "province" => Some(AreaLevel::Province),
            "region" => Some(AreaLevel::Region),
            "country" => Some(AreaLevel::Country),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AreaLevel::Tract => "tract",
            AreaLevel::Province => "province",
            AreaLevel::Region => "region",
            AreaLevel::Country => "country",
        }
    }

    /// The level one step coarser, if any.
    pub fn parent_level(self) -> Option<Self> {
        match self {
            AreaLevel::Tract => Some(AreaLevel::Province),
            AreaLevel::Province => Some(AreaLevel::Region),
            AreaLevel::Region => Some(AreaLevel::Country),
            AreaLevel::Country => None,
        }
    }
}

impl fmt::Display for AreaLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// An area code tagged with its level.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AreaId {
    code: String,
    level: AreaLevel,
}

impl AreaId {
    pub fn new(code: impl Into<String>, level: AreaLevel) -> Result<Self, GeoError> {
        let code = code.into();
        if code.trim().is_empty() {
            return Err(GeoError::EmptyCode);
        }
        if code == EXTERNAL_CODE {
            return Err(GeoError::ReservedCode(code));
        }
        Ok(AreaId { code, level })
    }

    /// The foreign endpoint of a cross-border movement. It lifts to itself
    /// at every level and never belongs to a hierarchy.
    pub fn external() -> Self {
        AreaId { code: EXTERNAL_CODE.to_string(), level: AreaLevel::Country }
    }

    pub fn is_external(&self) -> bool {
        self.code == EXTERNAL_CODE
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn level(&self) -> AreaLevel {
        self.level
    }
}

impl fmt::Display for AreaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

#[derive(Clone, Debug)]
struct AreaNode {
    id: AreaId,
    parent: Option<String>,
    name: Option<String>,
}

/// A single-country forest of areas with parent links one level up.
#[derive(Clone, Debug)]
pub struct GeoHierarchy {
    nodes: BTreeMap<String, AreaNode>,
    country: String,
}

/// One row of an area registry.
#[derive(Clone, Debug)]
pub struct AreaEntry {
    pub id: AreaId,
    pub parent: Option<String>,
    pub name: Option<String>,
}

impl GeoHierarchy {
    pub fn from_entries(entries: impl IntoIterator<Item = AreaEntry>) -> Result<Self, GeoError> {
        let mut nodes = BTreeMap::new();
        for e in entries {
            let code = e.id.code.clone();
            if nodes.insert(code.clone(), AreaNode { id: e.id, parent: e.parent, name: e.name }).is_some() {
                return Err(GeoError::DuplicateArea(code));
            }
        }

        let mut country: Option<String> = None;
        for node in nodes.values() {
            match (&node.parent, node.id.level.parent_level()) {
                (Some(_), None) => return Err(GeoError::CountryWithParent(node.id.code.clone())),
                (None, None) => {
                    if let Some(c) = &country {
                        return Err(GeoError::MultipleCountries(c.clone(), node.id.code.clone()));
                    }
                    country = Some(node.id.code.clone());
                }
                (None, Some(_)) => return Err(GeoError::MissingParent(node.id.code.clone())),
                (Some(p), Some(expected)) => {
                    let parent = nodes
                        .get(p)
                        .ok_or_else(|| GeoError::UnknownParent { area: node.id.code.clone(), parent: p.clone() })?;
                    if parent.id.level != expected {
                        return Err(GeoError::BadParentLevel {
                            area: node.id.code.clone(),
                            level: node.id.level,
                            parent: p.clone(),
                            parent_level: parent.id.level,
                        });
                    }
                }
            }
        }
        let country = country.ok_or(GeoError::NoCountry)?;
        Ok(GeoHierarchy { nodes, country })
    }

    /// Parses an area registry: header `code,level,parent` with an optional
    /// trailing `name` column; `parent` is empty for the country.
    pub fn parse(text: &str) -> Result<Self, GeoError> {
        let mut lines = numbered_lines(text);
        match lines.next() {
            Some((_, h)) if header_matches(h, &["code", "level", "parent"], &["name"]) => {}
            _ => return Err(GeoError::HeaderMismatch),
        }
        let mut entries = Vec::new();
        for (line, raw) in lines {
            let bad = |reason: String| GeoError::BadLine { line, reason };
            let f = split_fields(raw);
            if f.len() < 3 || f.len() > 4 {
                return Err(bad(format!("expected 3 or 4 fields, found {}", f.len())));
            }
            let level = AreaLevel::parse(f[1]).ok_or_else(|| bad(format!("unknown level `{}`", f[1])))?;
            let id = AreaId::new(f[0], level).map_err(|e| bad(e.to_string()))?;
            let parent = (!f[2].is_empty()).then(|| f[2].to_string());
            let name = f.get(3).filter(|s| !s.is_empty()).map(|s| s.to_string());
            entries.push(AreaEntry { id, parent, name });
        }
        Self::from_entries(entries)
    }

    pub fn get(&self, code: &str) -> Option<&AreaId> {
        self.nodes.get(code).map(|n| &n.id)
    }

    pub fn require(&self, code: &str) -> Result<&AreaId, GeoError> {
        self.get(code).ok_or_else(|| GeoError::UnknownArea(code.to_string()))
    }

    pub fn contains(&self, area: &AreaId) -> bool {
        self.nodes.get(&area.code).is_some_and(|n| n.id == *area)
    }

    pub fn name(&self, code: &str) -> Option<&str> {
        self.nodes.get(code).and_then(|n| n.name.as_deref())
    }

    pub fn country(&self) -> &AreaId {
        &self.nodes[&self.country].id
    }

    pub fn parent(&self, area: &AreaId) -> Option<&AreaId> {
        let node = self.nodes.get(&area.code)?;
        node.parent.as_ref().map(|p| &self.nodes[p].id)
    }

    /// Walks parent links until `area` reaches `level`. The external area
    /// lifts to itself.
    pub fn lift(&self, area: &AreaId, level: AreaLevel) -> Result<AreaId, GeoError> {
        if area.is_external() {
            return Ok(area.clone());
        }
        let mut node = self.nodes.get(&area.code).ok_or_else(|| GeoError::UnknownArea(area.code.clone()))?;
        if node.id.level > level {
            return Err(GeoError::LevelMismatch { area: area.code.clone(), level: node.id.level, target: level });
        }
        while node.id.level < level {
            // parent links always exist below country level
            let p = node.parent.as_ref().expect("validated hierarchy");
            node = &self.nodes[p];
        }
        Ok(node.id.clone())
    }

    pub fn areas_at(&self, level: AreaLevel) -> impl Iterator<Item = &AreaId> {
        self.nodes.values().map(|n| &n.id).filter(move |id| id.level == level)
    }

    /// Direct children of `area`.
    pub fn children<'a>(&'a self, area: &'a AreaId) -> impl Iterator<Item = &'a AreaId> + 'a {
        self.nodes.values().filter(move |n| n.parent.as_deref() == Some(area.code())).map(|n| &n.id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

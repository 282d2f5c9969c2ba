//! Structure configuration files (TOML, `schema_version = 1`).
//!
//! ```toml
//! schema_version = 1
//! name = "example"
//!
//! [defaults]
//! modulus = 7.0e10   # Pa, used when an element gives none
//! density = 2700.0   # kg/m³, used when a section gives none
//!
//! [sections.bar]     # either width/depth (solid rectangle) ...
//! width = 0.0322     # m, out of plane
//! depth = 0.0098     # m, in the bending plane
//! # ... or explicit `area` (m²) and `second_moment` (m⁴)
//!
//! [[nodes]]
//! id = 0             # contiguous from 0
//! x = 0.0            # m
//! y = 0.0            # m
//!
//! [[elements]]
//! id = 1             # label used in reports
//! nodes = [0, 1]
//! section = "bar"
//!
//! [[measured]]
//! node = 0
//! dof = "u"          # one of "u", "v", "theta"
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ElementSection, FeError, FrameElement, Node, StructureModel, DOFS_PER_NODE};

pub const STRUCTURE_SCHEMA_VERSION: u32 = 1;

/// Default asymmetric H-structure shipped with the crate.
pub const H_STRUCTURE_DEFAULT: &str = include_str!("../../data/h_structure.default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub defaults: Defaults,
    pub sections: BTreeMap<String, SectionSpec>,
    pub nodes: Vec<NodeSpec>,
    pub elements: Vec<ElementSpec>,
    #[serde(default)]
    pub measured: Vec<MeasuredSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub modulus: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SectionSpec {
    Rectangle {
        width: f64,
        depth: f64,
        #[serde(default)]
        density: Option<f64>,
    },
    Explicit {
        area: f64,
        second_moment: f64,
        #[serde(default)]
        density: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub id: usize,
    pub nodes: [usize; 2],
    pub section: String,
    #[serde(default)]
    pub modulus: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DofKind {
    U,
    V,
    Theta,
}

impl DofKind {
    pub fn offset(self) -> usize {
        match self {
            DofKind::U => 0,
            DofKind::V => 1,
            DofKind::Theta => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuredSpec {
    pub node: usize,
    pub dof: DofKind,
}

impl StructureConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, FeError> {
        let config: Self = toml::from_str(text).map_err(|e| FeError::Config(e.to_string()))?;
        if config.schema_version != STRUCTURE_SCHEMA_VERSION {
            return Err(FeError::Config(format!(
                "unsupported structure schema_version {} (expected {STRUCTURE_SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, FeError> {
        let text = std::fs::read_to_string(path).map_err(|e| FeError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn h_structure_default() -> Self {
        Self::from_toml_str(H_STRUCTURE_DEFAULT).expect("bundled H-structure config is valid")
    }

    pub fn build(&self) -> Result<StructureModel, FeError> {
        let mut sections = BTreeMap::new();
        for (name, spec) in &self.sections {
            let section = match *spec {
                SectionSpec::Rectangle {
                    width,
                    depth,
                    density,
                } => ElementSection::rectangle(width, depth, density.unwrap_or(self.defaults.density)),
                SectionSpec::Explicit {
                    area,
                    second_moment,
                    density,
                } => ElementSection::new(area, second_moment, density.unwrap_or(self.defaults.density)),
            }?;
            sections.insert(name.as_str(), section);
        }

        let nodes = self
            .nodes
            .iter()
            .map(|n| Node {
                id: n.id,
                x: n.x,
                y: n.y,
            })
            .collect();

        let elements = self
            .elements
            .iter()
            .map(|e| {
                let section = *sections
                    .get(e.section.as_str())
                    .ok_or_else(|| FeError::Config(format!(
                        "element {} references unknown section {:?}",
                        e.id, e.section
                    )))?;
                Ok(FrameElement {
                    id: e.id,
                    node_a: e.nodes[0],
                    node_b: e.nodes[1],
                    section,
                    modulus: e.modulus.unwrap_or(self.defaults.modulus),
                })
            })
            .collect::<Result<Vec<_>, FeError>>()?;

        let measured = self
            .measured
            .iter()
            .map(|m| DOFS_PER_NODE * m.node + m.dof.offset())
            .collect();

        StructureModel::new(nodes, elements, measured)
    }
}

//! Planar frame finite-element model: element matrices, global assembly and
//! per-element modulus parameterization.

mod config;
mod element;
mod model;

pub use config::{
    Defaults, DofKind, ElementSpec, MeasuredSpec, NodeSpec, SectionSpec, StructureConfig,
    H_STRUCTURE_DEFAULT, STRUCTURE_SCHEMA_VERSION,
};
pub use element::{element_matrices, rotation, ElementGeometry, ElementMatrix, ElementSection, FrameElement, Node};
pub use model::{GlobalMatrices, StructureModel, DOFS_PER_NODE, PLANAR_RIGID_MODES};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeError {
    #[error("element {element} has degenerate geometry (length {length})")]
    DegenerateElement { element: usize, length: f64 },
    #[error("element {element} has invalid modulus {value} (must be finite and > 0)")]
    InvalidModulus { element: usize, value: f64 },
    #[error("section {field} = {value} must be finite and > 0")]
    InvalidSection { field: &'static str, value: f64 },
    #[error("mesh has no nodes or no elements")]
    EmptyMesh,
    #[error("node ids must be contiguous from 0: position {position} has id {id}")]
    NodeIds { position: usize, id: usize },
    #[error("node {node} has a non-finite coordinate")]
    NonFiniteCoordinate { node: usize },
    #[error("element {element} references unknown node {node}")]
    UnknownNode { element: usize, node: usize },
    #[error("mesh is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("measured dof {dof} out of range (model has {n_dofs} dofs)")]
    MeasuredDofOutOfRange { dof: usize, n_dofs: usize },
    #[error("measured dof {dof} listed twice")]
    DuplicateMeasuredDof { dof: usize },
    #[error("expected {expected} moduli, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("mass {mass:?} and stiffness {stiffness:?} must be square and equally sized")]
    MatrixShape {
        mass: (usize, usize),
        stiffness: (usize, usize),
    },
    #[error("structure config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

//! Two-node Euler-Bernoulli frame element in the plane.
//!
//! Each node carries three degrees of freedom `(u, v, θ)`: axial/transverse
//! translations and the in-plane rotation. The element combines a linear
//! axial bar with cubic-Hermite bending and uses the consistent mass matrix.

use nalgebra::{Matrix6, SMatrix};
use serde::{Deserialize, Serialize};

use super::FeError;

pub type ElementMatrix = Matrix6<f64>;

/// Planar node position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

/// Cross-section and material density shared by one or more elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementSection {
    /// Cross-sectional area, m².
    pub area: f64,
    /// Second moment of area about the out-of-plane axis, m⁴.
    pub second_moment: f64,
    /// Mass density, kg/m³.
    pub density: f64,
}

impl ElementSection {
    pub fn new(area: f64, second_moment: f64, density: f64) -> Result<Self, FeError> {
        let section = Self {
            area,
            second_moment,
            density,
        };
        section.validate()?;
        Ok(section)
    }

    /// Solid rectangle of `width` (out of plane) by `depth` (in the bending plane).
    pub fn rectangle(width: f64, depth: f64, density: f64) -> Result<Self, FeError> {
        Self::new(width * depth, width * depth.powi(3) / 12.0, density)
    }

    pub(crate) fn validate(&self) -> Result<(), FeError> {
        for (name, value) in [
            ("area", self.area),
            ("second_moment", self.second_moment),
            ("density", self.density),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(FeError::InvalidSection { field: name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameElement {
    pub id: usize,
    pub node_a: usize,
    pub node_b: usize,
    pub section: ElementSection,
    /// Modulus of elasticity, Pa.
    pub modulus: f64,
}

/// Length and direction cosines of an element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub length: f64,
    pub cos: f64,
    pub sin: f64,
}

impl ElementGeometry {
    pub fn between(a: &Node, b: &Node, element: usize) -> Result<Self, FeError> {
        let dx = b.x - a.x;
        let dy = b.y - a.y;
        let length = dx.hypot(dy);
        if !(length.is_finite() && length > 0.0) {
            return Err(FeError::DegenerateElement { element, length });
        }
        Ok(Self {
            length,
            cos: dx / length,
            sin: dy / length,
        })
    }
}

/// Local stiffness and consistent mass matrices, DOF order `(u_a, v_a, θ_a, u_b, v_b, θ_b)`.
pub fn element_matrices(
    element: &FrameElement,
    node_a: &Node,
    node_b: &Node,
) -> Result<(ElementMatrix, ElementMatrix), FeError> {
    let geom = ElementGeometry::between(node_a, node_b, element.id)?;
    if !(element.modulus.is_finite() && element.modulus > 0.0) {
        return Err(FeError::InvalidModulus {
            element: element.id,
            value: element.modulus,
        });
    }
    element.section.validate()?;
    Ok(local_matrices(element.modulus, &element.section, geom.length))
}

pub(crate) fn local_matrices(e: f64, s: &ElementSection, l: f64) -> (ElementMatrix, ElementMatrix) {
    let mut k = ElementMatrix::zeros();
    let ea = e * s.area / l;
    k[(0, 0)] = ea;
    k[(0, 3)] = -ea;
    k[(3, 0)] = -ea;
    k[(3, 3)] = ea;

    let ei = e * s.second_moment;
    let bend = [
        [12.0 / l.powi(3), 6.0 / l.powi(2), -12.0 / l.powi(3), 6.0 / l.powi(2)],
        [6.0 / l.powi(2), 4.0 / l, -6.0 / l.powi(2), 2.0 / l],
        [-12.0 / l.powi(3), -6.0 / l.powi(2), 12.0 / l.powi(3), -6.0 / l.powi(2)],
        [6.0 / l.powi(2), 2.0 / l, -6.0 / l.powi(2), 4.0 / l],
    ];
    const BEND_DOFS: [usize; 4] = [1, 2, 4, 5];
    for (r, &i) in BEND_DOFS.iter().enumerate() {
        for (c, &j) in BEND_DOFS.iter().enumerate() {
            k[(i, j)] = ei * bend[r][c];
        }
    }

    let mut m = ElementMatrix::zeros();
    let mass = s.density * s.area * l;
    m[(0, 0)] = mass / 3.0;
    m[(0, 3)] = mass / 6.0;
    m[(3, 0)] = mass / 6.0;
    m[(3, 3)] = mass / 3.0;
    let hermite = [
        [156.0, 22.0 * l, 54.0, -13.0 * l],
        [22.0 * l, 4.0 * l * l, 13.0 * l, -3.0 * l * l],
        [54.0, 13.0 * l, 156.0, -22.0 * l],
        [-13.0 * l, -3.0 * l * l, -22.0 * l, 4.0 * l * l],
    ];
    for (r, &i) in BEND_DOFS.iter().enumerate() {
        for (c, &j) in BEND_DOFS.iter().enumerate() {
            m[(i, j)] = mass / 420.0 * hermite[r][c];
        }
    }
    (k, m)
}

/// Local-from-global transformation `T` such that `d_local = T d_global`.
pub fn rotation(geom: &ElementGeometry) -> ElementMatrix {
    let (c, s) = (geom.cos, geom.sin);
    let block = SMatrix::<f64, 3, 3>::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0);
    let mut t = ElementMatrix::zeros();
    t.fixed_view_mut::<3, 3>(0, 0).copy_from(&block);
    t.fixed_view_mut::<3, 3>(3, 3).copy_from(&block);
    t
}

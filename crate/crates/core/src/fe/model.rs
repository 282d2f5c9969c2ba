use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::element::{local_matrices, rotation, ElementGeometry, FrameElement, Node};
use super::FeError;

/// Degrees of freedom per node: `u`, `v`, `θ`.
pub const DOFS_PER_NODE: usize = 3;

/// Rigid-body modes of an unconstrained planar frame.
pub const PLANAR_RIGID_MODES: usize = 3;

/// Planar frame mesh with per-element moduli and the measured-DOF map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureModel {
    nodes: Vec<Node>,
    elements: Vec<FrameElement>,
    measured_dofs: Vec<usize>,
}

impl StructureModel {
    pub fn new(
        nodes: Vec<Node>,
        elements: Vec<FrameElement>,
        measured_dofs: Vec<usize>,
    ) -> Result<Self, FeError> {
        let model = Self {
            nodes,
            elements,
            measured_dofs,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<(), FeError> {
        if self.nodes.is_empty() || self.elements.is_empty() {
            return Err(FeError::EmptyMesh);
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(FeError::NodeIds { position: i, id: node.id });
            }
            if !(node.x.is_finite() && node.y.is_finite()) {
                return Err(FeError::NonFiniteCoordinate { node: i });
            }
        }
        let n_nodes = self.nodes.len();
        for el in &self.elements {
            for node in [el.node_a, el.node_b] {
                if node >= n_nodes {
                    return Err(FeError::UnknownNode { element: el.id, node });
                }
            }
            if el.node_a == el.node_b {
                return Err(FeError::DegenerateElement {
                    element: el.id,
                    length: 0.0,
                });
            }
            el.section.validate()?;
            if !(el.modulus.is_finite() && el.modulus > 0.0) {
                return Err(FeError::InvalidModulus {
                    element: el.id,
                    value: el.modulus,
                });
            }
            ElementGeometry::between(&self.nodes[el.node_a], &self.nodes[el.node_b], el.id)?;
        }

        let components = self.component_count();
        if components != 1 {
            return Err(FeError::Disconnected { components });
        }

        let n_dofs = self.n_dofs();
        let mut seen = vec![false; n_dofs];
        for &dof in &self.measured_dofs {
            if dof >= n_dofs {
                return Err(FeError::MeasuredDofOutOfRange { dof, n_dofs });
            }
            if std::mem::replace(&mut seen[dof], true) {
                return Err(FeError::DuplicateMeasuredDof { dof });
            }
        }
        Ok(())
    }

    fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for el in &self.elements {
            let a = find(&mut parent, el.node_a);
            let b = find(&mut parent, el.node_b);
            if a != b {
                parent[a] = b;
            }
        }
        (0..parent.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn elements(&self) -> &[FrameElement] {
        &self.elements
    }

    pub fn measured_dofs(&self) -> &[usize] {
        &self.measured_dofs
    }

    pub fn n_dofs(&self) -> usize {
        DOFS_PER_NODE * self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.modulus).collect()
    }

    /// Replaces the measured-DOF map.
    pub fn with_measured_dofs(&self, measured_dofs: Vec<usize>) -> Result<Self, FeError> {
        Self::new(self.nodes.clone(), self.elements.clone(), measured_dofs)
    }

    /// Copy of the model with every element modulus replaced, in element order.
    pub fn apply_parameters(&self, moduli: &[f64]) -> Result<Self, FeError> {
        if moduli.len() != self.elements.len() {
            return Err(FeError::ParameterCount {
                expected: self.elements.len(),
                got: moduli.len(),
            });
        }
        let mut out = self.clone();
        for (el, &e) in out.elements.iter_mut().zip(moduli) {
            if !(e.is_finite() && e > 0.0) {
                return Err(FeError::InvalidModulus {
                    element: el.id,
                    value: e,
                });
            }
            el.modulus = e;
        }
        Ok(out)
    }

    /// Global DOF indices of the element's two nodes.
    pub fn element_dofs(&self, element: &FrameElement) -> [usize; 6] {
        let a = DOFS_PER_NODE * element.node_a;
        let b = DOFS_PER_NODE * element.node_b;
        [a, a + 1, a + 2, b, b + 1, b + 2]
    }

    /// Global stiffness and consistent mass matrices.
    pub fn assemble(&self) -> Result<GlobalMatrices, FeError> {
        let n = self.n_dofs();
        let mut mass = DMatrix::zeros(n, n);
        let mut stiffness = DMatrix::zeros(n, n);
        for el in &self.elements {
            let geom =
                ElementGeometry::between(&self.nodes[el.node_a], &self.nodes[el.node_b], el.id)?;
            let (k, m) = local_matrices(el.modulus, &el.section, geom.length);
            let t = rotation(&geom);
            let tt = t.transpose();
            let kg = tt * k * t;
            let mg = tt * m * t;
            let dofs = self.element_dofs(el);
            for (r, &i) in dofs.iter().enumerate() {
                for (c, &j) in dofs.iter().enumerate() {
                    stiffness[(i, j)] += kg[(r, c)];
                    mass[(i, j)] += mg[(r, c)];
                }
            }
        }
        symmetrize(&mut stiffness);
        symmetrize(&mut mass);
        Ok(GlobalMatrices {
            mass,
            stiffness,
            rigid_body_modes: Some(PLANAR_RIGID_MODES),
        })
    }
}

// Rotation products can leave last-bit asymmetry.
fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// Assembled mass and stiffness matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMatrices {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    /// Number of zero-frequency modes the eigen-solve must find and discard,
    /// or `None` when the count is not known in advance.
    pub rigid_body_modes: Option<usize>,
}

impl GlobalMatrices {
    /// Wraps arbitrary matrices with no rigid-body expectation.
    pub fn new(mass: DMatrix<f64>, stiffness: DMatrix<f64>) -> Result<Self, FeError> {
        if !mass.is_square() || mass.shape() != stiffness.shape() {
            return Err(FeError::MatrixShape {
                mass: mass.shape(),
                stiffness: stiffness.shape(),
            });
        }
        Ok(Self {
            mass,
            stiffness,
            rigid_body_modes: None,
        })
    }

    pub fn with_rigid_body_modes(mut self, count: Option<usize>) -> Self {
        self.rigid_body_modes = count;
        self
    }

    pub fn n_dofs(&self) -> usize {
        self.mass.nrows()
    }
}

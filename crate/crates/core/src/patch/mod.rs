//! Patch regions `U ⊂ 𝕊` and quadrature obtained by masking a global grid.

mod region;

use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::sphere::SphereGrid;
use crate::vsh::GridVectorField;

pub use region::{make_region, PatchRegion, RegionKind, BOUNDARY_TOLERANCE};

/// The nodes of a parent [`SphereGrid`] that lie in a patch, with their weights.
#[derive(Debug, Clone)]
pub struct PatchGrid {
    parent: Arc<SphereGrid>,
    region: Option<PatchRegion>,
    node_indices: Vec<usize>,
    weights: Vec<f64>,
}

/// Masks `grid` by `region`.
pub fn patch_quadrature(region: &PatchRegion, grid: Arc<SphereGrid>) -> Result<PatchGrid> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("grid has no nodes".into()));
    }
    let node_indices: Vec<usize> = grid
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, p)| region.contains(p))
        .map(|(i, _)| i)
        .collect();
    if node_indices.is_empty() {
        return Err(Error::EmptyPatch {
            grid_degree: grid.degree(),
        });
    }
    let weights = node_indices.iter().map(|&i| grid.weights()[i]).collect();
    Ok(PatchGrid {
        parent: grid,
        region: Some(region.clone()),
        node_indices,
        weights,
    })
}

impl PatchGrid {
    /// Every node of `grid`; the full-sphere control case.
    pub fn full_sphere(grid: Arc<SphereGrid>) -> Self {
        let node_indices: Vec<usize> = (0..grid.len()).collect();
        let weights = grid.weights().to_vec();
        Self {
            parent: grid,
            region: None,
            node_indices,
            weights,
        }
    }

    /// Parent nodes not in this patch. Together with `self` this partitions the parent grid.
    pub fn complement(&self) -> Self {
        let mut in_patch = vec![false; self.parent.len()];
        for &i in &self.node_indices {
            in_patch[i] = true;
        }
        let node_indices: Vec<usize> = (0..self.parent.len()).filter(|i| !in_patch[*i]).collect();
        let weights = node_indices.iter().map(|&i| self.parent.weights()[i]).collect();
        Self {
            parent: self.parent.clone(),
            region: self.region.as_ref().map(PatchRegion::complement),
            node_indices,
            weights,
        }
    }

    pub fn parent(&self) -> &Arc<SphereGrid> {
        &self.parent
    }

    pub fn region(&self) -> Option<&PatchRegion> {
        self.region.as_ref()
    }

    pub fn node_indices(&self) -> &[usize] {
        &self.node_indices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.node_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_indices.is_empty()
    }

    pub fn is_full_sphere(&self) -> bool {
        self.len() == self.parent.len()
    }

    /// Quadrature area `Σ w_i`.
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn nodes(&self) -> Vec<Vector3<f64>> {
        self.node_indices.iter().map(|&i| self.parent.nodes()[i]).collect()
    }

    /// Restricts a field sampled on the parent grid to the patch nodes.
    pub fn restrict(&self, field: &GridVectorField) -> Result<GridVectorField> {
        self.check_parent(field)?;
        GridVectorField::new(self.node_indices.iter().map(|&i| field.samples()[i]).collect())
    }

    fn check_parent(&self, field: &GridVectorField) -> Result<()> {
        if field.len() != self.parent.len() {
            return Err(Error::GridMismatch {
                expected: self.parent.len(),
                found: field.len(),
            });
        }
        Ok(())
    }
}

/// `‖f‖_{L²(U)³}` by masked quadrature; `field` is sampled on the parent grid.
pub fn patch_norm(field: &GridVectorField, pg: &PatchGrid) -> Result<f64> {
    pg.check_parent(field)?;
    Ok(pg
        .node_indices
        .iter()
        .zip(&pg.weights)
        .map(|(&i, w)| w * field.samples()[i].norm_squared())
        .sum::<f64>()
        .sqrt())
}

/// `‖f‖_{L²(U)³}` for a field already sampled on the patch nodes.
pub fn patch_norm_on_patch(field: &GridVectorField, pg: &PatchGrid) -> Result<f64> {
    field.weighted_norm(&pg.weights)
}

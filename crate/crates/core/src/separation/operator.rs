use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use super::shell::ShellWeighting;
use crate::error::{Error, Result};
use crate::patch::PatchGrid;
use crate::sphere::legendre::{eval_all_with_gradient, sh_index};
use crate::vsh::{Channel, ChannelCoeffs, GridVectorField, VectorFieldCoeffs, VshFamily};

/// One column of the restriction matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnMeta {
    pub channel: Channel,
    pub n: usize,
    pub k: i64,
    pub column_weight: f64,
}

/// One row: a Cartesian component at a patch node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowMeta {
    /// Index into the parent grid.
    pub node: usize,
    /// 0, 1, 2 for x, y, z.
    pub component: usize,
}

/// Dense discretization of the patch restriction `(f₊, f₋) ↦ (f₊ + f₋)|_U`.
///
/// Rows are `√w_j`-scaled Cartesian components at patch nodes, so the
/// Euclidean norm of `A x` is the discrete L²(U)³ norm of the synthesized
/// field. Columns are ordered (channel, n, k); ext columns carry the shell
/// weight when one is given.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub(crate) matrix: DMatrix<f64>,
    columns: Vec<ColumnMeta>,
    rows: Vec<RowMeta>,
    sqrt_weights: Vec<f64>,
    max_ext: Option<usize>,
    max_int: Option<usize>,
    shell: ShellWeighting,
    warnings: Vec<String>,
}

/// Assembles the restriction operator on `pg` for ext degrees `1..=n_ext` and
/// int degrees `0..=n_int`.
pub fn assemble_restriction(
    n_ext: usize,
    n_int: usize,
    pg: &PatchGrid,
    shell: Option<&ShellWeighting>,
) -> Result<OperatorMatrix> {
    if n_ext < 1 {
        return Err(Error::InvalidParameter("N_ext must be at least 1".into()));
    }
    assemble_modes(Some(n_ext), Some(n_int), pg, shell.copied().unwrap_or(ShellWeighting::disabled()))
}

/// Same as [`assemble_restriction`] with optional channels; used for int-only
/// or ext-only blocks.
pub fn assemble_modes(
    n_ext: Option<usize>,
    n_int: Option<usize>,
    pg: &PatchGrid,
    shell: ShellWeighting,
) -> Result<OperatorMatrix> {
    if pg.is_empty() {
        return Err(Error::EmptyPatch {
            grid_degree: pg.parent().degree(),
        });
    }
    let n_ext = n_ext.filter(|n| *n >= 1);
    let mut columns = Vec::new();
    if let Some(ne) = n_ext {
        for n in 1..=ne {
            for k in -(n as i64)..=(n as i64) {
                columns.push(ColumnMeta {
                    channel: Channel::Ext,
                    n,
                    k,
                    column_weight: shell.column_weight(n),
                });
            }
        }
    }
    if let Some(ni) = n_int {
        for n in 0..=ni {
            for k in -(n as i64)..=(n as i64) {
                columns.push(ColumnMeta {
                    channel: Channel::Int,
                    n,
                    k,
                    column_weight: 1.0,
                });
            }
        }
    }
    if columns.is_empty() {
        return Err(Error::InvalidParameter("operator has no columns".into()));
    }
    let max_degree = n_ext.unwrap_or(0).max(n_int.unwrap_or(0));
    let mut warnings = Vec::new();
    let exact = pg.parent().bandlimit_exact();
    if 2 * max_degree > exact {
        warnings.push(format!(
            "degree {max_degree} exceeds parent grid exactness (products need degree {}, grid integrates {exact})",
            2 * max_degree
        ));
    }

    let nodes = pg.nodes();
    let sqrt_weights: Vec<f64> = pg.weights().iter().map(|w| w.sqrt()).collect();
    let ncol = columns.len();
    let row_blocks: Vec<Vec<f64>> = nodes
        .par_iter()
        .zip(sqrt_weights.par_iter())
        .map(|(p, sw)| {
            let (y, g) = eval_all_with_gradient(p, max_degree);
            let mut block = vec![0.0; 3 * ncol];
            for (j, col) in columns.iter().enumerate() {
                let i = sh_index(col.n, col.k);
                let family = match col.channel {
                    Channel::Ext => VshFamily::Gext,
                    _ => VshFamily::Gint,
                };
                let v: Vector3<f64> = family.combine(col.n, p, y[i], &g[i]) * (sw * col.column_weight);
                block[j] = v.x;
                block[ncol + j] = v.y;
                block[2 * ncol + j] = v.z;
            }
            block
        })
        .collect();
    let data: Vec<f64> = row_blocks.into_iter().flatten().collect();
    let matrix = DMatrix::from_row_slice(3 * nodes.len(), ncol, &data);
    let rows = pg
        .node_indices()
        .iter()
        .flat_map(|&node| (0..3).map(move |component| RowMeta { node, component }))
        .collect();
    Ok(OperatorMatrix {
        matrix,
        columns,
        rows,
        sqrt_weights,
        max_ext: n_ext,
        max_int: n_int,
        shell,
        warnings,
    })
}

impl OperatorMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    pub fn rows(&self) -> &[RowMeta] {
        &self.rows
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Number of patch nodes (rows / 3).
    pub fn node_count(&self) -> usize {
        self.sqrt_weights.len()
    }

    pub fn shell(&self) -> &ShellWeighting {
        &self.shell
    }

    pub fn shell_radius(&self) -> Option<f64> {
        self.shell.radius()
    }

    pub fn max_ext(&self) -> Option<usize> {
        self.max_ext
    }

    pub fn max_int(&self) -> Option<usize> {
        self.max_int
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Indices of the ext columns.
    pub fn ext_columns(&self) -> Vec<usize> {
        self.column_indices(Channel::Ext)
    }

    pub fn int_columns(&self) -> Vec<usize> {
        self.column_indices(Channel::Int)
    }

    fn column_indices(&self, channel: Channel) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.channel == channel)
            .map(|(i, _)| i)
            .collect()
    }

    /// Submatrix made of the given columns.
    pub fn select_columns(&self, cols: &[usize]) -> DMatrix<f64> {
        self.matrix.select_columns(cols.iter())
    }

    /// `√w`-scaled data vector from samples at the patch nodes.
    pub fn data_vector(&self, d: &GridVectorField) -> Result<DVector<f64>> {
        if d.len() != self.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "data has {} samples, operator has {} patch nodes",
                d.len(),
                self.node_count()
            )));
        }
        let mut b = DVector::zeros(self.nrows());
        for (j, (v, sw)) in d.samples().iter().zip(&self.sqrt_weights).enumerate() {
            for c in 0..3 {
                b[3 * j + c] = sw * v[c];
            }
        }
        Ok(b)
    }

    /// Column-space vector (ext entries divided by their column weight) for field coefficients.
    pub fn solution_vector(&self, coeffs: &VectorFieldCoeffs) -> DVector<f64> {
        DVector::from_iterator(
            self.ncols(),
            self.columns.iter().map(|c| {
                coeffs.channel(c.channel).get_or_zero(c.n, c.k) / c.column_weight
            }),
        )
    }

    /// Field coefficients (ext de-weighted to field-on-𝕊 units) from a column-space vector.
    pub fn coeffs_from_solution(&self, x: &DVector<f64>) -> VectorFieldCoeffs {
        let mut ext = match self.max_ext {
            Some(n) => ChannelCoeffs::zeros(Channel::Ext, n),
            None => ChannelCoeffs::empty(Channel::Ext),
        };
        let mut int = match self.max_int {
            Some(n) => ChannelCoeffs::zeros(Channel::Int, n),
            None => ChannelCoeffs::empty(Channel::Int),
        };
        for (c, v) in self.columns.iter().zip(x.iter()) {
            let target = match c.channel {
                Channel::Ext => &mut ext,
                _ => &mut int,
            };
            target.set(c.n, c.k, v * c.column_weight).expect("slot exists");
        }
        VectorFieldCoeffs {
            ext,
            int,
            ..VectorFieldCoeffs::empty()
        }
    }

    /// `A x` reshaped to patch samples (undoing the `√w` row scaling).
    pub fn apply_to_field(&self, x: &DVector<f64>) -> GridVectorField {
        let y = &self.matrix * x;
        let samples = self
            .sqrt_weights
            .iter()
            .enumerate()
            .map(|(j, sw)| Vector3::new(y[3 * j], y[3 * j + 1], y[3 * j + 2]) / *sw)
            .collect();
        GridVectorField::new(samples).expect("finite")
    }
}

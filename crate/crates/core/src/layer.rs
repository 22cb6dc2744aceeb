//! Boundary layer operators on the unit sphere, represented by their
//! eigenvalues on the scalar harmonics.
//!
//! | operator | eigenvalue on `Y_{n,k}` |
//! |----------|-------------------------|
//! | `S`      | `−1/(2n+1)`             |
//! | `S⁻¹`    | `−(2n+1)`               |
//! | `K = K*` | `1/(2(2n+1))`           |
//! | `K + ½`  | `(n+1)/(2n+1)`          |
//! | `K − ½`  | `−n/(2n+1)`             |
//!
//! The adjoint B-operators map scalar densities to vector fields:
//! `B_o* = η(K* − ½) + ∇_𝕊 S` and `B_i* = η(K* + ½) + ∇_𝕊 S`. On the sphere
//! they land in single channels, `B_o* Y_{n,k} = −G^ext_{n,k}/(2n+1)` and
//! `B_i* Y_{n,k} = −G^int_{n,k}/(2n+1)`; `B_o*` annihilates degree 0.

use nalgebra::Vector3;

use crate::sphere::{sh_gradient_synthesis, sh_synthesis, ShCoeffs};
use crate::vsh::{Channel, ChannelCoeffs, VectorFieldCoeffs};

/// The spherical layer operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralOperator {
    S,
    Sinv,
    K,
    KplusHalf,
    KminusHalf,
}

impl SpectralOperator {
    pub fn eigenvalue(self, n: usize) -> f64 {
        let n = n as f64;
        let m = 2.0 * n + 1.0;
        match self {
            SpectralOperator::S => -1.0 / m,
            SpectralOperator::Sinv => -m,
            SpectralOperator::K => 1.0 / (2.0 * m),
            SpectralOperator::KplusHalf => (n + 1.0) / m,
            SpectralOperator::KminusHalf => -n / m,
        }
    }
}

/// `c_{n,k} ↦ λ(n) c_{n,k}`.
pub fn apply_spectral_op(op: SpectralOperator, c: &ShCoeffs) -> ShCoeffs {
    c.map_degrees(|n| op.eigenvalue(n))
}

/// `B_o* g`: pure ext channel, `a_{n,k} = −g_{n,k}/(2n+1)`; degree 0 is dropped.
pub fn apply_bo_star(g: &ShCoeffs) -> VectorFieldCoeffs {
    let mut ext = ChannelCoeffs::zeros(Channel::Ext, g.max_degree());
    for (n, k, v) in g.iter().filter(|(n, _, _)| *n >= 1) {
        ext.set(n, k, -v / (2 * n + 1) as f64).expect("slot exists");
    }
    VectorFieldCoeffs {
        ext,
        ..VectorFieldCoeffs::empty()
    }
}

/// `B_i* g`: pure int channel, `b_{n,k} = −g_{n,k}/(2n+1)` for all `n ≥ 0`.
pub fn apply_bi_star(g: &ShCoeffs) -> VectorFieldCoeffs {
    let mut int = ChannelCoeffs::zeros(Channel::Int, g.max_degree());
    for (n, k, v) in g.iter() {
        int.set(n, k, -v / (2 * n + 1) as f64).expect("slot exists");
    }
    VectorFieldCoeffs {
        int,
        ..VectorFieldCoeffs::empty()
    }
}

/// Evaluates `η (K* ∓ ½) g + ∇_𝕊 S g` at `points` term by term from scalar
/// syntheses, without going through the vector channel basis.
///
/// `outer = true` gives `B_o* g`, `false` gives `B_i* g`.
pub fn assemble_b_star_termwise(g: &ShCoeffs, points: &[Vector3<f64>], outer: bool) -> Vec<Vector3<f64>> {
    let normal_op = if outer {
        SpectralOperator::KminusHalf
    } else {
        SpectralOperator::KplusHalf
    };
    let normal = sh_synthesis(&apply_spectral_op(normal_op, g), points);
    let tangential = sh_gradient_synthesis(&apply_spectral_op(SpectralOperator::S, g), points);
    points
        .iter()
        .zip(normal)
        .zip(tangential)
        .map(|((p, a), t)| p / p.norm() * a + t)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereGrid;
    use crate::vsh::vector_synthesis;

    #[test]
    fn single_layer_on_dipole() {
        let c = ShCoeffs::unit(3, 1, 0).unwrap();
        let s = apply_spectral_op(SpectralOperator::S, &c);
        assert!((s.get(1, 0).unwrap() + 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn k_minus_half_kills_monopole() {
        let c = ShCoeffs::unit(2, 0, 0).unwrap();
        let out = apply_spectral_op(SpectralOperator::KminusHalf, &c);
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn k_plus_half_on_degree_one() {
        for k in -1..=1 {
            let c = ShCoeffs::unit(1, 1, k).unwrap();
            let out = apply_spectral_op(SpectralOperator::KplusHalf, &c);
            assert!((out.get(1, k).unwrap() - 2.0 / 3.0).abs() < 1e-16);
        }
    }

    #[test]
    fn eigenvalue_identities() {
        for n in 0..60 {
            let s = SpectralOperator::S.eigenvalue(n);
            let si = SpectralOperator::Sinv.eigenvalue(n);
            assert!((s * si - 1.0).abs() < 1e-15);
            let k = SpectralOperator::K.eigenvalue(n);
            assert!((k + 0.5 - SpectralOperator::KplusHalf.eigenvalue(n)).abs() < 1e-15);
            assert!((k - 0.5 - SpectralOperator::KminusHalf.eigenvalue(n)).abs() < 1e-15);
        }
    }

    #[test]
    fn bo_star_on_modes() {
        let out = apply_bo_star(&ShCoeffs::unit(2, 1, 0).unwrap());
        assert!((out.ext.get(1, 0).unwrap() + 1.0 / 3.0).abs() < 1e-16);
        assert!(out.int.is_empty() && out.df.is_empty());
        let out = apply_bo_star(&ShCoeffs::unit(2, 0, 0).unwrap());
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn bi_star_on_modes() {
        let out = apply_bi_star(&ShCoeffs::unit(2, 1, 0).unwrap());
        assert!((out.int.get(1, 0).unwrap() + 1.0 / 3.0).abs() < 1e-16);
        let out = apply_bi_star(&ShCoeffs::unit(2, 0, 0).unwrap());
        assert!((out.int.get(0, 0).unwrap() + 1.0).abs() < 1e-16);
        assert!(out.ext.is_empty() && out.df.is_empty());
    }

    #[test]
    fn monopole_bi_star_matches_termwise() {
        let grid = SphereGrid::gauss(2);
        let g = ShCoeffs::unit(0, 0, 0).unwrap();
        let a = vector_synthesis(&apply_bi_star(&g), grid.nodes());
        let b = assemble_b_star_termwise(&g, grid.nodes(), false);
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}

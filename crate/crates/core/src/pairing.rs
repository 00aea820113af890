//! Quadrature of the weighted duality pairings.
//!
//! All the distributional identities on a bounded domain integrate a field
//! `u` against `L* zeta` in the eigenfunction-weighted measure. Multiplying
//! through by the weight removes every division by it:
//!
//! `\int u (L* zeta) gamma dx = \int u (-lap zeta + ell zeta) gamma dx
//!                              - 2 \int u <grad gamma, grad zeta> dx`
//!
//! so the drift term needs the weight's gradient (piecewise constant for P1)
//! but never its reciprocal, which is what keeps the quadrature stable in the
//! boundary layer where both the weight and its gradient-to-value ratio
//! degenerate.

use crate::discretize::GridFunction;
use crate::error::Result;
use crate::geometry::GradedMesh;
use crate::halfspace::RadialTest;
use crate::real::Real;
use crate::spectral::{beta_as_field, beta_density, EigenPair};
use crate::discretize::SparseSystem;

/// Eigenfunction weight rescaled to the half-space boundary normalization,
/// with its first eigenvalue and boundary density.
#[derive(Debug, Clone)]
pub struct DualityWeight<T> {
    pub gamma: GridFunction<T>,
    pub ell: T,
    /// Boundary density (nodal, zero off the boundary), same normalization.
    pub beta: Vec<T>,
}

impl<T: Real> DualityWeight<T> {
    /// Build from an eigenpair: rescales by the fitted boundary constant so
    /// the weight matches `rho |x|^{a-1}` with unit constant near the
    /// singular point.
    pub fn new(sys: &SparseSystem<T>, pair: &EigenPair<T>) -> Result<Self> {
        let mesh = &sys.mesh;
        let gamma = pair.boundary_normalized();
        let bd = beta_density(pair, mesh, sys.mu)?;
        let mut beta = beta_as_field(&bd, mesh.len());
        let inv = pair.c1_hat.recip();
        for b in &mut beta {
            *b *= inv;
        }
        Ok(DualityWeight { gamma, ell: pair.ell, beta })
    }

    /// `\int u (L* zeta - [mu V] zeta) dGamma` with dGamma = gamma dx; the
    /// optional potential subtraction serves the commutation identity of the
    /// plain-harmonic Poisson potential.
    pub fn dual_pairing(
        &self,
        mesh: &GradedMesh<T>,
        u: &GridFunction<T>,
        zeta: &RadialTest<T>,
        subtract_mu_v: Option<T>,
    ) -> T {
        let dim = mesh.domain.dim;
        let mut acc = T::zero();
        // nodal part: u gamma (-lap zeta + ell zeta - [mu V zeta])
        for i in 0..mesh.len() {
            let r2 = mesh.radius[i] * mesh.radius[i];
            let s = r2;
            let mut term = zeta.neg_laplacian_sq(s, dim) + self.ell * zeta.value_sq(s);
            if let Some(mu) = subtract_mu_v {
                if r2 > T::zero() {
                    term -= mu / r2 * zeta.value_sq(s);
                }
            }
            acc += mesh.weight[i] * u.values[i] * self.gamma.values[i] * term;
        }
        // drift part: -2 \int u <grad gamma, grad zeta> dx
        for (cell, tri) in mesh.cells.iter().enumerate() {
            let [a, b, c] = *tri;
            let pa = mesh.coords[a];
            let pb = mesh.coords[b];
            let pc = mesh.coords[c];
            let det = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
            let g = [
                [(pb[1] - pc[1]) / det, (pc[0] - pb[0]) / det],
                [(pc[1] - pa[1]) / det, (pa[0] - pc[0]) / det],
                [(pa[1] - pb[1]) / det, (pb[0] - pa[0]) / det],
            ];
            let mut grad_gamma = [T::zero(), T::zero()];
            for (k, &node) in tri.iter().enumerate() {
                grad_gamma[0] += g[k][0] * self.gamma.values[node];
                grad_gamma[1] += g[k][1] * self.gamma.values[node];
            }
            let third = T::of(1.0 / 3.0);
            let cx = (pa[0] + pb[0] + pc[0]) * third;
            let cy = (pa[1] + pb[1] + pc[1]) * third;
            let s_c = cx * cx + cy * cy;
            let gz = zeta.gradient_factor(s_c);
            let grad_zeta = [gz * cx, gz * cy];
            let u_c = (u.values[a] + u.values[b] + u.values[c]) * third;
            let dot = grad_gamma[0] * grad_zeta[0] + grad_gamma[1] * grad_zeta[1];
            acc -= T::of(2.0) * mesh.cell_measure[cell] * u_c * dot;
        }
        acc
    }

    /// `\int zeta f dGamma` for a nodal density f.
    pub fn volume_pairing(
        &self,
        mesh: &GradedMesh<T>,
        f: &GridFunction<T>,
        zeta: &RadialTest<T>,
    ) -> T {
        let mut acc = T::zero();
        for i in 0..mesh.len() {
            let s = mesh.radius[i] * mesh.radius[i];
            acc += mesh.weight[i] * f.values[i] * self.gamma.values[i] * zeta.value_sq(s);
        }
        acc
    }

    /// `\int zeta d(beta lambda)` for a nodal boundary density lambda.
    pub fn boundary_pairing(
        &self,
        mesh: &GradedMesh<T>,
        lambda: &[T],
        zeta: &RadialTest<T>,
    ) -> T {
        let mut acc = T::zero();
        for i in 0..mesh.len() {
            if mesh.bdry_weight[i] > T::zero() {
                let s = mesh.radius[i] * mesh.radius[i];
                acc += mesh.bdry_weight[i]
                    * lambda[i]
                    * self.beta[i]
                    * zeta.value_sq(s);
            }
        }
        acc
    }

    /// Plain boundary mass `\int lambda dS` of a nodal density.
    pub fn surface_mass(&self, mesh: &GradedMesh<T>, lambda: &[T]) -> T {
        lambda
            .iter()
            .zip(&mesh.bdry_weight)
            .map(|(&l, &w)| l * w)
            .sum()
    }
}

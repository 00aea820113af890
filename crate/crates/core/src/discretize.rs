//! P1 finite-element discretization of `-lap(u) + mu V(x) u` on a graded
//! mesh, with the potential sampled at nodes and mass-lumped.
//!
//! The potential `V = 1/|x|^2` (or its truncation `max(eps^-2, |x|^-2)`)
//! varies fastest exactly where the grading concentrates nodes, so nodal
//! sampling with lumped weights keeps the assembly simple without losing the
//! graded accuracy. Rows and columns of constrained nodes are eliminated,
//! never penalized.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::GradedMesh;
use crate::halfspace::critical_coupling;
use crate::real::Real;
use crate::sparse::{dot, pcg, CooBuilder, CsrMatrix, SolveStats};

/// Relative residual demanded of every linear solve.
pub const SOLVER_TOL: f64 = 1e-11;

/// Scalar field sampled on mesh nodes, boundary layer included.
#[derive(Debug, Clone)]
pub struct GridFunction<T> {
    pub values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn zeros(n: usize) -> Self {
        GridFunction { values: vec![T::zero(); n] }
    }

    pub fn from_fn(mesh: &GradedMesh<T>, f: impl Fn([T; 2]) -> T) -> Self {
        GridFunction { values: mesh.coords.iter().map(|&x| f(x)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(-T::infinity(), T::max)
    }

    pub fn scaled(&self, a: T) -> Self {
        GridFunction { values: self.values.iter().map(|&v| v * a).collect() }
    }

    pub fn axpy(&mut self, a: T, other: &Self) {
        for (v, &o) in self.values.iter_mut().zip(&other.values) {
            *v += a * o;
        }
    }

    /// Weighted L2 norm against the mesh quadrature weights.
    pub fn l2_norm(&self, mesh: &GradedMesh<T>) -> T {
        self.values
            .iter()
            .zip(&mesh.weight)
            .map(|(&v, &w)| v * v * w)
            .sum::<T>()
            .sqrt()
    }

    /// Integral against the mesh quadrature weights.
    pub fn integral(&self, mesh: &GradedMesh<T>) -> T {
        self.values.iter().zip(&mesh.weight).map(|(&v, &w)| v * w).sum()
    }
}

/// Which potential the operator carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential<T> {
    /// V = 1/|x|^2.
    Exact,
    /// V = max(eps^-2, |x|^-2): bounded, used by the kernel constructions.
    Truncated { eps: T },
}

impl<T: Real> Potential<T> {
    pub fn eval(&self, radius: T) -> T {
        match *self {
            Potential::Exact => (radius * radius).recip(),
            Potential::Truncated { eps } => (radius * radius).max(eps * eps).recip(),
        }
    }
}

/// Assembled operator: P1 stiffness plus the lumped potential diagonal.
#[derive(Debug, Clone)]
pub struct SparseSystem<T> {
    pub mesh: Arc<GradedMesh<T>>,
    pub mu: T,
    pub potential: Potential<T>,
    /// Stiffness over all nodes (boundary rows included, for elimination and
    /// residual evaluation).
    stiff: CsrMatrix<T>,
    /// mu * V(x_i) * w_i per node.
    pot_diag: Vec<T>,
    /// Interior system with the mesh boundary eliminated.
    reduced: CsrMatrix<T>,
    dof_of: Vec<Option<usize>>,
    node_of: Vec<usize>,
}

impl<T: Real> SparseSystem<T> {
    /// Assemble for coupling `mu` and the requested potential variant.
    pub fn assemble(mesh: &Arc<GradedMesh<T>>, mu: T, potential: Potential<T>) -> Result<Self> {
        let dim = mesh.domain.dim;
        let mu1 = critical_coupling::<T>(dim);
        if mu < mu1 {
            return Err(Error::MuBelowCritical {
                mu: mu.to_f64_lossy(),
                mu1: mu1.to_f64_lossy(),
                dim,
            });
        }
        for i in 0..mesh.len() {
            if !mesh.boundary[i] && mesh.radius[i] == T::zero() {
                return Err(Error::SingularNode { node: i });
            }
        }

        let n = mesh.len();
        let mut coo = CooBuilder::new(n);
        for (cell, tri) in mesh.cells.iter().enumerate() {
            let [a, b, c] = *tri;
            let pa = mesh.coords[a];
            let pb = mesh.coords[b];
            let pc = mesh.coords[c];
            let det = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
            let area = det.abs() * T::of(0.5);
            // P1 gradients
            let grads = [
                [(pb[1] - pc[1]) / det, (pc[0] - pb[0]) / det],
                [(pc[1] - pa[1]) / det, (pa[0] - pc[0]) / det],
                [(pa[1] - pb[1]) / det, (pb[0] - pa[0]) / det],
            ];
            // cell_measure already carries the revolution factor for dim 3
            let scale = mesh.cell_measure[cell] / area;
            for i in 0..3 {
                for j in 0..3 {
                    let v = (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1])
                        * area
                        * scale;
                    coo.add(tri[i], tri[j], v);
                }
            }
        }
        let stiff = coo.build();

        let pot_diag: Vec<T> = (0..n)
            .map(|i| {
                if mesh.boundary[i] && mesh.radius[i] == T::zero() {
                    T::zero()
                } else {
                    mu * potential.eval(mesh.radius[i]) * mesh.weight[i]
                }
            })
            .collect();

        let constrained: Vec<Option<T>> =
            mesh.boundary.iter().map(|&b| if b { Some(T::zero()) } else { None }).collect();
        let (reduced, dof_of, node_of) = reduce(&stiff, &pot_diag, &constrained);

        Ok(SparseSystem {
            mesh: Arc::clone(mesh),
            mu,
            potential,
            stiff,
            pot_diag,
            reduced,
            dof_of,
            node_of,
        })
    }

    pub fn interior_count(&self) -> usize {
        self.node_of.len()
    }

    /// Apply the full operator (stiffness + potential) to nodal values; rows
    /// of boundary nodes carry the coupling into the interior and are what
    /// the elimination subtracts.
    pub fn apply_full(&self, u: &[T]) -> Vec<T> {
        let mut y = self.stiff.apply(u);
        for i in 0..y.len() {
            y[i] += self.pot_diag[i] * u[i];
        }
        y
    }

    /// Relative asymmetry of the assembled interior operator.
    pub fn symmetry_defect(&self) -> T {
        self.reduced.symmetry_defect()
    }

    /// Positive-definiteness probe: CG on a seeded random load must not see
    /// nonpositive curvature. Failure is reported, never patched.
    pub fn probe_spd(&self, seed: u64) -> Result<SolveStats<T>> {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(seed);
        let b: Vec<T> = (0..self.interior_count())
            .map(|_| T::of(rng.gen_range(-1.0..1.0f64)))
            .collect();
        let mut x = vec![T::zero(); b.len()];
        pcg(&self.reduced, &b, &mut x, T::of(1e-6), 40 * b.len().max(200))
    }

    /// Dirichlet solve with load density `rhs` (integrated against the mesh
    /// weights) and boundary values `bdry` on the mesh boundary nodes.
    pub fn solve_dirichlet(
        &self,
        rhs: &GridFunction<T>,
        bdry: &GridFunction<T>,
    ) -> Result<(GridFunction<T>, SolveStats<T>)> {
        let n = self.mesh.len();
        let mut load = vec![T::zero(); n];
        for i in 0..n {
            load[i] = rhs.values[i] * self.mesh.weight[i];
        }
        let constrained: Vec<Option<T>> = (0..n)
            .map(|i| if self.mesh.boundary[i] { Some(bdry.values[i]) } else { None })
            .collect();
        self.solve_constrained_with(&constrained, &load, &self.reduced, &self.dof_of, &self.node_of)
    }

    /// Dirichlet solve on an arbitrary constrained set (used by the
    /// exhaustion construction, which excises a ball around the origin).
    /// `constrained[i] = Some(g)` pins node i to g; the rest are unknowns.
    pub fn solve_custom(
        &self,
        constrained: &[Option<T>],
        load: &[T],
    ) -> Result<(GridFunction<T>, SolveStats<T>)> {
        let (reduced, dof_of, node_of) = reduce(&self.stiff, &self.pot_diag, constrained);
        self.solve_constrained_with(constrained, load, &reduced, &dof_of, &node_of)
    }

    fn solve_constrained_with(
        &self,
        constrained: &[Option<T>],
        load: &[T],
        reduced: &CsrMatrix<T>,
        dof_of: &[Option<usize>],
        node_of: &[usize],
    ) -> Result<(GridFunction<T>, SolveStats<T>)> {
        let m = node_of.len();
        let mut rhs = vec![T::zero(); m];
        for (dof, &node) in node_of.iter().enumerate() {
            rhs[dof] = load[node];
        }
        // subtract the coupling of constrained values
        for (node, g) in constrained.iter().enumerate() {
            let Some(g) = *g else { continue };
            if g == T::zero() {
                continue;
            }
            for k in self.stiff.row_ptr[node]..self.stiff.row_ptr[node + 1] {
                let col = self.stiff.cols[k];
                if let Some(dof) = dof_of[col] {
                    // symmetric: column contribution equals the stored row entry
                    rhs[dof] -= self.stiff.vals[k] * g;
                }
            }
        }
        let mut x = vec![T::zero(); m];
        let stats = pcg(reduced, &rhs, &mut x, T::of(SOLVER_TOL), 200 * m.max(400))?;
        let mut out = GridFunction::zeros(self.mesh.len());
        for (node, g) in constrained.iter().enumerate() {
            if let Some(g) = *g {
                out.values[node] = g;
            }
        }
        for (dof, &node) in node_of.iter().enumerate() {
            out.values[node] = x[dof];
        }
        Ok((out, stats))
    }

    /// The energy `\int |grad u|^2 + mu \int u^2/|x|^2` by mesh quadrature,
    /// for fields vanishing on the boundary.
    pub fn quadratic_form(&self, u: &GridFunction<T>) -> T {
        let su = self.stiff.apply(&u.values);
        let grad_part = dot(&su, &u.values);
        let pot_part: T = u
            .values
            .iter()
            .zip(&self.pot_diag)
            .map(|(&v, &d)| d * v * v)
            .sum();
        grad_part + pot_part
    }

    /// Gradient energy alone.
    pub fn gradient_energy(&self, u: &GridFunction<T>) -> T {
        let su = self.stiff.apply(&u.values);
        dot(&su, &u.values)
    }

    /// Interior residual `||A u - w rhs||_2 / scale` of a nodal field against
    /// a load density, skipping constrained nodes: the admissibility gate for
    /// trace recovery. Nodes with radius below `skip_radius` are ignored.
    pub fn interior_residual(
        &self,
        u: &GridFunction<T>,
        rhs: &GridFunction<T>,
        skip_radius: T,
    ) -> T {
        let au = self.apply_full(&u.values);
        let diag = self.stiff.diagonal();
        let mut num = T::zero();
        let mut den = T::zero();
        for i in 0..self.mesh.len() {
            if self.mesh.boundary[i] || self.mesh.radius[i] <= skip_radius {
                continue;
            }
            let load = rhs.values[i] * self.mesh.weight[i];
            let r = au[i] - load;
            num += r * r;
            // scale: what the row would produce on a field of this size
            let row_scale = (diag[i] + self.pot_diag[i].abs()) * u.values[i].abs();
            den += row_scale.max(load.abs()).powi(2);
        }
        if den == T::zero() {
            T::zero()
        } else {
            (num / den).sqrt()
        }
    }

    /// Both sides of the boundary-Hardy remainder at the critical coupling:
    /// lhs = `\int |grad u|^2 + mu_1 \int u^2/|x|^2`,
    /// rhs = `(1/4) \int u^2 / (|x|^2 ln^2(|x|/R))`.
    /// `u` must vanish on the boundary.
    pub fn hardy_remainder_check(&self, u: &GridFunction<T>) -> (T, T) {
        let mesh = &self.mesh;
        let mu1 = critical_coupling::<T>(mesh.domain.dim);
        let r_omega = mesh.domain.r_omega();
        let su = self.stiff.apply(&u.values);
        let mut lhs = dot(&su, &u.values);
        let mut rhs = T::zero();
        for i in 0..mesh.len() {
            if mesh.boundary[i] {
                continue;
            }
            let v = u.values[i];
            let r2 = mesh.radius[i] * mesh.radius[i];
            lhs += mu1 * v * v / r2 * mesh.weight[i];
            let log = (mesh.radius[i] / r_omega).ln();
            rhs += T::of(0.25) * v * v / (r2 * log * log) * mesh.weight[i];
        }
        (lhs, rhs)
    }
}

/// Reduce a full matrix (stiffness + diagonal) to the free nodes of a
/// constraint vector.
fn reduce<T: Real>(
    stiff: &CsrMatrix<T>,
    pot_diag: &[T],
    constrained: &[Option<T>],
) -> (CsrMatrix<T>, Vec<Option<usize>>, Vec<usize>) {
    let n = stiff.n;
    let mut dof_of = vec![None; n];
    let mut node_of = Vec::new();
    for (node, c) in constrained.iter().enumerate() {
        if c.is_none() {
            dof_of[node] = Some(node_of.len());
            node_of.push(node);
        }
    }
    let mut coo = CooBuilder::new(node_of.len());
    for (dof, &node) in node_of.iter().enumerate() {
        for k in stiff.row_ptr[node]..stiff.row_ptr[node + 1] {
            if let Some(dj) = dof_of[stiff.cols[k]] {
                coo.add(dof, dj, stiff.vals[k]);
            }
        }
        coo.add(dof, dof, pot_diag[node]);
    }
    (coo.build(), dof_of, node_of)
}

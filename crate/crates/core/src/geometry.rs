//! Domains tangent to the boundary hyperplane at the origin, and graded
//! meshes over them.
//!
//! The primary test domain is the ball of radius `c` centered at `c e_N`: it
//! sits in the upper half-space, touches the hyperplane exactly at the
//! origin, and makes the distance-to-boundary function, the normals, and the
//! tangency constant all closed-form. In three dimensions everything this
//! crate solves on the ball is zonally symmetric, so the 3D domain is meshed
//! as its meridian half-disk and integrals carry the surface-of-revolution
//! weight `2 pi * (distance to the axis)`.
//!
//! Mesh chart: a node sits at `center + s*c*(sin phi, -cos phi)` so that
//! `s = 1` is the boundary sphere, `(s, phi) = (1, 0)` is the origin, and the
//! distance to the boundary is exactly `c (1 - s)`. Both `1 - s` and `phi`
//! are graded with exponent `q` toward the origin corner, which also yields
//! boundary-layer resolution everywhere on the sphere.

use std::io::Write as IoWrite;

use crate::error::{Error, Result};
use crate::real::Real;

/// Ball of radius `c` centered at `c e_N`; `0 < c <= 1/2` keeps it inside the
/// unit ball as the singular-solution log branch requires.
#[derive(Debug, Clone, Copy)]
pub struct TangentBall<T> {
    pub dim: usize,
    pub radius: T,
}

impl<T: Real> TangentBall<T> {
    pub fn new(dim: usize, radius: T) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDim { dim });
        }
        assert!(
            radius > T::zero() && radius <= T::of(0.5),
            "tangent ball radius must lie in (0, 1/2]"
        );
        Ok(TangentBall { dim, radius })
    }

    /// Largest |z| over the closure: the antipode of the origin.
    pub fn r_omega(&self) -> T {
        T::of(2.0) * self.radius
    }

    /// Distance to the boundary sphere, exact: `c - |x - c e_N|`.
    /// Coordinates are planar for dim = 2 and meridian (dist-to-axis, height)
    /// for dim = 3; the formula is the same in both charts.
    pub fn rho(&self, x: [T; 2]) -> T {
        let c = self.radius;
        let dx = x[0];
        let dy = x[1] - c;
        c - (dx * dx + dy * dy).sqrt()
    }

    /// Outward unit normal at a boundary point.
    pub fn outward_normal(&self, x: [T; 2]) -> [T; 2] {
        let c = self.radius;
        let dx = x[0];
        let dy = x[1] - c;
        let n = (dx * dx + dy * dy).sqrt();
        [dx / n, dy / n]
    }

    /// Boundary point at chart angle phi (phi = 0 is the origin).
    pub fn boundary_point(&self, phi: T) -> [T; 2] {
        let c = self.radius;
        [c * phi.sin(), c * (T::one() - phi.cos())]
    }

    /// Tangency constant of condition |<x, n>| <= C |x|^2 (exact: 1/(2c)).
    pub fn tangency_constant(&self) -> T {
        (T::of(2.0) * self.radius).recip()
    }

    /// Exact volume (area for dim = 2).
    pub fn volume(&self) -> T {
        let c = self.radius;
        match self.dim {
            2 => T::pi() * c * c,
            _ => T::of(4.0 / 3.0) * T::pi() * c * c * c,
        }
    }

    /// Exact boundary measure of the level set {rho = delta}.
    pub fn level_set_measure(&self, delta: T) -> T {
        let r = self.radius - delta;
        match self.dim {
            2 => T::of(2.0) * T::pi() * r,
            _ => T::of(4.0) * T::pi() * r * r,
        }
    }
}

/// Nodes on concentric rings around the ball center, graded toward the
/// origin corner of the chart, triangulated, with quadrature weights for the
/// volume, the boundary, and each ring.
#[derive(Debug, Clone)]
pub struct GradedMesh<T> {
    pub domain: TangentBall<T>,
    pub h: T,
    pub q: T,
    /// Ring count: ring 0 is the boundary, ring `n_rings` is the center node.
    pub n_rings: usize,
    /// Angular slots per ring (full circle for dim 2, meridian for dim 3).
    pub n_ang: usize,
    pub coords: Vec<[T; 2]>,
    /// Exact distance to the boundary per node.
    pub rho: Vec<T>,
    /// Distance to the singular point per node.
    pub radius: Vec<T>,
    /// Lumped volume quadrature weight per node.
    pub weight: Vec<T>,
    pub boundary: Vec<bool>,
    /// Ring index per node (the layer structure of the level sets of rho).
    pub layer: Vec<usize>,
    pub cells: Vec<[usize; 3]>,
    /// Measure of each cell (area, or revolved area for dim 3).
    pub cell_measure: Vec<T>,
    /// Surface quadrature weight on boundary nodes, zero elsewhere.
    pub bdry_weight: Vec<T>,
    /// Chart angle phi per node.
    pub phi: Vec<T>,
    /// Chart ring parameter t = 1 - s per ring.
    pub ring_t: Vec<T>,
    origin: usize,
    center: usize,
}

impl<T: Real> GradedMesh<T> {
    /// Build a graded mesh with nominal boundary spacing `h` and grading
    /// exponent `q >= 1` toward the origin.
    pub fn build(domain: TangentBall<T>, h: T, q: T) -> Result<Self> {
        assert!(q >= T::one(), "grading exponent must be >= 1");
        let c = domain.radius;
        let n_rings = (q * c / h).to_f64_lossy().ceil() as usize;
        if n_rings < 10 {
            return Err(Error::MeshTooCoarse {
                detail: format!(
                    "h = {} gives {} rings; at least 10 are needed to separate the origin \
                     scale from the domain scale",
                    h, n_rings
                ),
            });
        }
        let m = ((q * T::pi() * c / h).to_f64_lossy().ceil() as usize).max(12);
        let full_circle = domain.dim == 2;
        // Angular slots: full circle has 2m distinct angles (seam at +-pi),
        // the meridian keeps both endpoints.
        let n_ang = if full_circle { 2 * m } else { m + 1 };

        let qf = q;
        let ring_t: Vec<T> = (0..=n_rings)
            .map(|i| T::of(i as f64 / n_rings as f64).powf(qf))
            .collect();
        let ang_of = |slot: usize| -> T {
            if full_circle {
                // slots 0..2m map to j in [-m, m): j = slot - m
                let j = slot as i64 - m as i64;
                let frac = T::of(j.unsigned_abs() as f64 / m as f64).powf(qf);
                let sign = if j < 0 { -T::one() } else { T::one() };
                sign * T::pi() * frac
            } else {
                T::pi() * T::of(slot as f64 / m as f64).powf(qf)
            }
        };

        let mut coords = Vec::new();
        let mut phi_all = Vec::new();
        let mut layer = Vec::new();
        let mut boundary = Vec::new();
        for (i, &t) in ring_t.iter().enumerate().take(n_rings) {
            let s = T::one() - t;
            for slot in 0..n_ang {
                let phi = ang_of(slot);
                coords.push([c * s * phi.sin(), c * (T::one() - s * phi.cos())]);
                phi_all.push(phi);
                layer.push(i);
                boundary.push(i == 0);
            }
        }
        // Center node.
        let center = coords.len();
        coords.push([T::zero(), c]);
        phi_all.push(T::zero());
        layer.push(n_rings);
        boundary.push(false);

        let node = |ring: usize, slot: usize| -> usize { ring * n_ang + slot % n_ang };
        let mut cells = Vec::new();
        let seg = if full_circle { n_ang } else { n_ang - 1 };
        for ring in 0..n_rings - 1 {
            for sl in 0..seg {
                let a = node(ring, sl);
                let b = node(ring, sl + 1);
                let a1 = node(ring + 1, sl);
                let b1 = node(ring + 1, sl + 1);
                cells.push([a, b, b1]);
                cells.push([a, b1, a1]);
            }
        }
        for sl in 0..seg {
            let a = node(n_rings - 1, sl);
            let b = node(n_rings - 1, sl + 1);
            cells.push([a, b, center]);
        }

        let n = coords.len();
        let mut weight = vec![T::zero(); n];
        let mut cell_measure = Vec::with_capacity(cells.len());
        let two_pi = T::of(2.0) * T::pi();
        for tri in &cells {
            let [a, b, cc] = *tri;
            let area = tri_area(coords[a], coords[b], coords[cc]);
            debug_assert!(area > T::zero(), "degenerate or inverted cell");
            if full_circle {
                cell_measure.push(area);
                for &v in tri {
                    weight[v] += area / T::of(3.0);
                }
            } else {
                // Revolved measure; distribute with the per-vertex moment of
                // the axis distance so the weights stay exact for P1 fields.
                let r = [coords[a][0], coords[b][0], coords[cc][0]];
                let rc = (r[0] + r[1] + r[2]) / T::of(3.0);
                cell_measure.push(two_pi * rc * area);
                for (k, &v) in tri.iter().enumerate() {
                    let moment = (T::of(2.0) * r[k] + r[(k + 1) % 3] + r[(k + 2) % 3])
                        / T::of(12.0);
                    weight[v] += two_pi * area * moment;
                }
            }
        }

        let mut rho = Vec::with_capacity(n);
        let mut radius = Vec::with_capacity(n);
        for (i, &xy) in coords.iter().enumerate() {
            rho.push(c * ring_t.get(layer[i]).copied().unwrap_or(T::one()));
            radius.push((xy[0] * xy[0] + xy[1] * xy[1]).sqrt());
        }
        // The origin node is exactly the chart corner; pin its coordinates.
        let origin = node(0, if full_circle { m } else { 0 });
        // slot with phi = 0 on ring 0
        let origin = if full_circle {
            (0..n_ang).find(|&sl| ang_of(sl) == T::zero()).map(|sl| node(0, sl)).unwrap_or(origin)
        } else {
            node(0, 0)
        };
        coords[origin] = [T::zero(), T::zero()];
        radius[origin] = T::zero();

        // Boundary surface weights from the ring-0 polyline (revolved for 3D).
        let mut bdry_weight = vec![T::zero(); n];
        for sl in 0..seg {
            let a = node(0, sl);
            let b = node(0, sl + 1);
            let dx = coords[a][0] - coords[b][0];
            let dy = coords[a][1] - coords[b][1];
            let len = (dx * dx + dy * dy).sqrt();
            if full_circle {
                bdry_weight[a] += len * T::of(0.5);
                bdry_weight[b] += len * T::of(0.5);
            } else {
                // split the revolved band by each endpoint's axis distance
                let rm = (coords[a][0] + coords[b][0]) * T::of(0.5);
                bdry_weight[a] += two_pi * len * (coords[a][0] + rm) * T::of(0.25);
                bdry_weight[b] += two_pi * len * (coords[b][0] + rm) * T::of(0.25);
            }
        }

        let mesh = GradedMesh {
            domain,
            h,
            q,
            n_rings,
            n_ang,
            coords,
            rho,
            radius,
            weight,
            boundary,
            layer,
            cells,
            cell_measure,
            bdry_weight,
            phi: phi_all,
            ring_t,
            origin,
            center,
        };
        Ok(mesh)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn origin_node(&self) -> usize {
        self.origin
    }

    pub fn center_node(&self) -> usize {
        self.center
    }

    pub fn node_id(&self, ring: usize, slot: usize) -> usize {
        if ring == self.n_rings {
            self.center
        } else {
            ring * self.n_ang + slot % self.n_ang
        }
    }

    /// Nodes of one ring.
    pub fn ring_nodes(&self, ring: usize) -> Vec<usize> {
        if ring == self.n_rings {
            vec![self.center]
        } else {
            (0..self.n_ang).map(|sl| self.node_id(ring, sl)).collect()
        }
    }

    /// The straight ray from the origin to the ball center: nodes at phi = 0
    /// with their distance to the origin, innermost first, origin excluded.
    pub fn axis_profile(&self) -> Vec<(usize, T)> {
        let slot0 = (0..self.n_ang)
            .find(|&sl| {
                let id = self.node_id(1, sl);
                self.phi[id] == T::zero()
            })
            .expect("phi = 0 column exists");
        let mut out = Vec::new();
        for ring in 1..self.n_rings {
            let id = self.node_id(ring, slot0);
            out.push((id, self.domain.radius * self.ring_t[ring]));
        }
        out.push((self.center, self.domain.radius));
        out
    }

    /// Boundary nodes ordered by chart angle, origin excluded.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.n_ang)
            .map(|sl| self.node_id(0, sl))
            .filter(|&id| id != self.origin)
            .collect()
    }

    /// Interior node straight inside a boundary node, `steps` rings deep.
    /// The chart rays are exactly the inward normals of the ball.
    pub fn inward_offset(&self, bnode: usize, steps: usize) -> Result<usize> {
        let slot = bnode % self.n_ang;
        if steps >= self.n_rings {
            return Err(Error::OffsetOutsideMesh {
                node: bnode,
                offset: self.domain.radius.to_f64_lossy(),
            });
        }
        Ok(self.node_id(steps, slot))
    }

    /// Depth below the boundary of ring `i` (the exact rho there).
    pub fn ring_depth(&self, ring: usize) -> T {
        self.domain.radius * self.ring_t[ring.min(self.n_rings)]
    }

    /// Ring whose depth is closest to `delta`, along with its nodes and
    /// surface weights; errors when no ring resolves the level.
    pub fn boundary_layer(&self, delta: T) -> Result<LayerSet<T>> {
        let c = self.domain.radius;
        if delta > c {
            return Err(Error::LayerUnresolved { delta: delta.to_f64_lossy() });
        }
        let mut best = 0usize;
        let mut best_err = T::infinity();
        for ring in 0..=self.n_rings {
            let err = (self.ring_depth(ring) - delta).abs();
            if err < best_err {
                best_err = err;
                best = ring;
            }
        }
        // local spacing around the chosen ring
        let lo = self.ring_depth(best.saturating_sub(1));
        let hi = self.ring_depth((best + 1).min(self.n_rings));
        let local = (hi - lo).abs() * T::of(0.5).max(T::of(1e-300));
        if best_err > local.max(T::of(1e-12) * c) {
            return Err(Error::LayerUnresolved { delta: delta.to_f64_lossy() });
        }
        let nodes = self.ring_nodes(best);
        let weights = self.ring_surface_weights(best);
        Ok(LayerSet { ring: best, depth: self.ring_depth(best), nodes, weights })
    }

    /// Surface weights of one ring polyline (revolved in 3D).
    pub fn ring_surface_weights(&self, ring: usize) -> Vec<T> {
        if ring == self.n_rings {
            return vec![T::zero()];
        }
        let full_circle = self.domain.dim == 2;
        let seg = if full_circle { self.n_ang } else { self.n_ang - 1 };
        let mut w = vec![T::zero(); self.n_ang];
        let two_pi = T::of(2.0) * T::pi();
        for sl in 0..seg {
            let a = self.node_id(ring, sl);
            let b = self.node_id(ring, sl + 1);
            let dx = self.coords[a][0] - self.coords[b][0];
            let dy = self.coords[a][1] - self.coords[b][1];
            let len = (dx * dx + dy * dy).sqrt();
            if full_circle {
                w[sl] += len * T::of(0.5);
                w[(sl + 1) % self.n_ang] += len * T::of(0.5);
            } else {
                w[sl] += two_pi * len * T::of(0.5) * self.coords[a][0].max(T::zero());
                w[sl + 1] += two_pi * len * T::of(0.5) * self.coords[b][0].max(T::zero());
            }
        }
        w
    }

    /// P1 interpolation of nodal values at an arbitrary interior point.
    pub fn interpolate(&self, values: &[T], x: [T; 2]) -> T {
        let c = self.domain.radius;
        let dx = x[0];
        let dy = x[1] - c;
        let dist = (dx * dx + dy * dy).sqrt();
        let s = (dist / c).min(T::one());
        let t = T::one() - s;
        let phi = dx.atan2(-dy); // angle from the downward direction
        // ring interval: t_i = (i/n)^q  =>  i = n * t^{1/q}
        let n = self.n_rings as f64;
        let fi = n * t.to_f64_lossy().max(0.0).powf(1.0 / self.q.to_f64_lossy());
        let ring = (fi.floor() as usize).min(self.n_rings - 1);
        // angular interval
        let full_circle = self.domain.dim == 2;
        let m = if full_circle { self.n_ang / 2 } else { self.n_ang - 1 };
        let frac = (phi.abs() / T::pi()).to_f64_lossy().clamp(0.0, 1.0);
        let fj = m as f64 * frac.powf(1.0 / self.q.to_f64_lossy());
        let j = (fj.floor() as usize).min(m - 1);
        let (sl0, sl1) = if full_circle {
            if phi >= T::zero() {
                (m + j, (m + j + 1) % self.n_ang)
            } else {
                (m - j, m - j - 1)
            }
        } else {
            (j, j + 1)
        };
        // two candidate triangles of the chart quad
        let quad = [
            self.node_id(ring, sl0),
            self.node_id(ring, sl1),
            self.node_id(ring + 1, sl1),
            self.node_id(ring + 1, sl0),
        ];
        let tris = [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]];
        let mut best = T::infinity();
        let mut val = T::zero();
        for tri in tris {
            let (bary, slack) = barycentric(
                self.coords[tri[0]],
                self.coords[tri[1]],
                self.coords[tri[2]],
                x,
            );
            if slack < best {
                best = slack;
                val = bary[0] * values[tri[0]]
                    + bary[1] * values[tri[1]]
                    + bary[2] * values[tri[2]];
            }
        }
        val
    }

    /// Quadrature points and weights on the sphere-arc {|x| = eps} inside the
    /// domain (a circular arc in the plane, a revolved cap boundary in 3D).
    pub fn sphere_arc_rule(&self, eps: T, points: usize) -> Vec<([T; 2], T)> {
        let c = self.domain.radius;
        let mut out = Vec::with_capacity(points);
        let (xs, ws) = crate::quad::gauss_legendre::<T>(points);
        if self.domain.dim == 2 {
            // x = eps (cos th, sin th), inside iff sin th > eps/(2c)
            let th0 = (eps / (T::of(2.0) * c)).min(T::one()).asin();
            let a = th0;
            let b = T::pi() - th0;
            let half = (b - a) * T::of(0.5);
            let mid = (a + b) * T::of(0.5);
            for (&x, &w) in xs.iter().zip(&ws) {
                let th = mid + half * x;
                out.push(([eps * th.cos(), eps * th.sin()], w * half * eps));
            }
        } else {
            // meridian point (eps sin TH, eps cos TH), inside iff cos TH > eps/(2c)
            let thmax = (eps / (T::of(2.0) * c)).min(T::one()).acos();
            let half = thmax * T::of(0.5);
            let mid = half;
            let two_pi = T::of(2.0) * T::pi();
            for (&x, &w) in xs.iter().zip(&ws) {
                let th = mid + half * x;
                let meas = two_pi * eps * eps * th.sin() * w * half;
                out.push(([eps * th.sin(), eps * th.cos()], meas));
            }
        }
        out
    }

    /// Direction angle from the origin (measured against e_1 in the chart
    /// plane) per node: used to pull conical windows back to the rings.
    pub fn direction_angle(&self, node: usize) -> T {
        let [x, y] = self.coords[node];
        y.atan2(x)
    }

    /// Write the flat node table: id, coords, rho, weight, boundary flag.
    pub fn write_nodes_csv<W: IoWrite>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "id,x1,x2,rho,weight,boundary")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                i,
                self.coords[i][0].to_f64_lossy(),
                self.coords[i][1].to_f64_lossy(),
                self.rho[i].to_f64_lossy(),
                self.weight[i].to_f64_lossy(),
                self.boundary[i] as u8
            )?;
        }
        Ok(())
    }

    /// Write the flat cell table: id, three node ids, measure.
    pub fn write_cells_csv<W: IoWrite>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "id,n0,n1,n2,measure")?;
        for (i, tri) in self.cells.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{:.17e}",
                i,
                tri[0],
                tri[1],
                tri[2],
                self.cell_measure[i].to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

/// Node set approximating a level set {rho = delta}.
#[derive(Debug, Clone)]
pub struct LayerSet<T> {
    pub ring: usize,
    pub depth: T,
    pub nodes: Vec<usize>,
    pub weights: Vec<T>,
}

fn tri_area<T: Real>(a: [T; 2], b: [T; 2], c: [T; 2]) -> T {
    ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs() * T::of(0.5)
}

/// Barycentric coordinates of x in triangle (a, b, c) plus the worst
/// negativity (zero when x is inside).
fn barycentric<T: Real>(a: [T; 2], b: [T; 2], c: [T; 2], x: [T; 2]) -> ([T; 3], T) {
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let l1 = ((b[0] - x[0]) * (c[1] - x[1]) - (c[0] - x[0]) * (b[1] - x[1])) / det;
    let l2 = ((c[0] - x[0]) * (a[1] - x[1]) - (a[0] - x[0]) * (c[1] - x[1])) / det;
    let l3 = T::one() - l1 - l2;
    let slack = -(l1.min(l2).min(l3).min(T::zero()));
    ([l1, l2, l3], slack)
}

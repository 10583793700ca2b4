//! Global numbering, saddle-point assembly, solve and error norms.
//!
//! Unknowns are ordered `[u | phi | p]`: interior vertex divergence values and
//! interior face normal means for `u`, interior edges for `phi`, interior
//! vertices for `p`. Boundary DOFs are eliminated (fixed to zero).

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;

use crate::calculus::field::ScalarField;
use crate::calculus::{cell_integral_exact, domain_integral_exact, integrate, Entity, PolyVector, Polynomial};
use crate::edge::EdgeLocal;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::graddiv::GradDivLocal;
use crate::mesh::{GeometryCache, PolyMesh};
use crate::scalar::ScalarLocal;
use crate::sparse::CsrMatrix;

/// Quadrature exactness for local forms and for analytic data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureOptions {
    pub assembly: usize,
    pub analytic: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            assembly: 6,
            analytic: 20,
        }
    }
}

/// All local matrices of one cell.
#[derive(Clone, Debug)]
pub struct CellForms {
    pub element: Element,
    pub scalar: ScalarLocal,
    pub edge: EdgeLocal,
    pub graddiv: GradDivLocal,
}

impl CellForms {
    pub fn new(element: Element) -> Self {
        let scalar = ScalarLocal::new(&element);
        let edge = EdgeLocal::new(&element);
        let graddiv = GradDivLocal::new(&element, &scalar);
        Self {
            element,
            scalar,
            edge,
            graddiv,
        }
    }

    /// Global full-V indices of the local grad-div DOFs.
    pub fn v_indices(&self, num_vertices: usize) -> Vec<usize> {
        let e = &self.element;
        e.vertices
            .iter()
            .copied()
            .chain(e.faces.iter().map(|f| num_vertices + f.face))
            .collect()
    }

    /// Local curl map: edge DOFs to grad-div DOFs.
    pub fn curl_map(&self) -> DMatrix<f64> {
        let e = &self.element;
        let nv = e.num_vertices();
        let mut c = DMatrix::zeros(nv + e.num_faces(), e.num_edges());
        for (k, f) in e.faces.iter().enumerate() {
            for (i, &le) in f.loop_edges.iter().enumerate() {
                c[(nv + k, le)] += f.loop_signs[i] * e.edge_lengths[le] / f.area;
            }
        }
        c
    }

    /// Local gradient map: vertex values to edge DOFs.
    pub fn grad_map(&self) -> DMatrix<f64> {
        let e = &self.element;
        let mut g = DMatrix::zeros(e.num_edges(), e.num_vertices());
        for (k, &[a, b]) in e.edge_ends.iter().enumerate() {
            g[(k, a)] -= 1.0 / e.edge_lengths[k];
            g[(k, b)] += 1.0 / e.edge_lengths[k];
        }
        g
    }
}

/// A mesh with its geometry and every local form.
#[derive(Clone, Debug)]
pub struct Discretization<'m> {
    pub mesh: &'m PolyMesh,
    pub geometry: &'m GeometryCache,
    pub quadrature: QuadratureOptions,
    pub cells: Vec<CellForms>,
}

impl<'m> Discretization<'m> {
    pub fn new(mesh: &'m PolyMesh, geometry: &'m GeometryCache, quadrature: QuadratureOptions) -> Result<Self> {
        let cells = (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| Element::new(mesh, geometry, c, quadrature.assembly).map(CellForms::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            mesh,
            geometry,
            quadrature,
            cells,
        })
    }

    /// Size of a full grad-div DOF vector (every vertex, then every face).
    pub fn num_v_dofs(&self) -> usize {
        self.mesh.num_vertices() + self.mesh.num_faces()
    }
}

/// Interior DOF numbering of the three fields.
#[derive(Clone, Debug)]
pub struct GlobalNumbering {
    pub u_vertex: Vec<Option<usize>>,
    pub u_face: Vec<Option<usize>>,
    pub phi_edge: Vec<Option<usize>>,
    pub p_vertex: Vec<Option<usize>>,
    pub n_u: usize,
    pub n_phi: usize,
    pub n_p: usize,
}

impl GlobalNumbering {
    pub fn new(mesh: &PolyMesh) -> Self {
        fn number(count: usize, boundary: impl Fn(usize) -> bool, start: usize) -> (Vec<Option<usize>>, usize) {
            let mut next = start;
            let map = (0..count)
                .map(|i| {
                    (!boundary(i)).then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect();
            (map, next - start)
        }
        let (u_vertex, nuv) = number(mesh.num_vertices(), |v| mesh.is_boundary_vertex(v), 0);
        let (u_face, nuf) = number(mesh.num_faces(), |f| mesh.is_boundary_face(f), nuv);
        let n_u = nuv + nuf;
        let (phi_edge, n_phi) = number(mesh.num_edges(), |e| mesh.is_boundary_edge(e), n_u);
        let (p_vertex, n_p) = number(mesh.num_vertices(), |v| mesh.is_boundary_vertex(v), n_u + n_phi);
        Self {
            u_vertex,
            u_face,
            phi_edge,
            p_vertex,
            n_u,
            n_phi,
            n_p,
        }
    }

    pub fn total(&self) -> usize {
        self.n_u + self.n_phi + self.n_p
    }

    /// System index of a full-V DOF (vertex, then face).
    pub fn u_index(&self, full: usize) -> Option<usize> {
        let nv = self.u_vertex.len();
        if full < nv {
            self.u_vertex[full]
        } else {
            self.u_face[full - nv]
        }
    }
}

#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub numbering: GlobalNumbering,
    /// Cellwise means of the source.
    pub source_means: Vec<f64>,
}

impl SaddleSystem {
    /// Coordinate text dump: a `rows cols nnz` header, one 0-based
    /// `row col value` line per stored entry, then one line per rhs entry.
    pub fn write_coordinate<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let m = &self.matrix;
        writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
        for (i, j, v) in m.triplets() {
            writeln!(w, "{i} {j} {v:.17e}")?;
        }
        for v in &self.rhs {
            writeln!(w, "{v:.17e}")?;
        }
        Ok(())
    }
}

/// Cell means `(1/|K|) int_K j`: exact for polynomials, otherwise by
/// quadrature of the analytic exactness.
pub fn cell_means(disc: &Discretization, j: &dyn ScalarField) -> Result<Vec<f64>> {
    let (mesh, geo) = (disc.mesh, disc.geometry);
    (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let integral = match j.as_polynomial() {
                Some(p) => cell_integral_exact(mesh, geo, c, p)?,
                None => integrate(mesh, geo, Entity::Cell(c), |x| j.value(x), disc.quadrature.analytic)?,
            };
            Ok(integral / geo.cells[c].volume)
        })
        .collect()
}

/// Assembles the three-field system with right-hand side `(j_h, div v)`.
pub fn assemble_system(disc: &Discretization, j: &dyn ScalarField) -> Result<SaddleSystem> {
    let mesh = disc.mesh;
    let numbering = GlobalNumbering::new(mesh);
    let n = numbering.total();
    if n == 0 || numbering.n_u == 0 {
        return Err(Error::DegenerateSystem(
            "every degree of freedom lies on the boundary".into(),
        ));
    }
    let means = cell_means(disc, j)?;
    let nv_mesh = mesh.num_vertices();

    let blocks: Vec<(Vec<(usize, usize, f64)>, Vec<(usize, f64)>)> = disc
        .cells
        .par_iter()
        .zip(&means)
        .map(|(cf, &jk)| {
            let e = &cf.element;
            let u_idx: Vec<Option<usize>> = cf.v_indices(nv_mesh).iter().map(|&g| numbering.u_index(g)).collect();
            let phi_idx: Vec<Option<usize>> = e.edges.iter().map(|&g| numbering.phi_edge[g]).collect();
            let p_idx: Vec<Option<usize>> = e.vertices.iter().map(|&g| numbering.p_vertex[g]).collect();
            let b_curl = &cf.graddiv.mass * cf.curl_map();
            let c_grad = &cf.edge.product * cf.grad_map();
            let mut t = Vec::new();
            for (a, ia) in u_idx.iter().enumerate() {
                let Some(ia) = *ia else { continue };
                for (b, ib) in u_idx.iter().enumerate() {
                    if let Some(ib) = *ib {
                        t.push((ia, ib, cf.graddiv.stiffness[(a, b)]));
                    }
                }
                for (b, ib) in phi_idx.iter().enumerate() {
                    if let Some(ib) = *ib {
                        t.push((ia, ib, b_curl[(a, b)]));
                        t.push((ib, ia, b_curl[(a, b)]));
                    }
                }
            }
            for (a, ia) in phi_idx.iter().enumerate() {
                let Some(ia) = *ia else { continue };
                for (b, ib) in p_idx.iter().enumerate() {
                    if let Some(ib) = *ib {
                        t.push((ia, ib, c_grad[(a, b)]));
                        t.push((ib, ia, c_grad[(a, b)]));
                    }
                }
            }
            let nv = e.num_vertices();
            let rhs = e
                .faces
                .iter()
                .enumerate()
                .filter_map(|(k, f)| u_idx[nv + k].map(|i| (i, jk * f.sign * f.area)))
                .collect();
            (t, rhs)
        })
        .collect();

    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n];
    for (t, r) in blocks {
        triplets.extend(t);
        for (i, v) in r {
            rhs[i] += v;
        }
    }
    Ok(SaddleSystem {
        matrix: CsrMatrix::from_triplets(n, n, &triplets),
        rhs,
        numbering,
        source_means: means,
    })
}

/// Solution split into full-length fields (boundary entries zero).
#[derive(Clone, Debug)]
pub struct Solution {
    /// Every vertex (divergence values), then every face (normal means).
    pub u: Vec<f64>,
    /// Every edge.
    pub phi: Vec<f64>,
    /// Every vertex.
    pub p: Vec<f64>,
    /// Relative residual, or absolute when the right-hand side vanishes.
    pub residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sparse LU solve with iterative refinement until the residual target holds.
pub fn solve_system(system: &SaddleSystem, tol: f64) -> Result<Solution> {
    let n = system.rhs.len();
    let rhs_norm = norm(&system.rhs);
    let scale = if rhs_norm > 0.0 { rhs_norm } else { 1.0 };
    let target = if rhs_norm > 0.0 { tol } else { 1e-12 };

    let triplets: Vec<Triplet<usize, usize, f64>> = system
        .matrix
        .triplets()
        .into_iter()
        .map(|(i, j, v)| Triplet::new(i, j, v))
        .collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::DegenerateSystem(format!("sparse matrix construction failed: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::DegenerateSystem(format!("factorization failed: {e:?}")))?;

    let mut x = vec![0.0; n];
    let mut r = system.rhs.clone();
    let mut residual = norm(&r) / scale;
    for _ in 0..5 {
        if residual <= target {
            break;
        }
        let rc = Col::<f64>::from_fn(n, |i| r[i]);
        let dx = lu.solve(&rc);
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += dx[i];
        }
        let ax = system.matrix.matvec(&x);
        r = system.rhs.iter().zip(&ax).map(|(b, y)| b - y).collect();
        residual = norm(&r) / scale;
    }
    if !(residual <= target) {
        return Err(Error::SolverFailure { residual, target });
    }

    let nb = &system.numbering;
    let scatter = |map: &[Option<usize>]| -> Vec<f64> { map.iter().map(|i| i.map_or(0.0, |i| x[i])).collect() };
    let mut u = scatter(&nb.u_vertex);
    u.extend(scatter(&nb.u_face));
    Ok(Solution {
        u,
        phi: scatter(&nb.phi_edge),
        p: scatter(&nb.p_vertex),
        residual,
    })
}

fn gather(indices: impl Iterator<Item = usize>, full: &[f64]) -> DVector<f64> {
    DVector::from_iterator(indices.size_hint().0, indices.map(|i| full[i]))
}

/// `sqrt(b_h(v, v))` for a full grad-div DOF vector.
pub fn norm_b(disc: &Discretization, v: &[f64]) -> f64 {
    let nv = disc.mesh.num_vertices();
    disc.cells
        .iter()
        .map(|cf| {
            let d = gather(cf.v_indices(nv).into_iter(), v);
            d.dot(&(&cf.graddiv.mass * &d))
        })
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// `sqrt(c_h(phi, phi))` for a full edge DOF vector.
pub fn norm_c(disc: &Discretization, phi: &[f64]) -> f64 {
    disc.cells
        .iter()
        .map(|cf| {
            let d = gather(cf.element.edges.iter().copied(), phi);
            d.dot(&(&cf.edge.product * &d))
        })
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// Nodal norm `sqrt(h^3 sum p_i^2)`.
pub fn norm_p(disc: &Discretization, p: &[f64]) -> f64 {
    (disc.geometry.mesh_size().powi(3) * p.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// `||I_h u - u_h||_h` in the discrete L2 product of the grad-div space.
pub fn error_norm_h(disc: &Discretization, interpolant: &[f64], u_h: &[f64]) -> f64 {
    let diff: Vec<f64> = interpolant.iter().zip(u_h).map(|(a, b)| a - b).collect();
    norm_b(disc, &diff)
}

/// Projected divergence errors `(||div u - P div u_h||, |div u - P div u_h|_1)`
/// with `P` the cell Pi-nabla projection, integrated exactly.
pub fn error_div_diagnostics(
    disc: &Discretization,
    div_u: &Polynomial,
    grad_div_u: &PolyVector,
    u_h: &[f64],
) -> Result<(f64, f64)> {
    let (mesh, geo) = (disc.mesh, disc.geometry);
    let nv = mesh.num_vertices();

    // antiderivatives in x of g, g x, g y, g z for the cell moments
    let coords = [Polynomial::coordinate(0), Polynomial::coordinate(1), Polynomial::coordinate(2)];
    let mut weighted = vec![div_u.antiderivative(0)];
    weighted.extend(coords.iter().map(|c| (div_u * c).antiderivative(0)));
    let anti_degree = weighted.iter().map(Polynomial::degree).max().unwrap_or(0);

    let face_data: Vec<([f64; 4], f64)> = (0..mesh.num_faces())
        .into_par_iter()
        .map(|f| {
            let rule = crate::calculus::quadrature_rule(mesh, geo, Entity::Face(f), div_u.degree())?;
            let g_integral = rule.integrate(|x| div_u.eval(x));
            let mut moments = [0.0; 4];
            if geo.faces[f].normal.x.abs() >= 1e-15 {
                let rule = crate::calculus::quadrature_rule(mesh, geo, Entity::Face(f), anti_degree)?;
                for (k, p) in weighted.iter().enumerate() {
                    moments[k] = rule.integrate(|x| p.eval(x));
                }
            }
            Ok((moments, g_integral))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cross_l2 = 0.0;
    let mut proj_l2 = 0.0;
    let mut cross_h1 = 0.0;
    let mut proj_h1 = 0.0;
    for cf in &disc.cells {
        let e = &cf.element;
        let d = gather(cf.v_indices(nv).into_iter(), u_h);
        let c = cf.graddiv.div_pi_nabla(&cf.scalar, d.as_slice());
        let grad_p = Vector3::new(c[1], c[2], c[3]) / e.diameter;

        let mut g_int = 0.0;
        let mut gx_int = Vector3::zeros();
        let mut grad_g_int = Vector3::zeros();
        for f in &e.faces {
            let (m, gi) = &face_data[f.face];
            let nx = f.sign * f.normal.x;
            g_int += nx * m[0];
            gx_int += Vector3::new(m[1], m[2], m[3]) * nx;
            grad_g_int += f.normal * (f.sign * gi);
        }
        let g_centered = gx_int - e.centroid * g_int;
        let coeffs = nalgebra::Vector4::new(c[0], c[1], c[2], c[3]);
        cross_l2 += c[0] * g_int + grad_p.dot(&g_centered);
        proj_l2 += coeffs.dot(&(cf.scalar.gram * coeffs));
        cross_h1 += grad_p.dot(&grad_g_int);
        proj_h1 += grad_p.norm_squared() * e.volume;
    }
    let g2 = domain_integral_exact(mesh, geo, &(div_u * div_u))?;
    let grad2 = (0..3)
        .map(|k| domain_integral_exact(mesh, geo, &(&grad_div_u.0[k] * &grad_div_u.0[k])))
        .sum::<Result<f64>>()?;
    let l2 = (g2 - 2.0 * cross_l2 + proj_l2).max(0.0).sqrt();
    let h1 = (grad2 - 2.0 * cross_h1 + proj_h1).max(0.0).sqrt();
    Ok((l2, h1))
}

//! DOF-level de Rham maps `grad: U -> Sigma`, `curl: Sigma -> V`,
//! `div: V -> W` and their verification.
//!
//! Global DOF layouts: U by vertex, Sigma by edge, V by vertex (divergence
//! values) then face (normal means), W by vertex then cell (means).

use std::fmt::Write as _;

use nalgebra::{DMatrix, Vector3};

use crate::calculus::{cell_integral_exact, PolyVector, Polynomial};
use crate::error::Result;
use crate::graddiv::interpolate_v;
use crate::mesh::{GeometryCache, PolyMesh};
use crate::sparse::CsrMatrix;

/// Which DOFs the maps act on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Interior DOFs only; boundary traces are fixed to zero. W keeps every
    /// cell mean.
    Constrained,
    /// Every DOF, boundary included.
    Free,
}

/// Selected entities with their positions in a DOF vector.
#[derive(Clone, Debug, Default)]
pub struct Selection {
    pub entities: Vec<usize>,
    index: Vec<Option<usize>>,
}

impl Selection {
    fn new(count: usize, keep: impl Fn(usize) -> bool) -> Self {
        let mut index = vec![None; count];
        let mut entities = Vec::new();
        for (e, slot) in index.iter_mut().enumerate() {
            if keep(e) {
                *slot = Some(entities.len());
                entities.push(e);
            }
        }
        Self { entities, index }
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn get(&self, entity: usize) -> Option<usize> {
        self.index[entity]
    }
}

#[derive(Clone, Debug)]
pub struct ComplexMaps {
    pub mode: BoundaryMode,
    pub vertices: Selection,
    pub edges: Selection,
    pub faces: Selection,
    /// `n_phi x n_p`.
    pub grad: CsrMatrix,
    /// `n_u x n_phi`.
    pub curl: CsrMatrix,
    /// `n_w x n_u`.
    pub div: CsrMatrix,
}

impl ComplexMaps {
    pub fn n_p(&self) -> usize {
        self.vertices.len()
    }
    pub fn n_phi(&self) -> usize {
        self.edges.len()
    }
    pub fn n_u(&self) -> usize {
        self.vertices.len() + self.faces.len()
    }
    pub fn n_w(&self) -> usize {
        self.div.nrows()
    }
    pub fn total_dofs(&self) -> usize {
        self.n_p() + self.n_phi() + self.n_u() + self.n_w()
    }
}

pub fn build_complex_maps(mesh: &PolyMesh, geo: &GeometryCache, mode: BoundaryMode) -> ComplexMaps {
    let free = mode == BoundaryMode::Free;
    let vertices = Selection::new(mesh.num_vertices(), |v| free || !mesh.is_boundary_vertex(v));
    let edges = Selection::new(mesh.num_edges(), |e| free || !mesh.is_boundary_edge(e));
    let faces = Selection::new(mesh.num_faces(), |f| free || !mesh.is_boundary_face(f));
    let nv = vertices.len();

    let mut t = Vec::new();
    for (row, &e) in edges.entities.iter().enumerate() {
        let [a, b] = mesh.edge(e);
        let len = geo.edges[e].length;
        if let Some(j) = vertices.get(a) {
            t.push((row, j, -1.0 / len));
        }
        if let Some(j) = vertices.get(b) {
            t.push((row, j, 1.0 / len));
        }
    }
    let grad = CsrMatrix::from_triplets(edges.len(), nv, &t);

    let mut t = Vec::new();
    for (k, &f) in faces.entities.iter().enumerate() {
        for fe in mesh.face_edges(f) {
            if let Some(j) = edges.get(fe.edge) {
                t.push((nv + k, j, f64::from(fe.sign) * geo.edges[fe.edge].length / geo.faces[f].area));
            }
        }
    }
    let curl = CsrMatrix::from_triplets(nv + faces.len(), edges.len(), &t);

    let mut t: Vec<_> = (0..nv).map(|i| (i, i, 1.0)).collect();
    for c in 0..mesh.num_cells() {
        for sf in mesh.cell(c) {
            if let Some(k) = faces.get(sf.face) {
                t.push((nv + c, nv + k, sf.sign_f64() * geo.faces[sf.face].area / geo.cells[c].volume));
            }
        }
    }
    let div = CsrMatrix::from_triplets(nv + mesh.num_cells(), nv + faces.len(), &t);

    ComplexMaps {
        mode,
        vertices,
        edges,
        faces,
        grad,
        curl,
        div,
    }
}

/// Numerical rank with singular values above `1e-9 * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-9 * max).count()
}

/// A polynomial field used to check commutativity.
#[derive(Clone, Debug)]
pub struct SampleField {
    pub name: String,
    pub u: PolyVector,
}

impl SampleField {
    pub fn new(name: impl Into<String>, u: PolyVector) -> Self {
        Self { name: name.into(), u }
    }

    /// The standard samples `grad(x^2 + y^2 + z^2)` and `(x^2, 0, 0)`.
    pub fn standard() -> Vec<Self> {
        let r2 = Polynomial::from_terms([([2, 0, 0], 1.0), ([0, 2, 0], 1.0), ([0, 0, 2], 1.0)]);
        let x2 = Polynomial::monomial([2, 0, 0], 1.0);
        vec![
            Self::new("grad(x^2+y^2+z^2)", r2.gradient()),
            Self::new("(x^2,0,0)", PolyVector([x2, Polynomial::zero(), Polynomial::zero()])),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct Ranks {
    pub grad: usize,
    pub curl: usize,
    pub div: usize,
    /// `max |w^T D|` for the cell-volume weight vector `w`.
    pub mean_zero_residual: f64,
}

#[derive(Clone, Debug)]
pub struct ComplexReport {
    pub n_p: usize,
    pub n_phi: usize,
    pub n_u: usize,
    pub n_w: usize,
    /// `max |C G|`, `max |D C|` on interior DOFs.
    pub curl_grad: f64,
    pub div_curl: f64,
    /// The same compositions on all DOFs.
    pub curl_grad_free: f64,
    pub div_curl_free: f64,
    /// `None` when the mesh exceeds the size cap.
    pub ranks: Option<Ranks>,
    /// `(sample name, max |D I_h v - J_h div v|)`.
    pub commutativity: Vec<(String, f64)>,
}

/// Size cap for dense rank computations.
pub const RANK_DOF_CAP: usize = 5000;

impl ComplexReport {
    /// `rank G = n_p`, `rank C = n_phi - n_p`, `rank D = n_u - rank C` and
    /// `rank D = n_w - 1`.
    pub fn ranks_exact(&self) -> Option<bool> {
        self.ranks.as_ref().map(|r| {
            let rc = self.n_phi as i64 - self.n_p as i64;
            r.grad == self.n_p
                && r.curl as i64 == rc
                && r.div as i64 == self.n_u as i64 - rc
                && r.div + 1 == self.n_w
        })
    }

    /// `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n_p={}", self.n_p);
        let _ = writeln!(s, "n_phi={}", self.n_phi);
        let _ = writeln!(s, "n_u={}", self.n_u);
        let _ = writeln!(s, "n_w={}", self.n_w);
        let _ = writeln!(s, "max_curl_grad={:.3e}", self.curl_grad);
        let _ = writeln!(s, "max_div_curl={:.3e}", self.div_curl);
        let _ = writeln!(s, "max_curl_grad_all_dofs={:.3e}", self.curl_grad_free);
        let _ = writeln!(s, "max_div_curl_all_dofs={:.3e}", self.div_curl_free);
        match &self.ranks {
            Some(r) => {
                let _ = writeln!(s, "rank_grad={}", r.grad);
                let _ = writeln!(s, "rank_curl={}", r.curl);
                let _ = writeln!(s, "rank_div={}", r.div);
                let _ = writeln!(s, "div_image_mean_residual={:.3e}", r.mean_zero_residual);
                let _ = writeln!(s, "ranks_exact={}", self.ranks_exact().unwrap_or(false));
            }
            None => {
                let _ = writeln!(s, "ranks=skipped (more than {RANK_DOF_CAP} dofs)");
            }
        }
        for (name, r) in &self.commutativity {
            let _ = writeln!(s, "commutativity[{name}]={r:.3e}");
        }
        s
    }
}

/// `J_h w`: values at every vertex, then the exact mean over every cell.
pub fn scalar_interpolant(mesh: &PolyMesh, geo: &GeometryCache, w: &Polynomial) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = mesh.vertices().iter().map(|x| w.eval(x)).collect();
    for c in 0..mesh.num_cells() {
        out.push(cell_integral_exact(mesh, geo, c, w)? / geo.cells[c].volume);
    }
    Ok(out)
}

/// Largest entry of `D I_h v - J_h(div v)` on all DOFs.
pub fn commutativity_residual(
    mesh: &PolyMesh,
    geo: &GeometryCache,
    free: &ComplexMaps,
    u: &PolyVector,
    degree: usize,
) -> Result<f64> {
    debug_assert_eq!(free.mode, BoundaryMode::Free);
    let div_u = u.divergence();
    let iv = interpolate_v(mesh, geo, |x| u.eval(x), |x| div_u.eval(x), degree.min(u.degree()))?;
    let lhs = free.div.matvec(&iv);
    let rhs = scalar_interpolant(mesh, geo, &div_u)?;
    Ok(lhs.iter().zip(&rhs).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// Composition residuals, exactness ranks and commutativity for the samples.
pub fn verify_complex(
    mesh: &PolyMesh,
    geo: &GeometryCache,
    samples: &[SampleField],
    degree: usize,
) -> Result<ComplexReport> {
    let maps = build_complex_maps(mesh, geo, BoundaryMode::Constrained);
    let free = build_complex_maps(mesh, geo, BoundaryMode::Free);
    let ranks = (maps.total_dofs() <= RANK_DOF_CAP).then(|| {
        let d = maps.div.to_dense();
        let mut weights = vec![0.0; maps.n_w()];
        for c in 0..mesh.num_cells() {
            weights[maps.n_p() + c] = geo.cells[c].volume;
        }
        let w = nalgebra::DVector::from_vec(weights);
        let mean = d.tr_mul(&w);
        Ranks {
            grad: numerical_rank(&maps.grad.to_dense()),
            curl: numerical_rank(&maps.curl.to_dense()),
            div: numerical_rank(&d),
            mean_zero_residual: mean.amax(),
        }
    });
    let commutativity = samples
        .iter()
        .map(|s| Ok((s.name.clone(), commutativity_residual(mesh, geo, &free, &s.u, degree)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexReport {
        n_p: maps.n_p(),
        n_phi: maps.n_phi(),
        n_u: maps.n_u(),
        n_w: maps.n_w(),
        curl_grad: maps.curl.matmul(&maps.grad).max_abs(),
        div_curl: maps.div.matmul(&maps.curl).max_abs(),
        curl_grad_free: free.curl.matmul(&free.grad).max_abs(),
        div_curl_free: free.div.matmul(&free.curl).max_abs(),
        ranks,
        commutativity,
    })
}

/// Sanity helper for tests: the global gradient DOFs of a linear function.
pub fn linear_edge_dofs(mesh: &PolyMesh, geo: &GeometryCache, g: &Vector3<f64>) -> Vec<f64> {
    (0..mesh.num_edges()).map(|e| geo.edges[e].tangent.dot(g)).collect()
}

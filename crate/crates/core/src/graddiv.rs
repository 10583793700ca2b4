//! Lowest-order grad-div conforming space.
//!
//! Local DOFs: the values of `div v` at the cell vertices (ascending global
//! index), then the face normal means `(1/|f|) int_f v . n_f` with the stored
//! face normal, faces in ascending global index.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::calculus::quadrature::triangle_rule;
use crate::calculus::{integrate, Entity};
use crate::element::{Element, LocalFace};
use crate::error::Result;
use crate::mesh::{GeometryCache, PolyMesh};
use crate::scalar::{face_gram, ScalarLocal};

/// Local grad-div matrices of one cell.
#[derive(Clone, Debug)]
pub struct GradDivLocal {
    /// `(l_v + 1) x (l_v + l_f)`: DOFs to the cell scalar DOFs of `div v`.
    pub div_transfer: DMatrix<f64>,
    /// `3 x (l_v + l_f)`: DOFs to the constant-vector L2 projection.
    pub pi0: DMatrix<f64>,
    /// Discrete L2 product (`b_h` on the cell).
    pub mass: DMatrix<f64>,
    /// Discrete grad-div product (`a_h` on the cell).
    pub stiffness: DMatrix<f64>,
}

impl GradDivLocal {
    pub fn new(elem: &Element, scalar: &ScalarLocal) -> Self {
        let nv = elem.num_vertices();
        let nf = elem.num_faces();
        let n = nv + nf;
        let h = elem.diameter;

        let mut t = DMatrix::zeros(nv + 1, n);
        for v in 0..nv {
            t[(v, v)] = 1.0;
        }
        for (k, f) in elem.faces.iter().enumerate() {
            t[(nv, nv + k)] = f.sign * f.area / elem.volume;
        }

        let gram = DMatrix::from_iterator(4, 4, scalar.gram.iter().copied());
        let div_pi = &scalar.pi_nabla * &t;
        let volume_part = (&gram * &div_pi) * (-h / elem.volume);
        let mut pi0 = DMatrix::zeros(3, n);
        for i in 0..3 {
            pi0.set_row(i, &volume_part.row(i + 1));
        }
        for (k, f) in elem.faces.iter().enumerate() {
            let moment = (f.centroid - elem.centroid) * f.area + f.frame[0] * f.first_moment[0] + f.frame[1] * f.first_moment[1];
            for i in 0..3 {
                pi0[(i, nv + k)] += f.sign * moment[i] / elem.volume;
            }
        }

        let mut const_dofs = DMatrix::zeros(n, 3);
        for (k, f) in elem.faces.iter().enumerate() {
            for i in 0..3 {
                const_dofs[(nv + k, i)] = f.normal[i];
            }
        }
        let residual = DMatrix::identity(n, n) - const_dofs * &pi0;

        let div_l2 = &scalar.pi0 * &t;
        let mut stab = div_l2.transpose() * &gram * &div_l2 * (h * h);
        for (k, (f, pf)) in elem.faces.iter().zip(&scalar.face_pi).enumerate() {
            let gf = face_gram(f);
            let gf = DMatrix::from_iterator(3, 3, gf.iter().copied());
            let hf = f.diameter;
            let local = pf.transpose() * gf * pf * hf.powi(3);
            add_face_block(&mut stab, f, &local);
            let m = f.len();
            for i in 0..m {
                let (a, b) = (f.loop_vertices[i], f.loop_vertices[(i + 1) % m]);
                let len = (elem.positions[b] - elem.positions[a]).norm();
                let w = hf.powi(4) * len / 6.0;
                stab[(a, a)] += 2.0 * w;
                stab[(b, b)] += 2.0 * w;
                stab[(a, b)] += w;
                stab[(b, a)] += w;
            }
            stab[(nv + k, nv + k)] += hf * f.area;
        }
        let mut mass = pi0.transpose() * &pi0 * elem.volume + residual.transpose() * stab * &residual;
        mass = (&mass + mass.transpose()) * 0.5;

        let mut stiffness = t.transpose() * &scalar.product * &t;
        stiffness = (&stiffness + stiffness.transpose()) * 0.5;

        Self {
            div_transfer: t,
            pi0,
            mass,
            stiffness,
        }
    }

    /// Projected divergence `Pi-nabla(div v)` as cell monomial coefficients.
    pub fn div_pi_nabla(&self, scalar: &ScalarLocal, dofs: &[f64]) -> [f64; 4] {
        let w = &self.div_transfer * DVector::from_column_slice(dofs);
        crate::scalar::apply4(&scalar.pi_nabla, w.as_slice())
    }
}

fn add_face_block(target: &mut DMatrix<f64>, face: &LocalFace, local: &DMatrix<f64>) {
    for (a, &va) in face.loop_vertices.iter().enumerate() {
        for (b, &vb) in face.loop_vertices.iter().enumerate() {
            target[(va, vb)] += local[(a, b)];
        }
    }
}

/// Transfer from grad-div DOFs to the cell scalar DOFs of the divergence.
pub fn div_dof_transfer(elem: &Element) -> DMatrix<f64> {
    GradDivLocal::new(elem, &ScalarLocal::new(elem)).div_transfer
}

/// `3 x (l_v + l_f)` constant-vector L2 projection matrix.
pub fn v_pi0(elem: &Element) -> DMatrix<f64> {
    GradDivLocal::new(elem, &ScalarLocal::new(elem)).pi0
}

/// Discrete L2 product of the grad-div space.
pub fn local_b(elem: &Element) -> DMatrix<f64> {
    GradDivLocal::new(elem, &ScalarLocal::new(elem)).mass
}

/// Discrete grad-div product.
pub fn local_a(elem: &Element) -> DMatrix<f64> {
    GradDivLocal::new(elem, &ScalarLocal::new(elem)).stiffness
}

/// Local DOFs of a field with known divergence; face means use fan rules of
/// exactness `degree`.
pub fn graddiv_dofs<U, D>(elem: &Element, u: U, div_u: D, degree: usize) -> Vec<f64>
where
    U: Fn(&Vector3<f64>) -> Vector3<f64>,
    D: Fn(&Vector3<f64>) -> f64,
{
    let mut d: Vec<f64> = elem.positions.iter().map(&div_u).collect();
    for f in &elem.faces {
        let m = f.len();
        let mut total = 0.0;
        for i in 0..m {
            let a = &elem.positions[f.loop_vertices[i]];
            let b = &elem.positions[f.loop_vertices[(i + 1) % m]];
            total += triangle_rule(&f.centroid, a, b, degree).integrate(|x| u(x).dot(&f.normal));
        }
        d.push(total / f.area);
    }
    d
}

/// Global interpolant: `div u` at every vertex followed by the normal mean
/// on every face (global indices).
pub fn interpolate_v<U, D>(
    mesh: &PolyMesh,
    geo: &GeometryCache,
    u: U,
    div_u: D,
    degree: usize,
) -> Result<Vec<f64>>
where
    U: Fn(&Vector3<f64>) -> Vector3<f64>,
    D: Fn(&Vector3<f64>) -> f64,
{
    let mut out: Vec<f64> = mesh.vertices().iter().map(&div_u).collect();
    for f in 0..mesh.num_faces() {
        let n = geo.faces[f].normal;
        out.push(integrate(mesh, geo, Entity::Face(f), |x| u(x).dot(&n), degree)? / geo.faces[f].area);
    }
    Ok(out)
}

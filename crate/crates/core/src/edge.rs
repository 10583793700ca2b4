//! Lowest-order edge space: tangential edge means, the L2 projection onto
//! constant vectors, and the stabilized L2 product.
//!
//! Local DOFs follow [`Element::edges`] (ascending global edge index), each
//! being `(1/|e|) int_e phi . t_e` with the global tangent.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::calculus::quadrature::segment_rule;
use crate::calculus::{decompose_in_plane, InPlaneAffine};
use crate::element::{Element, LocalFace};

/// Coefficients `w_i` such that `int_f phi_tau . r = sum_i w_i dof_i`, with
/// `dof_i` the DOF of loop edge `i` (global tangent convention).
pub fn face_tangential_moment_row(face: &LocalFace, positions: &[Vector3<f64>], r: &InPlaneAffine) -> Vec<f64> {
    let n = face.len();
    let h = face.diameter;
    let d = decompose_in_plane(r, h);
    let m1 = face.first_moment / h;
    let m2 = face.second_moment / (h * h);
    let g_integral =
        d.g[0] * m1[0] + d.g[1] * m1[1] + d.g[2] * m2[(0, 0)] + d.g[3] * m2[(0, 1)] + d.g[4] * m2[(1, 1)];
    let s: Vec<[f64; 2]> = face.loop_vertices.iter().map(|&v| face.local(&positions[v])).collect();
    (0..n)
        .map(|i| {
            let a = s[i];
            let b = s[(i + 1) % n];
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            // Simpson is exact for the quadratic g
            let edge_integral = len / 6.0 * (d.g_at(a, h) + 4.0 * d.g_at(mid, h) + d.g_at(b, h));
            let sign = face.loop_signs[i];
            sign * len * g_integral / face.area - sign * edge_integral
        })
        .collect()
}

/// `int_f phi_tau . r` for an in-plane affine `r` (frame coordinates about
/// the face centroid), from the loop-ordered edge DOFs of the face.
pub fn face_tangential_moment(
    face: &LocalFace,
    positions: &[Vector3<f64>],
    loop_dofs: &[f64],
    r: &InPlaneAffine,
) -> f64 {
    face_tangential_moment_row(face, positions, r)
        .iter()
        .zip(loop_dofs)
        .map(|(w, d)| w * d)
        .sum()
}

/// The in-plane part of `n_f x A` for `A(x) = q0 x (x - b_K) / 2`.
fn potential_trace(face: &LocalFace, centroid: &Vector3<f64>, q0: &Vector3<f64>) -> InPlaneAffine {
    let n = face.normal;
    let c = n.cross(&(q0.cross(&(face.centroid - centroid)) * 0.5));
    let l = [n.cross(&(q0.cross(&face.frame[0]) * 0.5)), n.cross(&(q0.cross(&face.frame[1]) * 0.5))];
    InPlaneAffine {
        constant: [c.dot(&face.frame[0]), c.dot(&face.frame[1])],
        linear: [
            [l[0].dot(&face.frame[0]), l[1].dot(&face.frame[0])],
            [l[0].dot(&face.frame[1]), l[1].dot(&face.frame[1])],
        ],
    }
}

/// Local edge-space matrices.
#[derive(Clone, Debug)]
pub struct EdgeLocal {
    /// `3 x l_e`: DOFs to the constant vector projection.
    pub pi0: DMatrix<f64>,
    /// `l_e x l_e` stabilized L2 product.
    pub product: DMatrix<f64>,
}

impl EdgeLocal {
    pub fn new(elem: &Element) -> Self {
        let ne = elem.num_edges();
        let mut pi0 = DMatrix::zeros(3, ne);
        for axis in 0..3 {
            let q0 = Vector3::ith(axis, 1.0);
            for f in &elem.faces {
                let r = potential_trace(f, &elem.centroid, &q0);
                let row = face_tangential_moment_row(f, &elem.positions, &r);
                for (i, w) in row.iter().enumerate() {
                    pi0[(axis, f.loop_edges[i])] += f.sign * w / elem.volume;
                }
            }
        }
        let mut tangents = DMatrix::zeros(ne, 3);
        for (e, t) in elem.edge_tangents.iter().enumerate() {
            for k in 0..3 {
                tangents[(e, k)] = t[k];
            }
        }
        let residual = DMatrix::identity(ne, ne) - tangents * &pi0;
        let weights = DMatrix::from_diagonal(&DVector::from_iterator(
            ne,
            elem.edge_lengths.iter().map(|l| elem.diameter * elem.diameter * l),
        ));
        let mut product = pi0.transpose() * &pi0 * elem.volume + residual.transpose() * weights * &residual;
        product = (&product + product.transpose()) * 0.5;
        Self { pi0, product }
    }
}

/// Constant-vector L2 projection of a local edge DOF vector.
pub fn sigma_pi0(elem: &Element, dofs: &[f64]) -> Vector3<f64> {
    let v = EdgeLocal::new(elem).pi0 * DVector::from_column_slice(dofs);
    Vector3::new(v[0], v[1], v[2])
}

/// Stabilized L2 product matrix of the edge space.
pub fn product_e(elem: &Element) -> DMatrix<f64> {
    EdgeLocal::new(elem).product
}

/// Edge DOFs of a vector field by quadrature of exactness `degree`.
pub fn edge_dofs<F: Fn(&Vector3<f64>) -> Vector3<f64>>(elem: &Element, phi: F, degree: usize) -> Vec<f64> {
    elem.edge_ends
        .iter()
        .zip(&elem.edge_tangents)
        .zip(&elem.edge_lengths)
        .map(|((&[a, b], t), len)| {
            let rule = segment_rule(&elem.positions[a], &elem.positions[b], degree);
            rule.integrate(|x| phi(x).dot(t)) / len
        })
        .collect()
}

//! Order-one scalar virtual spaces: the face space, the cell space with its
//! mean moment, and the stabilized H1 product.
//!
//! Cell DOFs are the values at the cell vertices (ascending global index)
//! followed by the cell mean. Face DOFs are the vertex values in loop order.
//! Polynomial results are coefficients over scaled monomials: `1, s/h_f` on
//! faces (frame coordinates) and `1, (x - b_K)/h_K` on cells.

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3};

use crate::element::{Element, LocalFace};

/// Face Pi-nabla as a `3 x n` matrix acting on loop-ordered vertex values.
/// At order one it coincides with the face L2 projection.
pub fn face_pi_nabla_matrix(face: &LocalFace, positions: &[Vector3<f64>]) -> DMatrix<f64> {
    let n = face.len();
    let s: Vec<[f64; 2]> = face.loop_vertices.iter().map(|&v| face.local(&positions[v])).collect();
    let mut grad = [vec![0.0; n], vec![0.0; n]];
    let mut boundary = vec![0.0; n];
    let mut perimeter = 0.0;
    let mut mid_moment = [0.0; 2];
    for i in 0..n {
        let j = (i + 1) % n;
        let d = [s[j][0] - s[i][0], s[j][1] - s[i][1]];
        let len = d[0].hypot(d[1]);
        // outward in-plane normal times length for a counter-clockwise loop
        let nl = [d[1], -d[0]];
        for k in 0..2 {
            grad[k][i] += 0.5 * nl[k] / face.area;
            grad[k][j] += 0.5 * nl[k] / face.area;
            mid_moment[k] += len * 0.5 * (s[i][k] + s[j][k]);
        }
        boundary[i] += 0.5 * len;
        boundary[j] += 0.5 * len;
        perimeter += len;
    }
    let mut m = DMatrix::zeros(3, n);
    for i in 0..n {
        m[(0, i)] = (boundary[i] - grad[0][i] * mid_moment[0] - grad[1][i] * mid_moment[1]) / perimeter;
        m[(1, i)] = face.diameter * grad[0][i];
        m[(2, i)] = face.diameter * grad[1][i];
    }
    m
}

/// Face projection of loop-ordered vertex values.
pub fn face_pi_nabla(face: &LocalFace, positions: &[Vector3<f64>], dofs: &[f64]) -> [f64; 3] {
    let c = face_pi_nabla_matrix(face, positions) * nalgebra::DVector::from_column_slice(dofs);
    [c[0], c[1], c[2]]
}

/// Value of a face polynomial at a global point.
pub fn eval_face_p1(face: &LocalFace, coeffs: &[f64], x: &Vector3<f64>) -> f64 {
    let s = face.local(x);
    coeffs[0] + (coeffs[1] * s[0] + coeffs[2] * s[1]) / face.diameter
}

/// Gram matrix of `1, s1/h_f, s2/h_f` on the face.
pub fn face_gram(face: &LocalFace) -> Matrix3<f64> {
    let h = face.diameter;
    let m1 = face.first_moment / h;
    let m2 = face.second_moment / (h * h);
    Matrix3::new(
        face.area, m1[0], m1[1], m1[0], m2[(0, 0)], m2[(0, 1)], m1[1], m2[(1, 0)], m2[(1, 1)],
    )
}

/// Gram matrix of `1, (x - b_K)/h_K` on the cell.
pub fn cell_gram(elem: &Element) -> Matrix4<f64> {
    let h = elem.diameter;
    let mut g = Matrix4::zeros();
    g[(0, 0)] = elem.volume;
    for i in 0..3 {
        g[(0, i + 1)] = elem.first_moment[i] / h;
        g[(i + 1, 0)] = elem.first_moment[i] / h;
        for j in 0..3 {
            g[(i + 1, j + 1)] = elem.second_moment[(i, j)] / (h * h);
        }
    }
    g
}

/// Value of a cell polynomial at a global point.
pub fn eval_cell_p1(elem: &Element, coeffs: &[f64], x: &Vector3<f64>) -> f64 {
    let d = (x - elem.centroid) / elem.diameter;
    coeffs[0] + coeffs[1] * d.x + coeffs[2] * d.y + coeffs[3] * d.z
}

/// Gradient of a cell polynomial.
pub fn grad_cell_p1(elem: &Element, coeffs: &[f64]) -> Vector3<f64> {
    Vector3::new(coeffs[1], coeffs[2], coeffs[3]) / elem.diameter
}

/// Symmetric 2x2 mass matrix of a linear function on a segment of length `len`.
fn segment_mass(len: f64) -> [[f64; 2]; 2] {
    [[len / 3.0, len / 6.0], [len / 6.0, len / 3.0]]
}

/// Projections and the stabilized product of the cell space.
#[derive(Clone, Debug)]
pub struct ScalarLocal {
    /// Per face (element order), the face projection on loop-ordered values.
    pub face_pi: Vec<DMatrix<f64>>,
    /// `4 x (l_v + 1)`.
    pub pi_nabla: DMatrix<f64>,
    /// `4 x (l_v + 1)`.
    pub pi0: DMatrix<f64>,
    pub gram: Matrix4<f64>,
    /// `(l_v + 1) x (l_v + 1)` stabilized product.
    pub product: DMatrix<f64>,
}

impl ScalarLocal {
    pub fn new(elem: &Element) -> Self {
        let nv = elem.num_vertices();
        let n = nv + 1;
        let h = elem.diameter;
        let face_pi: Vec<DMatrix<f64>> = elem
            .faces
            .iter()
            .map(|f| face_pi_nabla_matrix(f, &elem.positions))
            .collect();

        // integral rows of the face projections, scattered to cell dofs
        let mut grad = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut total = vec![0.0; n];
        let mut area_sum = 0.0;
        let mut offset_sum = Vector3::zeros();
        for (f, pf) in elem.faces.iter().zip(&face_pi) {
            for (i, &v) in f.loop_vertices.iter().enumerate() {
                let integral = pf[(0, i)] * f.area
                    + (pf[(1, i)] * f.first_moment[0] + pf[(2, i)] * f.first_moment[1]) / f.diameter;
                for k in 0..3 {
                    grad[k][v] += f.sign * f.normal[k] * integral / elem.volume;
                }
                total[v] += integral;
            }
            area_sum += f.area;
            offset_sum += (f.centroid - elem.centroid) * f.area
                + f.frame[0] * f.first_moment[0]
                + f.frame[1] * f.first_moment[1];
        }
        let mut pi_nabla = DMatrix::zeros(4, n);
        for j in 0..n {
            let g = Vector3::new(grad[0][j], grad[1][j], grad[2][j]);
            pi_nabla[(0, j)] = (total[j] - g.dot(&offset_sum)) / area_sum;
            for k in 0..3 {
                pi_nabla[(k + 1, j)] = h * g[k];
            }
        }

        let gram = cell_gram(elem);
        let mut rhs = DMatrix::zeros(4, n);
        rhs[(0, nv)] = elem.volume;
        let gp = DMatrix::from_iterator(4, 4, gram.iter().copied()) * &pi_nabla;
        for k in 1..4 {
            rhs.set_row(k, &gp.row(k));
        }
        let pi0 = DMatrix::from_iterator(4, 4, gram.iter().copied())
            .lu()
            .solve(&rhs)
            .expect("cell Gram matrix is nonsingular");

        // dofs of the scaled monomials
        let mut dof_of = DMatrix::zeros(n, 4);
        for (i, x) in elem.positions.iter().enumerate() {
            let d = (x - elem.centroid) / h;
            dof_of[(i, 0)] = 1.0;
            for k in 0..3 {
                dof_of[(i, k + 1)] = d[k];
            }
        }
        dof_of[(nv, 0)] = 1.0;
        for k in 0..3 {
            dof_of[(nv, k + 1)] = elem.first_moment[k] / (h * elem.volume);
        }

        let g = DMatrix::from_iterator(4, 4, gram.iter().copied());
        let mut stab = pi0.transpose() * &g * &pi0 / (h * h);
        for (f, pf) in elem.faces.iter().zip(&face_pi) {
            let gf = face_gram(f);
            let gf = DMatrix::from_iterator(3, 3, gf.iter().copied());
            let local = pf.transpose() * gf * pf / f.diameter;
            let m = f.len();
            for a in 0..m {
                for b in 0..m {
                    stab[(f.loop_vertices[a], f.loop_vertices[b])] += local[(a, b)];
                }
            }
            for i in 0..m {
                let (a, b) = (f.loop_vertices[i], f.loop_vertices[(i + 1) % m]);
                let len = (elem.positions[b] - elem.positions[a]).norm();
                let mass = segment_mass(len);
                let idx = [a, b];
                for r in 0..2 {
                    for c in 0..2 {
                        stab[(idx[r], idx[c])] += mass[r][c];
                    }
                }
            }
        }
        let residual = DMatrix::identity(n, n) - &dof_of * &pi_nabla;
        let mut h1 = DMatrix::zeros(4, 4);
        for k in 1..4 {
            h1[(k, k)] = elem.volume / (h * h);
        }
        let mut product = pi_nabla.transpose() * h1 * &pi_nabla + residual.transpose() * stab * &residual;
        product = (&product + product.transpose()) * 0.5;

        Self {
            face_pi,
            pi_nabla,
            pi0,
            gram,
            product,
        }
    }
}

/// Cell Pi-nabla of cell dofs (vertex values then mean).
pub fn cell_pi_nabla(elem: &Element, dofs: &[f64]) -> [f64; 4] {
    apply4(&ScalarLocal::new(elem).pi_nabla, dofs)
}

/// Cell L2 projection onto linears of cell dofs.
pub fn cell_pi0(elem: &Element, dofs: &[f64]) -> [f64; 4] {
    apply4(&ScalarLocal::new(elem).pi0, dofs)
}

/// Stabilized H1 product matrix of the cell space.
pub fn product_n(elem: &Element) -> DMatrix<f64> {
    ScalarLocal::new(elem).product
}

pub(crate) fn apply4(m: &DMatrix<f64>, dofs: &[f64]) -> [f64; 4] {
    let c = m * nalgebra::DVector::from_column_slice(dofs);
    [c[0], c[1], c[2], c[3]]
}

/// Cell dofs of a function: vertex values and the given mean.
pub fn scalar_dofs<F: Fn(&Vector3<f64>) -> f64>(elem: &Element, q: F, mean: f64) -> Vec<f64> {
    let mut d: Vec<f64> = elem.positions.iter().map(&q).collect();
    d.push(mean);
    d
}

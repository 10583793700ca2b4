//! Scaled monomial bases and the lowest-order polynomial decompositions.

use nalgebra::{Matrix6, Vector3, Vector6};

use super::polynomial::Polynomial;

/// Multi-indices of total degree `<= degree` in `dim` variables, graded
/// lexicographic: lower degree first, then descending in the first variable.
pub fn graded_lex(dim: usize, degree: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for d in 0..=degree {
        match dim {
            1 => out.push([d, 0, 0]),
            2 => {
                for a in (0..=d).rev() {
                    out.push([a, d - a, 0]);
                }
            }
            3 => {
                for a in (0..=d).rev() {
                    for b in (0..=(d - a)).rev() {
                        out.push([a, b, d - a - b]);
                    }
                }
            }
            _ => panic!("scaled monomials exist for dimensions 1 to 3, got {dim}"),
        }
    }
    out
}

/// `((x - b_G) / h_G)^alpha` for an edge, face or cell. Faces and edges use
/// intrinsic coordinates along `axes` (the face frame or the edge tangent).
#[derive(Clone, Debug)]
pub struct ScaledMonomialBasis {
    pub center: Vector3<f64>,
    pub diameter: f64,
    pub degree: usize,
    axes: Vec<Vector3<f64>>,
    exponents: Vec<[usize; 3]>,
}

impl ScaledMonomialBasis {
    pub fn cell(center: Vector3<f64>, diameter: f64, degree: usize) -> Self {
        Self::with_axes(center, diameter, degree, vec![Vector3::x(), Vector3::y(), Vector3::z()])
    }

    pub fn face(center: Vector3<f64>, diameter: f64, frame: [Vector3<f64>; 2], degree: usize) -> Self {
        Self::with_axes(center, diameter, degree, frame.to_vec())
    }

    pub fn edge(center: Vector3<f64>, length: f64, tangent: Vector3<f64>, degree: usize) -> Self {
        Self::with_axes(center, length, degree, vec![tangent])
    }

    fn with_axes(center: Vector3<f64>, diameter: f64, degree: usize, axes: Vec<Vector3<f64>>) -> Self {
        let exponents = graded_lex(axes.len(), degree);
        Self {
            center,
            diameter,
            degree,
            axes,
            exponents,
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[[usize; 3]] {
        &self.exponents
    }

    /// Scaled intrinsic coordinates of a global point.
    pub fn scaled_coords(&self, x: &Vector3<f64>) -> [f64; 3] {
        let mut xi = [0.0; 3];
        for (k, a) in self.axes.iter().enumerate() {
            xi[k] = (x - self.center).dot(a) / self.diameter;
        }
        xi
    }

    /// Values of every member at `x`.
    pub fn eval(&self, x: &Vector3<f64>) -> Vec<f64> {
        let xi = self.scaled_coords(x);
        self.exponents
            .iter()
            .map(|e| (0..3).map(|k| xi[k].powi(e[k] as i32)).product())
            .collect()
    }

    /// Member `i` expanded in global coordinates.
    pub fn polynomial(&self, i: usize) -> Polynomial {
        let e = self.exponents[i];
        let mut p = Polynomial::constant(1.0);
        for (k, a) in self.axes.iter().enumerate() {
            let coord = Polynomial::affine(-a.dot(&self.center) / self.diameter, a / self.diameter);
            p = &p * &coord.pow(e[k] as u32);
        }
        p
    }
}

/// `q1` with `grad q1 = q0` and zero mean-free part, i.e. `q0 . (x - b_K)`,
/// as coefficients over the degree-1 cell monomials `(x - b_K) / h_K`.
pub fn decompose_constant_vector(q0: &Vector3<f64>, h_k: f64) -> [f64; 4] {
    [0.0, h_k * q0.x, h_k * q0.y, h_k * q0.z]
}

/// In-plane affine vector field `r(s) = r0 + R s` in face-frame coordinates
/// `s` about the face centroid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InPlaneAffine {
    pub constant: [f64; 2],
    /// `linear[i][j] = d r_i / d s_j`.
    pub linear: [[f64; 2]; 2],
}

impl InPlaneAffine {
    pub fn constant(c: [f64; 2]) -> Self {
        Self {
            constant: c,
            linear: [[0.0; 2]; 2],
        }
    }

    /// The position field `x_f = s`.
    pub fn position() -> Self {
        Self {
            constant: [0.0; 2],
            linear: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn eval(&self, s: [f64; 2]) -> [f64; 2] {
        let l = &self.linear;
        [
            self.constant[0] + l[0][0] * s[0] + l[0][1] * s[1],
            self.constant[1] + l[1][0] * s[0] + l[1][1] * s[1],
        ]
    }

    fn coefficients(&self) -> Vector6<f64> {
        let l = &self.linear;
        Vector6::new(self.constant[0], l[0][0], l[0][1], self.constant[1], l[1][0], l[1][1])
    }
}

/// `r = rot g + c x_f` with `g` over the face monomials of degree 1 and 2
/// (`xi1, xi2, xi1^2, xi1 xi2, xi2^2` with `xi = s / h_f`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotDecomposition {
    pub g: [f64; 5],
    pub c: f64,
}

impl RotDecomposition {
    /// Value of `g` at in-plane coordinates `s`.
    pub fn g_at(&self, s: [f64; 2], h_f: f64) -> f64 {
        let (a, b) = (s[0] / h_f, s[1] / h_f);
        let m = [a, b, a * a, a * b, b * b];
        m.iter().zip(&self.g).map(|(m, g)| m * g).sum()
    }

    /// Rebuilds `rot g + c x_f`.
    pub fn reconstruct(&self, h_f: f64) -> InPlaneAffine {
        let coeffs = rot_system(h_f) * Vector6::new(self.g[0], self.g[1], self.g[2], self.g[3], self.g[4], self.c);
        InPlaneAffine {
            constant: [coeffs[0], coeffs[3]],
            linear: [[coeffs[1], coeffs[2]], [coeffs[4], coeffs[5]]],
        }
    }
}

/// Columns: images of the six unknowns in the coefficient layout of
/// [`InPlaneAffine::coefficients`]. `rot g = (d g / d s2, -d g / d s1)`.
fn rot_system(h: f64) -> Matrix6<f64> {
    let h2 = h * h;
    #[rustfmt::skip]
    let m = Matrix6::new(
        // xi1,      xi2,      xi1^2,      xi1 xi2,   xi2^2,     x_f
        0.0,         1.0 / h,  0.0,        0.0,       0.0,       0.0,
        0.0,         0.0,      0.0,        1.0 / h2,  0.0,       1.0,
        0.0,         0.0,      0.0,        0.0,       2.0 / h2,  0.0,
        -1.0 / h,    0.0,      0.0,        0.0,       0.0,       0.0,
        0.0,         0.0,      -2.0 / h2,  0.0,       0.0,       0.0,
        0.0,         0.0,      0.0,        -1.0 / h2, 0.0,       1.0,
    );
    m
}

/// Splits an in-plane affine field on a face of diameter `h_f` into its
/// rot part and its `x_f` part.
pub fn decompose_in_plane(r: &InPlaneAffine, h_f: f64) -> RotDecomposition {
    let lu = rot_system(h_f).lu();
    let x = lu
        .solve(&r.coefficients())
        .expect("rot decomposition system is nonsingular for any positive face diameter");
    RotDecomposition {
        g: [x[0], x[1], x[2], x[3], x[4]],
        c: x[5],
    }
}

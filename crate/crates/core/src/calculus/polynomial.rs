//! Exact trivariate polynomials with closed-form calculus.
//!
//! Coefficients are stored densely over the box of per-variable exponents,
//! which keeps multiplication a plain convolution and makes nested Horner
//! evaluation cheap for the moderately sized fields used as manufactured data.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;

/// A polynomial in the global coordinates `(x, y, z)`.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    /// One more than the largest exponent of each variable.
    shape: [usize; 3],
    /// Coefficient of `x^i y^j z^k` at `(i * shape[1] + j) * shape[2] + k`.
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            shape: [1, 1, 1],
            coeffs: vec![c],
        }
    }

    pub fn monomial(exponents: [usize; 3], coefficient: f64) -> Self {
        let shape = [exponents[0] + 1, exponents[1] + 1, exponents[2] + 1];
        let mut p = Self::with_shape(shape);
        let idx = p.index(exponents);
        p.coeffs[idx] = coefficient;
        p.trimmed()
    }

    /// The coordinate function `x_axis`.
    pub fn coordinate(axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Self::monomial(e, 1.0)
    }

    /// Affine polynomial `c + g . x`.
    pub fn affine(c: f64, g: Vector3<f64>) -> Self {
        let mut p = Self::constant(c);
        for axis in 0..3 {
            p = &p + &Self::monomial(unit(axis), g[axis]);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ([usize; 3], f64)>>(terms: I) -> Self {
        let mut acc = Self::zero();
        for (e, c) in terms {
            acc = &acc + &Self::monomial(e, c);
        }
        acc
    }

    fn with_shape(shape: [usize; 3]) -> Self {
        Self {
            shape,
            coeffs: vec![0.0; shape[0] * shape[1] * shape[2]],
        }
    }

    #[inline]
    fn index(&self, e: [usize; 3]) -> usize {
        (e[0] * self.shape[1] + e[1]) * self.shape[2] + e[2]
    }

    pub fn coeff(&self, e: [usize; 3]) -> f64 {
        if e[0] < self.shape[0] && e[1] < self.shape[1] && e[2] < self.shape[2] {
            self.coeffs[self.index(e)]
        } else {
            0.0
        }
    }

    /// Nonzero terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        let [_, ny, nz] = self.shape;
        self.coeffs.iter().enumerate().filter_map(move |(idx, &c)| {
            if c == 0.0 {
                None
            } else {
                Some(([idx / (ny * nz), (idx / nz) % ny, idx % nz], c))
            }
        })
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| **c != 0.0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.terms().map(|(e, _)| e[0] + e[1] + e[2]).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn trimmed(mut self) -> Self {
        let mut new_shape = [1usize; 3];
        for (e, _) in self.terms() {
            for a in 0..3 {
                new_shape[a] = new_shape[a].max(e[a] + 1);
            }
        }
        if new_shape != self.shape {
            let mut out = Self::with_shape(new_shape);
            for (e, c) in self.terms() {
                let idx = out.index(e);
                out.coeffs[idx] = c;
            }
            self = out;
        }
        self
    }

    /// Nested Horner evaluation.
    pub fn eval(&self, p: &Vector3<f64>) -> f64 {
        let [nx, ny, nz] = self.shape;
        let mut acc_x = 0.0;
        for i in (0..nx).rev() {
            let mut acc_y = 0.0;
            for j in (0..ny).rev() {
                let row = &self.coeffs[(i * ny + j) * nz..(i * ny + j + 1) * nz];
                let mut acc_z = 0.0;
                for &c in row.iter().rev() {
                    acc_z = acc_z * p[2] + c;
                }
                acc_y = acc_y * p[1] + acc_z;
            }
            acc_x = acc_x * p[0] + acc_y;
        }
        acc_x
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            shape: self.shape,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
        .trimmed()
    }

    pub fn derivative(&self, axis: usize) -> Self {
        if self.shape[axis] == 1 {
            return Self::zero();
        }
        let mut shape = self.shape;
        shape[axis] -= 1;
        let mut out = Self::with_shape(shape);
        for (e, c) in self.terms() {
            if e[axis] == 0 {
                continue;
            }
            let mut d = e;
            d[axis] -= 1;
            let idx = out.index(d);
            out.coeffs[idx] += c * e[axis] as f64;
        }
        out.trimmed()
    }

    /// The antiderivative along `axis` that vanishes on the plane `x_axis = 0`.
    pub fn antiderivative(&self, axis: usize) -> Self {
        let mut shape = self.shape;
        shape[axis] += 1;
        let mut out = Self::with_shape(shape);
        for (e, c) in self.terms() {
            let mut d = e;
            d[axis] += 1;
            let idx = out.index(d);
            out.coeffs[idx] += c / d[axis] as f64;
        }
        out.trimmed()
    }

    pub fn gradient(&self) -> PolyVector {
        PolyVector([self.derivative(0), self.derivative(1), self.derivative(2)])
    }

    pub fn laplacian(&self) -> Self {
        let mut acc = Self::zero();
        for axis in 0..3 {
            acc = &acc + &self.derivative(axis).derivative(axis);
        }
        acc
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(1.0);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

fn unit(axis: usize) -> [usize; 3] {
    let mut e = [0; 3];
    e[axis] = 1;
    e
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·x^{}y^{}z^{}", e[0], e[1], e[2])?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn combine(a: &Polynomial, b: &Polynomial, sign: f64) -> Polynomial {
    let shape = [
        a.shape[0].max(b.shape[0]),
        a.shape[1].max(b.shape[1]),
        a.shape[2].max(b.shape[2]),
    ];
    let mut out = Polynomial::with_shape(shape);
    for (e, c) in a.terms() {
        let idx = out.index(e);
        out.coeffs[idx] += c;
    }
    for (e, c) in b.terms() {
        let idx = out.index(e);
        out.coeffs[idx] += sign * c;
    }
    out.trimmed()
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, -1.0)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let shape = [
            self.shape[0] + rhs.shape[0] - 1,
            self.shape[1] + rhs.shape[1] - 1,
            self.shape[2] + rhs.shape[2] - 1,
        ];
        let mut out = Polynomial::with_shape(shape);
        let rhs_terms: Vec<_> = rhs.terms().collect();
        for (ea, ca) in self.terms() {
            for &(eb, cb) in &rhs_terms {
                let idx = out.index([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]]);
                out.coeffs[idx] += ca * cb;
            }
        }
        out.trimmed()
    }
}

/// A 3-vector of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVector(pub [Polynomial; 3]);

impl PolyVector {
    pub fn zero() -> Self {
        Self([Polynomial::zero(), Polynomial::zero(), Polynomial::zero()])
    }

    pub fn constant(c: Vector3<f64>) -> Self {
        Self([
            Polynomial::constant(c[0]),
            Polynomial::constant(c[1]),
            Polynomial::constant(c[2]),
        ])
    }

    pub fn component(&self, axis: usize) -> &Polynomial {
        &self.0[axis]
    }

    pub fn eval(&self, p: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(self.0[0].eval(p), self.0[1].eval(p), self.0[2].eval(p))
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn divergence(&self) -> Polynomial {
        let dx = self.0[0].derivative(0);
        let dy = self.0[1].derivative(1);
        let dz = self.0[2].derivative(2);
        &(&dx + &dy) + &dz
    }

    pub fn curl(&self) -> PolyVector {
        let [fx, fy, fz] = &self.0;
        PolyVector([
            &fz.derivative(1) - &fy.derivative(2),
            &fx.derivative(2) - &fz.derivative(0),
            &fy.derivative(0) - &fx.derivative(1),
        ])
    }

    /// `n . self` for a fixed vector `n`.
    pub fn dot_const(&self, n: &Vector3<f64>) -> Polynomial {
        let a = self.0[0].scale(n[0]);
        let b = self.0[1].scale(n[1]);
        let c = self.0[2].scale(n[2]);
        &(&a + &b) + &c
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Polynomial::is_zero)
    }
}

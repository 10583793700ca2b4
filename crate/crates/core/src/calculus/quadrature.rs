//! Gauss rules on segments, triangles and tetrahedra.
//!
//! Simplex rules are tensor products of Gauss–Jacobi rules pulled through the
//! collapsed-coordinate (Duffy) map, so any exactness degree is available
//! without tables. Reference rules are cached per degree.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen, Vector3};

/// Points and weights for one geometric entity.
#[derive(Clone, Debug, Default)]
pub struct QuadratureRule {
    pub points: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
    /// Total degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn empty(degree: usize) -> Self {
        Self {
            points: Vec::new(),
            weights: Vec::new(),
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: FnMut(&Vector3<f64>) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }

    pub fn integrate_vector<F: FnMut(&Vector3<f64>) -> Vector3<f64>>(&self, mut f: F) -> Vector3<f64> {
        self.points
            .iter()
            .zip(&self.weights)
            .fold(Vector3::zeros(), |acc, (p, w)| acc + f(p) * *w)
    }

    pub fn extend(&mut self, other: QuadratureRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

/// Gauss–Jacobi rule on `[0, 1]` for the weight `(1 - t)^alpha`, built with
/// the Golub–Welsch eigenvalue method. Exact for degree `2n - 1`.
pub fn gauss_jacobi(n: usize, alpha: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let a = alpha as f64;
    // Jacobi P^(a, 0) on [-1, 1]
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a;
        jac[(k, k)] = if k == 0 {
            -a / (a + 2.0)
        } else {
            -(a * a) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let s1 = 2.0 * m + a;
            let num = 4.0 * m * (m + a) * m * (m + a);
            let den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
            let b = (num / den).sqrt();
            jac[(k, k + 1)] = b;
            jac[(k + 1, k)] = b;
        }
    }
    // integral of (1 - x)^a over [-1, 1]
    let mu0 = 2f64.powf(a + 1.0) / (a + 1.0);
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            let x = eig.eigenvalues[i];
            // map to [0, 1]: t = (x + 1) / 2, (1 - t)^a = ((1 - x) / 2)^a
            ((x + 1.0) / 2.0, mu0 * v0 * v0 / 2f64.powf(a + 1.0))
        })
        .collect();
    nodes.sort_by(|p, q| p.0.total_cmp(&q.0));
    nodes.into_iter().unzip()
}

/// Number of 1D points needed for exactness `degree`.
fn points_for(degree: usize) -> usize {
    degree / 2 + 1
}

type Cache = Mutex<HashMap<(u8, usize), Arc<Vec<([f64; 3], f64)>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Reference rule on `[0,1]` (dim 1), the unit triangle (dim 2) or the unit
/// tetrahedron (dim 3), in barycentric-free reference coordinates.
fn reference_rule(dim: u8, degree: usize) -> Arc<Vec<([f64; 3], f64)>> {
    if let Some(rule) = cache().lock().unwrap().get(&(dim, degree)) {
        return rule.clone();
    }
    let n = points_for(degree);
    let mut out = Vec::new();
    match dim {
        1 => {
            let (t, w) = gauss_jacobi(n, 0);
            for i in 0..n {
                out.push(([t[i], 0.0, 0.0], w[i]));
            }
        }
        2 => {
            let (u, wu) = gauss_jacobi(n, 1);
            let (v, wv) = gauss_jacobi(n, 0);
            for i in 0..n {
                for j in 0..n {
                    out.push(([u[i], v[j] * (1.0 - u[i]), 0.0], wu[i] * wv[j]));
                }
            }
        }
        3 => {
            let (u, wu) = gauss_jacobi(n, 2);
            let (v, wv) = gauss_jacobi(n, 1);
            let (w, ww) = gauss_jacobi(n, 0);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let x = u[i];
                        let y = v[j] * (1.0 - u[i]);
                        let z = w[k] * (1.0 - u[i]) * (1.0 - v[j]);
                        out.push(([x, y, z], wu[i] * wv[j] * ww[k]));
                    }
                }
            }
        }
        _ => unreachable!("reference rules exist for dimensions 1 to 3"),
    }
    let rule = Arc::new(out);
    cache().lock().unwrap().insert((dim, degree), rule.clone());
    rule
}

pub fn segment_rule(a: &Vector3<f64>, b: &Vector3<f64>, degree: usize) -> QuadratureRule {
    let len = (b - a).norm();
    let reference = reference_rule(1, degree);
    QuadratureRule {
        points: reference.iter().map(|(r, _)| a + (b - a) * r[0]).collect(),
        weights: reference.iter().map(|(_, w)| w * len).collect(),
        degree,
    }
}

/// Rule on the triangle `(a, b, c)`; weights carry the unsigned area.
pub fn triangle_rule(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, degree: usize) -> QuadratureRule {
    let area2 = (b - a).cross(&(c - a)).norm();
    let reference = reference_rule(2, degree);
    QuadratureRule {
        points: reference
            .iter()
            .map(|(r, _)| a + (b - a) * r[0] + (c - a) * r[1])
            .collect(),
        weights: reference.iter().map(|(_, w)| w * area2).collect(),
        degree,
    }
}

/// Rule on the tetrahedron `(a, b, c, d)` scaled by `signed_volume`, which
/// lets signed decompositions integrate exactly.
pub fn tetrahedron_rule(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
    d: &Vector3<f64>,
    signed_volume: f64,
    degree: usize,
) -> QuadratureRule {
    let reference = reference_rule(3, degree);
    let jac = 6.0 * signed_volume;
    QuadratureRule {
        points: reference
            .iter()
            .map(|(r, _)| a + (b - a) * r[0] + (c - a) * r[1] + (d - a) * r[2])
            .collect(),
        weights: reference.iter().map(|(_, w)| w * jac).collect(),
        degree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_jacobi_moments() {
        for alpha in 0..3u32 {
            for n in 1..12 {
                let (t, w) = gauss_jacobi(n, alpha);
                for p in 0..(2 * n) {
                    // int_0^1 t^p (1 - t)^alpha dt = B(p + 1, alpha + 1)
                    let exact = beta(p as u32 + 1, alpha + 1);
                    let q: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(p as i32)).sum();
                    assert!((q - exact).abs() < 1e-13 * exact, "n={n} a={alpha} p={p}: {q} vs {exact}");
                }
            }
        }
    }

    fn beta(a: u32, b: u32) -> f64 {
        let f = |n: u32| (1..n).map(|k| k as f64).product::<f64>();
        f(a) * f(b) / f(a + b)
    }

    #[test]
    fn unit_simplex_monomials() {
        // int over unit triangle of x^a y^b = a! b! / (a + b + 2)!
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        let o = Vector3::zeros();
        let tri = triangle_rule(&o, &Vector3::x(), &Vector3::y(), 7);
        for a in 0..=7u32 {
            for b in 0..=(7 - a) {
                let q = tri.integrate(|p| p.x.powi(a as i32) * p.y.powi(b as i32));
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                assert!((q - exact).abs() < 1e-15, "{a} {b}");
            }
        }
        let tet = tetrahedron_rule(&o, &Vector3::x(), &Vector3::y(), &Vector3::z(), 1.0 / 6.0, 5);
        let q = tet.integrate(|p| p.x * p.x * p.y * p.z * p.z);
        let exact = fact(2) * fact(1) * fact(2) / fact(8);
        assert!((q - exact).abs() < 1e-16);
    }
}

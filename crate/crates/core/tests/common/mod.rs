#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use quaddiv::calculus::Polynomial;
use quaddiv::mesh::{generate_cube_mesh, Aabb, PolyMesh, SignedFace};
use rand::Rng;

/// One tetrahedron with outward-signed triangular faces.
pub fn tet_mesh(v: [Vector3<f64>; 4]) -> PolyMesh {
    let faces = vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]];
    let centre = v.iter().sum::<Vector3<f64>>() / 4.0;
    let cell = faces
        .iter()
        .enumerate()
        .map(|(f, l)| {
            let n = (v[l[1]] - v[l[0]]).cross(&(v[l[2]] - v[l[0]]));
            let sign = if n.dot(&(v[l[0]] - centre)) > 0.0 { 1 } else { -1 };
            SignedFace { face: f, sign }
        })
        .collect();
    PolyMesh::checked(v.to_vec(), faces, vec![cell]).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, r: f64) -> Vector3<f64> {
    Vector3::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// A non-degenerate random tetrahedron.
pub fn random_tet<R: Rng>(rng: &mut R) -> [Vector3<f64>; 4] {
    loop {
        let v = [random_point(rng, 1.0), random_point(rng, 1.0), random_point(rng, 1.0), random_point(rng, 1.0)];
        let vol = (v[1] - v[0]).cross(&(v[2] - v[0])).dot(&(v[3] - v[0])).abs() / 6.0;
        if vol > 0.02 {
            return v;
        }
    }
}

/// The projective image `(A x) / (1 + c.x) * s + t` of the unit cube. Planar
/// faces stay planar; small `A - I` and `c` keep the cell convex.
pub fn projective_cube(a: Matrix3<f64>, c: Vector3<f64>, s: f64, t: Vector3<f64>) -> PolyMesh {
    generate_cube_mesh(1, Aabb::unit())
        .unwrap()
        .map_vertices(|p| (a * p) / (1.0 + c.dot(p)) * s + t)
}

pub fn random_projective_cube<R: Rng>(rng: &mut R) -> PolyMesh {
    let a = Matrix3::identity() + Matrix3::from_fn(|_, _| rng.gen_range(-0.25..0.25));
    let c = random_point(rng, 0.3);
    let s = 10f64.powf(rng.gen_range(-1.0..1.0));
    projective_cube(a, c, s, random_point(rng, 2.0))
}

/// Random polynomial of the given degree in coordinates centred at `origin`
/// and scaled by `1 / scale`, so values stay of order one on the cell.
pub fn random_poly<R: Rng>(rng: &mut R, degree: usize, origin: &Vector3<f64>, scale: f64) -> Polynomial {
    let local: Vec<Polynomial> = (0..3)
        .map(|k| (&Polynomial::coordinate(k) - &Polynomial::constant(origin[k])).scale(1.0 / scale))
        .collect();
    let mut p = Polynomial::zero();
    for a in 0..=degree {
        for b in 0..=degree - a {
            for c in 0..=degree - a - b {
                let term = &(&local[0].pow(a as u32) * &local[1].pow(b as u32)) * &local[2].pow(c as u32);
                p = &p + &term.scale(rng.gen_range(-1.0..1.0));
            }
        }
    }
    p
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

//! Simplex decompositions of faces and cells, entity quadrature, and exact
//! polynomial integration over cells.

use nalgebra::Vector3;

use super::polynomial::Polynomial;
use super::quadrature::{segment_rule, tetrahedron_rule, triangle_rule, QuadratureRule};
use crate::error::{Error, Result};
use crate::mesh::{GeometryCache, PolyMesh};

/// Inversion tolerance relative to `h^d`.
const INVERSION_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Triangle {
    pub vertices: [Vector3<f64>; 3],
    pub area: f64,
}

#[derive(Clone, Debug)]
pub struct Tetrahedron {
    pub vertices: [Vector3<f64>; 4],
    pub volume: f64,
}

/// Mesh entity addressed by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entity {
    Edge(usize),
    Face(usize),
    Cell(usize),
}

/// Fan of triangles `(b_f, v_i, v_{i+1})` around the face centroid, signed by
/// the stored normal.
pub fn decompose_face(mesh: &PolyMesh, geo: &GeometryCache, f: usize) -> Result<Vec<Triangle>> {
    let g = &geo.faces[f];
    let lp = mesh.face(f);
    let tol = INVERSION_TOL * g.diameter * g.diameter;
    (0..lp.len())
        .map(|i| {
            let a = *mesh.vertex(lp[i]);
            let b = *mesh.vertex(lp[(i + 1) % lp.len()]);
            let area = 0.5 * (a - g.centroid).cross(&(b - g.centroid)).dot(&g.normal);
            if area < -tol {
                return Err(Error::StarShape(format!("face {f}: fan triangle {i} has area {area:e}")));
            }
            Ok(Triangle {
                vertices: [g.centroid, a, b],
                area,
            })
        })
        .collect()
}

/// Tetrahedra `(b_K, b_f, v_i, v_{i+1})` coned from the cell centroid over
/// every face fan triangle.
pub fn decompose_cell(mesh: &PolyMesh, geo: &GeometryCache, c: usize) -> Result<Vec<Tetrahedron>> {
    let g = &geo.cells[c];
    let tol = INVERSION_TOL * g.diameter.powi(3);
    let mut out = Vec::new();
    for sf in mesh.cell(c) {
        for tri in decompose_face(mesh, geo, sf.face)? {
            let [bf, mut a, mut b] = tri.vertices;
            if sf.sign < 0 {
                std::mem::swap(&mut a, &mut b);
            }
            let volume = (bf - g.centroid).dot(&(a - g.centroid).cross(&(b - g.centroid))) / 6.0;
            if volume < -tol {
                return Err(Error::StarShape(format!(
                    "cell {c}: tetrahedron over face {} has volume {volume:e}",
                    sf.face
                )));
            }
            out.push(Tetrahedron {
                vertices: [g.centroid, bf, a, b],
                volume,
            });
        }
    }
    Ok(out)
}

/// Quadrature exact up to `degree` on an edge, face or cell.
pub fn quadrature_rule(mesh: &PolyMesh, geo: &GeometryCache, entity: Entity, degree: usize) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule::empty(degree);
    match entity {
        Entity::Edge(e) => {
            let [a, b] = mesh.edge(e);
            rule = segment_rule(mesh.vertex(a), mesh.vertex(b), degree);
        }
        Entity::Face(f) => {
            for t in decompose_face(mesh, geo, f)? {
                let [a, b, c] = &t.vertices;
                rule.extend(triangle_rule(a, b, c, degree));
            }
        }
        Entity::Cell(c) => {
            for t in decompose_cell(mesh, geo, c)? {
                let [a, b, c, d] = &t.vertices;
                rule.extend(tetrahedron_rule(a, b, c, d, t.volume, degree));
            }
        }
    }
    Ok(rule)
}

/// Integral of `f` over an entity with a rule exact to `degree`.
pub fn integrate<F: FnMut(&Vector3<f64>) -> f64>(
    mesh: &PolyMesh,
    geo: &GeometryCache,
    entity: Entity,
    f: F,
    degree: usize,
) -> Result<f64> {
    Ok(quadrature_rule(mesh, geo, entity, degree)?.integrate(f))
}

/// Vector-valued variant of [`integrate`].
pub fn integrate_vector<F: FnMut(&Vector3<f64>) -> Vector3<f64>>(
    mesh: &PolyMesh,
    geo: &GeometryCache,
    entity: Entity,
    f: F,
    degree: usize,
) -> Result<Vector3<f64>> {
    Ok(quadrature_rule(mesh, geo, entity, degree)?.integrate_vector(f))
}

/// Exact cell integral of a polynomial by the divergence theorem:
/// `int_K p = sum_f sigma n_{f,x} int_f P` with `P` the `x`-antiderivative of
/// `p`. Only faces with a nonzero `x` normal component contribute, and the
/// face rules need exactness `deg p + 1`.
pub fn cell_integral_exact(mesh: &PolyMesh, geo: &GeometryCache, c: usize, p: &Polynomial) -> Result<f64> {
    let anti = p.antiderivative(0);
    faces_integral_x(mesh, geo, mesh.cell(c).iter().map(|sf| (sf.face, sf.sign_f64())), &anti)
}

/// `sum_f sign_f n_{f,x} int_f anti` over the listed faces.
pub(crate) fn faces_integral_x<I: IntoIterator<Item = (usize, f64)>>(
    mesh: &PolyMesh,
    geo: &GeometryCache,
    faces: I,
    anti: &Polynomial,
) -> Result<f64> {
    let degree = anti.degree();
    let mut total = 0.0;
    for (f, sign) in faces {
        let nx = geo.faces[f].normal.x;
        if nx.abs() < 1e-15 {
            continue;
        }
        total += sign * nx * integrate(mesh, geo, Entity::Face(f), |x| anti.eval(x), degree)?;
    }
    Ok(total)
}

/// Exact integral of a polynomial over the whole mesh, using boundary faces only.
pub fn domain_integral_exact(mesh: &PolyMesh, geo: &GeometryCache, p: &Polynomial) -> Result<f64> {
    let anti = p.antiderivative(0);
    let boundary = (0..mesh.num_faces())
        .filter(|&f| mesh.is_boundary_face(f))
        .map(|f| {
            let c = mesh.face_cells(f)[0];
            let sign = mesh.cell(c).iter().find(|sf| sf.face == f).map(|sf| sf.sign_f64()).unwrap_or(1.0);
            (f, sign)
        });
    faces_integral_x(mesh, geo, boundary, &anti)
}

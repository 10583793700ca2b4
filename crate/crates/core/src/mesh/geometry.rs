use nalgebra::Vector3;

use super::PolyMesh;
use crate::error::{Error, Result};

/// Relative tolerance below which a measure counts as zero.
pub(crate) const MEASURE_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct EdgeGeometry {
    pub length: f64,
    /// Unit tangent from the lower to the higher vertex index.
    pub tangent: Vector3<f64>,
    pub midpoint: Vector3<f64>,
}

#[derive(Clone, Debug)]
pub struct FaceGeometry {
    pub area: f64,
    pub diameter: f64,
    pub centroid: Vector3<f64>,
    /// Unit normal of the stored loop (right-hand rule).
    pub normal: Vector3<f64>,
    /// In-plane orthonormal frame with `frame[0] x frame[1] = normal`.
    pub frame: [Vector3<f64>; 2],
}

impl FaceGeometry {
    /// In-plane coordinates of `x` relative to the centroid.
    pub fn local(&self, x: &Vector3<f64>) -> [f64; 2] {
        let d = x - self.centroid;
        [d.dot(&self.frame[0]), d.dot(&self.frame[1])]
    }

    /// Global point with in-plane coordinates `s` relative to the centroid.
    pub fn global(&self, s: [f64; 2]) -> Vector3<f64> {
        self.centroid + self.frame[0] * s[0] + self.frame[1] * s[1]
    }
}

#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub volume: f64,
    pub diameter: f64,
    pub centroid: Vector3<f64>,
}

#[derive(Clone, Debug)]
pub struct GeometryCache {
    pub edges: Vec<EdgeGeometry>,
    pub faces: Vec<FaceGeometry>,
    pub cells: Vec<CellGeometry>,
}

impl GeometryCache {
    /// Mesh size: the largest cell diameter.
    pub fn mesh_size(&self) -> f64 {
        self.cells.iter().map(|c| c.diameter).fold(0.0, f64::max)
    }

    pub fn total_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).sum()
    }
}

fn diameter<'a, I: Iterator<Item = &'a Vector3<f64>> + Clone>(points: I) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.clone().enumerate() {
        for q in points.clone().skip(i + 1) {
            d = d.max((p - q).norm());
        }
    }
    d
}

/// Newell normal; its length is twice the area of a planar loop.
pub(crate) fn newell(points: &[Vector3<f64>]) -> Vector3<f64> {
    let n = points.len();
    (0..n).fold(Vector3::zeros(), |acc, i| acc + points[i].cross(&points[(i + 1) % n]))
}

/// Area, centroid and unit normal from a signed fan around the vertex average.
pub(crate) fn face_measures(points: &[Vector3<f64>]) -> (f64, Vector3<f64>, Vector3<f64>) {
    let nn = newell(points);
    let len = nn.norm();
    let normal = if len > 0.0 { nn / len } else { Vector3::zeros() };
    let avg = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    let mut area = 0.0;
    let mut moment = Vector3::zeros();
    for i in 0..points.len() {
        let a = points[i];
        let b = points[(i + 1) % points.len()];
        let t = 0.5 * (a - avg).cross(&(b - avg)).dot(&normal);
        area += t;
        moment += (avg + a + b) * (t / 3.0);
    }
    let centroid = if area != 0.0 { moment / area } else { avg };
    (area, centroid, normal)
}

pub(crate) fn face_geometry(mesh: &PolyMesh, f: usize) -> FaceGeometry {
    let points: Vec<Vector3<f64>> = mesh.face(f).iter().map(|&v| *mesh.vertex(v)).collect();
    let (area, centroid, normal) = face_measures(&points);
    let d = points[1] - points[0];
    let e1 = d - normal * d.dot(&normal);
    let e1 = if e1.norm() > 0.0 { e1.normalize() } else { Vector3::zeros() };
    FaceGeometry {
        area,
        diameter: diameter(points.iter()),
        centroid,
        normal,
        frame: [e1, normal.cross(&e1)],
    }
}

/// Volume and centroid from signed tetrahedra coned from the vertex average.
pub(crate) fn cell_measures(mesh: &PolyMesh, faces: &[FaceGeometry], c: usize) -> (f64, Vector3<f64>) {
    let verts = mesh.cell_vertices(c);
    let apex = verts.iter().map(|&v| mesh.vertex(v)).sum::<Vector3<f64>>() / verts.len() as f64;
    let mut volume = 0.0;
    let mut moment = Vector3::zeros();
    for sf in mesh.cell(c) {
        let lp = mesh.face(sf.face);
        let bf = faces[sf.face].centroid;
        for i in 0..lp.len() {
            let a = mesh.vertex(lp[i]);
            let b = mesh.vertex(lp[(i + 1) % lp.len()]);
            let t = sf.sign_f64() * (bf - apex).dot(&(a - apex).cross(&(b - apex))) / 6.0;
            volume += t;
            moment += (apex + bf + a + b) * (t / 4.0);
        }
    }
    let centroid = if volume != 0.0 { moment / volume } else { apex };
    (volume, centroid)
}

/// Measures, diameters, centroids, normals and tangents of every entity.
pub fn compute_geometry(mesh: &PolyMesh) -> Result<GeometryCache> {
    let edges = mesh
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &[a, b])| {
            let pa = mesh.vertex(a);
            let pb = mesh.vertex(b);
            let length = (pb - pa).norm();
            if !(length > 0.0) {
                return Err(Error::Geometry(format!("edge {e} has zero length")));
            }
            Ok(EdgeGeometry {
                length,
                tangent: (pb - pa) / length,
                midpoint: (pa + pb) * 0.5,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let faces: Vec<FaceGeometry> = (0..mesh.num_faces()).map(|f| face_geometry(mesh, f)).collect();
    for (f, g) in faces.iter().enumerate() {
        if !(g.area > MEASURE_TOL * g.diameter * g.diameter) {
            return Err(Error::Geometry(format!("face {f} has non-positive area {:e}", g.area)));
        }
    }

    let cells = (0..mesh.num_cells())
        .map(|c| {
            let (volume, centroid) = cell_measures(mesh, &faces, c);
            let diam = diameter(mesh.cell_vertices(c).iter().map(|&v| mesh.vertex(v)));
            if !(volume > MEASURE_TOL * diam.powi(3)) {
                return Err(Error::Geometry(format!("cell {c} has non-positive volume {volume:e}")));
            }
            Ok(CellGeometry {
                volume,
                diameter: diam,
                centroid,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GeometryCache { edges, faces, cells })
}

//! Polyhedral meshes: storage, derived topology, structured generation,
//! file I/O and validation.
//!
//! Faces are stored once with a vertex loop whose right-hand rule defines the
//! face normal; cells reference faces with a sign telling whether that normal
//! points out of the cell.

mod geometry;
mod io;
mod validate;

use std::collections::{BTreeSet, HashMap};

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub use geometry::{compute_geometry, CellGeometry, EdgeGeometry, FaceGeometry, GeometryCache};
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh};
pub use validate::{validate_mesh, RegularityStats, ValidationReport, Violation, Warning};

/// Reference from a cell to one of its faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedFace {
    pub face: usize,
    /// `+1` when the stored face normal points out of the cell.
    pub sign: i8,
}

impl SignedFace {
    pub fn sign_f64(&self) -> f64 {
        f64::from(self.sign)
    }
}

/// A face edge seen from the face loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceEdge {
    pub edge: usize,
    /// `+1` when the loop runs along the global edge tangent (low to high index).
    pub sign: i8,
}

#[derive(Clone, Debug)]
pub struct PolyMesh {
    vertices: Vec<Vector3<f64>>,
    faces: Vec<Vec<usize>>,
    cells: Vec<Vec<SignedFace>>,
    edges: Vec<[usize; 2]>,
    face_edges: Vec<Vec<FaceEdge>>,
    face_cells: Vec<Vec<usize>>,
    cell_vertices: Vec<Vec<usize>>,
    cell_edges: Vec<Vec<usize>>,
    boundary_faces: Vec<bool>,
    boundary_edges: Vec<bool>,
    boundary_vertices: Vec<bool>,
}

impl PolyMesh {
    /// Builds a mesh and its derived topology. Only index ranges and sign
    /// values are enforced here; everything else is reported by
    /// [`validate_mesh`].
    pub fn from_parts(
        vertices: Vec<Vector3<f64>>,
        faces: Vec<Vec<usize>>,
        cells: Vec<Vec<SignedFace>>,
    ) -> Result<Self> {
        for (f, face) in faces.iter().enumerate() {
            if let Some(&v) = face.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::InvalidArgument(format!(
                    "face {f} references vertex {v}, but the mesh has {} vertices",
                    vertices.len()
                )));
            }
        }
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::Topology {
                    cell: c,
                    message: "cell has no faces".into(),
                });
            }
            for sf in cell {
                if sf.face >= faces.len() {
                    return Err(Error::InvalidArgument(format!(
                        "cell {c} references face {}, but the mesh has {} faces",
                        sf.face,
                        faces.len()
                    )));
                }
                if sf.sign != 1 && sf.sign != -1 {
                    return Err(Error::InvalidArgument(format!(
                        "cell {c} uses face sign {}",
                        sf.sign
                    )));
                }
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        for face in &faces {
            let mut fe = Vec::with_capacity(face.len());
            for i in 0..face.len() {
                let a = face[i];
                let b = face[(i + 1) % face.len()];
                if a == b {
                    continue;
                }
                let key = [a.min(b), a.max(b)];
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
                fe.push(FaceEdge {
                    edge: id,
                    sign: if a < b { 1 } else { -1 },
                });
            }
            face_edges.push(fe);
        }

        let mut face_cells = vec![Vec::new(); faces.len()];
        let mut cell_vertices = Vec::with_capacity(cells.len());
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let mut vs = BTreeSet::new();
            let mut es = BTreeSet::new();
            for sf in cell {
                face_cells[sf.face].push(c);
                vs.extend(faces[sf.face].iter().copied());
                es.extend(face_edges[sf.face].iter().map(|fe| fe.edge));
            }
            cell_vertices.push(vs.into_iter().collect());
            cell_edges.push(es.into_iter().collect());
        }

        let boundary_faces: Vec<bool> = face_cells.iter().map(|c| c.len() == 1).collect();
        let mut boundary_edges = vec![false; edges.len()];
        let mut boundary_vertices = vec![false; vertices.len()];
        for (f, on_boundary) in boundary_faces.iter().enumerate() {
            if *on_boundary {
                for fe in &face_edges[f] {
                    boundary_edges[fe.edge] = true;
                }
                for &v in &faces[f] {
                    boundary_vertices[v] = true;
                }
            }
        }

        Ok(Self {
            vertices,
            faces,
            cells,
            edges,
            face_edges,
            face_cells,
            cell_vertices,
            cell_edges,
            boundary_faces,
            boundary_edges,
            boundary_vertices,
        })
    }

    /// Like [`PolyMesh::from_parts`], but rejects meshes with any violated
    /// invariant.
    pub fn checked(
        vertices: Vec<Vector3<f64>>,
        faces: Vec<Vec<usize>>,
        cells: Vec<Vec<SignedFace>>,
    ) -> Result<Self> {
        let mesh = Self::from_parts(vertices, faces, cells)?;
        validate_mesh(&mesh).into_result(&mesh)?;
        Ok(mesh)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }
    pub fn vertex(&self, v: usize) -> &Vector3<f64> {
        &self.vertices[v]
    }
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }
    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }
    pub fn cells(&self) -> &[Vec<SignedFace>] {
        &self.cells
    }
    pub fn cell(&self, c: usize) -> &[SignedFace] {
        &self.cells[c]
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }
    /// Edges of a face in loop order: entry `i` joins loop vertices `i` and `i + 1`.
    pub fn face_edges(&self, f: usize) -> &[FaceEdge] {
        &self.face_edges[f]
    }
    pub fn face_cells(&self, f: usize) -> &[usize] {
        &self.face_cells[f]
    }
    /// Vertices of a cell, ascending.
    pub fn cell_vertices(&self, c: usize) -> &[usize] {
        &self.cell_vertices[c]
    }
    /// Edges of a cell, ascending.
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }
    /// Faces of a cell, ascending by face index.
    pub fn cell_faces_sorted(&self, c: usize) -> Vec<SignedFace> {
        let mut fs = self.cells[c].clone();
        fs.sort_by_key(|sf| sf.face);
        fs
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.boundary_faces[f]
    }
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edges[e]
    }
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertices[v]
    }

    pub fn num_interior_vertices(&self) -> usize {
        self.boundary_vertices.iter().filter(|b| !**b).count()
    }
    pub fn num_interior_edges(&self) -> usize {
        self.boundary_edges.iter().filter(|b| !**b).count()
    }
    pub fn num_interior_faces(&self) -> usize {
        self.boundary_faces.iter().filter(|b| !**b).count()
    }

    /// Returns a copy with every vertex moved by `map`; topology is unchanged.
    pub fn map_vertices<F: Fn(&Vector3<f64>) -> Vector3<f64>>(&self, map: F) -> Self {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = map(v);
        }
        out
    }
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub lo: Vector3<f64>,
    pub hi: Vector3<f64>,
}

impl Aabb {
    pub fn unit() -> Self {
        Self {
            lo: Vector3::zeros(),
            hi: Vector3::repeat(1.0),
        }
    }

    pub fn volume(&self) -> f64 {
        (self.hi - self.lo).iter().product()
    }
}

/// Structured mesh of `n^3` congruent boxes.
pub fn generate_cube_mesh(n: usize, domain: Aabb) -> Result<PolyMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("cube mesh needs n >= 1".into()));
    }
    let ext = domain.hi - domain.lo;
    if ext.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "box extents must be positive, got {ext:?}"
        )));
    }
    let m = n + 1;
    let vid = |i: usize, j: usize, k: usize| i + m * (j + m * k);
    let mut vertices = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                let t = Vector3::new(i as f64, j as f64, k as f64) / n as f64;
                vertices.push(domain.lo + ext.component_mul(&t));
            }
        }
    }

    let mut faces = Vec::with_capacity(3 * n * n * m);
    // face ids: x-normal at (i, j, k), i <= n; y-normal; z-normal
    let mut fx = HashMap::new();
    let mut fy = HashMap::new();
    let mut fz = HashMap::new();
    for k in 0..n {
        for j in 0..n {
            for i in 0..m {
                fx.insert((i, j, k), faces.len());
                faces.push(vec![vid(i, j, k), vid(i, j + 1, k), vid(i, j + 1, k + 1), vid(i, j, k + 1)]);
            }
        }
    }
    for k in 0..n {
        for j in 0..m {
            for i in 0..n {
                fy.insert((i, j, k), faces.len());
                faces.push(vec![vid(i, j, k), vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j, k)]);
            }
        }
    }
    for k in 0..m {
        for j in 0..n {
            for i in 0..n {
                fz.insert((i, j, k), faces.len());
                faces.push(vec![vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k)]);
            }
        }
    }

    let mut cells = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let sf = |face: usize, sign: i8| SignedFace { face, sign };
                cells.push(vec![
                    sf(fx[&(i, j, k)], -1),
                    sf(fx[&(i + 1, j, k)], 1),
                    sf(fy[&(i, j, k)], -1),
                    sf(fy[&(i, j + 1, k)], 1),
                    sf(fz[&(i, j, k)], -1),
                    sf(fz[&(i, j, k + 1)], 1),
                ]);
            }
        }
    }
    PolyMesh::from_parts(vertices, faces, cells)
}

/// Structured mesh where every box is cut along its `x = y` diagonal plane
/// into two triangular prisms.
pub fn generate_prism_mesh(n: usize, domain: Aabb) -> Result<PolyMesh> {
    let cubes = generate_cube_mesh(n, domain)?;
    let m = n + 1;
    let vid = |i: usize, j: usize, k: usize| i + m * (j + m * k);
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    // faces are deduplicated by their sorted vertex set
    let mut add_face = |loop_: Vec<usize>, faces: &mut Vec<Vec<usize>>| -> (usize, bool) {
        let mut key = loop_.clone();
        key.sort_unstable();
        if let Some(&id) = index.get(&key) {
            let same = is_same_orientation(&faces[id], &loop_);
            (id, same)
        } else {
            index.insert(key, faces.len());
            faces.push(loop_);
            (faces.len() - 1, true)
        }
    };
    let mut cells = Vec::new();
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let p = |di: usize, dj: usize, dk: usize| vid(i + di, j + dj, k + dk);
                // prism A: corners (0,0),(1,0),(1,1); prism B: (0,0),(1,1),(0,1)
                let tris = [[(0, 0), (1, 0), (1, 1)], [(0, 0), (1, 1), (0, 1)]];
                for tri in tris {
                    let mut cell = Vec::new();
                    // outward loops: bottom clockwise seen from +z, top counter-clockwise
                    let bottom = vec![p(tri[0].0, tri[0].1, 0), p(tri[2].0, tri[2].1, 0), p(tri[1].0, tri[1].1, 0)];
                    let top = vec![p(tri[0].0, tri[0].1, 1), p(tri[1].0, tri[1].1, 1), p(tri[2].0, tri[2].1, 1)];
                    for lp in [bottom, top] {
                        let (id, same) = add_face(lp, &mut faces);
                        cell.push(SignedFace { face: id, sign: if same { 1 } else { -1 } });
                    }
                    for s in 0..3 {
                        let a = tri[s];
                        let b = tri[(s + 1) % 3];
                        let lp = vec![p(a.0, a.1, 0), p(b.0, b.1, 0), p(b.0, b.1, 1), p(a.0, a.1, 1)];
                        let (id, same) = add_face(lp, &mut faces);
                        cell.push(SignedFace { face: id, sign: if same { 1 } else { -1 } });
                    }
                    cells.push(cell);
                }
            }
        }
    }
    PolyMesh::from_parts(cubes.vertices.clone(), faces, cells)
}

/// True when `b` is a cyclic rotation of `a` (same orientation).
fn is_same_orientation(a: &[usize], b: &[usize]) -> bool {
    let n = a.len();
    if let Some(start) = b.iter().position(|&v| v == a[0]) {
        (0..n).all(|i| a[i] == b[(start + i) % n])
    } else {
        false
    }
}

//! Per-cell data shared by the local spaces: local entity numbering, measures
//! and the low-order moments every projection needs.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::calculus::quadrature_rule;
use crate::calculus::Entity;
use crate::error::Result;
use crate::mesh::{GeometryCache, PolyMesh};

/// Moments up to degree 2 are all the lowest-order spaces consume.
pub const MOMENT_DEGREE: usize = 2;

/// Face data seen from one cell.
#[derive(Clone, Debug)]
pub struct LocalFace {
    pub face: usize,
    /// `+1` when the stored normal points out of the cell.
    pub sign: f64,
    pub area: f64,
    pub diameter: f64,
    pub centroid: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub frame: [Vector3<f64>; 2],
    /// Loop vertices as indices into [`Element::vertices`].
    pub loop_vertices: Vec<usize>,
    /// Loop edges (edge `i` joins loop vertices `i` and `i + 1`) as indices
    /// into [`Element::edges`].
    pub loop_edges: Vec<usize>,
    /// Circulation signs: `+1` when the loop runs along the edge tangent.
    pub loop_signs: Vec<f64>,
    /// `int_f s` and `int_f s s^T` in frame coordinates about the centroid.
    pub first_moment: Vector2<f64>,
    pub second_moment: Matrix2<f64>,
}

impl LocalFace {
    pub fn local(&self, x: &Vector3<f64>) -> [f64; 2] {
        let d = x - self.centroid;
        [d.dot(&self.frame[0]), d.dot(&self.frame[1])]
    }

    pub fn len(&self) -> usize {
        self.loop_vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loop_vertices.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Element {
    pub cell: usize,
    pub volume: f64,
    pub diameter: f64,
    pub centroid: Vector3<f64>,
    /// Global vertex indices, ascending.
    pub vertices: Vec<usize>,
    pub positions: Vec<Vector3<f64>>,
    /// Global edge indices, ascending.
    pub edges: Vec<usize>,
    /// Local vertex indices of each edge, lower global index first.
    pub edge_ends: Vec<[usize; 2]>,
    pub edge_lengths: Vec<f64>,
    pub edge_tangents: Vec<Vector3<f64>>,
    /// Faces ordered by global index.
    pub faces: Vec<LocalFace>,
    /// `int_K (x - b_K)` and `int_K (x - b_K)(x - b_K)^T`.
    pub first_moment: Vector3<f64>,
    pub second_moment: Matrix3<f64>,
}

impl Element {
    /// Builds the cell data; moments use rules of exactness
    /// `min(degree, MOMENT_DEGREE)`.
    pub fn new(mesh: &PolyMesh, geo: &GeometryCache, c: usize, degree: usize) -> Result<Self> {
        let degree = degree.min(MOMENT_DEGREE);
        let cg = &geo.cells[c];
        let vertices = mesh.cell_vertices(c).to_vec();
        let edges = mesh.cell_edges(c).to_vec();
        let local_vertex = |v: usize| vertices.binary_search(&v).expect("face vertex belongs to the cell");
        let local_edge = |e: usize| edges.binary_search(&e).expect("face edge belongs to the cell");

        let edge_ends = edges
            .iter()
            .map(|&e| {
                let [a, b] = mesh.edge(e);
                [local_vertex(a), local_vertex(b)]
            })
            .collect();

        let mut faces = Vec::new();
        for sf in mesh.cell_faces_sorted(c) {
            let fg = &geo.faces[sf.face];
            let rule = quadrature_rule(mesh, geo, Entity::Face(sf.face), degree)?;
            let mut m1 = Vector2::zeros();
            let mut m2 = Matrix2::zeros();
            for (x, w) in rule.points.iter().zip(&rule.weights) {
                let d = x - fg.centroid;
                let s = Vector2::new(d.dot(&fg.frame[0]), d.dot(&fg.frame[1]));
                m1 += s * *w;
                m2 += s * s.transpose() * *w;
            }
            let fe = mesh.face_edges(sf.face);
            faces.push(LocalFace {
                face: sf.face,
                sign: sf.sign_f64(),
                area: fg.area,
                diameter: fg.diameter,
                centroid: fg.centroid,
                normal: fg.normal,
                frame: fg.frame,
                loop_vertices: mesh.face(sf.face).iter().map(|&v| local_vertex(v)).collect(),
                loop_edges: fe.iter().map(|x| local_edge(x.edge)).collect(),
                loop_signs: fe.iter().map(|x| f64::from(x.sign)).collect(),
                first_moment: m1,
                second_moment: m2,
            });
        }

        let rule = quadrature_rule(mesh, geo, Entity::Cell(c), degree)?;
        let mut m1 = Vector3::zeros();
        let mut m2 = Matrix3::zeros();
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let d = x - cg.centroid;
            m1 += d * *w;
            m2 += d * d.transpose() * *w;
        }

        Ok(Self {
            cell: c,
            volume: cg.volume,
            diameter: cg.diameter,
            centroid: cg.centroid,
            positions: vertices.iter().map(|&v| *mesh.vertex(v)).collect(),
            edge_lengths: edges.iter().map(|&e| geo.edges[e].length).collect(),
            edge_tangents: edges.iter().map(|&e| geo.edges[e].tangent).collect(),
            vertices,
            edges,
            edge_ends,
            faces,
            first_moment: m1,
            second_moment: m2,
        })
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
}

/// Builds every element of a mesh.
pub fn build_elements(mesh: &PolyMesh, geo: &GeometryCache, degree: usize) -> Result<Vec<Element>> {
    (0..mesh.num_cells()).map(|c| Element::new(mesh, geo, c, degree)).collect()
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::Vector3;

use super::geometry::{cell_measures, face_geometry, FaceGeometry, MEASURE_TOL};
use super::PolyMesh;
use crate::error::{Error, Result};

/// Relative planarity tolerance (times the face diameter).
pub const PLANARITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    ShortFace { face: usize, len: usize },
    RepeatedVertex { face: usize, vertex: usize },
    NonPlanarFace { face: usize, deviation: f64, tolerance: f64 },
    DegenerateFace { face: usize, area: f64 },
    OpenCell { cell: usize, edge: [usize; 2] },
    EulerCharacteristic { cell: usize, value: i64 },
    DegenerateCell { cell: usize, volume: f64 },
    FaceUsage { face: usize, message: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ShortFace { face, len } => write!(f, "face {face} has only {len} vertices"),
            Violation::RepeatedVertex { face, vertex } => {
                write!(f, "face {face} repeats vertex {vertex}")
            }
            Violation::NonPlanarFace {
                face,
                deviation,
                tolerance,
            } => write!(f, "face {face} deviates {deviation:.3e} from its plane (tolerance {tolerance:.3e})"),
            Violation::DegenerateFace { face, area } => write!(f, "face {face} has area {area:e}"),
            Violation::OpenCell { cell, edge } => write!(
                f,
                "cell {cell} is not closed: edge ({}, {}) is not used exactly once in each direction",
                edge[0], edge[1]
            ),
            Violation::EulerCharacteristic { cell, value } => {
                write!(f, "cell {cell} has Euler characteristic {value}, expected 2")
            }
            Violation::DegenerateCell { cell, volume } => write!(f, "cell {cell} has volume {volume:e}"),
            Violation::FaceUsage { face, message } => write!(f, "face {face}: {message}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Warning {
    /// Some fan triangle around the face centroid is inverted.
    FaceNotStarShaped { face: usize },
    /// Some cone tetrahedron around the cell centroid is inverted.
    CellNotStarShaped { cell: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::FaceNotStarShaped { face } => {
                write!(f, "face {face} is not star-shaped with respect to its centroid")
            }
            Warning::CellNotStarShaped { cell } => {
                write!(f, "cell {cell} is not star-shaped with respect to its centroid")
            }
        }
    }
}

/// Min and max of the local size ratios `h_e / h_f` and `h_f / h_K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularityStats {
    pub edge_face_ratio: (f64, f64),
    pub face_cell_ratio: (f64, f64),
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
    pub regularity: RegularityStats,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Converts the first violation into the matching error kind.
    pub fn into_result(self, mesh: &PolyMesh) -> Result<()> {
        let Some(v) = self.violations.into_iter().next() else {
            return Ok(());
        };
        let owner = |face: usize| mesh.face_cells(face).first().copied();
        Err(match v {
            Violation::NonPlanarFace {
                face,
                deviation,
                tolerance,
            } => Error::Planarity {
                face,
                deviation,
                tolerance,
            },
            Violation::DegenerateFace { .. } | Violation::DegenerateCell { .. } => Error::Geometry(v.to_string()),
            Violation::OpenCell { cell, .. }
            | Violation::EulerCharacteristic { cell, .. } => Error::Topology {
                cell,
                message: v.to_string(),
            },
            Violation::ShortFace { face, .. }
            | Violation::RepeatedVertex { face, .. }
            | Violation::FaceUsage { face, .. } => match owner(face) {
                Some(cell) => Error::Topology {
                    cell,
                    message: v.to_string(),
                },
                None => Error::InvalidArgument(v.to_string()),
            },
        })
    }
}

fn min_max(acc: (f64, f64), x: f64) -> (f64, f64) {
    (acc.0.min(x), acc.1.max(x))
}

/// Checks every mesh invariant and the centroid star-shapedness heuristic.
/// Never fails; problems are listed in the report.
pub fn validate_mesh(mesh: &PolyMesh) -> ValidationReport {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    let mut faces: Vec<Option<FaceGeometry>> = Vec::with_capacity(mesh.num_faces());
    for f in 0..mesh.num_faces() {
        let lp = mesh.face(f);
        if lp.len() < 3 {
            violations.push(Violation::ShortFace { face: f, len: lp.len() });
            faces.push(None);
            continue;
        }
        let mut seen = BTreeSet::new();
        if let Some(&v) = lp.iter().find(|&&v| !seen.insert(v)) {
            violations.push(Violation::RepeatedVertex { face: f, vertex: v });
        }
        let g = face_geometry(mesh, f);
        let avg = lp.iter().map(|&v| mesh.vertex(v)).sum::<Vector3<f64>>() / lp.len() as f64;
        let deviation = lp
            .iter()
            .map(|&v| (mesh.vertex(v) - avg).dot(&g.normal).abs())
            .fold(0.0, f64::max);
        let tolerance = PLANARITY_TOL * g.diameter;
        if !(deviation <= tolerance) {
            violations.push(Violation::NonPlanarFace {
                face: f,
                deviation,
                tolerance,
            });
        }
        if !(g.area > MEASURE_TOL * g.diameter * g.diameter) {
            violations.push(Violation::DegenerateFace { face: f, area: g.area });
        } else {
            let inverted = (0..lp.len()).any(|i| {
                let a = mesh.vertex(lp[i]) - g.centroid;
                let b = mesh.vertex(lp[(i + 1) % lp.len()]) - g.centroid;
                0.5 * a.cross(&b).dot(&g.normal) <= MEASURE_TOL * g.diameter * g.diameter
            });
            if inverted {
                warnings.push(Warning::FaceNotStarShaped { face: f });
            }
        }
        faces.push(Some(g));
    }

    for c in 0..mesh.num_cells() {
        // directed uses of each undirected edge: (low -> high, high -> low)
        let mut uses: BTreeMap<[usize; 2], (u32, u32)> = BTreeMap::new();
        for sf in mesh.cell(c) {
            let lp = mesh.face(sf.face);
            for i in 0..lp.len() {
                let (mut a, mut b) = (lp[i], lp[(i + 1) % lp.len()]);
                if sf.sign < 0 {
                    std::mem::swap(&mut a, &mut b);
                }
                let entry = uses.entry([a.min(b), a.max(b)]).or_default();
                if a < b {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        if let Some((edge, _)) = uses.iter().find(|(_, u)| **u != (1, 1)) {
            violations.push(Violation::OpenCell { cell: c, edge: *edge });
        }
        let chi = mesh.cell_vertices(c).len() as i64 - mesh.cell_edges(c).len() as i64 + mesh.cell(c).len() as i64;
        if chi != 2 {
            violations.push(Violation::EulerCharacteristic { cell: c, value: chi });
        }
    }

    for f in 0..mesh.num_faces() {
        let cells = mesh.face_cells(f);
        let message = match cells.len() {
            0 => Some("not referenced by any cell".to_string()),
            1 => None,
            2 => {
                let sign = |c: usize| mesh.cell(c).iter().find(|sf| sf.face == f).map(|sf| sf.sign);
                if cells[0] == cells[1] {
                    Some(format!("referenced twice by cell {}", cells[0]))
                } else if sign(cells[0]) == sign(cells[1]) {
                    Some(format!("cells {} and {} use the same orientation", cells[0], cells[1]))
                } else {
                    None
                }
            }
            n => Some(format!("referenced by {n} cells")),
        };
        if let Some(message) = message {
            violations.push(Violation::FaceUsage { face: f, message });
        }
    }

    let mut edge_face_ratio = (f64::INFINITY, 0.0);
    let mut face_cell_ratio = (f64::INFINITY, 0.0);
    if faces.iter().all(Option::is_some) {
        let faces: Vec<FaceGeometry> = faces.into_iter().flatten().collect();
        for (f, g) in faces.iter().enumerate() {
            for fe in mesh.face_edges(f) {
                let [a, b] = mesh.edge(fe.edge);
                edge_face_ratio = min_max(edge_face_ratio, (mesh.vertex(a) - mesh.vertex(b)).norm() / g.diameter);
            }
        }
        for c in 0..mesh.num_cells() {
            let (volume, centroid) = cell_measures(mesh, &faces, c);
            let verts = mesh.cell_vertices(c);
            let hk = verts
                .iter()
                .flat_map(|&a| verts.iter().map(move |&b| (a, b)))
                .map(|(a, b)| (mesh.vertex(a) - mesh.vertex(b)).norm())
                .fold(0.0, f64::max);
            for sf in mesh.cell(c) {
                face_cell_ratio = min_max(face_cell_ratio, faces[sf.face].diameter / hk);
            }
            if !(volume > MEASURE_TOL * hk.powi(3)) {
                violations.push(Violation::DegenerateCell { cell: c, volume });
                continue;
            }
            let inverted = mesh.cell(c).iter().any(|sf| {
                let lp = mesh.face(sf.face);
                let bf = faces[sf.face].centroid - centroid;
                (0..lp.len()).any(|i| {
                    let a = mesh.vertex(lp[i]) - centroid;
                    let b = mesh.vertex(lp[(i + 1) % lp.len()]) - centroid;
                    sf.sign_f64() * bf.dot(&a.cross(&b)) / 6.0 <= MEASURE_TOL * hk.powi(3)
                })
            });
            if inverted {
                warnings.push(Warning::CellNotStarShaped { cell: c });
            }
        }
    }

    ValidationReport {
        violations,
        warnings,
        regularity: RegularityStats {
            edge_face_ratio,
            face_cell_ratio,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_cube_mesh, Aabb, SignedFace};

    #[test]
    fn cube_mesh_is_clean() {
        let m = generate_cube_mesh(4, Aabb::unit()).unwrap();
        let r = validate_mesh(&m);
        assert!(r.violations.is_empty());
        assert!(r.warnings.is_empty());
        // edges of a square over its diagonal
        let ef = 1.0 / 2f64.sqrt();
        assert!((r.regularity.edge_face_ratio.0 - ef).abs() < 1e-14);
        assert!((r.regularity.edge_face_ratio.1 - ef).abs() < 1e-14);
    }

    #[test]
    fn repeated_vertex_is_reported() {
        let m = generate_cube_mesh(1, Aabb::unit()).unwrap();
        let mut faces = m.faces().to_vec();
        let v = faces[0][0];
        faces[0].push(v);
        let m = PolyMesh::from_parts(m.vertices().to_vec(), faces, m.cells().to_vec()).unwrap();
        let r = validate_mesh(&m);
        assert!(r
            .violations
            .iter()
            .any(|x| matches!(x, Violation::RepeatedVertex { face: 0, .. })));
    }

    #[test]
    fn missing_face_opens_the_cell() {
        let m = generate_cube_mesh(1, Aabb::unit()).unwrap();
        let cells: Vec<Vec<SignedFace>> = vec![m.cell(0)[1..].to_vec()];
        let m = PolyMesh::from_parts(m.vertices().to_vec(), m.faces().to_vec(), cells).unwrap();
        let r = validate_mesh(&m);
        assert!(matches!(r.violations[0], Violation::OpenCell { cell: 0, .. }));
        assert!(matches!(r.into_result(&m), Err(Error::Topology { cell: 0, .. })));
    }
}

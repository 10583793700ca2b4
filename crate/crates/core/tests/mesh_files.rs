use nalgebra::Vector3;
use quaddiv::calculus::decompose_cell;
use quaddiv::mesh::{
    compute_geometry, generate_cube_mesh, generate_prism_mesh, load_mesh, parse_mesh, save_mesh, validate_mesh,
    write_mesh, Aabb, PolyMesh, SignedFace, Warning,
};
use quaddiv::Error;

fn unit_cube_text(vertices: &str, faces: &str) -> String {
    format!(r#"{{"vertices": {vertices}, "faces": {faces}, "cells": [[1, 2, 3, 4, 5, 6]]}}"#)
}

const CUBE_VERTICES: &str = "[[0,0,0],[0,0,1],[0,1,0],[0,1,1],[1,0,0],[1,0,1],[1,1,0],[1,1,1]]";
// every face is listed counter-clockwise seen from outside
const CUBE_FACES: &str = "[[0,1,3,2],[4,6,7,5],[0,4,5,1],[2,3,7,6],[0,2,6,4],[1,5,7,3]]";

#[test]
fn hand_written_cube_loads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.json");
    std::fs::write(&path, unit_cube_text(CUBE_VERTICES, CUBE_FACES)).unwrap();
    let mesh = load_mesh(&path).unwrap();
    let geo = compute_geometry(&mesh).unwrap();
    assert!((geo.cells[0].volume - 1.0).abs() < 1e-15);
    assert_eq!(mesh.num_edges(), 12);
}

#[test]
fn missing_face_is_a_topology_error() {
    let faces = "[[0,1,3,2],[4,6,7,5],[0,4,5,1],[2,3,7,6],[0,2,6,4],[1,5,7,3]]";
    let text = format!(r#"{{"vertices": {CUBE_VERTICES}, "faces": {faces}, "cells": [[1, 2, 3, 4, 5]]}}"#);
    match parse_mesh(&text) {
        Err(Error::Topology { cell, .. }) => assert_eq!(cell, 0),
        other => panic!("expected a topology error, got {other:?}"),
    }
}

#[test]
fn warped_face_is_a_planarity_error() {
    let warped = "[[0,0,0],[0,0,1],[0,1,0],[0,1,1],[1,0,0],[1,0,1],[1,1,0],[1.05,1,1]]";
    match parse_mesh(&unit_cube_text(warped, CUBE_FACES)) {
        Err(Error::Planarity { deviation, tolerance, .. }) => assert!(deviation > tolerance),
        other => panic!("expected a planarity error, got {other:?}"),
    }
}

#[test]
fn syntax_error_reports_position() {
    let text = "{\n  \"vertices\": [[0, 0, 0],\n  oops\n}";
    match parse_mesh(text) {
        Err(Error::MalformedFile { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a malformed-file error, got {other:?}"),
    }
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_mesh("/nonexistent/mesh.json"), Err(Error::Io(_))));
}

fn same_up_to_index_order(a: &PolyMesh, b: &PolyMesh) -> bool {
    let key = |m: &PolyMesh| {
        let mut faces: Vec<Vec<[u64; 3]>> = m
            .faces()
            .iter()
            .map(|l| {
                let mut v: Vec<[u64; 3]> = l.iter().map(|&i| m.vertex(i).map(f64::to_bits).into()).collect();
                v.sort();
                v
            })
            .collect();
        faces.sort();
        faces
    };
    a.num_cells() == b.num_cells() && key(a) == key(b)
}

#[test]
fn saved_meshes_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, mesh) in [
        ("cube", generate_cube_mesh(2, Aabb::unit()).unwrap()),
        ("prism", generate_prism_mesh(2, Aabb { lo: Vector3::new(-1.0, 0.0, 0.5), hi: Vector3::new(0.3, 2.0, 1.0) }).unwrap()),
    ] {
        let path = dir.path().join(format!("{name}.json"));
        save_mesh(&mesh, &path).unwrap();
        let back = load_mesh(&path).unwrap();
        assert!(same_up_to_index_order(&mesh, &back), "{name}");
        assert_eq!(write_mesh(&back), write_mesh(&mesh));
    }
}

/// Ray-casting point-in-polygon test in the xy-plane.
fn inside_polygon(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Prism over a counter-clockwise polygon, extruded from z = 0 to z = 1.
fn extruded(poly: &[[f64; 2]]) -> PolyMesh {
    let n = poly.len();
    let mut vertices: Vec<Vector3<f64>> = poly.iter().map(|p| Vector3::new(p[0], p[1], 0.0)).collect();
    vertices.extend(poly.iter().map(|p| Vector3::new(p[0], p[1], 1.0)));
    let mut faces = vec![(0..n).rev().collect::<Vec<_>>(), (n..2 * n).collect()];
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push(vec![i, j, n + j, n + i]);
    }
    let cell = (0..faces.len()).map(|face| SignedFace { face, sign: 1 }).collect();
    PolyMesh::checked(vertices, faces, vec![cell]).unwrap()
}

#[test]
fn thin_l_prism_is_flagged_not_star_shaped() {
    let l_shape = [[0.0, 0.0], [3.0, 0.0], [3.0, 0.5], [0.5, 0.5], [0.5, 3.0], [0.0, 3.0]];
    let mesh = extruded(&l_shape);
    let geo = compute_geometry(&mesh).unwrap();
    let c = geo.cells[0].centroid;
    // the oracle: the centroid is outside the L, so no cone from it can tile it
    assert!(!inside_polygon(&l_shape, [c.x, c.y]));
    let report = validate_mesh(&mesh);
    assert!(report.is_valid(), "star-shapedness is a warning, not a violation");
    assert!(report.warnings.contains(&Warning::CellNotStarShaped { cell: 0 }));
    assert!(report.warnings.contains(&Warning::FaceNotStarShaped { face: 0 }));
    assert!(matches!(decompose_cell(&mesh, &geo, 0), Err(Error::StarShape(_))));
}

#[test]
fn chunky_l_prism_is_accepted() {
    let l_shape = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
    let mesh = extruded(&l_shape);
    let geo = compute_geometry(&mesh).unwrap();
    let c = geo.cells[0].centroid;
    assert!(inside_polygon(&l_shape, [c.x, c.y]));
    assert!(validate_mesh(&mesh).warnings.is_empty());
    assert_eq!(decompose_cell(&mesh, &geo, 0).unwrap().len(), 2 * 6 + 6 * 4);
}

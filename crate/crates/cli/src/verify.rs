use std::fmt::Write as _;

use nalgebra::{DVector, Vector3};
use quaddiv::assembly::{Discretization, QuadratureOptions};
use quaddiv::complex::{verify_complex, SampleField};
use quaddiv::graddiv::graddiv_dofs;
use quaddiv::mesh::{compute_geometry, validate_mesh, PolyMesh};
use quaddiv::Result;

use crate::config::RunConfig;
use crate::converge::load_source;

/// Worst-case local checks over all cells.
#[derive(Clone, Debug, Default)]
pub struct LocalChecks {
    /// Smallest eigenvalue of any local mass matrix, relative to `|K|`.
    pub min_mass_eigenvalue: f64,
    /// `max |m(I c, I d) - |K| c.d| / |K|` over coordinate vectors `c, d`.
    pub constant_consistency: f64,
    /// `max |a(I c, .)|`: constants lie in the kernel of the grad-div form.
    pub constant_kernel: f64,
}

pub fn local_checks(mesh: &PolyMesh, quadrature: QuadratureOptions) -> Result<LocalChecks> {
    let geo = compute_geometry(mesh)?;
    let disc = Discretization::new(mesh, &geo, quadrature)?;
    let mut out = LocalChecks {
        min_mass_eigenvalue: f64::INFINITY,
        ..Default::default()
    };
    for cf in &disc.cells {
        let e = &cf.element;
        let mass = &cf.graddiv.mass;
        let eig = mass.clone().symmetric_eigen().eigenvalues.min() / e.volume;
        out.min_mass_eigenvalue = out.min_mass_eigenvalue.min(eig);
        let dofs: Vec<DVector<f64>> = (0..3)
            .map(|i| {
                let c = Vector3::ith(i, 1.0);
                DVector::from_vec(graddiv_dofs(e, |_| c, |_| 0.0, 0))
            })
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                let m = dofs[i].dot(&(mass * &dofs[j]));
                let want = if i == j { e.volume } else { 0.0 };
                out.constant_consistency = out.constant_consistency.max((m - want).abs() / e.volume);
            }
            out.constant_kernel = out.constant_kernel.max((&cf.graddiv.stiffness * &dofs[i]).amax());
        }
    }
    Ok(out)
}

/// Mesh statistics and validation findings.
pub fn mesh_info(mesh: &PolyMesh) -> Result<String> {
    let report = validate_mesh(mesh);
    let mut s = String::new();
    let _ = writeln!(s, "vertices={}", mesh.num_vertices());
    let _ = writeln!(s, "edges={}", mesh.num_edges());
    let _ = writeln!(s, "faces={}", mesh.num_faces());
    let _ = writeln!(s, "cells={}", mesh.num_cells());
    let _ = writeln!(
        s,
        "interior vertices/edges/faces={}/{}/{}",
        mesh.num_interior_vertices(),
        mesh.num_interior_edges(),
        mesh.num_interior_faces()
    );
    if let Ok(geo) = compute_geometry(mesh) {
        let _ = writeln!(s, "h={:.6e}", geo.mesh_size());
        let _ = writeln!(s, "volume={:.6e}", geo.total_volume());
    }
    let r = &report.regularity;
    let _ = writeln!(s, "edge/face diameter ratio min={:.4} max={:.4}", r.edge_face_ratio.0, r.edge_face_ratio.1);
    let _ = writeln!(s, "face/cell diameter ratio min={:.4} max={:.4}", r.face_cell_ratio.0, r.face_cell_ratio.1);
    let _ = writeln!(s, "valid={}", report.is_valid());
    for v in &report.violations {
        let _ = writeln!(s, "violation: {v:?}");
    }
    for w in &report.warnings {
        let _ = writeln!(s, "warning: {w:?}");
    }
    Ok(s)
}

/// Complex and local-form checks for every configured mesh.
pub fn run_verify(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let mut s = String::new();
    for source in &config.meshes {
        let mesh = load_source(source)?;
        let geo = compute_geometry(&mesh)?;
        let _ = writeln!(s, "[{}]", source.id());
        if mesh.num_interior_vertices() == 0 {
            let _ = writeln!(s, "note: no interior vertex, the constrained system is degenerate");
        }
        let report = verify_complex(&mesh, &geo, &SampleField::standard(), config.quadrature.analytic)?;
        s.push_str(&report.to_key_values());
        let local = local_checks(&mesh, config.quadrature)?;
        let _ = writeln!(s, "min_local_mass_eigenvalue={:.3e}", local.min_mass_eigenvalue);
        let _ = writeln!(s, "constant_consistency={:.3e}", local.constant_consistency);
        let _ = writeln!(s, "constant_kernel={:.3e}", local.constant_kernel);
        s.push('\n');
    }
    Ok(s)
}

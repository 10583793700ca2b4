use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use quaddiv::assembly::{
    assemble_system, error_div_diagnostics, error_norm_h, norm_b, norm_c, norm_p, solve_system, Discretization,
};
use quaddiv::complex::{verify_complex, ComplexReport, SampleField};
use quaddiv::graddiv::interpolate_v;
use quaddiv::manufactured::{build_benchmark, Benchmark};
use quaddiv::mesh::{compute_geometry, generate_cube_mesh, load_mesh, Aabb, PolyMesh};
use quaddiv::Result;

use crate::config::{MeshSource, RunConfig};

pub const CSV_HEADER: &str = "mesh,h,n_u,n_phi,n_p,err_h,rate_h,div_l2,rate_div_l2,div_h1,rate_div_h1,phi_norm,p_norm,solve_residual,wall_time,status";

#[derive(Clone, Debug, Default)]
pub struct ConvergenceRow {
    pub mesh_id: String,
    pub h: f64,
    pub n_u: usize,
    pub n_phi: usize,
    pub n_p: usize,
    pub err_h: f64,
    pub rate_h: Option<f64>,
    pub div_l2: Option<f64>,
    pub rate_div_l2: Option<f64>,
    pub div_h1: Option<f64>,
    pub rate_div_h1: Option<f64>,
    pub u_norm: f64,
    pub phi_norm: f64,
    pub p_norm: f64,
    pub solve_residual: f64,
    pub wall_time: Option<f64>,
    /// `None` on success, otherwise the failure message.
    pub failure: Option<String>,
}

impl ConvergenceRow {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    fn csv_line(&self) -> String {
        let num = |v: f64| format!("{v:.11e}");
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        let status = match &self.failure {
            None => "ok".to_string(),
            Some(m) => format!("\"failed: {}\"", m.replace('"', "'")),
        };
        if self.failed() {
            return format!("{},,,,,,,,,,,,,,,{status}", self.mesh_id);
        }
        [
            self.mesh_id.clone(),
            num(self.h),
            self.n_u.to_string(),
            self.n_phi.to_string(),
            self.n_p.to_string(),
            num(self.err_h),
            opt(self.rate_h),
            opt(self.div_l2),
            opt(self.rate_div_l2),
            opt(self.div_h1),
            opt(self.rate_div_h1),
            num(self.phi_norm),
            num(self.p_norm),
            num(self.solve_residual),
            opt(self.wall_time),
            status,
        ]
        .join(",")
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub complex_reports: Vec<(String, ComplexReport)>,
}

impl ConvergenceStudy {
    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(ConvergenceRow::failed)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv_line());
            s.push('\n');
        }
        s
    }

    /// Two columns `h err_h` for successful rows.
    pub fn to_gnuplot(&self) -> String {
        let mut s = String::from("# h err_h\n");
        for r in self.rows.iter().filter(|r| !r.failed()) {
            let _ = writeln!(s, "{:.11e} {:.11e}", r.h, r.err_h);
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let fmt_rate = |r: Option<f64>| r.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(s, "{:<12} {:>10} {:>12} {:>7} {:>10} {:>7} {:>10} {:>7}", "mesh", "h", "err_h", "rate", "div_l2", "rate", "div_h1", "rate");
        for r in &self.rows {
            if let Some(m) = &r.failure {
                let _ = writeln!(s, "{:<12} failed: {m}", r.mesh_id);
                continue;
            }
            let opt = |v: Option<f64>| v.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "{:<12} {:>10.4e} {:>12.4e} {:>7} {:>10} {:>7} {:>10} {:>7}",
                r.mesh_id,
                r.h,
                r.err_h,
                fmt_rate(r.rate_h),
                opt(r.div_l2),
                fmt_rate(r.rate_div_l2),
                opt(r.div_h1),
                fmt_rate(r.rate_div_h1)
            );
        }
        for (id, report) in &self.complex_reports {
            let _ = writeln!(s, "\n[complex {id}]");
            s.push_str(&report.to_key_values());
        }
        s
    }
}

pub fn load_source(source: &MeshSource) -> Result<PolyMesh> {
    match source {
        MeshSource::Cube(n) => generate_cube_mesh(*n, Aabb::unit()),
        MeshSource::File(p) => load_mesh(p),
    }
}

fn rate(prev: f64, cur: f64, h_prev: f64, h_cur: f64) -> Option<f64> {
    (prev > 0.0 && cur > 0.0 && h_prev != h_cur).then(|| (prev / cur).ln() / (h_prev / h_cur).ln())
}

/// Assembles, solves and measures one mesh against the benchmark. With
/// `dump` the assembled system is also written in coordinate form.
pub fn solve_mesh(mesh: &PolyMesh, config: &RunConfig, bench: &Benchmark, dump: Option<&Path>) -> Result<ConvergenceRow> {
    let start = Instant::now();
    let geo = compute_geometry(mesh)?;
    let disc = Discretization::new(mesh, &geo, config.quadrature)?;
    let system = assemble_system(&disc, &bench.j)?;
    if let Some(path) = dump {
        system.write_coordinate(BufWriter::new(File::create(path)?))?;
    }
    let solution = solve_system(&system, config.tol)?;
    let degree = config.quadrature.analytic.min(bench.u.degree());
    let iu = interpolate_v(mesh, &geo, |x| bench.u.eval(x), |x| bench.div_u.eval(x), degree)?;
    let err_h = error_norm_h(&disc, &iu, &solution.u);
    let (div_l2, div_h1) = if config.diagnostics {
        let (l2, h1) = error_div_diagnostics(&disc, &bench.div_u, &bench.grad_div_u, &solution.u)?;
        (Some(l2), Some(h1))
    } else {
        (None, None)
    };
    Ok(ConvergenceRow {
        mesh_id: String::new(),
        h: geo.mesh_size(),
        n_u: system.numbering.n_u,
        n_phi: system.numbering.n_phi,
        n_p: system.numbering.n_p,
        err_h,
        div_l2,
        div_h1,
        u_norm: norm_b(&disc, &solution.u),
        phi_norm: norm_c(&disc, &solution.phi),
        p_norm: norm_p(&disc, &solution.p),
        solve_residual: solution.residual,
        wall_time: config.timings.then(|| start.elapsed().as_secs_f64()),
        ..Default::default()
    })
}

/// Runs the benchmark on every configured mesh, in order.
pub fn run_convergence(config: &RunConfig) -> Result<ConvergenceStudy> {
    config.validate()?;
    let bench = build_benchmark();
    let mut study = ConvergenceStudy::default();
    for (index, source) in config.meshes.iter().enumerate() {
        let id = source.id();
        let dump = config.dump_system.as_ref().map(|prefix| {
            let mut name = prefix.as_os_str().to_owned();
            name.push(format!(".{index}.coo"));
            PathBuf::from(name)
        });
        let mesh = load_source(source);
        let mut row = match mesh.as_ref().map_err(|e| e.to_string()).and_then(|m| {
            solve_mesh(m, config, &bench, dump.as_deref()).map_err(|e| e.to_string())
        }) {
            Ok(row) => row,
            Err(message) => ConvergenceRow {
                failure: Some(message),
                ..Default::default()
            },
        };
        row.mesh_id = id.clone();
        if let Some(prev) = study.rows.last().filter(|p| !p.failed() && !row.failed()) {
            row.rate_h = rate(prev.err_h, row.err_h, prev.h, row.h);
            if let (Some(a), Some(b)) = (prev.div_l2, row.div_l2) {
                row.rate_div_l2 = rate(a, b, prev.h, row.h);
            }
            if let (Some(a), Some(b)) = (prev.div_h1, row.div_h1) {
                row.rate_div_h1 = rate(a, b, prev.h, row.h);
            }
        }
        if config.verify_complex {
            if let Ok(mesh) = &mesh {
                let geo = compute_geometry(mesh)?;
                let mut samples = SampleField::standard();
                samples.push(SampleField::new("manufactured u", bench.u.clone()));
                let report = verify_complex(mesh, &geo, &samples, config.quadrature.analytic)?;
                study.complex_reports.push((id, report));
            }
        }
        study.rows.push(row);
    }
    Ok(study)
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the report is always printed in full. The exit
//! status is non-zero on a failed criterion only when `ACCEPTANCE_STRICT=1`;
//! failing criteria are reported, never skipped or relaxed.

use std::path::PathBuf;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, Vector3};
use quaddiv::assembly::{assemble_system, solve_system, Discretization, QuadratureOptions};
use quaddiv::calculus::{integrate, integrate_vector, Entity, PolyVector, Polynomial};
use quaddiv::complex::{build_complex_maps, commutativity_residual, verify_complex, BoundaryMode, SampleField};
use quaddiv::edge::{edge_dofs, EdgeLocal};
use quaddiv::element::Element;
use quaddiv::graddiv::{graddiv_dofs, GradDivLocal};
use quaddiv::manufactured::build_benchmark;
use quaddiv::mesh::{compute_geometry, generate_cube_mesh, load_mesh, Aabb, PolyMesh};
use quaddiv::scalar::{cell_pi0, cell_pi_nabla, eval_cell_p1, eval_face_p1, face_pi_nabla, scalar_dofs, ScalarLocal};
use quaddiv_cli::{run_convergence, MeshSource, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/merged_projective.json")
}

fn fmt_rates(rates: &[Option<f64>]) -> String {
    rates
        .iter()
        .map(|r| r.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Criteria 1 to 3 share one convergence study on cube n = 2, 4, 8, 16.
fn convergence_criteria() -> [Outcome; 3] {
    let config = RunConfig {
        meshes: [2, 4, 8, 16].into_iter().map(MeshSource::Cube).collect(),
        diagnostics: true,
        ..RunConfig::default()
    };
    let study = run_convergence(&config).expect("convergence study runs");
    if study.any_failed() {
        let msg = study
            .rows
            .iter()
            .filter_map(|r| r.failure.as_ref().map(|m| format!("{}: {m}", r.mesh_id)))
            .collect::<Vec<_>>()
            .join("; ");
        let fail = || Outcome {
            pass: false,
            detail: format!("solve failed: {msg}"),
        };
        return [fail(), fail(), fail()];
    }
    let rows = &study.rows;

    let rates: Vec<Option<f64>> = rows[1..].iter().map(|r| r.rate_h).collect();
    let in_window = rates.iter().all(|r| r.is_some_and(|r| (0.8..=1.3).contains(&r)));
    let final_ok = rates.last().copied().flatten().is_some_and(|r| r >= 0.9);
    let c1 = Outcome {
        pass: in_window && final_ok,
        detail: format!(
            "err_h = [{}], rates = [{}] (need each in [0.8, 1.3], last >= 0.9)",
            rows.iter().map(|r| format!("{:.3e}", r.err_h)).collect::<Vec<_>>().join(", "),
            fmt_rates(&rates)
        ),
    };

    let worst = rows
        .iter()
        .map(|r| r.phi_norm.max(r.p_norm) / r.u_norm.max(1.0))
        .fold(0.0, f64::max);
    let c2 = Outcome {
        pass: worst <= 1e-8,
        detail: format!("max(|phi_h|, |p_h|) / max(1, |u_h|) = {worst:.3e} (need <= 1e-8)"),
    };

    let last = rows.last().unwrap();
    let (h1, l2) = (last.rate_div_h1, last.rate_div_l2);
    let c3 = Outcome {
        pass: h1.is_some_and(|r| r >= 0.8) && l2.is_some_and(|r| r >= 1.5),
        detail: format!(
            "final pair: H1 rate {} (need >= 0.8), L2 rate {} (need >= 1.5); L2 rates [{}]",
            fmt_rates(&[h1]),
            fmt_rates(&[l2]),
            fmt_rates(&rows[1..].iter().map(|r| r.rate_div_l2).collect::<Vec<_>>())
        ),
    };
    [c1, c2, c3]
}

fn criterion_complex() -> Outcome {
    let mut meshes: Vec<(String, PolyMesh)> = (1..=3)
        .map(|n| (format!("cube:{n}"), generate_cube_mesh(n, Aabb::unit()).unwrap()))
        .collect();
    meshes.push(("merged_projective.json".into(), load_mesh(fixture()).expect("fixture loads")));

    let mut worst: f64 = 0.0;
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, mesh) in &meshes {
        let geo = compute_geometry(mesh).unwrap();
        let report = verify_complex(mesh, &geo, &[], 4).unwrap();
        let m = report
            .curl_grad
            .max(report.div_curl)
            .max(report.curl_grad_free)
            .max(report.div_curl_free);
        worst = worst.max(m);
        pass &= m <= 1e-13;
        if name == "cube:2" {
            let r = report.ranks.as_ref().expect("small mesh has ranks");
            let ranks = (r.grad, r.curl, r.div);
            pass &= ranks == (1, 5, 8) && r.mean_zero_residual <= 1e-11;
            notes.push(format!(
                "cube:2 ranks {ranks:?} (need (1, 5, 8)), mean-zero residual {:.1e}",
                r.mean_zero_residual
            ));
        }
    }
    Outcome {
        pass,
        detail: format!("max |CG|, |DC| = {worst:.1e} (need <= 1e-13); {}", notes.join("; ")),
    }
}

fn criterion_commutativity() -> Outcome {
    let bench = build_benchmark();
    let mut samples = SampleField::standard();
    samples.push(SampleField::new("manufactured u", bench.u.clone()));
    let mut worst: f64 = 0.0;
    for n in [2, 4] {
        let mesh = generate_cube_mesh(n, Aabb::unit()).unwrap();
        let geo = compute_geometry(&mesh).unwrap();
        let free = build_complex_maps(&mesh, &geo, BoundaryMode::Free);
        for s in &samples {
            worst = worst.max(commutativity_residual(&mesh, &geo, &free, &s.u, s.u.degree()).unwrap());
        }
    }
    Outcome {
        pass: worst <= 1e-11,
        detail: format!("max |D I_h v - J_h div v| = {worst:.1e} over 3 fields, n = 2, 4 (need <= 1e-11)"),
    }
}

/// Projective maps keep faces planar; small coefficients keep the hex convex.
fn random_cell(kind: usize, rng: &mut ChaCha8Rng) -> PolyMesh {
    let unit = generate_cube_mesh(1, Aabb::unit()).unwrap();
    let shift = Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    match kind {
        0 => unit.map_vertices(|p| p + shift),
        1 => {
            let s = 10f64.powf(rng.gen_range(-1.5..1.5));
            unit.map_vertices(|p| p * s + shift)
        }
        _ => {
            let a = nalgebra::Matrix3::identity() + nalgebra::Matrix3::from_fn(|_, _| rng.gen_range(-0.25..0.25));
            let c = Vector3::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
            let s = 10f64.powf(rng.gen_range(-1.0..1.0));
            unit.map_vertices(|p| (a * p) / (1.0 + c.dot(p)) * s + shift)
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize, origin: &Vector3<f64>, scale: f64) -> Polynomial {
    // built in coordinates centred on the cell so values stay O(1)
    let local: Vec<Polynomial> = (0..3)
        .map(|k| (&Polynomial::coordinate(k) - &Polynomial::constant(origin[k])).scale(1.0 / scale))
        .collect();
    let mut p = Polynomial::constant(rng.gen_range(-1.0..1.0));
    for a in 0..=degree {
        for b in 0..=degree - a {
            for c in 0..=degree - a - b {
                if a + b + c == 0 {
                    continue;
                }
                let term = &(&local[0].pow(a as u32) * &local[1].pow(b as u32)) * &local[2].pow(c as u32);
                p = &p + &term.scale(rng.gen_range(-1.0..1.0));
            }
        }
    }
    p
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

fn max_rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax()
}

struct CellCheck {
    reproduction: f64,
    b_min_eig: f64,
    a_psd: f64,
    a_kernel_ok: bool,
    consistency: f64,
    scaling: f64,
}

fn check_cell(mesh: &PolyMesh, rng: &mut ChaCha8Rng) -> CellCheck {
    let geo = compute_geometry(mesh).unwrap();
    let e = Element::new(mesh, &geo, 0, 6).unwrap();
    let (b, h, vol) = (e.centroid, e.diameter, e.volume);
    let nv = e.num_vertices();
    let nf = e.num_faces();
    let scalar = ScalarLocal::new(&e);
    let edge = EdgeLocal::new(&e);
    let gd = GradDivLocal::new(&e, &scalar);
    let mut reproduction: f64 = 0.0;

    // scalar projections reproduce linears, on faces and on the cell
    let g = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / h;
    let c0 = rng.gen_range(-1.0..1.0);
    let lin = |x: &Vector3<f64>| c0 + g.dot(&(x - b));
    let dofs = scalar_dofs(&e, lin, c0);
    for coeffs in [cell_pi_nabla(&e, &dofs), cell_pi0(&e, &dofs)] {
        for x in &e.positions {
            reproduction = reproduction.max((eval_cell_p1(&e, &coeffs, x) - lin(x)).abs());
        }
    }
    for f in &e.faces {
        let fd: Vec<f64> = f.loop_vertices.iter().map(|&v| lin(&e.positions[v])).collect();
        let c = face_pi_nabla(f, &e.positions, &fd);
        for &v in &f.loop_vertices {
            reproduction = reproduction.max((eval_face_p1(f, &c, &e.positions[v]) - lin(&e.positions[v])).abs());
        }
    }

    // edge projection: first-kind lowest-order fields a + w x (x - b) have mean a
    let a = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let w = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / h;
    let ned = |x: &Vector3<f64>| a + w.cross(&(x - b));
    let ed = DVector::from_vec(edge_dofs(&e, ned, 2));
    let pe = &edge.pi0 * &ed;
    reproduction = reproduction.max((Vector3::new(pe[0], pe[1], pe[2]) - a).amax());

    // grad-div projection: a + beta (x - b) has mean a
    let beta = rng.gen_range(-1.0..1.0) / h;
    let rt = |x: &Vector3<f64>| a + (x - b) * beta;
    let vd = DVector::from_vec(graddiv_dofs(&e, rt, |_| 3.0 * beta, 2));
    let pv = &gd.pi0 * &vd;
    reproduction = reproduction.max((Vector3::new(pv[0], pv[1], pv[2]) - a).amax());

    // local_b SPD, local_a PSD with kernel {div = const}
    let eb = gd.mass.clone().symmetric_eigen();
    let b_min_eig = eb.eigenvalues.min() / eb.eigenvalues.max();
    let ea = gd.stiffness.clone().symmetric_eigen();
    let amax = ea.eigenvalues.amax();
    let a_psd = ea.eigenvalues.min() / amax;
    let kernel: Vec<usize> = (0..nv + nf).filter(|&i| ea.eigenvalues[i].abs() <= 1e-10 * amax).collect();
    let mut a_kernel_ok = kernel.len() == nf;
    // unit eigenvectors: the natural scale of T v is |T|
    let t_scale = gd.div_transfer.amax();
    for &i in &kernel {
        let wdofs = &gd.div_transfer * ea.eigenvectors.column(i);
        let mean = wdofs[nv];
        a_kernel_ok &= wdofs.iter().all(|v| (v - mean).abs() <= 1e-9 * t_scale);
    }

    // consistency against cell quadrature
    let mut consistency: f64 = 0.0;
    let random_p2 = |rng: &mut ChaCha8Rng| {
        PolyVector([random_poly(rng, 2, &b, h), random_poly(rng, 2, &b, h), random_poly(rng, 2, &b, h)])
    };
    let (v, wv) = (random_p2(rng), random_p2(rng));
    let dv = DVector::from_vec(graddiv_dofs(&e, |x| v.eval(x), |x| v.divergence().eval(x), 4));
    let dw = DVector::from_vec(graddiv_dofs(&e, |x| wv.eval(x), |x| wv.divergence().eval(x), 4));
    let (gv, gw) = (v.divergence().gradient(), wv.divergence().gradient());
    let exact_a = integrate(mesh, &geo, Entity::Cell(0), |x| gv.eval(x).dot(&gw.eval(x)), 2).unwrap();
    let ah = dv.dot(&(&gd.stiffness * &dw));
    consistency = consistency.max(rel(ah, exact_a, gv.eval(&b).norm() * gw.eval(&b).norm() * vol));

    let q0 = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let dq = DVector::from_vec(graddiv_dofs(&e, |_| q0, |_| 0.0, 0));
    let exact_b = integrate(mesh, &geo, Entity::Cell(0), |x| rt(x).dot(&q0), 2).unwrap();
    consistency = consistency.max(rel(vd.dot(&(&gd.mass * &dq)), exact_b, a.norm() * q0.norm() * vol));

    let eq = DVector::from_vec(edge_dofs(&e, |_| q0, 0));
    let exact_c = integrate_vector(mesh, &geo, Entity::Cell(0), ned, 2).unwrap().dot(&q0);
    consistency = consistency.max(rel(ed.dot(&(&edge.product * &eq)), exact_c, a.norm() * q0.norm() * vol));

    // dilation about the origin
    let mut scaling: f64 = 0.0;
    for s in [0.5, 2.0] {
        let m2 = mesh.map_vertices(|p| p * s);
        let g2 = compute_geometry(&m2).unwrap();
        let e2 = Element::new(&m2, &g2, 0, 6).unwrap();
        let sc2 = ScalarLocal::new(&e2);
        scaling = scaling.max(max_rel_diff(&sc2.product, &(&scalar.product * s)));
        scaling = scaling.max(max_rel_diff(&EdgeLocal::new(&e2).product, &(&edge.product * s.powi(3))));
        let lam = DMatrix::from_diagonal(&DVector::from_fn(nv + nf, |i, _| if i < nv { s } else { 1.0 }));
        let expected = &lam * &gd.mass * &lam * s.powi(3);
        scaling = scaling.max(max_rel_diff(&GradDivLocal::new(&e2, &sc2).mass, &expected));
    }

    CellCheck {
        reproduction,
        b_min_eig,
        a_psd,
        a_kernel_ok,
        consistency,
        scaling,
    }
}

fn criterion_local_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut repro: f64 = 0.0;
    let mut b_min = f64::INFINITY;
    let mut a_min = f64::INFINITY;
    let mut kernel_failures = 0;
    let mut cons: f64 = 0.0;
    let mut scal: f64 = 0.0;
    let cells = 200;
    for i in 0..cells {
        let mesh = random_cell(i % 3, &mut rng);
        let c = check_cell(&mesh, &mut rng);
        repro = repro.max(c.reproduction);
        b_min = b_min.min(c.b_min_eig);
        a_min = a_min.min(c.a_psd);
        kernel_failures += usize::from(!c.a_kernel_ok);
        cons = cons.max(c.consistency);
        scal = scal.max(c.scaling);
    }
    let pass = repro <= 1e-12 && b_min > 0.0 && a_min >= -1e-12 && kernel_failures == 0 && cons <= 1e-12 && scal <= 1e-10;
    Outcome {
        pass,
        detail: format!(
            "{cells} cells: reproduction {repro:.1e} (<= 1e-12), min eig(b)/max {b_min:.1e} (> 0), \
             min eig(a)/max {a_min:.1e} (>= -1e-12), kernel mismatches {kernel_failures}, \
             consistency {cons:.1e} (<= 1e-12), scaling {scal:.1e} (<= 1e-10)"
        ),
    }
}

fn criterion_zero_data() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        let mesh = generate_cube_mesh(n, Aabb::unit()).unwrap();
        let geo = compute_geometry(&mesh).unwrap();
        let disc = Discretization::new(&mesh, &geo, QuadratureOptions::default()).unwrap();
        let sys = assemble_system(&disc, &Polynomial::zero()).unwrap();
        let sol = solve_system(&sys, 1e-10).unwrap();
        for x in sol.u.iter().chain(&sol.phi).chain(&sol.p) {
            worst = worst.max(x.abs());
        }
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("max |x| = {worst:.1e} on cube n = 2, 3, 4 (need <= 1e-12)"),
    }
}

fn main() {
    let start = Instant::now();
    let [c1, c2, c3] = convergence_criteria();
    let outcomes = [
        ("1 convergence of err_h", c1),
        ("2 multipliers vanish", c2),
        ("3 div diagnostics", c3),
        ("4 complex exactness", criterion_complex()),
        ("5 commutativity", criterion_commutativity()),
        ("6 local-form properties", criterion_local_forms()),
        ("7 zero-data solve", criterion_zero_data()),
    ];
    let mut passed = 0;
    for (name, o) in &outcomes {
        println!("acceptance {name}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        passed += usize::from(o.pass);
    }
    println!(
        "acceptance summary: {passed}/{} criteria pass ({:.1} s)",
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed != outcomes.len() {
        std::process::exit(1);
    }
}

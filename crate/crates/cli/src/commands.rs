//! The CLI subcommands: `verify`, `run`, `sweep`, `spectrum`, `mesh`.
//!
//! Exit codes: 0 on success, 1 when a verification check or simulation
//! fails, 2 on usage or configuration errors.

use crate::config::{ConfigError, FormatKind, ModelKind, RunConfig};
use crate::svg;
use phdec::cochain::{Carrier, Cochain, Space};
use phdec::complex::{is_well_centered, mesh_to_json, DualGeometry, SimplicialComplex};
use phdec::dirac::{assemble_dirac, verify_dirac, DiracVariant};
use phdec::integrate::simulate;
use phdec::models::{analytic_spectrum_telegraph, discrete_spectrum, LineBoundary};
use phdec::operators::{
    boundary_matrix, coboundary, dual_boundary_derivative, dual_derivative, hodge, hodge_inv,
    summation_by_parts_residual, trace_matrix,
};
use phdec::phs::conservation_laws;
use phdec::rng::Rng;
use std::path::{Path, PathBuf};

pub struct CommandOptions {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub format: FormatKind,
}

impl Default for CommandOptions {
    fn default() -> Self {
        CommandOptions {
            out_dir: PathBuf::from("."),
            seed: 0,
            format: FormatKind::Csv,
        }
    }
}

pub fn config_exit_code(err: &ConfigError) -> i32 {
    let _ = err;
    2
}

struct Report {
    failures: usize,
    checks: usize,
}

impl Report {
    fn new() -> Self {
        Report {
            failures: 0,
            checks: 0,
        }
    }

    fn check(&mut self, name: &str, residual: f64, tol: f64) {
        self.checks += 1;
        let ok = residual.abs() <= tol;
        if !ok {
            self.failures += 1;
        }
        println!(
            "{:<44} residual {:>12.3e}  {}",
            name,
            residual,
            if ok { "PASS" } else { "FAIL" }
        );
    }

    fn check_eq(&mut self, name: &str, got: usize, want: usize) {
        self.checks += 1;
        let ok = got == want;
        if !ok {
            self.failures += 1;
        }
        println!(
            "{:<44} {:>6} (expected {})  {}",
            name,
            got,
            want,
            if ok { "PASS" } else { "FAIL" }
        );
    }
}

/// Run every exact-identity and residual check on the configured mesh and
/// model. Exit 0 iff all pass.
pub fn cmd_verify(cfg: &RunConfig, opts: &CommandOptions) -> i32 {
    let (complex, geometry) = match cfg.build_mesh() {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut report = Report::new();
    let n = complex.dim();
    println!(
        "mesh: dimension {n}, counts {:?}, boundary {:?}",
        (0..=n).map(|k| complex.count(k)).collect::<Vec<_>>(),
        (0..n)
            .map(|k| complex.boundary_count(k))
            .collect::<Vec<_>>()
    );

    // Exact integer identities.
    let mut dd_max = 0i64;
    for k in 1..n {
        let a = boundary_matrix(&complex, k).unwrap();
        let b = boundary_matrix(&complex, k + 1).unwrap();
        let prod = a
            .matrix
            .as_int()
            .unwrap()
            .matmul(b.matrix.as_int().unwrap())
            .unwrap();
        dd_max = dd_max.max(prod.max_abs() as i64);
    }
    report.check("boundary_of_boundary", dd_max as f64, 0.0);

    let mut cc_max = 0i64;
    for k in 0..n.saturating_sub(1) {
        let d1 = coboundary(&complex, k).unwrap();
        let d2 = coboundary(&complex, k + 1).unwrap();
        let prod = d2
            .matrix
            .as_int()
            .unwrap()
            .matmul(d1.matrix.as_int().unwrap())
            .unwrap();
        cc_max = cc_max.max(prod.max_abs() as i64);
    }
    report.check("coboundary_squared", cc_max as f64, 0.0);

    let mut transpose_max = 0i64;
    for m in 0..n {
        let deg = n - m;
        let di = dual_derivative(&complex, m).unwrap();
        let d = coboundary(&complex, deg - 1).unwrap();
        let mut expect = d.matrix.as_int().unwrap().transpose();
        if deg % 2 == 1 {
            expect = expect.neg();
        }
        let diff = di.matrix.as_int().unwrap().add(&expect.neg()).unwrap();
        transpose_max = transpose_max.max(diff.max_abs() as i64);

        let db = dual_boundary_derivative(&complex, m).unwrap();
        let tr = trace_matrix(&complex, deg - 1).unwrap();
        let mut expect = tr.matrix.as_int().unwrap().transpose();
        if deg % 2 == 0 {
            expect = expect.neg();
        }
        let diff = db.matrix.as_int().unwrap().add(&expect.neg()).unwrap();
        transpose_max = transpose_max.max(diff.max_abs() as i64);
    }
    report.check("dual_operator_signed_transposes", transpose_max as f64, 0.0);

    // Kernel of d0 on a connected complex: the constants.
    let d0 = coboundary(&complex, 0).unwrap();
    let ns = d0.matrix.to_real().to_dense().null_space(1e-10);
    report.check_eq("kernel_of_d0_dimension", ns.len(), 1);
    if let Some(v) = ns.first() {
        let spread = v.iter().map(|x| (x - v[0]).abs()).fold(0.0f64, f64::max);
        report.check("kernel_of_d0_is_constant", spread, 1e-10);
    }

    // Summation by parts on seeded random triples.
    let mut rng = Rng::new(opts.seed ^ 0x5b9);
    let mut sbp_max: f64 = 0.0;
    for k in 1..=n {
        let na = complex.count(k - 1);
        let ni = Space::new(Carrier::DualInterior, n - k).dim(&complex);
        let nb = Space::new(Carrier::BoundaryDual, n - k).dim(&complex);
        for _ in 0..200 {
            let a = Cochain::new(Carrier::Primal, k - 1, rng.vec_signed(na));
            let bi = Cochain::new(Carrier::DualInterior, n - k, rng.vec_signed(ni));
            let bb = Cochain::new(Carrier::BoundaryDual, n - k, rng.vec_signed(nb));
            let res = summation_by_parts_residual(&complex, &a, &bi, &bb).unwrap();
            sbp_max = sbp_max.max(res.abs());
        }
    }
    report.check("summation_by_parts", sbp_max, 1e-12);

    // Geometry-dependent checks need well-centeredness.
    let wc = is_well_centered(&complex, &geometry);
    report.check(
        "well_centered",
        if wc.ok {
            0.0
        } else {
            wc.offenders.len() as f64
        },
        0.0,
    );
    if !wc.ok {
        println!(
            "offending simplices (dim, id): {:?}",
            wc.offenders.iter().take(8).collect::<Vec<_>>()
        );
        println!(
            "verify: {} of {} checks failed",
            report.failures, report.checks
        );
        return 1;
    }

    // Hodge stars: diagonal, exact reciprocal pairs.
    let mut off_diag = 0usize;
    let mut inv_residual: f64 = 0.0;
    for k in 0..=n {
        let h = hodge(&complex, &geometry, k).unwrap();
        let hi = hodge_inv(&complex, &geometry, k).unwrap();
        off_diag += h.matrix.to_real().off_diagonal_nnz();
        let prod = hi.compose(&h).unwrap().matrix.to_real().to_dense();
        for i in 0..prod.nrows {
            for j in 0..prod.ncols {
                let want = if i == j { 1.0 } else { 0.0 };
                inv_residual = inv_residual.max((prod[(i, j)] - want).abs());
            }
        }
    }
    report.check_eq("hodge_off_diagonal_entries", off_diag, 0);
    report.check("hodge_times_inverse_is_identity", inv_residual, 0.0);

    // Dirac structures for every degree pair valid on this mesh.
    let degree_pairs: Vec<(usize, usize)> = (1..=n).map(|p| (p, n + 1 - p)).collect();
    for (p, q) in degree_pairs {
        for variant in [DiracVariant::PrimalStored, DiracVariant::DualStored] {
            let mut dirac = match assemble_dirac(&complex, &geometry, p, q, variant) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("error assembling dirac structure: {e}");
                    return 1;
                }
            };
            if cfg
                .fault_injection
                .as_ref()
                .map_or(false, |f| f.dirac_sign_flip)
            {
                dirac.corrupt_boundary_sign();
            }
            let rep = verify_dirac(&dirac, 100, opts.seed ^ 0xd17ac);
            println!(
                "dirac {variant} (p={p}, q={q}, n={n}): graph dim {} of {}",
                rep.graph_dim, rep.expected_graph_dim
            );
            report.check(
                &format!("dirac_{variant}_p{p}q{q}_skew"),
                rep.skew_residual as f64,
                0.0,
            );
            report.check(
                &format!("dirac_{variant}_p{p}q{q}_isotropy"),
                rep.isotropy_max_rel,
                1e-12,
            );
            report.check_eq(
                &format!("dirac_{variant}_p{p}q{q}_graph_dim"),
                rep.graph_dim,
                rep.expected_graph_dim,
            );
        }
    }

    // The configured model: skewness, collocation, conservation laws.
    match cfg.build_system(&complex, &geometry) {
        Ok(sys) => {
            report.check("phs_skew_residual", sys.skew_residual(), 0.0);
            let mut power_max: f64 = 0.0;
            for _ in 0..200 {
                let x = rng.vec_signed(sys.state_dim());
                let u = rng.vec_signed(sys.port_count());
                power_max = power_max.max(sys.power_residual(&x, &u));
            }
            report.check("phs_collocation_power", power_max, 1e-12);
            if sys.controller_dim == 0 {
                let laws = conservation_laws(&sys).unwrap();
                let mut law_res: f64 = 0.0;
                for law in &laws {
                    let jc = sys.j.matvec_transpose(&law.coefficients);
                    law_res = law_res.max(jc.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                }
                println!("conservation laws found: {}", laws.len());
                report.check("conservation_law_kernel", law_res, 1e-12);
            } else {
                let casimirs = phdec::phs::closed_loop_casimirs(&sys).unwrap();
                let mut cas_res: f64 = 0.0;
                for cas in &casimirs {
                    let jc = sys.j.matvec_transpose(&cas.coefficients);
                    cas_res = cas_res.max(jc.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                }
                println!("closed-loop casimirs found: {}", casimirs.len());
                report.check("casimir_kernel", cas_res, 1e-10);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    }

    if cfg.dump_matrices == Some(true) {
        if let Err(e) = dump_matrices(&complex, &geometry, &opts.out_dir) {
            eprintln!("error writing matrix dump: {e}");
            return 2;
        }
    }

    println!(
        "verify: {} of {} checks failed",
        report.failures, report.checks
    );
    if report.failures == 0 {
        0
    } else {
        1
    }
}

fn dump_matrices(
    complex: &SimplicialComplex,
    geometry: &DualGeometry,
    out_dir: &Path,
) -> std::io::Result<()> {
    let dir = out_dir.join("matrices");
    std::fs::create_dir_all(&dir)?;
    let n = complex.dim();
    for k in 1..=n {
        let m = boundary_matrix(complex, k).unwrap();
        std::fs::write(
            dir.join(format!("boundary_{k}.mtx")),
            m.matrix.to_matrix_market(),
        )?;
    }
    for k in 0..n {
        let d = coboundary(complex, k).unwrap();
        std::fs::write(
            dir.join(format!("coboundary_{k}.mtx")),
            d.matrix.to_matrix_market(),
        )?;
        let tr = trace_matrix(complex, k).unwrap();
        std::fs::write(
            dir.join(format!("trace_{k}.mtx")),
            tr.matrix.to_matrix_market(),
        )?;
        let di = dual_derivative(complex, k).unwrap();
        std::fs::write(
            dir.join(format!("dual_derivative_{k}.mtx")),
            di.matrix.to_matrix_market(),
        )?;
        let db = dual_boundary_derivative(complex, k).unwrap();
        std::fs::write(
            dir.join(format!("dual_boundary_derivative_{k}.mtx")),
            db.matrix.to_matrix_market(),
        )?;
    }
    for k in 0..=n {
        let h = hodge(complex, geometry, k).unwrap();
        std::fs::write(
            dir.join(format!("hodge_{k}.mtx")),
            h.matrix.to_matrix_market(),
        )?;
    }
    Ok(())
}

/// Simulate per the config and emit the trajectory CSV (and SVG).
pub fn cmd_run(cfg: &RunConfig, opts: &CommandOptions) -> i32 {
    let built = (|| -> Result<_, ConfigError> {
        let (complex, geometry) = cfg.build_mesh()?;
        let sys = cfg.build_system(&complex, &geometry)?;
        let signal = cfg.build_signal(sys.port_count())?;
        // opts.seed already folds the --seed flag over the config value.
        let x0 = cfg.build_initial_state(sys.state_dim(), opts.seed)?;
        let feedback = if cfg.passivation == Some(true) {
            let degree = sys.n - sys.p;
            let star_b = phdec::operators::boundary_hodge(&complex, &geometry, degree)?;
            Some(phdec::phs::passivation_feedback(&sys, &star_b)?)
        } else {
            None
        };
        Ok((sys, signal, x0, feedback))
    })();
    let (sys, signal, x0, feedback) = match built {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };

    let traj = match simulate(
        &sys,
        &x0,
        &signal,
        cfg.integrator.t_final,
        cfg.integrator.dt,
        cfg.method(),
        feedback.as_ref(),
    ) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("simulation error: {e}");
            return 1;
        }
    };
    for w in &traj.warnings {
        eprintln!("warning: {w}");
    }

    if let Err(e) = std::fs::create_dir_all(&opts.out_dir) {
        eprintln!("error: {e}");
        return 2;
    }
    if matches!(opts.format, FormatKind::Csv | FormatKind::Both) {
        let path = opts.out_dir.join("trajectory.csv");
        if let Err(e) = std::fs::write(&path, traj.to_csv()) {
            eprintln!("error: {e}");
            return 2;
        }
        println!("wrote {}", path.display());
    }
    if matches!(opts.format, FormatKind::Svg | FormatKind::Both) {
        let mut series = vec![("H".to_string(), traj.energy.clone())];
        for (i, name) in traj.invariant_names.iter().enumerate() {
            series.push((
                name.clone(),
                traj.invariants.iter().map(|row| row[i]).collect(),
            ));
        }
        let ny = traj.outputs.first().map_or(0, |y| y.len()).min(4);
        for i in 0..ny {
            series.push((
                format!("y[{i}]"),
                traj.outputs.iter().map(|row| row[i]).collect(),
            ));
        }
        let plot = svg::line_plot("energy, invariants, outputs", &traj.times, &series);
        let path = opts.out_dir.join("trajectory.svg");
        if let Err(e) = std::fs::write(&path, plot) {
            eprintln!("error: {e}");
            return 2;
        }
        println!("wrote {}", path.display());
    }

    let h0 = traj.energy[0];
    let h_end = *traj.energy.last().unwrap();
    let max_balance = traj
        .balance_residuals
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    println!(
        "steps {} | H(0) {} | H(T) {} | max balance residual {:.3e}",
        traj.times.len() - 1,
        h0,
        h_end,
        max_balance
    );
    for (i, name) in traj.invariant_names.iter().enumerate() {
        let series: Vec<f64> = traj.invariants.iter().map(|row| row[i]).collect();
        let drift = series
            .iter()
            .map(|v| (v - series[0]).abs())
            .fold(0.0, f64::max);
        println!("{name}: initial {} drift {:.3e}", series[0], drift);
    }
    0
}

/// Convergence sweep of the lowest telegraph eigenfrequency across mesh
/// resolutions; rows carry the error against the analytic value and the
/// observed order per adjacent pair.
pub fn cmd_sweep(cfg: &RunConfig, opts: &CommandOptions) -> i32 {
    if cfg.model != ModelKind::Telegraph {
        eprintln!("error: sweep requires the telegraph model");
        return 2;
    }
    let resolutions = cfg
        .sweep
        .as_ref()
        .map(|s| s.resolutions.clone())
        .unwrap_or_else(|| vec![8, 16, 32, 64]);
    if resolutions.is_empty() {
        eprintln!("error: sweep needs at least one resolution");
        return 2;
    }
    let length = match &cfg.mesh {
        crate::config::MeshSpec::Interval { length, .. } => *length,
        _ => 1.0,
    };
    let analytic = match lowest_analytic_frequency(cfg, length) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };

    // One thread per resolution; results collected in input order.
    let results: Vec<Result<(usize, f64), String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = resolutions
            .iter()
            .map(|&n| {
                scope.spawn(move || -> Result<(usize, f64), String> {
                    let (complex, geometry) = phdec::complex::generate_interval_mesh(n, length)
                        .map_err(|e| e.to_string())?;
                    let sys = cfg
                        .build_system(&complex, &geometry)
                        .map_err(|e| e.to_string())?;
                    let spectrum = discrete_spectrum(&sys).map_err(|e| e.to_string())?;
                    spectrum
                        .first()
                        .copied()
                        .map(|w| (n, w))
                        .ok_or_else(|| "empty spectrum".to_string())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for r in results {
        match r {
            Ok((n, w)) => rows.push((n, w, (w - analytic).abs())),
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        }
    }

    let mut csv = String::from("n,lowest_frequency,analytic,abs_error,observed_order\n");
    println!(
        "{:>6} {:>18} {:>18} {:>12} {:>8}",
        "n", "lowest_freq", "analytic", "error", "order"
    );
    for (i, (n, w, err)) in rows.iter().enumerate() {
        let order = if i == 0 {
            String::new()
        } else {
            let (n_prev, _, err_prev) = rows[i - 1];
            let rate = (err_prev / err).ln() / ((*n as f64) / (n_prev as f64)).ln();
            format!("{rate:.3}")
        };
        csv.push_str(&format!("{n},{w},{analytic},{err},{order}\n"));
        println!("{n:>6} {w:>18.12} {analytic:>18.12} {err:>12.3e} {order:>8}");
    }
    if let Err(e) = std::fs::create_dir_all(&opts.out_dir) {
        eprintln!("error: {e}");
        return 2;
    }
    let path = opts.out_dir.join("sweep.csv");
    if let Err(e) = std::fs::write(&path, csv) {
        eprintln!("error: {e}");
        return 2;
    }
    println!("wrote {}", path.display());
    0
}

fn lowest_analytic_frequency(cfg: &RunConfig, length: f64) -> Result<f64, ConfigError> {
    use crate::config::ScalarOrVec;
    let (lc, cc) = match (&cfg.materials.l, &cfg.materials.c) {
        (ScalarOrVec::Scalar(l), ScalarOrVec::Scalar(c)) => (*l, *c),
        _ => {
            return Err(ConfigError::Invalid(
                "analytic sweep reference needs uniform scalar materials".into(),
            ))
        }
    };
    Ok(analytic_spectrum_telegraph(1, length, lc, cc, LineBoundary::OpenOpen)[0])
}

/// Discrete spectrum of the configured model, with the analytic reference
/// column for uniform telegraph lines.
pub fn cmd_spectrum(cfg: &RunConfig, opts: &CommandOptions) -> i32 {
    let built = (|| -> Result<_, ConfigError> {
        let (complex, geometry) = cfg.build_mesh()?;
        let sys = cfg.build_system(&complex, &geometry)?;
        Ok(sys)
    })();
    let sys = match built {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let spectrum = match discrete_spectrum(&sys) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("spectrum error: {e}");
            return 1;
        }
    };
    let n_modes = cfg
        .spectrum
        .as_ref()
        .map(|s| s.n_modes)
        .unwrap_or(spectrum.len())
        .min(spectrum.len());

    let length = match &cfg.mesh {
        crate::config::MeshSpec::Interval { length, .. } => *length,
        _ => 1.0,
    };
    let analytic: Option<Vec<f64>> = if cfg.model == ModelKind::Telegraph {
        lowest_analytic_frequency(cfg, length).ok().map(|_| {
            use crate::config::ScalarOrVec;
            let (lc, cc) = match (&cfg.materials.l, &cfg.materials.c) {
                (ScalarOrVec::Scalar(l), ScalarOrVec::Scalar(c)) => (*l, *c),
                _ => unreachable!(),
            };
            analytic_spectrum_telegraph(n_modes, length, lc, cc, LineBoundary::OpenOpen)
        })
    } else {
        None
    };

    let mut csv = if analytic.is_some() {
        String::from("mode,discrete,analytic,abs_error\n")
    } else {
        String::from("mode,discrete\n")
    };
    for k in 0..n_modes {
        match &analytic {
            Some(a) => csv.push_str(&format!(
                "{},{},{},{}\n",
                k + 1,
                spectrum[k],
                a[k],
                (spectrum[k] - a[k]).abs()
            )),
            None => csv.push_str(&format!("{},{}\n", k + 1, spectrum[k])),
        }
    }
    if let Err(e) = std::fs::create_dir_all(&opts.out_dir) {
        eprintln!("error: {e}");
        return 2;
    }
    let path = opts.out_dir.join("spectrum.csv");
    if let Err(e) = std::fs::write(&path, &csv) {
        eprintln!("error: {e}");
        return 2;
    }
    print!("{csv}");
    println!("wrote {}", path.display());
    0
}

/// Generate the configured mesh and write it as mesh JSON.
pub fn cmd_mesh(cfg: &RunConfig, opts: &CommandOptions) -> i32 {
    let (complex, _) = match cfg.build_mesh() {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Err(e) = std::fs::create_dir_all(&opts.out_dir) {
        eprintln!("error: {e}");
        return 2;
    }
    let path = opts.out_dir.join("mesh.json");
    if let Err(e) = std::fs::write(&path, mesh_to_json(&complex)) {
        eprintln!("error: {e}");
        return 2;
    }
    println!("wrote {}", path.display());
    0
}

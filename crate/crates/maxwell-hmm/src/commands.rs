//! The five commands. Each writes its files through an [`OutputSet`] so a
//! failing run leaves nothing behind.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hmm_core::cell::{compute_mu_hom, detect_resonances, MicroCell, SweepRow};
use hmm_core::hmm::{hmm_solve, study_row, zeroth_order_field, ConvergenceReport, ErrorReport};
use hmm_core::scatter::{assemble_effective_system, plane_slice, solve_system};

use crate::cache::{cache_dir, cached_reference};
use crate::config::RunConfig;
use crate::output::{self, fmt_g, OutputSet};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Cell,
    MuSweep,
    Solve,
    Hmm,
    Study,
}

/// Files written and the text meant for standard output.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub report: String,
}

/// Runs `command`; on failure every file it wrote is removed.
pub fn run(command: Command, config: &RunConfig, out: &Path, threads: usize) -> Result<Outcome, CliError> {
    config.validate()?;
    let mut set = OutputSet::new(out)?;
    let threads = threads.max(1);
    let result = match command {
        Command::Cell => cmd_cell(config, &mut set),
        Command::MuSweep => cmd_musweep(config, &mut set, threads),
        Command::Solve => cmd_solve(config, &mut set),
        Command::Hmm => cmd_hmm(config, &mut set),
        Command::Study => cmd_study(config, &mut set, threads),
    };
    match result {
        Ok(report) => Ok(Outcome { files: set.files().to_vec(), report }),
        Err(e) => {
            set.discard();
            Err(e)
        }
    }
}

/// `f` over `items` on up to `threads` scoped threads; results keep the
/// order of `items`.
pub fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let f = &f;
    let mut parts: Vec<Vec<(usize, R)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    items.iter().enumerate().skip(t).step_by(threads).map(|(i, x)| (i, f(x))).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    });
    let mut out: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    for part in parts.iter_mut() {
        for (i, r) in part.drain(..) {
            out[i] = Some(r);
        }
    }
    out.into_iter().map(|r| r.expect("every index is produced once")).collect()
}

fn micro_cell(config: &RunConfig) -> Result<MicroCell, CliError> {
    MicroCell::new(config.micro.n, config.inclusion()?, config.micro_coefficients()?).map_err(CliError::from_cell)
}

fn cmd_cell(config: &RunConfig, set: &mut OutputSet) -> Result<String, CliError> {
    let k = config.wavenumber()?;
    let cell = micro_cell(config)?;
    let sol = cell.solve_all(k).map_err(CliError::from_cell)?;
    let t = sol.effective_tensors();
    set.write("eps_hom.csv", &output::real_matrix_csv("eps_inv_hom", &t.eps_inv_hom))?;
    set.write("mu_hom.csv", &output::complex_matrix_csv("mu_hom", &t.mu_hom))?;
    let mut s = String::new();
    let _ = writeln!(s, "{}", cell.mesh().summary());
    let _ = writeln!(
        s,
        "dofs: cell 1 = {}, cell 2 = {}, cell 3 = {}",
        cell.outer_edge_space().n_dofs(),
        cell.outer_nodal_space().n_dofs(),
        cell.inner_edge_space().n_dofs()
    );
    for (name, reps) in [("cell 1", &sol.cell1.reports), ("cell 2", &sol.cell2.reports)] {
        for (l, r) in reps.iter().enumerate() {
            let _ = writeln!(s, "{name} e{}: {} iterations, residual {}", l + 1, r.iterations, fmt_g(r.residual));
        }
    }
    s.push_str("grad_mean\n");
    s.push_str(&output::real_matrix_csv("P", &sol.cell2.grad_mean));
    s.push_str("cell 3 mean\n");
    s.push_str(&output::complex_matrix_csv("W", &sol.cell3.mean));
    s.push_str(&output::tensors_summary(&t));
    set.write("cell_summary.txt", &s)?;
    Ok(s)
}

fn cmd_musweep(config: &RunConfig, set: &mut OutputSet, threads: usize) -> Result<String, CliError> {
    let grid = config.sweep.grid()?;
    let cell = micro_cell(config)?;
    let cell2 = cell.solve_cell2().map_err(CliError::from_cell)?;
    let rows: Vec<SweepRow> = par_map(&grid, threads, |&k| SweepRow {
        k,
        mu: cell.solve_cell3(k).map(|c3| compute_mu_hom(&cell2, &c3)),
    });
    if rows.iter().all(|r| r.mu.is_err()) {
        return Err(CliError::Numerical("every wavenumber of the sweep failed".into()));
    }
    let resonances = detect_resonances(&rows);
    set.write("mu_sweep.csv", &output::sweep_csv(&rows))?;
    let mut s = String::from("k_lo,k_hi,k_peak,im_peak,sign_change\n");
    for r in &resonances {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_g(r.k_lo),
            fmt_g(r.k_hi),
            fmt_g(r.k_peak),
            fmt_g(r.im_peak),
            r.sign_change
        );
    }
    set.write("resonances.txt", &s)?;
    let failed = rows.iter().filter(|r| r.mu.is_err()).count();
    Ok(format!("{} wavenumbers ({failed} failed), {} resonance intervals\n{s}", rows.len(), resonances.len()))
}

fn cmd_solve(config: &RunConfig, set: &mut OutputSet) -> Result<String, CliError> {
    let k = config.wavenumber()?;
    let hc = config.hmm_config()?;
    let cell = micro_cell(config)?;
    let tensors = cell.solve_all(k).map_err(CliError::from_cell)?.effective_tensors();
    let scatter = hc.scatter_config(tensors).map_err(CliError::from_hmm)?;
    let mesh = hc.macro_mesh(config.macro_mesh.n).map_err(CliError::from_hmm)?;
    let system = assemble_effective_system(&scatter, &mesh).map_err(CliError::from_scatter)?;
    if config.output.matrix_market {
        set.write("system.mtx", &output::matrix_market(&system.matrix))?;
    }
    let sol = solve_system(&system).map_err(CliError::from_scatter)?;
    if config.output.vtk {
        set.write("effective_field.vtk", &output::vtk_field(&sol.u_h, "effective field u_H"))?;
    }
    let sl = &config.reconstruction.slice;
    set.write("effective_slice.csv", &output::slice_csv(&plane_slice(&sol.u_h, sl.axis, sl.offset, sl.samples)))?;
    let mut s = output::tensors_summary(&tensors);
    let _ = writeln!(s, "macro mesh: n = {}, dofs = {}", sol.n_per_axis, sol.u_h.coeffs.len());
    let _ = writeln!(s, "relative residual = {}", fmt_g(sol.report.residual));
    let e = &sol.energy;
    let _ = writeln!(
        s,
        "energy balance: source = {}, absorption = {}, boundary = {}, relative defect = {}",
        fmt_g(e.source),
        fmt_g(e.absorption),
        fmt_g(e.boundary),
        fmt_g(e.relative_defect())
    );
    set.write("solve_summary.txt", &s)?;
    Ok(s)
}

fn cmd_hmm(config: &RunConfig, set: &mut OutputSet) -> Result<String, CliError> {
    let k = config.wavenumber()?;
    let hc = config.hmm_config()?;
    let cell = micro_cell(config)?;
    let mesh = hc.macro_mesh(config.macro_mesh.n).map_err(CliError::from_hmm)?;
    let hmm = hmm_solve(&hc, &mesh, &cell, k).map_err(CliError::from_hmm)?;
    if config.output.vtk {
        set.write("macro_field.vtk", &output::vtk_field(hmm.u_h(), "HMM macro field u_H"))?;
    }
    let r = &config.reconstruction;
    let macro_slice = plane_slice(hmm.u_h(), r.slice.axis, r.slice.offset, r.slice.samples);
    set.write("macro_slice.csv", &output::slice_csv(&macro_slice))?;
    let points: Vec<_> = macro_slice.iter().map(|(p, _)| *p).collect();
    let zeroth: Vec<_> = points
        .iter()
        .zip(zeroth_order_field(&hmm, r.delta, &points))
        .filter_map(|(p, v)| v.map(|v| (*p, v)))
        .collect();
    set.write("zeroth_order_slice.csv", &output::slice_csv(&zeroth))?;
    let mut s = output::tensors_summary(&hmm.tensors);
    let _ = writeln!(
        s,
        "macro n = {}, micro n = {}, delta = {}, corrector tets = {}",
        config.macro_mesh.n,
        config.micro.n,
        fmt_g(r.delta),
        hmm.correctors.len()
    );
    let _ = writeln!(s, "relative residual = {}", fmt_g(hmm.macro_solution.report.residual));
    set.write("hmm_summary.txt", &s)?;
    Ok(s)
}

fn cmd_study(config: &RunConfig, set: &mut OutputSet, threads: usize) -> Result<String, CliError> {
    let k = config.wavenumber()?;
    let reference = config
        .study
        .reference
        .ok_or_else(|| CliError::Config("study.reference (macro_n, micro_n) is required".into()))?;
    let meshes = &config.study.meshes;
    if meshes.is_empty() || meshes.contains(&0) {
        return Err(CliError::Config("study.meshes needs at least one positive resolution".into()));
    }
    if meshes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("study.meshes must be strictly increasing".into()));
    }
    let finest = *meshes.last().expect("non-empty");
    if reference.macro_n <= finest || reference.macro_n % finest != 0 || meshes.iter().any(|n| reference.macro_n % n != 0) {
        return Err(CliError::Config("study.reference.macro_n must be a multiple of every study mesh and finer".into()));
    }
    if reference.micro_n == 0 {
        return Err(CliError::Config("study.reference.micro_n must be positive".into()));
    }
    let hc = config.hmm_config()?;
    let dir = cache_dir();
    let (reference_solution, cached) =
        cached_reference(&hc, reference.macro_n, reference.micro_n, k, dir.as_deref())?;
    let rows: Vec<Result<ErrorReport, CliError>> = par_map(meshes, threads, |&n| {
        study_row(&hc, n, &reference_solution).map_err(CliError::from_hmm)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let report = ConvergenceReport::from_errors(k, reference.macro_n, rows);
    set.write("study.csv", &output::study_csv(&report))?;
    let mut s = output::study_table(&report);
    let _ = writeln!(
        s,
        "reference: macro n = {}, micro n = {}{}",
        reference.macro_n,
        reference.micro_n,
        if cached { " (cached)" } else { "" }
    );
    Ok(s)
}


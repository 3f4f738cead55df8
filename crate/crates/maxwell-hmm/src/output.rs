//! Writers for CSV tables, legacy VTK grids and Matrix Market dumps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hmm_core::cell::{EffectiveTensors, SweepRow};
use hmm_core::fem::{FieldFunction, Tensor3};
use hmm_core::hmm::ConvergenceReport;
use hmm_core::linalg::CsrMatrix;
use hmm_core::math::{CVec3, Vec3};
use hmm_core::mesh::Tag;

use crate::CliError;

/// C `printf("%.9g")`.
pub fn fmt_g(x: f64) -> String {
    fmt_g_prec(x, 9)
}

pub fn fmt_g_prec(x: f64, p: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = p.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Files written by one command, removed again if the command fails.
#[derive(Debug, Default)]
pub struct OutputSet {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), created_dir, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        if !self.files.contains(&path) {
            self.files.push(path.clone());
        }
        Ok(path)
    }

    /// Removes every file written so far, and the directory if it was
    /// created here and is now empty.
    pub fn discard(self) {
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

const MU_ORDER: [(usize, usize); 9] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("k");
    for (i, j) in MU_ORDER {
        let _ = write!(s, ",Re_mu{0}{1},Im_mu{0}{1}", i + 1, j + 1);
    }
    s.push('\n');
    for r in rows {
        s.push_str(&fmt_g(r.k));
        for (i, j) in MU_ORDER {
            let z = r.mu.as_ref().map(|m| m[i][j]).unwrap_or(hmm_core::C64::new(f64::NAN, f64::NAN));
            let _ = write!(s, ",{},{}", fmt_g(z.re), fmt_g(z.im));
        }
        s.push('\n');
    }
    s
}

pub fn real_matrix_csv(prefix: &str, m: &[[f64; 3]; 3]) -> String {
    let mut s = format!("{prefix}_1,{prefix}_2,{prefix}_3\n");
    for row in m {
        let _ = writeln!(s, "{},{},{}", fmt_g(row[0]), fmt_g(row[1]), fmt_g(row[2]));
    }
    s
}

pub fn complex_matrix_csv(prefix: &str, m: &Tensor3) -> String {
    let mut s = String::new();
    for j in 1..=3 {
        let _ = write!(s, "{}Re_{prefix}_{j},Im_{prefix}_{j}", if j > 1 { "," } else { "" });
    }
    s.push('\n');
    for row in m {
        let cells: Vec<String> = row.iter().map(|z| format!("{},{}", fmt_g(z.re), fmt_g(z.im))).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn tensors_summary(t: &EffectiveTensors) -> String {
    let mut s = format!("k = {}\n", fmt_g(t.k));
    s.push_str("eps_inv_hom\n");
    s.push_str(&real_matrix_csv("eps_inv", &t.eps_inv_hom));
    s.push_str("mu_hom\n");
    s.push_str(&complex_matrix_csv("mu", &t.mu_hom));
    s
}

pub fn slice_csv(samples: &[(Vec3, CVec3)]) -> String {
    let mut s = String::from("x,y,z,Re_ux,Im_ux,Re_uy,Im_uy,Re_uz,Im_uz,abs_u\n");
    for (p, v) in samples {
        let abs = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_g(p[0]),
            fmt_g(p[1]),
            fmt_g(p[2]),
            fmt_g(v[0].re),
            fmt_g(v[0].im),
            fmt_g(v[1].re),
            fmt_g(v[1].im),
            fmt_g(v[2].re),
            fmt_g(v[2].im),
            fmt_g(abs)
        );
    }
    s
}

/// Legacy ASCII unstructured grid. Point data are the averages of the
/// piecewise-linear field over the tetrahedra sharing each vertex.
pub fn vtk_field(u: &FieldFunction, title: &str) -> String {
    let mesh = u.space.mesh();
    let nv = mesh.n_vertices();
    let nt = mesh.n_tets();
    let mut acc = vec![[hmm_core::C64::new(0.0, 0.0); 3]; nv];
    let mut count = vec![0usize; nv];
    for t in 0..nt {
        for (a, &v) in mesh.tets()[t].iter().enumerate() {
            let mut lam = [0.0; 4];
            lam[a] = 1.0;
            let val = u.value_in(t, &lam);
            for i in 0..3 {
                acc[v][i] += val[i];
            }
            count[v] += 1;
        }
    }
    let mut s = String::with_capacity(64 * (nv + nt));
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", title.lines().next().unwrap_or(""));
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {nv} double");
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {} {}", fmt_g(p[0]), fmt_g(p[1]), fmt_g(p[2]));
    }
    let _ = writeln!(s, "CELLS {nt} {}", 5 * nt);
    for t in mesh.tets() {
        let _ = writeln!(s, "4 {} {} {} {}", t[0], t[1], t[2], t[3]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("10\n");
    }
    let _ = writeln!(s, "CELL_DATA {nt}");
    let _ = writeln!(s, "SCALARS subdomain int 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for tag in mesh.tags() {
        s.push_str(if *tag == Tag::Inside { "1\n" } else { "0\n" });
    }
    let _ = writeln!(s, "POINT_DATA {nv}");
    let avg: Vec<CVec3> = acc.iter().zip(&count).map(|(a, &c)| a.map(|z| z / c.max(1) as f64)).collect();
    for (name, part) in [("Re_u", 0), ("Im_u", 1)] {
        let _ = writeln!(s, "VECTORS {name} double");
        for v in &avg {
            let c = v.map(|z| if part == 0 { z.re } else { z.im });
            let _ = writeln!(s, "{} {} {}", fmt_g(c[0]), fmt_g(c[1]), fmt_g(c[2]));
        }
    }
    s
}

/// Matrix Market coordinate format, complex general, 1-based indices.
pub fn matrix_market(a: &CsrMatrix) -> String {
    let mut s = String::from("%%MatrixMarket matrix coordinate complex general\n");
    let _ = writeln!(s, "{} {} {}", a.nrows(), a.ncols(), a.nnz());
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (j, v) in cols.iter().zip(vals) {
            let _ = writeln!(s, "{} {} {} {}", i + 1, j + 1, fmt_g_prec(v.re, 17), fmt_g_prec(v.im, 17));
        }
    }
    s
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

pub fn study_csv(report: &ConvergenceReport) -> String {
    let mut s = String::from("H,h,k,l2_err,curl_err,theta_l2,eoc_l2,eoc_curl,eoc_theta\n");
    for r in &report.rows {
        let e = &r.error;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            fmt_g(e.h_macro),
            opt(e.h_micro),
            fmt_g(e.k),
            fmt_g(e.l2),
            fmt_g(e.curl_semi),
            fmt_g(e.theta_l2),
            opt(r.eoc_l2),
            opt(r.eoc_curl),
            opt(r.eoc_theta)
        );
    }
    s
}

/// Aligned plain-text version of the study table.
pub fn study_table(report: &ConvergenceReport) -> String {
    let fixed = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
    let mut s = format!("k = {}, reference n = {}\n", fmt_g(report.k), report.reference_n);
    let _ = writeln!(
        s,
        "{:>4} {:>10} {:>12} {:>8} {:>12} {:>8} {:>12} {:>8}",
        "n", "H", "||e0||", "EOC", "||curl e0||", "EOC", "||theta||", "EOC"
    );
    for r in &report.rows {
        let e = &r.error;
        let _ = writeln!(
            s,
            "{:>4} {:>10.6} {:>12.6e} {:>8} {:>12.6e} {:>8} {:>12.6e} {:>8}",
            e.n_macro,
            e.h_macro,
            e.l2,
            fixed(r.eoc_l2),
            e.curl_semi,
            fixed(r.eoc_curl),
            e.theta_l2,
            fixed(r.eoc_theta)
        );
    }
    s
}

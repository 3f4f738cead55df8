//! On-disk cache of reference solutions, keyed by every input that
//! determines them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use hmm_core::fem::{EdgeFlavor, EdgeSpace, FieldFunction, Region};
use hmm_core::hmm::{reference_solution, HmmConfig, ReferenceSolution};
use hmm_core::C64;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const CACHE_ENV: &str = "MAXWELL_HMM_CACHE";

const MAGIC: &str = "maxwell-hmm reference v1";

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn key(config: &HmmConfig, macro_n: usize, micro_n: usize, k: f64) -> String {
    format!("{config:?} macro_n={macro_n} micro_n={micro_n} k={k:e}")
}

fn file_name(key: &str) -> String {
    let digest = Sha256::digest(key.as_bytes());
    let mut s = String::from("reference-");
    for b in &digest[..12] {
        let _ = write!(s, "{b:02x}");
    }
    s.push_str(".txt");
    s
}

fn load(path: &Path, key: &str, config: &HmmConfig, macro_n: usize) -> Option<FieldFunction> {
    let text = fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != MAGIC || lines.next()? != key {
        return None;
    }
    let mesh = config.macro_mesh(macro_n).ok()?;
    let space = Arc::new(EdgeSpace::new(mesh, Region::All, EdgeFlavor::Unconstrained));
    let n: usize = lines.next()?.parse().ok()?;
    if n != space.n_dofs() {
        return None;
    }
    let mut coeffs = Vec::with_capacity(n);
    for line in lines.take(n) {
        let (re, im) = line.split_once(' ')?;
        coeffs.push(C64::new(re.parse().ok()?, im.parse().ok()?));
    }
    (coeffs.len() == n).then(|| FieldFunction::new(space, coeffs))
}

fn store(dir: &Path, path: &Path, key: &str, field: &FieldFunction) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut s = format!("{MAGIC}\n{key}\n{}\n", field.coeffs.len());
    for z in &field.coeffs {
        let _ = writeln!(s, "{:e} {:e}", z.re, z.im);
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, s)?;
    fs::rename(&tmp, path)
}

/// Reference solution, read from the cache directory when present there
/// and written to it after a fresh computation.
pub fn cached_reference(
    config: &HmmConfig,
    macro_n: usize,
    micro_n: usize,
    k: f64,
    dir: Option<&Path>,
) -> Result<(ReferenceSolution, bool), CliError> {
    let key = key(config, macro_n, micro_n, k);
    if let Some(dir) = dir {
        let path = dir.join(file_name(&key));
        if let Some(field) = load(&path, &key, config, macro_n) {
            return Ok((ReferenceSolution::new(field, k), true));
        }
        let r = reference_solution(config, macro_n, micro_n, k).map_err(CliError::from_hmm)?;
        store(dir, &path, &key, &r.field)
            .map_err(|e| CliError::Config(format!("cannot write cache {}: {e}", dir.display())))?;
        return Ok((r, false));
    }
    let r = reference_solution(config, macro_n, micro_n, k).map_err(CliError::from_hmm)?;
    Ok((r, false))
}

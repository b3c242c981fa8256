//! Code bundles: exported matrices plus a JSON manifest describing them.

use std::path::{Path, PathBuf};

use mmcodes::{instantiate, symbolic_boundaries, verify_complex, write_alist, write_mtx, BitMatrix, MCssCode};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::BuildConfig;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Alist,
    Mtx,
}

impl MatrixFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MatrixFormat::Alist => "alist",
            MatrixFormat::Mtx => "mtx",
        }
    }

    pub fn render(self, m: &BitMatrix) -> String {
        match self {
            MatrixFormat::Alist => write_alist(m),
            MatrixFormat::Mtx => write_mtx(m),
        }
    }

    pub fn parse(self, text: &str) -> mmcodes::Result<BitMatrix> {
        match self {
            MatrixFormat::Alist => mmcodes::read_alist(text),
            MatrixFormat::Mtx => mmcodes::read_mtx(text),
        }
    }

    fn from_extension(ext: &str) -> Option<Self> {
        match ext {
            "alist" => Some(MatrixFormat::Alist),
            "mtx" => Some(MatrixFormat::Mtx),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixInfo {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub ones: usize,
    pub files: Vec<MatrixFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub boundaries_compose_to_zero: bool,
    pub px_pz_orthogonal: bool,
    /// `None` when the metacheck does not exist.
    pub mx_px_zero: Option<bool>,
    pub mz_pz_zero: Option<bool>,
}

impl Checks {
    pub fn all_pass(&self) -> bool {
        self.boundaries_compose_to_zero
            && self.px_pz_orthogonal
            && self.mx_px_zero.unwrap_or(true)
            && self.mz_pz_zero.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub name: String,
    pub t: usize,
    pub q: usize,
    pub orders: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    pub generators: Vec<String>,
    /// Generators re-rendered in canonical monomial order.
    pub canonical_generators: Vec<String>,
    pub n: usize,
    pub chain_dims: Vec<usize>,
    pub matrices: Vec<MatrixInfo>,
    pub checks: Checks,
    pub notes: Vec<String>,
}

impl Manifest {
    pub fn to_config(&self) -> BuildConfig {
        BuildConfig {
            name: self.name.clone(),
            t: self.t,
            orders: self.orders.clone(),
            variables: self.variables.clone(),
            generators: self.generators.clone(),
            q: Some(self.q),
            expected: None,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config {
                path: path.display().to_string(),
                message: format!("unsupported schema_version {}", m.schema_version),
            });
        }
        Ok(m)
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// The code's matrices with their conventional names, skipping absent metachecks.
pub fn named_matrices(code: &MCssCode) -> Vec<(&'static str, &BitMatrix)> {
    let mut v = vec![("P_X", &code.p_x), ("P_Z", &code.p_z)];
    if let Some(m) = &code.m_x {
        v.push(("M_X", m));
    }
    if let Some(m) = &code.m_z {
        v.push(("M_Z", m));
    }
    v
}

pub fn compute_checks(code: &MCssCode) -> CliResult<Checks> {
    let maps = instantiate(&symbolic_boundaries(code.t)?, &code.generators, &code.spec)?;
    let zero = |a: &BitMatrix, b: &BitMatrix| a.mul(b).map(|m| m.is_zero());
    Ok(Checks {
        boundaries_compose_to_zero: verify_complex(&maps)?,
        px_pz_orthogonal: zero(&code.p_x, &code.p_z.transpose())?,
        mx_px_zero: code.m_x.as_ref().map(|m| zero(m, &code.p_x)).transpose()?,
        mz_pz_zero: code.m_z.as_ref().map(|m| zero(m, &code.p_z)).transpose()?,
    })
}

/// Builds the manifest; with `out` set, also writes the matrix files there.
pub fn make_manifest(cfg: &BuildConfig, code: &MCssCode, formats: &[MatrixFormat], out: Option<&Path>) -> CliResult<Manifest> {
    let (_, vars, gens) = cfg.parse_generators()?;
    let mut matrices = Vec::new();
    for (name, m) in named_matrices(code) {
        let mut files = Vec::new();
        for &f in formats {
            let text = f.render(m);
            let file = format!("{name}.{}", f.extension());
            if let Some(dir) = out {
                let p = dir.join(&file);
                std::fs::write(&p, &text).map_err(CliError::io(p))?;
            }
            files.push(MatrixFile {
                path: file,
                sha256: sha256_hex(&text),
            });
        }
        matrices.push(MatrixInfo {
            name: name.to_string(),
            rows: m.rows(),
            cols: m.cols(),
            ones: m.count_ones(),
            files,
        });
    }
    let mut notes = Vec::new();
    if code.m_x.is_none() {
        notes.push(format!("no X metacheck: q = {} < 2", code.q));
    }
    if code.m_z.is_none() {
        notes.push(format!("no Z metacheck: q = {} > t - 2 = {}", code.q, code.t as isize - 2));
    }
    Ok(Manifest {
        schema_version: SCHEMA_VERSION,
        name: cfg.name.clone(),
        t: code.t,
        q: code.q,
        orders: cfg.orders.clone(),
        variables: cfg.variables.clone(),
        generators: cfg.generators.clone(),
        canonical_generators: gens.iter().map(|g| g.render(&vars)).collect(),
        n: code.n,
        chain_dims: code.chain_dims.clone(),
        matrices,
        checks: compute_checks(code)?,
        notes,
    })
}

/// Checks every file listed in a bundle against the rebuilt code. Returns
/// one message per problem.
pub fn audit_bundle(dir: &Path, manifest: &Manifest, code: &MCssCode) -> Vec<String> {
    let mut problems = Vec::new();
    let expected = named_matrices(code);
    for info in &manifest.matrices {
        let Some((_, m)) = expected.iter().find(|(n, _)| *n == info.name) else {
            problems.push(format!("{}: not part of the rebuilt code", info.name));
            continue;
        };
        for f in &info.files {
            let path: PathBuf = dir.join(&f.path);
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    problems.push(format!("{}: {e}", path.display()));
                    continue;
                }
            };
            if sha256_hex(&text) != f.sha256 {
                problems.push(format!("{}: sha256 mismatch", f.path));
            }
            let format = Path::new(&f.path).extension().and_then(|e| e.to_str()).and_then(MatrixFormat::from_extension);
            match format.map(|fm| fm.parse(&text)) {
                Some(Ok(read)) if &read == *m => {}
                Some(Ok(_)) => problems.push(format!("{}: differs from the rebuilt matrix", f.path)),
                Some(Err(e)) => problems.push(format!("{}: {e}", f.path)),
                None => problems.push(format!("{}: unknown format", f.path)),
            }
        }
    }
    problems
}

use std::path::{Path, PathBuf};

use quaddiv::assembly::QuadratureOptions;
use quaddiv::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    Cube(usize),
    File(PathBuf),
}

impl MeshSource {
    pub fn id(&self) -> String {
        match self {
            MeshSource::Cube(n) => format!("cube:{n}"),
            MeshSource::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub meshes: Vec<MeshSource>,
    pub quadrature: QuadratureOptions,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub diagnostics: bool,
    pub verify_complex: bool,
    /// Fill the wall-time column; off by default so output is reproducible.
    pub timings: bool,
    /// Prefix for coordinate dumps of each assembled system.
    pub dump_system: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            meshes: Vec::new(),
            quadrature: QuadratureOptions::default(),
            tol: 1e-10,
            out: None,
            diagnostics: false,
            verify_complex: false,
            timings: false,
            dump_system: None,
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::InvalidArgument(format!("{key}: expected a boolean, got {v:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse {v:?}")))
}

impl RunConfig {
    /// Applies one `key=value` setting. `cube` and `mesh` append.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "cube" => {
                for n in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    self.meshes.push(MeshSource::Cube(parse_num("cube", n)?));
                }
            }
            "mesh" => self.meshes.push(MeshSource::File(PathBuf::from(value))),
            "quad_assembly" | "quad-assembly" => self.quadrature.assembly = parse_num(key, value)?,
            "quad_analytic" | "quad-analytic" => self.quadrature.analytic = parse_num(key, value)?,
            "tol" => self.tol = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "diagnostics" => self.diagnostics = parse_bool(key, value)?,
            "verify_complex" | "verify-complex" => self.verify_complex = parse_bool(key, value)?,
            "timings" => self.timings = parse_bool(key, value)?,
            "dump_system" | "dump-system" => self.dump_system = Some(PathBuf::from(value)),
            other => return Err(Error::InvalidArgument(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// Reads `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::MalformedFile {
                line: i + 1,
                column: 1,
                message: format!("expected key=value, got {line:?}"),
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        self.apply_text(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.meshes.is_empty() {
            return Err(Error::InvalidArgument("no mesh given (use --cube N or --mesh PATH)".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.meshes.contains(&MeshSource::Cube(0)) {
            return Err(Error::InvalidArgument("cube mesh needs n >= 1".into()));
        }
        Ok(())
    }
}

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::failure::Failure;

/// Destination files of one run, opened before any computation so that a
/// bad path fails fast. Files are removed again unless the run commits.
pub struct Outputs {
    main: Box<dyn Write>,
    companions: Vec<BufWriter<File>>,
    meta: Option<BufWriter<File>>,
    created: Vec<PathBuf>,
    committed: bool,
}

/// `scan.csv` with suffix `transitions` becomes `scan_transitions.csv`.
pub fn companion_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    out.with_file_name(name)
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

impl Outputs {
    /// Without `out` the main output goes to standard output and the
    /// companion files and sidecar are skipped.
    pub fn open(out: Option<&Path>, companions: &[&str]) -> Result<Self, Failure> {
        let mut this = Self {
            main: Box::new(io::stdout()),
            companions: Vec::new(),
            meta: None,
            created: Vec::new(),
            committed: false,
        };
        let Some(out) = out else {
            return Ok(this);
        };
        this.main = Box::new(this.create(out)?);
        for suffix in companions {
            let f = this.create(&companion_path(out, suffix))?;
            this.companions.push(f);
        }
        this.meta = Some(this.create(&meta_path(out))?);
        Ok(this)
    }

    fn create(&mut self, path: &Path) -> Result<BufWriter<File>, Failure> {
        let f = File::create(path)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
        self.created.push(path.to_path_buf());
        Ok(BufWriter::new(f))
    }

    pub fn main(&mut self) -> &mut dyn Write {
        &mut self.main
    }

    pub fn companion(&mut self, i: usize) -> Option<&mut BufWriter<File>> {
        self.companions.get_mut(i)
    }

    /// Writes the sidecar and flushes everything.
    pub fn commit(mut self, meta: &[(String, String)]) -> Result<(), Failure> {
        if let Some(w) = self.meta.as_mut() {
            spinstar::io::write_meta(&mut *w, meta)?;
        }
        self.main.flush()?;
        for w in &mut self.companions {
            w.flush()?;
        }
        if let Some(w) = self.meta.as_mut() {
            w.flush()?;
        }
        self.committed = true;
        Ok(())
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.created {
                let _ = fs::remove_file(p);
            }
        }
    }
}

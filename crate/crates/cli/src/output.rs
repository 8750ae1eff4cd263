//! CSV and JSON artifacts. Data files are deterministic; run metadata goes to a
//! `<command>.meta.json` sidecar.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use keldysh_core::keldysh::KeldyshGF;
use serde::Serialize;

pub struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<fs::File>> {
        let path = self.dir.join(name);
        let f = fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path);
        Ok(BufWriter::new(f))
    }

    /// Rows of reals, 17 significant digits. Refuses non-finite entries.
    pub fn csv<I>(&mut self, name: &str, header: &str, rows: I) -> Result<()>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        let rows: Vec<Vec<f64>> = rows.into_iter().collect();
        if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.iter().any(|v| !v.is_finite())) {
            bail!("internal error: non-finite value in row {i} of {name}");
        }
        let mut out = self.open(name)?;
        writeln!(out, "{header}")?;
        for r in rows {
            let line: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn greens_csv(&mut self, name: &str, g: &KeldyshGF<f64>) -> Result<()> {
        if !g.is_finite() {
            bail!("internal error: non-finite Green's function for {name}");
        }
        let mut out = self.open(name)?;
        g.write_csv(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<()> {
        let mut out = self.open(name)?;
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }
}

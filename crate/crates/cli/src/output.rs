//! Output directories with a provenance manifest.
//!
//! Edge, label and CSV outputs have fixed layouts with no room for metadata,
//! so each directory gets a `manifest.json` holding the run configuration and
//! SHA-256 digests of every input read and every file written.

use std::fs::{self, File};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{shipped_control_text, RunConfig};
use crate::error::CliResult;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    inputs: &'a [FileDigest],
    outputs: &'a [FileDigest],
}

pub fn sha256_reader<R: Read>(mut r: R) -> io::Result<(String, u64)> {
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = r.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
        total += n as u64;
    }
    Ok((hex::encode(h.finalize()), total))
}

pub fn digest_file(path: &Path) -> io::Result<FileDigest> {
    let (sha256, bytes) = sha256_reader(File::open(path)?)?;
    Ok(FileDigest { path: path.display().to_string(), bytes, sha256 })
}

fn digest_text(name: &str, text: &str) -> FileDigest {
    let (sha256, bytes) = sha256_reader(text.as_bytes()).expect("in-memory read");
    FileDigest { path: name.to_string(), bytes, sha256 }
}

/// Digests of every input the configuration refers to. Bundled tables are
/// listed under a `<bundled ...>` name.
pub fn input_digests(cfg: &RunConfig) -> CliResult<Vec<FileDigest>> {
    let mut out = Vec::new();
    if let Some(d) = &cfg.data {
        for p in [&d.members, &d.votes, &d.rollcalls] {
            out.push(digest_file(p)?);
        }
        match &cfg.leaders {
            Some(p) => out.push(digest_file(p)?),
            None => out.push(digest_text("<bundled leaders.csv>", glass_rollcall::LeadersConfig::shipped_text())),
        }
    }
    if let Some(g) = &cfg.graph {
        out.push(digest_file(&g.edges)?);
        out.push(digest_file(&g.labels)?);
        if let Some(t) = &g.truth {
            out.push(digest_file(t)?);
        }
    }
    if cfg.command == "regress" {
        match &cfg.control {
            Some(p) => out.push(digest_file(p)?),
            None => out.push(digest_text("<bundled control.csv>", shipped_control_text())),
        }
        if let Some(s) = &cfg.series {
            out.push(digest_file(s)?);
        }
    }
    Ok(out)
}

/// Collects written files so the manifest can list them.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        fs::create_dir_all(root)?;
        Ok(OutputDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.path(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes)?;
        self.written.push(PathBuf::from(rel));
        Ok(path)
    }

    /// Pretty JSON at full float precision.
    pub fn write_json<T: Serialize + ?Sized>(&mut self, rel: &str, value: &T) -> CliResult<PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(rel, &bytes)
    }

    pub fn write_with<F>(&mut self, rel: &str, fill: F) -> CliResult<PathBuf>
    where
        F: FnOnce(&mut Vec<u8>) -> CliResult<()>,
    {
        let mut buf = Vec::new();
        fill(&mut buf)?;
        self.write_bytes(rel, &buf)
    }

    /// Writes `manifest.json` last, covering everything written before.
    pub fn finish(self, cfg: &RunConfig, inputs: &[FileDigest]) -> CliResult<PathBuf> {
        let mut outputs = Vec::with_capacity(self.written.len());
        let mut rels = self.written.clone();
        rels.sort();
        rels.dedup();
        for rel in rels {
            let d = digest_file(&self.root.join(&rel))?;
            outputs.push(FileDigest { path: rel.display().to_string(), ..d });
        }
        let manifest = Manifest { tool: "glass", version: env!("CARGO_PKG_VERSION"), config: cfg, inputs, outputs: &outputs };
        let path = self.root.join(MANIFEST);
        let mut f = File::create(&path)?;
        serde_json::to_writer_pretty(&mut f, &manifest)?;
        f.write_all(b"\n")?;
        Ok(path)
    }
}

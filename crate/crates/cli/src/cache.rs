//! One file per (potential digest, ℓ), each holding a result envelope.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use magic_core::exactnum::{format_rational, parse_rational};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::envelope::Envelope;

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn is_enabled(&self) -> bool {
        self.dir.is_some()
    }

    fn path(&self, digest: &str, ell: usize) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(digest).join(format!("q{ell:03}.json")))
    }

    pub fn lookup(&self, digest: &str, ell: usize) -> Option<BigRational> {
        let path = self.path(digest, ell)?;
        let text = fs::read_to_string(&path).ok()?;
        match parse_entry(&text, digest, ell) {
            Some(q) => Some(q),
            None => {
                warn(&format!("ignoring corrupted cache entry {}", path.display()));
                None
            }
        }
    }

    /// Writes through a temporary file and a rename; failures only warn.
    pub fn store(&self, digest: &str, ell: usize, q: &BigRational) {
        let Some(path) = self.path(digest, ell) else {
            return;
        };
        let env = Envelope::new(
            digest,
            vec!["traces".into(), format!("--ell={ell}")],
            0,
            json!({ "ell": ell, "q": format_rational(q) }),
        );
        if let Err(e) = write_atomic(&path, &env.to_json()) {
            warn(&format!("cache write to {} failed: {e}", path.display()));
        }
    }
}

fn parse_entry(text: &str, digest: &str, ell: usize) -> Option<BigRational> {
    let v: Value = serde_json::from_str(text).ok()?;
    if v.get("potential_digest")?.as_str()? != digest {
        return None;
    }
    let payload = v.get("payload")?;
    if payload.get("ell")?.as_u64()? != ell as u64 {
        return None;
    }
    parse_rational(payload.get("q")?.as_str()?).ok()
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = path.parent().expect("cache paths have a parent");
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(text.as_bytes())?;
    f.sync_all()?;
    fs::rename(&tmp, path)
}

fn warn(msg: &str) {
    eprintln!("{}", json!({ "level": "warning", "message": msg }));
}

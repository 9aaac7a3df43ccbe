//! Quotient bases shared across threads and, optionally, persisted on disk.
//!
//! Disk entries are keyed by a SHA-256 of the skeleton records, the degree
//! and [`RELATIONS_VERSION`]; each file repeats those fields and is ignored
//! (then rewritten) if they do not match.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use ktg_core::coeff::fmt_rational;
use ktg_core::{Bases, ChordDiagram, QuotientBasis, Skeleton, RELATIONS_VERSION};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::format::{parse_inline_diagram, parse_rational, parse_skeleton, records, write_inline_diagram, write_skeleton};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "KTG_CACHE_DIR";

type Key = (Skeleton, usize);

#[derive(Default)]
pub struct BasisCache {
    memory: RwLock<HashMap<Key, Arc<QuotientBasis>>>,
    dir: Option<PathBuf>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl BasisCache {
    pub fn in_memory() -> Self {
        BasisCache::default()
    }

    pub fn on_disk(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(BasisCache { dir: Some(dir), ..BasisCache::default() })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Disk hits and misses so far (memory hits are not counted).
    pub fn stats(&self) -> (usize, usize) {
        (self.hits.load(Ordering::Relaxed), self.misses.load(Ordering::Relaxed))
    }

    fn path(&self, s: &Skeleton, n: usize) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        let mut h = Sha256::new();
        h.update(write_skeleton(s).as_bytes());
        h.update(format!("\ndegree {n}\nversion {RELATIONS_VERSION}\n").as_bytes());
        Some(dir.join(format!("{}.basis", hex::encode(h.finalize()))))
    }

    fn load(&self, path: &Path, s: &Skeleton, n: usize) -> Option<QuotientBasis> {
        let text = std::fs::read_to_string(path).ok()?;
        decode(&text, s, n).ok()
    }

    fn store(&self, path: &Path, b: &QuotientBasis) -> Result<()> {
        static SEQ: AtomicUsize = AtomicUsize::new(0);
        let tmp = path.with_extension(format!("tmp.{}.{}", std::process::id(), SEQ.fetch_add(1, Ordering::Relaxed)));
        std::fs::write(&tmp, encode(b))?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    fn fetch(&self, s: &Skeleton, n: usize) -> Result<Arc<QuotientBasis>> {
        let key = (s.clone(), n);
        if let Some(b) = self.memory.read().expect("cache lock").get(&key) {
            return Ok(b.clone());
        }
        let path = self.path(s, n);
        let b = match path.as_deref().and_then(|p| self.load(p, s, n)) {
            Some(b) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                b
            }
            None => {
                let b = QuotientBasis::compute(s, n);
                if let Some(p) = &path {
                    self.misses.fetch_add(1, Ordering::Relaxed);
                    self.store(p, &b)?;
                }
                b
            }
        };
        let mut w = self.memory.write().expect("cache lock");
        Ok(w.entry(key).or_insert_with(|| Arc::new(b)).clone())
    }

    /// Computes the missing cells in parallel.
    pub fn prefetch(&self, cells: &[(Skeleton, usize)]) -> Result<()> {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cells.iter().map(|(s, n)| scope.spawn(move || self.fetch(s, *n).map(|_| ()))).collect();
            handles.into_iter().try_for_each(|h| h.join().expect("basis worker panicked"))
        })
    }
}

impl Bases for BasisCache {
    fn basis(&self, s: &Skeleton, n: usize) -> ktg_core::Result<Arc<QuotientBasis>> {
        self.fetch(s, n).map_err(|e| match e {
            CliError::Core(e) => e,
            e => ktg_core::Error::Precondition(format!("basis cache: {e}")),
        })
    }
}

/// Serializes a basis: header fields, skeleton records, basis diagrams
/// (`b | ...`), then each pivot diagram (`p | ...`) followed by its
/// reduction as `<rational> | ...` terms.
pub fn encode(b: &QuotientBasis) -> String {
    let mut out = format!("version {RELATIONS_VERSION}\ndegree {}\nrelations {}\n", b.degree(), b.relation_count());
    out.push_str(&write_skeleton(b.skeleton()));
    for d in b.basis_diagrams() {
        let _ = writeln!(out, "b | {}", write_inline_diagram(d));
    }
    for (p, row) in b.reduction_table() {
        let _ = writeln!(out, "p | {}", write_inline_diagram(p));
        for (d, c) in row {
            let _ = writeln!(out, "{} | {}", fmt_rational(c), write_inline_diagram(d));
        }
    }
    out
}

fn bad(line: usize, msg: &str) -> CliError {
    CliError::Parse { line, msg: msg.into() }
}

/// Reads a cache entry and checks it against `(s, n)` and the current
/// relation version.
pub fn decode(text: &str, s: &Skeleton, n: usize) -> Result<QuotientBasis> {
    let mut fields = BTreeMap::new();
    let mut skel = String::new();
    let mut body = Vec::new();
    for (line, l) in records(text) {
        match l.split_once(' ') {
            Some((k @ ("version" | "degree" | "relations"), v)) => {
                fields.insert(k, v.trim());
            }
            Some(("vertex" | "edge" | "circle", _)) => {
                skel.push_str(l);
                skel.push('\n');
            }
            _ => body.push((line, l)),
        }
    }
    if fields.get("version") != Some(&RELATIONS_VERSION) {
        return Err(bad(1, "cache entry has a different relation version"));
    }
    if fields.get("degree").and_then(|d| d.parse::<usize>().ok()) != Some(n) {
        return Err(bad(2, "cache entry has a different degree"));
    }
    let relations: usize = fields.get("relations").and_then(|r| r.parse().ok()).ok_or_else(|| bad(3, "missing relations"))?;
    if parse_skeleton(&skel)? != *s {
        return Err(bad(4, "cache entry has a different skeleton"));
    }
    let mut basis: Vec<ChordDiagram> = Vec::new();
    let mut table: BTreeMap<ChordDiagram, Vec<(ChordDiagram, _)>> = BTreeMap::new();
    let mut pivot: Option<ChordDiagram> = None;
    for (line, l) in body {
        let (tag, d) = l.split_once('|').ok_or_else(|| bad(line, "expected `<tag> | <chords>`"))?;
        let d = parse_inline_diagram(line, s, d)?;
        match tag.trim() {
            "b" => basis.push(d),
            "p" => {
                table.insert(d.clone(), Vec::new());
                pivot = Some(d);
            }
            c => {
                let p = pivot.as_ref().ok_or_else(|| bad(line, "reduction term before any pivot"))?;
                table.get_mut(p).expect("pivot inserted").push((d, parse_rational(line, c)?));
            }
        }
    }
    let b = QuotientBasis::from_parts(s, n, table, relations)?;
    if !b.basis_diagrams().eq(basis.iter()) {
        return Err(bad(0, "cache entry basis does not match its reductions"));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ktg_core::skeleton::{strands, theta};

    #[test]
    fn encode_decode_round_trip() {
        for (s, n) in [(theta(), 2), (strands(2), 2), (strands(1), 0)] {
            let b = QuotientBasis::compute(&s, n);
            assert_eq!(decode(&encode(&b), &s, n).unwrap(), b);
        }
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let s = theta();
        let text = encode(&QuotientBasis::compute(&s, 1)).replace(RELATIONS_VERSION, "other");
        assert!(decode(&text, &s, 1).is_err());
    }

    #[test]
    fn disk_hits_reproduce_the_basis() {
        let dir = tempfile::tempdir().unwrap();
        let s = theta();
        let first = BasisCache::on_disk(dir.path()).unwrap();
        let a = first.basis(&s, 2).unwrap();
        assert_eq!(first.stats(), (0, 1));
        let second = BasisCache::on_disk(dir.path()).unwrap();
        let b = second.basis(&s, 2).unwrap();
        assert_eq!(second.stats(), (1, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn prefetch_fills_cells() {
        let c = BasisCache::in_memory();
        c.prefetch(&[(theta(), 0), (theta(), 1), (theta(), 2)]).unwrap();
        assert_eq!(c.memory.read().unwrap().len(), 3);
    }
}

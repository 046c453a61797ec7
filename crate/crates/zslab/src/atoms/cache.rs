//! On-disk atom catalog cache.
//!
//! File format (one catalog per file, named `<canonical>.atoms`, with
//! `.upto<k>` inserted for truncated catalogs):
//!
//! ```text
//! group C4
//! davenport 4        <- or `bound <k>` when truncated
//! 0
//! 1+3
//! ...
//! ```
//!
//! Atoms appear one per line in the canonical catalog order, so rendering is
//! byte-for-byte reproducible from a recomputation.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::algebra::{GroupSpec, Sequence};

use super::{enumerate_atoms, AtomCatalog};

pub fn render(cat: &AtomCatalog) -> String {
    debug_assert!(cat.restriction().is_none(), "restricted catalogs are not cached");
    let mut out = String::new();
    out.push_str(&format!("group {}\n", cat.group().canonical_name()));
    match cat.bound() {
        None => out.push_str(&format!("davenport {}\n", cat.max_length())),
        Some(b) => out.push_str(&format!("bound {b}\n")),
    }
    for a in cat.atoms() {
        out.push_str(&a.render());
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Option<AtomCatalog> {
    let mut lines = text.lines();
    let group_line = lines.next()?;
    let spec = GroupSpec::parse(group_line.strip_prefix("group ")?).ok()?;
    let header = lines.next()?;
    let bound = if let Some(d) = header.strip_prefix("davenport ") {
        d.trim().parse::<u64>().ok()?;
        None
    } else if let Some(b) = header.strip_prefix("bound ") {
        Some(b.trim().parse::<u64>().ok()?)
    } else {
        return None;
    };
    let mut atoms = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        atoms.push(Sequence::parse(&spec, line).ok()?);
    }
    Some(AtomCatalog::build(spec, atoms, bound, None))
}

pub fn file_name(spec: &GroupSpec, bound: Option<u64>) -> String {
    match bound {
        None => format!("{}.atoms", spec.canonical_name()),
        Some(b) => format!("{}.upto{b}.atoms", spec.canonical_name()),
    }
}

pub fn path_for(dir: &Path, spec: &GroupSpec, bound: Option<u64>) -> PathBuf {
    dir.join(file_name(spec, bound))
}

pub fn store(cat: &AtomCatalog, dir: &Path) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = path_for(dir, cat.group(), cat.bound());
    fs::write(&path, render(cat))?;
    Ok(path)
}

/// Loads a cached catalog if present and well formed for this group.
pub fn load(spec: &GroupSpec, bound: Option<u64>, dir: &Path) -> Option<AtomCatalog> {
    let text = fs::read_to_string(path_for(dir, spec, bound)).ok()?;
    let cat = parse(&text)?;
    if cat.group() != spec || cat.bound() != bound {
        return None;
    }
    Some(cat)
}

/// Loads from cache or recomputes and stores. Returns the catalog and whether
/// it was a cache hit. IO failures fall back to recomputation.
pub fn load_or_compute(spec: &GroupSpec, bound: Option<u64>, dir: &Path) -> (AtomCatalog, bool) {
    if let Some(cat) = load(spec, bound, dir) {
        return (cat, true);
    }
    let cat = enumerate_atoms(spec, bound);
    let _ = store(&cat, dir);
    (cat, false)
}

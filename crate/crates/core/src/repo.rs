//! A file-based domain repository keyed by IRI. Each stored file is a PDDLS
//! domain; the index maps the IRIs bound to the domain's own name and to its
//! actions onto the file holding them.
//!
//! The index is a sorted `index.tsv` (IRI, tab, relative path) behind a
//! one-line header. Writes go through a temp file and an atomic rename,
//! guarded by an advisory lock file, so a killed writer never corrupts it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::syntax::{parse_document, PddlsDocument, SyntaxError};

const INDEX_FILE: &str = "index.tsv";
const INDEX_HEADER: &str = "# pddls-repo-index 1";
const LOCK_FILE: &str = ".repo.lock";

#[derive(Debug, Error)]
pub enum RepoError {
    #[error(transparent)]
    Parse(#[from] SyntaxError),
    #[error("`{0}` is not a domain document")]
    WrongKind(PathBuf),
    #[error("domain `{0}` has no context binding for its name or actions; nothing to index")]
    NoIriBinding(String),
    #[error("IRI `{0}` is already indexed")]
    DuplicateIri(String),
    #[error("index at `{path}` is corrupted ({reason}); delete {INDEX_FILE} and re-add the domain files")]
    Index { path: PathBuf, reason: String },
    #[error("repository is locked by another writer (remove `{0}` if stale)")]
    Locked(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepoIndex {
    pub root: PathBuf,
    pub version: u32,
    entries: BTreeMap<String, String>,
}

impl RepoIndex {
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(i, p)| (i.as_str(), p.as_str()))
    }

    pub fn path_for(&self, iri: &str) -> Option<&str> {
        self.entries.get(iri).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct RepoLock {
    path: PathBuf,
}

impl RepoLock {
    fn acquire(root: &Path) -> Result<RepoLock, RepoError> {
        let path = root.join(LOCK_FILE);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(RepoLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(RepoError::Locked(path))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for RepoLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Loads the index; a missing index file is an empty repository.
pub fn load_index(root: &Path) -> Result<RepoIndex, RepoError> {
    let path = root.join(INDEX_FILE);
    if !path.exists() {
        return Ok(RepoIndex { root: root.to_path_buf(), version: 1, entries: BTreeMap::new() });
    }
    let text = fs::read_to_string(&path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(INDEX_HEADER) => {}
        other => {
            return Err(RepoError::Index {
                path,
                reason: format!("unexpected header {other:?}"),
            });
        }
    }
    let mut entries = BTreeMap::new();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let Some((iri, rel)) = line.split_once('\t') else {
            return Err(RepoError::Index {
                path,
                reason: format!("line {} is not tab-separated", n + 2),
            });
        };
        entries.insert(iri.to_string(), rel.to_string());
    }
    Ok(RepoIndex { root: root.to_path_buf(), version: 1, entries })
}

fn write_index(index: &RepoIndex) -> Result<(), RepoError> {
    let mut text = String::from(INDEX_HEADER);
    text.push('\n');
    for (iri, rel) in &index.entries {
        text.push_str(iri);
        text.push('\t');
        text.push_str(rel);
        text.push('\n');
    }
    let tmp = index.root.join(format!("{INDEX_FILE}.tmp"));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, index.root.join(INDEX_FILE))?;
    Ok(())
}

/// The IRIs under which a domain is indexed: the binding for its own name,
/// then bindings for each action name, in document order.
pub fn domain_iris(doc: &PddlsDocument) -> Vec<String> {
    let mut iris = Vec::new();
    if let Some(iri) = doc.context.expand(&doc.name) {
        iris.push(iri.to_string());
    }
    for action in &doc.actions {
        if let Some(iri) = doc.context.expand(&action.name) {
            if !iris.contains(&iri.to_string()) {
                iris.push(iri.to_string());
            }
        }
    }
    iris
}

/// Adds a domain file to the repository, copying it under the root and
/// updating the index atomically.
pub fn repo_add(root: &Path, file: &Path) -> Result<RepoIndex, RepoError> {
    fs::create_dir_all(root)?;
    let _lock = RepoLock::acquire(root)?;

    let text = fs::read_to_string(file)?;
    let doc = parse_document(&text)?;
    if !doc.is_domain() {
        return Err(RepoError::WrongKind(file.to_path_buf()));
    }
    let iris = domain_iris(&doc);
    if iris.is_empty() {
        return Err(RepoError::NoIriBinding(doc.name.to_string()));
    }

    let mut index = load_index(root)?;
    for iri in &iris {
        if index.entries.contains_key(iri) {
            return Err(RepoError::DuplicateIri(iri.clone()));
        }
    }

    let file_name = file
        .file_name()
        .ok_or_else(|| RepoError::Io(std::io::Error::other("source has no file name")))?;
    let target = root.join(file_name);
    if fs::canonicalize(file).ok() != fs::canonicalize(&target).ok() {
        let tmp = root.join(format!("{}.tmp", file_name.to_string_lossy()));
        fs::write(&tmp, &text)?;
        fs::rename(&tmp, &target)?;
    }
    let rel = file_name.to_string_lossy().to_string();
    for iri in iris {
        index.entries.insert(iri, rel.clone());
    }
    write_index(&index)?;
    Ok(index)
}

/// Fetches and parses the domain indexed under `iri`, if any.
pub fn repo_lookup(root: &Path, iri: &str) -> Result<Option<PddlsDocument>, RepoError> {
    let index = load_index(root)?;
    let Some(rel) = index.path_for(iri) else {
        return Ok(None);
    };
    let text = fs::read_to_string(index.root.join(rel))?;
    Ok(Some(parse_document(&text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOMAIN: &str = include_str!("../../../fixtures/example-ur5-domain.pddls");
    const PROBLEM: &str = include_str!("../../../fixtures/example-problem.pddls");

    fn setup(dir: &Path) -> PathBuf {
        let file = dir.join("example-ur5-domain.pddls");
        fs::write(&file, DOMAIN).unwrap();
        file
    }

    #[test]
    fn add_indexes_action_iris() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("repo");
        let file = setup(tmp.path());
        let index = repo_add(&root, &file).unwrap();
        assert_eq!(index.path_for("uri:ex/action/pick-n-insert"), Some("example-ur5-domain.pddls"));
        // Only the pick-n-insert action is indexed: the domain name itself
        // has no binding and predicate bindings are not index keys.
        assert_eq!(index.len(), 1);
        assert!(root.join("index.tsv").exists());
    }

    #[test]
    fn add_twice_is_a_duplicate() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("repo");
        let file = setup(tmp.path());
        repo_add(&root, &file).unwrap();
        let err = repo_add(&root, &file).unwrap_err();
        assert!(matches!(err, RepoError::DuplicateIri(iri) if iri == "uri:ex/action/pick-n-insert"));
    }

    #[test]
    fn adding_a_problem_is_wrong_kind() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("repo");
        let file = tmp.path().join("p.pddls");
        fs::write(&file, PROBLEM).unwrap();
        let err = repo_add(&root, &file).unwrap_err();
        assert!(matches!(err, RepoError::WrongKind(_)));
    }

    #[test]
    fn lookup_round_trips_the_domain() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("repo");
        let file = setup(tmp.path());
        repo_add(&root, &file).unwrap();
        let doc = repo_lookup(&root, "uri:ex/action/pick-n-insert").unwrap().unwrap();
        assert_eq!(doc, parse_document(DOMAIN).unwrap());
        assert!(repo_lookup(&root, "uri:ex/action/unknown").unwrap().is_none());
    }

    #[test]
    fn corrupted_index_reports_recovery_hint() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("repo");
        fs::create_dir_all(&root).unwrap();
        fs::write(root.join("index.tsv"), "not an index\n").unwrap();
        let err = load_index(&root).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("re-add"), "{msg}");
    }

    #[test]
    fn stale_lock_blocks_writers() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("repo");
        fs::create_dir_all(&root).unwrap();
        fs::write(root.join(".repo.lock"), "").unwrap();
        let file = setup(tmp.path());
        let err = repo_add(&root, &file).unwrap_err();
        assert!(matches!(err, RepoError::Locked(_)));
    }

    #[test]
    fn no_binding_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("repo");
        let file = tmp.path().join("d.pddls");
        fs::write(&file, "(define (domain bare))").unwrap();
        let err = repo_add(&root, &file).unwrap_err();
        assert!(matches!(err, RepoError::NoIriBinding(_)));
    }
}

//! Single-writer project state with atomically swapped snapshots.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use corrpanel_core::io::{self, IoError};
use corrpanel_core::project::{Project, ProjectError};

/// File name of the persisted project inside the data directory.
pub const PROJECT_FILE: &str = "project.json";

/// An immutable view of the project at one revision.
#[derive(Debug)]
pub struct Snapshot {
    pub revision: u64,
    pub project: Project,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("revision {expected} is stale; current revision is {current}")]
    StaleRevision { expected: u64, current: u64 },
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error("cannot persist project: {0}")]
    Persist(#[from] std::io::Error),
}

#[derive(Debug)]
pub struct Store {
    current: RwLock<Arc<Snapshot>>,
    writer: Mutex<()>,
    data_dir: Option<PathBuf>,
}

impl Store {
    /// An in-memory store; nothing is written to disk.
    pub fn new(project: Project) -> Self {
        Self::with_data_dir(project, None)
    }

    fn with_data_dir(project: Project, data_dir: Option<PathBuf>) -> Self {
        Self {
            current: RwLock::new(Arc::new(Snapshot { revision: 0, project })),
            writer: Mutex::new(()),
            data_dir,
        }
    }

    /// Opens `data_dir/project.json`, or starts from `fallback` when the
    /// file does not exist yet. Load warnings are returned alongside.
    pub fn open(
        data_dir: &Path,
        fallback: impl FnOnce() -> Result<Project, IoError>,
    ) -> Result<(Self, Vec<String>), OpenError> {
        std::fs::create_dir_all(data_dir)?;
        let path = data_dir.join(PROJECT_FILE);
        let (project, warnings) = match std::fs::read(&path) {
            Ok(bytes) => {
                let loaded = io::load_project(&bytes)?;
                (loaded.project, loaded.warnings.iter().map(ToString::to_string).collect())
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => (fallback()?, Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let store = Self::with_data_dir(project, Some(data_dir.to_path_buf()));
        store.persist(&store.snapshot().project)?;
        Ok((store, warnings))
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Applies `f` to a copy of the current project. On success the copy is
    /// persisted and published with the next revision; on failure nothing
    /// changes. `expected` rejects the call when another mutation landed
    /// since the caller's read.
    pub fn mutate<T>(
        &self,
        expected: Option<u64>,
        f: impl FnOnce(&mut Project) -> Result<T, ProjectError>,
    ) -> Result<(Arc<Snapshot>, T), StoreError> {
        let _writer = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let current = self.snapshot();
        if let Some(expected) = expected {
            if expected != current.revision {
                return Err(StoreError::StaleRevision {
                    expected,
                    current: current.revision,
                });
            }
        }
        let mut project = current.project.clone();
        let out = f(&mut project)?;
        self.persist(&project)?;
        let next = Arc::new(Snapshot {
            revision: current.revision + 1,
            project,
        });
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = next.clone();
        Ok((next, out))
    }

    fn persist(&self, project: &Project) -> std::io::Result<()> {
        let Some(dir) = &self.data_dir else {
            return Ok(());
        };
        // write-then-rename so a crash never leaves a truncated file
        let tmp = dir.join(format!("{PROJECT_FILE}.tmp"));
        std::fs::write(&tmp, io::save_project(project))?;
        std::fs::rename(&tmp, dir.join(PROJECT_FILE))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OpenError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Load(#[from] IoError),
}

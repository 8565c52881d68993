//! The `build-panel` and `validate` commands, independent of argument
//! parsing so they can be driven from tests.

use std::path::Path;

use corrpanel_core::io::{self, IoError};
use corrpanel_core::model::{validate_dataset, CorrelationId, Finding, LogId};
use corrpanel_core::project::{Project, ProjectError};

/// A failed command: the diagnostic and the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, unparsable or unwritable files.
    #[error("{0}")]
    Io(String),
    /// Ids on the command line that the project does not contain.
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_error(path: &Path, e: IoError) -> CliError {
    let detail = match e {
        IoError::Validation(findings) => findings.iter().map(|f| format!("\n  {f}")).collect(),
        other => format!(" {other}"),
    };
    CliError::Io(format!("{}:{detail}", path.display()))
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    pub level: Option<CorrelationId>,
    pub order: Option<Vec<LogId>>,
}

/// Outcome of `build-panel`: the rendered panel and load warnings.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub svg: String,
    pub summary: String,
    pub warnings: Vec<Finding>,
}

/// Loads a project, applies leveling and order, and renders the panel.
pub fn build_panel(bytes: &[u8], options: &BuildOptions) -> Result<BuildOutput, BuildError> {
    let loaded = io::load_project(bytes).map_err(BuildError::Load)?;
    let mut project = loaded.project;
    if let Some(level) = &options.level {
        project.set_leveling(Some(level.clone())).map_err(BuildError::Project)?;
    }
    if let Some(order) = &options.order {
        project.set_log_order(order).map_err(BuildError::Project)?;
    }
    let svg = project.render_svg().map_err(BuildError::Project)?;
    Ok(BuildOutput {
        svg,
        summary: summary(&project),
        warnings: loaded.warnings,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Load(IoError),
    #[error(transparent)]
    Project(ProjectError),
}

pub fn summary(project: &Project) -> String {
    format!(
        "{} logs, {} contacts, {} correlations",
        project.logs.len(),
        project.dataset.contacts.len(),
        project.panel.correlations.len()
    )
}

/// `build-panel`: reads `input`, writes the SVG to `output` and returns
/// the summary line.
pub fn build_panel_file(input: &Path, output: &Path, options: &BuildOptions) -> Result<BuildOutput, CliError> {
    let bytes = read(input)?;
    let out = build_panel(&bytes, options).map_err(|e| match e {
        BuildError::Load(e) => load_error(input, e),
        BuildError::Project(e) => CliError::Usage(e.to_string()),
    })?;
    std::fs::write(output, &out.svg).map_err(|e| CliError::Io(format!("{}: {e}", output.display())))?;
    Ok(out)
}

/// `validate`: every finding for the dataset at `path`; empty means clean.
pub fn validate_file(path: &Path) -> Result<Vec<Finding>, CliError> {
    let bytes = read(path)?;
    match io::load_dataset(&bytes) {
        Ok(dataset) => Ok(validate_dataset(&dataset)),
        Err(IoError::Validation(findings)) => Ok(findings),
        Err(e) => Err(load_error(path, e)),
    }
}

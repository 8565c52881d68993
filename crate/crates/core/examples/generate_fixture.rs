//! Writes the synthetic four-outcrop campaign as a dataset file and a
//! fully interpreted project file.
//!
//! ```text
//! cargo run -p corrpanel-core --example generate_fixture -- [out-dir]
//! ```

use std::path::PathBuf;

use corrpanel_core::{fixture, io};

fn main() -> std::io::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    std::fs::create_dir_all(&dir)?;

    let project = fixture::canyon_project();
    std::fs::write(dir.join("canyon-dataset.json"), io::save_dataset(&project.dataset))?;
    std::fs::write(dir.join("canyon-project.json"), io::save_project(&project))?;

    let leaves: usize = project.logs.iter().map(|l| l.tree.leaf_count()).sum();
    println!(
        "{} logs, {} contacts, {} strata, {} cross beds, {} correlations -> {}",
        project.logs.len(),
        project.dataset.contacts.len(),
        leaves,
        project.dataset.crossbeds.len(),
        project.panel.correlations.len(),
        dir.display()
    );
    Ok(())
}

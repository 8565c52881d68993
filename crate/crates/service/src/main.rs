use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use corrpanel_core::io;
use corrpanel_core::model::{CorrelationId, LogId};
use corrpanel_core::project::Project;
use corrpanel_service::cli::{self, BuildOptions};
use corrpanel_service::store::Store;

#[derive(Parser)]
#[command(name = "corrpanel", version, about = "Stratigraphic correlation panels from outcrop interpretations")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a project file as an SVG correlation panel.
    BuildPanel {
        project: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Level all logs to this correlation.
        #[arg(long)]
        level: Option<String>,
        /// Comma-separated log ids, left to right.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
    },
    /// Check a dataset file; exits 0 only when there are no findings.
    Validate { dataset: PathBuf },
    /// Serve the HTTP API and the browser UI.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory holding project.json; created if missing.
        #[arg(long)]
        data_dir: PathBuf,
        /// Dataset to start a new project from when the data directory is empty.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::BuildPanel {
            project,
            output,
            level,
            order,
        } => {
            let options = BuildOptions {
                level: level.map(CorrelationId::new),
                order: order.map(|o| o.into_iter().map(LogId::new).collect()),
            };
            match cli::build_panel_file(&project, &output, &options) {
                Ok(out) => {
                    for w in &out.warnings {
                        eprintln!("warning: {w}");
                    }
                    println!("{}", out.summary);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Validate { dataset } => match cli::validate_file(&dataset) {
            Ok(findings) if findings.is_empty() => {
                println!("{}: clean", dataset.display());
                ExitCode::SUCCESS
            }
            Ok(findings) => {
                for f in &findings {
                    println!("{:?}: {f}", f.severity);
                }
                ExitCode::FAILURE
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Command::Serve {
            port,
            data_dir,
            dataset,
        } => match serve(port, data_dir, dataset) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
    }
}

#[tokio::main]
async fn serve(port: u16, data_dir: PathBuf, dataset: Option<PathBuf>) -> anyhow::Result<()> {
    tracing_subscriber::fmt::init();
    let (store, warnings) = Store::open(&data_dir, || {
        let Some(path) = &dataset else {
            return Ok(Project::new(Default::default()));
        };
        let bytes = std::fs::read(path).map_err(|e| io::IoError::Parse(format!("{}: {e}", path.display())))?;
        Ok(Project::new(io::load_dataset(&bytes)?))
    })
    .with_context(|| format!("opening {}", data_dir.display()))?;
    for w in warnings {
        tracing::warn!("{w}");
    }

    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, corrpanel_service::router(Arc::new(store)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

//! Renders the fixture campaign as a correlation panel, optionally leveled
//! to the correlation joining the top contacts.
//!
//! ```text
//! cargo run -p corrpanel-core --example export_svg -- [out.svg] [--level]
//! ```

use corrpanel_core::fixture;
use corrpanel_core::model::CorrelationId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let level = args.iter().any(|a| a == "--level");
    let out = args
        .iter()
        .find(|a| !a.starts_with("--"))
        .cloned()
        .unwrap_or_else(|| "panel.svg".to_owned());

    let mut project = fixture::canyon_project();
    if level {
        project.set_leveling(Some(CorrelationId::new(fixture::TOP_CORRELATION)))?;
    }
    let svg = project.render_svg()?;
    std::fs::write(&out, &svg)?;
    println!("{} bytes -> {out}", svg.len());
    Ok(())
}

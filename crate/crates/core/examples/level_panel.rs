//! Levels the fixture panel to its top correlation and shows how log
//! offsets change; then reorders the logs and prints the new rulers.
//!
//! ```text
//! cargo run -p corrpanel-core --example level_panel
//! ```

use corrpanel_core::fixture::{canyon_project, TOP_CORRELATION};
use corrpanel_core::model::{CorrelationId, LogId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut project = canyon_project();
    let before = project.offsets()?;
    project.set_leveling(Some(CorrelationId::new(TOP_CORRELATION)))?;
    let after = project.offsets()?;
    println!("{:<8} {:>14} {:>14}", "log", "anchored px", "leveled px");
    for id in &project.panel.log_order {
        println!("{:<8} {:>14.2} {:>14.2}", id, before[id], after[id]);
    }

    let layout = project.layout()?;
    for path in &layout.correlations {
        for s in &path.segments {
            println!(
                "{} {} -> {}: y {:.3} -> {:.3} ({:?}{})",
                path.correlation_id,
                s.left_log,
                s.right_log,
                s.start[1],
                s.end[1],
                s.shape,
                if s.dashed { ", dashed" } else { "" }
            );
        }
    }

    let order: Vec<LogId> = ["log-3", "log-1", "log-4", "log-2"].into_iter().map(Into::into).collect();
    project.set_log_order(&order)?;
    for ruler in &project.layout()?.rulers {
        println!("ruler {} | {}: {:.0} m", ruler.left_log, ruler.right_log, ruler.distance_m);
    }
    Ok(())
}

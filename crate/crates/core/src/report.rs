//! Report emission: the `group,metric,system,value` CSV and the plain-text
//! comparison tables (one per metric, groups down the rows, systems across
//! the columns).

use std::fmt::Write as _;

use crate::event::GeneratorTag;
use crate::metrics::{round3, HmcuReport};

pub const CSV_HEADER: &str = "group,metric,system,value";

fn fmt3(value: f64) -> String {
    format!("{:.3}", round3(value))
}

/// Render all systems' reports as CSV. Per-group rows come first, then an
/// `average` row per system and metric.
pub fn render_csv(reports: &[(GeneratorTag, &HmcuReport)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_HEADER}");
    for (system, report) in reports {
        for group in &report.groups {
            let _ = writeln!(
                out,
                "{},context_logic,{},{}",
                group.group_id,
                system.name(),
                fmt3(group.context_logic.mean())
            );
            let _ = writeln!(
                out,
                "{},machine_style,{},{}",
                group.group_id,
                system.name(),
                fmt3(group.machine_style.mean())
            );
        }
    }
    for (system, report) in reports {
        let _ = writeln!(
            out,
            "average,context_logic,{},{}",
            system.name(),
            fmt3(report.avg_context_logic)
        );
        let _ = writeln!(
            out,
            "average,machine_style,{},{}",
            system.name(),
            fmt3(report.avg_machine_style)
        );
    }
    out
}

fn render_metric_table(
    out: &mut String,
    title: &str,
    reports: &[(GeneratorTag, &HmcuReport)],
    group_mean: impl Fn(&HmcuReport, usize) -> Option<f64>,
    average: impl Fn(&HmcuReport) -> f64,
) {
    let _ = writeln!(out, "{title}");
    let mut header = format!("{:<10}", "group");
    for (system, _) in reports {
        let _ = write!(header, "{:>10}", system.name());
    }
    let _ = writeln!(out, "{header}");
    let group_count = reports
        .iter()
        .map(|(_, r)| r.groups.len())
        .max()
        .unwrap_or(0);
    for i in 0..group_count {
        let _ = write!(out, "{:<10}", i + 1);
        for (_, report) in reports {
            match group_mean(report, i) {
                Some(mean) => {
                    let _ = write!(out, "{:>10}", fmt3(mean));
                }
                None => {
                    let _ = write!(out, "{:>10}", "-");
                }
            }
        }
        let _ = writeln!(out);
    }
    let _ = write!(out, "{:<10}", "average");
    for (_, report) in reports {
        let _ = write!(out, "{:>10}", fmt3(average(report)));
    }
    let _ = writeln!(out);
}

/// Plain-text comparison: one table per metric plus the quadrant line for
/// each system.
pub fn render_comparison(reports: &[(GeneratorTag, &HmcuReport)]) -> String {
    let mut out = String::new();
    render_metric_table(
        &mut out,
        "Contextual logic similarity",
        reports,
        |report, i| report.groups.get(i).map(|g| g.context_logic.mean()),
        |report| report.avg_context_logic,
    );
    let _ = writeln!(out);
    render_metric_table(
        &mut out,
        "Machine writing style similarity",
        reports,
        |report, i| report.groups.get(i).map(|g| g.machine_style.mean()),
        |report| report.avg_machine_style,
    );
    let _ = writeln!(out);
    for (system, report) in reports {
        let _ = writeln!(
            out,
            "{}: {} (machine style {}, context logic {})",
            system.name(),
            report.label,
            fmt3(report.scores.machine_style()),
            fmt3(report.scores.controllable_logic()),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{aggregate, GroupReport, Thresholds};

    fn report(means: &[f64]) -> HmcuReport {
        let groups = means
            .iter()
            .enumerate()
            .map(|(i, &m)| GroupReport::new(i + 1, vec![m], vec![m]))
            .collect();
        aggregate(groups, Thresholds::default())
    }

    #[test]
    fn csv_has_header_group_rows_and_averages() {
        let rule = report(&[0.553, 0.709]);
        let csv = render_csv(&[(GeneratorTag::Rule, &rule)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "1,context_logic,rule,0.553");
        assert_eq!(lines[2], "1,machine_style,rule,0.553");
        assert!(lines.contains(&"average,context_logic,rule,0.631"));
    }

    #[test]
    fn comparison_table_shows_all_systems() {
        let rule = report(&[0.5]);
        let baseline = report(&[0.1]);
        let text = render_comparison(&[
            (GeneratorTag::Rule, &rule),
            (GeneratorTag::Baseline, &baseline),
        ]);
        assert!(text.contains("Contextual logic similarity"));
        assert!(text.contains("Machine writing style similarity"));
        assert!(text.contains("rule"));
        assert!(text.contains("baseline"));
        assert!(text.contains("average"));
    }
}

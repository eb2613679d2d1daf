use std::fmt::Write;

use super::aggregate::MetricReport;
use super::perturb::StudyTable;

const HEADER: [&str; 12] = [
    "Model",
    "SceneC",
    "HSD",
    "Dyn",
    "nDTW",
    "Motion Sum",
    "Diversity",
    "BLEU",
    "CLIP",
    "Logics",
    "Semantics Sum",
    "Overall",
];

fn cells(report: &MetricReport) -> Vec<Vec<String>> {
    report
        .models
        .iter()
        .map(|r| {
            let mut row = vec![r.model_id.clone()];
            row.extend(
                [
                    r.scene_c,
                    r.hsd,
                    r.dyn_,
                    r.ndtw,
                    r.motion_sum,
                    r.diversity,
                    r.bleu,
                    r.clip,
                    r.logics,
                    r.semantics_sum,
                    r.overall,
                ]
                .iter()
                .map(|v| format!("{v:.4}")),
            );
            row
        })
        .collect()
}

/// Markdown table, one row per model, four decimals.
pub fn report_markdown(report: &MetricReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", HEADER.join(" | "));
    let _ = writeln!(out, "|{}", ":---|".to_string() + &"---:|".repeat(HEADER.len() - 1));
    for row in cells(report) {
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    if !report.warnings.is_empty() {
        out.push('\n');
        for w in &report.warnings {
            let _ = writeln!(out, "> warning: {w}");
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn report_csv(report: &MetricReport) -> String {
    let mut out = String::new();
    let header: Vec<String> = HEADER.iter().map(|h| h.to_lowercase().replace(' ', "_")).collect();
    let _ = writeln!(out, "{}", header.join(","));
    for row in cells(report) {
        let row: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn report_json(report: &MetricReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialises");
    s.push('\n');
    s
}

pub fn study_csv(table: &StudyTable) -> String {
    let mut out = String::from(
        "perturbation,hsd_change,ndtw_change,dyn_change,max_abs_hausdorff_delta,\
         mean_hsd_before,mean_hsd_after,mean_ndtw_before,mean_ndtw_after,mean_dyn_before,mean_dyn_after\n",
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.name),
            r.hsd_change,
            r.ndtw_change,
            r.dyn_change,
            r.max_abs_hausdorff_delta,
            r.mean_hsd_before,
            r.mean_hsd_after,
            r.mean_ndtw_before,
            r.mean_ndtw_after,
            r.mean_dyn_before,
            r.mean_dyn_after
        );
    }
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Grouped bar chart of mean relative change (percent) per perturbation.
pub fn study_svg(table: &StudyTable) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const PAD: f64 = 48.0;
    const COLORS: [(&str, &str); 3] = [("HSD", "#4c72b0"), ("nDTW", "#dd8452"), ("Dyn", "#55a868")];

    // changes are clamped to ±100% for display; the csv carries exact values
    let vals: Vec<[f64; 3]> = table
        .rows
        .iter()
        .map(|r| [r.hsd_change, r.ndtw_change, r.dyn_change].map(|v| (100.0 * v).clamp(-100.0, 100.0)))
        .collect();
    let zero_y = H / 2.0;
    let scale = (H / 2.0 - PAD) / 100.0;
    let groups = vals.len().max(1) as f64;
    let group_w = (W - 2.0 * PAD) / groups;
    let bar_w = group_w / 4.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    for pct in [-100.0, -50.0, 0.0, 50.0, 100.0] {
        let y = zero_y - pct * scale;
        let _ = writeln!(
            s,
            r##"<line x1="{PAD}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ccc"/><text x="{:.1}" y="{:.1}" text-anchor="end">{pct}%</text>"##,
            W - PAD,
            PAD - 4.0,
            y + 4.0
        );
    }
    for (g, (row, v)) in table.rows.iter().zip(&vals).enumerate() {
        let x0 = PAD + g as f64 * group_w + bar_w / 2.0;
        for (k, (_, color)) in COLORS.iter().enumerate() {
            let h = v[k] * scale;
            let (y, hh) = if h >= 0.0 { (zero_y - h, h) } else { (zero_y, -h) };
            let _ = writeln!(
                s,
                r#"<rect x="{:.1}" y="{y:.1}" width="{bar_w:.1}" height="{hh:.1}" fill="{color}"/>"#,
                x0 + k as f64 * bar_w
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x0 + 1.5 * bar_w,
            H - PAD / 2.0,
            xml_escape(&row.name)
        );
    }
    for (k, (name, color)) in COLORS.iter().enumerate() {
        let x = PAD + k as f64 * 70.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="12" width="10" height="10" fill="{color}"/><text x="{:.1}" y="21">{name}</text>"#,
            x + 14.0
        );
    }
    s.push_str("</svg>\n");
    s
}

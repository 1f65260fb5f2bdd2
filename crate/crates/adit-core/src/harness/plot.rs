//! Minimal SVG line charts of ratio vs k, one chart per restriction count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::Result;

use super::config::PolicyChoice;
use super::runner::BenchmarkRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 56.0;

const COLORS: [&str; 7] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#17becf",
];

fn color_for(policy: PolicyChoice) -> &'static str {
    let idx = PolicyChoice::ALL.iter().position(|p| *p == policy).unwrap();
    COLORS[idx]
}

/// Renders one chart: ratio_qat (y) against k (x), one polyline per policy.
pub fn render_ratio_chart(rows: &[BenchmarkRow], title: &str) -> String {
    let mut by_policy: BTreeMap<&'static str, Vec<(usize, f64, PolicyChoice)>> = BTreeMap::new();
    for row in rows {
        by_policy
            .entry(row.policy.name())
            .or_default()
            .push((row.k, row.ratio_qat, row.policy));
    }
    for series in by_policy.values_mut() {
        series.sort_by_key(|(k, _, _)| *k);
    }

    let k_max = rows.iter().map(|r| r.k).max().unwrap_or(1) as f64;
    let y_max = rows
        .iter()
        .map(|r| r.ratio_qat)
        .fold(1.0_f64, f64::max)
        .max(1e-9);

    let x = |k: f64| MARGIN + (k / k_max) * (WIDTH - 2.0 * MARGIN);
    let y = |v: f64| HEIGHT - MARGIN - (v / y_max) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">k</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">Ratio_QAT</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));
    // reference line at ratio 1
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{v}\" x2=\"{}\" y2=\"{v}\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>\n",
        MARGIN,
        WIDTH - MARGIN,
        v = y(1.0)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">0</text>\n<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{k_max}</text>\n<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{y_max:.2}</text>\n",
        MARGIN - 8.0,
        HEIGHT - MARGIN + 14.0,
        WIDTH - MARGIN - 8.0,
        HEIGHT - MARGIN + 14.0,
        MARGIN - 40.0,
        MARGIN + 4.0,
    ));

    let mut legend_y = MARGIN + 6.0;
    for (name, series) in &by_policy {
        let color = color_for(series[0].2);
        let points: Vec<String> = series
            .iter()
            .map(|(k, v, _)| format!("{:.2},{:.2}", x(*k as f64), y(*v)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            color,
            points.join(" ")
        ));
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            WIDTH - MARGIN - 130.0,
            legend_y - 9.0,
            color,
            WIDTH - MARGIN - 115.0,
            legend_y,
            name
        ));
        legend_y += 16.0;
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes one SVG per restriction count next to the CSV output path.
pub fn write_svg_plots(rows: &[BenchmarkRow], csv_path: &Path) -> Result<Vec<PathBuf>> {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bench".to_string());
    let dir = csv_path.parent().unwrap_or_else(|| Path::new("."));
    let mut restriction_counts: Vec<usize> = rows.iter().map(|r| r.restrictions).collect();
    restriction_counts.sort_unstable();
    restriction_counts.dedup();

    let mut written = Vec::new();
    for rc in restriction_counts {
        let group: Vec<BenchmarkRow> = rows
            .iter()
            .filter(|r| r.restrictions == rc)
            .cloned()
            .collect();
        let peers = group.first().map(|r| r.peers).unwrap_or(0);
        let title = format!("Ratio_QAT vs k ({peers} peers, {rc} restrictions)");
        let svg = render_ratio_chart(&group, &title);
        let path = dir.join(format!("{stem}_r{rc}_qat.svg"));
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: usize, policy: PolicyChoice, ratio: f64) -> BenchmarkRow {
        BenchmarkRow {
            seed: 1,
            peers: 10,
            k,
            restrictions: 4,
            policy,
            iterations: 1,
            messages: 1,
            objects_moved: 1,
            se_seconds: 1.0,
            qat_seconds: 1.0,
            ratio_se: ratio,
            ratio_qat: ratio,
            short_result: false,
        }
    }

    #[test]
    fn renders_a_polyline_per_policy() {
        let rows = vec![
            row(1, PolicyChoice::Fixed1, 2.0),
            row(10, PolicyChoice::Fixed1, 3.0),
            row(1, PolicyChoice::Enhanced, 1.0),
            row(10, PolicyChoice::Enhanced, 1.0),
        ];
        let svg = render_ratio_chart(&rows, "test");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("fixed1"));
        assert!(svg.contains("enhanced"));
    }
}

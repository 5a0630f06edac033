//! Critical-difference diagrams as SVG.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

fn rank_order(ranks: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ranks.len()).collect();
    order.sort_by(|&a, &b| ranks[a].total_cmp(&ranks[b]).then(a.cmp(&b)));
    order
}

/// Groups of treatments whose average ranks lie within `cd` of each other.
///
/// Treatments are sorted by rank; each one opens the widest interval that
/// stays within `cd`, and intervals contained in an earlier one are dropped.
/// Groups hold original indices, best rank first; singletons are omitted.
pub fn cd_cliques(ranks: &[f64], cd: f64) -> Vec<Vec<usize>> {
    let order = rank_order(ranks);
    let mut groups = Vec::new();
    let mut last_end = 0;
    for i in 0..order.len() {
        let mut j = i;
        while j + 1 < order.len() && ranks[order[j + 1]] - ranks[order[i]] <= cd {
            j += 1;
        }
        if j > i && (groups.is_empty() || j > last_end) {
            groups.push(order[i..=j].to_vec());
            last_end = j;
        }
    }
    groups
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Standard CD diagram: rank axis (best on the left), one labelled marker
/// per treatment, a CD scale bar and one thick bar per clique.
pub fn render_cd_svg(names: &[String], ranks: &[f64], cd: f64, title: &str) -> String {
    let k = ranks.len().max(2);
    let width = 640.0;
    let (left, right) = (130.0, width - 130.0);
    let axis_y = 70.0;
    let x_of = |r: f64| left + (r - 1.0) / (k as f64 - 1.0) * (right - left);
    let order = rank_order(ranks);
    let half = order.len().div_ceil(2);
    let groups = cd_cliques(ranks, cd);
    let label_top = axis_y + 30.0 + 12.0 * groups.len() as f64;
    let height = label_top + 22.0 * half as f64 + 20.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="16" text-anchor="middle" font-size="13">{}</text>"#, width / 2.0, esc(title));

    // CD scale bar
    let (c0, c1) = (x_of(1.0), x_of(1.0 + cd));
    let _ = writeln!(s, r#"<line x1="{c0:.2}" y1="34" x2="{c1:.2}" y2="34" stroke="black" stroke-width="1.5"/>"#);
    for cx in [c0, c1] {
        let _ = writeln!(s, r#"<line x1="{cx:.2}" y1="30" x2="{cx:.2}" y2="38" stroke="black"/>"#);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="28" text-anchor="middle">CD = {cd:.4}</text>"#, (c0 + c1) / 2.0);

    // axis
    let _ = writeln!(
        s,
        r#"<line x1="{left:.2}" y1="{axis_y:.2}" x2="{right:.2}" y2="{axis_y:.2}" stroke="black"/>"#
    );
    for r in 1..=k {
        let x = x_of(r as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{axis_y:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            axis_y - 6.0
        );
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{r}</text>"#, axis_y - 9.0);
    }

    // treatments: better half labelled on the left, the rest on the right
    for (pos, &t) in order.iter().enumerate() {
        let x = x_of(ranks[t]);
        let (row, on_left) = if pos < half { (pos, true) } else { (order.len() - 1 - pos, false) };
        let y = label_top + 22.0 * row as f64;
        let (end, anchor, tx) = if on_left { (left - 10.0, "end", left - 14.0) } else { (right + 10.0, "start", right + 14.0) };
        let _ = writeln!(
            s,
            r#"<polyline points="{x:.2},{axis_y:.2} {x:.2},{y:.2} {end:.2},{y:.2}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{tx:.2}" y="{:.2}" text-anchor="{anchor}">{} ({:.2})</text>"#,
            y + 4.0,
            esc(&names[t]),
            ranks[t]
        );
    }

    // cliques
    for (g, members) in groups.iter().enumerate() {
        let y = axis_y + 18.0 + 12.0 * g as f64;
        let x0 = x_of(ranks[members[0]]) - 4.0;
        let x1 = x_of(ranks[*members.last().expect("non-empty group")]) + 4.0;
        let _ = writeln!(
            s,
            r#"<line class="clique" x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="black" stroke-width="4"/>"#
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes [`render_cd_svg`] output to `path`. Needs 2 to 10 treatments.
pub fn emit_cd_diagram(names: &[String], ranks: &[f64], cd: f64, title: &str, path: &Path) -> Result<()> {
    if !(2..=10).contains(&ranks.len()) || names.len() != ranks.len() {
        return Err(Error::invalid(format!(
            "CD diagram needs 2 to 10 named treatments, got {} ranks and {} names",
            ranks.len(),
            names.len()
        )));
    }
    std::fs::write(path, render_cd_svg(names, ranks, cd, title)).map_err(|e| Error::io(path, e))
}

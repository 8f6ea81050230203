//! Text renderings of pipeline results: JSON, CSV, Markdown tables and an
//! SVG scatter plot.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{GroupSummary, LoessFit, SummaryNotes};
use crate::metrics::BiasRow;
use crate::scalar::Scalar;
use crate::store::Dominance;

pub const SUMMARY_CSV_HEADER: &str = "group,n,delta_min,delta_max,delta_mean,delta_stderr,alpha_min,alpha_max,alpha_mean,alpha_stderr,alpha_undefined_count";

pub fn to_json<S: Serialize + ?Sized>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

fn opt<T: Scalar>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One line per group. Standard errors use the sample standard deviation.
pub fn summary_csv<T: Scalar>(summaries: &[GroupSummary<T>]) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.group,
            s.n,
            s.delta_min,
            s.delta_max,
            s.delta_mean,
            opt(s.delta_stderr),
            opt(s.alpha_min),
            opt(s.alpha_max),
            opt(s.alpha_mean),
            opt(s.alpha_stderr),
            s.alpha_undefined_count
        );
    }
    out
}

pub fn rows_csv<T: Scalar>(rows: &[BiasRow<T>]) -> String {
    let mut out = String::from("concept,keyword,category,dominance,mcas,delta,alpha,alpha_defined\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.concept,
            r.label(),
            r.category.label().to_lowercase(),
            r.dominance.as_str(),
            r.mcas,
            r.delta,
            opt(r.alpha),
            r.alpha_defined
        );
    }
    out
}

pub fn curve_csv<T: Scalar>(fit: &LoessFit<T>) -> String {
    let mut out = String::from("x,y_hat\n");
    for (x, y) in &fit.fitted {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

/// Per-concept table with `*` (male-dominated) and `#` (female-dominated)
/// marks; the category label appears on the first row of each block.
pub fn rows_markdown<T: Scalar>(rows: &[BiasRow<T>]) -> String {
    let mut out = String::from("| Target Type | Target Keyword | MCAS | δ | α |\n|---|---|---:|---:|---:|\n");
    let mut last = None;
    for r in rows {
        let cat = if last == Some(r.category) { "" } else { r.category.label() };
        last = Some(r.category);
        let alpha = r.alpha.map_or("undefined".to_string(), |a| format!("{:.2}", a.to_f64_lossy()));
        let _ = writeln!(
            out,
            "| {cat} | {}{} | {:.2} | {:.2} | {alpha} |",
            r.label(),
            r.dominance.mark(),
            r.mcas.to_f64_lossy(),
            r.delta.to_f64_lossy(),
        );
    }
    out.push_str("\n\\* male-dominated, # female-dominated. δ: diffusion bias, α: bias amplification.\n");
    out
}

pub fn summary_markdown<T: Scalar>(summaries: &[GroupSummary<T>], notes: &SummaryNotes) -> String {
    let f2 = |v: T| format!("{:.2}", v.to_f64_lossy());
    let o2 = |v: Option<T>| v.map_or("n/a".to_string(), f2);
    let mut out = String::from(
        "| Category | n | δ min,max | Mean δ ± s.e. | α min,max | Mean α ± s.e. |\n|---|---:|---|---:|---|---:|\n",
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "| {} | {} | {},{} | {}±{} | {},{} | {}±{} |",
            s.group,
            s.n,
            f2(s.delta_min),
            f2(s.delta_max),
            f2(s.delta_mean),
            o2(s.delta_stderr),
            o2(s.alpha_min),
            o2(s.alpha_max),
            o2(s.alpha_mean),
            o2(s.alpha_stderr),
        );
    }
    out.push_str("\n## Notes\n\n");
    for line in notes.lines() {
        let _ = writeln!(out, "- {line}");
    }
    out
}

fn nice_step(range: f64, target_ticks: f64) -> f64 {
    let raw = range / target_ticks;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn axis_max(max: f64) -> (f64, f64) {
    let max = if max > 0.0 { max } else { 1.0 };
    let step = nice_step(max, 5.0);
    ((max / step).ceil() * step, step)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter of `(delta, alpha)` per row, coloured by dominance, with the
/// LOESS curve when one is given.
pub fn scatter_svg<T: Scalar>(rows: &[BiasRow<T>], fit: Option<&LoessFit<T>>, title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const L: f64 = 70.0;
    const R: f64 = 20.0;
    const TOP: f64 = 40.0;
    const B: f64 = 60.0;
    let pts: Vec<(f64, f64, &BiasRow<T>)> = rows
        .iter()
        .filter_map(|r| r.alpha.map(|a| (r.delta.to_f64_lossy(), a.to_f64_lossy(), r)))
        .collect();
    let curve: Vec<(f64, f64)> = fit
        .map(|f| f.fitted.iter().map(|&(x, y)| (x.to_f64_lossy(), y.to_f64_lossy())).collect())
        .unwrap_or_default();
    let xmax = pts.iter().map(|p| p.0).chain(curve.iter().map(|c| c.0)).fold(0.0, f64::max);
    let ymax = pts.iter().map(|p| p.1).chain(curve.iter().map(|c| c.1)).fold(0.0, f64::max);
    let (xmax, xstep) = axis_max(xmax);
    let (ymax, ystep) = axis_max(ymax);
    let sx = |x: f64| L + (x / xmax) * (W - L - R);
    let sy = |y: f64| H - B - (y.max(0.0) / ymax) * (H - TOP - B);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(s, r#"<line x1="{L}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - B, W - R, H - B);
    let _ = writeln!(s, r#"<line x1="{L}" y1="{TOP}" x2="{L}" y2="{}" stroke="black"/>"#, H - B);
    let nx = (xmax / xstep).round() as usize;
    for i in 0..=nx {
        let v = xstep * i as f64;
        let x = sx(v);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, H - B, H - B + 5.0, H - B + 20.0, tick_label(v, xstep));
    }
    let ny = (ymax / ystep).round() as usize;
    for i in 0..=ny {
        let v = ystep * i as f64;
        let y = sy(v);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{L}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, L - 5.0, L - 8.0, y + 4.0, tick_label(v, ystep));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">Diffusion Bias (δ)</text>"#, (L + W - R) / 2.0, H - 15.0);
    let _ = writeln!(s, r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">Bias Amplification (α)</text>"#, (TOP + H - B) / 2.0, (TOP + H - B) / 2.0);
    if !curve.is_empty() {
        let path: Vec<String> = curve.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r##"<polyline fill="none" stroke="#444" stroke-width="2" points="{}"/>"##, path.join(" "));
    }
    for (x, y, r) in &pts {
        let color = match r.dominance {
            Dominance::MaleDominated => "#1f77b4",
            Dominance::FemaleDominated => "#d62728",
        };
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"><title>{}</title></circle>"#, sx(*x), sy(*y), escape(r.label()));
    }
    let _ = writeln!(s, r##"<circle cx="{}" cy="{}" r="4" fill="#1f77b4"/><text x="{}" y="{}">male-dominated</text>"##, W - 160.0, TOP + 10.0, W - 150.0, TOP + 14.0);
    let _ = writeln!(s, r##"<circle cx="{}" cy="{}" r="4" fill="#d62728"/><text x="{}" y="{}">female-dominated</text>"##, W - 160.0, TOP + 28.0, W - 150.0, TOP + 32.0);
    s.push_str("</svg>\n");
    s
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{group_ratios, loess_fit, summarize_groups};
    use crate::store::Category;

    fn rows() -> Vec<BiasRow<f64>> {
        let mk = |c: &str, cat, d, delta, alpha: Option<f64>| BiasRow {
            concept: c.to_lowercase(),
            keyword: c.into(),
            category: cat,
            dominance: d,
            mcas: 0.05,
            delta,
            alpha_defined: alpha.is_some(),
            alpha,
        };
        use Category::*;
        use Dominance::*;
        vec![
            mk("CEO", Occupation, MaleDominated, 0.02, Some(1.84)),
            mk("Nurse", Occupation, FemaleDominated, 0.06, Some(5.48)),
            mk("Rugby", Sport, MaleDominated, 0.01, Some(1.94)),
            mk("Gymnastics", Sport, FemaleDominated, 0.05, None),
        ]
    }

    #[test]
    fn markdown_marks_and_blocks() {
        let md = rows_markdown(&rows());
        assert!(md.contains("| Occupation | CEO* | 0.05 | 0.02 | 1.84 |"));
        assert!(md.contains("|  | Nurse# |"));
        assert!(md.contains("| Sport | Rugby* |"));
        assert!(md.contains("undefined"));
        assert_eq!(md.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| Target")).count(), 4);
    }

    #[test]
    fn summary_csv_shape() {
        let s = summarize_groups(&rows()).unwrap();
        let csv = summary_csv(&s);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SUMMARY_CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 11));
        assert!(lines[2].ends_with(",1"));
        let notes = SummaryNotes {
            ratios: group_ratios(&s),
            alpha_undefined_rows: 1,
            reference_checks: vec![],
        };
        let md = summary_markdown(&s, &notes);
        assert!(md.contains("## Notes"));
        assert!(md.contains("undefined alpha"));
    }

    #[test]
    fn svg_is_well_formed() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64 * 0.01, 1.0 + i as f64)).collect();
        let fit = loess_fit(&pts, 1.0, 1).unwrap();
        let svg = scatter_svg(&rows(), Some(&fit), "a < b");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<title>").count(), 3);
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains("Diffusion Bias (δ)"));
    }

    #[test]
    fn ticks() {
        assert_eq!(axis_max(0.08), (0.08, 0.02));
        assert_eq!(axis_max(26.06).0, 30.0);
        assert_eq!(tick_label(0.04, 0.02), "0.04");
        assert_eq!(tick_label(10.0, 5.0), "10");
    }
}

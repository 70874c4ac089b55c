//! Grouped bar chart of real versus shuffled-label accuracy, written as a
//! standalone SVG document.
//!
//! One `<g class="model-group">` per model holds a `bar real` and a
//! `bar shuffled` rectangle; horizontal `baseline uniform` and
//! `baseline bayes` lines mark the uniform guesser and the Bayes ceiling.

use std::fmt::Write;

use crate::eval::EvaluationReport;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

// Smallest "nice" axis maximum (1, 2 or 5 times a power of ten) above v.
fn axis_max(v: f64) -> f64 {
    let v = v.max(1e-3) * 1.1;
    let mag = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&m| m >= v)
        .unwrap_or(10.0 * mag)
}

pub fn accuracy_chart_svg(report: &EvaluationReport) -> String {
    let b = &report.baselines;
    let top_value = report
        .models
        .iter()
        .flat_map(|m| [m.test_accuracy, m.shuffled_mean_accuracy])
        .chain([b.uniform_random_accuracy, b.bayes_accuracy])
        .fold(0.0, f64::max);
    let ymax = axis_max(top_value);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y = |v: f64| TOP + plot_h * (1.0 - v / ymax);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"  <text class="title" x="{}" y="24" text-anchor="middle" font-size="15">Held-out accuracy: real vs shuffled labels (p = {})</text>"#,
        LEFT + plot_w / 2.0,
        report.config.generation.signal_probability
    );

    // axis and ticks
    let _ = writeln!(s, r#"  <g class="axis">"#);
    let _ = writeln!(
        s,
        r##"    <line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}" stroke="#333"/>"##,
        TOP + plot_h
    );
    let _ = writeln!(
        s,
        r##"    <line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333"/>"##,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    for i in 0..=5 {
        let v = ymax * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"    <text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y(v) + 4.0,
            crate::fmt::format_g(v, 3)
        );
    }
    let _ = writeln!(
        s,
        r#"    <text x="18" y="{:.2}" transform="rotate(-90 18 {:.2})" text-anchor="middle">accuracy</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "  </g>");

    let slot = plot_w / report.models.len().max(1) as f64;
    let bar = (slot * 0.3).min(60.0);
    for (i, m) in report.models.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let _ = writeln!(s, r#"  <g class="model-group" data-model="{}">"#, m.kind);
        for (class, value, x, fill) in [
            ("bar real", m.test_accuracy, cx - bar - 2.0, "#3b6ea5"),
            ("bar shuffled", m.shuffled_mean_accuracy, cx + 2.0, "#b0b0b0"),
        ] {
            let _ = writeln!(
                s,
                r#"    <rect class="{class}" x="{x:.2}" y="{:.2}" width="{bar:.2}" height="{:.2}" fill="{fill}"><title>{}</title></rect>"#,
                y(value),
                (TOP + plot_h - y(value)).max(0.0),
                crate::fmt::format_g(value, 6)
            );
        }
        let _ = writeln!(
            s,
            r#"    <text x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 20.0,
            m.kind
        );
        let _ = writeln!(s, "  </g>");
    }

    for (class, value, colour, dash) in [
        ("baseline uniform", b.uniform_random_accuracy, "#c0392b", "6 4"),
        ("baseline bayes", b.bayes_accuracy, "#27ae60", "2 3"),
    ] {
        let _ = writeln!(
            s,
            r#"  <line class="{class}" x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2" stroke-dasharray="{dash}"/>"#,
            y(value),
            LEFT + plot_w,
            y(value)
        );
    }

    let lx = LEFT + plot_w + 15.0;
    let _ = writeln!(s, r#"  <g class="legend">"#);
    for (i, (label, colour, is_line)) in [
        ("real labels", "#3b6ea5", false),
        ("shuffled labels", "#b0b0b0", false),
        ("uniform baseline", "#c0392b", true),
        ("Bayes accuracy", "#27ae60", true),
    ]
    .iter()
    .enumerate()
    {
        let ly = TOP + 10.0 + 22.0 * i as f64;
        if *is_line {
            let _ = writeln!(
                s,
                r#"    <line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"/>"#,
                ly,
                lx + 14.0,
                ly
            );
        } else {
            let _ = writeln!(
                s,
                r#"    <rect x="{lx:.2}" y="{:.2}" width="14" height="10" fill="{colour}"/>"#,
                ly - 5.0
            );
        }
        let _ = writeln!(s, r#"    <text x="{:.2}" y="{:.2}">{label}</text>"#, lx + 20.0, ly + 4.0);
    }
    let _ = writeln!(s, "  </g>");
    s.push_str("</svg>\n");
    s
}

//! Minimal self-contained SVG rendering: a grouped bar chart for
//! accuracies and a square heatmap for channel correlation. All
//! coordinates and values are formatted with fixed precision so equal
//! inputs always produce byte-identical documents.

use std::fmt::Write;

/// One bar: a height in `[0, 1]` and a fill color. The color ties the
/// bar to its legend entry.
pub struct Bar {
    pub value: f64,
    pub color: &'static str,
}

/// A labeled cluster of bars.
pub struct BarGroup {
    pub label: String,
    pub bars: Vec<Bar>,
}

const BAR_WIDTH: f64 = 34.0;
const BAR_GAP: f64 = 8.0;
const GROUP_PAD: f64 = 26.0;
const PLOT_HEIGHT: f64 = 300.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_TOP: f64 = 56.0;
const MARGIN_BOTTOM: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;

fn px(value: f64) -> String {
    format!("{value:.1}")
}

/// Grouped bar chart over a fixed `[0, 1]` axis. `legend` pairs a key
/// with its color; bars reference legend keys.
pub fn bar_chart(title: &str, groups: &[BarGroup], legend: &[(String, &'static str)]) -> String {
    let plot_width: f64 = groups
        .iter()
        .map(|group| group_width(group.bars.len()))
        .sum();
    let width = MARGIN_LEFT + plot_width + MARGIN_RIGHT;
    let height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let baseline = MARGIN_TOP + PLOT_HEIGHT;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"##,
        w = px(width),
        h = px(height)
    );
    svg.push('\n');
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##,
        w = px(width),
        h = px(height)
    );
    let _ = writeln!(
        svg,
        r##"<text x="{x}" y="24" font-size="16" text-anchor="middle">{title}</text>"##,
        x = px(width / 2.0),
        title = escape(title)
    );

    // Horizontal gridlines and axis labels every 0.25.
    for step in 0..=4 {
        let value = step as f64 * 0.25;
        let y = baseline - value * PLOT_HEIGHT;
        let _ = writeln!(
            svg,
            r##"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="#dddddd" stroke-width="1"/>"##,
            x1 = px(MARGIN_LEFT),
            x2 = px(MARGIN_LEFT + plot_width),
            y = px(y)
        );
        let _ = writeln!(
            svg,
            r##"<text x="{x}" y="{y}" font-size="11" text-anchor="end">{value:.2}</text>"##,
            x = px(MARGIN_LEFT - 8.0),
            y = px(y + 4.0)
        );
    }

    let mut cursor = MARGIN_LEFT;
    for group in groups {
        let cell = group_width(group.bars.len());
        let inner = inner_width(group.bars.len());
        let mut x = cursor + (cell - inner) / 2.0;
        for bar in &group.bars {
            let clamped = bar.value.clamp(0.0, 1.0);
            let bar_height = clamped * PLOT_HEIGHT;
            let y = baseline - bar_height;
            let _ = writeln!(
                svg,
                r##"<rect x="{x}" y="{y}" width="{w}" height="{h}" fill="{color}"/>"##,
                x = px(x),
                y = px(y),
                w = px(BAR_WIDTH),
                h = px(bar_height),
                color = bar.color
            );
            let _ = writeln!(
                svg,
                r##"<text x="{x}" y="{y}" font-size="10" text-anchor="middle">{value:.4}</text>"##,
                x = px(x + BAR_WIDTH / 2.0),
                y = px(y - 4.0),
                value = bar.value
            );
            x += BAR_WIDTH + BAR_GAP;
        }
        let _ = writeln!(
            svg,
            r##"<text x="{x}" y="{y}" font-size="12" text-anchor="middle">{label}</text>"##,
            x = px(cursor + cell / 2.0),
            y = px(baseline + 20.0),
            label = escape(&group.label)
        );
        cursor += cell;
    }

    let _ = writeln!(
        svg,
        r##"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="#333333" stroke-width="1"/>"##,
        x1 = px(MARGIN_LEFT),
        x2 = px(MARGIN_LEFT + plot_width),
        y = px(baseline)
    );

    for (index, (key, color)) in legend.iter().enumerate() {
        let y = MARGIN_TOP - 18.0 + index as f64 * 16.0;
        let x = MARGIN_LEFT + plot_width - 150.0;
        let _ = writeln!(
            svg,
            r##"<rect x="{x}" y="{y}" width="12" height="12" fill="{color}"/>"##,
            x = px(x),
            y = px(y)
        );
        let _ = writeln!(
            svg,
            r##"<text x="{x}" y="{y}" font-size="11">{key}</text>"##,
            x = px(x + 18.0),
            y = px(y + 10.0),
            key = escape(key)
        );
    }

    svg.push_str("</svg>\n");
    svg
}

fn inner_width(bars: usize) -> f64 {
    bars as f64 * BAR_WIDTH + bars.saturating_sub(1) as f64 * BAR_GAP
}

fn group_width(bars: usize) -> f64 {
    inner_width(bars) + GROUP_PAD * 2.0
}

const CELL: f64 = 46.0;
const HEAT_LEFT: f64 = 150.0;
const HEAT_TOP: f64 = 150.0;

/// Square heatmap of values in `[-1, 1]` on a blue-white-red scale,
/// with one label per row and column.
pub fn heatmap(title: &str, labels: &[&str], matrix: &[Vec<f64>]) -> String {
    let n = labels.len();
    let width = HEAT_LEFT + n as f64 * CELL + 24.0;
    let height = HEAT_TOP + n as f64 * CELL + 24.0;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"##,
        w = px(width),
        h = px(height)
    );
    svg.push('\n');
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##,
        w = px(width),
        h = px(height)
    );
    let _ = writeln!(
        svg,
        r##"<text x="{x}" y="24" font-size="16" text-anchor="middle">{title}</text>"##,
        x = px(width / 2.0),
        title = escape(title)
    );

    for (column, label) in labels.iter().enumerate() {
        let x = HEAT_LEFT + column as f64 * CELL + CELL / 2.0;
        let _ = writeln!(
            svg,
            r##"<text x="{x}" y="{y}" font-size="11" text-anchor="start" transform="rotate(-60 {x} {y})">{label}</text>"##,
            x = px(x),
            y = px(HEAT_TOP - 8.0),
            label = escape(label)
        );
    }

    for (row, row_values) in matrix.iter().enumerate() {
        let y = HEAT_TOP + row as f64 * CELL;
        let _ = writeln!(
            svg,
            r##"<text x="{x}" y="{ty}" font-size="11" text-anchor="end">{label}</text>"##,
            x = px(HEAT_LEFT - 8.0),
            ty = px(y + CELL / 2.0 + 4.0),
            label = escape(labels[row])
        );
        for (column, &value) in row_values.iter().enumerate() {
            let x = HEAT_LEFT + column as f64 * CELL;
            let color = diverging_color(value);
            let _ = writeln!(
                svg,
                r##"<rect x="{x}" y="{y}" width="{c}" height="{c}" fill="{color}" stroke="#ffffff" stroke-width="1"/>"##,
                x = px(x),
                y = px(y),
                c = px(CELL)
            );
            let text_fill = if value.abs() > 0.55 {
                "#ffffff"
            } else {
                "#000000"
            };
            let _ = writeln!(
                svg,
                r##"<text x="{tx}" y="{ty}" font-size="10" text-anchor="middle" fill="{text_fill}">{value:.2}</text>"##,
                tx = px(x + CELL / 2.0),
                ty = px(y + CELL / 2.0 + 3.5)
            );
        }
    }

    svg.push_str("</svg>\n");
    svg
}

/// Blue (−1) through white (0) to red (+1).
fn diverging_color(value: f64) -> String {
    let clamped = value.clamp(-1.0, 1.0);
    let blue = (59.0, 76.0, 192.0);
    let white = (255.0, 255.0, 255.0);
    let red = (180.0, 4.0, 38.0);
    let (from, to, t) = if clamped < 0.0 {
        (white, blue, -clamped)
    } else {
        (white, red, clamped)
    };
    let channel = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        channel(from.0, to.0),
        channel(from.1, to.1),
        channel(from.2, to.2)
    )
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

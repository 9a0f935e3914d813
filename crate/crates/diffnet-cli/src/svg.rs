//! Minimal self-contained SVG line plots: axes, ticks, polylines, legend,
//! optional multi-panel layout. Deterministic output for fixed input.

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Log-10 y axis (for MSE curves).
    pub log_y: bool,
}

const W: f64 = 440.0;
const H: f64 = 340.0;
const ML: f64 = 62.0;
const MR: f64 = 16.0;
const MT: f64 = 34.0;
const MB: f64 = 46.0;

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1000.0 || v.abs() < 0.01 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn panel_svg(panel: &Panel, x0: f64, y0: f64, out: &mut String) {
    let tx = |v: f64| x0 + v;
    let ty = |v: f64| y0 + v;

    let transform = |v: f64| if panel.log_y { v.max(1e-300).log10() } else { v };
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in &panel.series {
        for &(x, y) in &s.points {
            xs.push(x);
            ys.push(transform(y));
        }
    }
    let (x_min, x_max) = bounds(&xs);
    let (y_min, y_max) = bounds(&ys);
    let px = |x: f64| ML + (x - x_min) / (x_max - x_min).max(1e-12) * (W - ML - MR);
    let py = |y: f64| H - MB - (transform(y) - y_min) / (y_max - y_min).max(1e-12) * (H - MT - MB);

    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\" stroke=\"#444\"/>\n",
        tx(ML),
        ty(MT),
        W - ML - MR,
        H - MT - MB
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
        tx(ML + (W - ML - MR) / 2.0),
        ty(MT - 12.0),
        escape(&panel.title)
    ));

    // Axis ticks: 5 per axis.
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let gx = px(fx);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#444\"/>\n",
            tx(gx),
            ty(H - MB),
            tx(gx),
            ty(H - MB + 4.0)
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            tx(gx),
            ty(H - MB + 16.0),
            fmt_tick(fx)
        ));

        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        let gy = H - MB - (fy - y_min) / (y_max - y_min).max(1e-12) * (H - MT - MB);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#444\"/>\n",
            tx(ML - 4.0),
            ty(gy),
            tx(ML),
            ty(gy)
        ));
        let label = if panel.log_y { format!("1e{}", fmt_tick(fy)) } else { fmt_tick(fy) };
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">{}</text>\n",
            tx(ML - 7.0),
            ty(gy + 4.0),
            label
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
        tx(ML + (W - ML - MR) / 2.0),
        ty(H - 10.0),
        escape(&panel.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 {:.2} {:.2})\">{}</text>\n",
        tx(14.0),
        ty(MT + (H - MT - MB) / 2.0),
        tx(14.0),
        ty(MT + (H - MT - MB) / 2.0),
        escape(&panel.y_label)
    ));

    for (si, s) in panel.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", tx(px(x)), ty(py(y))))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\" points=\"{}\"/>\n",
            color,
            path.join(" ")
        ));
        // Legend entry.
        let ly = MT + 14.0 + 15.0 * si as f64;
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            tx(ML + 8.0),
            ty(ly),
            tx(ML + 26.0),
            ty(ly),
            color
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" font-family=\"sans-serif\">{}</text>\n",
            tx(ML + 30.0),
            ty(ly + 4.0),
            escape(&s.name)
        ));
    }
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = (hi - lo) * 0.04;
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders panels in a row-major grid with `cols` columns.
pub fn render_grid(panels: &[Panel], cols: usize) -> String {
    let cols = cols.max(1);
    let rows = panels.len().div_ceil(cols);
    let width = W * cols.min(panels.len().max(1)) as f64;
    let height = H * rows as f64;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, panel) in panels.iter().enumerate() {
        let x0 = (i % cols) as f64 * W;
        let y0 = (i / cols) as f64 * H;
        panel_svg(panel, x0, y0, &mut out);
    }
    out.push_str("</svg>\n");
    out
}

/// Single-panel convenience.
pub fn render(panel: &Panel) -> String {
    render_grid(std::slice::from_ref(panel), 1)
}

//! Minimal standalone SVG line charts with embedded provenance comments.

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    pub color: &'a str,
}

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub log_y: bool,
    pub provenance: &'a str,
    pub series: Vec<Series<'a>>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;

impl Chart<'_> {
    pub fn render(&self) -> String {
        let tx = |v: f64| if self.log_x { v.log10() } else { v };
        let ty = |v: f64| if self.log_y { v.log10() } else { v };

        let pts: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter(|(x, y)| {
                        (!self.log_x || *x > 0.0) && (!self.log_y || *y > 0.0)
                    })
                    .map(|&(x, y)| (tx(x), ty(y)))
                    .collect()
            })
            .collect();

        let all: Vec<(f64, f64)> = pts.iter().flatten().copied().collect();
        let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x1 = x0 + 1.0;
        }
        if y1 - y0 < 1e-12 {
            y1 = y0 + 1.0;
        }
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        ));
        out.push_str(&format!("<!-- {} -->\n", self.provenance));
        out.push_str(&format!(
            "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
            W / 2.0,
            xml_escape(self.title)
        ));
        // axes
        out.push_str(&format!(
            "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
            m = MARGIN,
            b = H - MARGIN,
            r = W - MARGIN,
            t = MARGIN
        ));
        for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let xv = x0 + frac * (x1 - x0);
            let yv = y0 + frac * (y1 - y0);
            let (xs, ys) = (
                format_tick(xv, self.log_x),
                format_tick(yv, self.log_y),
            );
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">{xs}</text>\n",
                px(xv),
                H - MARGIN + 16.0
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{ys}</text>\n",
                MARGIN - 6.0,
                py(yv) + 3.0
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            W / 2.0,
            H - 14.0,
            xml_escape(self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            H / 2.0,
            H / 2.0,
            xml_escape(self.y_label)
        ));

        for (i, (series, p)) in self.series.iter().zip(&pts).enumerate() {
            if p.is_empty() {
                continue;
            }
            let path: Vec<String> = p
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                series.color,
                path.join(" ")
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n",
                W - MARGIN + 4.0,
                MARGIN + 14.0 * i as f64,
                series.color,
                xml_escape(series.label)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn format_tick(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else if v.abs() >= 1000.0 || (v != 0.0 && v.abs() < 0.01) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

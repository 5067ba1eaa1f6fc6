//! Standalone SVG line charts, written directly — polylines, axes, and a
//! legend, nothing else. Output is a pure function of the input tables:
//! series are sorted, colors are assigned from a fixed palette keyed by
//! (scenario, p, q, role), and every coordinate is formatted with fixed
//! precision, so identical inputs give identical bytes.

use crate::csvio::{SimRow, SolveRow, Table};

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 250.0;
const MARGIN_TOP: f64 = 56.0;
const MARGIN_BOTTOM: f64 = 64.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#e377c2",
    "#7f7f7f", "#bcbd22",
];

/// Which estimate a series plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    V1,
    Vn,
    Va,
    VaOver4,
}

impl Role {
    fn label(&self) -> &'static str {
        match self {
            Role::V1 => "v1",
            Role::Vn => "vn",
            Role::Va => "vA",
            Role::VaOver4 => "vA/4",
        }
    }
}

/// Where a series' numbers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SourceKind {
    Sim,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub scenario: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub kind: SourceKind,
    pub role: Role,
    /// (n, age) points, ascending in n.
    pub points: Vec<(f64, f64)>,
}

impl Series {
    fn hue_key(&self) -> String {
        format!(
            "{}|{}|{}|{:?}",
            self.scenario,
            self.p.map(|v| v.to_string()).unwrap_or_default(),
            self.q.map(|v| v.to_string()).unwrap_or_default(),
            self.role
        )
    }

    fn label(&self) -> String {
        let mut label = self.scenario.clone();
        if let Some(p) = self.p {
            label.push_str(&format!(" p={p}"));
        }
        if let Some(q) = self.q {
            if self.q != self.p {
                label.push_str(&format!(" q={q}"));
            }
        }
        label.push(' ');
        label.push_str(self.role.label());
        label.push_str(match self.kind {
            SourceKind::Sim => " (sim)",
            SourceKind::Exact => " (exact)",
        });
        label
    }
}

/// Identity of a series: everything but the points.
#[derive(Debug, Clone, PartialEq)]
struct SeriesId<'a> {
    scenario: &'a str,
    p: Option<f64>,
    q: Option<f64>,
    kind: SourceKind,
    role: Role,
}

fn push_point(series: &mut Vec<Series>, id: SeriesId, n: f64, value: f64) {
    if let Some(existing) = series.iter_mut().find(|s| {
        s.scenario == id.scenario
            && s.p == id.p
            && s.q == id.q
            && s.kind == id.kind
            && s.role == id.role
    }) {
        existing.points.push((n, value));
        return;
    }
    series.push(Series {
        scenario: id.scenario.to_string(),
        p: id.p,
        q: id.q,
        kind: id.kind,
        role: id.role,
        points: vec![(n, value)],
    });
}

fn series_from_sim(rows: &[SimRow], series: &mut Vec<Series>) {
    for row in rows.iter().filter(|r| r.is_aggregate()) {
        let n = row.n as f64;
        let id = |role| SeriesId {
            scenario: &row.scenario,
            p: row.p,
            q: row.q,
            kind: SourceKind::Sim,
            role,
        };
        if let Some(v1) = row.v1_mean {
            push_point(series, id(Role::V1), n, v1);
        }
        if let Some(vn) = row.vn_mean {
            push_point(series, id(Role::Vn), n, vn);
        }
        if let Some(va) = row.va_mean {
            push_point(series, id(Role::Va), n, va);
            push_point(series, id(Role::VaOver4), n, va / 4.0);
        }
    }
}

fn series_from_solve(rows: &[SolveRow], series: &mut Vec<Series>) {
    for row in rows {
        let n = row.n as f64;
        let id = |role| SeriesId {
            scenario: &row.scenario,
            p: row.p,
            q: row.q,
            kind: SourceKind::Exact,
            role,
        };
        push_point(series, id(Role::V1), n, row.v1);
        if let Some(vn) = row.vn {
            push_point(series, id(Role::Vn), n, vn);
        }
        if let Some(va) = row.va {
            push_point(series, id(Role::Va), n, va);
            push_point(series, id(Role::VaOver4), n, va / 4.0);
        }
    }
}

/// Collects plottable series from parsed tables, sorted deterministically.
pub fn build_series(tables: &[Table]) -> Result<Vec<Series>, String> {
    let mut series = Vec::new();
    for table in tables {
        match table {
            Table::Sim(rows) => series_from_sim(rows, &mut series),
            Table::Solve(rows) => series_from_solve(rows, &mut series),
        }
    }
    if series.is_empty() {
        return Err(
            "no plottable rows (simulate files need aggregate rows, replication = -1)".into(),
        );
    }
    for s in &mut series {
        s.points
            .sort_by(|a, b| a.0.partial_cmp(&b.0).expect("n is never NaN"));
    }
    series.sort_by(|a, b| {
        (&a.scenario, a.role, a.kind, a.p.unwrap_or(-1.0), a.q.unwrap_or(-1.0))
            .partial_cmp(&(&b.scenario, b.role, b.kind, b.p.unwrap_or(-1.0), b.q.unwrap_or(-1.0)))
            .expect("series keys are never NaN")
    });
    Ok(series)
}

/// Evenly spaced "nice" axis ticks covering [0, max].
fn ticks(max: f64, count: usize) -> Vec<f64> {
    let raw_step = max / count as f64;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|&s| s >= raw_step)
        .unwrap_or(magnitude * 10.0);
    let mut out = Vec::new();
    let mut v = 0.0;
    while v <= max * 1.0001 {
        out.push(v);
        v += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{:.0}", v)
    } else {
        format!("{v:.2}")
    }
}

/// Renders the series as a standalone SVG document.
pub fn render_svg(series: &[Series], title: &str) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(1.0f64, f64::max);
    let y_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(1e-9f64, f64::max)
        * 1.06;
    let x_of = |n: f64| MARGIN_LEFT + n / x_max * plot_w;
    let y_of = |v: f64| MARGIN_TOP + plot_h - v / y_max * plot_h;

    // Stable hue per (scenario, p, q, role); sim and exact share it and
    // differ by dash style.
    let mut hue_keys: Vec<String> = series.iter().map(|s| s.hue_key()).collect();
    hue_keys.sort();
    hue_keys.dedup();
    let color_of = |s: &Series| {
        let idx = hue_keys.binary_search(&s.hue_key()).expect("key present");
        PALETTE[idx % PALETTE.len()]
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" \
         width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"17\" fill=\"#222\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        escape_xml(title)
    ));

    for tick in ticks(y_max, 6) {
        let y = y_of(tick);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e4e4e4\" stroke-width=\"1\"/>\n",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" \
             font-size=\"12\" fill=\"#444\">{}</text>\n",
            MARGIN_LEFT - 8.0,
            y + 4.0,
            fmt_tick(tick)
        ));
    }
    for tick in ticks(x_max, 8) {
        let x = x_of(tick);
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"12\" fill=\"#444\">{}</text>\n",
            MARGIN_TOP + plot_h + 20.0,
            fmt_tick(tick)
        ));
    }
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#222\" stroke-width=\"1.5\"/>\n",
        MARGIN_LEFT,
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP + plot_h
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#222\" stroke-width=\"1.5\"/>\n",
        MARGIN_LEFT, MARGIN_TOP, MARGIN_LEFT,
        MARGIN_TOP + plot_h
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" fill=\"#222\">network size n</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" fill=\"#222\" transform=\"rotate(-90 20 {:.2})\">time-averaged age</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    // Series polylines and legend.
    let legend_x = MARGIN_LEFT + plot_w + 18.0;
    for (i, s) in series.iter().enumerate() {
        let color = color_of(s);
        let dash = match s.kind {
            SourceKind::Sim => "",
            SourceKind::Exact => " stroke-dasharray=\"6 3\"",
        };
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(n, v)| format!("{:.2},{:.2}", x_of(n), y_of(v)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"{dash}/>\n",
            coords.join(" ")
        ));
        if s.kind == SourceKind::Sim {
            for &(n, v) in &s.points {
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{color}\"/>\n",
                    x_of(n),
                    y_of(v)
                ));
            }
        }
        let ly = MARGIN_TOP + 10.0 + i as f64 * 18.0;
        svg.push_str(&format!(
            "<line x1=\"{legend_x:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" \
             stroke=\"{color}\" stroke-width=\"1.8\"{dash}/>\n",
            legend_x + 26.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"#222\">{}</text>\n",
            legend_x + 32.0,
            ly + 4.0,
            escape_xml(&s.label())
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape_xml(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Chart title derived from the scenarios present.
pub fn title_for(series: &[Series]) -> String {
    let mut scenarios: Vec<&str> = series.iter().map(|s| s.scenario.as_str()).collect();
    scenarios.sort();
    scenarios.dedup();
    match scenarios.as_slice() {
        ["baseline"] => "Adversary-free gossip: age vs network size".into(),
        ["mitm"] => "MITM attack: age vs network size".into(),
        s if s.iter().all(|x| x.starts_with("capture")) => {
            "Node-capture attack: age vs network size".into()
        }
        _ => "Age vs network size".into(),
    }
}

//! Four-panel SVG of the union-set metrics against K^v power level.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hexwatt::metrics::{SeedAggregate, SetAggregate};
use hexwatt::scenario::{PowerLevel, BUILTIN_SCENARIOS};

use crate::args::PlotArgs;
use crate::common::read_json;
use crate::error::{CliError, Result};
use crate::sweep::Summary;

pub const PLOT_FILE: &str = "network_metrics.svg";

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 340.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Panel {
    title: &'static str,
    unit: &'static str,
    value: fn(&SetAggregate) -> (f64, f64),
    error_bars: bool,
}

const PANELS: [Panel; 4] = [
    Panel { title: "(a) Mean network throughput", unit: "Mb/s", value: |s| (s.t_set_mbps, s.t_set_mbps_std), error_bars: false },
    Panel { title: "(b) Mean network power consumption", unit: "kW", value: |s| (s.pc_set_kw, s.pc_set_kw_std), error_bars: false },
    Panel { title: "(c) Mean network energy efficiency", unit: "Mb/J", value: |s| (s.ee_set, s.ee_set_std), error_bars: true },
    Panel { title: "(d) Mean network spectral efficiency", unit: "b/s/Hz", value: |s| (s.se_set, s.se_set_std), error_bars: true },
];

struct Series<'a> {
    name: &'a str,
    points: Vec<(usize, &'a SetAggregate)>,
}

fn tick_label(l: PowerLevel) -> String {
    match l {
        PowerLevel::Sleep => "sleep".into(),
        PowerLevel::Dbm(d) => format!("{d}"),
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let f = if norm < 1.5 { 1.0 } else if norm < 3.5 { 2.0 } else if norm < 7.5 { 5.0 } else { 10.0 };
    f * mag
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_panel(svg: &mut String, panel: &Panel, ox: f64, oy: f64, levels: &[PowerLevel], series: &[Series<'_>], missing: &[String], legend: bool) {
    let (pw, ph) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let (x0, y0) = (ox + MARGIN_L, oy + MARGIN_T);

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for (_, agg) in &s.points {
            let (m, sd) = (panel.value)(agg);
            let sd = if panel.error_bars { sd } else { 0.0 };
            lo = lo.min(m - sd);
            hi = hi.max(m + sd);
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 * hi.abs().max(1.0) {
        let pad = hi.abs().max(1.0) * 0.05;
        (lo, hi) = (lo - pad, hi + pad);
    }
    let step = nice_step(hi - lo);
    let (lo, hi) = ((lo / step).floor() * step, (hi / step).ceil() * step);
    let sx = |i: usize| {
        if levels.len() <= 1 {
            x0 + pw / 2.0
        } else {
            x0 + pw * i as f64 / (levels.len() - 1) as f64
        }
    };
    let sy = |v: f64| y0 + ph * (1.0 - (v - lo) / (hi - lo));

    let _ = writeln!(svg, r#"<g class="panel">"#);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="14" font-weight="bold">{}</text>"#, x0, oy + 20.0, panel.title);
    let _ = writeln!(svg, r##"<rect x="{x0:.1}" y="{y0:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#333"/>"##);

    let mut v = lo;
    while v <= hi + step * 1e-6 {
        let y = sy(v);
        let _ = writeln!(svg, r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, x0, x0 + pw);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#, x0 - 4.0, y + 3.0, format_tick(v, step));
        v += step;
    }
    for (i, &l) in levels.iter().enumerate() {
        let x = sx(i);
        let _ = writeln!(svg, r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#333"/>"##, y0 + ph, y0 + ph + 4.0);
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{:.1}" font-size="9" text-anchor="middle">{}</text>"#, y0 + ph + 15.0, tick_label(l));
    }
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">K^v transmit power (dBm)</text>"#, x0 + pw / 2.0, y0 + ph + 34.0);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        ox + 16.0, y0 + ph / 2.0, ox + 16.0, y0 + ph / 2.0, panel.unit
    );

    for (k, s) in series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let pts: Vec<String> = s.points.iter().map(|(i, a)| format!("{:.2},{:.2}", sx(*i), sy((panel.value)(a).0))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        for (i, a) in &s.points {
            let (m, sd) = (panel.value)(a);
            let (x, y) = (sx(*i), sy(m));
            if panel.error_bars && sd > 0.0 {
                let (ya, yb) = (sy(m - sd), sy(m + sd));
                let _ = writeln!(
                    svg,
                    r#"<path class="errorbar" d="M{x:.2},{ya:.2}V{yb:.2}M{:.2},{ya:.2}H{:.2}M{:.2},{yb:.2}H{:.2}" stroke="{colour}"/>"#,
                    x - 3.0, x + 3.0, x - 3.0, x + 3.0
                );
            }
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{colour}"/>"#);
        }
        if legend {
            let ly = y0 + 14.0 + 14.0 * k as f64;
            let _ = writeln!(svg, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/>"#, x0 + 8.0, x0 + 26.0);
            let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" font-size="10">{}</text>"#, x0 + 30.0, ly + 3.0, escape(s.name));
        }
    }
    for (k, name) in missing.iter().enumerate() {
        let _ = writeln!(
            svg,
            r##"<text class="warning" x="{:.1}" y="{:.1}" font-size="10" fill="#b00" text-anchor="end">warning: no data for {}</text>"##,
            x0 + pw - 6.0, y0 + 14.0 + 12.0 * k as f64, escape(name)
        );
    }
    let _ = writeln!(svg, "</g>");
}

fn format_tick(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}

/// Renders the summary; `expected` names scenarios that should be present.
pub fn render(summary: &Summary, expected: &[String]) -> Result<(String, Vec<String>)> {
    if summary.groups.is_empty() {
        return Err(CliError::Runtime("summary has no groups; nothing to plot".into()));
    }
    let mut levels: Vec<PowerLevel> = Vec::new();
    for g in &summary.groups {
        if !levels.contains(&g.power_level) {
            levels.push(g.power_level);
        }
    }
    levels.sort_by(|a, b| a.axis_dbm().total_cmp(&b.axis_dbm()));

    let mut names: Vec<&str> = Vec::new();
    for g in &summary.groups {
        if !names.contains(&g.scenario.as_str()) {
            names.push(&g.scenario);
        }
    }
    let series: Vec<Series<'_>> = names
        .iter()
        .map(|&name| {
            let mut points: Vec<(usize, &SetAggregate)> = summary
                .groups
                .iter()
                .filter(|g: &&SeedAggregate| g.scenario == name)
                .map(|g| (levels.iter().position(|l| *l == g.power_level).unwrap(), &g.union))
                .collect();
            points.sort_by_key(|(i, _)| *i);
            Series { name, points }
        })
        .collect();
    let missing: Vec<String> = expected.iter().filter(|e| !names.contains(&e.as_str())).cloned().collect();

    let (w, h) = (2.0 * PANEL_W, 2.0 * PANEL_H);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, panel) in PANELS.iter().enumerate() {
        let (ox, oy) = ((k % 2) as f64 * PANEL_W, (k / 2) as f64 * PANEL_H);
        draw_panel(&mut svg, panel, ox, oy, &levels, &series, &missing, k == 0);
    }
    svg.push_str("</svg>\n");
    Ok((svg, missing))
}

pub fn cmd_plot(args: &PlotArgs) -> Result<PathBuf> {
    let summary: Summary = read_json(&args.summary)?;
    let expected: Vec<String> = if args.expect.is_empty() {
        BUILTIN_SCENARIOS.iter().map(|(n, _)| n.to_string()).collect()
    } else {
        args.expect.clone()
    };
    let (svg, missing) = render(&summary, &expected)?;
    for m in &missing {
        log::warn!("summary has no data for scenario '{m}'");
    }
    fs::create_dir_all(&args.out)?;
    let path = Path::new(&args.out).join(PLOT_FILE);
    fs::write(&path, svg)?;
    println!("{}", path.display());
    Ok(path)
}

//! Minimal standalone SVG line and bar charts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::results::{summarize, ConfigKey, ResultRow};
use super::write_atomic;
use crate::decision::PolicyKind;
use crate::Result;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (60.0, 170.0, 40.0, 50.0); // left, right, top, bottom
const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_ceil(v: f64) -> f64 {
    if v <= 0.0 {
        return 1.0;
    }
    let mag = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|&c| c >= v).unwrap_or(10.0 * mag)
}

struct Frame {
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN.0 + x / self.x_max * (WIDTH - MARGIN.0 - MARGIN.1)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN.3 - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN.2 - MARGIN.3)
    }
}

fn open(svg: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" font-size="14" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (WIDTH - MARGIN.1 + MARGIN.0) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

fn y_axis(svg: &mut String, f: &Frame, ticks: usize, fmt: impl Fn(f64) -> String) {
    for i in 0..=ticks {
        let v = f.y_min + (f.y_max - f.y_min) * i as f64 / ticks as f64;
        let y = f.py(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
            MARGIN.0,
            WIDTH - MARGIN.1,
            MARGIN.0 - 6.0,
            y + 4.0,
            fmt(v)
        );
    }
}

fn legend(svg: &mut String, labels: &[String]) {
    for (i, label) in labels.iter().enumerate() {
        let y = MARGIN.2 + 16.0 * i as f64;
        let x = WIDTH - MARGIN.1 + 12.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x}" y="{}" width="12" height="3" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            y + 4.0,
            PALETTE[i % PALETTE.len()],
            x + 16.0,
            y + 8.0,
            escape(label)
        );
    }
}

/// One polyline per series over integer x (days).
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<f64>)]) -> String {
    let n = series.iter().map(|(_, v)| v.len()).max().unwrap_or(1).max(2);
    let finite = series.iter().flat_map(|(_, v)| v.iter().copied()).filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let f = Frame { x_max: (n - 1) as f64, y_min: if lo < 0.0 { -nice_ceil(-lo) } else { 0.0 }, y_max: nice_ceil(hi) };
    let mut svg = String::new();
    open(&mut svg, title, x_label, y_label);
    y_axis(&mut svg, &f, 5, |v| format!("{:.1}%", 100.0 * v));
    let step = if n > 20 { 5 } else { 1 };
    for d in (0..n).step_by(step) {
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{}" text-anchor="middle">{d}</text>"#, f.px(d as f64), HEIGHT - MARGIN.3 + 16.0);
    }
    for (i, (_, values)) in series.iter().enumerate() {
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(d, v)| format!("{:.1},{:.1}", f.px(d as f64), f.py(*v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            points.join(" ")
        );
    }
    legend(&mut svg, &series.iter().map(|(l, _)| l.clone()).collect::<Vec<_>>());
    svg.push_str("</svg>\n");
    svg
}

/// Grouped bars: one group per category, one bar per series.
pub fn bar_chart(title: &str, x_label: &str, y_label: &str, categories: &[String], series: &[(String, Vec<f64>)]) -> String {
    let hi = series.iter().flat_map(|(_, v)| v.iter().copied()).filter(|v| v.is_finite()).fold(0.0, f64::max);
    let f = Frame { x_max: categories.len().max(1) as f64, y_min: 0.0, y_max: nice_ceil(hi) };
    let mut svg = String::new();
    open(&mut svg, title, x_label, y_label);
    y_axis(&mut svg, &f, 5, |v| format!("{:.0}%", 100.0 * v));
    let group_w = f.px(1.0) - f.px(0.0);
    let bar_w = 0.8 * group_w / series.len().max(1) as f64;
    for (c, cat) in categories.iter().enumerate() {
        let x0 = f.px(c as f64) + 0.1 * group_w;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            f.px(c as f64 + 0.5),
            HEIGHT - MARGIN.3 + 16.0,
            escape(cat)
        );
        for (i, (_, values)) in series.iter().enumerate() {
            let Some(v) = values.get(c).copied().filter(|v| v.is_finite()) else { continue };
            let v = v.max(0.0);
            let _ = writeln!(
                svg,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                x0 + bar_w * i as f64,
                f.py(v),
                bar_w,
                f.py(0.0) - f.py(v),
                PALETTE[i % PALETTE.len()]
            );
        }
    }
    legend(&mut svg, &series.iter().map(|(l, _)| l.clone()).collect::<Vec<_>>());
    svg.push_str("</svg>\n");
    svg
}

fn ri_by_day(rows: &[&ResultRow]) -> Vec<f64> {
    let days = rows.iter().map(|r| r.day + 1).max().unwrap_or(0) as usize;
    let mut sum = vec![0.0; days];
    let mut n = vec![0usize; days];
    for r in rows {
        sum[r.day as usize] += r.ri;
        n[r.day as usize] += 1;
    }
    sum.iter().zip(&n).map(|(s, &c)| if c == 0 { f64::NAN } else { s / c as f64 }).collect()
}

/// Writes `ri_<world>_<scenario>.svg` (mean RI per day, one line per
/// configuration) and, when several processing times were run,
/// `proc_t_<world>.svg` (learning's improvement over Wait per procT).
pub fn write_charts(dir: &Path, rows: &[ResultRow]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut keys: Vec<ConfigKey> = Vec::new();
    for r in rows {
        if !keys.contains(&r.key) {
            keys.push(r.key);
        }
    }
    let multi_proc = keys.iter().any(|k| k.proc_t != keys[0].proc_t);
    let mut panels: Vec<_> = keys.iter().map(|k| (k.world, k.scenario)).collect();
    panels.sort();
    panels.dedup();
    for (world, scenario) in panels {
        let series: Vec<(String, Vec<f64>)> = keys
            .iter()
            .filter(|k| k.world == world && k.scenario == scenario)
            .map(|k| {
                let own: Vec<&ResultRow> = rows.iter().filter(|r| r.key == *k).collect();
                let label = if multi_proc { format!("{} procT={}", k.label(), k.proc_t) } else { k.label() };
                (label, ri_by_day(&own))
            })
            .collect();
        let svg = line_chart(&format!("Relative increase over oracle: {scenario}, {world} world"), "day", "RI", &series);
        let path = dir.join(format!("ri_{world}_{scenario}.svg"));
        write_atomic(&path, |w| Ok(w.write_all(svg.as_bytes())?))?;
        written.push(path);
    }

    if multi_proc {
        let summary = summarize(rows);
        let mut procs: Vec<f64> = keys.iter().map(|k| k.proc_t).collect();
        procs.sort_by(f64::total_cmp);
        procs.dedup();
        let mut worlds: Vec<_> = keys.iter().map(|k| k.world).collect();
        worlds.sort();
        worlds.dedup();
        for world in worlds {
            let mut labels: Vec<(ConfigKey, String)> = Vec::new();
            for s in summary.iter().filter(|s| s.key.world == world && s.key.policy == PolicyKind::Learn) {
                let l = format!("{} {}", s.key.scenario, s.key.label());
                if !labels.iter().any(|(_, x)| *x == l) {
                    labels.push((s.key, l));
                }
            }
            let series: Vec<(String, Vec<f64>)> = labels
                .iter()
                .map(|(k, l)| {
                    let values = procs
                        .iter()
                        .map(|p| {
                            summary
                                .iter()
                                .find(|s| s.key == ConfigKey { proc_t: *p, ..*k })
                                .and_then(|s| s.improvement_vs_wait)
                                .unwrap_or(f64::NAN)
                        })
                        .collect();
                    (l.clone(), values)
                })
                .collect();
            if series.is_empty() {
                continue;
            }
            let cats: Vec<String> = procs.iter().map(|p| format!("{p} s")).collect();
            let svg = bar_chart(&format!("Improvement over Wait, {world} world"), "procT", "mission time saved", &cats, &series);
            let path = dir.join(format!("proc_t_{world}.svg"));
            write_atomic(&path, |w| Ok(w.write_all(svg.as_bytes())?))?;
            written.push(path);
        }
    }
    Ok(written)
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::experiment::{EpisodeLog, ExperimentResult};
use crate::stats::SummaryRow;

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn write_rows<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::csv(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::csv(path, e))
}

/// Writes `episodes.csv` with header `iteration,episode,reward,steps,seed`.
pub fn write_episodes(path: &Path, logs: &[EpisodeLog]) -> Result<()> {
    write_rows(path, logs)
}

pub fn read_episodes(path: &Path) -> Result<Vec<EpisodeLog>> {
    read_rows(path)
}

/// Writes `summary.csv` with header `episode,median,q_low,q_high`.
pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    read_rows(path)
}

/// Files written for one experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Written {
    pub episodes: PathBuf,
    pub summary: PathBuf,
    pub plot: PathBuf,
}

/// Writes episodes, summary and plot of a single experiment into `dir`.
pub fn emit(result: &ExperimentResult, dir: &Path, title: &str) -> Result<Written> {
    if result.logs.is_empty() {
        return Err(HarnessError::Config(
            "nothing to write: no episodes ran".into(),
        ));
    }
    create_dir(dir)?;
    let written = Written {
        episodes: dir.join("episodes.csv"),
        summary: dir.join("summary.csv"),
        plot: dir.join("reward.svg"),
    };
    write_episodes(&written.episodes, &result.logs)?;
    write_summary(&written.summary, &result.summary)?;
    let svg = render_svg(title, &[(result.agent.name(), &result.summary)]);
    fs::write(&written.plot, svg).map_err(|e| HarnessError::io(&written.plot, e))?;
    Ok(written)
}

/// Writes one subdirectory per agent plus a combined plot.
pub fn emit_comparison(results: &[ExperimentResult], dir: &Path, title: &str) -> Result<PathBuf> {
    create_dir(dir)?;
    for r in results {
        emit(
            r,
            &dir.join(r.agent.name()),
            &format!("{title}: {}", r.agent),
        )?;
    }
    let series: Vec<(&str, &[SummaryRow])> = results
        .iter()
        .map(|r| (r.agent.name(), r.summary.as_slice()))
        .collect();
    let path = dir.join("comparison.svg");
    fs::write(&path, render_svg(title, &series)).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Median line with a shaded quantile band per series, episodes on the x
/// axis and moving-average reward on the y axis.
pub fn render_svg(title: &str, series: &[(&str, &[SummaryRow])]) -> String {
    let (w, h) = (800.0, 480.0);
    let (left, right, top, bottom) = (70.0, 150.0, 40.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);

    let episodes = series
        .iter()
        .map(|(_, r)| r.len())
        .max()
        .unwrap_or(0)
        .max(2);
    let mut y_max = series
        .iter()
        .flat_map(|(_, r)| r.iter().map(|row| row.q_high.max(row.median)))
        .fold(0.0f64, f64::max);
    let y_min = series
        .iter()
        .flat_map(|(_, r)| r.iter().map(|row| row.q_low.min(row.median)))
        .fold(0.0f64, f64::min);
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    let sx = |e: f64| left + pw * e / (episodes - 1) as f64;
    let sy = |v: f64| top + ph * (1.0 - (v - y_min) / (y_max - y_min));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let v = y_min + (y_max - y_min) * k as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0
        );
        let e = (episodes - 1) as f64 * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(e),
            top + ph + 18.0,
            e.round()
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">episode</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">moving-average reward</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );

    for (i, (name, rows)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if rows.is_empty() {
            continue;
        }
        let mut band = String::new();
        for r in rows.iter() {
            let _ = write!(band, "{:.2},{:.2} ", sx(r.episode as f64), sy(r.q_high));
        }
        for r in rows.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", sx(r.episode as f64), sy(r.q_low));
        }
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.trim_end()
        );
        let line: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(r.episode as f64), sy(r.median)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.join(" ")
        );
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

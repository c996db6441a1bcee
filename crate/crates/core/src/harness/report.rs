//! Summary tables and static line charts of a record set.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{ExperimentRecord, RecordSet};
use crate::{Error, Result};

/// One named curve of `(x, y)` points, sorted by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// A group of curves sharing axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub stem: &'static str,
    pub title: &'static str,
    pub x_label: &'static str,
    pub series: Vec<Series>,
}

fn group(
    records: &[ExperimentRecord],
    name: impl Fn(&ExperimentRecord) -> String,
    x: impl Fn(&ExperimentRecord) -> f64,
) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in records {
        let key = name(r);
        let point = (x(r), r.f1_mean);
        match out.iter_mut().find(|s| s.name == key) {
            Some(s) => s.points.push(point),
            None => out.push(Series {
                name: key,
                points: vec![point],
            }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// F1 against n per `(T, alpha)`, against AMI per n, and against T per alpha.
pub fn summarize(rs: &RecordSet) -> Result<Vec<Summary>> {
    if rs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let recs = &rs.records;
    let size = |r: &ExperimentRecord| match r.n_syn {
        Some(s) => format!("n={} n_syn={s}", r.n),
        None => format!("n={}", r.n),
    };
    Ok(vec![
        Summary {
            stem: "f1_vs_n",
            title: "F1 against training tokens",
            x_label: "n",
            series: group(recs, |r| format!("T={} alpha={}", r.tasks, r.alpha), |r| r.n as f64),
        },
        Summary {
            stem: "f1_vs_ami",
            title: "F1 against measured AMI",
            x_label: "ami",
            series: group(recs, size, |r| r.ami),
        },
        Summary {
            stem: "f1_vs_t",
            title: "F1 against task count",
            x_label: "T",
            series: group(recs, |r| format!("alpha={} {}", r.alpha, size(r)), |r| r.tasks as f64),
        },
    ])
}

impl Summary {
    pub fn to_csv(&self) -> String {
        let mut out = format!("series,{},f1_mean\n", self.x_label);
        for s in &self.series {
            for (x, y) in &s.points {
                let _ = writeln!(out, "\"{}\",{x},{y}", s.name);
            }
        }
        out
    }

    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const LEFT: f64 = 60.0;
        const RIGHT: f64 = 180.0;
        const TOP: f64 = 40.0;
        const BOTTOM: f64 = 50.0;
        const COLORS: [&str; 8] = [
            "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
        ];
        let pts = || self.series.iter().flat_map(|s| s.points.iter());
        let span = |vals: Vec<f64>| {
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, lo + 0.5)
            }
        };
        let (x0, x1) = span(pts().map(|p| p.0).collect());
        let (y0, y1) = span(pts().map(|p| p.1).collect());
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
        let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        );
        let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
        let _ = writeln!(svg, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>", W / 2.0, self.title);
        let (ax, ay) = (H - BOTTOM, W - RIGHT);
        let _ = writeln!(svg, "<line x1=\"{LEFT}\" y1=\"{ax}\" x2=\"{ay}\" y2=\"{ax}\" stroke=\"black\"/>");
        let _ = writeln!(svg, "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{ax}\" stroke=\"black\"/>");
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            let _ = writeln!(svg, "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{}</text>", px(fx), ax + 16.0, tick(fx));
            let _ = writeln!(svg, "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>", LEFT - 6.0, py(fy) + 4.0, tick(fy));
        }
        let _ = writeln!(svg, "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{}</text>", (LEFT + ay) / 2.0, H - 12.0, self.x_label);
        let _ = writeln!(svg, "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">F1</text>", (TOP + ax) / 2.0, (TOP + ax) / 2.0);
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let coords: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
            let _ = writeln!(svg, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>", coords.join(" "));
            for &(x, y) in &s.points {
                let _ = writeln!(svg, "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>", px(x), py(y));
            }
            let ly = TOP + 16.0 * i as f64;
            let _ = writeln!(svg, "<rect x=\"{}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{color}\"/>", ay + 12.0, ly);
            let _ = writeln!(svg, "<text x=\"{}\" y=\"{:.1}\">{}</text>", ay + 28.0, ly + 9.0, s.name);
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

/// Writes `<stem>.csv` and `<stem>.svg` for every summary; returns the paths.
pub fn write_report(rs: &RecordSet, dir: &Path) -> Result<Vec<PathBuf>> {
    let summaries = summarize(rs)?;
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for s in summaries {
        for (ext, body) in [("csv", s.to_csv()), ("svg", s.to_svg())] {
            let path = dir.join(format!("{}.{ext}", s.stem));
            std::fs::write(&path, body)?;
            written.push(path);
        }
    }
    Ok(written)
}

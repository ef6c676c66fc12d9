use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{ensure_parent, fmt_sig, Table};
use crate::error::{Error, Result};

const PLOT: f64 = 400.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 50.0;

type Rgb = (u8, u8, u8);

fn lerp(a: Rgb, b: Rgb, t: f64) -> Rgb {
    let t = t.clamp(0.0, 1.0);
    let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn hex((r, g, b): Rgb) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

const RED: Rgb = (178, 24, 43);
const WHITE: Rgb = (247, 247, 247);
const GREEN: Rgb = (27, 120, 55);
const LIGHT: Rgb = (255, 255, 217);
const DARK: Rgb = (8, 29, 88);

enum Scale {
    /// Centred at zero; red below, green above.
    Diverging {
        half_width: f64,
    },
    Sequential {
        lo: f64,
        hi: f64,
    },
}

impl Scale {
    fn for_column(name: &str, values: &[f64]) -> Scale {
        let finite = values.iter().copied().filter(|v| v.is_finite());
        if name.starts_with("delta") {
            let half_width = finite.fold(0.0f64, |m, v| m.max(v.abs()));
            Scale::Diverging { half_width }
        } else {
            let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
            if lo >= 0.0 && hi <= 1.0 {
                Scale::Sequential { lo: 0.0, hi: 1.0 }
            } else {
                Scale::Sequential { lo, hi }
            }
        }
    }

    fn color(&self, v: f64) -> Rgb {
        match *self {
            Scale::Diverging { half_width } => {
                if half_width == 0.0 || v == 0.0 {
                    WHITE
                } else if v > 0.0 {
                    lerp(WHITE, GREEN, v / half_width)
                } else {
                    lerp(WHITE, RED, -v / half_width)
                }
            }
            Scale::Sequential { lo, hi } => {
                let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
                lerp(LIGHT, DARK, t)
            }
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            Scale::Diverging { half_width } => (-half_width, half_width),
            Scale::Sequential { lo, hi } => (lo, hi),
        }
    }
}

fn sorted_unique(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn header(out: &mut String, width: f64, height: f64, title: &str, description: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<desc>{}</desc>", escape(description));
    let _ = writeln!(
        out,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="25" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + PLOT / 2.0,
        escape(title)
    );
}

/// Heatmap of `quantity` over the `T` (x) by `S` (y) plane.
///
/// Columns named `delta*` use a diverging scale centred at zero, everything
/// else a sequential one (fixed to `[0, 1]` when the data fits).
pub fn render_heatmap(table: &Table, quantity: &str, path: &Path, description: &str) -> Result<()> {
    let svg = heatmap_svg(table, quantity, description)?;
    ensure_parent(path)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

pub fn heatmap_svg(table: &Table, quantity: &str, description: &str) -> Result<String> {
    let values = table.numeric(quantity)?;
    let t = table.numeric("T")?;
    let s = table.numeric("S")?;
    let ts = sorted_unique(&t);
    let ss = sorted_unique(&s);
    let span = |v: &[f64]| {
        let step = if v.len() > 1 {
            (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
        } else {
            1.0
        };
        (v[0] - step / 2.0, v[v.len() - 1] + step / 2.0, step)
    };
    if ts.is_empty() || ss.is_empty() {
        return Err(Error::Parameter("empty table".into()));
    }
    let (t0, t1, dt) = span(&ts);
    let (s0, s1, ds) = span(&ss);
    let x = |v: f64| LEFT + (v - t0) / (t1 - t0) * PLOT;
    let y = |v: f64| TOP + PLOT - (v - s0) / (s1 - s0) * PLOT;
    let scale = Scale::for_column(quantity, &values);

    let mut out = String::new();
    header(
        &mut out,
        LEFT + PLOT + 110.0,
        TOP + PLOT + 60.0,
        quantity,
        description,
    );
    let cw = dt / (t1 - t0) * PLOT;
    let ch = ds / (s1 - s0) * PLOT;
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for ((&tv, &sv), &v) in t.iter().zip(&s).zip(&values) {
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            x(tv - dt / 2.0),
            y(sv + ds / 2.0),
            cw + 0.3,
            ch + 0.3,
            hex(scale.color(v))
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );
    // Quadrant dividers and labels.
    if (t0..=t1).contains(&1.0) {
        let _ = writeln!(
            out,
            r##"<line x1="{0:.2}" y1="{TOP}" x2="{0:.2}" y2="{1}" stroke="#444" stroke-dasharray="4 3"/>"##,
            x(1.0),
            TOP + PLOT
        );
    }
    if (s0..=s1).contains(&0.0) {
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#444" stroke-dasharray="4 3"/>"##,
            y(0.0),
            LEFT + PLOT
        );
    }
    for (label, tv, sv) in [
        ("PD", 1.5, -0.75),
        ("SD", 1.5, 0.75),
        ("SH", 0.5, -0.75),
        ("Harmony", 0.5, 0.75),
    ] {
        if (t0..=t1).contains(&tv) && (s0..=s1).contains(&sv) {
            let _ = writeln!(
                out,
                r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="16" fill="#222" opacity="0.7">{label}</text>"##,
                x(tv),
                y(sv)
            );
        }
    }
    axis_ticks(&mut out, &ts, &ss, x, y);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">T</text>"#,
        LEFT + PLOT / 2.0,
        TOP + PLOT + 40.0
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{}" text-anchor="middle">S</text>"#,
        TOP + PLOT / 2.0
    );
    colorbar(&mut out, &scale);
    out.push_str("</svg>\n");
    Ok(out)
}

fn nice_ticks(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = (values[0], values[values.len() - 1]);
    if hi <= lo {
        return vec![lo];
    }
    let raw = (hi - lo) / 4.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn axis_ticks(
    out: &mut String,
    xs: &[f64],
    ys: &[f64],
    x: impl Fn(f64) -> f64,
    y: impl Fn(f64) -> f64,
) {
    for v in nice_ticks(xs) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x(v),
            TOP + PLOT + 18.0,
            fmt_sig(v, 4)
        );
    }
    for v in nice_ticks(ys) {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            LEFT - 6.0,
            y(v),
            fmt_sig(v, 4)
        );
    }
}

fn colorbar(out: &mut String, scale: &Scale) {
    let (lo, hi) = scale.bounds();
    let x0 = LEFT + PLOT + 25.0;
    let steps = 50;
    let h = PLOT / steps as f64;
    for i in 0..steps {
        let v = hi - (hi - lo) * (i as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x0}" y="{:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            TOP + i as f64 * h,
            h + 0.3,
            hex(scale.color(v))
        );
    }
    for (v, yy) in [(hi, TOP + 10.0), (lo, TOP + PLOT)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{yy}">{}</text>"#,
            x0 + 24.0,
            fmt_sig(v, 3)
        );
    }
}

/// Line plot of several columns against one x column.
pub struct LinePlot<'a> {
    pub title: &'a str,
    pub x: &'a str,
    pub series: Vec<&'a str>,
    /// `(with, without)`: the gap between two series is shaded green where
    /// the first is higher and red where it is lower.
    pub shade: Option<(&'a str, &'a str)>,
}

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

pub fn render_lines(
    table: &Table,
    plot: &LinePlot<'_>,
    path: &Path,
    description: &str,
) -> Result<()> {
    let svg = lines_svg(table, plot, description)?;
    ensure_parent(path)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

pub fn lines_svg(table: &Table, plot: &LinePlot<'_>, description: &str) -> Result<String> {
    let xs = table.numeric(plot.x)?;
    let series = plot
        .series
        .iter()
        .map(|name| table.numeric(name).map(|v| (*name, v)))
        .collect::<Result<Vec<_>>>()?;
    let shade = plot
        .shade
        .map(|(a, b)| Ok::<_, Error>((table.numeric(a)?, table.numeric(b)?)))
        .transpose()?;
    if xs.len() < 2 {
        return Err(Error::Parameter(
            "a line plot needs at least two points".into(),
        ));
    }
    let (x0, x1) = (xs[0].min(xs[xs.len() - 1]), xs[0].max(xs[xs.len() - 1]));
    let all = series.iter().flat_map(|(_, v)| v.iter().copied());
    let (mut y0, mut y1) = all.fold((0.0f64, 1.0f64), |(a, b), v| (a.min(v), b.max(v)));
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |v: f64| LEFT + (v - x0) / (x1 - x0) * PLOT;
    let py = |v: f64| TOP + PLOT - (v - y0) / (y1 - y0) * PLOT;

    let mut out = String::new();
    let longest = plot
        .series
        .iter()
        .map(|n| n.chars().count())
        .max()
        .unwrap_or(0);
    let width = LEFT + PLOT + 60.0 + 7.0 * longest as f64;
    header(&mut out, width, TOP + PLOT + 60.0, plot.title, description);
    if let Some((a, b)) = &shade {
        for i in 0..xs.len() - 1 {
            let gap = (a[i] - b[i]) + (a[i + 1] - b[i + 1]);
            let fill = if gap >= 0.0 { hex(GREEN) } else { hex(RED) };
            let _ = writeln!(
                out,
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}" opacity="0.25"/>"#,
                px(xs[i]),
                py(a[i]),
                px(xs[i + 1]),
                py(a[i + 1]),
                px(xs[i + 1]),
                py(b[i + 1]),
                px(xs[i]),
                py(b[i])
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + PLOT + 15.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    axis_ticks(&mut out, &sorted, &[y0, y1], px, py);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + PLOT / 2.0,
        TOP + PLOT + 40.0,
        escape(plot.x)
    );
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::Cell;

    fn grid(values: impl Fn(f64, f64) -> f64, name: &str) -> Table {
        let mut rows = Vec::new();
        for s in [-1.0, 0.0, 1.0] {
            for t in [0.0, 1.0, 2.0] {
                rows.push(vec![Cell::Num(t), Cell::Num(s), Cell::Num(values(t, s))]);
            }
        }
        Table {
            columns: vec!["T".into(), "S".into(), name.into()],
            rows,
        }
    }

    #[test]
    fn diverging_colours() {
        let table = grid(|t, _| t - 1.0, "delta.x");
        let svg = heatmap_svg(&table, "delta.x", "").unwrap();
        assert!(svg.contains(&hex(GREEN)));
        assert!(svg.contains(&hex(RED)));
        assert!(svg.contains(">PD<") && svg.contains(">Harmony<"));
    }

    #[test]
    fn constant_zero_is_uniform_midpoint() {
        let table = grid(|_, _| 0.0, "delta.zero");
        let svg = heatmap_svg(&table, "delta.zero", "").unwrap();
        let fills: Vec<&str> = svg
            .lines()
            .filter(|l| l.starts_with("<rect") && l.contains("fill=\"#"))
            .map(|l| l.split("fill=\"").nth(1).unwrap())
            .collect();
        assert!(fills.len() >= 9);
        assert!(fills.iter().all(|f| f.starts_with(&hex(WHITE))));
    }

    #[test]
    fn frequency_scale_is_unit_interval() {
        let table = grid(|t, _| t / 4.0, "freq");
        let scale = Scale::for_column("freq", &table.numeric("freq").unwrap());
        assert_eq!(scale.bounds(), (0.0, 1.0));
    }

    #[test]
    fn unknown_quantity() {
        let table = grid(|_, _| 0.0, "x");
        assert!(matches!(
            heatmap_svg(&table, "y", ""),
            Err(Error::UnknownQuantity { .. })
        ));
    }

    #[test]
    fn ticks() {
        assert_eq!(nice_ticks(&[0.0, 2.0]), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(nice_ticks(&[-1.0, 1.0]), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}

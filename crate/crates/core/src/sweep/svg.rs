//! Self-contained SVG heatmaps of one `(anh, delta)` panel.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::SweepRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Psi,
    Rho,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Psi => "psi",
            Observable::Rho => "rho",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Observable::Psi => "ψ",
            Observable::Rho => "ρ",
        }
    }

    fn of(self, r: &SweepRecord) -> f64 {
        match self {
            Observable::Psi => r.psi_min,
            Observable::Rho => r.rho,
        }
    }
}

#[derive(Debug, Error)]
pub enum HeatmapError {
    #[error("records do not form a complete rectangular grid: {0}")]
    IncompleteGrid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

// Viridis anchors; linear interpolation in between.
const PALETTE: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn colour(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (PALETTE.len() - 1) as f64;
    let i = (t.floor() as usize).min(PALETTE.len() - 2);
    let f = t - i as f64;
    let (a, b) = (PALETTE[i], PALETTE[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

fn distinct_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

const PLOT: f64 = 480.0;
const LEFT: f64 = 80.0;
const TOP: f64 = 40.0;
const BAR: f64 = 20.0;

/// Renders one panel. The records must hold exactly one point per
/// `(J, mu)` pair of the grid they span, all at the same `(anh, delta)`.
pub fn render_heatmap(
    records: &[SweepRecord],
    observable: Observable,
) -> Result<String, HeatmapError> {
    let first = records
        .first()
        .ok_or_else(|| HeatmapError::IncompleteGrid("no records".into()))?;
    if records
        .iter()
        .any(|r| r.anh != first.anh || r.delta != first.delta)
    {
        return Err(HeatmapError::IncompleteGrid(
            "records span several panels".into(),
        ));
    }
    let js = distinct_sorted(records.iter().map(|r| r.j_over_lambda));
    let mus = distinct_sorted(records.iter().map(|r| r.mu_minus_omega_over_lambda));
    let (nx, ny) = (js.len(), mus.len());
    if nx * ny != records.len() {
        return Err(HeatmapError::IncompleteGrid(format!(
            "{} records for a {nx} x {ny} grid",
            records.len()
        )));
    }
    let mut cells: Vec<Option<f64>> = vec![None; nx * ny];
    for r in records {
        let ix = js
            .binary_search_by(|x| x.total_cmp(&r.j_over_lambda))
            .expect("present");
        let iy = mus
            .binary_search_by(|x| x.total_cmp(&r.mu_minus_omega_over_lambda))
            .expect("present");
        if cells[iy * nx + ix].replace(observable.of(r)).is_some() {
            return Err(HeatmapError::IncompleteGrid(format!(
                "duplicate point J/λ = {}, (μ−ω)/λ = {}",
                r.j_over_lambda, r.mu_minus_omega_over_lambda
            )));
        }
    }
    let values: Vec<f64> = cells.into_iter().map(|c| c.expect("filled")).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;

    let (cw, ch) = (PLOT / nx as f64, PLOT / ny as f64);
    let width = LEFT + PLOT + 120.0;
    let height = TOP + PLOT + 70.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle">{} at Δ/λ = {}, δ/λ = {}</text>"#,
        LEFT + PLOT / 2.0,
        observable.label(),
        first.anh,
        first.delta
    );
    s.push_str("<g shape-rendering=\"crispEdges\">\n");
    for iy in 0..ny {
        // Larger mu is drawn higher up.
        let y = TOP + (ny - 1 - iy) as f64 * ch;
        for ix in 0..nx {
            let v = values[iy * nx + ix];
            let t = if span > 0.0 { (v - lo) / span } else { 0.0 };
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                LEFT + ix as f64 * cw,
                y,
                cw,
                ch,
                colour(t)
            );
        }
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );

    // Axis ticks at the ends of each axis.
    let bottom = TOP + PLOT;
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="{}" text-anchor="start">{}</text>"#,
        bottom + 18.0,
        js[0]
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        LEFT + PLOT,
        bottom + 18.0,
        js[nx - 1]
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">J/λ</text>"#,
        LEFT + PLOT / 2.0,
        bottom + 40.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{bottom}" text-anchor="end">{}</text>"#,
        LEFT - 6.0,
        mus[0]
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        LEFT - 6.0,
        TOP + 12.0,
        mus[ny - 1]
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {}) rotate(-90)" text-anchor="middle">(μ−ω)/λ</text>"#,
        TOP + PLOT / 2.0
    );

    // Colour bar with the extreme values written next to it.
    let bx = LEFT + PLOT + 30.0;
    let _ = writeln!(
        s,
        r#"<defs><linearGradient id="scale" x1="0" y1="1" x2="0" y2="0">"#
    );
    for (k, _) in PALETTE.iter().enumerate() {
        let t = k as f64 / (PALETTE.len() - 1) as f64;
        let _ = writeln!(s, r#"<stop offset="{t}" stop-color="{}"/>"#, colour(t));
    }
    s.push_str("</linearGradient></defs>\n");
    let fill = if span > 0.0 {
        "url(#scale)".to_string()
    } else {
        colour(0.0)
    };
    let _ = writeln!(
        s,
        r#"<rect x="{bx}" y="{TOP}" width="{BAR}" height="{PLOT}" fill="{fill}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" class="legend-max">max = {hi}</text>"#,
        bx,
        TOP - 6.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" class="legend-min">min = {lo}</text>"#,
        bx,
        bottom + 18.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_heatmap(
    records: &[SweepRecord],
    observable: Observable,
    path: &Path,
) -> Result<(), HeatmapError> {
    let svg = render_heatmap(records, observable)?;
    std::fs::write(path, svg)?;
    Ok(())
}

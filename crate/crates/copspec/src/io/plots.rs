//! The three plot families: 3x3 spectrum grids with typical-region bands,
//! per-frequency minimum p-value summaries, and per-frequency detail panels
//! of signed p-values over quantile-level pairs.

use std::f64::consts::PI;

use super::svg::SvgCanvas;
use crate::bootstrap::{PValueField, TypicalRegions};
use crate::error::{Error, Result};
use crate::series::QuantileGrid;
use crate::spectra::SpectralMatrix;

const DATA_COLOR: &str = "#1f5fd0";
const BAND_COLOR: &str = "#cccccc";
const POSITIVE_COLOR: &str = "#d62728";
const NEGATIVE_COLOR: &str = "#1f5fd0";

/// An SVG byte stream plus the machine-readable CSV of the plotted values.
#[derive(Debug, Clone)]
pub struct PlotDocument {
    pub svg: String,
    pub csv: String,
}

struct Panel {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl Panel {
    fn map_x(&self, omega: f64) -> f64 {
        self.x + (omega / PI).clamp(0.0, 1.0) * self.w
    }

    fn map_y(&self, v: f64, lo: f64, hi: f64) -> f64 {
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        self.y + self.h - t.clamp(0.0, 1.0) * self.h
    }
}

fn part_label(row: usize, col: usize) -> &'static str {
    use std::cmp::Ordering;
    match row.cmp(&col) {
        Ordering::Less => "im",
        Ordering::Equal => "diag",
        Ordering::Greater => "re",
    }
}

/// 3x3 grid of spectra against omega in [0, pi]: diagonal panels show the
/// (real) diagonal spectra, panels below the diagonal the real parts, panels
/// above the imaginary parts; cell (row, col) displays the pair
/// (col level, row level). A shaded typical-region band is drawn when
/// regions are supplied.
pub fn emit_grid_plot(
    estimate: &SpectralMatrix,
    regions: Option<&TypicalRegions>,
    display_taus: &QuantileGrid,
) -> Result<PlotDocument> {
    if let Some(regions) = regions {
        if estimate.taus() != &regions.taus || estimate.omegas() != &regions.omegas {
            return Err(Error::InvalidInput("estimate and regions grids differ".into()));
        }
    }
    let idx: Vec<usize> = display_taus
        .levels()
        .iter()
        .map(|&t| {
            estimate.taus().index_of(t).ok_or_else(|| {
                Error::InvalidInput(format!("display level {t} missing from estimate grid"))
            })
        })
        .collect::<Result<_>>()?;
    let k = idx.len();
    let omegas = estimate.omegas().omegas();

    let (pw, ph, margin, gap) = (220.0, 160.0, 48.0, 14.0);
    let width = margin * 2.0 + pw * k as f64 + gap * (k as f64 - 1.0);
    let height = margin * 2.0 + ph * k as f64 + gap * (k as f64 - 1.0);
    let mut svg = SvgCanvas::new(width, height);

    let mut csv = String::from("panel_row,panel_col,tau1,tau2,part,omega,value");
    if regions.is_some() {
        csv.push_str(",lower,upper");
    }
    csv.push('\n');

    for row in 0..k {
        for col in 0..k {
            let (i, j) = (idx[col], idx[row]); // pair (col level, row level)
            let (t1, t2) = (display_taus.levels()[col], display_taus.levels()[row]);
            let part = part_label(row, col);
            let series: Vec<f64> = (0..omegas.len())
                .map(|w| {
                    let v = estimate.at(i, j, w);
                    if part == "im" {
                        v.im
                    } else {
                        v.re
                    }
                })
                .collect();
            let band: Option<(Vec<f64>, Vec<f64>)> = regions.map(|r| {
                let mut lo = Vec::with_capacity(omegas.len());
                let mut hi = Vec::with_capacity(omegas.len());
                for w in 0..omegas.len() {
                    let (l, u) = if part == "im" {
                        r.bounds_im(i, j, w)
                    } else {
                        r.bounds_re(i, j, w)
                    };
                    lo.push(l);
                    hi.push(u);
                }
                (lo, hi)
            });

            // panel extent
            let panel = Panel {
                x: margin + col as f64 * (pw + gap),
                y: margin + row as f64 * (ph + gap),
                w: pw,
                h: ph,
            };
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &v in &series {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if let Some((bl, bu)) = &band {
                for (&l, &u) in bl.iter().zip(bu) {
                    lo = lo.min(l);
                    hi = hi.max(u);
                }
            }
            if !(hi > lo) {
                let pad = lo.abs().max(1e-6) * 0.1;
                lo -= pad;
                hi += pad;
            } else {
                let pad = (hi - lo) * 0.06;
                lo -= pad;
                hi += pad;
            }

            svg.rect(panel.x, panel.y, panel.w, panel.h, "none", "#444444");
            let title = match part {
                "diag" => format!("f({t1},{t2})"),
                "re" => format!("Re f({t1},{t2})"),
                _ => format!("Im f({t1},{t2})"),
            };
            svg.text(panel.x + panel.w / 2.0, panel.y - 4.0, 12.0, "middle", &title);

            // x ticks at 0, pi/2, pi
            for (frac, label) in [(0.0, "0"), (0.5, "\u{3c0}/2"), (1.0, "\u{3c0}")] {
                let x = panel.x + frac * panel.w;
                svg.line(x, panel.y + panel.h, x, panel.y + panel.h + 4.0, "#444444", 1.0);
                if row == k - 1 {
                    svg.text(x, panel.y + panel.h + 16.0, 10.0, "middle", label);
                }
            }
            // y extremes
            svg.text(panel.x - 4.0, panel.y + 8.0, 9.0, "end", &format!("{hi:.3}"));
            svg.text(panel.x - 4.0, panel.y + panel.h, 9.0, "end", &format!("{lo:.3}"));

            if let Some((bl, bu)) = &band {
                let mut pts: Vec<(f64, f64)> = omegas
                    .iter()
                    .zip(bu)
                    .map(|(&w, &u)| (panel.map_x(w), panel.map_y(u, lo, hi)))
                    .collect();
                for (&w, &l) in omegas.iter().zip(bl).rev() {
                    pts.push((panel.map_x(w), panel.map_y(l, lo, hi)));
                }
                svg.polygon(&pts, BAND_COLOR);
            }
            let line: Vec<(f64, f64)> = omegas
                .iter()
                .zip(&series)
                .map(|(&w, &v)| (panel.map_x(w), panel.map_y(v, lo, hi)))
                .collect();
            svg.polyline(&line, DATA_COLOR, 1.6);

            for (w_idx, &w) in omegas.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{},{t1},{t2},{part},{w},{}",
                    row + 1,
                    col + 1,
                    series[w_idx]
                ));
                if let Some((bl, bu)) = &band {
                    csv.push_str(&format!(",{},{}", bl[w_idx], bu[w_idx]));
                }
                csv.push('\n');
            }
        }
    }
    Ok(PlotDocument { svg: svg.finish(), csv })
}

/// Per-frequency minimum p-values on a log scale spanning [1/R, 1], with
/// exact zeros drawn as red circles on the axis and reference lines at
/// 0.05, 0.01 and 0.001.
pub fn emit_summary_plot(pfield: &PValueField) -> Result<PlotDocument> {
    let omegas = pfield.omegas.omegas();
    let r = pfield.r as f64;
    let (width, height, margin) = (640.0, 400.0, 56.0);
    let (pw, ph) = (width - 2.0 * margin, height - 2.0 * margin);
    let mut svg = SvgCanvas::new(width, height);

    let log_floor = (1.0 / r).log10();
    let map_x = |w: f64| margin + (w / PI).clamp(0.0, 1.0) * pw;
    let map_y = |p: f64| {
        let t = (p.max(1.0 / r).log10() - log_floor) / (0.0 - log_floor);
        margin + ph - t.clamp(0.0, 1.0) * ph
    };

    svg.rect(margin, margin, pw, ph, "none", "#444444");
    svg.text(width / 2.0, margin - 18.0, 13.0, "middle", "minimum p-value per frequency");
    for (frac, label) in [(0.0, "0"), (0.5, "\u{3c0}/2"), (1.0, "\u{3c0}")] {
        let x = margin + frac * pw;
        svg.line(x, margin + ph, x, margin + ph + 4.0, "#444444", 1.0);
        svg.text(x, margin + ph + 18.0, 11.0, "middle", label);
    }
    for level in [0.05, 0.01, 0.001] {
        if level >= 1.0 / r {
            let y = map_y(level);
            svg.dashed_line(margin, y, margin + pw, y, "#999999");
            svg.text(margin + pw + 4.0, y + 3.0, 10.0, "start", &level.to_string());
        }
    }
    for (tick, label) in [(1.0, "1"), (0.1, "0.1")] {
        if tick >= 1.0 / r {
            svg.text(margin - 6.0, map_y(tick) + 3.0, 10.0, "end", label);
        }
    }
    svg.text(margin - 6.0, map_y(1.0 / r) + 3.0, 10.0, "end", &format!("1/R={}", 1.0 / r));

    let mut csv = String::from("omega,p_min\n");
    for (&w, &p) in omegas.iter().zip(&pfield.p_min) {
        if p == 0.0 {
            svg.circle(map_x(w), margin + ph, 5.0, "none", POSITIVE_COLOR);
        } else {
            svg.circle(map_x(w), map_y(p), 3.0, "#222222", "none");
        }
        csv.push_str(&format!("{w},{p}\n"));
    }
    Ok(PlotDocument { svg: svg.finish(), csv })
}

/// Detail panel for one frequency: a K x K cell grid over quantile-level
/// pairs; cell (row i, col j) carries real-part information for i >= j and
/// imaginary-part information for i < j. Significance is drawn as 1/2/3
/// stacked triangles for p < 0.05 / 0.01 / 0.001, red upward for positive
/// deviations and blue downward for negative ones.
pub fn emit_detail_plot(pfield: &PValueField, omega: f64) -> Result<PlotDocument> {
    let w_idx = pfield
        .omegas
        .index_of(omega)
        .ok_or_else(|| Error::InvalidInput(format!("omega {omega} not in the p-value grid")))?;
    let k = pfield.levels.len();
    let cell = 26.0;
    let margin = 64.0;
    let size = margin * 2.0 + cell * k as f64;
    let mut svg = SvgCanvas::new(size, size);
    svg.text(
        size / 2.0,
        margin - 22.0,
        13.0,
        "middle",
        &format!("signed p-values at \u{3c9} = {omega:.4}"),
    );

    let mut csv = String::from("row,col,tau_row,tau_col,part,p,sign\n");
    for i in 0..k {
        for j in 0..k {
            let x = margin + j as f64 * cell;
            let y = margin + i as f64 * cell;
            svg.rect(x, y, cell, cell, "none", "#bbbbbb");
            let (part, p, sign) = if i >= j {
                // stored orientation has tau_min first; Re is symmetric
                ("re", pfield.p_re_at(j, i, w_idx), pfield.sign_re_at(j, i, w_idx))
            } else {
                ("im", pfield.p_im_at(i, j, w_idx), pfield.sign_im_at(i, j, w_idx))
            };
            let count = if p < 0.001 {
                3
            } else if p < 0.01 {
                2
            } else if p < 0.05 {
                1
            } else {
                0
            };
            let color = if sign > 0 { POSITIVE_COLOR } else { NEGATIVE_COLOR };
            let half = cell * 0.14;
            for t in 0..count {
                let cy = y + cell / 2.0 + (t as f64 - (count as f64 - 1.0) / 2.0) * half * 2.2;
                svg.triangle(x + cell / 2.0, cy, half, sign > 0, color);
            }
            csv.push_str(&format!(
                "{},{},{},{},{part},{p},{sign}\n",
                i + 1,
                j + 1,
                pfield.levels.levels()[i],
                pfield.levels.levels()[j],
            ));
        }
    }
    // sparse level labels
    for (pos, &level) in pfield.levels.levels().iter().enumerate() {
        if k <= 9 || pos % 3 == 0 {
            let center = margin + pos as f64 * cell + cell / 2.0;
            svg.text(margin - 6.0, center + 3.0, 9.0, "end", &format!("{level}"));
            svg.text(center, margin + k as f64 * cell + 12.0, 9.0, "middle", &format!("{level}"));
        }
    }
    Ok(PlotDocument { svg: svg.finish(), csv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    use crate::series::FrequencyGrid;

    /// Compact well-formedness check: tag balance, attribute quoting and
    /// escaped text content. Enough to catch malformed output.
    pub(crate) fn assert_well_formed_xml(text: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = text;
        assert!(text.starts_with("<?xml"), "missing prolog");
        rest = &rest[rest.find("?>").expect("prolog end") + 2..];
        while let Some(open) = rest.find('<') {
            let close = rest[open..].find('>').expect("unclosed tag") + open;
            let tag = &rest[open + 1..close];
            let between = &rest[..open];
            assert!(!between.contains('<') && !between.contains('>'));
            if let Some(name) = tag.strip_prefix('/') {
                let expected = stack.pop().unwrap_or_else(|| panic!("stray closer </{name}>"));
                assert_eq!(expected, name, "mismatched tag");
            } else {
                assert_eq!(tag.matches('"').count() % 2, 0, "unbalanced quotes in <{tag}>");
                if !tag.ends_with('/') {
                    let name: String =
                        tag.chars().take_while(|c| !c.is_whitespace()).collect();
                    stack.push(name);
                }
            }
            rest = &rest[close + 1..];
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    }

    fn flat_matrix(kind: &str) -> SpectralMatrix {
        let taus = QuantileGrid::display_default();
        let omegas = FrequencyGrid::fourier_default();
        let (nt, nf) = (taus.len(), omegas.len());
        let values: Vec<Complex64> = (0..nt * nt * nf)
            .map(|idx| {
                let i = idx / (nt * nf);
                let j = (idx / nf) % nt;
                match kind {
                    // white-noise truth: (min - t1 t2)/(2 pi), zero imaginary
                    "iid" => {
                        let (t1, t2) = (taus.levels()[i], taus.levels()[j]);
                        Complex64::new((t1.min(t2) - t1 * t2) / (2.0 * PI), 0.0)
                    }
                    // tagged values for layout inspection (Hermitian)
                    _ => Complex64::new(
                        (10 * (i.min(j) + 1) + i.max(j)) as f64,
                        if i == j { 0.0 } else if i > j { 1.0 } else { -1.0 },
                    ),
                }
            })
            .collect();
        SpectralMatrix::from_values(taus, omegas, values).unwrap()
    }

    #[test]
    fn grid_plot_iid_panels_flat_and_well_formed() {
        let est = flat_matrix("iid");
        let doc = emit_grid_plot(&est, None, &QuantileGrid::display_default()).unwrap();
        assert_well_formed_xml(&doc.svg);
        // csv row count = plotted point count = 9 panels x 33 frequencies
        let rows = doc.csv.lines().count() - 1;
        assert_eq!(rows, 9 * 33);
        // all nine panel titles present, matching the layout table
        for title in [
            "f(0.1,0.1)",
            "Im f(0.5,0.1)",
            "Im f(0.9,0.1)",
            "Re f(0.1,0.5)",
            "f(0.5,0.5)",
            "Im f(0.9,0.5)",
            "Re f(0.1,0.9)",
            "Re f(0.5,0.9)",
            "f(0.9,0.9)",
        ] {
            assert!(doc.svg.contains(title), "missing panel {title}");
        }
        // the diagonal rows carry the closed-form values; Im panels are 0
        for line in doc.csv.lines().skip(1) {
            let cells: Vec<&str> = line.split(',').collect();
            let (part, value) = (cells[4], cells[6].parse::<f64>().unwrap());
            match part {
                "im" => assert_eq!(value, 0.0),
                "diag" => {
                    let t: f64 = cells[2].parse().unwrap();
                    assert!((value - (t - t * t) / (2.0 * PI)).abs() < 1e-12);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn grid_plot_panel_placement_fixture() {
        // the (0.9, 0.1) pair must land in the top-right panel as Im
        let est = flat_matrix("tagged");
        let doc = emit_grid_plot(&est, None, &QuantileGrid::display_default()).unwrap();
        let top_right: Vec<&str> = doc
            .csv
            .lines()
            .filter(|l| l.starts_with("1,3,"))
            .collect();
        assert_eq!(top_right.len(), 33);
        for line in top_right {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells[2], "0.9"); // tau1 = column level
            assert_eq!(cells[3], "0.1"); // tau2 = row level
            assert_eq!(cells[4], "im");
        }
    }

    #[test]
    fn grid_plot_missing_level_is_an_error() {
        let est = flat_matrix("iid");
        let missing = QuantileGrid::new(vec![0.2, 0.5, 0.9]).unwrap();
        assert!(emit_grid_plot(&est, None, &missing).is_err());
    }

    fn synthetic_field(p_min: Vec<f64>) -> PValueField {
        let levels = QuantileGrid::new(vec![0.25, 0.5, 0.75]).unwrap();
        let omegas =
            FrequencyGrid::new((0..p_min.len()).map(|i| i as f64 * 0.3).collect()).unwrap();
        let pairs = 6;
        let cells = pairs * omegas.len();
        PValueField {
            levels,
            omegas,
            r: 100,
            beta: 0.1,
            p_re: vec![1.0; cells],
            p_im: vec![1.0; cells],
            sign_re: vec![1; cells],
            sign_im: vec![-1; cells],
            p_min,
            warnings: Vec::new(),
        }
    }

    #[test]
    fn summary_plot_marks_zero_with_red_circle() {
        let field = synthetic_field(vec![1.0, 0.05, 0.0, 0.01]);
        let doc = emit_summary_plot(&field).unwrap();
        assert_well_formed_xml(&doc.svg);
        assert_eq!(doc.csv.lines().count() - 1, 4);
        let red_circles = doc.svg.matches(&format!("stroke=\"{POSITIVE_COLOR}\"")).count();
        assert_eq!(red_circles, 1);
    }

    #[test]
    fn summary_plot_all_ones_has_no_red_circles() {
        let field = synthetic_field(vec![1.0; 5]);
        let doc = emit_summary_plot(&field).unwrap();
        assert!(!doc.svg.contains(&format!("stroke=\"{POSITIVE_COLOR}\"")));
    }

    #[test]
    fn detail_plot_triangles_follow_p_and_sign() {
        let mut field = synthetic_field(vec![1.0]);
        // pair (tau_1, tau_3) = upper-tri index for (0, 2): significant Re,
        // positive -> two red upward triangles in row 3, column 1
        let pair = field.pair_index(0, 2);
        field.p_re[pair] = 0.004;
        field.sign_re[pair] = 1;
        let doc = emit_detail_plot(&field, 0.0).unwrap();
        assert_well_formed_xml(&doc.svg);
        assert_eq!(doc.csv.lines().count() - 1, 9); // K x K cells
        let row: Vec<&str> = doc.csv.lines().filter(|l| l.starts_with("3,1,")).collect();
        assert_eq!(row.len(), 1);
        let cells: Vec<&str> = row[0].split(',').collect();
        assert_eq!(cells[4], "re");
        assert_eq!(cells[5].parse::<f64>().unwrap(), 0.004);
        assert_eq!(cells[6], "1");
        let triangles = doc.svg.matches(&format!("fill=\"{POSITIVE_COLOR}\"")).count();
        assert_eq!(triangles, 2, "0.001 <= p < 0.01 should draw two triangles");
    }

    #[test]
    fn detail_plot_empty_when_all_p_one() {
        let field = synthetic_field(vec![1.0]);
        let doc = emit_detail_plot(&field, 0.0).unwrap();
        assert!(!doc.svg.contains("polygon"), "no triangles expected");
        assert!(emit_detail_plot(&field, 9.9).is_err());
    }
}

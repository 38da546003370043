//! Median-steps scaling plot: a self-contained SVG 1.1 log-log scatter
//! with a least-squares slope annotation.

use crate::manifest::RunManifest;
use crate::records::RunRecord;
use crate::CliError;
use std::collections::BTreeMap;

/// Median per distinct `n`, pooling all rules and trials.
pub fn median_steps(records: &[RunRecord]) -> Vec<(usize, f64)> {
    let mut by_n: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for r in records {
        by_n.entry(r.n).or_default().push(r.steps);
    }
    by_n
        .into_iter()
        .map(|(n, mut steps)| {
            steps.sort_unstable();
            let mid = steps.len() / 2;
            let median = if steps.len() % 2 == 1 {
                steps[mid] as f64
            } else {
                (steps[mid - 1] + steps[mid]) as f64 / 2.0
            };
            (n, median)
        })
        .collect()
}

/// Least-squares slope and intercept of y against x.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, mean_y - slope * mean_x)
}

/// Slope of `ln median` against `ln n`.
pub fn loglog_slope(medians: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = medians
        .iter()
        .filter(|&&(_, m)| m > 0.0)
        .map(|&(n, m)| ((n as f64).ln(), m.ln()))
        .collect();
    least_squares(&pts).0
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Renders the scatter. Errors (no file content) when there is no data.
pub fn render_svg(records: &[RunRecord], manifest: &RunManifest) -> Result<String, CliError> {
    let medians = median_steps(records);
    if medians.is_empty() {
        return Err(CliError::Usage("no data rows to plot".to_string()));
    }
    let slope = loglog_slope(&medians);
    let xs: Vec<f64> = medians.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = medians.iter().map(|&(_, m)| m.max(1.0).ln()).collect();
    let (x_lo, x_hi) = span(&xs);
    let (y_lo, y_hi) = span(&ys);
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo).max(1e-9) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo).max(1e-9) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!("<!-- manifest: {} -->\n", manifest.to_json()));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    ));
    for (&(n, median), (x, y)) in medians.iter().zip(xs.iter().zip(&ys)) {
        svg.push_str(&format!(
            "<circle class=\"pt\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"steelblue\"/>\n",
            sx(*x),
            sy(*y)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\">n={n} med={median}</text>\n",
            sx(*x) + 6.0,
            sy(*y) - 6.0
        ));
    }
    // Fitted line across the x range.
    let (s, intercept) = least_squares(
        &xs.iter().copied().zip(ys.iter().copied()).collect::<Vec<_>>(),
    );
    svg.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"firebrick\" stroke-dasharray=\"4 3\"/>\n",
        sx(x_lo),
        sy(s * x_lo + intercept),
        sx(x_hi),
        sy(s * x_hi + intercept)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"14\">median steps vs n (log-log), slope = {slope:.6}</text>\n",
        MARGIN,
        MARGIN - 20.0
    ));
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn span(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

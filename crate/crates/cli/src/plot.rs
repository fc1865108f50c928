//! SVG panels from an emitted CSV. One file per observable and facet.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use serde::Deserialize;

use crate::error::CliError;

fn default_series() -> String {
    "method".to_string()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSpec {
    /// Column on the horizontal axis.
    pub x: String,
    /// Column whose values label the curves.
    #[serde(default = "default_series")]
    pub series: String,
    pub observables: Vec<String>,
    /// Columns that split the data into separate panels.
    #[serde(default)]
    pub facets: Vec<String>,
    #[serde(default)]
    pub log_x: bool,
    #[serde(default)]
    pub title: Option<String>,
    /// Restricts the curves to these series values, in this order.
    #[serde(default)]
    pub include: Option<Vec<String>>,
}

impl PlotSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        if text.trim().is_empty() {
            return Err(CliError::Config("plot spec is empty".into()));
        }
        let spec: PlotSpec = toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        if spec.observables.is_empty() {
            return Err(CliError::Config("plot spec lists no observables".into()));
        }
        Ok(spec)
    }
}

/// Curves of one panel: series label to `(x, y)` points, in first-seen order.
type Panel = Vec<(String, Vec<(f64, f64)>)>;

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()?;
        Ok(Table { header, rows })
    }

    fn column(&self, name: &str) -> Result<usize, CliError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("column {name:?} not in CSV (have {:?})", self.header)))
    }
}

fn panels(table: &Table, spec: &PlotSpec, observable: &str) -> Result<Vec<(String, Panel)>, CliError> {
    let xi = table.column(&spec.x)?;
    let si = table.column(&spec.series)?;
    let yi = table.column(observable)?;
    let fi = spec.facets.iter().map(|f| table.column(f)).collect::<Result<Vec<_>, _>>()?;

    let mut out: Vec<(String, Panel)> = Vec::new();
    for row in &table.rows {
        let series = &row[si];
        if let Some(inc) = &spec.include {
            if !inc.contains(series) {
                continue;
            }
        }
        let (Ok(x), Ok(y)) = (row[xi].parse::<f64>(), row[yi].parse::<f64>()) else { continue };
        if !x.is_finite() || !y.is_finite() || (spec.log_x && x <= 0.0) {
            continue;
        }
        let key = spec
            .facets
            .iter()
            .zip(&fi)
            .map(|(f, &i)| format!("{f}={}", short(&row[i])))
            .collect::<Vec<_>>()
            .join(",");
        let panel = match out.iter().position(|(k, _)| *k == key) {
            Some(p) => &mut out[p].1,
            None => {
                out.push((key, Vec::new()));
                &mut out.last_mut().unwrap().1
            }
        };
        match panel.iter().position(|(s, _)| s == series) {
            Some(p) => panel[p].1.push((x, y)),
            None => panel.push((series.clone(), vec![(x, y)])),
        }
    }
    if let Some(inc) = &spec.include {
        for (_, panel) in &mut out {
            panel.sort_by_key(|(s, _)| inc.iter().position(|i| i == s));
        }
    }
    for (_, panel) in &mut out {
        for (_, pts) in panel.iter_mut() {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
    }
    Ok(out)
}

/// Facet values as they appear in file names: `1.50000000000e0` becomes `1.5`.
fn short(v: &str) -> String {
    match v.parse::<f64>() {
        Ok(x) => format!("{x}"),
        Err(_) => v.to_string(),
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = 0.5 * lo.abs().max(1e-3);
        (lo - pad, hi + pad)
    }
}

fn draw(path: &Path, title: &str, x_label: &str, y_label: &str, panel: &Panel) -> Result<(), Box<dyn std::error::Error>> {
    let all = || panel.iter().flat_map(|(_, p)| p.iter());
    let (x0, x1) = bounds(all().map(|p| p.0));
    let (y0, y1) = bounds(all().map(|p| p.1));

    let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(x0..x1, y0..y1)?;
    chart.configure_mesh().x_desc(x_label).y_desc(y_label).draw()?;
    for (i, (name, pts)) in panel.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))?
            .label(name.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
        if pts.len() == 1 {
            chart.draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))?;
        }
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()?;
    root.present()?;
    Ok(())
}

/// Renders every panel and returns the written paths in a stable order.
pub fn render(csv_path: &Path, spec: &PlotSpec, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let table = Table::read(csv_path)?;
    if table.rows.is_empty() {
        return Err(CliError::Config(format!("{} has no data rows", csv_path.display())));
    }
    std::fs::create_dir_all(out)?;
    let stem = csv_path.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let mut written = Vec::new();
    for obs in &spec.observables {
        let ps = panels(&table, spec, obs)?;
        if ps.is_empty() {
            return Err(CliError::Config(format!("no finite data for {obs:?}")));
        }
        for (key, panel) in ps {
            let name = if key.is_empty() {
                format!("{stem}_{obs}.svg")
            } else {
                format!("{stem}_{obs}_{}.svg", key.replace(',', "_"))
            };
            let path = out.join(name);
            let mut title = spec.title.clone().unwrap_or_else(|| obs.clone());
            if !key.is_empty() {
                title = format!("{title} ({})", key.replace(',', ", "));
            }
            let x_label = if spec.log_x { format!("log10 {}", spec.x) } else { spec.x.clone() };
            let panel = if spec.log_x {
                panel
                    .into_iter()
                    .map(|(s, pts)| (s, pts.into_iter().map(|(x, y)| (x.log10(), y)).collect()))
                    .collect()
            } else {
                panel
            };
            draw(&path, &title, &x_label, obs, &panel).map_err(|e| CliError::Io(e.to_string()))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Number of distinct series per panel, for checks on rendered output.
pub fn series_counts(csv_path: &Path, spec: &PlotSpec, observable: &str) -> Result<BTreeMap<String, usize>, CliError> {
    let table = Table::read(csv_path)?;
    Ok(panels(&table, spec, observable)?.into_iter().map(|(k, p)| (k, p.len())).collect())
}

//! Study artifacts: `report.csv`, `solution.csv` and three static SVG charts.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use scuc_core::metrics::{OverloadAggregation, OverloadCount, StudyReport, StudyRow, ViolationEnergy};
use scuc_core::{MilpModel, Solution, SolveStatus, Variant};

/// One `report.csv` line. The first eleven columns are the published
/// interface; the rest make the file a lossless copy of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Record {
    variant: String,
    beta: f64,
    status: String,
    objective_usd: Option<f64>,
    generation_cost_usd: Option<f64>,
    penalty_usd: Option<f64>,
    violation_energy_puh: Option<f64>,
    overload_line_hours: usize,
    curtailment_mwh: Option<f64>,
    reduction_pct: Option<f64>,
    savings_usd: Option<f64>,
    base_thermal_puh: f64,
    base_shedding_puh: f64,
    contingency_thermal_puh: f64,
    contingency_shedding_puh: f64,
    overload_triples: usize,
    overload_distinct_lines: usize,
    overload_pct: Option<f64>,
    mip_gap: Option<f64>,
    wall_seconds: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl From<&StudyRow> for Record {
    fn from(r: &StudyRow) -> Self {
        Self {
            variant: r.variant.as_str().into(),
            beta: r.beta,
            status: r.status.as_str().into(),
            objective_usd: finite(r.objective),
            generation_cost_usd: finite(r.generation_cost),
            penalty_usd: finite(r.penalty),
            violation_energy_puh: r.solved().then(|| r.violation.total()),
            overload_line_hours: r.overloads.line_hours,
            curtailment_mwh: finite(r.curtailment_mwh),
            reduction_pct: r.reduction_pct,
            savings_usd: r.savings_usd,
            base_thermal_puh: r.violation.base_thermal,
            base_shedding_puh: r.violation.base_shedding,
            contingency_thermal_puh: r.violation.contingency_thermal,
            contingency_shedding_puh: r.violation.contingency_shedding,
            overload_triples: r.overloads.triples,
            overload_distinct_lines: r.overloads.distinct_lines,
            overload_pct: r.overload_pct,
            mip_gap: finite(r.mip_gap),
            wall_seconds: r.wall_seconds,
        }
    }
}

impl Record {
    fn into_row(self) -> Result<StudyRow, String> {
        let variant: Variant = self.variant.parse().map_err(|e| format!("{e}"))?;
        let status = SolveStatus::parse(&self.status).ok_or_else(|| format!("unknown status `{}`", self.status))?;
        Ok(StudyRow {
            variant,
            beta: self.beta,
            status,
            objective: self.objective_usd.unwrap_or(f64::NAN),
            generation_cost: self.generation_cost_usd.unwrap_or(f64::NAN),
            penalty: self.penalty_usd.unwrap_or(f64::NAN),
            violation: ViolationEnergy {
                base_thermal: self.base_thermal_puh,
                base_shedding: self.base_shedding_puh,
                contingency_thermal: self.contingency_thermal_puh,
                contingency_shedding: self.contingency_shedding_puh,
            },
            overloads: OverloadCount {
                triples: self.overload_triples,
                line_hours: self.overload_line_hours,
                distinct_lines: self.overload_distinct_lines,
            },
            curtailment_mwh: self.curtailment_mwh.unwrap_or(f64::NAN),
            mip_gap: self.mip_gap.unwrap_or(f64::NAN),
            wall_seconds: self.wall_seconds,
            reduction_pct: self.reduction_pct,
            savings_usd: self.savings_usd,
            overload_pct: self.overload_pct,
        })
    }
}

pub fn write_report<W: io::Write>(report: &StudyReport, w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in &report.rows {
        out.serialize(Record::from(row))?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a `report.csv`; the rows are taken as written, comparisons included.
pub fn read_report<R: io::Read>(r: R, aggregation: OverloadAggregation) -> Result<StudyReport, String> {
    let mut input = csv::Reader::from_reader(r);
    let rows = input
        .deserialize::<Record>()
        .enumerate()
        .map(|(i, rec)| rec.map_err(|e| format!("row {}: {e}", i + 1)).and_then(Record::into_row))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StudyReport { rows, aggregation })
}

pub fn write_report_file(report: &StudyReport, path: &Path) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    write_report(report, io::BufWriter::new(file)).map_err(io::Error::other)
}

/// Unit of a variable family, and the factor from model units.
fn unit_of(name: &str, mva_base: f64) -> (&'static str, f64) {
    let family = name.split('[').next().unwrap_or(name);
    match family {
        "theta" | "thetac" => ("rad", 1.0),
        "uc" | "vs" => ("binary", 1.0),
        _ => ("MW", mva_base),
    }
}

/// Every variable value, converted to MW except angles (rad) and binaries.
pub fn write_solution<W: io::Write>(model: &MilpModel, sol: &Solution, mva_base: f64, w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "value", "unit"])?;
    for (info, &x) in model.vars().iter().zip(&sol.values) {
        let (unit, scale) = unit_of(&info.name, mva_base);
        let value = x * scale;
        // keep -0 out of the file
        let value = if value == 0.0 { 0.0 } else { value };
        out.write_record([info.name.as_str(), &value.to_string(), unit])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_solution_file(model: &MilpModel, sol: &Solution, mva_base: f64, path: &Path) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    write_solution(model, sol, mva_base, io::BufWriter::new(file)).map_err(io::Error::other)
}

/// One-paragraph text summary of a row.
pub fn summary(row: &StudyRow) -> String {
    if !row.solved() {
        return format!("{} beta={}: {}\n", row.variant, row.beta, row.status);
    }
    let mut s = format!(
        "{} beta={}: {} (gap {:.4}, {:.1} s)\n",
        row.variant, row.beta, row.status, row.mip_gap, row.wall_seconds
    );
    let _ = writeln!(s, "  objective        ${:.2}", row.objective);
    let _ = writeln!(s, "  generation cost  ${:.2}", row.generation_cost);
    let _ = writeln!(s, "  penalty          ${:.2}", row.penalty);
    let _ = writeln!(
        s,
        "  violation        {:.6} p.u.h (base {:.6}, contingency {:.6})",
        row.violation.total(),
        row.violation.base(),
        row.violation.contingency()
    );
    let _ = writeln!(
        s,
        "  overloads        {} line-hours, {} lines",
        row.overloads.line_hours, row.overloads.distinct_lines
    );
    let _ = writeln!(s, "  curtailment      {:.1} MWh", row.curtailment_mwh);
    s
}

// ---- charts -------------------------------------------------------------

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 5] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];

struct Frame {
    y_max: f64,
    s: String,
}

impl Frame {
    fn new(title: &str, y_label: &str, y_max: f64) -> Self {
        let y_max = nice_ceiling(y_max);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            (LEFT + W - RIGHT) / 2.0,
            escape(title)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(18,{}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (TOP + H - BOTTOM) / 2.0,
            escape(y_label)
        );
        for i in 0..=4 {
            let v = y_max * i as f64 / 4.0;
            let y = Self::y_at(y_max, v);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
                W - RIGHT,
                LEFT - 6.0,
                y + 4.0,
                tick(v)
            );
        }
        let _ = writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            H - BOTTOM,
            W - RIGHT,
            H - BOTTOM
        );
        Self { y_max, s }
    }

    fn y_at(y_max: f64, v: f64) -> f64 {
        let span = H - TOP - BOTTOM;
        H - BOTTOM - span * (v / y_max).clamp(0.0, 1.0)
    }

    fn y(&self, v: f64) -> f64 {
        Self::y_at(self.y_max, v)
    }

    fn legend(&mut self, names: &[&str]) {
        for (i, name) in names.iter().enumerate() {
            let y = TOP + 18.0 * i as f64;
            let _ = writeln!(
                self.s,
                r#"<rect x="{}" y="{y}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{}</text>"#,
                W - RIGHT + 14.0,
                COLORS[i % COLORS.len()],
                W - RIGHT + 32.0,
                y + 10.0,
                escape(name)
            );
        }
    }

    fn finish(mut self) -> String {
        self.s.push_str("</svg>\n");
        self.s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e6 {
        format!("{:.2}M", v / 1e6)
    } else if v.abs() >= 1e3 {
        format!("{:.1}k", v / 1e3)
    } else {
        format!("{v:.1}")
    }
}

fn nice_ceiling(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    let mag = 10f64.powf(x.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|&c| c >= x).unwrap_or(10.0 * mag)
}

/// Grouped bars: one group per label, one bar per series; `reference`
/// draws a dashed horizontal line.
pub fn bar_chart(
    title: &str,
    y_label: &str,
    groups: &[String],
    series: &[(&str, Vec<Option<f64>>)],
    reference: Option<(&str, f64)>,
) -> String {
    let max = series
        .iter()
        .flat_map(|(_, v)| v.iter().flatten().copied())
        .chain(reference.map(|r| r.1))
        .fold(0.0, f64::max);
    let mut f = Frame::new(title, y_label, max);
    let plot_w = W - LEFT - RIGHT;
    let group_w = plot_w / groups.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    for (gi, label) in groups.iter().enumerate() {
        let gx = LEFT + gi as f64 * group_w;
        let _ = writeln!(
            f.s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            gx + group_w / 2.0,
            H - BOTTOM + 18.0,
            escape(label)
        );
        for (si, (_, values)) in series.iter().enumerate() {
            let Some(v) = values.get(gi).copied().flatten() else { continue };
            let x = gx + group_w * 0.1 + si as f64 * bar_w;
            let y = f.y(v.max(0.0));
            let _ = writeln!(
                f.s,
                r#"<rect x="{x:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="{}"><title>{}</title></rect>"#,
                bar_w * 0.95,
                H - BOTTOM - y,
                COLORS[si % COLORS.len()],
                tick(v)
            );
        }
    }
    if let Some((name, v)) = reference {
        let y = f.y(v);
        let _ = writeln!(
            f.s,
            r#"<line x1="{LEFT}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="black" stroke-dasharray="6,4"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            W - RIGHT,
            W - RIGHT - 4.0,
            y - 4.0,
            escape(name)
        );
    }
    let names: Vec<&str> = series.iter().map(|s| s.0).collect();
    f.legend(&names);
    f.finish()
}

/// Polylines over a shared numeric x axis.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let max = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).fold(0.0, f64::max);
    let (x_lo, x_hi) = series
        .iter()
        .flat_map(|(_, p)| p.iter().map(|q| q.0))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (x_lo, x_hi) = if x_lo < x_hi { (x_lo, x_hi) } else { (0.0, 1.0) };
    let mut f = Frame::new(title, y_label, max);
    let plot_w = W - LEFT - RIGHT;
    let x_at = |x: f64| LEFT + 20.0 + (plot_w - 40.0) * (x - x_lo) / (x_hi - x_lo);
    let mut xs: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for x in xs {
        let _ = writeln!(
            f.s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{x}</text>"#,
            x_at(x),
            H - BOTTOM + 18.0
        );
    }
    let _ = writeln!(
        f.s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        H - 12.0,
        escape(x_label)
    );
    for (si, (_, points)) in series.iter().enumerate() {
        let color = COLORS[si % COLORS.len()];
        let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.1},{:.1}", x_at(x), f.y(y))).collect();
        let _ = writeln!(
            f.s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(x, y) in points {
            let _ = writeln!(
                f.s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"><title>{}</title></circle>"#,
                x_at(x),
                f.y(y),
                tick(y)
            );
        }
    }
    let names: Vec<&str> = series.iter().map(|s| s.0).collect();
    f.legend(&names);
    f.finish()
}

/// Savings against Fixed-DC per beta, one line per flexible variant.
pub fn savings_chart(report: &StudyReport) -> String {
    let series: Vec<(&str, Vec<(f64, f64)>)> = Variant::FLEXIBLE
        .iter()
        .map(|&v| {
            let pts = report.series(v).filter_map(|r| r.savings_usd.map(|s| (r.beta, s))).collect();
            (v.label(), pts)
        })
        .collect();
    line_chart("Cost savings vs. Fixed DC", "beta", "savings ($)", &series)
}

fn betas(report: &StudyReport) -> Vec<f64> {
    let mut b: Vec<f64> = report.rows.iter().filter(|r| r.variant.is_flexible()).map(|r| r.beta).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn grouped(report: &StudyReport, value: impl Fn(&StudyRow) -> Option<f64>) -> (Vec<String>, Vec<(&'static str, Vec<Option<f64>>)>) {
    let b = betas(report);
    let groups = b.iter().map(|x| format!("beta {x}")).collect();
    let series = Variant::FLEXIBLE
        .iter()
        .map(|&v| (v.label(), b.iter().map(|&x| report.get(v, x).and_then(&value)).collect()))
        .collect();
    (groups, series)
}

/// Contingency overloads as a percentage of the Fixed-DC count.
pub fn overloads_chart(report: &StudyReport) -> String {
    let (groups, series) = grouped(report, |r| r.overload_pct);
    let title = format!("Contingency overloads ({}), % of Fixed DC", report.aggregation);
    bar_chart(&title, "% of Fixed DC", &groups, &series, Some(("Fixed DC", 100.0)))
}

/// Renewable curtailment per beta, with Fixed-DC as the reference line.
pub fn curtailment_chart(report: &StudyReport) -> String {
    let (groups, series) = grouped(report, |r| r.solved().then_some(r.curtailment_mwh));
    let reference = report.fixed().filter(|r| r.solved()).map(|r| ("Fixed DC", r.curtailment_mwh));
    bar_chart("Renewable curtailment", "MWh", &groups, &series, reference)
}

/// Writes `report.csv` and the three charts into `dir`.
pub fn write_study(report: &StudyReport, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_report_file(report, &dir.join("report.csv"))?;
    std::fs::write(dir.join("savings.svg"), savings_chart(report))?;
    std::fs::write(dir.join("overloads.svg"), overloads_chart(report))?;
    std::fs::write(dir.join("curtailment.svg"), curtailment_chart(report))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(variant: Variant, beta: f64, objective: f64, penalty: f64) -> StudyRow {
        StudyRow {
            variant,
            beta,
            status: SolveStatus::Optimal,
            objective,
            generation_cost: objective - penalty,
            penalty,
            violation: ViolationEnergy {
                base_thermal: penalty / 2e6,
                base_shedding: 0.0,
                contingency_thermal: penalty / 2e6,
                contingency_shedding: 0.0,
            },
            overloads: OverloadCount {
                triples: 3,
                line_hours: 2,
                distinct_lines: 1,
            },
            curtailment_mwh: 12.5,
            mip_gap: 0.004,
            wall_seconds: 1.25,
            reduction_pct: None,
            savings_usd: None,
            overload_pct: None,
        }
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            row(Variant::FixedDc, 0.0, 7.31e6, 5.47e6),
            row(Variant::SpatioTemporal, 0.4, 1.91e6, 0.0),
            StudyRow::failed(Variant::Spatial, 0.1, SolveStatus::Infeasible),
        ];
        let report = StudyReport::new(rows, OverloadAggregation::LineHours);
        let mut buf = Vec::new();
        write_report(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "variant,beta,status,objective_usd,generation_cost_usd,penalty_usd,violation_energy_puh,overload_line_hours,curtailment_mwh,reduction_pct,savings_usd,"
        ));
        let back = read_report(buf.as_slice(), OverloadAggregation::LineHours).unwrap();
        let mut again = Vec::new();
        write_report(&back, &mut again).unwrap();
        assert_eq!(buf, again);
        assert_eq!(back.rows[0], report.rows[0]);
        assert!(back.rows.iter().any(|r| r.status == SolveStatus::Infeasible && r.objective.is_nan()));
    }

    #[test]
    fn charts_are_complete_documents() {
        let report = StudyReport::new(
            vec![
                row(Variant::FixedDc, 0.0, 7.0e6, 5.0e6),
                row(Variant::Spatial, 0.2, 6.0e6, 4.0e6),
                row(Variant::Temporal, 0.2, 5.0e6, 3.0e6),
                row(Variant::SpatioTemporal, 0.2, 2.0e6, 0.0),
            ],
            OverloadAggregation::LineHours,
        );
        for svg in [savings_chart(&report), overloads_chart(&report), curtailment_chart(&report)] {
            assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        }
        assert!(curtailment_chart(&report).contains("Fixed DC"));
        assert_eq!(nice_ceiling(7.3), 10.0);
        assert_eq!(nice_ceiling(0.0), 1.0);
    }

    #[test]
    fn units_by_family() {
        assert_eq!(unit_of("P[3,0]", 100.0), ("MW", 100.0));
        assert_eq!(unit_of("thetac[5,2,1]", 100.0), ("rad", 1.0));
        assert_eq!(unit_of("uc[1,1]", 100.0), ("binary", 1.0));
    }
}

//! TSV report tables and their aligned text rendering.

use std::fmt::Write as _;

use rcdensity::clauses::SummaryCell;
use rcdensity::{
    ChiSquare, ClauseGivenness, ClauseMetrics, ClauseRecord, LinearizationKind, Mode, Part,
    SalienceCategory, SummaryTable, Variant,
};

pub const VARIANTS: [Variant; 2] = [Variant::InSitu, Variant::Extraposed];

fn ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_owned(), |r| format!("{r:.4}"))
}

fn cell_fields(cell: Option<&SummaryCell>) -> String {
    match cell {
        Some(c) => format!("{}\t{:.4}\t{:.4}", c.n, c.mean_ads, c.mean_avs),
        None => "0\t-\t-".to_owned(),
    }
}

/// The rows of the surprisal tables: relative and matrix clause scored
/// separately, then the complex in the in-situ order.
fn surprisal_rows(variant: Variant) -> [(Part, LinearizationKind, String); 3] {
    let separate = LinearizationKind::for_order(variant, Variant::Extraposed);
    let combined = LinearizationKind::for_order(variant, Variant::InSitu);
    let combined_label = match combined {
        LinearizationKind::Attested => Part::Combined.label().to_owned(),
        LinearizationKind::Hypothetical => format!("{} (as if in-situ)", Part::Combined.label()),
    };
    [
        (Part::Rc, separate, Part::Rc.label().to_owned()),
        (Part::Matrix, separate, Part::Matrix.label().to_owned()),
        (Part::Combined, combined, combined_label),
    ]
}

/// Additive and average surprisal per variant for one mode.
pub fn surprisal_table(summary: &SummaryTable, mode: Mode) -> String {
    let mut out = String::from("variant\tclause\tscored_order\tn\tadS\tavS\n");
    for variant in VARIANTS {
        for (part, lin, label) in surprisal_rows(variant) {
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                variant,
                label,
                lin.order(variant),
                cell_fields(summary.get(variant, part, mode, lin))
            )
            .unwrap();
        }
    }
    out
}

/// Every counterfactual-order measurement, both modes.
pub fn hypotheticals_table(summary: &SummaryTable) -> String {
    let mut out = String::from("variant\tclause\tmode\tas_if\tn\tadS\tavS\n");
    for variant in VARIANTS {
        for mode in [Mode::Bare, Mode::Accommodated] {
            for part in [Part::Rc, Part::Matrix, Part::Combined] {
                let lin = LinearizationKind::Hypothetical;
                let Some(cell) = summary.get(variant, part, mode, lin) else {
                    continue;
                };
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    variant,
                    part.label(),
                    mode_name(mode),
                    lin.order(variant),
                    cell_fields(Some(cell))
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Bare => "bare",
        Mode::Accommodated => "accommodated",
    }
}

fn kind_name(kind: LinearizationKind) -> &'static str {
    match kind {
        LinearizationKind::Attested => "attested",
        LinearizationKind::Hypothetical => "hypothetical",
    }
}

/// One row per record and measurement.
pub fn metrics_table(rows: &[(&ClauseRecord, ClauseMetrics)]) -> String {
    let mut out =
        String::from("record\tdoc\tvariant\tclause\tmode\tlinearization\torder\tn\tadS\tavS\n");
    for (record, m) in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
            record.id,
            record.doc_id,
            record.variant,
            m.part.label(),
            mode_name(m.mode),
            kind_name(m.linearization),
            m.linearization.order(record.variant),
            m.n_scored,
            m.ads,
            m.avs
        )
        .unwrap();
    }
    out
}

pub const GIVENNESS_PARTS: [Part; 3] = [Part::Rc, Part::Matrix, Part::Combined];

/// Referent counts and ratios per variant and clause part.
pub fn givenness_table(rows: &[(Variant, Part, ClauseGivenness)]) -> String {
    let mut out = String::from("variant\tclause\treferents\tnew\tnew_ratio");
    for c in &SalienceCategory::ALL[1..] {
        write!(out, "\t{}", c.as_str()).unwrap();
    }
    out.push_str("\tsalient\tsalient_ratio\n");
    for (variant, part, g) in rows {
        write!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            variant,
            part.label(),
            g.total,
            g.new_count(),
            ratio(g.new_ratio())
        )
        .unwrap();
        for c in &SalienceCategory::ALL[1..] {
            write!(out, "\t{}", g.count(*c)).unwrap();
        }
        writeln!(out, "\t{}\t{}", g.salient_count(), ratio(g.salient_ratio())).unwrap();
    }
    out
}

/// A 2x2 comparison of in-situ against extraposed clauses.
pub struct Comparison {
    pub label: String,
    pub table: [u64; 4],
    pub result: Option<ChiSquare>,
}

pub fn chi_square_table(rows: &[Comparison]) -> String {
    let mut out = String::from(
        "comparison\tin_situ_yes\tin_situ_no\textraposed_yes\textraposed_no\tstatistic\tp_value\n",
    );
    for row in rows {
        let [a, b, c, d] = row.table;
        let (stat, p) = match row.result {
            Some(r) => (format!("{:.4}", r.statistic), format!("{:.4}", r.p_value)),
            None => ("-".to_owned(), "-".to_owned()),
        };
        writeln!(out, "{}\t{a}\t{b}\t{c}\t{d}\t{stat}\t{p}", row.label).unwrap();
    }
    out
}

/// Pads TSV columns to a common width for reading in a terminal.
pub fn align(tsv: &str) -> String {
    let rows: Vec<Vec<&str>> = tsv.lines().map(|l| l.split('\t').collect()).collect();
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (c, field) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let pad = widths[c] - field.chars().count();
            if field.parse::<f64>().is_ok() {
                line.extend(std::iter::repeat_n(' ', pad));
                line.push_str(field);
            } else {
                line.push_str(field);
                line.extend(std::iter::repeat_n(' ', pad));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

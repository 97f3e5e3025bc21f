//! Report rendering: one markdown table per (model, strategy) with the
//! band × k-shot column layout, plus a flat CSV of every cell for external
//! plotting.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::eval::{CellMarker, EvalError, SettingCell};
use crate::generator::{OrderBand, ProblemKind};
use crate::prompt::PromptStrategy;

/// Cell text: a marker symbol when one applies, the bare binary mean when
/// it is 1.0, otherwise `binary/partial` with one and two decimals.
pub fn render_cell(cell: &SettingCell) -> String {
    if let Some(marker) = cell.marker {
        return marker.symbol().to_string();
    }
    if cell.mean_binary == 1.0 {
        "1.0".to_string()
    } else {
        format!("{:.1}/{:.2}", cell.mean_binary, cell.mean_partial)
    }
}

/// All cells of one model under one strategy, addressable by
/// (kind, band, k).
#[derive(Debug, Clone)]
pub struct ReportTable {
    pub model: String,
    pub strategy: PromptStrategy,
    pub cells: BTreeMap<(ProblemKind, OrderBand, usize), SettingCell>,
}

impl ReportTable {
    /// The rendering of one grid position. Settings with no data show `-`;
    /// Euler rows outside O(10) are structurally omitted.
    pub fn cell_text(&self, kind: ProblemKind, band: OrderBand, k: usize) -> String {
        match self.cells.get(&(kind, band, k)) {
            Some(cell) => render_cell(cell),
            None => CellMarker::Omitted.symbol().to_string(),
        }
    }
}

/// Groups aggregated cells into per-(model, strategy) tables.
pub fn build_tables(cells: &[SettingCell]) -> Vec<ReportTable> {
    let mut tables: BTreeMap<(String, PromptStrategy), ReportTable> = BTreeMap::new();
    for cell in cells {
        let table = tables
            .entry((cell.model.clone(), cell.strategy))
            .or_insert_with(|| ReportTable {
                model: cell.model.clone(),
                strategy: cell.strategy,
                cells: BTreeMap::new(),
            });
        table.cells.insert((cell.kind, cell.band, cell.k), cell.clone());
    }
    tables.into_values().collect()
}

const SHOT_COLUMNS: [usize; 3] = [0, 1, 3];

/// Pipe-syntax markdown for every table.
pub fn render_markdown(tables: &[ReportTable]) -> String {
    let mut out = String::from("# Benchmark report\n");
    for table in tables {
        out.push_str(&format!("\n## {} ({})\n\n", table.model, table.strategy));
        out.push_str("| Problem |");
        for band in OrderBand::ALL {
            for k in SHOT_COLUMNS {
                out.push_str(&format!(" {} {k}-shot |", band.display_name()));
            }
        }
        out.push('\n');
        out.push_str("|---|");
        for _ in 0..OrderBand::ALL.len() * SHOT_COLUMNS.len() {
            out.push_str("---|");
        }
        out.push('\n');

        let kinds: BTreeSet<ProblemKind> =
            table.cells.keys().map(|(kind, _, _)| *kind).collect();
        for kind in kinds {
            out.push_str(&format!("| {kind} |"));
            for band in OrderBand::ALL {
                for k in SHOT_COLUMNS {
                    out.push_str(&format!(" {} |", table.cell_text(kind, band, k)));
                }
            }
            out.push('\n');
        }
    }
    out
}

#[derive(Serialize)]
struct CellRow<'a> {
    model: &'a str,
    kind: ProblemKind,
    band: OrderBand,
    k: usize,
    strategy: PromptStrategy,
    mean_binary: f64,
    mean_partial: f64,
    marker: &'a str,
}

/// Flat CSV of all cells, one row per setting, sorted by
/// (model, kind, band, k, strategy).
pub fn render_cells_csv(cells: &[SettingCell]) -> Result<String, EvalError> {
    let mut sorted: Vec<&SettingCell> = cells.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.model, a.kind, a.band, a.k, a.strategy)
            .cmp(&(&b.model, b.kind, b.band, b.k, b.strategy))
    });
    let mut writer = csv::Writer::from_writer(Vec::new());
    for cell in sorted {
        writer.serialize(CellRow {
            model: &cell.model,
            kind: cell.kind,
            band: cell.band,
            k: cell.k,
            strategy: cell.strategy,
            mean_binary: cell.mean_binary,
            mean_partial: cell.mean_partial,
            marker: cell.marker.map(CellMarker::symbol).unwrap_or(""),
        })?;
    }
    let bytes = writer.into_inner().expect("in-memory writer");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

use std::fmt::Write as _;
use std::path::Path;

use super::{CurveRow, EvolutionError};

pub const CURVE_HEADER: &str = "generation,best,mean,std,mutation_rate_connectome,mutation_rate_enc_dec";

/// One header line and one row per generation. Floats carry 17 significant
/// digits so parsing them back is lossless.
pub fn format_curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.generation, r.best, r.mean, r.std, r.mutation_rate_connectome, r.mutation_rate_enc_dec
        );
    }
    out
}

pub fn emit_curve_csv(rows: &[CurveRow], path: &Path) -> Result<(), EvolutionError> {
    if rows.is_empty() {
        return Err(EvolutionError::Config("a curve needs at least one generation".into()));
    }
    std::fs::write(path, format_curve_csv(rows))
        .map_err(|e| EvolutionError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRow>, EvolutionError> {
    let mut lines = text.lines();
    if lines.next() != Some(CURVE_HEADER) {
        return Err(EvolutionError::Csv { line: 1, message: "missing or wrong header".into() });
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = |message: String| EvolutionError::Csv { line: i + 2, message };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(bad(format!("expected 6 fields, found {}", fields.len())));
            }
            let generation = fields[0].parse().map_err(|e| bad(format!("generation: {e}")))?;
            let mut v = [0.0; 5];
            for (slot, field) in v.iter_mut().zip(&fields[1..]) {
                *slot = field.parse().map_err(|e| bad(format!("`{field}`: {e}")))?;
            }
            Ok(CurveRow {
                generation,
                best: v[0],
                mean: v[1],
                std: v[2],
                mutation_rate_connectome: v[3],
                mutation_rate_enc_dec: v[4],
            })
        })
        .collect()
}

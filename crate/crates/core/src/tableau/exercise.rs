//! Exercise files: one signed atomic formula per line.

use super::TableauError;
use crate::syntax::{SignedFormula, Signature, VarScope};

const NON_ATOMIC: &[&str] = &["and", "or", "not", "forall", "exists", "true", "false"];

/// Parses an exercise. Blank lines and `#` comments are skipped, and
/// variables are object variables.
pub fn parse_exercise(text: &str, sig: &Signature) -> Result<Vec<SignedFormula>, TableauError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if looks_non_atomic(line) {
            return Err(TableauError::NotAtomic {
                line: i + 1,
                text: line.to_string(),
            });
        }
        let sf = sig.parse_signed(line, VarScope::Object).map_err(|mut e| {
            e.line += i;
            e
        })?;
        if !out.contains(&sf) {
            out.push(sf);
        }
    }
    if out.is_empty() {
        return Err(TableauError::EmptyExercise);
    }
    Ok(out)
}

fn looks_non_atomic(line: &str) -> bool {
    line.contains("->")
        || line.contains(['∧', '∨', '¬', '→', '↔', '∀', '∃'])
        || line
            .split(|c: char| !c.is_alphanumeric() && c != '_')
            .any(|w| NON_ATOMIC.contains(&w))
}

pub fn render_exercise(formulas: &[SignedFormula]) -> String {
    formulas.iter().map(|sf| format!("{}\n", sf)).collect()
}

//! Glyph rendering for text output: `in(x, inter(y, z))` prints as `x ∈ y ∩ z`.

use std::fmt;

use super::{Atom, Sign, SignedFormula, SymbolKind, Term};

/// Display glyph for the ASCII names used in theory files.
pub fn glyph(name: &str) -> Option<&'static str> {
    Some(match name {
        "in" => "∈",
        "subseteq" => "⊆",
        "disj" => "⟩⟨",
        "union" => "∪",
        "inter" => "∩",
        "diff" => "\\",
        "prod" => "×",
        "symdiff" => "△",
        "compl" => "∁",
        "emptyset" => "∅",
        _ => return None,
    })
}

/// Wrapper whose `Display` uses glyphs and infix notation for binary symbols.
pub struct Pretty<'a, T: ?Sized>(pub &'a T);

fn write_term(t: &Term, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
    let name = t.head().name();
    let g = glyph(name);
    match (t.args().len(), g) {
        (0, Some(g)) => f.write_str(g),
        (0, None) => f.write_str(name),
        (2, Some(g)) => {
            if nested {
                f.write_str("(")?;
            }
            let inner = t.head().kind() != SymbolKind::Predicate;
            write_term(&t.args()[0], f, inner)?;
            write!(f, " {} ", g)?;
            write_term(&t.args()[1], f, inner)?;
            if nested {
                f.write_str(")")?;
            }
            Ok(())
        }
        (_, g) => {
            f.write_str(g.unwrap_or(name))?;
            f.write_str("(")?;
            for (i, a) in t.args().iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_term(a, f, false)?;
            }
            f.write_str(")")
        }
    }
}

impl fmt::Display for Pretty<'_, Term> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self.0, f, false)
    }
}

impl fmt::Display for Pretty<'_, Atom> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self.0.tree(), f, false)
    }
}

impl fmt::Display for Pretty<'_, SignedFormula> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.0.sign {
            Sign::Assert => "+",
            Sign::Deny => "−",
        };
        write!(f, "{}{}", sign, Pretty(&self.0.atom))
    }
}

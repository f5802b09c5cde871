//! LP-style text dump of a [`MilpModel`] for cross-checking with external
//! solvers. The grammar is documented in `docs/lp-format.md`.

use std::collections::HashSet;
use std::fmt::Write;

use crate::model::{MilpModel, ObjSense, RowSense, VarId, VarKind};

const TERMS_PER_LINE: usize = 6;

/// Maps a semantic tag onto the LP identifier alphabet: brackets become
/// parentheses, anything else outside `[A-Za-z0-9_.,()]` becomes `_`.
pub fn lp_name(tag: &str) -> String {
    let mut out: String = tag
        .chars()
        .map(|c| match c {
            '[' => '(',
            ']' => ')',
            c if c.is_ascii_alphanumeric() || "_.,()".contains(c) => c,
            _ => '_',
        })
        .collect();
    if out.is_empty() || !out.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
        out.insert(0, '_');
    }
    out
}

fn unique_names<'a>(tags: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    tags.map(|tag| {
        let base = lp_name(tag);
        let mut name = base.clone();
        let mut k = 1;
        while !seen.insert(name.clone()) {
            k += 1;
            name = format!("{base}#{k}");
        }
        name
    })
    .collect()
}

fn write_terms(out: &mut String, terms: &[(VarId, f64)], names: &[String]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(v, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { '-' } else { '+' };
        let mag = c.abs();
        if mag == 1.0 {
            let _ = write!(out, " {sign} {}", names[v.0]);
        } else {
            let _ = write!(out, " {sign} {mag} {}", names[v.0]);
        }
    }
}

fn bound_value(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

pub fn write_lp(model: &MilpModel) -> String {
    let vars = unique_names(model.variables().iter().map(|v| v.tag.as_str()));
    let rows = unique_names(model.constraints().iter().map(|c| c.tag.as_str()));
    let mut out = String::new();
    out.push_str("\\ microramp model\n");
    let obj = model.objective();
    out.push_str(match obj.sense {
        ObjSense::Minimize => "Minimize\n",
        ObjSense::Maximize => "Maximize\n",
    });
    out.push_str(" obj:");
    write_terms(&mut out, &obj.terms, &vars);
    if obj.constant != 0.0 {
        let sign = if obj.constant < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {}", obj.constant.abs());
    }
    out.push_str("\nSubject To\n");
    for (row, name) in model.constraints().iter().zip(&rows) {
        let _ = write!(out, " {name}:");
        write_terms(&mut out, &row.terms, &vars);
        let sense = match row.sense {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        };
        let _ = writeln!(out, " {sense} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for (v, name) in model.variables().iter().zip(&vars) {
        if v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0 {
            continue;
        }
        if v.lower == v.upper {
            let _ = writeln!(out, " {name} = {}", v.lower);
        } else if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {name} free");
        } else {
            let _ = writeln!(out, " {} <= {name} <= {}", bound_value(v.lower), bound_value(v.upper));
        }
    }
    let binaries: Vec<&String> = model
        .variables()
        .iter()
        .zip(&vars)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n)
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            out.push(' ');
            out.push_str(&chunk.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" "));
            out.push('\n');
        }
    }
    out.push_str("End\n");
    out
}

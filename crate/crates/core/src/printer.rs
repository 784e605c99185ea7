//! Text rendering of operator expressions in the input grammar.

use crate::operator::{OperatorExpr, OperatorWord};
use crate::ordering::NormalForm;

fn push_word(out: &mut String, w: &OperatorWord, first: bool) {
    let (neg, body) = w.coefficient.signed_parts();
    let mut parts: Vec<String> = body.into_iter().collect();
    parts.extend(w.factors.iter().map(|f| f.text()));
    if parts.is_empty() {
        parts.push("1".to_string());
    }
    match (first, neg) {
        (true, false) => {}
        (true, true) => out.push('-'),
        (false, false) => out.push_str(" + "),
        (false, true) => out.push_str(" - "),
    }
    out.push_str(&parts.join(" * "));
}

/// Prints words in canonical order; the output re-parses to an equal operator.
pub fn print_operator(e: &OperatorExpr) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, w) in e.words().iter().enumerate() {
        push_word(&mut out, w, i == 0);
    }
    out
}

pub fn print_normal_form(n: &NormalForm) -> String {
    print_operator(&n.to_operator())
}

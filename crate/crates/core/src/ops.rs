//! Binary operators of the mini-Java expression language.
//!
//! The parser and the operator-splitting constraint both read this table, so the
//! text a constraint splits always re-parses to the same tree.

/// Operators from lowest to highest precedence. All are left-associative.
pub const OPERATORS: &[(&str, u8)] = &[
    ("||", 1),
    ("&&", 2),
    ("==", 3),
    ("!=", 3),
    ("<", 4),
    ("<=", 4),
    (">", 4),
    (">=", 4),
    ("+", 5),
    ("-", 5),
    ("*", 6),
    ("/", 6),
];

pub fn precedence(op: &str) -> Option<u8> {
    OPERATORS.iter().find(|(o, _)| *o == op).map(|&(_, p)| p)
}

pub fn is_operator(op: &str) -> bool {
    precedence(op).is_some()
}

/// Longest operator starting at the beginning of `s`.
pub fn operator_prefix(s: &str) -> Option<&'static str> {
    OPERATORS
        .iter()
        .map(|&(o, _)| o)
        .filter(|o| s.starts_with(o))
        .max_by_key(|o| o.len())
}

//! Library constraints: `eq`, `concat`, `addSuffix`, `isAnIdentifier`,
//! `concatWithOperatorSymbol`.
//!
//! Every constructive mode verifies its own output with the all-bound check, so
//! a mode that cannot reproduce the input text exactly reports failure instead
//! of returning values the check would reject.

use super::registry::ConstraintDef;
use crate::graph::Value;
use crate::ops;

fn strs(args: &[Option<Value>]) -> Option<Vec<Option<&str>>> {
    args.iter()
        .map(|a| match a {
            None => Some(None),
            Some(Value::Str(s)) => Some(Some(s.as_str())),
            Some(Value::Int(_)) => None,
        })
        .collect()
}

fn out(vals: &[&str]) -> Vec<Value> {
    vals.iter().map(|s| Value::from(*s)).collect()
}

/// Paren depth before each byte of `s`.
fn depths(s: &str) -> Vec<i32> {
    let mut d = 0;
    s.bytes()
        .map(|b| {
            let here = d;
            match b {
                b'(' => d += 1,
                b')' => d -= 1,
                _ => {}
            }
            here
        })
        .collect()
}

/// `left sep right` with single spaces, trimmed.
pub fn compose_concat(sep: &str, left: &str, right: &str) -> String {
    format!("{left} {sep} {right}").trim().to_string()
}

/// Split `whole` at the first top-level, whitespace-delimited occurrence of `sep`.
pub fn split_concat(whole: &str, sep: &str) -> Option<(String, String)> {
    if sep.is_empty() {
        return None;
    }
    let depth = depths(whole);
    let bytes = whole.as_bytes();
    for (i, _) in whole.match_indices(sep) {
        let end = i + sep.len();
        let open_before = i == 0 || bytes[i - 1] == b' ';
        let open_after = end == whole.len() || bytes[end] == b' ';
        if depth[i] == 0 && open_before && open_after {
            let (l, r) = (whole[..i].trim(), whole[end..].trim());
            if compose_concat(sep, l, r) == whole {
                return Some((l.to_string(), r.to_string()));
            }
            return None;
        }
    }
    None
}

/// `left op right` for a supported operator.
pub fn compose_operator(op: &str, left: &str, right: &str) -> Option<String> {
    ops::is_operator(op).then(|| format!("{left} {op} {right}"))
}

/// Split at the rightmost top-level occurrence of the lowest-precedence operator.
pub fn split_operator(whole: &str) -> Option<(String, String, String)> {
    let depth = depths(whole);
    let mut best: Option<(u8, usize, &str)> = None;
    let mut i = 0;
    while i < whole.len() {
        if !whole.is_char_boundary(i) {
            i += 1;
            continue;
        }
        if depth[i] == 0 {
            if let Some(op) = ops::operator_prefix(&whole[i..]) {
                let prec = ops::precedence(op).expect("table operator");
                if best.is_none_or(|(p, _, _)| prec <= p) {
                    best = Some((prec, i, op));
                }
                i += op.len();
                continue;
            }
        }
        i += 1;
    }
    let (_, at, op) = best?;
    let (l, r) = (whole[..at].trim(), whole[at + op.len()..].trim());
    if l.is_empty() || r.is_empty() {
        return None;
    }
    (compose_operator(op, l, r)? == whole).then(|| (op.to_string(), l.to_string(), r.to_string()))
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn eq() -> ConstraintDef {
    ConstraintDef::new("eq", 2, &["BF", "FB", "BB"], |ad, args| {
        match (ad.to_string().as_str(), &args[0], &args[1]) {
            ("BF", Some(a), None) => Some(vec![a.clone(), a.clone()]),
            ("FB", None, Some(b)) => Some(vec![b.clone(), b.clone()]),
            ("BB", Some(a), Some(b)) if a == b => Some(vec![a.clone(), b.clone()]),
            _ => None,
        }
    })
}

pub fn concat() -> ConstraintDef {
    ConstraintDef::new("concat", 4, &["BBBF", "BFFB", "BBBB"], |ad, args| {
        let a = strs(args)?;
        match (ad.to_string().as_str(), a[0], a[1], a[2], a[3]) {
            ("BBBF", Some(sep), Some(l), Some(r), None) => {
                Some(out(&[sep, l, r, &compose_concat(sep, l, r)]))
            }
            ("BFFB", Some(sep), None, None, Some(w)) => {
                let (l, r) = split_concat(w, sep)?;
                Some(out(&[sep, &l, &r, w]))
            }
            ("BBBB", Some(sep), Some(l), Some(r), Some(w)) if compose_concat(sep, l, r) == w => {
                Some(out(&[sep, l, r, w]))
            }
            _ => None,
        }
    })
}

pub fn add_suffix() -> ConstraintDef {
    ConstraintDef::new("addSuffix", 3, &["BBF", "FBB", "BBB"], |ad, args| {
        let a = strs(args)?;
        match (ad.to_string().as_str(), a[0], a[1], a[2]) {
            ("BBF", Some(base), Some(suf), None) => Some(out(&[base, suf, &format!("{base}{suf}")])),
            ("FBB", None, Some(suf), Some(w)) => Some(out(&[w.strip_suffix(suf)?, suf, w])),
            ("BBB", Some(base), Some(suf), Some(w)) if format!("{base}{suf}") == w => {
                Some(out(&[base, suf, w]))
            }
            _ => None,
        }
    })
}

pub fn is_an_identifier() -> ConstraintDef {
    ConstraintDef::new("isAnIdentifier", 1, &["B"], |_, args| {
        let a = strs(args)?;
        let s = a[0]?;
        is_identifier(s).then(|| out(&[s]))
    })
}

pub fn concat_with_operator_symbol() -> ConstraintDef {
    ConstraintDef::new("concatWithOperatorSymbol", 4, &["BBBF", "FFFB", "BBBB"], |ad, args| {
        let a = strs(args)?;
        match (ad.to_string().as_str(), a[0], a[1], a[2], a[3]) {
            ("BBBF", Some(op), Some(l), Some(r), None) => {
                Some(out(&[op, l, r, &compose_operator(op, l, r)?]))
            }
            ("FFFB", None, None, None, Some(w)) => {
                let (op, l, r) = split_operator(w)?;
                Some(out(&[&op, &l, &r, w]))
            }
            ("BBBB", Some(op), Some(l), Some(r), Some(w))
                if compose_operator(op, l, r).as_deref() == Some(w) =>
            {
                Some(out(&[op, l, r, w]))
            }
            _ => None,
        }
    })
}

pub fn all() -> Vec<ConstraintDef> {
    vec![
        eq(),
        concat(),
        add_suffix(),
        is_an_identifier(),
        concat_with_operator_symbol(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::adornment::ad;

    fn run(def: &ConstraintDef, pattern: &str, args: &[Option<&str>]) -> Option<Vec<String>> {
        let args: Vec<Option<Value>> = args.iter().map(|a| a.map(Value::from)).collect();
        def.eval(&ad(pattern), &args).map(|v| {
            v.into_iter()
                .map(|x| x.as_str().unwrap().to_string())
                .collect()
        })
    }

    #[test]
    fn concat_modes() {
        let c = concat();
        assert_eq!(
            run(&c, "BBBF", &[Some("="), Some("a"), Some("b + 3"), None]).unwrap()[3],
            "a = b + 3"
        );
        let split = run(&c, "BFFB", &[Some("="), None, None, Some("a = b + 3")]).unwrap();
        assert_eq!((split[1].as_str(), split[2].as_str()), ("a", "b + 3"));
        // Degenerate empties trim down to the bare separator.
        assert_eq!(run(&c, "BBBF", &[Some("="), Some(""), Some(""), None]).unwrap()[3], "=");
        assert!(run(&c, "BBBB", &[Some("="), Some(""), Some(""), Some("=")]).is_some());
        assert!(run(&c, "BBBB", &[Some("="), Some(""), Some(""), Some(" = ")]).is_none());
        assert!(run(&c, "BFFB", &[Some("="), None, None, Some("a == b")]).is_none());
        assert!(run(&c, "BFFB", &[Some("="), None, None, Some("(a = b)")]).is_none());
    }

    #[test]
    fn concat_splits_at_first_top_level_separator() {
        let split = split_concat("x = y == z", "=").unwrap();
        assert_eq!(split, ("x".to_string(), "y == z".to_string()));
        assert_eq!(split_concat("int a", "int"), Some((String::new(), "a".to_string())));
    }

    #[test]
    fn add_suffix_modes() {
        let c = add_suffix();
        assert_eq!(run(&c, "BBF", &[Some("a = b + 3"), Some(";"), None]).unwrap()[2], "a = b + 3;");
        assert_eq!(run(&c, "FBB", &[None, Some("()"), Some("m()")]).unwrap()[0], "m");
        assert_eq!(run(&c, "BBF", &[Some("x"), Some(""), None]).unwrap()[2], "x");
        assert!(run(&c, "FBB", &[None, Some(";"), Some("a = b")]).is_none());
    }

    #[test]
    fn identifier_verdicts() {
        let c = is_an_identifier();
        assert!(run(&c, "B", &[Some("a")]).is_some());
        assert!(run(&c, "B", &[Some("int a")]).is_none());
        assert!(run(&c, "B", &[Some("")]).is_none());
        assert!(run(&c, "B", &[Some("_x9")]).is_some());
        assert!(run(&c, "B", &[Some("9x")]).is_none());
    }

    #[test]
    fn operator_modes() {
        let c = concat_with_operator_symbol();
        assert_eq!(
            run(&c, "BBBF", &[Some("+"), Some("b"), Some("3"), None]).unwrap()[3],
            "b + 3"
        );
        assert_eq!(
            run(&c, "FFFB", &[None, None, None, Some("b + 3")]).unwrap()[..3],
            ["+", "b", "3"]
        );
        assert_eq!(
            run(&c, "FFFB", &[None, None, None, Some("a * b + c")]).unwrap()[..3],
            ["+", "a * b", "c"]
        );
        assert_eq!(
            run(&c, "FFFB", &[None, None, None, Some("a - b - c")]).unwrap()[..3],
            ["-", "a - b", "c"]
        );
        assert_eq!(
            run(&c, "FFFB", &[None, None, None, Some("(a + b) * c")]).unwrap()[..3],
            ["*", "(a + b)", "c"]
        );
        assert!(run(&c, "FFFB", &[None, None, None, Some("(a + b)")]).is_none());
        assert!(run(&c, "FFFB", &[None, None, None, Some("b+3")]).is_none());
        assert!(run(&c, "BBBF", &[Some("%"), Some("b"), Some("3"), None]).is_none());
    }

    #[test]
    fn eq_handles_ints() {
        let c = eq();
        let got = c.eval(&ad("FB"), &[None, Some(Value::Int(4))]).unwrap();
        assert_eq!(got, vec![Value::Int(4), Value::Int(4)]);
        assert!(!c.check(&[Value::Int(1), Value::Int(2)]));
    }
}

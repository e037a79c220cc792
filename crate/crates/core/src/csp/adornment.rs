use std::fmt;
use std::str::FromStr;

/// Bound/free status of one constraint argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Bound,
    Free,
}

/// A bound/free pattern over a constraint's arguments, written like `BBF`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Adornment(Vec<Slot>);

impl Adornment {
    pub fn new(slots: Vec<Slot>) -> Self {
        Adornment(slots)
    }

    pub fn all_bound(arity: usize) -> Self {
        Adornment(vec![Slot::Bound; arity])
    }

    pub fn slots(&self) -> &[Slot] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_check(&self) -> bool {
        self.0.iter().all(|s| *s == Slot::Bound)
    }

    pub fn is_free(&self, i: usize) -> bool {
        self.0[i] == Slot::Free
    }
}

impl fmt::Display for Adornment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Slot::Bound => "B",
                Slot::Free => "F",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Adornment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                'B' => Ok(Slot::Bound),
                'F' => Ok(Slot::Free),
                other => Err(format!("invalid adornment character `{other}` in `{s}`")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Adornment)
    }
}

/// Shorthand for tests and constraint tables: `ad("BBF")`.
pub fn ad(s: &str) -> Adornment {
    s.parse().expect("valid adornment literal")
}

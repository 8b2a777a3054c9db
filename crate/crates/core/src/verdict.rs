//! Three-valued decisions with evidence.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "evidence", rename_all = "lowercase")]
pub enum Verdict<Y, N> {
    Yes(Y),
    No(N),
    Unknown(String),
}

impl<Y, N> Verdict<Y, N> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn yes(self) -> Option<Y> {
        match self {
            Verdict::Yes(y) => Some(y),
            _ => None,
        }
    }

    pub fn no(self) -> Option<N> {
        match self {
            Verdict::No(n) => Some(n),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No(_) => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn map_yes<Z, F: FnOnce(Y) -> Z>(self, f: F) -> Verdict<Z, N> {
        match self {
            Verdict::Yes(y) => Verdict::Yes(f(y)),
            Verdict::No(n) => Verdict::No(n),
            Verdict::Unknown(r) => Verdict::Unknown(r),
        }
    }

    pub fn map_no<Z, F: FnOnce(N) -> Z>(self, f: F) -> Verdict<Y, Z> {
        match self {
            Verdict::Yes(y) => Verdict::Yes(y),
            Verdict::No(n) => Verdict::No(f(n)),
            Verdict::Unknown(r) => Verdict::Unknown(r),
        }
    }
}

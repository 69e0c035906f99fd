use serde::{Deserialize, Serialize};
use std::fmt;

/// Coefficients `(a2, a3, b2, b3)` of the forms `L1 = ξ1 + a2ξ2 + a3ξ3`,
/// `L2 = b2ξ2 + b3ξ3 + ξ4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quad<T> {
    pub a2: T,
    pub a3: T,
    pub b2: T,
    pub b3: T,
}

impl<T> Quad<T> {
    pub fn new(a2: T, a3: T, b2: T, b3: T) -> Self {
        Quad { a2, a3, b2, b3 }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Quad<U> {
        Quad {
            a2: f(&self.a2),
            a3: f(&self.a3),
            b2: f(&self.b2),
            b3: f(&self.b3),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        [&self.a2, &self.a3, &self.b2, &self.b3].into_iter()
    }
}

impl<T: fmt::Display> fmt::Display for Quad<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a2, self.a3, self.b2, self.b3)
    }
}

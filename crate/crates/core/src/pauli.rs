//! Single- and two-qubit Pauli operators in symplectic (x, z) form.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn is_identity(self) -> bool {
        self == Pauli::I
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// A Pauli acting on the two operands of an entangling gate, in operand order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TwoQubitPauli(pub Pauli, pub Pauli);

impl TwoQubitPauli {
    pub const IDENTITY: TwoQubitPauli = TwoQubitPauli(Pauli::I, Pauli::I);

    /// The 15 non-identity two-qubit Paulis in a fixed order (IX, IY, IZ, XI, ...).
    pub fn non_identity() -> impl Iterator<Item = TwoQubitPauli> {
        Pauli::ALL
            .into_iter()
            .flat_map(|a| Pauli::ALL.into_iter().map(move |b| TwoQubitPauli(a, b)))
            .filter(|p| !p.is_identity())
    }

    pub fn is_identity(self) -> bool {
        self.0.is_identity() && self.1.is_identity()
    }
}

impl fmt::Display for TwoQubitPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_distinct_non_identity() {
        let all: Vec<_> = TwoQubitPauli::non_identity().collect();
        assert_eq!(all.len(), 15);
        let set: std::collections::HashSet<_> = all.iter().copied().collect();
        assert_eq!(set.len(), 15);
    }

    #[test]
    fn bits_round_trip() {
        for p in Pauli::ALL {
            assert_eq!(Pauli::from_bits(p.has_x(), p.has_z()), p);
        }
    }
}

//! Rotated surface code geometry and the four-step entangling schedule.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilizerKind {
    X,
    Z,
}

/// Corner of a plaquette, indexed relative to the plaquette centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    NorthWest,
    NorthEast,
    SouthWest,
    SouthEast,
}

// X plaquettes finish on a horizontal pair so ancilla hooks run perpendicular
// to vertical logical-X chains; Z plaquettes use the mirrored order so that
// neighbouring X/Z plaquettes touch their two shared qubits in the same order.
const X_ORDER: [Corner; 4] = [Corner::NorthWest, Corner::NorthEast, Corner::SouthWest, Corner::SouthEast];
const Z_ORDER: [Corner; 4] = [Corner::NorthWest, Corner::SouthWest, Corner::NorthEast, Corner::SouthEast];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizer {
    pub kind: StabilizerKind,
    /// Plaquette corner coordinates `(a, b)` with `0 <= a, b <= d`.
    pub position: (usize, usize),
    /// Data position touched at each of the four schedule steps.
    pub schedule: [Option<usize>; 4],
}

impl Stabilizer {
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.schedule.iter().flatten().copied()
    }

    pub fn weight(&self) -> usize {
        self.schedule.iter().flatten().count()
    }
}

/// Distance-`d` rotated surface code: data at `(row, col)` with position index
/// `row * d + col`, X boundaries on the top and bottom rows, Z boundaries on the
/// left and right columns. Logical Z is the top row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub distance: usize,
    pub stabilizers: Vec<Stabilizer>,
    pub logical_z: Vec<usize>,
}

impl Layout {
    pub fn rotated(distance: usize) -> Self {
        let d = distance;
        let mut stabilizers = Vec::new();
        let data_at = |r: isize, c: isize| -> Option<usize> {
            if r >= 0 && c >= 0 && (r as usize) < d && (c as usize) < d {
                Some(r as usize * d + c as usize)
            } else {
                None
            }
        };
        for a in 0..=d {
            for b in 0..=d {
                let kind = if (a + b) % 2 == 0 { StabilizerKind::X } else { StabilizerKind::Z };
                let on_row_edge = a == 0 || a == d;
                let on_col_edge = b == 0 || b == d;
                if on_row_edge && on_col_edge {
                    continue;
                }
                if on_row_edge && kind != StabilizerKind::X {
                    continue;
                }
                if on_col_edge && kind != StabilizerKind::Z {
                    continue;
                }
                let (ai, bi) = (a as isize, b as isize);
                let corner = |c: Corner| match c {
                    Corner::NorthWest => data_at(ai - 1, bi - 1),
                    Corner::NorthEast => data_at(ai - 1, bi),
                    Corner::SouthWest => data_at(ai, bi - 1),
                    Corner::SouthEast => data_at(ai, bi),
                };
                let order = match kind {
                    StabilizerKind::X => X_ORDER,
                    StabilizerKind::Z => Z_ORDER,
                };
                let schedule = order.map(corner);
                stabilizers.push(Stabilizer { kind, position: (a, b), schedule });
            }
        }
        Layout { distance, stabilizers, logical_z: (0..d).collect() }
    }

    pub fn data_count(&self) -> usize {
        self.distance * self.distance
    }
}

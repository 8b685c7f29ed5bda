//! Placement of many logical qubits on one surface.
//!
//! The surface is a grid of slots. Each slot is one logical qubit's frame,
//! `ceil(5d/2)` by `ceil(5d/4)` lattice sites. The unit cell is a row of three
//! qubit slots above a row of free channel slots; cells are concatenated left
//! to right and layered top to bottom, and a boundary channel row runs along
//! the top. Every qubit therefore has an open channel directly above and
//! directly below it.
//!
//! ```text
//!   C C C C C C     row 0: boundary channel
//!   Q Q Q Q Q Q     row 1
//!   C C C C C C     row 2
//!   Q Q Q Q Q Q     row 3
//!   C C C C C C     row 4
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{FleeError, Result};
use crate::model::{LatticePoint, LogicalQubit, Orientation, PhysicalParams, Point};

/// Qubit slots per unit cell row.
pub const CELL_WIDTH: usize = 3;
/// Slot rows per unit cell (qubit row + channel row).
pub const CELL_HEIGHT: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub col: usize,
    pub row: usize,
}

impl Slot {
    pub fn new(col: usize, row: usize) -> Self {
        Slot { col, row }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Qubit,
    Channel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Tiled unit cells with channel rows.
    Tiled,
    /// One qubit on an otherwise empty lattice; every direction is open.
    Isolated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedQubit {
    pub id: usize,
    pub slot: Slot,
    pub qubit: LogicalQubit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mapping {
    pub layout: Layout,
    /// Unit cells stacked vertically.
    pub rows: usize,
    /// Unit cells side by side.
    pub cols: usize,
    pub slot_cols: usize,
    pub slot_rows: usize,
    /// Slot pitch in lattice units.
    pub slot_width: i64,
    pub slot_height: i64,
    pub l: f64,
    pub d: u32,
    /// Row-major slot kinds (`slot_rows * slot_cols`).
    pub slots: Vec<SlotKind>,
    pub qubits: Vec<PlacedQubit>,
}

/// Slot pitch for code distance `d`: a `10d/4` by `5d/4` frame, rounded up
/// to whole lattice sites.
pub fn slot_pitch(d: u32) -> (i64, i64) {
    let d = i64::from(d);
    ((5 * d + 1) / 2, (5 * d + 3) / 4)
}

/// Tile `rows x cols` unit cells.
pub fn build_mapping(rows: usize, cols: usize, p: &PhysicalParams) -> Result<Mapping> {
    if rows == 0 || cols == 0 {
        return Err(FleeError::ZeroDimension { rows, cols });
    }
    p.validate()?;
    let (slot_width, slot_height) = slot_pitch(p.d);
    let slot_cols = CELL_WIDTH * cols;
    let slot_rows = 1 + CELL_HEIGHT * rows;
    let mut slots = Vec::with_capacity(slot_cols * slot_rows);
    let mut qubits = Vec::new();
    let mut m = Mapping {
        layout: Layout::Tiled,
        rows,
        cols,
        slot_cols,
        slot_rows,
        slot_width,
        slot_height,
        l: p.l,
        d: p.d,
        slots: Vec::new(),
        qubits: Vec::new(),
    };
    for row in 0..slot_rows {
        for col in 0..slot_cols {
            let kind = if row % 2 == 1 {
                SlotKind::Qubit
            } else {
                SlotKind::Channel
            };
            slots.push(kind);
            if kind == SlotKind::Qubit {
                let slot = Slot::new(col, row);
                qubits.push(PlacedQubit {
                    id: qubits.len(),
                    slot,
                    qubit: LogicalQubit::new(m.anchor(slot), Orientation::Horizontal, p.d),
                });
            }
        }
    }
    m.slots = slots;
    m.qubits = qubits;
    Ok(m)
}

impl Mapping {
    /// A single horizontal qubit with hole 0 at `anchor` and free lattice all
    /// around it.
    pub fn isolated(anchor: LatticePoint, p: &PhysicalParams) -> Result<Mapping> {
        p.validate()?;
        let (slot_width, slot_height) = slot_pitch(p.d);
        Ok(Mapping {
            layout: Layout::Isolated,
            rows: 1,
            cols: 1,
            slot_cols: 1,
            slot_rows: 1,
            slot_width,
            slot_height,
            l: p.l,
            d: p.d,
            slots: vec![SlotKind::Qubit],
            qubits: vec![PlacedQubit {
                id: 0,
                slot: Slot::new(0, 0),
                qubit: LogicalQubit::new(anchor, Orientation::Horizontal, p.d),
            }],
        })
    }

    pub fn kind(&self, slot: Slot) -> Option<SlotKind> {
        if slot.col < self.slot_cols && slot.row < self.slot_rows {
            Some(self.slots[slot.row * self.slot_cols + slot.col])
        } else {
            None
        }
    }

    /// Hole-0 position of a qubit parked in `slot`. The pair is centred
    /// horizontally and sits on the slot's middle row.
    pub fn anchor(&self, slot: Slot) -> LatticePoint {
        let x = slot.col as i64 * self.slot_width + (self.slot_width - i64::from(self.d)) / 2;
        let y = slot.row as i64 * self.slot_height + self.slot_height / 2;
        LatticePoint::new(x, y)
    }

    /// Hole centres of a qubit parked in `slot`.
    pub fn hole_centers(&self, slot: Slot) -> [LatticePoint; 2] {
        let a = self.anchor(slot);
        [a, a.offset(i64::from(self.d), 0)]
    }

    /// Centre of a slot in millimetres.
    pub fn slot_center_mm(&self, slot: Slot) -> Point {
        Point::new(
            (slot.col as f64 + 0.5) * self.slot_width as f64 * self.l,
            (slot.row as f64 + 0.5) * self.slot_height as f64 * self.l,
        )
    }

    /// Mapping extent in millimetres.
    pub fn extent_mm(&self) -> (f64, f64) {
        (
            self.slot_cols as f64 * self.slot_width as f64 * self.l,
            self.slot_rows as f64 * self.slot_height as f64 * self.l,
        )
    }

    pub fn channel_rows(&self) -> Vec<usize> {
        (0..self.slot_rows)
            .filter(|&r| {
                (0..self.slot_cols).all(|c| self.kind(Slot::new(c, r)) == Some(SlotKind::Channel))
            })
            .collect()
    }

    pub fn channel_cols(&self) -> Vec<usize> {
        (0..self.slot_cols)
            .filter(|&c| {
                (0..self.slot_rows).all(|r| self.kind(Slot::new(c, r)) == Some(SlotKind::Channel))
            })
            .collect()
    }

    pub fn qubit(&self, id: usize) -> Result<&PlacedQubit> {
        self.qubits.get(id).ok_or(FleeError::UnknownQubit(id))
    }

    pub fn to_json(&self) -> String {
        let doc = MappingDocument::from(self);
        serde_json::to_string_pretty(&doc).expect("mapping serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct MappingDocument {
    layout: Layout,
    cells: [usize; 2],
    slot_grid: Vec<String>,
    slot_size: [i64; 2],
    l_mm: f64,
    d: u32,
    qubits: Vec<QubitDocument>,
    channels: ChannelDocument,
}

#[derive(Serialize, Deserialize)]
struct QubitDocument {
    id: usize,
    slot: [usize; 2],
    orientation: Orientation,
    holes: [[i64; 2]; 2],
    hole_half_width: f64,
}

#[derive(Serialize, Deserialize)]
struct ChannelDocument {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl From<&Mapping> for MappingDocument {
    fn from(m: &Mapping) -> Self {
        let slot_grid = (0..m.slot_rows)
            .map(|r| {
                (0..m.slot_cols)
                    .map(|c| match m.kind(Slot::new(c, r)) {
                        Some(SlotKind::Qubit) => 'Q',
                        _ => '.',
                    })
                    .collect()
            })
            .collect();
        MappingDocument {
            layout: m.layout,
            cells: [m.rows, m.cols],
            slot_grid,
            slot_size: [m.slot_width, m.slot_height],
            l_mm: m.l,
            d: m.d,
            qubits: m
                .qubits
                .iter()
                .map(|pq| QubitDocument {
                    id: pq.id,
                    slot: [pq.slot.col, pq.slot.row],
                    orientation: pq.qubit.orientation,
                    holes: pq.qubit.holes.map(|h| [h.center.x, h.center.y]),
                    hole_half_width: pq.qubit.holes[0].half_width,
                })
                .collect(),
            channels: ChannelDocument {
                rows: m.channel_rows(),
                cols: m.channel_cols(),
            },
        }
    }
}

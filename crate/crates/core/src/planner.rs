//! Escape planning after a strike has been detected.
//!
//! A hole moves along a straight open trajectory, any distance, in `d`
//! cycles. Moving a qubit across its own axis shifts both holes at once
//! (`d` cycles); moving it along its axis shifts one hole after the other
//! (`2d` cycles) because each hole blocks the other.
//!
//! Moves are grouped into batches. Batch 1 starts the cycle after detection
//! and each later batch starts when the previous one has finished. Within a
//! batch no two qubits may touch the same slot. Threatened qubits are served
//! nearest-first; each takes the earliest-finishing route to a channel slot
//! where it clears the full-radius survival margin.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{FleeError, Result};
use crate::mapping::{Layout, Mapping, Slot, SlotKind};
use crate::model::{
    destroyed_by_disc, CreEvent, LatticePoint, LogicalQubit, Orientation, PhysicalParams,
};

/// Longest route considered, in straight legs.
pub const MAX_LEGS: usize = 3;
/// Latest batch a move may be scheduled in.
pub const MAX_BATCHES: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Horizontal => "horizontal",
            Axis::Vertical => "vertical",
        }
    }
}

/// Cycles needed to shift a qubit of the given orientation along `axis`.
pub fn move_duration(orientation: Orientation, axis: Axis, d: u32) -> u64 {
    let along = matches!(
        (orientation, axis),
        (Orientation::Horizontal, Axis::Horizontal) | (Orientation::Vertical, Axis::Vertical)
    );
    if along {
        2 * u64::from(d)
    } else {
        u64::from(d)
    }
}

/// One hole relocation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveStep {
    pub qubit: usize,
    pub hole: usize,
    pub axis: Axis,
    pub target: LatticePoint,
    pub start: u64,
    pub duration: u64,
    pub batch: u32,
}

impl MoveStep {
    pub fn completion(&self) -> u64 {
        self.start + self.duration
    }
}

/// One straight leg of a qubit's escape, as hole-0 positions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub from: LatticePoint,
    pub to: LatticePoint,
    pub axis: Axis,
    pub batch: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flight {
    pub qubit: usize,
    pub legs: Vec<Leg>,
    /// Path length over all legs (mm).
    pub traveled_mm: f64,
}

impl Flight {
    /// Sequential batches the qubit waits through before its escape is done.
    pub fn steps(&self) -> u32 {
        self.legs.last().map_or(0, |l| l.batch)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MovePlan {
    pub detect_cycle: u64,
    pub flights: Vec<Flight>,
    pub steps: Vec<MoveStep>,
    /// Start cycle of each batch (index 0 is batch 1).
    pub batch_starts: Vec<u64>,
}

impl MovePlan {
    pub fn empty(detect_cycle: u64) -> Self {
        MovePlan {
            detect_cycle,
            flights: Vec::new(),
            steps: Vec::new(),
            batch_starts: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.flights.is_empty()
    }

    pub fn flight(&self, qubit: usize) -> Option<&Flight> {
        self.flights.iter().find(|f| f.qubit == qubit)
    }

    pub fn max_steps(&self) -> u32 {
        self.flights.iter().map(Flight::steps).max().unwrap_or(0)
    }

    /// Cycle at which a qubit's first move begins.
    pub fn move_start(&self, qubit: usize) -> Option<u64> {
        self.steps
            .iter()
            .filter(|s| s.qubit == qubit)
            .map(|s| s.start)
            .min()
    }

    /// Cycle at which every move has finished.
    pub fn completion(&self) -> u64 {
        self.steps
            .iter()
            .map(MoveStep::completion)
            .max()
            .unwrap_or(self.detect_cycle)
    }
}

/// Detection happens a fixed `delta` cycles after the strike.
pub fn detect(event: &CreEvent, p: &PhysicalParams) -> u64 {
    event.t0 + u64::from(p.delta)
}

/// Survival margin a qubit has left at full radius without moving, under
/// the pre-move accounting (front radius counted twice against the offset
/// plus string length).
fn string_length(q: &LogicalQubit, l: f64) -> f64 {
    l * f64::from(q.code_distance.saturating_sub(1))
}

/// A qubit is threatened when the full-radius disc would destroy it, or
/// when the pre-move margin is exhausted at full radius.
pub fn is_threatened(q: &LogicalQubit, event: &CreEvent, p: &PhysicalParams) -> bool {
    let x0 = q.nearest_hole_distance(&event.epicenter, p.l);
    if 2.0 * p.r_max >= x0 + string_length(q, p.l) {
        return true;
    }
    // Both clauses of the disc test need a hole corner or the adjacent
    // string site within reach.
    let reach = q.holes[0].half_width * std::f64::consts::SQRT_2 + 1.0;
    x0 < p.r_max + reach * p.l && destroyed_by_disc(&event.epicenter, p.r_max, q, p.l)
}

/// Whether a destination clears the full-radius margin.
fn clears_margin(
    q: &LogicalQubit,
    dest: &LogicalQubit,
    traveled: f64,
    event: &CreEvent,
    p: &PhysicalParams,
) -> bool {
    let x0 = q.nearest_hole_distance(&event.epicenter, p.l);
    let x1 = dest.nearest_hole_distance(&event.epicenter, p.l);
    x1 >= x0
        && !destroyed_by_disc(&event.epicenter, p.r_max, dest, p.l)
        && traveled >= p.move_displacement
        && p.r_max < (x0 - p.radius_at_move_start()) + traveled + string_length(q, p.l)
}

/// A candidate route through slots.
#[derive(Clone, Debug, PartialEq)]
struct Route {
    /// Slots visited by each leg, start and end included.
    legs: Vec<(Axis, Vec<Slot>)>,
    target: Slot,
    traveled: f64,
}

/// Route offered to a qubit ignoring every other qubit's motion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeOption {
    pub target: Slot,
    pub axes: Vec<Axis>,
    pub duration: u64,
    pub traveled_mm: f64,
}

/// Plan the escape of every threatened qubit.
pub fn plan_flight(m: &Mapping, event: &CreEvent, p: &PhysicalParams) -> Result<MovePlan> {
    p.validate()?;
    let detect_cycle = detect(event, p);
    match m.layout {
        Layout::Isolated => plan_isolated(m, event, p, detect_cycle),
        Layout::Tiled => plan_tiled(m, event, p, detect_cycle),
    }
}

fn plan_isolated(
    m: &Mapping,
    event: &CreEvent,
    p: &PhysicalParams,
    detect_cycle: u64,
) -> Result<MovePlan> {
    let pq = m.qubit(0)?;
    let q = &pq.qubit;
    if !is_threatened(q, event, p) {
        return Ok(MovePlan::empty(detect_cycle));
    }
    let x0 = q.nearest_hole_distance(&event.epicenter, p.l);
    let needed = p.r_max - (x0 - p.radius_at_move_start()) - string_length(q, p.l);
    // Whole lattice sites covering both the nominal move and the margin.
    let mut steps = 1i64.max((p.move_displacement / p.l).ceil() as i64);
    if needed.is_finite() && needed >= 0.0 {
        steps = steps.max((needed / p.l).floor() as i64 + 1);
    }
    while (steps as f64) * p.l < p.move_displacement || (steps as f64) * p.l <= needed {
        steps += 1;
    }
    let mid = q.midpoint_mm(p.l);
    let (axis, delta) = match q.orientation {
        Orientation::Horizontal => {
            let sign = if event.epicenter.y < mid.y { 1 } else { -1 };
            (Axis::Vertical, (0, sign * steps))
        }
        Orientation::Vertical => {
            let sign = if event.epicenter.x < mid.x { 1 } else { -1 };
            (Axis::Horizontal, (sign * steps, 0))
        }
    };
    let from = q.holes[0].center;
    let leg = Leg {
        from,
        to: from.offset(delta.0, delta.1),
        axis,
        batch: 1,
    };
    let flight = Flight {
        qubit: pq.id,
        legs: vec![leg],
        traveled_mm: steps as f64 * p.l,
    };
    Ok(finish_plan(m, detect_cycle, vec![flight]))
}

/// Slot occupancy over batches for the qubits planned so far.
#[derive(Default)]
struct Reservations {
    tracks: Vec<Track>,
}

struct Track {
    origin: Slot,
    /// (batch, slots touched during that batch)
    legs: Vec<(u32, Vec<Slot>)>,
}

impl Track {
    fn position_before(&self, batch: u32) -> Slot {
        self.legs
            .iter()
            .rfind(|(b, _)| *b < batch)
            .map_or(self.origin, |(_, cells)| {
                *cells.last().expect("non-empty leg")
            })
    }

    fn uses(&self, cell: Slot, batch: u32) -> bool {
        match self.legs.iter().find(|(b, _)| *b == batch) {
            Some((_, cells)) => cells.contains(&cell),
            None => self.position_before(batch) == cell,
        }
    }
}

impl Reservations {
    fn busy(&self, cell: Slot, batch: u32) -> bool {
        self.tracks.iter().any(|t| t.uses(cell, batch))
    }

    fn horizon(&self) -> u32 {
        self.tracks
            .iter()
            .flat_map(|t| t.legs.iter().map(|(b, _)| *b))
            .max()
            .unwrap_or(0)
    }

    /// Earliest batches for each leg, or `None` if the route cannot be fitted.
    fn schedule(&self, route: &Route) -> Option<Vec<u32>> {
        let mut batches = Vec::with_capacity(route.legs.len());
        let mut current = 0u32;
        for (_, cells) in &route.legs {
            let start = cells[0];
            let mut chosen = None;
            for b in current + 1..=MAX_BATCHES {
                if cells.iter().all(|&c| !self.busy(c, b)) {
                    chosen = Some(b);
                    break;
                }
                // Waiting in place through batch b.
                if self.busy(start, b) {
                    return None;
                }
            }
            current = chosen?;
            batches.push(current);
        }
        let end = route.target;
        let last = self.horizon().max(current) + 1;
        if (current + 1..=last).any(|b| self.busy(end, b)) {
            return None;
        }
        Some(batches)
    }
}

fn plan_tiled(
    m: &Mapping,
    event: &CreEvent,
    p: &PhysicalParams,
    detect_cycle: u64,
) -> Result<MovePlan> {
    let mut threatened: Vec<(f64, Slot, usize)> = m
        .qubits
        .iter()
        .filter(|pq| is_threatened(&pq.qubit, event, p))
        .map(|pq| {
            (
                pq.qubit.nearest_hole_distance(&event.epicenter, p.l),
                pq.slot,
                pq.id,
            )
        })
        .collect();
    if threatened.is_empty() {
        return Ok(MovePlan::empty(detect_cycle));
    }
    threatened.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.row.cmp(&b.1.row))
            .then(a.1.col.cmp(&b.1.col))
    });

    // Qubits that stay put for the whole plan, plus threatened ones not yet
    // planned, block routes. Planned qubits are handled by the reservations.
    let mut walls: BTreeMap<Slot, usize> = m.qubits.iter().map(|pq| (pq.slot, pq.id)).collect();
    let mut reservations = Reservations::default();
    let mut flights = Vec::new();

    for &(_, slot, id) in &threatened {
        walls.remove(&slot);
        let pq = m.qubit(id)?;
        let mut best: Option<(u32, u64, f64, Slot, Route, Vec<u32>)> = None;
        // A k-leg route finishes no earlier than batch k, so longer routes
        // are only tried while nothing has finished by then.
        for legs in 1..=MAX_LEGS {
            if best.as_ref().is_some_and(|b| (b.0 as usize) < legs) {
                break;
            }
            for route in enumerate_routes(m, &pq.qubit, slot, event, p, &walls, legs) {
                let Some(batches) = reservations.schedule(&route) else {
                    continue;
                };
                let last = *batches.last().expect("route has legs");
                let duration: u64 = route
                    .legs
                    .iter()
                    .map(|(axis, _)| {
                        move_duration(pq.qubit.orientation, *axis, pq.qubit.code_distance)
                    })
                    .sum();
                let better = match &best {
                    None => true,
                    Some((bl, bd, bt, bs, _, _)) => (last, duration)
                        .cmp(&(*bl, *bd))
                        .then(route.traveled.total_cmp(bt))
                        .then(route.target.row.cmp(&bs.row))
                        .then(route.target.col.cmp(&bs.col))
                        .is_lt(),
                };
                if better {
                    best = Some((last, duration, route.traveled, route.target, route, batches));
                }
            }
        }
        let (_, _, traveled, _, route, batches) =
            best.ok_or(FleeError::Unescapable { qubit: id })?;
        let legs = route
            .legs
            .iter()
            .zip(&batches)
            .map(|((axis, cells), &batch)| Leg {
                from: m.anchor(cells[0]),
                to: m.anchor(*cells.last().expect("non-empty leg")),
                axis: *axis,
                batch,
            })
            .collect();
        reservations.tracks.push(Track {
            origin: slot,
            legs: route
                .legs
                .iter()
                .zip(&batches)
                .map(|((_, cells), &b)| (b, cells.clone()))
                .collect(),
        });
        flights.push(Flight {
            qubit: id,
            legs,
            traveled_mm: traveled,
        });
    }
    Ok(finish_plan(m, detect_cycle, flights))
}

const DIRECTIONS: [(i64, i64, Axis); 4] = [
    (0, -1, Axis::Vertical),
    (0, 1, Axis::Vertical),
    (-1, 0, Axis::Horizontal),
    (1, 0, Axis::Horizontal),
];

/// Every route of exactly `n_legs` straight legs that ends on a channel
/// slot clearing the survival margin.
fn enumerate_routes(
    m: &Mapping,
    q: &LogicalQubit,
    origin: Slot,
    event: &CreEvent,
    p: &PhysicalParams,
    walls: &BTreeMap<Slot, usize>,
    n_legs: usize,
) -> Vec<Route> {
    let mut out = Vec::new();
    let mut legs = Vec::new();
    let ctx = RouteContext {
        m,
        q,
        origin,
        event,
        p,
        walls,
        n_legs,
    };
    ctx.extend(origin, None, 0.0, &mut legs, &mut out);
    out
}

struct RouteContext<'a> {
    m: &'a Mapping,
    q: &'a LogicalQubit,
    origin: Slot,
    event: &'a CreEvent,
    p: &'a PhysicalParams,
    walls: &'a BTreeMap<Slot, usize>,
    n_legs: usize,
}

impl RouteContext<'_> {
    fn extend(
        &self,
        at: Slot,
        last_axis: Option<Axis>,
        traveled: f64,
        legs: &mut Vec<(Axis, Vec<Slot>)>,
        out: &mut Vec<Route>,
    ) {
        let m = self.m;
        for (dx, dy, axis) in DIRECTIONS {
            if Some(axis) == last_axis {
                continue;
            }
            let pitch = match axis {
                Axis::Horizontal => m.slot_width as f64 * m.l,
                Axis::Vertical => m.slot_height as f64 * m.l,
            };
            let mut cells = vec![at];
            let mut cur = at;
            loop {
                let nx = cur.col as i64 + dx;
                let ny = cur.row as i64 + dy;
                if nx < 0 || ny < 0 {
                    break;
                }
                let next = Slot::new(nx as usize, ny as usize);
                if m.kind(next).is_none() || self.walls.contains_key(&next) || next == self.origin {
                    break;
                }
                cells.push(next);
                cur = next;
                let total = traveled + (cells.len() - 1) as f64 * pitch;
                legs.push((axis, cells.clone()));
                if legs.len() == self.n_legs {
                    if m.kind(next) == Some(SlotKind::Channel) {
                        let [a, b] = m.hole_centers(next);
                        let dest = self.q.with_centers(a, b);
                        if clears_margin(self.q, &dest, total, self.event, self.p) {
                            out.push(Route {
                                legs: legs.clone(),
                                target: next,
                                traveled: total,
                            });
                        }
                    }
                } else {
                    self.extend(next, Some(axis), total, legs, out);
                }
                legs.pop();
            }
        }
    }
}

/// Routes a qubit could take if every other qubit stayed put.
pub fn escape_options(
    m: &Mapping,
    qubit: usize,
    event: &CreEvent,
    p: &PhysicalParams,
) -> Result<Vec<EscapeOption>> {
    let pq = m.qubit(qubit)?;
    let walls: BTreeMap<Slot, usize> = m
        .qubits
        .iter()
        .filter(|o| o.id != qubit)
        .map(|o| (o.slot, o.id))
        .collect();
    let routes =
        (1..=MAX_LEGS).flat_map(|n| enumerate_routes(m, &pq.qubit, pq.slot, event, p, &walls, n));
    Ok(routes
        .map(|r| EscapeOption {
            target: r.target,
            axes: r.legs.iter().map(|(a, _)| *a).collect(),
            duration: r
                .legs
                .iter()
                .map(|(a, _)| move_duration(pq.qubit.orientation, *a, pq.qubit.code_distance))
                .sum(),
            traveled_mm: r.traveled,
        })
        .collect())
}

/// Turn batched legs into timed hole moves.
fn finish_plan(m: &Mapping, detect_cycle: u64, flights: Vec<Flight>) -> MovePlan {
    let n_batches = flights.iter().map(Flight::steps).max().unwrap_or(0) as usize;
    let mut durations = vec![0u64; n_batches];
    for f in &flights {
        let q = &m.qubits[f.qubit].qubit;
        for leg in &f.legs {
            let dur = move_duration(q.orientation, leg.axis, q.code_distance);
            let slot = &mut durations[leg.batch as usize - 1];
            *slot = (*slot).max(dur);
        }
    }
    let mut batch_starts = Vec::with_capacity(n_batches);
    let mut t = detect_cycle + 1;
    for dur in &durations {
        batch_starts.push(t);
        t += dur;
    }

    let mut steps = Vec::new();
    for f in &flights {
        let q = &m.qubits[f.qubit].qubit;
        let d = u64::from(q.code_distance);
        let sep = q.holes[1].center;
        let sep = (sep.x - q.holes[0].center.x, sep.y - q.holes[0].center.y);
        for leg in &f.legs {
            let start = batch_starts[leg.batch as usize - 1];
            let targets = [leg.to, leg.to.offset(sep.0, sep.1)];
            let along = move_duration(q.orientation, leg.axis, q.code_distance) == 2 * d;
            let order: [usize; 2] = if along {
                // The hole in front moves first.
                let forward = (leg.to.x - leg.from.x) + (leg.to.y - leg.from.y) > 0;
                if forward {
                    [1, 0]
                } else {
                    [0, 1]
                }
            } else {
                [0, 1]
            };
            for (rank, &hole) in order.iter().enumerate() {
                let offset = if along { rank as u64 * d } else { 0 };
                steps.push(MoveStep {
                    qubit: f.qubit,
                    hole,
                    axis: leg.axis,
                    target: targets[hole],
                    start: start + offset,
                    duration: d,
                    batch: leg.batch,
                });
            }
        }
    }
    steps.sort_by_key(|s| (s.start, s.qubit, s.hole));
    MovePlan {
        detect_cycle,
        flights,
        steps,
        batch_starts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::build_mapping;
    use crate::model::Point;

    fn params(d: u32) -> PhysicalParams {
        PhysicalParams::reference().with_d(d)
    }

    #[test]
    fn detection_is_fixed_latency() {
        let e = CreEvent::new(Point::default(), 0);
        assert_eq!(
            detect(
                &e,
                &PhysicalParams {
                    delta: 0,
                    ..params(5)
                }
            ),
            0
        );
        assert_eq!(detect(&e, &params(5)), 1);
        assert_eq!(
            detect(
                &e,
                &PhysicalParams {
                    delta: 25,
                    ..params(5)
                }
            ),
            25
        );
        let late = CreEvent::new(Point::default(), 10);
        assert_eq!(detect(&late, &params(5)), 11);
    }

    #[test]
    fn durations_follow_orientation() {
        assert_eq!(move_duration(Orientation::Horizontal, Axis::Vertical, 7), 7);
        assert_eq!(
            move_duration(Orientation::Horizontal, Axis::Horizontal, 7),
            14
        );
        assert_eq!(move_duration(Orientation::Vertical, Axis::Vertical, 7), 14);
        assert_eq!(move_duration(Orientation::Vertical, Axis::Horizontal, 7), 7);
    }

    #[test]
    fn far_strike_needs_no_plan() {
        let p = params(69);
        let m = build_mapping(2, 2, &p).unwrap();
        let (w, h) = m.extent_mm();
        let e = CreEvent::new(Point::new(w + 500.0, h + 500.0), 0);
        let plan = plan_flight(&m, &e, &p).unwrap();
        assert!(plan.is_empty());
        assert!(plan.steps.is_empty());
    }

    #[test]
    fn strike_below_a_row_moves_its_three_nearest_qubits() {
        // 2x2 cells: rows 1 and 3 hold qubits, rows 0, 2, 4 are channels.
        // Slot (col 3, row 4) is the fourth column of the bottom channel.
        let d = 69;
        let p = PhysicalParams {
            r_max: 2.0 * f64::from(d),
            ..params(d)
        };
        let m = build_mapping(2, 2, &p).unwrap();
        let e = CreEvent::new(m.slot_center_mm(Slot::new(3, 4)), 0);
        let plan = plan_flight(&m, &e, &p).unwrap();
        let mut moved: Vec<Slot> = plan
            .flights
            .iter()
            .map(|f| m.qubits[f.qubit].slot)
            .collect();
        moved.sort();
        assert_eq!(
            moved,
            vec![Slot::new(2, 3), Slot::new(3, 3), Slot::new(4, 3)]
        );
        // The nearest qubit leads and everyone leaves upwards in one batch.
        assert_eq!(m.qubits[plan.flights[0].qubit].slot, Slot::new(3, 3));
        for f in &plan.flights {
            assert_eq!(f.steps(), 1);
            assert_eq!(f.legs[0].axis, Axis::Vertical);
            assert!(f.legs[0].to.y < f.legs[0].from.y);
        }
        assert_eq!(plan.batch_starts, vec![2]);
    }

    #[test]
    fn perpendicular_escape_beats_sliding_along_the_axis() {
        // Strike between the holes of the middle qubit of one unit cell.
        let d = 12;
        let p = PhysicalParams {
            r_max: 10.0,
            ..params(d)
        };
        let m = build_mapping(1, 1, &p).unwrap();
        let q = &m.qubits[1];
        let e = CreEvent::new(q.qubit.midpoint_mm(p.l), 0);
        let options = escape_options(&m, 1, &e, &p).unwrap();
        // Exhaustive enumeration: the fastest option is a single vertical
        // leg taking d cycles; routes with a horizontal leg take at least 3d.
        let fastest = options.iter().map(|o| o.duration).min().unwrap();
        assert_eq!(fastest, u64::from(d));
        let with_horizontal = options
            .iter()
            .filter(|o| o.axes.contains(&Axis::Horizontal))
            .map(|o| o.duration)
            .min()
            .unwrap();
        assert_eq!(with_horizontal, 3 * u64::from(d));

        let plan = plan_flight(&m, &e, &p).unwrap();
        let f = plan.flight(1).unwrap();
        assert_eq!(f.legs.len(), 1);
        assert_eq!(f.legs[0].axis, Axis::Vertical);
        let steps: Vec<_> = plan.steps.iter().filter(|s| s.qubit == 1).collect();
        assert_eq!(steps.len(), 2);
        assert!(steps
            .iter()
            .all(|s| s.duration == u64::from(d) && s.start == 2));
    }

    #[test]
    fn along_axis_moves_are_sequential() {
        let p = params(10);
        let m = build_mapping(1, 1, &p).unwrap();
        let f = Flight {
            qubit: 0,
            legs: vec![Leg {
                from: m.qubits[0].qubit.holes[0].center,
                to: m.qubits[0].qubit.holes[0].center.offset(30, 0),
                axis: Axis::Horizontal,
                batch: 1,
            }],
            traveled_mm: 30.0,
        };
        let plan = finish_plan(&m, 1, vec![f]);
        assert_eq!(plan.steps.len(), 2);
        // Hole 1 leads when moving right.
        assert_eq!(plan.steps[0].hole, 1);
        assert_eq!(plan.steps[0].start, 2);
        assert_eq!(plan.steps[1].hole, 0);
        assert_eq!(plan.steps[1].start, 12);
        assert_eq!(plan.completion(), 22);
    }

    #[test]
    fn isolated_qubit_moves_by_the_nominal_displacement() {
        let p = PhysicalParams {
            r_max: 63.0,
            move_displacement: 3.5,
            ..params(69)
        };
        let m = Mapping::isolated(LatticePoint::new(0, 0), &p).unwrap();
        let e = CreEvent::new(Point::new(0.0, 0.0), 0);
        let plan = plan_flight(&m, &e, &p).unwrap();
        let f = plan.flight(0).unwrap();
        assert_eq!(f.legs.len(), 1);
        assert_eq!(f.legs[0].to, LatticePoint::new(0, -4));
        assert_eq!(f.traveled_mm, 4.0);
        assert_eq!(plan.move_start(0), Some(2));
    }

    #[test]
    fn unescapable_when_no_channel_clears_the_margin() {
        // A front far bigger than anything the mapping can offer.
        let p = PhysicalParams {
            r_max: 1e6,
            ..params(8)
        };
        let m = build_mapping(1, 1, &p).unwrap();
        let e = CreEvent::new(m.qubits[1].qubit.midpoint_mm(p.l), 0);
        assert!(matches!(
            plan_flight(&m, &e, &p),
            Err(FleeError::Unescapable { .. })
        ));
    }
}

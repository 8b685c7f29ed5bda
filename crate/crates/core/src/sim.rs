//! Cycle-by-cycle execution of a move plan under one or more strikes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FleeError, Result};
use crate::mapping::Mapping;
use crate::model::{
    compromised_in_disc, hole_swallowed, CreEvent, LatticePoint, LogicalQubit, PhononFront,
    PhysicalParams,
};
use crate::planner::{detect, MovePlan};

pub const EVENT_LOG_HEADER: [&str; 4] = ["cycle", "event_kind", "qubit_id", "detail"];

/// How a front damages a qubit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DamageModel {
    /// Geometric: the union of discs covers the whole operator string, or a
    /// single disc swallows a hole. Holes count at their origin until each
    /// step completes.
    #[default]
    Disc,
    /// One-dimensional accounting along the escape direction. Before the
    /// move starts the qubit is lost once `2r >= x0 + l(d-1)`. Once it starts,
    /// the whole displacement is credited and the qubit is lost once
    /// `r >= x0 - r_s + travel + l(d-1)`, with `r_s` the radius at move start.
    EscapeAxis,
}

impl DamageModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            DamageModel::Disc => "disc",
            DamageModel::EscapeAxis => "escape_axis",
        }
    }
}

impl fmt::Display for DamageModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DamageModel {
    type Err = FleeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disc" => Ok(DamageModel::Disc),
            "escape_axis" => Ok(DamageModel::EscapeAxis),
            other => Err(FleeError::Format(format!("unknown damage model `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub model: DamageModel,
    /// Cycles the saturated front lingers before vanishing. `None` keeps it.
    pub dwell: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Strike,
    Detect,
    MoveStart,
    MoveComplete,
    Destroyed,
    Survived,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Strike => "strike",
            EventKind::Detect => "detect",
            EventKind::MoveStart => "move_start",
            EventKind::MoveComplete => "move_complete",
            EventKind::Destroyed => "destroyed",
            EventKind::Survived => "survived",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimelineRecord {
    pub cycle: u64,
    pub kind: EventKind,
    pub qubit: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub survived: Vec<bool>,
    pub destroyed_at: Vec<Option<u64>>,
    pub timeline: Vec<TimelineRecord>,
    /// Last simulated cycle.
    pub end_cycle: u64,
}

impl SimOutcome {
    pub fn all_survived(&self) -> bool {
        self.survived.iter().all(|&s| s)
    }

    pub fn losses(&self) -> usize {
        self.survived.iter().filter(|&&s| !s).count()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(EVENT_LOG_HEADER)?;
        for r in &self.timeline {
            out.write_record([
                r.cycle.to_string(),
                r.kind.as_str().to_string(),
                r.qubit.map(|q| q.to_string()).unwrap_or_default(),
                r.detail.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Hole centres of every qubit at cycle `t`. A hole sits at its origin until
/// its step completes and at the target from then on.
pub fn hole_positions(m: &Mapping, plan: &MovePlan, t: u64) -> Vec<[LatticePoint; 2]> {
    let mut pos: Vec<[LatticePoint; 2]> = m
        .qubits
        .iter()
        .map(|pq| [pq.qubit.holes[0].center, pq.qubit.holes[1].center])
        .collect();
    // Steps are sorted by start; later steps of the same hole overwrite.
    for s in plan.steps.iter().filter(|s| s.completion() <= t) {
        pos[s.qubit][s.hole] = s.target;
    }
    pos
}

/// Single-strike simulation under the default damage model.
pub fn simulate(m: &Mapping, event: &CreEvent, p: &PhysicalParams, plan: &MovePlan) -> SimOutcome {
    simulate_with(
        m,
        std::slice::from_ref(event),
        p,
        plan,
        &SimOptions::default(),
    )
}

pub fn simulate_with(
    m: &Mapping,
    events: &[CreEvent],
    p: &PhysicalParams,
    plan: &MovePlan,
    opts: &SimOptions,
) -> SimOutcome {
    let fronts: Vec<PhononFront> = events
        .iter()
        .map(|e| {
            let f = PhononFront::new(*e, *p);
            match opts.dwell {
                Some(dw) => f.with_dwell(dw),
                None => f,
            }
        })
        .collect();
    let first = events.iter().map(|e| e.t0).min().unwrap_or(0);
    let end = fronts
        .iter()
        .map(|f| f.saturation_cycle().max(detect(&f.event, p)))
        .chain(std::iter::once(plan.completion()))
        .max()
        .unwrap_or(0)
        .max(first);

    let n = m.qubits.len();
    let mut destroyed_at: Vec<Option<u64>> = vec![None; n];
    let mut timeline = Vec::new();
    let escape = EscapeState::new(m, events, p, plan);
    let mut radii = vec![0.0; fronts.len()];

    for t in first..=end {
        for (i, e) in events.iter().enumerate() {
            if e.t0 == t {
                timeline.push(TimelineRecord {
                    cycle: t,
                    kind: EventKind::Strike,
                    qubit: None,
                    detail: format!("event={i} x_mm={} y_mm={}", e.epicenter.x, e.epicenter.y),
                });
            }
            if detect(e, p) == t {
                timeline.push(TimelineRecord {
                    cycle: t,
                    kind: EventKind::Detect,
                    qubit: None,
                    detail: format!("event={i}"),
                });
            }
        }
        for s in &plan.steps {
            if s.start == t {
                timeline.push(TimelineRecord {
                    cycle: t,
                    kind: EventKind::MoveStart,
                    qubit: Some(s.qubit),
                    detail: format!(
                        "hole={} axis={} target={}:{} batch={}",
                        s.hole,
                        s.axis.as_str(),
                        s.target.x,
                        s.target.y,
                        s.batch
                    ),
                });
            }
        }
        for s in &plan.steps {
            if s.completion() == t {
                timeline.push(TimelineRecord {
                    cycle: t,
                    kind: EventKind::MoveComplete,
                    qubit: Some(s.qubit),
                    detail: format!("hole={}", s.hole),
                });
            }
        }

        for (r, f) in radii.iter_mut().zip(&fronts) {
            *r = if t < f.event.t0 {
                0.0
            } else {
                f.radius(t as f64).expect("t not before strike")
            };
        }
        if radii.iter().all(|&r| r <= 0.0) {
            continue;
        }
        let positions = match opts.model {
            DamageModel::Disc => Some(hole_positions(m, plan, t)),
            DamageModel::EscapeAxis => None,
        };
        for (id, pq) in m.qubits.iter().enumerate() {
            if destroyed_at[id].is_some() {
                continue;
            }
            let lost = match &positions {
                Some(pos) => {
                    let q = pq.qubit.with_centers(pos[id][0], pos[id][1]);
                    disc_union_destroys(&fronts, &radii, &q, p.l)
                }
                None => escape.destroys(id, t, &radii),
            };
            if lost {
                destroyed_at[id] = Some(t);
                timeline.push(TimelineRecord {
                    cycle: t,
                    kind: EventKind::Destroyed,
                    qubit: Some(id),
                    detail: format!("model={}", opts.model),
                });
            }
        }
    }
    for (id, d) in destroyed_at.iter().enumerate() {
        if d.is_none() {
            timeline.push(TimelineRecord {
                cycle: end,
                kind: EventKind::Survived,
                qubit: Some(id),
                detail: String::new(),
            });
        }
    }
    SimOutcome {
        survived: destroyed_at.iter().map(Option::is_none).collect(),
        destroyed_at,
        timeline,
        end_cycle: end,
    }
}

fn disc_union_destroys(fronts: &[PhononFront], radii: &[f64], q: &LogicalQubit, l: f64) -> bool {
    let live = || fronts.iter().zip(radii).filter(|(_, &r)| r > 0.0);
    for (f, &r) in live() {
        if q.holes
            .iter()
            .any(|h| hole_swallowed(&f.event.epicenter, r, h, l))
        {
            return true;
        }
    }
    let needed = q.code_distance.saturating_sub(1) as usize;
    if fronts.len() == 1 {
        return compromised_in_disc(&fronts[0].event.epicenter, radii[0], q, l) >= needed;
    }
    let hit = q
        .string_sites()
        .into_iter()
        .filter(|s| {
            let mm = s.to_mm(l);
            live().any(|(f, &r)| mm.distance(&f.event.epicenter) < r)
        })
        .count();
    hit >= needed
}

/// Precomputed per-(qubit, event) quantities for [`DamageModel::EscapeAxis`].
struct EscapeState {
    /// `[qubit][event]`
    entries: Vec<Vec<EscapeEntry>>,
}

#[derive(Clone, Copy)]
struct EscapeEntry {
    x0: f64,
    string_len: f64,
    /// Move start and travel, when the qubit moves after this strike.
    flight: Option<(u64, f64)>,
    t0: u64,
    speed: f64,
    r_max: f64,
}

impl EscapeState {
    fn new(m: &Mapping, events: &[CreEvent], p: &PhysicalParams, plan: &MovePlan) -> Self {
        let entries = m
            .qubits
            .iter()
            .map(|pq| {
                events
                    .iter()
                    .map(|e| {
                        let pos = hole_positions(m, plan, e.t0);
                        let q = pq.qubit.with_centers(pos[pq.id][0], pos[pq.id][1]);
                        let flight = match (plan.move_start(pq.id), plan.flight(pq.id)) {
                            (Some(s), Some(f)) if s >= e.t0 => Some((s, f.traveled_mm)),
                            _ => None,
                        };
                        EscapeEntry {
                            x0: q.nearest_hole_distance(&e.epicenter, p.l),
                            string_len: p.l * f64::from(q.code_distance.saturating_sub(1)),
                            flight,
                            t0: e.t0,
                            speed: p.front_speed(),
                            r_max: p.r_max,
                        }
                    })
                    .collect()
            })
            .collect();
        EscapeState { entries }
    }

    fn destroys(&self, qubit: usize, t: u64, radii: &[f64]) -> bool {
        self.entries[qubit].iter().zip(radii).any(|(e, &r)| {
            if r <= 0.0 {
                return false;
            }
            match e.flight {
                Some((s, travel)) if t > s => {
                    let r_s = (e.speed * (s - e.t0) as f64).min(e.r_max);
                    r >= e.x0 - r_s + travel + e.string_len
                }
                _ => 2.0 * r >= e.x0 + e.string_len,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{min_code_distance, StrikeScenario};
    use crate::mapping::build_mapping;
    use crate::model::Point;
    use crate::planner::plan_flight;
    use proptest::prelude::*;

    fn params(d: u32) -> PhysicalParams {
        PhysicalParams::reference().with_d(d)
    }

    #[test]
    fn no_front_no_losses() {
        let p = PhysicalParams {
            v_p: 0.0,
            ..params(8)
        };
        let m = build_mapping(1, 1, &p).unwrap();
        let e = CreEvent::new(m.qubits[1].qubit.holes[0].center.to_mm(p.l), 0);
        let out = simulate(&m, &e, &p, &MovePlan::empty(1));
        assert!(out.all_survived());
        assert!(out.destroyed_at.iter().all(Option::is_none));
    }

    #[test]
    fn unmoved_qubit_under_a_big_front_is_lost() {
        let p = PhysicalParams {
            r_max: 200.0,
            ..params(8)
        };
        let m = build_mapping(1, 1, &p).unwrap();
        let e = CreEvent::new(m.qubits[1].qubit.holes[0].center.to_mm(p.l), 0);
        let out = simulate(&m, &e, &p, &MovePlan::empty(1));
        assert!(!out.survived[1]);
        assert!(out.destroyed_at[1].is_some());
        for (s, d) in out.survived.iter().zip(&out.destroyed_at) {
            assert_eq!(*s, d.is_none());
        }
    }

    #[test]
    fn feasible_isolated_qubit_survives_under_escape_axis() {
        let base = PhysicalParams::reference();
        for scenario in [StrikeScenario::halfway(), StrikeScenario::at_hole()] {
            let d = min_code_distance(&base, &scenario, 500).value().unwrap();
            let p = base.with_d(d);
            let m = Mapping::isolated(LatticePoint::new(0, 0), &p).unwrap();
            let e = CreEvent::new(Point::new(-scenario.x0(&p), 0.0), 0);
            let plan = plan_flight(&m, &e, &p).unwrap();
            assert_eq!(plan.move_start(0), Some(2));
            let opts = SimOptions {
                model: DamageModel::EscapeAxis,
                dwell: None,
            };
            let out = simulate_with(&m, &[e], &p, &plan, &opts);
            assert!(out.survived[0], "{scenario:?} d={d}");

            // One size smaller fails the pre-move or post-move margin.
            let p = base.with_d(d - 1);
            let m = Mapping::isolated(LatticePoint::new(0, 0), &p).unwrap();
            let e = CreEvent::new(Point::new(-scenario.x0(&p), 0.0), 0);
            if let Ok(plan) = plan_flight(&m, &e, &p) {
                let fixed = MovePlan {
                    flights: plan
                        .flights
                        .iter()
                        .cloned()
                        .map(|mut f| {
                            f.traveled_mm = p.move_displacement;
                            f
                        })
                        .collect(),
                    ..plan
                };
                let out = simulate_with(&m, &[e], &p, &fixed, &opts);
                assert!(!out.survived[0], "{scenario:?} d={}", d - 1);
            }
        }
    }

    #[test]
    fn event_log_has_fixed_columns() {
        let p = PhysicalParams {
            r_max: 10.0,
            ..params(12)
        };
        let m = build_mapping(1, 1, &p).unwrap();
        let e = CreEvent::new(m.qubits[1].qubit.midpoint_mm(p.l), 0);
        let plan = plan_flight(&m, &e, &p).unwrap();
        let out = simulate(&m, &e, &p, &plan);
        let text = out.to_csv_string();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("cycle,event_kind,qubit_id,detail"));
        assert_eq!(lines.next(), Some("0,strike,,event=0 x_mm=45 y_mm=22"));
        assert_eq!(lines.next(), Some("1,detect,,event=0"));
        assert!(text.contains("2,move_start,1,hole=0 axis=vertical"));
        assert!(text.contains(",move_complete,1,hole=1"));
        for line in text.lines() {
            assert_eq!(line.split(',').count(), 4, "{line}");
        }
        assert!(!text.contains('\r'));
        assert_eq!(out.survived, vec![true, false, true]);
    }

    #[test]
    fn two_strikes_combine_their_discs() {
        // Each disc covers one half of the string; neither alone is enough.
        let p = PhysicalParams {
            r_max: 3.0,
            ..params(12)
        };
        let m = Mapping::isolated(LatticePoint::new(0, 0), &p).unwrap();
        let left = CreEvent::new(Point::new(3.5, 1.0), 0);
        let right = CreEvent::new(Point::new(8.5, 1.0), 0);
        let plan = MovePlan::empty(1);
        let opts = SimOptions::default();
        assert!(simulate_with(&m, &[left], &p, &plan, &opts).survived[0]);
        assert!(simulate_with(&m, &[right], &p, &plan, &opts).survived[0]);
        assert!(!simulate_with(&m, &[left, right], &p, &plan, &opts).survived[0]);
    }

    #[test]
    fn dissipated_front_does_no_more_damage() {
        let p = PhysicalParams {
            r_max: 3.0,
            ..params(12)
        };
        let m = Mapping::isolated(LatticePoint::new(0, 0), &p).unwrap();
        let early = CreEvent::new(Point::new(3.5, 1.0), 0);
        let late = CreEvent::new(Point::new(8.5, 1.0), 20);
        let opts = SimOptions {
            model: DamageModel::Disc,
            dwell: Some(2.0),
        };
        let out = simulate_with(&m, &[early, late], &p, &MovePlan::empty(1), &opts);
        assert!(out.survived[0]);
    }

    #[test]
    fn holes_never_overlap_during_a_plan() {
        let d = 69;
        let p = PhysicalParams {
            r_max: 2.0 * f64::from(d),
            ..params(d)
        };
        let m = build_mapping(2, 2, &p).unwrap();
        let e = CreEvent::new(m.slot_center_mm(crate::mapping::Slot::new(3, 4)), 0);
        let plan = plan_flight(&m, &e, &p).unwrap();
        let hw = m.qubits[0].qubit.holes[0].half_width;
        for t in 0..=plan.completion() {
            let holes: Vec<LatticePoint> =
                hole_positions(&m, &plan, t).into_iter().flatten().collect();
            for (i, a) in holes.iter().enumerate() {
                for b in &holes[i + 1..] {
                    let apart = ((a.x - b.x).abs() as f64) >= 2.0 * hw
                        || ((a.y - b.y).abs() as f64) >= 2.0 * hw;
                    assert!(apart, "t={t} {a:?} {b:?}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn identical_inputs_give_identical_logs(x in 0.0f64..500.0, y in 0.0f64..260.0, r in 5.0f64..80.0) {
            let p = PhysicalParams { r_max: r, ..params(69) };
            let m = build_mapping(1, 1, &p).unwrap();
            let e = CreEvent::new(Point::new(x, y), 0);
            if let Ok(plan) = plan_flight(&m, &e, &p) {
                let a = simulate(&m, &e, &p, &plan);
                let b = simulate(&m, &e, &p, &plan);
                prop_assert_eq!(a.to_csv_string(), b.to_csv_string());
                prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
            }
        }
    }
}

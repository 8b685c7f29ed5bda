//! Lattice geometry and the phonon-front damage model.
//!
//! Lattice sites sit on integer coordinates; a site `(x, y)` lives at
//! `(x * l, y * l)` millimetres. Time is counted in lattice cycles of length
//! `t_c` microseconds. A cosmic-ray event (CRE) launches a filled disc of
//! compromised substrate that grows at `v_p` until it reaches `r_max`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, FleeError, Result};

/// Hardware and model constants shared by the solver and the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Physical lattice spacing (mm).
    pub l: f64,
    /// Code distance: lattice sites between the two holes of a qubit.
    pub d: u32,
    /// Phonon propagation speed (mm/us).
    pub v_p: f64,
    /// Detection latency (lattice cycles).
    pub delta: u32,
    /// Lattice cycle time (us/cycle).
    pub t_c: f64,
    /// Maximum phonon radius enforced by hardware (mm).
    pub r_max: f64,
    /// Distance a hole travels during a flight move (mm).
    pub move_displacement: f64,
}

impl PhysicalParams {
    /// Silicon phonon speed, a 63 mm hardware-limited radius, 1 mm pitch,
    /// one-cycle detection and a 1 mm move.
    pub fn reference() -> Self {
        PhysicalParams {
            l: 1.0,
            d: 2,
            v_p: 2.5,
            delta: 1,
            t_c: 1.0,
            r_max: 63.0,
            move_displacement: 1.0,
        }
    }

    pub fn with_d(self, d: u32) -> Self {
        PhysicalParams { d, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        fn finite(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite, got {v}")))
            }
        }
        finite("l", self.l)?;
        finite("v_p", self.v_p)?;
        finite("t_c", self.t_c)?;
        finite("r_max", self.r_max)?;
        finite("move_displacement", self.move_displacement)?;
        if self.l <= 0.0 {
            return Err(invalid("l", format!("must be > 0, got {}", self.l)));
        }
        if self.v_p < 0.0 {
            return Err(invalid("v_p", format!("must be >= 0, got {}", self.v_p)));
        }
        if self.t_c <= 0.0 {
            return Err(invalid("t_c", format!("must be > 0, got {}", self.t_c)));
        }
        if self.r_max < 0.0 {
            return Err(invalid(
                "r_max",
                format!("must be >= 0, got {}", self.r_max),
            ));
        }
        if self.d < 2 {
            return Err(invalid("d", format!("must be >= 2, got {}", self.d)));
        }
        if self.move_displacement < 0.0 {
            return Err(invalid(
                "move_displacement",
                format!("must be >= 0, got {}", self.move_displacement),
            ));
        }
        Ok(())
    }

    /// Front growth per lattice cycle (mm/cycle).
    pub fn front_speed(&self) -> f64 {
        self.v_p * self.t_c
    }

    /// Uncapped front radius when the move begins, one cycle after detection.
    pub fn radius_at_move_start(&self) -> f64 {
        self.front_speed() * (f64::from(self.delta) + 1.0)
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// A continuous position on the chip, in millimetres.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Integral lattice coordinate. Rows grow downwards, so "up" is smaller `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub fn new(x: i64, y: i64) -> Self {
        LatticePoint { x, y }
    }

    pub fn to_mm(self, l: f64) -> Point {
        Point::new(self.x as f64 * l, self.y as f64 * l)
    }

    pub fn offset(self, dx: i64, dy: i64) -> Self {
        LatticePoint::new(self.x + dx, self.y + dy)
    }
}

/// A hole cut into the lattice. The footprint is an axis-aligned square of
/// side `2 * half_width` lattice units centred on `center`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub center: LatticePoint,
    pub half_width: f64,
}

impl Hole {
    /// Hole sized for code distance `d`: a `d/4` square.
    pub fn for_distance(center: LatticePoint, d: u32) -> Self {
        Hole {
            center,
            half_width: f64::from(d) / 8.0,
        }
    }

    pub fn corners_mm(&self, l: f64) -> [Point; 4] {
        let c = self.center.to_mm(l);
        let h = self.half_width * l;
        [
            Point::new(c.x - h, c.y - h),
            Point::new(c.x + h, c.y - h),
            Point::new(c.x - h, c.y + h),
            Point::new(c.x + h, c.y + h),
        ]
    }

    pub fn contains_mm(&self, p: &Point, l: f64) -> bool {
        let c = self.center.to_mm(l);
        let h = self.half_width * l;
        (p.x - c.x).abs() <= h && (p.y - c.y).abs() <= h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Two holes plus the straight operator string of data qubits joining them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalQubit {
    pub holes: [Hole; 2],
    pub orientation: Orientation,
    pub code_distance: u32,
}

impl LogicalQubit {
    /// Places hole 0 at `anchor` and hole 1 `d` sites further along the axis.
    pub fn new(anchor: LatticePoint, orientation: Orientation, d: u32) -> Self {
        let far = match orientation {
            Orientation::Horizontal => anchor.offset(i64::from(d), 0),
            Orientation::Vertical => anchor.offset(0, i64::from(d)),
        };
        LogicalQubit {
            holes: [Hole::for_distance(anchor, d), Hole::for_distance(far, d)],
            orientation,
            code_distance: d,
        }
    }

    /// Same qubit with its holes relocated (used while a move is in flight).
    pub fn with_centers(&self, a: LatticePoint, b: LatticePoint) -> Self {
        let mut q = *self;
        q.holes[0].center = a;
        q.holes[1].center = b;
        q
    }

    /// Data-qubit sites strictly between the two hole centres, walking `x`
    /// first and then `y`. For an aligned pair `d` apart this is the `d - 1`
    /// site operator string.
    pub fn string_sites(&self) -> Vec<LatticePoint> {
        let a = self.holes[0].center;
        let b = self.holes[1].center;
        let mut sites = Vec::new();
        let mut cur = a;
        let step_x = (b.x - a.x).signum();
        let step_y = (b.y - a.y).signum();
        while cur.x != b.x {
            cur.x += step_x;
            sites.push(cur);
        }
        while cur.y != b.y {
            cur.y += step_y;
            sites.push(cur);
        }
        // The walk ends on hole 1 itself.
        sites.pop();
        sites
    }

    pub fn midpoint_mm(&self, l: f64) -> Point {
        let a = self.holes[0].center.to_mm(l);
        let b = self.holes[1].center.to_mm(l);
        Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
    }

    /// Distance from `p` to the nearer hole centre (mm).
    pub fn nearest_hole_distance(&self, p: &Point, l: f64) -> f64 {
        self.holes
            .iter()
            .map(|h| h.center.to_mm(l).distance(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// A cosmic-ray strike.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreEvent {
    pub epicenter: Point,
    /// Strike time in lattice cycles.
    pub t0: u64,
}

impl CreEvent {
    pub fn new(epicenter: Point, t0: u64) -> Self {
        CreEvent { epicenter, t0 }
    }
}

/// Growing disc of compromised substrate around a strike.
///
/// The radius grows by `v_p * t_c` per cycle and saturates at `r_max`. With
/// no dwell set the saturated front persists; with `dwell` set the front
/// disappears `dwell` cycles after saturating.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhononFront {
    pub event: CreEvent,
    pub params: PhysicalParams,
    pub dwell: Option<f64>,
}

impl PhononFront {
    pub fn new(event: CreEvent, params: PhysicalParams) -> Self {
        PhononFront {
            event,
            params,
            dwell: None,
        }
    }

    pub fn with_dwell(mut self, cycles: f64) -> Self {
        self.dwell = Some(cycles);
        self
    }

    /// Cycles after the strike at which the radius reaches `r_max`.
    pub fn saturation_time(&self) -> f64 {
        let speed = self.params.front_speed();
        if speed <= 0.0 || self.params.r_max <= 0.0 {
            0.0
        } else {
            self.params.r_max / speed
        }
    }

    /// Cycles after the strike at which the front vanishes.
    pub fn dissipation_time(&self) -> f64 {
        match self.dwell {
            Some(dwell) => self.saturation_time() + dwell,
            None => f64::INFINITY,
        }
    }

    /// First whole cycle at which the radius no longer changes.
    pub fn saturation_cycle(&self) -> u64 {
        self.event.t0 + self.saturation_time().ceil() as u64
    }

    /// Front radius in millimetres at cycle `t`.
    pub fn radius(&self, t: f64) -> Result<f64> {
        let t0 = self.event.t0 as f64;
        if t < t0 {
            return Err(FleeError::TimeBeforeEvent { t, t0 });
        }
        let elapsed = t - t0;
        if elapsed > self.dissipation_time() {
            return Ok(0.0);
        }
        Ok((self.params.front_speed() * elapsed).min(self.params.r_max))
    }
}

/// Front radius at cycle `t`; see [`PhononFront::radius`].
pub fn phonon_radius(front: &PhononFront, t: f64) -> Result<f64> {
    front.radius(t)
}

/// Operator-string sites strictly inside the disc of `radius` around `center`.
pub fn compromised_in_disc(center: &Point, radius: f64, q: &LogicalQubit, l: f64) -> usize {
    if radius <= 0.0 {
        return 0;
    }
    q.string_sites()
        .into_iter()
        .filter(|s| s.to_mm(l).distance(center) < radius)
        .count()
}

/// True when the hole footprint lies strictly inside the disc.
pub fn hole_swallowed(center: &Point, radius: f64, hole: &Hole, l: f64) -> bool {
    radius > 0.0
        && hole
            .corners_mm(l)
            .iter()
            .all(|c| c.distance(center) < radius)
}

/// Destruction predicate for a single disc: at least `d - 1` string sites
/// compromised, or either hole footprint swallowed whole.
pub fn destroyed_by_disc(center: &Point, radius: f64, q: &LogicalQubit, l: f64) -> bool {
    if radius <= 0.0 {
        return false;
    }
    if q.holes.iter().any(|h| hole_swallowed(center, radius, h, l)) {
        return true;
    }
    let needed = q.code_distance.saturating_sub(1) as usize;
    let a = q.holes[0].center;
    let b = q.holes[1].center;
    let span = (b.x - a.x).abs() + (b.y - a.y).abs();
    if (a.x == b.x || a.y == b.y) && span >= 2 && span as usize - 1 == needed {
        // A straight string lies in a convex disc iff both end sites do.
        let step = ((b.x - a.x).signum(), (b.y - a.y).signum());
        let first = a.offset(step.0, step.1).to_mm(l);
        let last = b.offset(-step.0, -step.1).to_mm(l);
        return first.distance(center) < radius && last.distance(center) < radius;
    }
    compromised_in_disc(center, radius, q, l) >= needed
}

pub fn compromised_count(front: &PhononFront, q: &LogicalQubit, t: f64) -> Result<usize> {
    let r = front.radius(t)?;
    Ok(compromised_in_disc(
        &front.event.epicenter,
        r,
        q,
        front.params.l,
    ))
}

pub fn is_destroyed(front: &PhononFront, q: &LogicalQubit, t: f64) -> Result<bool> {
    let r = front.radius(t)?;
    Ok(destroyed_by_disc(
        &front.event.epicenter,
        r,
        q,
        front.params.l,
    ))
}

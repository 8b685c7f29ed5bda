//! Monte Carlo estimate of the failure probability.
//!
//! Every trial draws a strike position in the frame around the target qubit
//! and a number of further strikes during the escape. Trial `i` uses ChaCha
//! stream `i` of the seed, so estimates do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{FleeError, Result};
use crate::mapping::Mapping;
use crate::model::{CreEvent, PhysicalParams, Point};
use crate::par::{count_indexed, Execution};
use crate::planner::plan_flight;
use crate::reliability::ReliabilityParams;
use crate::sim::{simulate_with, DamageModel, SimOptions};

/// Frame width and height per unit of `d * l`.
pub const FRAME_WIDTH: f64 = 2.5;
pub const FRAME_HEIGHT: f64 = 1.25;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McMode {
    /// Loss iff the strike lands in a hole or at least `d - 1` strikes
    /// arrive during the escape.
    #[default]
    PaperAligned,
    /// Loss iff the simulator reports the target destroyed.
    Simulator,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpicenterRegion {
    /// Uniform over the frame centred on the target qubit.
    #[default]
    Frame,
    /// Always the same point (mm).
    Fixed(Point),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub mode: McMode,
    pub region: EpicenterRegion,
    pub target: usize,
    pub damage: DamageModel,
    pub exec: Execution,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    /// 95 % normal-approximation half-width.
    pub half_width: f64,
}

impl McEstimate {
    fn from_counts(trials: u64, failures: u64) -> Self {
        let p = failures as f64 / trials as f64;
        McEstimate {
            trials,
            failures,
            estimate: p,
            half_width: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    /// Binomial standard deviation of the mean if the true value were `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

pub fn monte_carlo_failure(
    m: &Mapping,
    p: &PhysicalParams,
    r: &ReliabilityParams,
    n_trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    monte_carlo_failure_with(m, p, r, n_trials, seed, &McOptions::default())
}

pub fn monte_carlo_failure_with(
    m: &Mapping,
    p: &PhysicalParams,
    r: &ReliabilityParams,
    n_trials: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<McEstimate> {
    if n_trials == 0 {
        return Err(FleeError::ZeroTrials);
    }
    r.validate()?;
    p.validate()?;
    let target = m.qubit(opts.target)?.qubit;
    let mean = r.mean_events();
    let poisson = if mean > 0.0 {
        Some(Poisson::new(mean).map_err(|e| crate::error::invalid("lambda*tau", e.to_string()))?)
    } else {
        None
    };
    let centre = target.midpoint_mm(p.l);
    let (w, h) = (
        FRAME_WIDTH * f64::from(p.d) * p.l,
        FRAME_HEIGHT * f64::from(p.d) * p.l,
    );
    let draw_point = |rng: &mut ChaCha8Rng| {
        Point::new(
            centre.x + w * (rng.random::<f64>() - 0.5),
            centre.y + h * (rng.random::<f64>() - 0.5),
        )
    };

    let failures = count_indexed(opts.exec, n_trials as usize, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let epicenter = match opts.region {
            EpicenterRegion::Frame => draw_point(&mut rng),
            EpicenterRegion::Fixed(pt) => pt,
        };
        let hits = poisson.as_ref().map_or(0, |d| d.sample(&mut rng) as u64);
        match opts.mode {
            McMode::PaperAligned => {
                let in_hole = target
                    .holes
                    .iter()
                    .any(|hole| hole.contains_mm(&epicenter, p.l));
                in_hole || hits + 1 >= u64::from(target.code_distance)
            }
            McMode::Simulator => {
                let first = CreEvent::new(epicenter, 0);
                let Ok(plan) = plan_flight(m, &first, p) else {
                    return true;
                };
                // Further strikes land during the escape window.
                let window = plan.completion().max(1);
                let mut events = vec![first];
                for _ in 0..hits {
                    let at = draw_point(&mut rng);
                    events.push(CreEvent::new(at, rng.random_range(0..=window)));
                }
                let sim = SimOptions {
                    model: opts.damage,
                    dwell: None,
                };
                !simulate_with(m, &events, p, &plan, &sim).survived[opts.target]
            }
        }
    });
    Ok(McEstimate::from_counts(n_trials, failures))
}

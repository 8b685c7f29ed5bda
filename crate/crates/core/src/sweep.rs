//! Minimum-code-distance sweeps over `l`, `r_max` or the detection latency.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FleeError, Result};
use crate::feasibility::HalfwayConvention;
use crate::feasibility::{min_code_distance, MinDistance, ScenarioKind, StrikeScenario};
use crate::model::PhysicalParams;
use crate::par::{map_indexed, Execution};

/// CSV header of a sweep table.
pub const SWEEP_CSV_HEADER: [&str; 5] = ["param", "value", "scenario", "min_d", "feasible"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParameter {
    /// Lattice spacing, mm.
    #[serde(rename = "l_mm")]
    L,
    /// Maximum phonon radius, mm.
    #[serde(rename = "r_max_mm")]
    RMax,
    /// Detection latency, cycles.
    #[serde(rename = "delta_cycles")]
    Delta,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::L => "l_mm",
            SweepParameter::RMax => "r_max_mm",
            SweepParameter::Delta => "delta_cycles",
        }
    }

    fn apply(&self, base: &PhysicalParams, value: f64) -> PhysicalParams {
        let mut p = *base;
        match self {
            SweepParameter::L => p.l = value,
            SweepParameter::RMax => p.r_max = value,
            SweepParameter::Delta => p.delta = value as u32,
        }
        p
    }

    fn check(&self, value: f64) -> Result<()> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(FleeError::NonPositiveValue {
                parameter: self.name(),
                value,
            });
        }
        if *self == SweepParameter::Delta && (value.fract() != 0.0 || value > f64::from(u32::MAX)) {
            return Err(FleeError::NonIntegralValue {
                parameter: self.name(),
                value,
            });
        }
        Ok(())
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "l_mm" => Ok(SweepParameter::L),
            "r_max_mm" => Ok(SweepParameter::RMax),
            "delta_cycles" => Ok(SweepParameter::Delta),
            other => Err(format!("unknown sweep parameter `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub scenario: ScenarioKind,
    pub min_d: MinDistance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows of one scenario, in parameter order.
    pub fn series(&self, scenario: ScenarioKind) -> Vec<(f64, MinDistance)> {
        self.rows
            .iter()
            .filter(|r| r.scenario == scenario)
            .map(|r| (r.value, r.min_d))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(SWEEP_CSV_HEADER)?;
        for row in &self.rows {
            let min_d = row.min_d.value().map(|d| d.to_string()).unwrap_or_default();
            w.write_record([
                self.parameter.name().to_string(),
                row.value.to_string(),
                row.scenario.to_string(),
                min_d,
                row.min_d.is_feasible().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != SWEEP_CSV_HEADER {
            return Err(FleeError::Format(format!("unexpected header {header:?}")));
        }
        let mut parameter = None;
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let p: SweepParameter = field(0).parse().map_err(FleeError::Format)?;
            if *parameter.get_or_insert(p) != p {
                return Err(FleeError::Format("mixed sweep parameters".into()));
            }
            let value: f64 = field(1)
                .parse()
                .map_err(|e| FleeError::Format(format!("bad value `{}`: {e}", field(1))))?;
            let scenario: ScenarioKind = field(2).parse().map_err(FleeError::Format)?;
            let feasible = match field(4) {
                "true" => true,
                "false" => false,
                other => return Err(FleeError::Format(format!("bad feasible flag `{other}`"))),
            };
            let min_d = if feasible {
                MinDistance::Found(
                    field(3)
                        .parse()
                        .map_err(|e| FleeError::Format(format!("bad min_d `{}`: {e}", field(3))))?,
                )
            } else {
                MinDistance::Infeasible
            };
            rows.push(SweepRow {
                value,
                scenario,
                min_d,
            });
        }
        let parameter = parameter.ok_or(FleeError::EmptyRange)?;
        Ok(SweepResult { parameter, rows })
    }
}

/// What a sweep evaluates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub scenarios: Vec<ScenarioKind>,
    pub convention: HalfwayConvention,
    pub d_max: u32,
}

fn sorted_values(spec: &SweepSpec) -> Result<Vec<f64>> {
    if spec.values.is_empty() || spec.scenarios.is_empty() {
        return Err(FleeError::EmptyRange);
    }
    for &v in &spec.values {
        spec.parameter.check(v)?;
    }
    let mut values = spec.values.clone();
    values.sort_by(|a, b| a.total_cmp(b));
    Ok(values)
}

/// One `min_code_distance` row per (value, scenario), ascending by value.
pub fn sweep(spec: &SweepSpec, fixed: &PhysicalParams) -> Result<SweepResult> {
    sweep_with(spec, fixed, Execution::default())
}

pub fn sweep_with(
    spec: &SweepSpec,
    fixed: &PhysicalParams,
    exec: Execution,
) -> Result<SweepResult> {
    let values = sorted_values(spec)?;
    let per_value = map_indexed(exec, values.len(), |i| {
        let p = spec.parameter.apply(fixed, values[i]);
        spec.scenarios
            .iter()
            .map(|&kind| SweepRow {
                value: values[i],
                scenario: kind,
                min_d: min_code_distance(
                    &p,
                    &StrikeScenario::new(kind, spec.convention),
                    spec.d_max,
                ),
            })
            .collect::<Vec<_>>()
    });
    Ok(SweepResult {
        parameter: spec.parameter,
        rows: per_value.into_iter().flatten().collect(),
    })
}

/// Random latency and move length drawn for one sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationDraw {
    pub value: f64,
    pub delta: u32,
    pub move_displacement: f64,
}

/// Ranges the replication mode draws from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRanges {
    pub delta: (u32, u32),
    pub move_displacement: (f64, f64),
}

impl Default for ReplicationRanges {
    fn default() -> Self {
        ReplicationRanges {
            delta: (1, 25),
            move_displacement: (1.0, 1_000_000.0),
        }
    }
}

/// Sweep where every point draws its own latency (unless latency is the
/// swept parameter) and move length. Draw `i` uses ChaCha stream `i` of
/// `seed`, so the table depends only on the seed.
pub fn replicate_sweep(
    spec: &SweepSpec,
    fixed: &PhysicalParams,
    ranges: &ReplicationRanges,
    seed: u64,
    exec: Execution,
) -> Result<(SweepResult, Vec<ReplicationDraw>)> {
    let values = sorted_values(spec)?;
    let per_value = map_indexed(exec, values.len(), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let delta = rng.random_range(ranges.delta.0..=ranges.delta.1);
        let m = rng.random_range(ranges.move_displacement.0..=ranges.move_displacement.1);
        let mut p = spec.parameter.apply(fixed, values[i]);
        if spec.parameter != SweepParameter::Delta {
            p.delta = delta;
        }
        p.move_displacement = m;
        let rows: Vec<_> = spec
            .scenarios
            .iter()
            .map(|&kind| SweepRow {
                value: values[i],
                scenario: kind,
                min_d: min_code_distance(
                    &p,
                    &StrikeScenario::new(kind, spec.convention),
                    spec.d_max,
                ),
            })
            .collect();
        let draw = ReplicationDraw {
            value: values[i],
            delta: p.delta,
            move_displacement: m,
        };
        (rows, draw)
    });
    let mut rows = Vec::new();
    let mut draws = Vec::new();
    for (r, d) in per_value {
        rows.extend(r);
        draws.push(d);
    }
    Ok((
        SweepResult {
            parameter: spec.parameter,
            rows,
        },
        draws,
    ))
}

/// Inclusive arithmetic range `start, start + step, ... <= stop`.
pub fn linear_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return Vec::new();
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(parameter: SweepParameter, values: Vec<f64>) -> SweepSpec {
        SweepSpec {
            parameter,
            values,
            scenarios: ScenarioKind::BOTH.to_vec(),
            convention: HalfwayConvention::Literal,
            d_max: 500,
        }
    }

    #[test]
    fn single_value_matches_direct_search() {
        let base = PhysicalParams::reference();
        let res = sweep(&spec(SweepParameter::RMax, vec![63.0]), &base).unwrap();
        assert_eq!(res.rows.len(), 2);
        assert_eq!(
            res.rows[0].min_d,
            min_code_distance(&base, &StrikeScenario::halfway(), 500)
        );
        assert_eq!(
            res.rows[1].min_d,
            min_code_distance(&base, &StrikeScenario::at_hole(), 500)
        );
    }

    #[test]
    fn rejects_empty_and_non_positive() {
        let base = PhysicalParams::reference();
        assert!(matches!(
            sweep(&spec(SweepParameter::L, vec![]), &base),
            Err(FleeError::EmptyRange)
        ));
        assert!(matches!(
            sweep(&spec(SweepParameter::L, vec![1.0, 0.0]), &base),
            Err(FleeError::NonPositiveValue { .. })
        ));
        assert!(matches!(
            sweep(&spec(SweepParameter::Delta, vec![1.5]), &base),
            Err(FleeError::NonIntegralValue { .. })
        ));
    }

    #[test]
    fn rows_sorted_by_value() {
        let base = PhysicalParams::reference();
        let res = sweep(&spec(SweepParameter::L, vec![10.0, 1.0, 5.0]), &base).unwrap();
        let values: Vec<f64> = res.rows.iter().map(|r| r.value).collect();
        assert_eq!(values, vec![1.0, 1.0, 5.0, 5.0, 10.0, 10.0]);
    }

    #[test]
    fn d_of_l_is_non_increasing() {
        let base = PhysicalParams::reference();
        let res = sweep(
            &spec(SweepParameter::L, linear_range(1.0, 60.0, 1.0)),
            &base,
        )
        .unwrap();
        for kind in ScenarioKind::BOTH {
            let s = res.series(kind);
            for w in s.windows(2) {
                assert!(w[1].1.value().unwrap() <= w[0].1.value().unwrap());
            }
        }
    }

    #[test]
    fn d_of_r_max_is_non_decreasing() {
        let base = PhysicalParams::reference();
        let res = sweep(
            &spec(SweepParameter::RMax, linear_range(1.0, 100.0, 1.0)),
            &base,
        )
        .unwrap();
        for kind in ScenarioKind::BOTH {
            let s = res.series(kind);
            for w in s.windows(2) {
                assert!(w[1].1.value().unwrap() >= w[0].1.value().unwrap());
            }
        }
    }

    #[test]
    fn csv_layout_is_fixed() {
        let res = SweepResult {
            parameter: SweepParameter::L,
            rows: vec![
                SweepRow {
                    value: 1.0,
                    scenario: ScenarioKind::Halfway,
                    min_d: MinDistance::Found(46),
                },
                SweepRow {
                    value: 2.5,
                    scenario: ScenarioKind::AtHole,
                    min_d: MinDistance::Infeasible,
                },
            ],
        };
        assert_eq!(
            res.to_csv_string(),
            "param,value,scenario,min_d,feasible\nl_mm,1,halfway,46,true\nl_mm,2.5,at_hole,,false\n"
        );
    }

    #[test]
    fn replication_is_seeded() {
        let base = PhysicalParams::reference();
        let s = spec(SweepParameter::L, linear_range(1.0, 20.0, 1.0));
        let ranges = ReplicationRanges::default();
        let a = replicate_sweep(&s, &base, &ranges, 7, Execution::Sequential).unwrap();
        let b = replicate_sweep(&s, &base, &ranges, 7, Execution::Parallel).unwrap();
        let c = replicate_sweep(&s, &base, &ranges, 8, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.1, c.1);
        for d in &a.1 {
            assert!((1..=25).contains(&d.delta));
            assert!((1.0..=1e6).contains(&d.move_displacement));
        }
    }

    #[test]
    fn linear_range_is_inclusive() {
        assert_eq!(linear_range(1.0, 3.0, 1.0), vec![1.0, 2.0, 3.0]);
        assert!(linear_range(3.0, 1.0, 1.0).is_empty());
        assert_eq!(linear_range(1.0, 100.0, 1.0).len(), 100);
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            rows in proptest::collection::vec(
                (0.001f64..1e6, any::<bool>(), proptest::option::of(2u32..10_000)),
                1..40,
            )
        ) {
            let res = SweepResult {
                parameter: SweepParameter::RMax,
                rows: rows
                    .into_iter()
                    .map(|(value, halfway, d)| SweepRow {
                        value,
                        scenario: if halfway { ScenarioKind::Halfway } else { ScenarioKind::AtHole },
                        min_d: d.map(MinDistance::Found).unwrap_or(MinDistance::Infeasible),
                    })
                    .collect(),
            };
            let text = res.to_csv_string();
            let back = SweepResult::read_csv(text.as_bytes()).unwrap();
            prop_assert_eq!(back, res);
        }

        #[test]
        fn parallel_and_sequential_sweeps_agree(l in 0.5f64..30.0, r_max in 1.0f64..100.0) {
            let base = PhysicalParams { l, r_max, ..PhysicalParams::reference() };
            let s = spec(SweepParameter::Delta, (1..=25).map(f64::from).collect());
            prop_assert_eq!(
                sweep_with(&s, &base, Execution::Sequential).unwrap(),
                sweep_with(&s, &base, Execution::Parallel).unwrap()
            );
        }
    }
}

//! Analytic failure probability of a fleeing logical qubit.
//!
//! The qubit is lost if a strike lands inside one of its holes, or if at
//! least `d - 1` strikes arrive while it is moving to safety:
//!
//! ```text
//! P(fail) = 1 - (1 - P(A)) * P(N <= d - 2),   N ~ Poisson(lambda * tau)
//! ```

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const RELIABILITY_CSV_HEADER: [&str; 4] =
    ["tau", "analytic_failure", "mc_failure", "mc_halfwidth"];

/// A frame around one logical qubit, measured in `d/4` hole cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleFrame {
    pub width_cells: u32,
    pub height_cells: u32,
    pub holes: u32,
}

impl HoleFrame {
    /// `10d/4` by `5d/4`, holding the qubit's two holes.
    pub const CANONICAL: HoleFrame = HoleFrame {
        width_cells: 10,
        height_cells: 5,
        holes: 2,
    };

    pub fn new(width_cells: u32, height_cells: u32, holes: u32) -> Result<Self> {
        let cells = u64::from(width_cells) * u64::from(height_cells);
        if cells == 0 {
            return Err(invalid("frame", "frame must contain at least one cell"));
        }
        if u64::from(holes) > cells {
            return Err(invalid("frame", "more holes than cells"));
        }
        Ok(HoleFrame {
            width_cells,
            height_cells,
            holes,
        })
    }

    pub fn cells(&self) -> u64 {
        u64::from(self.width_cells) * u64::from(self.height_cells)
    }

    pub fn p_hole_hit(&self) -> f64 {
        f64::from(self.holes) / self.cells() as f64
    }
}

impl Default for HoleFrame {
    fn default() -> Self {
        HoleFrame::CANONICAL
    }
}

/// Probability a strike inside the canonical frame lands in a hole. The
/// frame scales with `d`, so the ratio does not depend on it.
pub fn p_hole_hit_frame(_d: u32) -> f64 {
    HoleFrame::CANONICAL.p_hole_hit()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityParams {
    /// Chip strike rate (1/s).
    pub lambda: f64,
    /// Time to reach safety (s).
    pub tau: f64,
    pub d: u32,
    pub p_hole_hit: f64,
}

impl ReliabilityParams {
    pub fn new(lambda: f64, tau: f64, d: u32, p_hole_hit: f64) -> Result<Self> {
        let r = ReliabilityParams {
            lambda,
            tau,
            d,
            p_hole_hit,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(invalid("lambda", "must be finite and non-negative"));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(invalid("tau", "must be finite and non-negative"));
        }
        if self.d < 2 {
            return Err(invalid("d", "must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.p_hole_hit) {
            return Err(invalid("p_hole_hit", "must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn mean_events(&self) -> f64 {
        self.lambda * self.tau
    }
}

/// Poisson CDF `P(N <= d - 2)` with mean `lambda * tau`.
pub fn p_few_hits(d: u32, lambda: f64, tau: f64) -> f64 {
    poisson_cdf(i64::from(d) - 2, lambda * tau)
}

/// `P(N <= k)` for `N ~ Poisson(mu)`.
pub fn poisson_cdf(k: i64, mu: f64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    if mu <= 0.0 {
        return 1.0;
    }
    if mu < 700.0 {
        let mut term = (-mu).exp();
        let mut sum = term;
        for i in 0..k {
            term *= mu / (i + 1) as f64;
            sum += term;
            if term < sum * f64::EPSILON * 1e-3 && (i + 1) as f64 > mu {
                break;
            }
        }
        return sum.min(1.0);
    }
    // exp(-mu) underflows; accumulate in log space.
    let ln_mu = mu.ln();
    let mut ln_term = -mu;
    let mut ln_sum = ln_term;
    for i in 0..k {
        ln_term += ln_mu - ((i + 1) as f64).ln();
        let (hi, lo) = if ln_term > ln_sum {
            (ln_term, ln_sum)
        } else {
            (ln_sum, ln_term)
        };
        ln_sum = hi + (lo - hi).exp().ln_1p();
    }
    ln_sum.exp().min(1.0)
}

pub fn failure_probability(r: &ReliabilityParams) -> f64 {
    1.0 - (1.0 - r.p_hole_hit) * p_few_hits(r.d, r.lambda, r.tau)
}

/// `n` points spaced evenly in log scale over `[start, stop]`.
pub fn log_space(start: f64, stop: f64, n: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop >= start) {
        return Err(invalid("tau range", "needs 0 < start <= stop"));
    }
    if n == 0 {
        return Err(invalid("tau range", "needs at least one point"));
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    let (a, b) = (start.log10(), stop.log10());
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                stop
            } else {
                10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityRow {
    pub tau: f64,
    pub analytic_failure: f64,
    pub mc_failure: Option<f64>,
    pub mc_halfwidth: Option<f64>,
}

pub fn write_reliability_csv<W: Write>(rows: &[ReliabilityRow], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(RELIABILITY_CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        out.write_record([
            r.tau.to_string(),
            r.analytic_failure.to_string(),
            opt(r.mc_failure),
            opt(r.mc_halfwidth),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference() -> Vec<(f64, u32, f64)> {
        include_str!("../tests/data/poisson_cdf.csv")
            .lines()
            .skip(1)
            .map(|line| {
                let f: Vec<&str> = line.split(',').collect();
                (
                    f[0].parse().unwrap(),
                    f[1].parse().unwrap(),
                    f[2].parse().unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn canonical_frame() {
        assert_eq!(p_hole_hit_frame(69), 0.04);
        assert_eq!(HoleFrame::new(2, 1, 2).unwrap().p_hole_hit(), 1.0);
        assert_eq!(HoleFrame::new(20, 5, 2).unwrap().p_hole_hit(), 0.02);
        assert!(HoleFrame::new(0, 5, 2).is_err());
        assert!(HoleFrame::new(1, 1, 2).is_err());
    }

    #[test]
    fn no_events_means_few_hits() {
        assert_eq!(p_few_hits(2, 0.0, 1.0), 1.0);
        assert_eq!(p_few_hits(200, 5.0, 0.0), 1.0);
    }

    #[test]
    fn single_term_cdf() {
        assert!((p_few_hits(2, 0.1, 1.0) - (-0.1f64).exp()).abs() < 1e-15);
        assert!((p_few_hits(2, 0.1, 1.0) - 0.904837).abs() < 1e-6);
    }

    #[test]
    fn matches_reference_cdf() {
        let table = reference();
        assert!(table.len() > 150);
        for (mu, d, want) in table {
            let got = p_few_hits(d, mu, 1.0);
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-12, "mu={mu} d={d} got={got} want={want}");
        }
    }

    #[test]
    fn huge_mean_stays_finite() {
        let p = poisson_cdf(900, 1000.0);
        assert!(p > 0.0 && p < 0.01, "{p}");
        assert_eq!(poisson_cdf(10, 5000.0), 0.0);
    }

    #[test]
    fn failure_endpoints() {
        let r = ReliabilityParams::new(0.1, 0.0, 2, 2.0 / 50.0).unwrap();
        assert!((failure_probability(&r) - 0.04).abs() < 1e-12);
        let r = ReliabilityParams::new(0.0, 0.0, 2, 0.0).unwrap();
        assert_eq!(failure_probability(&r), 0.0);
        let r = ReliabilityParams::new(0.1, 1.0, 2, 0.04).unwrap();
        let want = 1.0 - 0.96 * (-0.1f64).exp();
        assert!((failure_probability(&r) - want).abs() < 1e-12);
        assert!((failure_probability(&r) - 0.131356).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ReliabilityParams::new(-1.0, 1.0, 2, 0.04).is_err());
        assert!(ReliabilityParams::new(1.0, f64::NAN, 2, 0.04).is_err());
        assert!(ReliabilityParams::new(1.0, 1.0, 1, 0.04).is_err());
        assert!(ReliabilityParams::new(1.0, 1.0, 2, 1.5).is_err());
    }

    #[test]
    fn log_space_hits_both_ends() {
        let v = log_space(1e-4, 1.0, 5).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 1e-4);
        assert_eq!(v[4], 1.0);
        assert!((v[2] - 1e-2).abs() < 1e-15);
        assert!(log_space(0.0, 1.0, 5).is_err());
    }

    #[test]
    fn reliability_csv_layout() {
        let rows = [
            ReliabilityRow {
                tau: 0.5,
                analytic_failure: 0.25,
                mc_failure: Some(0.3),
                mc_halfwidth: Some(0.01),
            },
            ReliabilityRow {
                tau: 1.0,
                analytic_failure: 0.5,
                mc_failure: None,
                mc_halfwidth: None,
            },
        ];
        let mut buf = Vec::new();
        write_reliability_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "tau,analytic_failure,mc_failure,mc_halfwidth\n0.5,0.25,0.3,0.01\n1,0.5,,\n"
        );
    }

    /// Direct sum of independently computed pmf terms.
    fn oracle_cdf(k: i64, mu: f64) -> f64 {
        (0..=k)
            .map(|i| {
                let ln_fact: f64 = (1..=i).map(|j| (j as f64).ln()).sum();
                (i as f64 * mu.ln() - mu - ln_fact).exp()
            })
            .sum()
    }

    proptest! {
        #[test]
        fn agrees_with_direct_pmf_sum(mu in 1e-3f64..10.0, d in 2u32..60) {
            let got = p_few_hits(d, mu, 1.0);
            let want = oracle_cdf(i64::from(d) - 2, mu);
            prop_assert!(((got - want) / want).abs() < 1e-10);
        }

        #[test]
        fn cdf_monotone(mu in 0.0f64..10.0, dmu in 0.0f64..2.0, d in 2u32..100) {
            // Summation rounding near 1 is allowed a few ulps.
            let base = p_few_hits(d, mu, 1.0);
            prop_assert!(p_few_hits(d + 1, mu, 1.0) >= base - 4.0 * f64::EPSILON);
            prop_assert!(p_few_hits(d, mu + dmu, 1.0) <= base + 4.0 * f64::EPSILON);
        }

        #[test]
        fn failure_monotone_with_hole_hit_floor(
            lambda in 0.0f64..2.0,
            tau in 0.0f64..5.0,
            dtau in 0.0f64..1.0,
            p in 0.0f64..1.0,
            dp in 0.0f64..0.5,
            d in 2u32..30,
        ) {
            let base = ReliabilityParams { lambda, tau, d, p_hole_hit: p };
            let f = failure_probability(&base);
            let later = failure_probability(&ReliabilityParams { tau: tau + dtau, ..base });
            prop_assert!(later >= f - 4.0 * f64::EPSILON);
            let p2 = (p + dp).min(1.0);
            let riskier = failure_probability(&ReliabilityParams { p_hole_hit: p2, ..base });
            prop_assert!(riskier >= f - 4.0 * f64::EPSILON);
            prop_assert!(f >= p - 1e-15);
            let floor = failure_probability(&ReliabilityParams { tau: 0.0, ..base });
            prop_assert!((floor - p).abs() < 1e-15);
        }
    }
}

//! Design-space comparisons between the co-prime structure and its
//! alternatives: mutual-coupling leakage of L-shaped sensor geometries,
//! spectrum occupancy of frequency-offset schedules, and dwell-time
//! occupancy of pulse schedules.
//!
//! The coupling coefficient between two sensors depends only on their
//! separation: unit at zero, magnitude decaying inversely with distance,
//! phase retarded linearly. Cross-arm pairs have no published coefficient
//! rule, so they are evaluated at the Euclidean separation with the same
//! law extended to non-integer distances; every nonzero separation in an
//! L-shaped grid is at least one, so the extension never leaves the law's
//! domain.

use std::f64::consts::PI;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::geometry::gcd;
use crate::geometry::IndexSet;
use crate::linalg::C64;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Mutual coupling
// ---------------------------------------------------------------------------

/// Separation-decay coupling coefficient model.
///
/// `h(0) = 1`, and for separation `s >= 1` (in units of the grid pitch)
/// `|h(s)| = magnitude / s` with phase `phase - (s-1)*pi/8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingModel {
    /// Magnitude of the adjacent-sensor coefficient; must stay below 1.
    pub magnitude: f64,
    /// Phase of the adjacent-sensor coefficient, radians.
    pub phase: f64,
}

impl CouplingModel {
    /// The reference parameterization: `0.3 * exp(j*pi/3)` between
    /// adjacent sensors.
    pub fn standard() -> Self {
        CouplingModel { magnitude: 0.3, phase: PI / 3.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.magnitude >= 0.0 && self.magnitude < 1.0) {
            return Err(Error::Parameter(format!(
                "coupling magnitude must lie in [0, 1), got {}",
                self.magnitude
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::Parameter("coupling phase must be finite".into()));
        }
        Ok(())
    }

    /// Coefficient at separation `s >= 0` grid units.
    pub fn coefficient(&self, s: f64) -> C64 {
        if s == 0.0 {
            return C64::new(1.0, 0.0);
        }
        C64::from_polar(self.magnitude / s, self.phase - (s - 1.0) * PI / 8.0)
    }
}

impl Default for CouplingModel {
    fn default() -> Self {
        Self::standard()
    }
}

/// Mutual-coupling matrix of the L-shaped array built from `positions` on
/// both axes with the shared origin counted once: the x arm contributes
/// all sensors, the z arm all but the origin, for `2P - 1` rows. Within an
/// arm the entry is the coefficient at the index difference; across arms
/// it is the coefficient at the Euclidean separation. The matrix is
/// complex symmetric since the coefficient depends only on separation.
pub fn coupling_matrix(positions: &IndexSet, model: &CouplingModel) -> Result<Array2<C64>> {
    model.validate()?;
    let mut points: Vec<(f64, f64)> =
        positions.values().iter().map(|&v| (f64::from(v), 0.0)).collect();
    points.extend(positions.values().iter().skip(1).map(|&v| (0.0, f64::from(v))));
    let n = points.len();
    let mut h = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let s = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
            h[(i, j)] = model.coefficient(s);
        }
    }
    Ok(h)
}

/// Off-diagonal Frobenius mass of `h` relative to its total mass. Zero for
/// a diagonal matrix, approaching one as coupling dominates.
pub fn coupling_leakage(h: &Array2<C64>) -> f64 {
    let mut off = 0.0;
    let mut total = 0.0;
    for ((i, j), v) in h.indexed_iter() {
        let e = v.norm_sqr();
        total += e;
        if i != j {
            off += e;
        }
    }
    if total == 0.0 {
        return 0.0;
    }
    (off / total).sqrt()
}

// ---------------------------------------------------------------------------
// Spectrum occupancy
// ---------------------------------------------------------------------------

/// An offset schedule whose spectrum occupancy rate has a closed form.
///
/// All rates are referred to the common cumulative transmit bandwidth
/// `2(L_f - 1) * delta_f`, where `l_f` is the offset half-aperture in
/// `delta_f` units. `b` is the pulse bandwidth in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OccupancySpec {
    /// Logarithmically spaced offsets; occupies like the filled schedule.
    Logarithmic { b: f64, delta_f: f64 },
    /// Time-dependent offsets with a known largest step.
    Tdfo { b: f64, max_delta_f: f64 },
    /// Concatenated nested offsets.
    Cnfo { b: f64, delta_f: f64, l_f: u32 },
    /// Generalized nested offsets with co-prime strides.
    Gnfo { b: f64, delta_f: f64, l_f: u32, alpha: u32, beta: u32 },
    /// Co-prime offsets.
    CoprimeFo { b: f64, delta_f: f64, l_f: u32 },
}

fn positive(value: f64, name: &str) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::Parameter(format!("{name} must be finite and positive, got {value}")));
    }
    Ok(())
}

fn span_denominator(l_f: u32) -> Result<f64> {
    if l_f < 2 {
        return Err(Error::Parameter(format!(
            "occupancy needs offset half-aperture l_f >= 2, got {l_f}"
        )));
    }
    Ok(f64::from(l_f - 1))
}

/// Evaluates the closed-form spectrum occupancy rate of a schedule.
pub fn occupancy_rate(spec: &OccupancySpec) -> Result<f64> {
    match spec {
        OccupancySpec::Logarithmic { b, delta_f } => {
            positive(*b, "bandwidth")?;
            positive(*delta_f, "offset step")?;
            Ok(b / delta_f)
        }
        OccupancySpec::Tdfo { b, max_delta_f } => {
            positive(*b, "bandwidth")?;
            positive(*max_delta_f, "largest offset step")?;
            Ok(b / max_delta_f)
        }
        OccupancySpec::Cnfo { b, delta_f, l_f } => {
            positive(*b, "bandwidth")?;
            positive(*delta_f, "offset step")?;
            let span = span_denominator(*l_f)?;
            let n = ((-1.0 + (2.0 * f64::from(*l_f) + 3.0).sqrt()) / 2.0).floor();
            if n < 1.0 {
                return Err(Error::Parameter(format!(
                    "concatenated nested offsets need l_f >= 3, got {l_f}"
                )));
            }
            Ok((4.0 * n - 2.0) * b / (span * delta_f))
        }
        OccupancySpec::Gnfo { b, delta_f, l_f, alpha, beta } => {
            positive(*b, "bandwidth")?;
            positive(*delta_f, "offset step")?;
            let span = span_denominator(*l_f)?;
            if *alpha == 0 || *beta == 0 || gcd(*alpha, *beta) != 1 {
                return Err(Error::Parameter(format!(
                    "generalized nested strides must be positive co-prime, got ({alpha}, {beta})"
                )));
            }
            let n = (l_f + beta - 1) / (alpha + beta);
            if n < 1 {
                return Err(Error::Parameter(format!(
                    "generalized nested offsets need l_f >= alpha + 1, got l_f={l_f} alpha={alpha}"
                )));
            }
            Ok((2.0 * f64::from(n) - 1.0) * b / (span * delta_f))
        }
        OccupancySpec::CoprimeFo { b, delta_f, l_f } => {
            positive(*b, "bandwidth")?;
            positive(*delta_f, "offset step")?;
            let span = span_denominator(*l_f)?;
            if *l_f < 3 {
                return Err(Error::Parameter(format!(
                    "co-prime offsets need l_f >= 3, got {l_f}"
                )));
            }
            let m = ((1.0 + f64::from(*l_f - 2).sqrt()) / 2.0).floor();
            Ok((4.0 * m - 2.0) * b / (2.0 * span * delta_f))
        }
    }
}

// ---------------------------------------------------------------------------
// Dwell-time occupancy
// ---------------------------------------------------------------------------

/// Fraction of the coherent interval spent transmitting: pulse count times
/// pulse width over the schedule span.
pub fn dwell_occupancy(pulses: &IndexSet, t: f64, t_p: f64) -> Result<f64> {
    positive(t, "pulse repetition interval")?;
    if !(t_p.is_finite() && t_p >= 0.0) {
        return Err(Error::Parameter(format!("pulse width must be non-negative, got {t_p}")));
    }
    let span = pulses.aperture();
    if pulses.len() < 2 || span == 0 {
        return Err(Error::Parameter("dwell occupancy needs at least two pulse instants".into()));
    }
    Ok(pulses.len() as f64 * t_p / (f64::from(span) * t))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_index_set, SchemeSpec};

    fn leakage_of(spec: &SchemeSpec) -> f64 {
        let set = generate_index_set(spec).unwrap();
        coupling_leakage(&coupling_matrix(&set, &CouplingModel::standard()).unwrap())
    }

    // ---- coupling tests ----

    #[test]
    fn zero_coupling_gives_identity_and_no_leakage() {
        let set = generate_index_set(&SchemeSpec::Uniform { count: 4 }).unwrap();
        let model = CouplingModel { magnitude: 0.0, phase: 0.0 };
        let h = coupling_matrix(&set, &model).unwrap();
        assert_eq!(h.nrows(), 7);
        for ((i, j), v) in h.indexed_iter() {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert_eq!(*v, C64::new(expect, 0.0));
        }
        assert_eq!(coupling_leakage(&h), 0.0);
    }

    #[test]
    fn adjacent_and_diagonal_pair_coefficients() {
        let set = generate_index_set(&SchemeSpec::Uniform { count: 2 }).unwrap();
        let model = CouplingModel::standard();
        let h = coupling_matrix(&set, &model).unwrap();
        // Rows: x at 0 and 1, then z at 1.
        assert_eq!(h.nrows(), 3);
        let h1 = C64::from_polar(0.3, PI / 3.0);
        assert!((h[(0, 1)] - h1).norm() < 1e-15, "unit separation must give h1");
        assert!((h[(0, 2)] - h1).norm() < 1e-15, "origin to first z sensor is unit separation");
        let sqrt2 = 2f64.sqrt();
        let diag = C64::from_polar(0.3 / sqrt2, PI / 3.0 - (sqrt2 - 1.0) * PI / 8.0);
        assert!((h[(1, 2)] - diag).norm() < 1e-15, "cross-arm pair sits at euclidean distance");
        assert!((h[(2, 1)] - diag).norm() < 1e-15, "separation symmetry");
        let expect = (coupling_leakage(&h) - 0.3611575592573076).abs();
        assert!(expect < 1e-12, "three-sensor leakage drifted by {expect:.3e}");
    }

    #[test]
    fn leakage_matches_frozen_reference_values() {
        // Values computed with an independent implementation of the same
        // separation-decay model over the published geometries.
        let cases: Vec<(SchemeSpec, f64)> = vec![
            (SchemeSpec::Uniform { count: 36 }, 0.4717696379),
            (SchemeSpec::Cadis { m: 3, n: 5, l: 3 }, 0.1451145148),
            (SchemeSpec::Nested { n1: 5, n2: 5 }, 0.3597489324),
            (SchemeSpec::SuperNested { n1: 5, n2: 5 }, 0.2191592579),
            (SchemeSpec::Cna { n1: 3, n2: 3 }, 0.3664737918),
            (SchemeSpec::Gna { n1: 5, n2: 5, alpha: 2, beta: 3 }, 0.2112028827),
            (
                SchemeSpec::MultiCoset { pattern: vec![0, 1, 2, 5], block: 7, periods: 5 },
                0.3627091291,
            ),
            (SchemeSpec::coprime(3, 7).unwrap(), 0.2487389483),
        ];
        for (spec, expect) in cases {
            let got = leakage_of(&spec);
            assert!(
                (got - expect).abs() < 1e-9,
                "{spec:?}: leakage {got:.10} deviates from reference {expect:.10}"
            );
        }
    }

    #[test]
    fn leakage_stays_in_unit_interval() {
        let specs = [
            SchemeSpec::Uniform { count: 36 },
            SchemeSpec::coprime(3, 7).unwrap(),
            SchemeSpec::Nested { n1: 5, n2: 5 },
            SchemeSpec::Cadis { m: 3, n: 5, l: 3 },
        ];
        for spec in &specs {
            let leak = leakage_of(spec);
            assert!((0.0..1.0).contains(&leak), "{spec:?}: leakage {leak} outside [0,1)");
        }
    }

    #[test]
    fn displaced_subarrays_couple_least_and_filled_most() {
        // The sub-ordering that genuinely follows from the separation-decay
        // model: larger minimum spacing and smaller density couple less.
        let cadis = leakage_of(&SchemeSpec::Cadis { m: 3, n: 5, l: 3 });
        let coprime = leakage_of(&SchemeSpec::coprime(3, 7).unwrap());
        let nested = leakage_of(&SchemeSpec::Nested { n1: 5, n2: 5 });
        let filled = leakage_of(&SchemeSpec::Uniform { count: 36 });
        assert!(cadis < coprime && coprime < nested && nested < filled);
        let super_nested = leakage_of(&SchemeSpec::SuperNested { n1: 5, n2: 5 });
        let parent = leakage_of(&SchemeSpec::Nested { n1: 5, n2: 5 });
        assert!(super_nested < parent, "rearrangement must reduce coupling");
    }

    #[test]
    fn removing_a_sensor_never_raises_offdiagonal_mass() {
        let model = CouplingModel::standard();
        let full = IndexSet::new(vec![0, 3, 6, 7, 9, 12, 14]).unwrap();
        let h_full = coupling_matrix(&full, &model).unwrap();
        let off = |h: &Array2<C64>| {
            h.indexed_iter()
                .filter(|((i, j), _)| i != j)
                .map(|(_, v)| v.norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        for drop in [3u32, 7, 14] {
            let reduced: Vec<u32> =
                full.values().iter().copied().filter(|&v| v != drop).collect();
            let h_red =
                coupling_matrix(&IndexSet::new(reduced).unwrap(), &model).unwrap();
            assert!(
                off(&h_red) <= off(&h_full) + 1e-12,
                "dropping sensor {drop} increased off-diagonal mass"
            );
        }
    }

    #[test]
    fn oversized_magnitude_is_rejected() {
        let set = generate_index_set(&SchemeSpec::Uniform { count: 3 }).unwrap();
        let model = CouplingModel { magnitude: 1.0, phase: 0.0 };
        assert!(coupling_matrix(&set, &model).is_err());
    }

    // ---- occupancy tests ----

    #[test]
    fn occupancy_closed_forms() {
        let rate = |s: &OccupancySpec| occupancy_rate(s).unwrap();
        assert_eq!(rate(&OccupancySpec::Logarithmic { b: 2e3, delta_f: 2e4 }), 0.1);
        assert_eq!(rate(&OccupancySpec::Tdfo { b: 2e3, max_delta_f: 4e4 }), 0.05);
        // Half-aperture 11: nested count term n = 2, generalized (2,3) n = 2.
        let cnfo = rate(&OccupancySpec::Cnfo { b: 2e3, delta_f: 2e4, l_f: 11 });
        assert!((cnfo - 0.06).abs() < 1e-15);
        let gnfo =
            rate(&OccupancySpec::Gnfo { b: 2e3, delta_f: 2e4, l_f: 11, alpha: 2, beta: 3 });
        assert!((gnfo - 0.03).abs() < 1e-15);
        let cop = rate(&OccupancySpec::CoprimeFo { b: 2e3, delta_f: 2e4, l_f: 11 });
        assert!((cop - 0.03).abs() < 1e-15, "co-prime rate ties generalized nested at 11");
    }

    #[test]
    fn coprime_occupancy_dominates_alternatives() {
        for l_f in 6u32..=40 {
            let b = 2e3;
            let delta_f = 2e4;
            let cop =
                occupancy_rate(&OccupancySpec::CoprimeFo { b, delta_f, l_f }).unwrap();
            let log = occupancy_rate(&OccupancySpec::Logarithmic { b, delta_f }).unwrap();
            let cnfo = occupancy_rate(&OccupancySpec::Cnfo { b, delta_f, l_f }).unwrap();
            let gnfo =
                occupancy_rate(&OccupancySpec::Gnfo { b, delta_f, l_f, alpha: 2, beta: 3 })
                    .unwrap();
            assert!(cop <= log + 1e-15, "l_f={l_f}: co-prime above logarithmic");
            assert!(cop <= cnfo + 1e-15, "l_f={l_f}: co-prime above concatenated nested");
            assert!(cop <= gnfo + 1e-15, "l_f={l_f}: co-prime above generalized nested");
        }
    }

    #[test]
    fn occupancy_monotone_in_bandwidth_and_step() {
        let base = occupancy_rate(&OccupancySpec::Cnfo { b: 2e3, delta_f: 2e4, l_f: 13 }).unwrap();
        let wider = occupancy_rate(&OccupancySpec::Cnfo { b: 4e3, delta_f: 2e4, l_f: 13 }).unwrap();
        let coarser =
            occupancy_rate(&OccupancySpec::Cnfo { b: 2e3, delta_f: 4e4, l_f: 13 }).unwrap();
        assert!(wider > base, "occupancy must grow with bandwidth");
        assert!(coarser < base, "occupancy must shrink with larger offset step");
    }

    #[test]
    fn degenerate_occupancy_parameters_are_rejected() {
        assert!(occupancy_rate(&OccupancySpec::Cnfo { b: 2e3, delta_f: 2e4, l_f: 1 }).is_err());
        assert!(occupancy_rate(&OccupancySpec::CoprimeFo { b: 2e3, delta_f: 2e4, l_f: 2 }).is_err());
        assert!(occupancy_rate(&OccupancySpec::Gnfo {
            b: 2e3,
            delta_f: 2e4,
            l_f: 11,
            alpha: 2,
            beta: 4
        })
        .is_err());
        assert!(occupancy_rate(&OccupancySpec::Logarithmic { b: 0.0, delta_f: 2e4 }).is_err());
    }

    // ---- dwell tests ----

    #[test]
    fn dwell_compares_uniform_against_coprime_pulsing() {
        let t = 0.05e-3;
        let t_p = 0.5e-6;
        let uniform = generate_index_set(&SchemeSpec::Uniform { count: 8 }).unwrap();
        let coprime = generate_index_set(&SchemeSpec::coprime(2, 3).unwrap()).unwrap();
        assert_eq!(coprime.values(), &[0, 2, 3, 4, 6, 9]);
        let k_u = dwell_occupancy(&uniform, t, t_p).unwrap();
        let k_c = dwell_occupancy(&coprime, t, t_p).unwrap();
        assert!((k_u - 8.0 * t_p / (7.0 * t)).abs() < 1e-18);
        assert!((k_c - 6.0 * t_p / (9.0 * t)).abs() < 1e-18);
        assert!(k_c < k_u, "sparse pulsing must spend less dwell time");
    }

    #[test]
    fn dwell_vanishes_with_pulse_width_and_rejects_single_pulse() {
        let uniform = generate_index_set(&SchemeSpec::Uniform { count: 8 }).unwrap();
        assert_eq!(dwell_occupancy(&uniform, 0.05e-3, 0.0).unwrap(), 0.0);
        let single = IndexSet::new(vec![0]).unwrap();
        assert!(dwell_occupancy(&single, 0.05e-3, 0.5e-6).is_err());
    }
}

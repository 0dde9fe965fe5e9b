//! Numeric cross-validation: simulated runs of an automaton and residual
//! falsification of candidate invariants. Floating point throughout; a
//! falsifier, never a proof.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::exactnum::{Field, NfElem, Rational};
use crate::hybrid::{HybridAutomaton, InvariantFamily};
use crate::matalg::Matrix;
use crate::polyideal::{MPoly, PolyIdeal};
use crate::{Error, Result};

pub type State = Vec<Complex64>;

#[derive(Clone, Debug)]
pub struct Sample {
    pub location: usize,
    pub state: State,
    pub time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub dwell: f64,
    /// Index into the automaton's effective edge list, taken after the dwell.
    pub edge: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub schedule: Vec<Step>,
}

#[derive(Clone, Copy, Debug)]
pub struct SimOptions {
    /// Samples recorded inside each dwell, besides its end point.
    pub interior_samples: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { interior_samples: 3 }
    }
}

fn numeric(m: &Matrix<NfElem>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].approx())
}

/// `e^{A t}` by scaling and squaring with a Padé approximant.
pub fn expm(a: &Matrix<NfElem>, t: f64) -> DMatrix<Complex64> {
    (numeric(a) * Complex64::new(t, 0.0)).exp()
}

fn apply(m: &DMatrix<Complex64>, x: &State) -> State {
    (m * nalgebra::DVector::from_column_slice(x)).iter().copied().collect()
}

/// Run `schedule` from `(location, point)`.
pub fn simulate_trajectory(
    h: &HybridAutomaton,
    location: usize,
    start: &[Complex64],
    schedule: &[Step],
    opts: SimOptions,
) -> Result<Trajectory> {
    if location >= h.locations.len() {
        return Err(Error::InvalidSchedule(format!("no location #{location}")));
    }
    if start.len() != h.dim {
        return Err(Error::InvalidSchedule(format!(
            "start point has {} coordinates, expected {}",
            start.len(),
            h.dim
        )));
    }
    let edges = h.effective_edges();
    let mut q = location;
    let mut x: State = start.to_vec();
    let mut time = 0.0;
    let mut samples = vec![Sample {
        location: q,
        state: x.clone(),
        time,
    }];
    for (k, step) in schedule.iter().enumerate() {
        if !(step.dwell >= 0.0 && step.dwell.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "step {k}: dwell {} is not a finite non-negative time",
                step.dwell
            )));
        }
        let a = &h.locations[q].flow;
        let n = opts.interior_samples + 1;
        for s in 1..=n {
            let tau = step.dwell * s as f64 / n as f64;
            samples.push(Sample {
                location: q,
                state: apply(&expm(a, tau), &x),
                time: time + tau,
            });
        }
        x = samples.last().unwrap().state.clone();
        time += step.dwell;
        if let Some(e) = step.edge {
            let edge = edges
                .get(e)
                .ok_or_else(|| Error::InvalidSchedule(format!("step {k}: no edge #{e}")))?;
            if edge.from != q {
                return Err(Error::InvalidSchedule(format!(
                    "step {k}: edge #{e} leaves {}, current location is {}",
                    h.locations[edge.from].name, h.locations[q].name
                )));
            }
            x = apply(&numeric(&edge.reset), &x);
            q = edge.to;
            samples.push(Sample {
                location: q,
                state: x.clone(),
                time,
            });
        }
    }
    Ok(Trajectory {
        samples,
        schedule: schedule.to_vec(),
    })
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=4).into())
}

/// A point of `V(T)`: independent coordinates are fixed to random small
/// rationals; the remaining fibre must then be a single point.
pub fn sample_initial(t: &PolyIdeal<NfElem>, rng: &mut ChaCha8Rng) -> Result<Option<Vec<NfElem>>> {
    if t.is_unit()? {
        return Ok(None);
    }
    let ring = t.ring().clone();
    let k = ring.ctx.clone();
    let n = ring.nvars();
    let free = independent_set(t)?;
    for _ in 0..16 {
        let mut gens: Vec<MPoly<NfElem>> = t.generators().to_vec();
        for &i in &free {
            let v = NfElem::from_rat(&k, &random_rational(rng));
            gens.push(MPoly::var(&ring, i).sub(&MPoly::constant(&ring, v)));
        }
        let fibre = PolyIdeal::new(&ring, gens);
        if fibre.is_unit()? {
            continue;
        }
        if let Some(p) = fibre.as_point()? {
            debug_assert_eq!(p.len(), n);
            return Ok(Some(p));
        }
        return Err(Error::Semantic(
            "initial set sampling needs a single point once the independent coordinates are fixed".into(),
        ));
    }
    Err(Error::Semantic("could not find a point of the initial set".into()))
}

/// `dim V(T)` coordinates such that no leading monomial lives in them.
fn independent_set(t: &PolyIdeal<NfElem>) -> Result<Vec<usize>> {
    let gb = t.groebner_basis()?;
    let n = t.ring().nvars();
    let lms: Vec<Vec<usize>> = gb.iter().map(|g| g.lm().support().collect()).collect();
    let mut chosen = vec![false; n];
    let dim = t.dimension()? as usize;
    fn search(i: usize, n: usize, want: usize, lms: &[Vec<usize>], chosen: &mut Vec<bool>, count: usize) -> bool {
        if count == want {
            return true;
        }
        if i == n {
            return false;
        }
        chosen[i] = true;
        if lms.iter().all(|m| m.iter().any(|&v| !chosen[v])) && search(i + 1, n, want, lms, chosen, count + 1) {
            return true;
        }
        chosen[i] = false;
        search(i + 1, n, want, lms, chosen, count)
    }
    search(0, n, dim, &lms, &mut chosen, 0);
    Ok((0..n).filter(|&i| chosen[i]).collect())
}

#[derive(Clone, Copy, Debug)]
pub struct ScheduleOptions {
    pub max_steps: usize,
    pub max_dwell: f64,
    pub sim: SimOptions,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        ScheduleOptions {
            max_steps: 8,
            max_dwell: 2.0,
            sim: SimOptions::default(),
        }
    }
}

/// `count` runs from random initial points with random schedules; run `i`
/// uses stream `i` of the generator seeded with `seed`.
pub fn random_trajectories(
    h: &HybridAutomaton,
    count: usize,
    seed: u64,
    opts: ScheduleOptions,
) -> Result<Vec<Trajectory>> {
    let starts: Vec<usize> = (0..h.locations.len())
        .filter(|&q| !matches!(h.locations[q].initial.is_unit(), Ok(true)))
        .collect();
    if starts.is_empty() {
        return Ok(Vec::new());
    }
    let edges = h.effective_edges();
    log::info!("simulating {count} schedules with seed {seed}");
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let q0 = starts[rng.gen_range(0..starts.len())];
            let p = sample_initial(&h.locations[q0].initial, &mut rng)?
                .ok_or_else(|| Error::Internal("initial set became empty".into()))?;
            let x0: State = p.iter().map(|v| v.approx()).collect();
            let mut q = q0;
            let mut schedule = Vec::new();
            for _ in 0..rng.gen_range(1..=opts.max_steps.max(1)) {
                let out: Vec<usize> = (0..edges.len()).filter(|&e| edges[e].from == q).collect();
                let edge = if out.is_empty() {
                    None
                } else {
                    Some(out[rng.gen_range(0..out.len())])
                };
                if let Some(e) = edge {
                    q = edges[e].to;
                }
                schedule.push(Step {
                    dwell: rng.gen_range(0.0..opts.max_dwell),
                    edge,
                });
            }
            simulate_trajectory(h, q0, &x0, &schedule, opts.sim)
        })
        .collect()
}

/// `|g(x)| / (‖g‖₁ · max(1, max_i |x_i|)^deg g)`.
pub fn relative_residual(g: &MPoly<NfElem>, x: &[Complex64]) -> f64 {
    let norm = g.coeff_norm1();
    if norm == 0.0 {
        return 0.0;
    }
    let scale = x.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    g.eval_c64(x).norm() / (norm * scale.powi(g.total_degree() as i32))
}

#[derive(Clone, Debug)]
pub struct GeneratorResidual {
    pub location: String,
    pub generator: String,
    pub max_residual: f64,
    /// `(trajectory, sample)` of the first sample above tolerance.
    pub first_failure: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct FalsifyReport {
    pub tol: f64,
    pub samples: usize,
    pub rows: Vec<GeneratorResidual>,
}

impl FalsifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.first_failure.is_none())
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }
}

impl fmt::Display for FalsifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{verdict}: {} samples, tolerance {:e}", self.samples, self.tol)?;
        for r in &self.rows {
            write!(
                f,
                "  {} | {} | max residual {:.3e}",
                r.location, r.generator, r.max_residual
            )?;
            match r.first_failure {
                Some((t, s)) => writeln!(f, " | first failure: trajectory {t}, sample {s}")?,
                None => writeln!(f)?,
            }
        }
        Ok(())
    }
}

/// Evaluate every generator at every sample of its location.
pub fn numeric_falsify(cand: &InvariantFamily, trajectories: &[Trajectory], tol: f64) -> Result<FalsifyReport> {
    let mut rows = Vec::new();
    for (q, (name, ideal)) in cand.names.iter().zip(&cand.ideals).enumerate() {
        for g in ideal.groebner_basis()? {
            let mut row = GeneratorResidual {
                location: name.clone(),
                generator: g.to_string(),
                max_residual: 0.0,
                first_failure: None,
            };
            for (ti, tr) in trajectories.iter().enumerate() {
                for (si, s) in tr.samples.iter().enumerate().filter(|(_, s)| s.location == q) {
                    let r = relative_residual(g, &s.state);
                    if r > row.max_residual || r.is_nan() {
                        row.max_residual = if r.is_nan() { f64::INFINITY } else { r };
                    }
                    if (r > tol || r.is_nan()) && row.first_failure.is_none() {
                        row.first_failure = Some((ti, si));
                    }
                }
            }
            rows.push(row);
        }
    }
    Ok(FalsifyReport {
        tol,
        samples: trajectories.iter().map(|t| t.samples.len()).sum(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, NumberField};
    use crate::hybrid::{parse_automaton, EngineOptions};
    use crate::matalg::nilpotent_exp;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    const BALL: &str = r#"{
      "variables": ["t", "x", "y", "vx", "vy", "c", "g", "h"],
      "locations": [{
        "name": "fall",
        "flow": [
          ["0","0","0","0","0","0","0","0"], ["0","0","0","1","0","0","0","0"],
          ["0","0","0","0","1","0","0","0"], ["0","0","0","0","0","0","0","0"],
          ["0","0","0","0","0","0","-1","0"], ["0","0","0","0","0","0","0","0"],
          ["0","0","0","0","0","0","0","0"], ["0","0","0","0","0","0","0","0"]
        ],
        "affine": ["1","0","0","0","0","0","0","0"],
        "initial": ["t", "x", "y - h", "vx - c", "vy"]
      }],
      "edges": [{ "from": "fall", "to": "fall", "reset": [
          ["1","0","0","0","0","0","0","0"], ["0","1","0","0","0","0","0","0"],
          ["0","0","1","0","0","0","0","0"], ["0","0","0","1","0","0","0","0"],
          ["0","0","0","0","-1","0","0","0"], ["0","0","0","0","0","1","0","0"],
          ["0","0","0","0","0","0","1","0"], ["0","0","0","0","0","0","0","1"]
      ]}]
    }"#;

    #[test]
    fn ball_kinematics() {
        let h = parse_automaton(BALL).unwrap();
        let x0 = [0.0, 0.0, 7.0, 1.0, 0.0, 1.0, 9.8, 7.0, 1.0].map(c);
        let tr = simulate_trajectory(&h, 0, &x0, &[Step { dwell: 1.0, edge: None }], SimOptions::default()).unwrap();
        let end = &tr.samples.last().unwrap().state;
        assert!((end[4].re + 9.8).abs() < 1e-12);
        assert!((end[2].re - (7.0 - 4.9)).abs() < 1e-12);
        assert!((end[0].re - 1.0).abs() < 1e-12);
        let tr = simulate_trajectory(
            &h,
            0,
            &x0,
            &[Step {
                dwell: 1.0,
                edge: Some(0),
            }],
            SimOptions::default(),
        )
        .unwrap();
        assert!((tr.samples.last().unwrap().state[4].re - 9.8).abs() < 1e-12);
        let bad = simulate_trajectory(
            &h,
            0,
            &x0,
            &[Step {
                dwell: 1.0,
                edge: Some(3),
            }],
            SimOptions::default(),
        );
        assert!(matches!(bad, Err(Error::InvalidSchedule(_))));
        let bad = simulate_trajectory(
            &h,
            0,
            &x0,
            &[Step {
                dwell: -1.0,
                edge: None,
            }],
            SimOptions::default(),
        );
        assert!(matches!(bad, Err(Error::InvalidSchedule(_))));
    }

    #[test]
    fn zero_flow_and_rotation_period() {
        let k = NumberField::rationals();
        let z = Matrix::zeros(&k, 3, 3);
        let e = expm(&z, 5.0);
        assert!((e - DMatrix::identity(3, 3)).norm() == 0.0);
        let rot = Matrix::from_rationals(&k, &[vec![int(0), int(1)], vec![int(-1), int(0)]]).unwrap();
        let x = apply(&expm(&rot, 2.0 * std::f64::consts::PI), &vec![c(1.0), c(0.0)]);
        assert!((x[0] - c(1.0)).norm() <= 1e-9 && x[1].norm() <= 1e-9);
    }

    #[test]
    fn numeric_exponential_matches_exact_nilpotent() {
        let k = NumberField::rationals();
        let rows = |r: &[&[i64]]| {
            r.iter()
                .map(|x| x.iter().map(|&v| int(v)).collect())
                .collect::<Vec<Vec<_>>>()
        };
        for n in [
            rows(&[&[0, 1], &[0, 0]]),
            rows(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]),
            rows(&[&[0, 2, -3], &[0, 0, 5], &[0, 0, 0]]),
        ] {
            let m = Matrix::from_rationals(&k, &n).unwrap();
            let exact = nilpotent_exp(&m).unwrap();
            for t in [0.1, 1.0, 10.0] {
                let num = expm(&m, t);
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let v: f64 = exact[i][j]
                            .coeffs()
                            .iter()
                            .enumerate()
                            .map(|(p, a)| a.approx().re * t.powi(p as i32))
                            .sum();
                        assert!((num[(i, j)].re - v).abs() <= 1e-12 * v.abs().max(1.0), "{t} {i} {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn falsify_examples() {
        let h = parse_automaton(BALL).unwrap();
        let trs = random_trajectories(&h, 100, 7, ScheduleOptions::default()).unwrap();
        assert_eq!(trs.len(), 100);
        let fam = crate::hybrid::collecting_closure(&h, EngineOptions::default()).unwrap();
        let r = numeric_falsify(&fam, &trs, 1e-6).unwrap();
        assert!(r.passed(), "{r}");
        let vy = MPoly::var(&h.ring, 4);
        let bad = InvariantFamily {
            ideals: vec![PolyIdeal::new(&h.ring, vec![vy])],
            ..fam.clone()
        };
        let r = numeric_falsify(&bad, &trs, 1e-6).unwrap();
        assert!(!r.passed());
        // the first failing sample is the end of the first sub-dwell
        assert!(r.rows[0].first_failure.is_some_and(|(_, s)| s == 1));
        let trivial = InvariantFamily {
            ideals: vec![PolyIdeal::zero(&h.ring)],
            ..fam
        };
        assert!(numeric_falsify(&trivial, &trs, 1e-6).unwrap().passed());
    }

    #[test]
    fn schedules_are_reproducible() {
        let h = parse_automaton(BALL).unwrap();
        let a = random_trajectories(&h, 5, 42, ScheduleOptions::default()).unwrap();
        let b = random_trajectories(&h, 5, 42, ScheduleOptions::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.schedule, y.schedule);
            assert_eq!(x.samples.last().unwrap().state, y.samples.last().unwrap().state);
        }
    }
}

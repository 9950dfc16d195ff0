//! Dormand-Prince 8(5,3) stepper with continuous 7th-order output, following
//! the algorithmic structure of Hairer's DOP853 code: twelve stages per step,
//! a combined 5th/3rd-order error estimate, and three extra stages computed
//! lazily for the dense polynomial.

use super::dop853_tables as tb;
use super::{DenseSegment, IntegratorSpec, Trajectory, VectorField};
use crate::error::{Error, Result};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// What a streaming observer wants next.
pub enum Flow {
    Continue,
    Stop,
}

pub struct Dop853<'f, F: VectorField + ?Sized> {
    field: &'f F,
    spec: IntegratorSpec,
    pub t: f64,
    pub y: Vec<f64>,
    t_bound: f64,
    direction: f64,
    h_abs: f64,
    f_curr: Vec<f64>,
    /// Extended stage storage, N_STAGES_EXTENDED rows.
    k: Vec<Vec<f64>>,
    y_stage: Vec<f64>,
    pub t_old: f64,
    pub y_old: Vec<f64>,
    h_previous: f64,
    pub n_steps: usize,
    pub n_evals: usize,
    finished: bool,
}

impl<'f, F: VectorField + ?Sized> Dop853<'f, F> {
    pub fn new(field: &'f F, t0: f64, y0: &[f64], t_bound: f64, spec: IntegratorSpec) -> Result<Self> {
        spec.validate()?;
        let n = field.dim();
        assert_eq!(y0.len(), n, "state dimension mismatch");
        let mut f_curr = vec![0.0; n];
        field.eval(t0, y0, &mut f_curr)?;
        let direction = if t_bound >= t0 { 1.0 } else { -1.0 };
        let mut solver = Dop853 {
            field,
            spec,
            t: t0,
            y: y0.to_vec(),
            t_bound,
            direction,
            h_abs: 0.0,
            f_curr,
            k: (0..tb::N_STAGES_EXTENDED).map(|_| vec![0.0; n]).collect(),
            y_stage: vec![0.0; n],
            t_old: t0,
            y_old: y0.to_vec(),
            h_previous: 0.0,
            n_steps: 0,
            n_evals: 1,
            finished: t0 == t_bound,
        };
        solver.h_abs = solver.initial_step()?;
        Ok(solver)
    }

    fn scale_of(&self, y_a: &[f64], y_b: &[f64], i: usize) -> f64 {
        self.spec.abs_tol + y_a[i].abs().max(y_b[i].abs()) * self.spec.rel_tol
    }

    fn initial_step(&mut self) -> Result<f64> {
        let n = self.y.len();
        let interval = (self.t_bound - self.t).abs();
        if interval == 0.0 {
            return Ok(0.0);
        }
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..n {
            let scale = self.spec.abs_tol + self.y[i].abs() * self.spec.rel_tol;
            d0 += (self.y[i] / scale).powi(2);
            d1 += (self.f_curr[i] / scale).powi(2);
        }
        d0 = (d0 / n as f64).sqrt();
        d1 = (d1 / n as f64).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(interval);
        let mut y1 = self.y.clone();
        for i in 0..n {
            y1[i] += h0 * self.direction * self.f_curr[i];
        }
        let mut f1 = vec![0.0; n];
        self.field.eval(self.t + h0 * self.direction, &y1, &mut f1)?;
        self.n_evals += 1;
        let mut d2 = 0.0;
        for i in 0..n {
            let scale = self.spec.abs_tol + self.y[i].abs() * self.spec.rel_tol;
            d2 += ((f1[i] - self.f_curr[i]) / scale).powi(2);
        }
        d2 = (d2 / n as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / (tb::ERROR_ESTIMATOR_ORDER as f64 + 1.0))
        };
        Ok((100.0 * h0).min(h1).min(interval).min(self.spec.max_step))
    }

    pub fn finished(&self) -> bool {
        self.finished
    }

    /// Advance one accepted step. Returns false at the time boundary.
    pub fn step(&mut self) -> Result<bool> {
        if self.finished {
            return Ok(false);
        }
        let n = self.y.len();
        let t = self.t;
        let min_step = 10.0 * f64::EPSILON * t.abs().max(1e-30);

        let mut h_abs = self.h_abs.clamp(min_step, self.spec.max_step);
        let mut rejected = false;

        loop {
            if self.n_steps >= self.spec.max_steps {
                return Err(Error::StepUnderflow { t, h: h_abs });
            }
            if h_abs < min_step {
                return Err(Error::StepUnderflow { t, h: h_abs });
            }
            let mut h = h_abs * self.direction;
            let mut t_new = t + h;
            if self.direction * (t_new - self.t_bound) > 0.0 {
                t_new = self.t_bound;
            }
            h = t_new - t;
            h_abs = h.abs();

            match self.rk_stages(t, h) {
                Ok(()) => {}
                Err(err) => {
                    // The field failed inside the attempted step; shrinking
                    // the step can keep the orbit inside the valid domain.
                    if h_abs > 4.0 * min_step {
                        h_abs *= 0.25;
                        rejected = true;
                        continue;
                    }
                    return Err(Error::FieldFailure {
                        t,
                        source: Box::new(err),
                    });
                }
            }

            // Combined 5th/3rd order error estimate.
            let mut err5_sq = 0.0;
            let mut err3_sq = 0.0;
            for i in 0..n {
                let scale = self.scale_of(&self.y, &self.y_stage, i);
                let mut e5 = 0.0;
                let mut e3 = 0.0;
                for s in 0..=tb::N_STAGES {
                    e5 += self.k[s][i] * tb::E5[s];
                    e3 += self.k[s][i] * tb::E3[s];
                }
                err5_sq += (e5 / scale).powi(2);
                err3_sq += (e3 / scale).powi(2);
            }
            let error_norm = if err5_sq == 0.0 && err3_sq == 0.0 {
                0.0
            } else {
                let denom = err5_sq + 0.01 * err3_sq;
                h_abs * err5_sq / (denom * n as f64).sqrt()
            };

            if error_norm.is_finite() && error_norm < 1.0 {
                let factor = if error_norm == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * error_norm.powf(-1.0 / (tb::ERROR_ESTIMATOR_ORDER as f64 + 1.0)))
                        .min(MAX_FACTOR)
                };
                let factor = if rejected { factor.min(1.0) } else { factor };

                self.h_previous = h;
                self.t_old = t;
                std::mem::swap(&mut self.y_old, &mut self.y);
                self.y.copy_from_slice(&self.y_stage);
                self.t = t_new;
                self.h_abs = h_abs * factor;
                // f at the step end was stored as the last error stage.
                let (head, _) = self.k.split_at_mut(tb::N_STAGES + 1);
                self.f_curr.copy_from_slice(&head[tb::N_STAGES]);
                self.n_steps += 1;
                if self.t == self.t_bound {
                    self.finished = true;
                }
                return Ok(true);
            }
            let error_norm = if error_norm.is_finite() {
                error_norm
            } else {
                1e10
            };
            h_abs *= (SAFETY
                * error_norm.powf(-1.0 / (tb::ERROR_ESTIMATOR_ORDER as f64 + 1.0)))
            .max(MIN_FACTOR);
            rejected = true;
        }
    }

    /// The twelve main stages plus the trailing f(t + h, y_new) evaluation;
    /// leaves y_new in `y_stage` and stage derivatives in `k`.
    fn rk_stages(&mut self, t: f64, h: f64) -> Result<()> {
        let n = self.y.len();
        self.k[0].copy_from_slice(&self.f_curr);
        for s in 1..tb::N_STAGES {
            for i in 0..n {
                let mut dy = 0.0;
                for (j, kj) in self.k.iter().enumerate().take(s) {
                    let a = tb::A[s][j];
                    if a != 0.0 {
                        dy += kj[i] * a;
                    }
                }
                self.y_stage[i] = self.y[i] + h * dy;
            }
            let (t_eval, y_stage) = (t + tb::C[s] * h, std::mem::take(&mut self.y_stage));
            let res = self.field.eval(t_eval, &y_stage, &mut self.k[s]);
            self.y_stage = y_stage;
            res?;
            self.n_evals += 1;
        }
        // 8th-order solution.
        for i in 0..n {
            let mut dy = 0.0;
            for (j, kj) in self.k.iter().enumerate().take(tb::N_STAGES) {
                let b = tb::B[j];
                if b != 0.0 {
                    dy += kj[i] * b;
                }
            }
            self.y_stage[i] = self.y[i] + h * dy;
        }
        let y_stage = std::mem::take(&mut self.y_stage);
        let res = self.field.eval(t + h, &y_stage, &mut self.k[tb::N_STAGES]);
        self.y_stage = y_stage;
        res?;
        self.n_evals += 1;
        Ok(())
    }

    /// Dense-output polynomial of the last accepted step. Evaluates the three
    /// extra stages, so it costs three field calls.
    pub fn dense_segment(&mut self) -> Result<DenseSegment> {
        let n = self.y.len();
        let h = self.h_previous;
        for s in (tb::N_STAGES + 1)..tb::N_STAGES_EXTENDED {
            for i in 0..n {
                let mut dy = 0.0;
                for (j, kj) in self.k.iter().enumerate().take(s) {
                    let a = tb::A[s][j];
                    if a != 0.0 {
                        dy += kj[i] * a;
                    }
                }
                self.y_stage[i] = self.y_old[i] + h * dy;
            }
            let (t_eval, y_stage) = (self.t_old + tb::C[s] * h, std::mem::take(&mut self.y_stage));
            let res = self.field.eval(t_eval, &y_stage, &mut self.k[s]);
            self.y_stage = y_stage;
            res?;
            self.n_evals += 1;
        }
        let mut coeffs = vec![vec![0.0; n]; tb::INTERPOLATOR_POWER];
        let f_old = &self.k[0];
        let f_new = &self.k[tb::N_STAGES];
        for i in 0..n {
            let delta = self.y[i] - self.y_old[i];
            coeffs[0][i] = delta;
            coeffs[1][i] = h * f_old[i] - delta;
            coeffs[2][i] = 2.0 * delta - h * (f_new[i] + f_old[i]);
        }
        for (d_row, c_row) in tb::D.iter().zip(coeffs[3..].iter_mut()) {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in self.k.iter().enumerate() {
                    let d = d_row[j];
                    if d != 0.0 {
                        acc += kj[i] * d;
                    }
                }
                c_row[i] = h * acc;
            }
        }
        Ok(DenseSegment {
            t_old: self.t_old,
            t_new: self.t,
            y_old: self.y_old.clone(),
            coeffs,
        })
    }
}

/// Integrate over a time span, collecting samples (and dense output when the
/// spec requests it). A mid-flight field failure yields the partial
/// trajectory with the failure recorded, per the audit protocol.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    y0: &[f64],
    t_span: (f64, f64),
    spec: &IntegratorSpec,
) -> Result<Trajectory> {
    let mut traj = Trajectory {
        samples: vec![(t_span.0, y0.to_vec())],
        segments: Vec::new(),
        complete: false,
        diagnostic: None,
    };
    let mut solver = Dop853::new(field, t_span.0, y0, t_span.1, *spec)?;
    loop {
        match solver.step() {
            Ok(true) => {
                traj.samples.push((solver.t, solver.y.clone()));
                if spec.dense {
                    match solver.dense_segment() {
                        Ok(seg) => traj.segments.push(seg),
                        Err(err) => {
                            traj.diagnostic = Some(err);
                            return Ok(traj);
                        }
                    }
                }
                if solver.finished() {
                    traj.complete = true;
                    return Ok(traj);
                }
            }
            Ok(false) => {
                traj.complete = true;
                return Ok(traj);
            }
            Err(err) => {
                if traj.samples.len() == 1 {
                    return Err(err);
                }
                traj.diagnostic = Some(err);
                return Ok(traj);
            }
        }
    }
}

/// Streaming integration: the observer sees every accepted step and can stop
/// the run. Dense output is available on demand through the solver handle.
pub fn integrate_streaming<F: VectorField + ?Sized>(
    field: &F,
    y0: &[f64],
    t_span: (f64, f64),
    spec: &IntegratorSpec,
    mut on_step: impl FnMut(&mut Dop853<'_, F>) -> Result<Flow>,
) -> Result<()> {
    let mut solver = Dop853::new(field, t_span.0, y0, t_span.1, *spec)?;
    while solver.step()? {
        match on_step(&mut solver)? {
            Flow::Continue => {}
            Flow::Stop => return Ok(()),
        }
        if solver.finished() {
            break;
        }
    }
    Ok(())
}

//! Fixed-step RK4 integration of `x' = A x^{k-1} + B u(t)`.

use thiserror::Error;

use crate::tensor::{AdjacencyTensor, ControlMatrix, TensorError};

/// Default integration step.
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulateError {
    #[error("step size must be positive and finite, got {0}")]
    Step(f64),
    #[error("final time must be non-negative and finite, got {0}")]
    Horizon(f64),
    #[error("initial state has length {got}, expected {expected}")]
    InitialState { expected: usize, got: usize },
    #[error("input schedule has {got} channels but {expected} control nodes are attached")]
    Channels { expected: usize, got: usize },
    #[error("invalid input schedule: {0}")]
    Schedule(String),
    #[error("state became non-finite after t = {time}")]
    BlowUp { time: f64, last_state: Vec<f64> },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Piecewise-constant inputs: segment `i` holds from `starts[i]` until the
/// next start.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSchedule {
    channels: usize,
    segments: Vec<(f64, Vec<f64>)>,
}

impl InputSchedule {
    /// All inputs identically zero.
    pub fn zero(channels: usize) -> Self {
        Self {
            channels,
            segments: vec![(0.0, vec![0.0; channels])],
        }
    }

    /// Segments must start at `t = 0`, be strictly increasing in time, and all
    /// have `channels` finite values.
    pub fn new(channels: usize, segments: Vec<(f64, Vec<f64>)>) -> Result<Self, SimulateError> {
        let Some((first, _)) = segments.first() else {
            return Err(SimulateError::Schedule("no segments".into()));
        };
        if *first != 0.0 {
            return Err(SimulateError::Schedule(format!(
                "first segment must start at 0, starts at {first}"
            )));
        }
        for (i, (t, u)) in segments.iter().enumerate() {
            if !t.is_finite() {
                return Err(SimulateError::Schedule(format!("segment {i} has non-finite start")));
            }
            if i > 0 && *t <= segments[i - 1].0 {
                return Err(SimulateError::Schedule(format!(
                    "segment {i} does not start after segment {}",
                    i - 1
                )));
            }
            if u.len() != channels {
                return Err(SimulateError::Schedule(format!(
                    "segment {i} has {} values, expected {channels}",
                    u.len()
                )));
            }
            if u.iter().any(|x| !x.is_finite()) {
                return Err(SimulateError::Schedule(format!("segment {i} has non-finite input")));
            }
        }
        Ok(Self { channels, segments })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Input values in effect at time `t`.
    pub fn at(&self, t: f64) -> &[f64] {
        let idx = self.segments.partition_point(|(start, _)| *start <= t);
        &self.segments[idx.saturating_sub(1)].1
    }
}

/// One `(time, state)` sample per row.
pub type Trajectory = Vec<(f64, Vec<f64>)>;

/// Integrate from `x0` over `[0, t_end]` with classical RK4 at step `dt`.
/// The last step is shortened so the final sample lands exactly on `t_end`.
pub fn simulate(
    a: &AdjacencyTensor,
    controls: &ControlMatrix,
    x0: &[f64],
    inputs: &InputSchedule,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, SimulateError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimulateError::Step(dt));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(SimulateError::Horizon(t_end));
    }
    let n = a.dim();
    if x0.len() != n {
        return Err(SimulateError::InitialState {
            expected: n,
            got: x0.len(),
        });
    }
    if inputs.channels() != controls.len() {
        return Err(SimulateError::Channels {
            expected: controls.len(),
            got: inputs.channels(),
        });
    }
    // Controls are validated against the tensor dimension here.
    if let Some(&bad) = controls.nodes().iter().find(|&&v| v >= n) {
        return Err(SimulateError::Schedule(format!("control node {bad} out of range")));
    }

    let field = |u: &[f64], x: &[f64]| -> Vec<f64> {
        let mut dx = vec![0.0; n];
        let vs = vec![x; a.order() - 1];
        a.ttv_into(&vs, &mut dx);
        for (&node, &u) in controls.nodes().iter().zip(u) {
            dx[node] += u;
        }
        dx
    };
    let axpy = |x: &[f64], h: f64, k: &[f64]| -> Vec<f64> {
        x.iter().zip(k).map(|(xi, ki)| xi + h * ki).collect()
    };

    // Guard against `t_end / dt` landing a hair above an integer.
    let steps = (t_end / dt * (1.0 - 1e-12)).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut t = 0.0;
    let mut x = x0.to_vec();
    out.push((t, x.clone()));
    for i in 0..steps {
        let h = if i + 1 == steps { t_end - t } else { dt };
        if h <= 0.0 {
            break;
        }
        // Inputs are held over a step at their midpoint value.
        let u = inputs.at(t + h / 2.0);
        let k1 = field(u, &x);
        let k2 = field(u, &axpy(&x, h / 2.0, &k1));
        let k3 = field(u, &axpy(&x, h / 2.0, &k2));
        let k4 = field(u, &axpy(&x, h, &k3));
        let next: Vec<f64> = (0..n)
            .map(|j| x[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(SimulateError::BlowUp {
                time: t,
                last_state: x,
            });
        }
        t = if i + 1 == steps { t_end } else { (i + 1) as f64 * dt };
        x = next;
        out.push((t, x.clone()));
    }
    Ok(out)
}

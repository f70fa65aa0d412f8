//! Floating-point time stepping of exact linear fields, with invariant monitors.
//!
//! [`lower_to_float`] and [`FloatObservable::lower`] are the only places where rationals
//! become doubles; each entry is rounded to the nearest double.

mod circuit;

pub use circuit::{default_initial_state, simulate_circuit, CircuitRun, Target};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::constraints::Observable;
use crate::error::{Error, Result};
use crate::linalg::rational::{to_f64, Rational};
use crate::linalg::{AffineMap, Matrix};

/// `ẋ = M x + m`
#[derive(Clone, Debug, PartialEq)]
pub struct LinearField {
    pub matrix: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl LinearField {
    pub fn new(matrix: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != offset.len() {
            return Err(Error::Dimension(format!(
                "field matrix {}x{} with offset of length {}",
                matrix.nrows(),
                matrix.ncols(),
                offset.len()
            )));
        }
        Ok(LinearField { matrix, offset })
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x + &self.offset
    }
}

fn lower_scalar(r: &Rational, what: &str) -> Result<f64> {
    to_f64(r).ok_or_else(|| Error::Overflow(format!("{what}: {r} is outside the double range")))
}

pub fn lower_matrix(m: &Matrix) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i, j)] = lower_scalar(&m[(i, j)], "matrix entry")?;
        }
    }
    Ok(out)
}

pub fn lower_vector(v: &[Rational]) -> Result<DVector<f64>> {
    let xs = v
        .iter()
        .map(|x| lower_scalar(x, "vector entry"))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DVector::from_vec(xs))
}

pub fn lower_to_float(field: &AffineMap) -> Result<LinearField> {
    LinearField::new(lower_matrix(&field.matrix)?, lower_vector(&field.offset)?)
}

/// `½ xᵀ Q x + l·x + c` in doubles.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatObservable {
    pub quadratic: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
}

impl FloatObservable {
    pub fn lower(f: &Observable) -> Result<Self> {
        Ok(FloatObservable {
            quadratic: lower_matrix(f.quadratic_part())?,
            linear: lower_vector(f.linear_part())?,
            constant: lower_scalar(f.constant_part(), "constant")?,
        })
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.quadratic * x)) + self.linear.dot(x) + self.constant
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorKind {
    /// Reported as the drift `E(x) - E(x₀)`.
    Energy,
    /// Should vanish identically; reported as `φ(x)`.
    Constraint,
    /// Conserved leaf value; reported as `φ(x) - φ(x₀)`.
    Leaf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monitor {
    pub name: String,
    pub kind: MonitorKind,
    pub observable: FloatObservable,
}

impl Monitor {
    pub fn new(name: impl Into<String>, kind: MonitorKind, f: &Observable) -> Result<Self> {
        Ok(Monitor {
            name: name.into(),
            kind,
            observable: FloatObservable::lower(f)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub monitor_names: Vec<String>,
    pub monitor_kinds: Vec<MonitorKind>,
    /// One row per time, one column per monitor.
    pub monitors: Vec<Vec<f64>>,
}

impl Trajectory {
    fn start(labels: Vec<String>, monitors: &[Monitor], x0: &DVector<f64>) -> (Self, Vec<f64>) {
        let refs: Vec<f64> = monitors.iter().map(|m| m.observable.eval(x0)).collect();
        let t = Trajectory {
            labels,
            times: Vec::new(),
            states: Vec::new(),
            monitor_names: monitors.iter().map(|m| m.name.clone()).collect(),
            monitor_kinds: monitors.iter().map(|m| m.kind).collect(),
            monitors: Vec::new(),
        };
        (t, refs)
    }

    fn record(&mut self, t: f64, x: DVector<f64>, monitors: &[Monitor], refs: &[f64]) {
        let row = monitors
            .iter()
            .zip(refs)
            .map(|(m, r)| {
                let v = m.observable.eval(&x);
                match m.kind {
                    MonitorKind::Constraint => v,
                    MonitorKind::Energy | MonitorKind::Leaf => v - r,
                }
            })
            .collect();
        self.times.push(t);
        self.states.push(x);
        self.monitors.push(row);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &DVector<f64> {
        self.states.last().expect("trajectories hold the initial state")
    }

    /// CSV with a header row; every number is written with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for name in self.labels.iter().chain(&self.monitor_names) {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for ((t, x), m) in self.times.iter().zip(&self.states).zip(&self.monitors) {
            out.push_str(&format!("{t:.16e}"));
            for v in x.iter().chain(m) {
                out.push_str(&format!(",{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }
}

fn check_step(dt: f64, x0: &DVector<f64>, field: &LinearField) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
    }
    if x0.len() != field.dim() {
        return Err(Error::Dimension(format!(
            "initial state of length {} for a field of dimension {}",
            x0.len(),
            field.dim()
        )));
    }
    Ok(())
}

/// Classic fourth-order Runge–Kutta with a fixed step.
pub fn integrate_rk4(
    field: &LinearField,
    x0: &DVector<f64>,
    dt: f64,
    steps: usize,
    labels: Vec<String>,
    monitors: &[Monitor],
) -> Result<Trajectory> {
    check_step(dt, x0, field)?;
    let (mut traj, refs) = Trajectory::start(labels, monitors, x0);
    let mut x = x0.clone();
    traj.record(0.0, x.clone(), monitors, &refs);
    for k in 1..=steps {
        let k1 = field.eval(&x);
        let k2 = field.eval(&(&x + &k1 * (dt / 2.0)));
        let k3 = field.eval(&(&x + &k2 * (dt / 2.0)));
        let k4 = field.eval(&(&x + &k3 * dt));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow(format!("non-finite state at step {k}")));
        }
        traj.record(k as f64 * dt, x.clone(), monitors, &refs);
    }
    Ok(traj)
}

/// `[[tM, tm], [0, 0]]`, whose exponential carries `(x₀, 1)` to `(x(t), 1)`.
fn augmented(field: &LinearField, t: f64) -> DMatrix<f64> {
    let n = field.dim();
    let mut a = DMatrix::zeros(n + 1, n + 1);
    a.view_mut((0, 0), (n, n)).copy_from(&(&field.matrix * t));
    a.view_mut((0, n), (n, 1)).copy_from(&(&field.offset * t));
    a
}

/// Flow propagator, by nalgebra's Padé scaling-and-squaring matrix exponential.
pub fn propagator(field: &LinearField, t: f64) -> DMatrix<f64> {
    augmented(field, t).exp()
}

fn apply_propagator(p: &DMatrix<f64>, x0: &DVector<f64>) -> DVector<f64> {
    let n = x0.len();
    p.view((0, 0), (n, n)) * x0 + p.view((0, n), (n, 1)).column(0)
}

pub fn exact_flow(field: &LinearField, x0: &DVector<f64>, t: f64) -> DVector<f64> {
    apply_propagator(&propagator(field, t), x0)
}

/// Samples `x(k·dt)`, each by its own exponential so that errors do not accumulate.
pub fn exact_trajectory(
    field: &LinearField,
    x0: &DVector<f64>,
    dt: f64,
    steps: usize,
    labels: Vec<String>,
    monitors: &[Monitor],
) -> Result<Trajectory> {
    check_step(dt, x0, field)?;
    let (mut traj, refs) = Trajectory::start(labels, monitors, x0);
    for k in 0..=steps {
        let t = k as f64 * dt;
        traj.record(t, exact_flow(field, x0, t), monitors, &refs);
    }
    Ok(traj)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonitorSummary {
    pub name: String,
    pub kind: MonitorKind,
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonitorReport {
    pub steps: usize,
    pub final_time: f64,
    pub energy_drift: f64,
    pub max_constraint_residual: f64,
    pub max_leaf_residual: f64,
    pub monitors: Vec<MonitorSummary>,
}

pub fn monitor_report(traj: &Trajectory) -> MonitorReport {
    let monitors: Vec<MonitorSummary> = traj
        .monitor_names
        .iter()
        .zip(&traj.monitor_kinds)
        .enumerate()
        .map(|(j, (name, kind))| MonitorSummary {
            name: name.clone(),
            kind: *kind,
            max_abs: traj.monitors.iter().map(|r| r[j].abs()).fold(0.0, f64::max),
        })
        .collect();
    let worst = |k: MonitorKind| {
        monitors
            .iter()
            .filter(|m| m.kind == k)
            .map(|m| m.max_abs)
            .fold(0.0, f64::max)
    };
    MonitorReport {
        steps: traj.len().saturating_sub(1),
        final_time: traj.times.last().copied().unwrap_or(0.0),
        energy_drift: worst(MonitorKind::Energy),
        max_constraint_residual: worst(MonitorKind::Constraint),
        max_leaf_residual: worst(MonitorKind::Leaf),
        monitors,
    }
}

/// `max_k |a_k - b_k|` over matching samples.
pub fn max_state_error(a: &Trajectory, b: &Trajectory) -> f64 {
    a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| (x - y).amax())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::{ints, ratio};

    fn field(rows: &[&[f64]]) -> LinearField {
        let n = rows.len();
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        LinearField::new(m, DVector::zeros(n)).unwrap()
    }

    #[test]
    fn lowering_rounds_to_nearest() {
        let m = Matrix::from_rows(2, &[vec![ratio(1, 3), ratio(-7, 1)], ints(&[0, 2])]);
        let f = lower_matrix(&m).unwrap();
        assert_eq!(f[(0, 0)], 1.0 / 3.0);
        assert_eq!(f[(0, 1)], -7.0);
        let huge = crate::linalg::rational::parse_rational(&format!("1{}", "0".repeat(400))).unwrap();
        assert!(matches!(lower_vector(&[huge]), Err(Error::Overflow(_))));
    }

    #[test]
    fn zero_field_is_constant() {
        let f = LinearField::new(DMatrix::zeros(3, 3), DVector::zeros(3)).unwrap();
        let x0 = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let t = integrate_rk4(&f, &x0, 0.1, 50, vec!["a".into(), "b".into(), "c".into()], &[]).unwrap();
        assert!(t.states.iter().all(|x| x == &x0));
        assert_eq!(exact_flow(&f, &x0, 7.0), x0);
    }

    #[test]
    fn free_particle_is_exact() {
        let f = field(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let x0 = DVector::from_vec(vec![0.3, -1.25]);
        for t in [0.5, 3.0, 40.0] {
            let x = exact_flow(&f, &x0, t);
            assert!((x[0] - (0.3 - 1.25 * t)).abs() < 1e-12 * (1.0 + t));
            assert_eq!(x[1], -1.25);
        }
    }

    #[test]
    fn rotation_matches_trigonometry() {
        let f = field(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let x0 = DVector::from_vec(vec![1.0, 0.0]);
        for k in 0..=100 {
            let t = k as f64;
            let x = exact_flow(&f, &x0, t);
            assert!((x[0] - t.cos()).abs() < 1e-12 && (x[1] + t.sin()).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn offset_is_handled_by_the_augmented_exponential() {
        // ẋ = -x + 2 from 0 gives 2(1 - e^{-t})
        let f = LinearField::new(DMatrix::from_element(1, 1, -1.0), DVector::from_element(1, 2.0)).unwrap();
        let x = exact_flow(&f, &DVector::zeros(1), 1.5);
        assert!((x[0] - 2.0 * (1.0 - (-1.5f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn rk4_returns_to_start_with_fourth_order_error() {
        let f = field(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let x0 = DVector::from_vec(vec![1.0, 0.0]);
        let period = 2.0 * std::f64::consts::PI;
        let err = |n: usize| {
            let t = integrate_rk4(&f, &x0, period / n as f64, n, vec!["x".into(), "p".into()], &[]).unwrap();
            (t.last() - &x0).amax()
        };
        let ratio = err(50) / err(100);
        assert!((12.0..20.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn non_finite_state_names_the_step() {
        let f = field(&[&[1e200]]);
        let e = integrate_rk4(&f, &DVector::from_element(1, 1e200), 1.0, 10, vec!["x".into()], &[]).unwrap_err();
        assert!(e.to_string().contains("step 1"));
    }

    #[test]
    fn csv_has_header_and_seventeen_digits() {
        let f = field(&[&[0.0]]);
        let obs = Observable::coordinate(1, 0);
        let m = [Monitor::new("x_leaf", MonitorKind::Leaf, &obs).unwrap()];
        let t = integrate_rk4(&f, &DVector::from_element(1, 1.0 / 3.0), 0.5, 1, vec!["x".into()], &m).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x,x_leaf"));
        assert_eq!(
            lines.next(),
            Some("0.0000000000000000e0,3.3333333333333331e-1,0.0000000000000000e0")
        );
        let rep = monitor_report(&t);
        assert_eq!(rep.max_leaf_residual, 0.0);
        assert_eq!(rep.steps, 1);
    }
}

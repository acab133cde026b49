use super::{argmax, TabularModel};
use crate::scalar::Scalar;

/// Outcome of [`value_iteration`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepReport<T> {
    pub sweeps: usize,
    /// Largest absolute change of any Q cell in the final sweep.
    pub last_change: T,
    /// `gamma * last_change`, an upper bound on the Bellman residual of the
    /// returned table.
    pub residual: T,
    pub converged: bool,
}

/// One synchronous Bellman backup of an arbitrary Q table against the
/// model's current estimates.
///
/// `v_old(s) = max_a q_in(s, a)`, then
/// `q(s, a) = r_hat(s, a) + gamma * sum_s' p_hat(s, a, s') v_old(s')`.
pub fn sweep_values<T: Scalar>(model: &TabularModel<T>, q_in: &[T]) -> Vec<T> {
    let spec = model.spec();
    let (ns, na) = (spec.num_states, spec.num_actions);
    let v_old: Vec<T> = (0..ns)
        .map(|s| {
            let row = &q_in[s * na..(s + 1) * na];
            row[argmax(row)]
        })
        .collect();
    let r_hat = model.r_hat_table();
    let mut out = vec![T::zero(); ns * na];
    for s in 0..ns {
        for a in 0..na {
            let mut acc = T::zero();
            for &(s2, p) in model.p_hat_row(s, a) {
                acc += v_old[s2] * p;
            }
            out[s * na + a] = r_hat[s * na + a] + spec.gamma * acc;
        }
    }
    out
}

/// Applies one sweep to the model's own table and refreshes `v`. Returns
/// the largest absolute change of any cell.
pub fn q_sweep<T: Scalar>(model: &mut TabularModel<T>) -> T {
    let next = sweep_values(model, model.q_table());
    let change = max_abs_diff(&next, model.q_table());
    model.set_q(next);
    change
}

/// Sweeps until `gamma * max|dq| < tol` (which bounds the Bellman residual
/// of the result by `tol`) or `max_sweeps` is reached.
pub fn value_iteration<T: Scalar>(
    model: &mut TabularModel<T>,
    tol: T,
    max_sweeps: usize,
) -> SweepReport<T> {
    assert!(tol > T::zero(), "tolerance must be positive");
    let gamma = model.spec().gamma;
    let mut report = SweepReport {
        sweeps: 0,
        last_change: T::infinity(),
        residual: T::infinity(),
        converged: false,
    };
    while report.sweeps < max_sweeps {
        let change = q_sweep(model);
        report.sweeps += 1;
        report.last_change = change;
        report.residual = gamma * change;
        if report.residual < tol {
            report.converged = true;
            break;
        }
    }
    report
}

pub(crate) fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max)
}

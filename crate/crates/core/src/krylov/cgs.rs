use super::{check_dims, degenerate, Breakdown, KrylovError, LinearOperator, Monitor, Outcome, StopRule};
use crate::precond::Preconditioner;
use crate::scalar::{Real, Scalar};
use crate::sparse::vector::{axpy, hdot, norm2};

/// Conjugate gradients squared. The preconditioned form solves with `M` for
/// `p̂ = M⁻¹p` and `û = M⁻¹(u + q)`.
pub fn cgs<S: Scalar>(
    a: &dyn LinearOperator<S>,
    b: &[S],
    m: Option<&dyn Preconditioner<S>>,
    stop: &StopRule,
) -> Result<Outcome<S>, KrylovError> {
    check_dims(a, b)?;
    Ok(match m {
        Some(m) => preconditioned(a, b, m, stop),
        None => plain(a, b, stop),
    })
}

fn preconditioned<S: Scalar>(
    a: &dyn LinearOperator<S>,
    b: &[S],
    m: &dyn Preconditioner<S>,
    stop: &StopRule,
) -> Outcome<S> {
    let n = b.len();
    let zero = vec![S::zero(); n];
    let mut x = zero.clone();
    let mut r = b.to_vec();
    let rt = r.clone();
    let mon = Monitor::new(&r, stop);
    let mut rn = mon.initial();
    if mon.met(rn) {
        return mon.finish(x, 0, rn, true);
    }
    let (mut u, mut p, mut q) = (zero.clone(), zero.clone(), zero.clone());
    let (mut ph, mut v, mut uq, mut uh, mut qh) =
        (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero);
    let mut rho_prev = S::zero();

    for k in 1..=mon.max_iter {
        let rho = hdot(&rt, &r);
        if let Some(why) = degenerate(rho, "rho") {
            return mon.broke(x, k, rn, why);
        }
        if k == 1 {
            u.copy_from_slice(&r);
            p.copy_from_slice(&u);
        } else {
            let beta = rho / rho_prev;
            for i in 0..n {
                u[i] = r[i] + beta * q[i];
                p[i] = u[i] + beta * (q[i] + beta * p[i]);
            }
        }
        if let Err(e) = m.apply(&p, &mut ph) {
            return mon.broke(x, k, rn, Breakdown::Precond(e));
        }
        a.apply(&ph, &mut v);
        let sigma = hdot(&rt, &v);
        if let Some(why) = degenerate(sigma, "<r~, v>") {
            return mon.broke(x, k, rn, why);
        }
        let alpha = rho / sigma;
        for i in 0..n {
            q[i] = u[i] - alpha * v[i];
            uq[i] = u[i] + q[i];
        }
        if let Err(e) = m.apply(&uq, &mut uh) {
            return mon.broke(x, k, rn, Breakdown::Precond(e));
        }
        axpy(alpha, &uh, &mut x);
        a.apply(&uh, &mut qh);
        axpy(-alpha, &qh, &mut r);
        rn = norm2(&r);
        if !rn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(rn) {
            return mon.finish(x, k, rn, true);
        }
        rho_prev = rho;
    }
    let k = mon.max_iter;
    mon.finish(x, k, rn, false)
}

fn plain<S: Scalar>(a: &dyn LinearOperator<S>, b: &[S], stop: &StopRule) -> Outcome<S> {
    let n = b.len();
    let zero = vec![S::zero(); n];
    let mut x = zero.clone();
    let mut r = b.to_vec();
    let rt = r.clone();
    let mon = Monitor::new(&r, stop);
    let mut rn = mon.initial();
    if mon.met(rn) {
        return mon.finish(x, 0, rn, true);
    }
    let (mut u, mut p, mut q, mut v, mut uq, mut aq) = (
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero,
    );
    let mut rho_prev = S::zero();

    for k in 1..=mon.max_iter {
        let rho = hdot(&rt, &r);
        if let Some(why) = degenerate(rho, "rho") {
            return mon.broke(x, k, rn, why);
        }
        if k == 1 {
            u.copy_from_slice(&r);
            p.copy_from_slice(&u);
        } else {
            let beta = rho / rho_prev;
            for i in 0..n {
                u[i] = r[i] + beta * q[i];
                p[i] = u[i] + beta * (q[i] + beta * p[i]);
            }
        }
        a.apply(&p, &mut v);
        let sigma = hdot(&rt, &v);
        if let Some(why) = degenerate(sigma, "<r~, v>") {
            return mon.broke(x, k, rn, why);
        }
        let alpha = rho / sigma;
        for i in 0..n {
            q[i] = u[i] - alpha * v[i];
            uq[i] = u[i] + q[i];
        }
        axpy(alpha, &uq, &mut x);
        a.apply(&uq, &mut aq);
        axpy(-alpha, &aq, &mut r);
        rn = norm2(&r);
        if !rn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(rn) {
            return mon.finish(x, k, rn, true);
        }
        rho_prev = rho;
    }
    let k = mon.max_iter;
    mon.finish(x, k, rn, false)
}

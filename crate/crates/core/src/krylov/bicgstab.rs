use super::{check_dims, degenerate, Breakdown, KrylovError, LinearOperator, Monitor, Outcome, StopRule};
use crate::precond::Preconditioner;
use crate::scalar::{Real, Scalar};
use crate::sparse::vector::{axpy, hdot, norm2};

/// BiCGSTAB. The preconditioned form solves for `p̂ = M⁻¹p` and `ŝ = M⁻¹s`.
/// Convergence is also tested after the half step on `s`.
pub fn bicgstab<S: Scalar>(
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
    let (mut p, mut ph, mut v, mut s, mut sh, mut t) = (
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero,
    );
    let (mut rho_prev, mut alpha, mut omega) = (S::zero(), S::zero(), S::zero());

    for k in 1..=mon.max_iter {
        let rho = hdot(&rt, &r);
        if let Some(why) = degenerate(rho, "rho") {
            return mon.broke(x, k, rn, why);
        }
        if k == 1 {
            p.copy_from_slice(&r);
        } else {
            let beta = (rho / rho_prev) * (alpha / omega);
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
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
        alpha = rho / sigma;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        let sn = norm2(&s);
        if !sn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(sn) {
            axpy(alpha, &ph, &mut x);
            return mon.finish(x, k, sn, true);
        }
        if let Err(e) = m.apply(&s, &mut sh) {
            return mon.broke(x, k, rn, Breakdown::Precond(e));
        }
        a.apply(&sh, &mut t);
        let tt = hdot(&t, &t);
        if let Some(why) = degenerate(tt, "<t, t>") {
            return mon.broke(x, k, rn, why);
        }
        omega = hdot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        rn = norm2(&r);
        if !rn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(rn) {
            return mon.finish(x, k, rn, true);
        }
        if omega.is_zero() {
            return mon.broke(x, k, rn, Breakdown::Zero("omega"));
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
    let (mut p, mut v, mut s, mut t) = (zero.clone(), zero.clone(), zero.clone(), zero);
    let (mut rho_prev, mut alpha, mut omega) = (S::zero(), S::zero(), S::zero());

    for k in 1..=mon.max_iter {
        let rho = hdot(&rt, &r);
        if let Some(why) = degenerate(rho, "rho") {
            return mon.broke(x, k, rn, why);
        }
        if k == 1 {
            p.copy_from_slice(&r);
        } else {
            let beta = (rho / rho_prev) * (alpha / omega);
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
        }
        a.apply(&p, &mut v);
        let sigma = hdot(&rt, &v);
        if let Some(why) = degenerate(sigma, "<r~, v>") {
            return mon.broke(x, k, rn, why);
        }
        alpha = rho / sigma;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        let sn = norm2(&s);
        if !sn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(sn) {
            axpy(alpha, &p, &mut x);
            return mon.finish(x, k, sn, true);
        }
        a.apply(&s, &mut t);
        let tt = hdot(&t, &t);
        if let Some(why) = degenerate(tt, "<t, t>") {
            return mon.broke(x, k, rn, why);
        }
        omega = hdot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        rn = norm2(&r);
        if !rn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(rn) {
            return mon.finish(x, k, rn, true);
        }
        if omega.is_zero() {
            return mon.broke(x, k, rn, Breakdown::Zero("omega"));
        }
        rho_prev = rho;
    }
    let k = mon.max_iter;
    mon.finish(x, k, rn, false)
}

use super::{check_dims, degenerate, Breakdown, KrylovError, LinearOperator, Monitor, Outcome, StopRule};
use crate::precond::Preconditioner;
use crate::scalar::{Real, Scalar};
use crate::sparse::vector::{axpy, hdot, norm2, xpby};

/// Bi-conjugate gradients with the shadow system driven by `A^H` and `M^H`.
pub fn bicg<S: Scalar>(
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
    let mut rt = r.clone();
    let mon = Monitor::new(&r, stop);
    let mut rn = mon.initial();
    if mon.met(rn) {
        return mon.finish(x, 0, rn, true);
    }
    let (mut z, mut zt) = (zero.clone(), zero.clone());
    if let Err(e) = m.apply(&r, &mut z).and_then(|_| m.apply_adjoint(&rt, &mut zt)) {
        return mon.broke(x, 0, rn, Breakdown::Precond(e));
    }
    let mut p = z.clone();
    let mut pt = zt.clone();
    let (mut q, mut qt) = (zero.clone(), zero);
    let mut rho = hdot(&zt, &r);

    for k in 1..=mon.max_iter {
        if let Some(why) = degenerate(rho, "rho") {
            return mon.broke(x, k, rn, why);
        }
        a.apply(&p, &mut q);
        a.apply_adjoint(&pt, &mut qt);
        let sigma = hdot(&pt, &q);
        if let Some(why) = degenerate(sigma, "<p~, Ap>") {
            return mon.broke(x, k, rn, why);
        }
        let alpha = rho / sigma;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        axpy(-alpha.conj(), &qt, &mut rt);
        rn = norm2(&r);
        if !rn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(rn) {
            return mon.finish(x, k, rn, true);
        }
        if let Err(e) = m.apply(&r, &mut z).and_then(|_| m.apply_adjoint(&rt, &mut zt)) {
            return mon.broke(x, k, rn, Breakdown::Precond(e));
        }
        let rho_new = hdot(&zt, &r);
        let beta = rho_new / rho;
        xpby(&z, beta, &mut p);
        xpby(&zt, beta.conj(), &mut pt);
        rho = rho_new;
    }
    let k = mon.max_iter;
    mon.finish(x, k, rn, false)
}

fn plain<S: Scalar>(a: &dyn LinearOperator<S>, b: &[S], stop: &StopRule) -> Outcome<S> {
    let n = b.len();
    let mut x = vec![S::zero(); n];
    let mut r = b.to_vec();
    let mut rt = r.clone();
    let mon = Monitor::new(&r, stop);
    let mut rn = mon.initial();
    if mon.met(rn) {
        return mon.finish(x, 0, rn, true);
    }
    let mut p = r.clone();
    let mut pt = rt.clone();
    let mut q = vec![S::zero(); n];
    let mut qt = q.clone();
    let mut rho = hdot(&rt, &r);

    for k in 1..=mon.max_iter {
        if let Some(why) = degenerate(rho, "rho") {
            return mon.broke(x, k, rn, why);
        }
        a.apply(&p, &mut q);
        a.apply_adjoint(&pt, &mut qt);
        let sigma = hdot(&pt, &q);
        if let Some(why) = degenerate(sigma, "<p~, Ap>") {
            return mon.broke(x, k, rn, why);
        }
        let alpha = rho / sigma;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        axpy(-alpha.conj(), &qt, &mut rt);
        rn = norm2(&r);
        if !rn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(rn) {
            return mon.finish(x, k, rn, true);
        }
        let rho_new = hdot(&rt, &r);
        let beta = rho_new / rho;
        xpby(&r, beta, &mut p);
        xpby(&rt, beta.conj(), &mut pt);
        rho = rho_new;
    }
    let k = mon.max_iter;
    mon.finish(x, k, rn, false)
}

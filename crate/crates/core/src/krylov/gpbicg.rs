use super::{check_dims, degenerate, Breakdown, KrylovError, LinearOperator, Monitor, Outcome, StopRule};
use crate::precond::Preconditioner;
use crate::scalar::{Real, Scalar};
use crate::sparse::vector::{axpy, hdot, norm2};

/// GPBiCG with `(ζ, η)` from the 2×2 least-squares problem
/// `min ‖t − η y − ζ At‖` (`η = 0` on the first step).
///
/// The preconditioned form is right preconditioning carried in the solution
/// space: the search quantities `p̂, t̂, û, ẑ` are kept as `M⁻¹` images, so
/// each step costs two solves (`M⁻¹r` and `M⁻¹(Ap̂)`) and two products.
pub fn gpbicg<S: Scalar>(
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

/// Least-squares weights. `y` is ignored on the first step.
fn weights<S: Scalar>(first: bool, t: &[S], at: &[S], y: &[S]) -> Result<(S, S), Breakdown> {
    let aa = hdot(at, at);
    let d = hdot(at, t);
    if first {
        if let Some(why) = degenerate(aa, "<At, At>") {
            return Err(match why {
                Breakdown::Zero(_) => Breakdown::SingularLeastSquares,
                other => other,
            });
        }
        return Ok((d / aa, S::zero()));
    }
    let yy = hdot(y, y);
    let c = hdot(y, at);
    let e = hdot(y, t);
    let det = aa * yy - c.conj() * c;
    match degenerate(det, "least-squares determinant") {
        Some(Breakdown::Zero(_)) => return Err(Breakdown::SingularLeastSquares),
        Some(other) => return Err(other),
        None => {}
    }
    let zeta = (yy * d - c.conj() * e) / det;
    let eta = (aa * e - c * d) / det;
    Ok((zeta, eta))
}

/// Exit used when the weights are undefined: `t` is the residual of
/// `x + αp`, so that iterate is accepted if it meets the stopping rule.
#[allow(clippy::too_many_arguments)]
fn half_step<S: Scalar>(
    mon: &Monitor<S>,
    mut x: Vec<S>,
    alpha: S,
    p: &[S],
    t: &[S],
    k: usize,
    rn: S::Real,
    why: Breakdown,
) -> Outcome<S> {
    let tn = norm2(t);
    if mon.met(tn) {
        axpy(alpha, p, &mut x);
        return mon.finish(x, k, tn, true);
    }
    mon.broke(x, k, rn, why)
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
    // residual-space vectors
    let (mut ap, mut at, mut t, mut t_prev, mut w, mut y) = (
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
    );
    // solution-space (M⁻¹) images
    let (mut rh, mut ah, mut ph, mut th, mut th_prev, mut uh, mut zh) = (
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero,
    );
    if let Err(e) = m.apply(&r, &mut rh) {
        return mon.broke(x, 0, rn, Breakdown::Precond(e));
    }
    let mut rho = hdot(&rt, &r);
    let mut beta = S::zero();

    for k in 1..=mon.max_iter {
        let first = k == 1;
        if let Some(why) = degenerate(rho, "rho") {
            return mon.broke(x, k, rn, why);
        }
        if first {
            ph.copy_from_slice(&rh);
        } else {
            for i in 0..n {
                ph[i] = rh[i] + beta * (ph[i] - uh[i]);
            }
        }
        a.apply(&ph, &mut ap);
        let sigma = hdot(&rt, &ap);
        if let Some(why) = degenerate(sigma, "<r~, Ap>") {
            return mon.broke(x, k, rn, why);
        }
        let alpha = rho / sigma;
        if let Err(e) = m.apply(&ap, &mut ah) {
            return mon.broke(x, k, rn, Breakdown::Precond(e));
        }
        if !first {
            for i in 0..n {
                y[i] = t_prev[i] - r[i] - alpha * w[i] + alpha * ap[i];
            }
        }
        for i in 0..n {
            t[i] = r[i] - alpha * ap[i];
            th[i] = rh[i] - alpha * ah[i];
        }
        a.apply(&th, &mut at);
        let (zeta, eta) = match weights(first, &t, &at, &y) {
            Ok(v) => v,
            Err(why) => return half_step(&mon, x, alpha, &ph, &t, k, rn, why),
        };
        if let Some(why) = degenerate(zeta, "zeta") {
            return half_step(&mon, x, alpha, &ph, &t, k, rn, why);
        }
        if first {
            for i in 0..n {
                uh[i] = zeta * ah[i];
                zh[i] = zeta * rh[i] - alpha * uh[i];
                x[i] += alpha * ph[i] + zh[i];
                r[i] = t[i] - zeta * at[i];
            }
        } else {
            for i in 0..n {
                uh[i] = zeta * ah[i] + eta * (th_prev[i] - rh[i] + beta * uh[i]);
                zh[i] = zeta * rh[i] + eta * zh[i] - alpha * uh[i];
                x[i] += alpha * ph[i] + zh[i];
                r[i] = t[i] - eta * y[i] - zeta * at[i];
            }
        }
        rn = norm2(&r);
        if !rn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(rn) {
            return mon.finish(x, k, rn, true);
        }
        let rho_new = hdot(&rt, &r);
        beta = (alpha / zeta) * (rho_new / rho);
        rho = rho_new;
        for i in 0..n {
            w[i] = at[i] + beta * ap[i];
        }
        std::mem::swap(&mut t_prev, &mut t);
        std::mem::swap(&mut th_prev, &mut th);
        if let Err(e) = m.apply(&r, &mut rh) {
            return mon.broke(x, k, rn, Breakdown::Precond(e));
        }
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
    let (mut p, mut ap, mut at, mut t, mut t_prev, mut u, mut w, mut y, mut z) = (
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero,
    );
    let mut rho = hdot(&rt, &r);
    let mut beta = S::zero();

    for k in 1..=mon.max_iter {
        let first = k == 1;
        if let Some(why) = degenerate(rho, "rho") {
            return mon.broke(x, k, rn, why);
        }
        if first {
            p.copy_from_slice(&r);
        } else {
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - u[i]);
            }
        }
        a.apply(&p, &mut ap);
        let sigma = hdot(&rt, &ap);
        if let Some(why) = degenerate(sigma, "<r~, Ap>") {
            return mon.broke(x, k, rn, why);
        }
        let alpha = rho / sigma;
        if !first {
            for i in 0..n {
                y[i] = t_prev[i] - r[i] - alpha * w[i] + alpha * ap[i];
            }
        }
        for i in 0..n {
            t[i] = r[i] - alpha * ap[i];
        }
        a.apply(&t, &mut at);
        let (zeta, eta) = match weights(first, &t, &at, &y) {
            Ok(v) => v,
            Err(why) => return half_step(&mon, x, alpha, &p, &t, k, rn, why),
        };
        if let Some(why) = degenerate(zeta, "zeta") {
            return half_step(&mon, x, alpha, &p, &t, k, rn, why);
        }
        if first {
            for i in 0..n {
                u[i] = zeta * ap[i];
                z[i] = zeta * r[i] - alpha * u[i];
                x[i] += alpha * p[i] + z[i];
                r[i] = t[i] - zeta * at[i];
            }
        } else {
            for i in 0..n {
                u[i] = zeta * ap[i] + eta * (t_prev[i] - r[i] + beta * u[i]);
                z[i] = zeta * r[i] + eta * z[i] - alpha * u[i];
                x[i] += alpha * p[i] + z[i];
                r[i] = t[i] - eta * y[i] - zeta * at[i];
            }
        }
        rn = norm2(&r);
        if !rn.is_finite() {
            return mon.broke(x, k, rn, Breakdown::NonFinite("residual norm"));
        }
        if mon.met(rn) {
            return mon.finish(x, k, rn, true);
        }
        let rho_new = hdot(&rt, &r);
        beta = (alpha / zeta) * (rho_new / rho);
        rho = rho_new;
        for i in 0..n {
            w[i] = at[i] + beta * ap[i];
        }
        std::mem::swap(&mut t_prev, &mut t);
    }
    let k = mon.max_iter;
    mon.finish(x, k, rn, false)
}

//! Fixture-free property checks. Each returns `Err` with the first
//! counterexample found. They are shared by the core integration tests and
//! the acceptance report.

use mpkrylov::krylov::{Method, StopRule};
use mpkrylov::precond::{Identity, IluFactors};
use mpkrylov::scalar::eft::{two_prod, two_sum};
use mpkrylov::sparse::vector::{hdot, norm2};
use mpkrylov::{ComplexDd, ComplexQd, CsrMatrix, Dd, MultiFloat, Qd, Real, Scalar, Td};
use num_rational::BigRational;
use num_traits::Signed;
use rand::Rng;

use crate::dense::{self, Dense};
use crate::exact::{rel_error, to_f64, value, Dyadic};
use crate::gen::{self, TestRng};

pub type Check = Result<(), String>;

/// Binary64 value whose exponent lies within `spread` of `x`'s, so that
/// most pairs overlap and the error terms are nontrivial.
fn near(rng: &mut TestRng, x: f64, spread: i32) -> f64 {
    let e = x.abs().log2().floor() as i32;
    gen::f64_with_exp(rng, e - spread..=e + spread)
}

/// `a + b = s + e` and `a · b = p + e` exactly, with `s`, `p` the rounded
/// results, on `count` random pairs each.
pub fn eft_identities(count: usize, seed: u64) -> Check {
    let d = Dyadic::from_f64;
    let mut rng = gen::rng(seed);
    for _ in 0..count {
        let a = gen::f64_with_exp(&mut rng, -500..=500);
        let b = near(&mut rng, a, 60);
        let (s, e) = two_sum(a, b);
        if s != a + b || d(s).add(&d(e)) != d(a).add(&d(b)) {
            return Err(format!("two_sum({a:e}, {b:e}) = ({s:e}, {e:e}) is not exact"));
        }
        // keep the product's error term above the subnormal range
        let c = gen::f64_with_exp(&mut rng, -400..=400);
        let f = gen::f64_with_exp(&mut rng, -400..=400);
        let (p, g) = two_prod(c, f);
        if p != c * f || d(p).add(&d(g)) != d(c).mul(&d(f)) {
            return Err(format!("two_prod({c:e}, {f:e}) = ({p:e}, {g:e}) is not exact"));
        }
    }
    Ok(())
}

fn op_bounds<const N: usize>(samples: usize, bound: f64, rng: &mut TestRng) -> Check {
    let label = format!("{N}-component");
    let check = |what: &str, a: MultiFloat<N>, b: MultiFloat<N>, got: MultiFloat<N>, exact: BigRational| {
        let err = rel_error(&value(got), &exact);
        if err > bound {
            Err(format!("{label} {what}: a={a:?} b={b:?} rel err {err:e} > {bound:e}"))
        } else {
            Ok(())
        }
    };
    for _ in 0..samples {
        let a: MultiFloat<N> = gen::multi(rng, -40..=40);
        let b: MultiFloat<N> = gen::multi(rng, -40..=40);
        let (qa, qb) = (value(a), value(b));
        check("add", a, b, a + b, &qa + &qb)?;
        check("sub", a, b, a - b, &qa - &qb)?;
        check("mul", a, b, a * b, &qa * &qb)?;
        check("div", a, b, a / b, &qa / &qb)?;
        // sqrt: compare s² against |a|; the relative error of s is half
        let s = a.abs().sqrt();
        let qs = value(s);
        let err = rel_error(&(&qs * &qs), &qa.abs()) / 2.0;
        if err > bound {
            return Err(format!("{label} sqrt: a={a:?} rel err {err:e} > {bound:e}"));
        }
    }
    Ok(())
}

/// Arithmetic against exact rationals: double-double within 2⁻¹⁰⁰ and
/// quad-double within 2⁻²⁰⁶ relative error. Triple-double is held to 2⁻¹⁵³.
pub fn multifloat_bounds(samples: usize, seed: u64) -> Check {
    let mut rng = gen::rng(seed);
    op_bounds::<2>(samples, 2f64.powi(-100), &mut rng)?;
    op_bounds::<3>(samples, 2f64.powi(-153), &mut rng)?;
    op_bounds::<4>(samples, 2f64.powi(-206), &mut rng)
}

fn csr<S: Scalar>(a: &Dense<S>) -> CsrMatrix<S> {
    CsrMatrix::from_dense(a).expect("square dense input")
}

fn ilu_vs_lu<S: Scalar>(count: usize, rng: &mut TestRng) -> Check {
    let u = 2f64.powi(-(S::precision().mantissa_bits() as i32));
    for _ in 0..count {
        let n = rng.gen_range(2..=30);
        let a: Dense<S> = gen::tridiagonal(rng, n);
        let f = IluFactors::factorize(&csr(&a)).map_err(|e| e.to_string())?;
        let (l, up) = dense::lu_nopivot(&a).ok_or("dense LU hit a zero pivot")?;
        let mut dl = vec![vec![S::zero(); n]; n];
        let mut du = vec![vec![S::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                dl[i][j] = f.lower(i, j);
                du[i][j] = f.upper(i, j);
            }
        }
        let dev = dense::frobenius(&dense::sub(&dl, &l)).to_binary64() / dense::frobenius(&l).to_binary64()
            + dense::frobenius(&dense::sub(&du, &up)).to_binary64() / dense::frobenius(&up).to_binary64();
        let tol = 10.0 * n as f64 * u;
        if !(dev <= tol) {
            return Err(format!("{} n={n}: ILU(0) deviates from LU by {dev:e} > {tol:e}", S::precision()));
        }
    }
    Ok(())
}

/// On tridiagonal matrices ILU(0) has no fill to drop, so it must agree
/// with dense LU to within `10·n·2^(−mantissa bits)`.
pub fn ilu_matches_dense_lu(count: usize, seed: u64) -> Check {
    let mut rng = gen::rng(seed);
    ilu_vs_lu::<f64>(count, &mut rng)?;
    ilu_vs_lu::<Dd>(count, &mut rng)?;
    ilu_vs_lu::<Qd>(count, &mut rng)?;
    ilu_vs_lu::<ComplexDd>(count / 4 + 1, &mut rng)
}

/// ILU(0) factors occupy exactly the pattern of `A` and agree with a dense
/// reference implementation of the textbook KIJ loop.
pub fn ilu_zero_fill(count: usize, seed: u64) -> Check {
    let mut rng = gen::rng(seed);
    for _ in 0..count {
        let n = rng.gen_range(3..=25);
        let p = rng.gen_range(0.05..0.4);
        let a: Dense<f64> = gen::dominant(&mut rng, n, p);
        let mask = gen::mask_of(&a);
        let f = IluFactors::factorize(&csr(&a)).map_err(|e| e.to_string())?;
        let (l, u) = dense::ilu0_kij(&a, &mask);
        if f.pattern().nnz() != mask.iter().flatten().filter(|&&m| m).count() {
            return Err(format!("n={n}: factor pattern size differs from A"));
        }
        for i in 0..n {
            for j in 0..n {
                let (fl, fu) = (f.lower(i, j), f.upper(i, j));
                if !mask[i][j] && ((i != j && fl != 0.0) || fu != 0.0) {
                    return Err(format!("n={n}: fill-in at ({i},{j})"));
                }
                let scale = a[i][j].abs().max(1.0);
                if (fl - l[i][j]).abs() > 1e-13 * scale || (fu - u[i][j]).abs() > 1e-13 * scale {
                    return Err(format!(
                        "n={n}: ({i},{j}) L {fl:e} vs {:e}, U {fu:e} vs {:e}",
                        l[i][j], u[i][j]
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Exact `Σ a_ij x_j` and `Σ |a_ij x_j|` for one row.
fn exact_row<const N: usize>(row: &[MultiFloat<N>], x: &[MultiFloat<N>]) -> (BigRational, BigRational) {
    let mut s = BigRational::from_integer(0.into());
    let mut m = s.clone();
    for (v, xj) in row.iter().zip(x) {
        if *v != MultiFloat::ZERO {
            let t = value(*v) * value(*xj);
            m += t.abs();
            s += t;
        }
    }
    (s, m)
}

fn spmv_multi<const N: usize>(count: usize, rng: &mut TestRng) -> Check {
    let ulp = 2f64.powi(1 - 53 * N as i32);
    for _ in 0..count {
        let n = rng.gen_range(1..=30);
        let mask = gen::pattern(rng, n, 0.3);
        let a: Dense<MultiFloat<N>> = mask
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&m| if m { gen::multi(rng, -4..=4) } else { MultiFloat::ZERO })
                    .collect()
            })
            .collect();
        let x: Vec<MultiFloat<N>> = (0..n).map(|_| gen::multi(rng, -4..=4)).collect();
        let y = csr(&a).mul_vec(&x).unwrap();
        for i in 0..n {
            let (s, m) = exact_row(&a[i], &x);
            let err = to_f64(&(value(y[i]) - s).abs());
            let tol = 4.0 * ulp * to_f64(&m);
            if err > tol {
                return Err(format!("{N}-component SpMV row {i}: error {err:e} > 4 ulp ({tol:e})"));
            }
        }
    }
    Ok(())
}

/// CSR SpMV against a dense product: bitwise in binary64 (same summation
/// order), and within 4 ulps of the exact row sums in double- and
/// quad-double.
pub fn spmv_vs_dense(count: usize, seed: u64) -> Check {
    let mut rng = gen::rng(seed);
    for _ in 0..count {
        let n = rng.gen_range(1..=40);
        let a: Dense<f64> = gen::dominant(&mut rng, n, 0.3);
        let x: Vec<f64> = gen::vector(&mut rng, n);
        let y = csr(&a).mul_vec(&x).unwrap();
        let want = dense::matvec(&a, &x);
        if y.iter().zip(&want).any(|(u, v)| u.to_bits() != v.to_bits()) {
            return Err(format!("binary64 SpMV n={n} differs from dense product"));
        }
    }
    spmv_multi::<2>(count, &mut rng)?;
    spmv_multi::<4>(count, &mut rng)
}

fn adjoint_case<S: Scalar>(count: usize, rng: &mut TestRng) -> Check {
    let u = S::precision().unit_roundoff();
    for _ in 0..count {
        let n = rng.gen_range(1..=40);
        let a: Dense<S> = gen::dominant(rng, n, 0.3);
        let m = csr(&a);
        let x: Vec<S> = gen::vector(rng, n);
        let y: Vec<S> = gen::vector(rng, n);
        let mut ahx = vec![S::zero(); n];
        m.spmv_adjoint(&x, &mut ahx).unwrap();
        let ay = m.mul_vec(&y).unwrap();
        let lhs = hdot(&ahx, &y);
        let rhs = hdot(&x, &ay);
        let scale = dense::frobenius(&a).to_binary64() * norm2(&x).to_binary64() * norm2(&y).to_binary64();
        let diff = (lhs - rhs).abs_sqr().to_binary64().sqrt();
        let tol = 4.0 * n as f64 * u * scale;
        if diff > tol {
            return Err(format!("{} n={n}: |<A^H x, y> - <x, A y>| = {diff:e} > {tol:e}", S::precision()));
        }
    }
    Ok(())
}

/// `⟨Aᴴx, y⟩ = ⟨x, Ay⟩` within `4·n·u·‖A‖_F‖x‖‖y‖`.
pub fn adjoint_identity(count: usize, seed: u64) -> Check {
    let mut rng = gen::rng(seed);
    adjoint_case::<f64>(count, &mut rng)?;
    adjoint_case::<Dd>(count, &mut rng)?;
    adjoint_case::<ComplexDd>(count, &mut rng)?;
    adjoint_case::<ComplexQd>(count, &mut rng)
}

fn mixed_case<S: Scalar>(count: usize, rng: &mut TestRng) -> Check {
    for _ in 0..count {
        let n = rng.gen_range(1..=40);
        let low: Dense<S::Lowered> = gen::dominant(rng, n, 0.3);
        let low = csr(&low);
        let full: CsrMatrix<S> = low.promote();
        let x: Vec<S> = gen::vector(rng, n);
        let mut y1 = vec![S::zero(); n];
        let mut y2 = vec![S::zero(); n];
        low.spmv_mixed(&x, &mut y1).unwrap();
        full.spmv(&x, &mut y2).unwrap();
        if y1 != y2 {
            return Err(format!("{} n={n}: mixed SpMV differs from promoted SpMV", S::precision()));
        }
        low.spmv_adjoint_mixed(&x, &mut y1).unwrap();
        full.spmv_adjoint(&x, &mut y2).unwrap();
        if y1 != y2 {
            return Err(format!("{} n={n}: mixed adjoint SpMV differs", S::precision()));
        }
    }
    Ok(())
}

/// A binary64 matrix applied in a wider format equals, bit for bit, the
/// product with the exactly promoted matrix.
pub fn mixed_spmv_promoted(count: usize, seed: u64) -> Check {
    let mut rng = gen::rng(seed);
    mixed_case::<Dd>(count, &mut rng)?;
    mixed_case::<Td>(count, &mut rng)?;
    mixed_case::<Qd>(count, &mut rng)?;
    mixed_case::<ComplexDd>(count, &mut rng)
}

fn identity_case<S: Scalar>(count: usize, rng: &mut TestRng) -> Check {
    for _ in 0..count {
        let n = rng.gen_range(2..=30);
        let a = csr(&gen::dominant::<S>(rng, n, 0.25));
        let b: Vec<S> = gen::vector(rng, n);
        let stop = StopRule::for_dimension(n);
        for method in Method::ALL {
            let plain = method.run(&a, &b, None, &stop).map_err(|e| e.to_string())?;
            let ident = method.run(&a, &b, Some(&Identity), &stop).map_err(|e| e.to_string())?;
            if plain.iterations != ident.iterations || plain.x != ident.x || plain.converged != ident.converged {
                return Err(format!(
                    "{method} {} n={n}: identity-preconditioned run differs from the plain run",
                    S::precision()
                ));
            }
        }
    }
    Ok(())
}

/// For every method the unpreconditioned routine and the preconditioned
/// routine with `M = I` produce identical iterates.
pub fn identity_precond_bitwise(count: usize, seed: u64) -> Check {
    let mut rng = gen::rng(seed);
    identity_case::<Dd>(count, &mut rng)?;
    identity_case::<ComplexDd>(count / 4 + 1, &mut rng)
}

/// Every method solves `count` random diagonally dominant systems
/// (`n ≤ 40`) in quad-double to `‖x − x*‖/‖x*‖ ≤ 10⁻²⁰`, where `x*` is the
/// dense LU solution.
pub fn random_systems_qd(count: usize, seed: u64) -> Check {
    let mut rng = gen::rng(seed);
    for case in 0..count {
        let n = rng.gen_range(1..=40);
        let a: Dense<Qd> = gen::dominant(&mut rng, n, 0.2);
        let b: Vec<Qd> = gen::vector(&mut rng, n);
        let xs = dense::lu_solve(&a, &b).ok_or("dense LU failed")?;
        let m = csr(&a);
        let stop = StopRule {
            eps_rel: 1e-40,
            eps_abs: 1e-100,
            max_iter: 10 * n + 10,
        };
        for method in Method::ALL {
            let out = method.run(&m, &b, None, &stop).map_err(|e| e.to_string())?;
            let e: Vec<Qd> = out.x.iter().zip(&xs).map(|(&u, &v)| u - v).collect();
            let rel = (norm2(&e) / norm2(&xs)).to_binary64();
            if !(rel <= 1e-20) {
                return Err(format!(
                    "case {case}: {method} n={n} error {rel:e} (iterations {}, breakdown {:?})",
                    out.iterations, out.breakdown
                ));
            }
        }
    }
    Ok(())
}

//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Criteria 1-6 need `mcfe.mtx` and `dwg961b.mtx` in `$MPKRYLOV_FIXTURES`
//! or `<workspace>/fixtures/`; without them they report FAIL with the
//! reason. Only the fixture-free criterion 7 decides the exit status,
//! unless `MPKRYLOV_STRICT=1` is set, in which case any FAIL does.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use mpkrylov::krylov::{Method, SpmvMode};
use mpkrylov::precond::PrecondMode;
use mpkrylov::PrecisionKind;
use mpkrylov_bench::{default_grid, run_benchmark, BenchRow, MatrixSource, Suite};
use mpkrylov_testkit::suite;

const LADDER: [PrecisionKind; 3] = [PrecisionKind::Dd, PrecisionKind::Td, PrecisionKind::Qd];

struct Verdict {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn fixture_dir() -> PathBuf {
    match std::env::var_os("MPKRYLOV_FIXTURES") {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
    }
}

/// Runs the full default grid on one fixture, or explains why not.
fn grid(name: &str) -> Result<(usize, Vec<BenchRow>), String> {
    let path = fixture_dir().join(format!("{name}.mtx"));
    if !path.is_file() {
        return Err(format!("fixture {} not found", path.display()));
    }
    let src = MatrixSource::load(&path).map_err(|e| e.to_string())?;
    let n = src.n();
    let suite = Suite {
        matrices: vec![src],
        configs: default_grid(&Method::ALL, &LADDER),
        max_iter_factor: 3,
    };
    let start = Instant::now();
    let rows = run_benchmark(&suite);
    eprintln!("  ran {} cells on {name} (n={n}) in {:.1} s", rows.len(), start.elapsed().as_secs_f64());
    Ok((n, rows))
}

fn find<'a>(
    rows: &'a [BenchRow],
    m: Method,
    p: PrecisionKind,
    c: PrecondMode,
    s: SpmvMode,
) -> Option<&'a BenchRow> {
    rows.iter().find(|r| {
        r.method == m.label() && r.precision == p.label() && r.precond == c.label() && r.spmv_mode == s.label()
    })
}

fn fail_all(ids: &[(u32, &'static str)], why: &str) -> Vec<Verdict> {
    ids.iter()
        .map(|&(id, title)| Verdict {
            id,
            title,
            pass: false,
            detail: why.to_string(),
        })
        .collect()
}

type Grid = Result<(usize, Vec<BenchRow>), String>;

fn criterion1(mcfe: &Grid, dwg: &Grid) -> Verdict {
    let title = "unpreconditioned runs hit the 3n cap";
    let mut bad = Vec::new();
    for (name, g) in [("mcfe", mcfe), ("dwg961b", dwg)] {
        let (n, rows) = match g {
            Ok(v) => v,
            Err(e) => {
                bad.push(e.clone());
                continue;
            }
        };
        for p in LADDER {
            for m in Method::ALL {
                match find(rows, m, p, PrecondMode::None, SpmvMode::Full) {
                    Some(r) if r.iterations == 3 * n && !r.converged => {}
                    Some(r) => bad.push(format!(
                        "{name} {m} {p}: {} iterations, converged={}",
                        r.iterations, r.converged
                    )),
                    None => bad.push(format!("{name} {m} {p}: missing")),
                }
            }
        }
    }
    Verdict {
        id: 1,
        title,
        pass: bad.is_empty(),
        detail: if bad.is_empty() { "all 24 runs capped".into() } else { bad.join("; ") },
    }
}

fn mcfe_criteria(g: &Grid) -> Vec<Verdict> {
    let t2 = "mcfe ILU(0) iteration counts";
    let t3 = "mcfe mixed paths match full paths";
    let (_, rows) = match g {
        Ok(v) => v,
        Err(e) => return fail_all(&[(2, t2), (3, t3)], e),
    };
    let target = [(Method::BiCg, 13), (Method::Cgs, 9), (Method::BiCgStab, 9), (Method::GpBiCg, 8)];
    let mut bad2 = Vec::new();
    let mut seen = Vec::new();
    for (m, want) in target {
        for p in LADDER {
            match find(rows, m, p, PrecondMode::Ilu0, SpmvMode::Full) {
                Some(r) => {
                    seen.push(format!("{m}/{p}={}", r.iterations));
                    if !(r.converged && r.iterations.abs_diff(want) <= 5 && r.true_relres <= 1e-10) {
                        bad2.push(format!(
                            "{m} {p}: {} iterations (want {want}±5), converged={}, relres {:e}",
                            r.iterations, r.converged, r.true_relres
                        ));
                    }
                }
                None => bad2.push(format!("{m} {p}: missing")),
            }
        }
    }
    let mut bad3 = Vec::new();
    for m in Method::ALL {
        for p in LADDER {
            let plain = find(rows, m, p, PrecondMode::None, SpmvMode::Full);
            let plain_d = find(rows, m, p, PrecondMode::None, SpmvMode::Mixed);
            let ilu = find(rows, m, p, PrecondMode::Ilu0, SpmvMode::Full);
            let ilu_d = find(rows, m, p, PrecondMode::Ilu0Mixed, SpmvMode::Mixed);
            match (plain, plain_d, ilu, ilu_d) {
                (Some(a), Some(b), Some(c), Some(d)) => {
                    if a.iterations != b.iterations {
                        bad3.push(format!("{m} {p}: mixed SpMV {} vs {}", b.iterations, a.iterations));
                    }
                    if c.iterations.abs_diff(d.iterations) > 2 {
                        bad3.push(format!("{m} {p}: mixed ILU(0) {} vs {}", d.iterations, c.iterations));
                    }
                }
                _ => bad3.push(format!("{m} {p}: missing rows")),
            }
        }
    }
    vec![
        Verdict {
            id: 2,
            title: t2,
            pass: bad2.is_empty(),
            detail: if bad2.is_empty() { seen.join(" ") } else { bad2.join("; ") },
        },
        Verdict {
            id: 3,
            title: t3,
            pass: bad3.is_empty(),
            detail: if bad3.is_empty() { "all 12 method/precision pairs agree".into() } else { bad3.join("; ") },
        },
    ]
}

fn dwg_criteria(g: &Grid) -> Vec<Verdict> {
    let t4 = "dwg961b BiCG+ILU(0) precision trend";
    let t5 = "dwg961b mixed ILU(0) per-iteration speedup >= 1.5";
    let t6 = "dwg961b DD ILU(0) per-iteration cost >= 50x plain";
    let (_, rows) = match g {
        Ok(v) => v,
        Err(e) => return fail_all(&[(4, t4), (5, t5), (6, t6)], e),
    };
    let bicg = |p, c, s| find(rows, Method::BiCg, p, c, s);

    let mut bad4 = Vec::new();
    let mut iters = Vec::new();
    for (p, want) in LADDER.iter().zip([758.0, 516.0, 442.0]) {
        match bicg(*p, PrecondMode::Ilu0, SpmvMode::Full) {
            Some(r) => {
                iters.push(r.iterations);
                let rel = (r.iterations as f64 - want).abs() / want;
                if !r.converged || rel > 0.2 {
                    bad4.push(format!(
                        "{p}: {} iterations (want {want}±20%), converged={}",
                        r.iterations, r.converged
                    ));
                }
            }
            None => bad4.push(format!("{p}: missing")),
        }
        if let Some(r) = bicg(*p, PrecondMode::None, SpmvMode::Full) {
            if r.converged {
                bad4.push(format!("{p}: unpreconditioned run converged"));
            }
        }
    }
    if iters.len() == 3 && !(iters[2] <= iters[1] && iters[1] <= iters[0]) {
        bad4.push(format!("not monotone: DD {} TD {} QD {}", iters[0], iters[1], iters[2]));
    }

    let mut bad5 = Vec::new();
    let mut ratios5 = Vec::new();
    for p in LADDER {
        match (
            bicg(p, PrecondMode::Ilu0, SpmvMode::Full),
            bicg(p, PrecondMode::Ilu0Mixed, SpmvMode::Mixed),
        ) {
            (Some(a), Some(b)) => {
                let r = a.ms_per_iter / b.ms_per_iter;
                ratios5.push(format!("{p} {r:.2}"));
                if !(r >= 1.5) {
                    bad5.push(format!("{p}: ratio {r:.2}"));
                }
            }
            _ => bad5.push(format!("{p}: missing rows")),
        }
    }

    let (pass6, detail6) = match (
        bicg(PrecisionKind::Dd, PrecondMode::Ilu0, SpmvMode::Full),
        bicg(PrecisionKind::Dd, PrecondMode::None, SpmvMode::Full),
    ) {
        (Some(a), Some(b)) => {
            let r = a.ms_per_iter / b.ms_per_iter;
            (
                r >= 50.0,
                format!("{:.3} ms vs {:.3} ms per iteration, ratio {r:.1}", a.ms_per_iter, b.ms_per_iter),
            )
        }
        _ => (false, "missing rows".into()),
    };

    vec![
        Verdict {
            id: 4,
            title: t4,
            pass: bad4.is_empty(),
            detail: if bad4.is_empty() { format!("iterations DD/TD/QD = {iters:?}") } else { bad4.join("; ") },
        },
        Verdict {
            id: 5,
            title: t5,
            pass: bad5.is_empty(),
            detail: if bad5.is_empty() { ratios5.join(", ") } else { bad5.join("; ") },
        },
        Verdict {
            id: 6,
            title: t6,
            pass: pass6,
            detail: detail6,
        },
    ]
}

fn criterion7() -> Verdict {
    let start = Instant::now();
    let checks: [(&str, fn() -> suite::Check); 9] = [
        ("EFT identities, 1e6 pairs", || suite::eft_identities(1_000_000, 1)),
        ("DD/TD/QD error bounds, 1e4 samples", || suite::multifloat_bounds(10_000, 2)),
        ("ILU(0) = LU on 100 tridiagonals", || suite::ilu_matches_dense_lu(100, 3)),
        ("zero fill on 100 sparse matrices", || suite::ilu_zero_fill(100, 4)),
        ("SpMV vs dense oracle", || suite::spmv_vs_dense(100, 5)),
        ("adjoint identity", || suite::adjoint_identity(100, 6)),
        ("mixed SpMV = promoted SpMV", || suite::mixed_spmv_promoted(100, 7)),
        ("identity preconditioner = plain", || suite::identity_precond_bitwise(40, 8)),
        ("100 random QD systems to 1e-20", || suite::random_systems_qd(100, 9)),
    ];
    let mut failures = Vec::new();
    for (name, f) in checks {
        let t = Instant::now();
        let r = f();
        eprintln!("  {name}: {} ({:.1} s)", if r.is_ok() { "ok" } else { "FAILED" }, t.elapsed().as_secs_f64());
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        failures.push(format!("took {secs:.1} s (limit 60 s)"));
    }
    Verdict {
        id: 7,
        title: "fixture-free property suite under 60 s",
        pass: failures.is_empty(),
        detail: if failures.is_empty() { format!("9 checks in {secs:.1} s") } else { failures.join("; ") },
    }
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--quiet`; only a name
    // filter that excludes this target skips it.
    if let Some(filter) = std::env::args().skip(1).find(|a| !a.starts_with('-')) {
        if !"acceptance".contains(filter.as_str()) {
            return ExitCode::SUCCESS;
        }
    }
    let strict = std::env::var("MPKRYLOV_STRICT").is_ok_and(|v| v == "1");
    eprintln!("fixtures: {}", fixture_dir().display());
    let mcfe = grid("mcfe");
    let dwg = grid("dwg961b");

    let mut verdicts = vec![criterion1(&mcfe, &dwg)];
    verdicts.extend(mcfe_criteria(&mcfe));
    verdicts.extend(dwg_criteria(&dwg));
    verdicts.push(criterion7());

    println!();
    for v in &verdicts {
        println!(
            "criterion {} {}: {} ({})",
            v.id,
            if v.pass { "PASS" } else { "FAIL" },
            v.title,
            v.detail
        );
    }
    println!("criterion 8 N/A: absolute timings, 256-bit MPFR/MPC rows and 32-thread rows are not reproduced");

    let required_ok = verdicts.iter().all(|v| v.pass || (!strict && v.id != 7));
    if required_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

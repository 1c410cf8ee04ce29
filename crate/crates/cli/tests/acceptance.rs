//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use noma_eh::model::{
    check_feasible, dbm_to_watts, decode_denominator, harvested_energy, q_function, shannon_rate,
};
use noma_eh::oracle::brute_force_p0;
use noma_eh::region::{r1_max, solve};
use noma_eh::solver_constant::{
    generalized_boundary, generalized_r1_max, ps_boundary, ps_feasible, ps_r1_max, ts_boundary,
    ts_r1_max, ConstantProblem, Status, DEFAULT_EPS,
};
use noma_eh::solver_dynamic::{exhaustive_search_with, suboptimal_search_with};
use noma_eh::{
    BoundaryResult, DynamicModel, GridSpec, PowerModel, Scheme, SolverOptions, SplitMode,
    SystemParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P_MAX: f64 = 40.0;
const NOISE_DBM: f64 = -104.0;
const XI: f64 = 0.5;
const P_SIC: f64 = 0.08;
const OMEGA: f64 = 0.044;
const P_R: f64 = 0.03;
const BANDWIDTH_MHZ: f64 = 10.0;

/// Largest accepted solver/reference gap, bits/s/Hz.
const GRID_TOL: f64 = 0.05;

type Verdict = Result<String, String>;

type Criterion = (&'static str, &'static str, fn() -> Verdict);

fn params(d1: f64, d2: f64) -> SystemParams {
    SystemParams::from_distances(d1, d2, dbm_to_watts(NOISE_DBM), P_MAX, XI).unwrap()
}

fn reference() -> SystemParams {
    params(0.5, 10.0)
}

fn close_users() -> SystemParams {
    params(0.5, 1.2)
}

fn distant_near_user() -> SystemParams {
    params(0.75, 10.0)
}

fn dynamic() -> DynamicModel {
    DynamicModel::new(OMEGA, P_R).unwrap()
}

fn within_time(elapsed: Duration, limit_s: f64, detail: String) -> Verdict {
    if elapsed.as_secs_f64() <= limit_s {
        Ok(format!("{detail}, {:.2} s", elapsed.as_secs_f64()))
    } else {
        Err(format!(
            "{detail}, took {:.2} s > {limit_s} s",
            elapsed.as_secs_f64()
        ))
    }
}

fn ac1() -> Verdict {
    let start = Instant::now();
    let p = reference();
    let model = PowerModel::constant(P_SIC).unwrap();
    let opts = SolverOptions::default();
    let mut worst = Vec::new();
    for scheme in [Scheme::Ts, Scheme::Ps, Scheme::Gen] {
        let r_max = r1_max(scheme, &p, &model, &opts).ok_or(format!("{scheme} infeasible"))?;
        let mut gap: f64 = 0.0;
        for i in 0..20 {
            let r = r_max * i as f64 / 20.0;
            let ours = solve(r, scheme, &p, &model, &opts);
            let oracle = brute_force_p0(r, &p, &model, &opts.grid, scheme.split_mode().unwrap())
                .map_err(|e| format!("{scheme} oracle at r = {r}: {e}"))?;
            if !ours.is_optimal() {
                return Err(format!("{scheme} solver infeasible at r = {r}"));
            }
            gap = gap.max((ours.r2_star - oracle.r2_best).abs());
        }
        if gap > GRID_TOL {
            return Err(format!("{scheme} worst gap {gap:.4} > {GRID_TOL}"));
        }
        worst.push(format!("{scheme} {gap:.4}"));
    }
    within_time(
        start.elapsed(),
        60.0,
        format!("worst gaps {}", worst.join(", ")),
    )
}

fn ac2() -> Verdict {
    let mut checked = 0;
    for (name, p) in [
        ("reference", reference()),
        ("close users", close_users()),
        ("distant UE 1", distant_near_user()),
    ] {
        let gen_max = generalized_r1_max(&p, P_SIC, DEFAULT_EPS).map_err(|e| e.to_string())?;
        for i in 0..50 {
            let r = gen_max * i as f64 / 49.0;
            let gen = generalized_boundary(r, &p, P_SIC, DEFAULT_EPS);
            if !gen.is_optimal() {
                return Err(format!("{name}: generalized infeasible at r = {r}"));
            }
            for (scheme, other) in [
                ("ts", ts_boundary(r, &p, P_SIC)),
                ("ps", ps_boundary(r, &p, P_SIC)),
            ] {
                if other.is_optimal() && gen.r2_star < other.r2_star - 1e-9 {
                    return Err(format!(
                        "{name}: gen {} < {scheme} {} at r = {r}",
                        gen.r2_star, other.r2_star
                    ));
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} rates over three parameter sets"))
}

fn ac3() -> Verdict {
    let p = reference();
    let harvest = XI * p.h1_sq * P_MAX;
    let direct = harvest / (harvest + P_SIC) * (1.0 + p.h1_sq * P_MAX / p.sigma2).log2();
    let cutoff = ts_r1_max(&p, P_SIC);
    let rel = (cutoff - direct).abs() / direct;
    if rel > 1e-12 {
        return Err(format!("cutoff {cutoff} vs direct {direct}, rel {rel:e}"));
    }
    let ratio = cutoff / p.r1_cap();
    if (ratio - 0.5267).abs() > 5e-4 {
        return Err(format!("cutoff ratio {ratio:.5}, expected about 0.5267"));
    }
    let mbps = cutoff * BANDWIDTH_MHZ;
    if (mbps - 221.0).abs() > 1.0 {
        return Err(format!("cutoff {mbps:.2} Mbps, expected about 221"));
    }
    if !ts_boundary(cutoff, &p, P_SIC).is_optimal()
        || ts_boundary(cutoff * (1.0 + 1e-9), &p, P_SIC).status != Status::InfeasibleR1
    {
        return Err("time switching does not switch off at the cutoff".into());
    }
    Ok(format!(
        "cutoff {cutoff:.6} bits/s/Hz = {ratio:.5} of log2(1+S), {mbps:.2} Mbps, rel {rel:.1e}"
    ))
}

fn ac4() -> Verdict {
    let far = distant_near_user();
    if XI * far.h1_sq * P_MAX >= P_SIC || ps_feasible(&far, P_SIC) {
        return Err("d1 = 0.75 m should fail the harvesting gate".into());
    }
    for r in [1e-12, 1e-6, 0.1, 1.0, 5.0, 20.0, 40.0] {
        let res = ps_boundary(r, &far, P_SIC);
        if res.status != Status::SchemeInfeasible {
            return Err(format!("d1 = 0.75 m: status {:?} at r = {r}", res.status));
        }
    }
    let near = reference();
    if !ps_feasible(&near, P_SIC) {
        return Err("d1 = 0.5 m should pass the harvesting gate".into());
    }
    let r_max = ps_r1_max(&near, P_SIC).unwrap();
    for i in 1..=10 {
        let r = r_max * i as f64 / 10.0;
        if !ps_boundary(r, &near, P_SIC).is_optimal() {
            return Err(format!("d1 = 0.5 m: infeasible at r = {r}"));
        }
    }
    Ok(format!(
        "harvest {:.2} mW at 0.75 m, {:.2} mW at 0.5 m",
        XI * far.h1_sq * P_MAX * 1e3,
        XI * near.h1_sq * P_MAX * 1e3
    ))
}

fn ac5() -> Verdict {
    let p = close_users();
    let r_max = ps_r1_max(&p, P_SIC).ok_or("power splitting infeasible")?;
    let n = 50;
    let rates: Vec<f64> = (0..=n).map(|i| r_max * i as f64 / n as f64).collect();
    let r2: Vec<f64> = rates
        .iter()
        .map(|&r| ps_boundary(r, &p, P_SIC))
        .map(|res| {
            res.is_optimal()
                .then_some(res.r2_star)
                .ok_or("infeasible sample")
        })
        .collect::<Result<_, _>>()?;
    let worst = rates
        .windows(2)
        .zip(r2.windows(2))
        .map(|(r, v)| ((v[1] - v[0]) / (r[1] - r[0]) + 1.0).abs())
        .fold(0.0, f64::max);
    if worst > 1e-9 {
        return Err(format!("slope deviates from -1 by {worst:e}"));
    }
    Ok(format!("{n} segments, worst slope deviation {worst:.1e}"))
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-12)
}

fn max_second_difference(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    (1..n)
        .map(|k| {
            let t = lo + k as f64 * h;
            f(t - h) - 2.0 * f(t) + f(t + h)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn tightness(p: &SystemParams, p_sic: f64, r: f64, res: &BoundaryResult) -> Result<(), String> {
    let a = res.alloc.ok_or("no allocation")?;
    let model = PowerModel::constant(p_sic).unwrap();
    let report = check_feasible(p, &model, &a, 1e-9 * p.p_max);
    if !report.is_feasible() {
        return Err(format!("violations {:?}", report.violations));
    }
    let g1 = p.h1_sq * (1.0 - a.rho);
    let checks = [
        ("first sub-slot power", a.p2_1, p.p_max),
        ("second sub-slot power", a.p1_2 + a.p2_2, p.p_max),
        ("UE 1 rate", a.r1_2, shannon_rate(g1, a.p1_2, 0.0, p.sigma2)),
        ("energy", harvested_energy(p, &a), (1.0 - a.t) * p_sic),
        ("R1", a.r1() + 1.0, r + 1.0),
        ("R2", a.r2() + 1.0, res.r2_star + 1.0),
    ];
    for (what, x, y) in checks {
        if !rel_close(x, y, 1e-7) {
            return Err(format!("{what}: {x} vs {y}"));
        }
    }
    Ok(())
}

fn ac6() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6163_6365);
    let draws = 200;
    for k in 0..draws {
        let d1 = rng.gen_range(0.3..0.8);
        let d2 = rng.gen_range(1.0..15.0);
        let n_dbm = rng.gen_range(-110.0..-95.0);
        let p_max = rng.gen_range(5.0..60.0);
        let xi = rng.gen_range(0.2..1.0);
        let p_sic = rng.gen_range(0.005..0.15);
        let frac: f64 = rng.gen_range(0.0..1.0);
        let p = SystemParams::from_distances(d1, d2, dbm_to_watts(n_dbm), p_max, xi).unwrap();
        let prob = ConstantProblem::new(&p, p_sic).unwrap();
        let fail = |what: String| format!("draw {k}: {what}");

        let r = frac * p.r1_cap();
        let mut prev = prob.f0(0.0, r).unwrap();
        for i in 1..200 {
            let v = prob.f0(0.99 * i as f64 / 200.0, r).unwrap();
            let ok = if prev.is_finite() {
                v <= prev + 1e-12 * prev.abs().max(1.0)
            } else {
                v == f64::NEG_INFINITY
            };
            if !ok {
                return Err(fail(format!("f0 rises from {prev} to {v}")));
            }
            prev = v;
        }

        let split = if prob.zeta() > 1.0 {
            1.0 - 1.0 / prob.zeta() + 1e-9
        } else {
            0.0
        };
        let hi = split + 0.95 * (1.0 - split);
        let gen_max = generalized_r1_max(&p, p_sic, DEFAULT_EPS).map_err(|e| e.to_string())?;
        let r = frac * gen_max;
        let d2 = max_second_difference(|t| prob.f2(t).unwrap(), split, hi, 300);
        let d3 = max_second_difference(|t| prob.f3(t, r).unwrap(), split, hi, 300);
        let lo1 = split.max(prob.t_lower()).max(0.0);
        let d1 = if prob.t_upper() > lo1 + 1e-6 {
            max_second_difference(|t| prob.f1(t, r).unwrap(), lo1, prob.t_upper(), 300)
        } else {
            f64::NEG_INFINITY
        };
        if d1.max(d2).max(d3) > 1e-9 {
            return Err(fail(format!(
                "second differences f1 {d1:e}, f2 {d2:e}, f3 {d3:e}"
            )));
        }

        let gen = generalized_boundary(r, &p, p_sic, DEFAULT_EPS);
        tightness(&p, p_sic, r, &gen).map_err(|e| fail(format!("gen: {e}")))?;
        let r_ts = frac * ts_r1_max(&p, p_sic);
        tightness(&p, p_sic, r_ts, &ts_boundary(r_ts, &p, p_sic))
            .map_err(|e| fail(format!("ts: {e}")))?;
        if let Some(m) = ps_r1_max(&p, p_sic) {
            let r_ps = frac * m;
            tightness(&p, p_sic, r_ps, &ps_boundary(r_ps, &p, p_sic))
                .map_err(|e| fail(format!("ps: {e}")))?;
        }
    }
    within_time(start.elapsed(), 30.0, format!("{draws} draws"))
}

fn ac7_match(grid: GridSpec, limit_s: f64) -> Verdict {
    let start = Instant::now();
    let p = reference();
    let dm = dynamic();
    let model = PowerModel::Dynamic(dm);
    let opts = SolverOptions {
        grid,
        ..Default::default()
    };
    let r_max = r1_max(Scheme::Gen, &p, &model, &opts).ok_or("generalized infeasible")?;
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let r = r_max * i as f64 / 20.0;
        let sub = suboptimal_search_with(r, &p, &dm, &grid, SplitMode::Generalized);
        let ex = exhaustive_search_with(r, &p, &dm, &grid, SplitMode::Generalized);
        if !(sub.is_optimal() && ex.is_optimal()) {
            return Err(format!(
                "r = {r}: suboptimal {:?}, exhaustive {:?}",
                sub.status, ex.status
            ));
        }
        worst = worst.max((sub.r2_star - ex.r2_star).abs());
    }
    if worst > GRID_TOL {
        return Err(format!("worst gap {worst:.4} > {GRID_TOL}"));
    }
    within_time(
        start.elapsed(),
        limit_s,
        format!("20 rates, worst gap {worst:.2e}"),
    )
}

fn ac7_split() -> Verdict {
    let start = Instant::now();
    let p = distant_near_user();
    let dm = dynamic();
    let grid = GridSpec::default().scaled(4.0);
    let mut split = Vec::new();
    for r in (1..=40).map(|k| k as f64) {
        let ex = exhaustive_search_with(r, &p, &dm, &grid, SplitMode::PowerSplitting);
        let sub = suboptimal_search_with(r, &p, &dm, &grid, SplitMode::PowerSplitting);
        if sub.is_optimal() && !ex.is_optimal() {
            return Err(format!(
                "suboptimal feasible where exhaustive is not, r = {r}"
            ));
        }
        if ex.is_optimal() && !sub.is_optimal() {
            split.push(r);
        }
    }
    let (Some(lo), Some(hi)) = (split.first(), split.last()) else {
        return Err("no rate where only the exhaustive search is feasible".into());
    };
    within_time(
        start.elapsed(),
        30.0,
        format!(
            "{} rates in [{lo}, {hi}] bits/s/Hz feasible only for exhaustive ({:.0}-{:.0} Mbps)",
            split.len(),
            lo * BANDWIDTH_MHZ,
            hi * BANDWIDTH_MHZ
        ),
    )
}

fn ac8() -> Verdict {
    let p = reference();
    let dm = dynamic();
    let grid = GridSpec::default();
    let r_const = generalized_r1_max(&p, P_SIC, DEFAULT_EPS).map_err(|e| e.to_string())?;
    let mut margin = f64::INFINITY;
    for i in 0..10 {
        let r = r_const * i as f64 / 10.0;
        let c = generalized_boundary(r, &p, P_SIC, DEFAULT_EPS);
        let d = exhaustive_search_with(r, &p, &dm, &grid, SplitMode::Generalized);
        if !d.is_optimal() {
            return Err(format!("dynamic infeasible at r = {r}"));
        }
        let m = d.r2_star - c.r2_star;
        if m < -GRID_TOL {
            return Err(format!("constant beats dynamic by {:.4} at r = {r}", -m));
        }
        margin = margin.min(m);
    }
    Ok(format!("10 rates, smallest margin {margin:.4} bits/s/Hz"))
}

/// Composite Simpson estimate of the Gaussian tail beyond `x`.
fn q_quadrature(x: f64) -> f64 {
    let (a, b, n) = (x, x + 40.0, 400_000);
    let h = (b - a) / n as f64;
    let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let inner: f64 = (1..n)
        .map(|k| phi(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (phi(a) + inner + phi(b)) * h / 3.0
}

fn ac9() -> Verdict {
    let mut worst_q: f64 = 0.0;
    let mut worst_d: f64 = 0.0;
    for k in 0..=80 {
        let x = 0.1 * k as f64;
        let q = q_quadrature(x);
        worst_q = worst_q.max((q_function(x) - q).abs());
        let d = if x == 0.0 {
            0.0
        } else {
            (-(2.0 * q).log2()).sqrt()
        };
        worst_d = worst_d.max((decode_denominator(x * x) - d).abs());
    }
    if worst_q.max(worst_d) > 1e-10 {
        return Err(format!(
            "Q error {worst_q:e}, denominator error {worst_d:e}"
        ));
    }
    Ok(format!(
        "81 points, Q error {worst_q:.1e}, denominator error {worst_d:.1e}"
    ))
}

fn ac10() -> Verdict {
    let dir = std::env::temp_dir().join(format!("noma-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("config.json");
    fs::write(
        &cfg,
        r#"{"d1_m": 0.5, "d2_m": 10, "dt": 0.004, "drho": 0.004, "dp_db": 0.4}"#,
    )
    .map_err(|e| e.to_string())?;
    let runs = [
        ("gen", "const", "csv", "60"),
        ("ps", "dyn", "json", "20"),
        ("tdma", "const", "csv", "30"),
    ];
    for (scheme, model, format, points) in runs {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let out = dir.join(format!("{scheme}-{model}-{k}.{format}"));
            let status = Command::new(env!("CARGO_BIN_EXE_noma-region"))
                .args([
                    "region", "--scheme", scheme, "--model", model, "--format", format,
                ])
                .args(["--points", points])
                .arg("--config")
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{scheme}/{model} exited with {status}"));
            }
            outputs.push(fs::read(&out).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!(
                "{scheme}/{model} {format} output differs between runs"
            ));
        }
    }
    let _ = fs::remove_dir_all(&dir);
    Ok("3 configurations byte-identical across two runs".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("AC1", "closed forms agree with brute force", ac1),
        ("AC2", "generalized region contains TS and PS", ac2),
        ("AC3", "time-switching cutoff", ac3),
        ("AC4", "power-splitting harvesting gate", ac4),
        ("AC5", "linear power-splitting trade-off", ac5),
        ("AC6", "randomized property suite", ac6),
        ("AC7a", "suboptimal equals exhaustive, coarse grid", || {
            ac7_match(GridSpec::default().scaled(4.0), 30.0)
        }),
        ("AC7b", "suboptimal equals exhaustive, fine grid", || {
            ac7_match(GridSpec::default(), 600.0)
        }),
        (
            "AC7c",
            "exhaustive reaches rates suboptimal cannot",
            ac7_split,
        ),
        ("AC8", "dynamic region dominates constant", ac8),
        ("AC9", "Gaussian tail against quadrature", ac9),
    ];
    let mut failed = 0;
    let mut report = |id: &str, name: &str, verdict: Verdict| match verdict {
        Ok(detail) => println!("PASS {id} {name}: {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL {id} {name}: {detail}");
        }
    };
    for (id, name, check) in criteria {
        report(id, name, check());
    }
    report("AC10", "region output is deterministic", ac10());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

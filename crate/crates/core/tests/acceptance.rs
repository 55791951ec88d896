//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use chaos_edge::boundary::{locate_boundary, BoundaryConfig, ParameterPath, PositiveSide, ZeroSide};
use chaos_edge::entropy::{entropy_lap, entropy_markov, positive_entropy_witness, MarkovConfig};
use chaos_edge::maps::{IntervalMap, PolynomialTypeB, QuadraticFamily, QuadraticMap, SharedMap, StuntedSawtooth};
use chaos_edge::rational::{self, int, ratio, Rational};
use chaos_edge::renorm::{cascade_trace, feigenbaum_delta, find_restrictive, renormalize, superstable_parameter};
use chaos_edge::symbolic::{
    itinerary_float, kneading_float, kneading_stunted, psi, shape_float, shape_stunted, DEFAULT_PSI_DEPTH,
    DEFAULT_PSI_TOLERANCE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn full_tent() -> StuntedSawtooth {
    StuntedSawtooth::from_parts(1, 1, vec![ratio(3, 2)]).unwrap()
}

/// Spectral radius of a non-negative matrix by plain power iteration.
fn spectral_radius(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut v = vec![1.0; n];
    let mut rho = 0.0;
    for _ in 0..200 {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * v[j]).sum()).collect();
        let norm = w.iter().cloned().fold(0.0, f64::max);
        rho = norm / v.iter().cloned().fold(0.0, f64::max);
        v = w.iter().map(|x| x / norm).collect();
    }
    rho
}

fn c1_constant_slope_entropy() -> Outcome {
    let start = Instant::now();
    let oracle = spectral_radius(&[vec![1.0, 1.0], vec![1.0, 1.0]]).ln();
    let t = full_tent();
    let lap = entropy_lap(&t, 30).map_err(|e| e.to_string())?.value;
    let markov = entropy_markov(&t, MarkovConfig::default()).map_err(|e| e.to_string())?.value;
    within(Duration::from_secs(1), start)?;
    check((lap - oracle).abs() <= 1e-3, || format!("lap {lap} vs {oracle}"))?;
    check((markov - oracle).abs() <= 1e-10, || format!("markov {markov} vs {oracle}"))?;
    Ok(format!("lap {lap:.6}, markov {markov:.12}, oracle {oracle:.12}"))
}

fn half_e(m: usize) -> Rational {
    let lambda = (m + 2) as i64;
    ratio(m as i64 * lambda, lambda - 1)
}

/// Random non-negative ξ with small denominators, so partitions stay finite.
fn random_xi(rng: &mut ChaCha8Rng, m: usize) -> Vec<Rational> {
    let e = half_e(m);
    (0..m)
        .map(|_| {
            let d = [1i64, 2, 3, 4, 5, 6, 7, 8, 12, 16, 24][rng.gen_range(0..11)];
            let top = (rational::to_f64(&e) * d as f64).floor() as i64;
            ratio(rng.gen_range(0..=top), d)
        })
        .collect()
}

fn markov(t: &StuntedSawtooth) -> Option<f64> {
    entropy_markov(t, MarkovConfig::default()).ok().map(|e| e.value)
}

fn c2_monotonicity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut pairs, mut skipped) = (0, 0);
    while pairs < 200 {
        let m = rng.gen_range(1..=3);
        let e = half_e(m);
        let xi = random_xi(&mut rng, m);
        let bump = random_xi(&mut rng, m);
        let xi2: Vec<Rational> = xi.iter().zip(&bump).map(|(a, b)| (a + b).min(e.clone())).collect();
        let (a, b) = (StuntedSawtooth::from_parts(m, 1, xi.clone()), StuntedSawtooth::from_parts(m, 1, xi2.clone()));
        let (Ok(a), Ok(b)) = (a, b) else { return Err("random ξ rejected by the constructor".into()) };
        let (Some(ha), Some(hb)) = (markov(&a), markov(&b)) else {
            skipped += 1;
            continue;
        };
        check(ha <= hb + 1e-9, || {
            let f = |v: &[Rational]| v.iter().map(rational::format).collect::<Vec<_>>().join(",");
            format!("h({}) = {ha} > h({}) = {hb}", f(&xi), f(&xi2))
        })?;
        pairs += 1;
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("200 pairs monotone ({skipped} non-Markov pairs skipped)"))
}

fn c3_entropy_period_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut maps, mut positive, mut skipped) = (0, 0, 0);
    while maps < 100 {
        let m = rng.gen_range(1..=3);
        let t = StuntedSawtooth::from_parts(m, 1, random_xi(&mut rng, m)).map_err(|e| e.to_string())?;
        let Some(h) = markov(&t) else {
            skipped += 1;
            continue;
        };
        let w = positive_entropy_witness(&t, 64);
        if let Some(w) = &w {
            check(w.verify_exact(&t), || format!("witness does not re-verify at {:?}", t.xi))?;
        }
        check(w.is_some() == (h > 1e-3), || {
            let xi: Vec<String> = t.xi.iter().map(rational::format).collect();
            format!("disagreement at m={m} ξ=({}): h = {h}, witness {}", xi.join(","), w.is_some())
        })?;
        positive += usize::from(h > 1e-3);
        maps += 1;
    }
    Ok(format!(
        "100 maps, {positive} positive, 0 disagreements ({skipped} non-Markov skipped, {:.2?})",
        start.elapsed()
    ))
}

/// Superstable period-4 parameter by bisection on `f_c⁴(0)`.
fn superstable_four_oracle() -> f64 {
    let g = |c: f64| {
        let mut x = 0.0;
        for _ in 0..4 {
            x = x * x + c;
        }
        x
    };
    let (mut lo, mut hi) = (-1.33, -1.29);
    assert!(g(lo) * g(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn c4_feigenbaum() -> Outcome {
    let start = Instant::now();
    let fam = QuadraticFamily::default();
    let p = |k| superstable_parameter(&fam, k).map_err(|e| e.to_string());
    let (c0, c1, c2) = (p(0)?, p(1)?, p(2)?);
    let oracle = superstable_four_oracle();
    let seq = feigenbaum_delta(&fam, 10).map_err(|e| e.to_string())?;
    let delta = seq.delta();
    within(Duration::from_secs(30), start)?;
    check(c0.abs() <= 1e-12, || format!("c0 = {c0}"))?;
    check((c1 + 1.0).abs() <= 1e-12, || format!("c1 = {c1}"))?;
    check((c2 - oracle).abs() <= 1e-6, || format!("c2 = {c2}, oracle {oracle}"))?;
    check((delta - 4.6692016).abs() / 4.6692016 <= 0.01, || format!("delta = {delta}"))?;
    Ok(format!("c2 = {c2:.10} (oracle {oracle:.10}), delta_10 = {delta:.7}"))
}

fn c5_boundary_stunted() -> Outcome {
    let start = Instant::now();
    let path = ParameterPath::stunted_line(1, 1, vec![int(1)], ratio(1, 2), ratio(3, 2));
    let cfg = BoundaryConfig { resolution_bits: 30, ..Default::default() };
    let pair = locate_boundary(&path, &cfg).map_err(|e| e.to_string())?;
    let zero_t = rational::parse(&pair.zero_t).map_err(|e| e.to_string())?;
    let pos_t = rational::parse(&pair.positive_t).map_err(|e| e.to_string())?;
    let width = rational::abs(&(&pos_t - &zero_t));
    check(width <= ratio(1, 1 << 30), || format!("width {}", rational::format(&width)))?;
    check(zero_t < pos_t, || "zero side is not the lower endpoint".into())?;
    let below = path.stunted_at(&zero_t).map_err(|e| e.to_string())?;
    let above = path.stunted_at(&pos_t).map_err(|e| e.to_string())?;
    let ZeroSide::Exact(cert) = &pair.below else { return Err("float certificate on an exact path".into()) };
    check(cert.verify(&below), || "zero-entropy certificate does not re-verify".into())?;
    check(cert.periods.bound >= 64 && cert.periods.periods.iter().all(|p| p.is_power_of_two()), || {
        format!("periods {:?} up to {}", cert.periods.periods, cert.periods.bound)
    })?;
    check(cert.plateaus.iter().all(|p| p.period.is_power_of_two()), || "plateau period not 2^k".into())?;
    let PositiveSide::Exact { witness, .. } = &pair.above else { return Err("float witness on an exact path".into()) };
    check(witness.verify_exact(&above), || "witness does not re-verify".into())?;
    check(witness.period().is_some_and(|p| !p.is_power_of_two()), || "witness is not a periodic orbit".into())?;
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "t* in [{}, {}], plateau period {}, witness period {}",
        pair.zero_t,
        pair.positive_t,
        cert.plateaus[0].period,
        witness.period().unwrap()
    ))
}

fn c6_boundary_quadratic() -> Outcome {
    let path = ParameterPath::Quadratic { c_lo: -1.5, c_hi: -1.3 };
    let pair = locate_boundary(&path, &BoundaryConfig::float()).map_err(|e| e.to_string())?;
    let t_star: f64 = pair.t_star.parse().map_err(|e| format!("{e}"))?;
    let acc = feigenbaum_delta(&QuadraticFamily::default(), 12).map_err(|e| e.to_string())?.accumulation();
    check((t_star - acc).abs() <= 1e-5, || format!("t* = {t_star}, extrapolated {acc}"))?;
    Ok(format!("t* = {t_star:.9}, extrapolated {acc:.9}"))
}

fn c7_psi_fidelity() -> Outcome {
    let q = PolynomialTypeB::new(&[(2, -2.0)]).map_err(|e| e.to_string())?;
    check((q.eval(0.5) - 0.5).abs() < 1e-12 && (q.eval(1.0) + 1.0).abs() < 1e-12, || "q is not 1 - 2x²".into())?;
    let r = psi(&q, DEFAULT_PSI_DEPTH, DEFAULT_PSI_TOLERANCE).map_err(|e| e.to_string())?;
    check(r.map == full_tent(), || format!("Ψ(q) has ξ = {:?}", r.map.xi))?;
    check(r.endpoints == vec![ratio(1, 2)], || format!("s1 = {:?}", r.endpoints))?;
    let hq = entropy_lap(&q, 30).map_err(|e| e.to_string())?.value;
    let ht = entropy_markov(&r.map, MarkovConfig::default()).map_err(|e| e.to_string())?.value;
    check((hq - ht).abs() <= 5e-3, || format!("h(q) = {hq}, h(Ψq) = {ht}"))?;
    check(shape_float(&q) == shape_stunted(&r.map), || "shapes differ".into())?;
    let (kq, kt) = (kneading_float(&q, 32).map_err(|e| e.to_string())?, kneading_stunted(&r.map, 32).map_err(|e| e.to_string())?);
    check(kq == kt, || format!("kneading {kq:?} vs {kt:?}"))?;
    Ok(format!("s1 = 1/2, |Δh| = {:.2e}", (hq - ht).abs()))
}

fn c8_renormalization_conjugacy() -> Outcome {
    let f: SharedMap = Arc::new(QuadraticMap::new(-1.0).map_err(|e| e.to_string())?);
    let ri = find_restrictive(f.as_ref(), 2).map_err(|e| e.to_string())?.ok_or("no restrictive interval")?;
    let s5 = 5f64.sqrt();
    check((ri.j.lo - (1.0 - s5) / 2.0).abs() <= 1e-10 && (ri.j.hi - (s5 - 1.0) / 2.0).abs() <= 1e-10, || {
        format!("J = [{}, {}]", ri.j.lo, ri.j.hi)
    })?;
    let r = renormalize(f, &ri).map_err(|e| e.to_string())?;
    let dom = r.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let u = rng.gen_range(dom.lo..=dom.hi);
        let a = itinerary_float(&r, u, 32).map_err(|e| e.to_string())?;
        let b = r.induced_itinerary(r.to_base(u), 32).map_err(|e| e.to_string())?;
        check(a == b, || format!("itineraries differ at u = {u}"))?;
    }
    Ok("J matches (±√5 ∓ 1)/2, 50/50 itineraries agree".into())
}

fn c9_cascade_structure() -> Outcome {
    let c = superstable_parameter(&QuadraticFamily::default(), 5).map_err(|e| e.to_string())?;
    let f: SharedMap = Arc::new(QuadraticMap::new(c).map_err(|e| e.to_string())?);
    let trace = cascade_trace(f, 10).map_err(|e| e.to_string())?;
    check(trace.depth == 5 && trace.levels.len() == 5, || format!("depth {}", trace.depth))?;
    check(trace.levels.iter().all(|l| l.relative_period == 2), || "relative period other than 2".into())?;
    check(trace.levels.windows(2).all(|w| w[0].j.lo <= w[1].j.lo && w[1].j.hi <= w[0].j.hi), || "levels not nested".into())?;
    Ok(format!("c = {c:.12}, 5 levels of relative period 2"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("constant-slope entropy", c1_constant_slope_entropy),
        ("entropy monotone in xi", c2_monotonicity),
        ("witness iff positive entropy", c3_entropy_period_equivalence),
        ("feigenbaum reproduction", c4_feigenbaum),
        ("boundary, stunted m=1", c5_boundary_stunted),
        ("boundary, quadratic", c6_boundary_quadratic),
        ("psi fidelity", c7_psi_fidelity),
        ("renormalization conjugacy", c8_renormalization_conjugacy),
        ("cascade structure", c9_cascade_structure),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

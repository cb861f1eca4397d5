//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use coha_core::arith::mobius;
use coha_core::charvar::{
    brute_relation_count, frobenius_count, CharacterDegreeData, DEFAULT_TUPLE_BUDGET,
};
use coha_core::group::{build_group, DEFAULT_GROUP_CAP};
use coha_core::lie::{free_lie_series, tensor_series};
use coha_core::plethysm::{elem_to_power, pexp, plog, power_to_elem, spectrum_cup, SpectrumTuple};
use coha_core::quiver::{kac_polynomial, DimVector, KacOptions, Quiver};
use coha_core::series::int_terms;
use coha_core::verify::{
    check_echeck, check_genus0_euler, check_genus1_betti, check_ic, check_psws_genus01,
    CheckReport, CheckSpec, Corruption,
};
use coha_core::{GradedSeries, HalfInt, TruncationPolicy};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const GENUS0_BUDGET: Duration = Duration::from_secs(1);
const GENUS1_BUDGET: Duration = Duration::from_secs(60);
const ORACLE_BUDGET: Duration = Duration::from_secs(120);
const ECHECK_BUDGET: Duration = Duration::from_secs(300);
const IC_BUDGET: Duration = Duration::from_secs(300);
const ROUNDTRIP_CASES: u32 = 100;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Check = fn(&CheckSpec) -> Result<CheckReport, coha_core::CheckError>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(r: &CheckReport) -> Result<(), String> {
    ensure(r.pass, || {
        format!(
            "{}: {}",
            r.name,
            r.witness
                .as_ref()
                .map(|w| w.to_string())
                .unwrap_or_default()
        )
    })
}

fn within(start: Instant, budget: Duration) -> Result<String, String> {
    let took = start.elapsed();
    ensure(took <= budget, || {
        format!("took {took:.2?}, budget {budget:?}")
    })?;
    Ok(format!("{took:.2?}"))
}

fn genus0_euler() -> Outcome {
    let start = Instant::now();
    let spec = CheckSpec::new("genus0", 0, 6)
        .with_q_window(0, 20)
        .map_err(|e| e.to_string())?;
    let r = check_genus0_euler(&spec).map_err(|e| e.to_string())?;
    passed(&r)?;
    within(start, GENUS0_BUDGET)
}

fn genus1_pbw() -> Outcome {
    let start = Instant::now();
    let r = check_genus1_betti(&CheckSpec::new("genus1", 1, 2)).map_err(|e| e.to_string())?;
    passed(&r)?;
    let t = within(start, GENUS1_BUDGET)?;
    let stretch = check_genus1_betti(&CheckSpec::new("genus1", 1, 3)).map_err(|e| e.to_string())?;
    passed(&stretch)?;
    Ok(format!(
        "{t}, r = 3 stretch passes, class counts {}",
        r.details["class_count_polynomials"]
    ))
}

fn oracle_cross_validation() -> Outcome {
    let start = Instant::now();
    let data = CharacterDegreeData::gl2();
    let mut cases = Vec::new();
    for (q, d) in [(2u64, 0i64), (3, 0), (3, 1)] {
        let group = build_group(2, q, DEFAULT_GROUP_CAP).map_err(|e| e.to_string())?;
        let central = group.central_twist(d).map_err(|e| e.to_string())?;
        let brute = brute_relation_count(&group, 2, central, DEFAULT_TUPLE_BUDGET)
            .map_err(|e| e.to_string())?;
        let formula = frobenius_count(2, 2, d, &data).map_err(|e| e.to_string())?;
        let value = formula.eval(q as i64).ok_or("pole at q")?;
        ensure(
            value == BigRational::from_integer(BigInt::from(brute)),
            || format!("q={q} d={d}: character sum {value}, enumeration {brute}"),
        )?;
        cases.push(format!("q={q} d={d}: {brute}"));
    }
    let t = within(start, ORACLE_BUDGET)?;
    Ok(format!("{t}, {}", cases.join(", ")))
}

fn genus2_echeck() -> Outcome {
    let start = Instant::now();
    let r = check_echeck(&CheckSpec::new("echeck", 2, 2)).map_err(|e| e.to_string())?;
    passed(&r)?;
    within(start, ECHECK_BUDGET)
}

fn kac_closed_forms() -> Outcome {
    let opts = KacOptions::default();
    let kac = |q: &Quiver, d: Vec<u64>| {
        kac_polynomial(q, &DimVector(d), &opts).map(|k| k.poly().to_string())
    };
    let mut cases: Vec<(String, Vec<u64>, Quiver, String)> = Vec::new();
    for d in 1..=3 {
        cases.push(("jordan".into(), vec![d], Quiver::jordan(), "q".into()));
    }
    for g in 1..=3 {
        let want = if g == 1 {
            "q".to_string()
        } else {
            format!("q^{g}")
        };
        cases.push((format!("{g}-loop"), vec![1], Quiver::loops(g), want));
    }
    cases.push(("A2".into(), vec![1, 1], Quiver::linear(2), "1".into()));
    for (name, d, q, want) in &cases {
        let got = kac(q, d.clone()).map_err(|e| e.to_string())?;
        ensure(&got == want, || {
            format!("{name} at {d:?}: got {got}, want {want}")
        })?;
    }
    Ok(format!("{} cases", cases.len()))
}

fn arb_positive_rank(p: TruncationPolicy) -> impl Strategy<Value = GradedSeries> {
    // products of up to t_max terms must stay above q_min
    let q_min = p.q_min.doubled() / 2;
    let lo = if q_min < 0 {
        -(-q_min / p.t_max as i64)
    } else {
        q_min
    };
    let hi = p.q_max.doubled() / 2;
    prop::collection::vec((1..=p.t_max, lo..=hi, -3i64..=3), 0..6).prop_map(move |v| {
        int_terms(
            &v.into_iter()
                .map(|(n, e, c)| (n, 2 * e, c))
                .collect::<Vec<_>>(),
            p,
        )
        .unwrap()
    })
}

fn necklace(n: u64, k: i64) -> i64 {
    let mut s = 0;
    for d in 1..=n {
        if n.is_multiple_of(d) {
            s += mobius(d) * k.pow((n / d) as u32);
        }
    }
    s / n as i64
}

fn plethystic_roundtrips() -> Outcome {
    let windows = [
        TruncationPolicy::ints(3, -4, 8),
        TruncationPolicy::ints(4, 0, 12),
        TruncationPolicy::ints(2, -8, 4),
        TruncationPolicy::new(3, HalfInt::from_doubled(-5), HalfInt::from_doubled(13)),
    ];
    let mut runs = 0;
    for p in windows {
        let p = p.map_err(|e| e.to_string())?;
        let mut runner = TestRunner::new(Config {
            cases: ROUNDTRIP_CASES,
            ..Config::default()
        });
        runner
            .run(&arb_positive_rank(p), |f| {
                let one = GradedSeries::one(p);
                let e = pexp(&f).unwrap();
                prop_assert!(plog(&e).unwrap().first_difference(&f).is_none());
                let g = one.add(&f).unwrap();
                prop_assert!(pexp(&plog(&g).unwrap())
                    .unwrap()
                    .first_difference(&g)
                    .is_none());
                let pbw = pexp(&free_lie_series(&f).unwrap()).unwrap();
                prop_assert!(pbw.first_difference(&tensor_series(&f).unwrap()).is_none());
                Ok(())
            })
            .map_err(|e| format!("window {p:?}: {e}"))?;
        runs += ROUNDTRIP_CASES;
    }
    let p = TruncationPolicy::ints(8, 0, 0).map_err(|e| e.to_string())?;
    let two = int_terms(&[(1, 0, 2)], p).map_err(|e| e.to_string())?;
    let lie = free_lie_series(&two).map_err(|e| e.to_string())?;
    for n in 1..=8usize {
        let got = lie.coeff(n, HalfInt::ZERO).map_err(|e| e.to_string())?;
        let want = necklace(n as u64, 2);
        ensure(got == BigInt::from(want), || {
            format!("free Lie degree {n}: {got} vs necklace {want}")
        })?;
    }
    Ok(format!("{runs} random cases, necklace through degree 8"))
}

fn psws() -> Outcome {
    for r in 1..=4 {
        passed(&check_psws_genus01(&CheckSpec::new("psws", 0, r)).map_err(|e| e.to_string())?)?;
    }
    let mut g1 = None;
    for r in 1..=2 {
        let rep = check_psws_genus01(&CheckSpec::new("psws", 1, r)).map_err(|e| e.to_string())?;
        passed(&rep)?;
        g1 = Some(rep);
    }
    let rep = g1.expect("ran genus 1");
    let dims = |key: &str| -> Vec<i64> {
        rep.details[key]
            .as_array()
            .into_iter()
            .flatten()
            .filter_map(|p| p[1].as_i64())
            .collect()
    };
    let (w, h) = (dims("rank1_L0_W"), dims("rank1_L0_H"));
    ensure(w == [1, 2, 1] && h == [1, 2, 1], || {
        format!("rank-1 tables W {w:?}, H {h:?}")
    })?;
    Ok("genus 0 r <= 4, genus 1 r <= 2, rank-1 tables (1,2,1)".into())
}

fn ic_properties() -> Outcome {
    let start = Instant::now();
    let rep = check_ic(&CheckSpec::new("ic", 2, 2)).map_err(|e| e.to_string())?;
    passed(&rep)?;
    let t = within(start, IC_BUDGET)?;
    Ok(format!("{t}, IC {}", rep.details["ic"]))
}

fn symmetric_functions() -> Outcome {
    let values: Vec<BigRational> = [(-1, 1), (-1, 2), (0, 1), (2, 3), (2, 1)]
        .iter()
        .map(|&(n, d)| BigRational::new(n.into(), d.into()))
        .collect();
    // all multisets of each size, as sorted index vectors
    let mut by_size: Vec<Vec<Vec<BigRational>>> = vec![vec![vec![]]];
    for size in 1..=6 {
        let mut next = Vec::new();
        fn rec(
            values: &[BigRational],
            start: usize,
            left: usize,
            cur: &mut Vec<BigRational>,
            out: &mut Vec<Vec<BigRational>>,
        ) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in start..values.len() {
                cur.push(values[i].clone());
                rec(values, i, left - 1, cur, out);
                cur.pop();
            }
        }
        rec(&values, 0, size, &mut vec![], &mut next);
        by_size.push(next);
    }
    let mut pairs = 0;
    for i in 0..=6 {
        for j in 0..=(6 - i) {
            for a in &by_size[i] {
                let sa = SpectrumTuple::of_multiset(a);
                ensure(power_to_elem(&elem_to_power(&sa), i) == sa, || {
                    format!("Newton roundtrip on {a:?}")
                })?;
                for b in &by_size[j] {
                    let union: Vec<BigRational> = a.iter().chain(b).cloned().collect();
                    let got = spectrum_cup(&sa, &SpectrumTuple::of_multiset(b));
                    ensure(got == SpectrumTuple::of_multiset(&union), || {
                        format!("cup of {a:?} and {b:?}")
                    })?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} multiset pairs"))
}

fn self_test() -> Outcome {
    let g0 = CheckSpec::new("genus0", 0, 3);
    let g1 = CheckSpec::new("genus1", 1, 2);
    let e2 = CheckSpec::new("echeck", 2, 2);
    let ps = CheckSpec::new("psws", 1, 2);
    let ic = CheckSpec::new("ic", 2, 2);
    let cases: Vec<(CheckSpec, Corruption, Check)> = vec![
        (
            g0.clone(),
            Corruption::ReflectionOffByOne,
            check_genus0_euler,
        ),
        (g0, Corruption::CorruptLhs, check_genus0_euler),
        (
            g1.clone(),
            Corruption::CharacterSignFlip,
            check_genus1_betti,
        ),
        (g1, Corruption::ReflectionOffByOne, check_genus1_betti),
        (e2.clone(), Corruption::CharacterSignFlip, check_echeck),
        (e2, Corruption::ReflectionOffByOne, check_echeck),
        (ps.clone(), Corruption::TableShift, check_psws_genus01),
        (
            CheckSpec::new("psws", 0, 3),
            Corruption::TableShift,
            check_psws_genus01,
        ),
        (ic, Corruption::ReflectionOffByOne, check_ic),
    ];
    let mut seen = BTreeMap::new();
    for (spec, c, run) in cases {
        let name = format!("{} g={} {c}", spec.name, spec.genus);
        let rep = run(&spec.corrupted(c))
            .map_err(|e| format!("{name}: error instead of witness: {e}"))?;
        ensure(!rep.pass, || format!("{name}: corruption not detected"))?;
        let w = rep
            .witness
            .ok_or_else(|| format!("{name}: failed without a witness"))?;
        let localized = w.q_exponent.is_some() || w.cohomological_degree.is_some();
        ensure(localized, || format!("{name}: witness {w} has no position"))?;
        seen.insert(name, w.to_string());
    }
    Ok(format!("{} corrupted fixtures caught", seen.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("genus-0 Euler identity", genus0_euler),
        ("genus-1 PBW identity", genus1_pbw),
        ("character sum against enumeration", oracle_cross_validation),
        ("genus-2 E-series identity", genus2_echeck),
        ("Kac closed forms", kac_closed_forms),
        ("plethystic roundtrips", plethystic_roundtrips),
        ("PS=WS tables in genus 0 and 1", psws),
        ("IC extraction properties", ic_properties),
        ("symmetric-function layer", symmetric_functions),
        ("corrupted fixtures are caught", self_test),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(note) => println!("criterion {:>2} PASS  {name} ({note})", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

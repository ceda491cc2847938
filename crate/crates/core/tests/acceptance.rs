//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//! Every check is exact; the only tolerances are the wall-clock limits below.

use std::time::{Duration, Instant};

use confring::algebra::verify_associativity;
use confring::assembly::{
    comparison_reports, permanent_cycles, projective_cohomology, punctured_projective_cohomology,
    sphere_orbit_cohomology, sphere_table_from_k, TableCoeff,
};
use confring::action::verify_action_properties;
use confring::invariants::{invariant_presentation_check, invariants_match_prediction, SpaceKind};
use confring::presentations::{verify_relation_tables, RelationTable};
use confring::tc::{cat_tc_bounds, cup_length, zcl, TcBudget, ZclMode};
use confring::{Coeff, Presentation};

const LIMIT_POINCARE: Duration = Duration::from_secs(5);
const LIMIT_RELATIONS: Duration = Duration::from_secs(120);
const LIMIT_INVARIANTS: Duration = Duration::from_secs(300);
const LIMIT_TC: Duration = Duration::from_secs(600);
const ASSOCIATIVITY_TRIALS: usize = 1000;

fn q() -> Coeff {
    Coeff::Rational
}

/// Coefficients of `prod (1 + a_i t)`.
fn product_poly(factors: &[usize]) -> Vec<usize> {
    let mut out = vec![1usize];
    for &a in factors {
        let mut next = vec![0; out.len() + 1];
        for (d, &c) in out.iter().enumerate() {
            next[d] += c;
            next[d + 1] += a * c;
        }
        out = next;
    }
    out
}

fn basis_dims(p: &Presentation) -> Vec<usize> {
    (0..=p.top_grade()).map(|d| p.basis_in_grade(d).len()).collect()
}

fn criterion_1() -> Result<(), String> {
    for n in 2..=5 {
        for m in 1..=4u32 {
            let p = Presentation::orbit(n, m, q()).map_err(|e| e.to_string())?;
            let want = product_poly(&(1..=m as usize).map(|i| 2 * i - 1).collect::<Vec<_>>());
            if basis_dims(&p) != want {
                return Err(format!("orbit n={n} m={m}: {:?} vs {want:?}", basis_dims(&p)));
            }
        }
        for k in 1..=5u32 {
            let p = Presentation::arnold(n, k, q()).map_err(|e| e.to_string())?;
            let want = product_poly(&(1..k as usize).collect::<Vec<_>>());
            if basis_dims(&p) != want {
                return Err(format!("arnold n={n} k={k}: {:?} vs {want:?}", basis_dims(&p)));
            }
        }
    }
    let p = Presentation::orbit(3, 3, q()).unwrap();
    if basis_dims(&p) != [1, 9, 23, 15] {
        return Err("m=3 example".into());
    }
    Ok(())
}

fn criterion_2() -> Result<(), String> {
    for n in 2..=5 {
        let tables: &[RelationTable] = if n % 2 == 1 {
            &[RelationTable::Orbit, RelationTable::C]
        } else {
            &[RelationTable::Orbit, RelationTable::D, RelationTable::I, RelationTable::ID0]
        };
        for m in 1..=6 {
            let p = Presentation::orbit(n, m, q()).unwrap();
            for &t in tables {
                let r = verify_relation_tables(&p, t).map_err(|e| e.to_string())?;
                if !r.passed {
                    let bad: Vec<_> = r.identities.iter().filter(|i| !i.passed).map(|i| i.label.clone()).collect();
                    return Err(format!("n={n} m={m} {t:?}: {bad:?}"));
                }
            }
        }
    }
    Ok(())
}

fn criterion_3() -> Result<(), String> {
    for n in [2, 3] {
        for m in 1..=3 {
            let p = Presentation::orbit(n, m, q()).unwrap();
            let r = verify_associativity(&p, ASSOCIATIVITY_TRIALS, 7 + m as u64).map_err(|e| e.to_string())?;
            if !r.passed || r.trials < ASSOCIATIVITY_TRIALS {
                return Err(format!("associativity n={n} m={m}: {:?}", r.counterexample));
            }
            let gens = p.generators();
            for a in &gens {
                for b in &gens {
                    let x = p.generator(a.i, a.j).unwrap();
                    let y = p.generator(b.i, b.j).unwrap();
                    let lhs = p.multiply(&x, &y);
                    let rhs = p.multiply(&y, &x).scale(&p.scalar(p.swap_sign()));
                    if lhs != rhs {
                        return Err(format!("commutativity n={n} m={m}: {x} and {y}"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn criterion_4() -> Result<(), String> {
    for n in 2..=5 {
        for m in 1..=4 {
            let p = Presentation::orbit(n, m, q()).unwrap();
            let r = verify_action_properties(&p, 100, 11).map_err(|e| e.to_string())?;
            let parity_check = if n % 2 == 1 { r.product_identity } else { r.product_identity_on_k };
            if !r.passed || parity_check != Some(true) || !r.sparse_signs {
                return Err(format!("n={n} m={m}: {:?}", r.failures));
            }
        }
    }
    Ok(())
}

fn criterion_5() -> Result<(), String> {
    for n in 2..=5u32 {
        let top = if n % 2 == 1 { 4 } else { 3 };
        for m in 1..=top {
            let p = Presentation::orbit(n, m, q()).unwrap();
            for punctured in [false, true] {
                let kind = SpaceKind::for_parity(n, punctured);
                let r = invariants_match_prediction(&p, kind).map_err(|e| e.to_string())?;
                if !r.passed {
                    return Err(format!("{kind} n={n} m={m}: {:?}", r.degrees));
                }
            }
        }
    }
    Ok(())
}

fn criterion_6() -> Result<(), String> {
    for n in [3, 5] {
        for m in 1..=4 {
            let r = invariant_presentation_check(SpaceKind::OddFull, n, m).map_err(|e| e.to_string())?;
            if !r.passed || r.dims_match != Some(true) || r.isomorphism != Some(true) || !r.relations_hold {
                return Err(format!("n={n} m={m}: {:?}", r.failures));
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Result<(), String> {
    for n in [2, 4, 6] {
        for k in 2..=4 {
            let computed = sphere_orbit_cohomology(n, k, TableCoeff::Integers).map_err(|e| e.to_string())?;
            let predicted = sphere_table_from_k(n, k, TableCoeff::Integers).map_err(|e| e.to_string())?;
            if computed != predicted {
                return Err(format!("n={n} k={k}:\n{computed}vs\n{predicted}"));
            }
            let pc = permanent_cycles(n, k).map_err(|e| e.to_string())?;
            if pc.dims[k as usize - 1] != 0 {
                return Err(format!("K^{} nonzero for n={n} k={k}", k - 1));
            }
        }
        let t = sphere_orbit_cohomology(n, 3, TableCoeff::Integers).unwrap();
        let d = 2 * n as usize - 1;
        if (t.rank(d), t.torsion(d)) != (1, 3) {
            return Err(format!("n={n} k=3: H^{d} has rank {} and {} copies of Z/2", t.rank(d), t.torsion(d)));
        }
    }
    Ok(())
}

fn criterion_8() -> Result<(), String> {
    for n in 2..=5 {
        for k in 2..=4 {
            let r = comparison_reports(n, k).map_err(|e| e.to_string())?;
            if !r.odd_primes.passed() {
                return Err(format!("n={n} k={k}: {}", r.odd_primes.detail));
            }
        }
    }
    Ok(())
}

fn criterion_9() -> Result<(), String> {
    let qc = TableCoeff::Field(q());
    let a = projective_cohomology(3, 3, qc).map_err(|e| e.to_string())?.table.rank(2);
    let b = punctured_projective_cohomology(4, 3, qc).map_err(|e| e.to_string())?.table.rank(2);
    if (a, b) == (1, 0) {
        Ok(())
    } else {
        Err(format!("ranks {a} and {b}"))
    }
}

fn criterion_10() -> Result<(), String> {
    for n in 2..=5 {
        for m in 1..=4 {
            let p = Presentation::orbit(n, m, q()).unwrap();
            let (len, w, _) = cup_length(&p);
            let want: Vec<String> = (1..=m).map(|i| format!("A[{i},0]")).collect();
            if len != m || w.to_string() != want.join("*") {
                return Err(format!("cup length n={n} m={m}: {len}, witness {w}"));
            }
        }
    }
    let budget = TcBudget::default();
    let p = Presentation::orbit(3, 2, q()).unwrap();
    let r = zcl(&p, 2, ZclMode::ExactSmall, &budget).map_err(|e| e.to_string())?;
    let tc = cat_tc_bounds(3, 2, 2, r.exact).map_err(|e| e.to_string())?;
    if r.exact != Some(4) || tc.exact != Some(4) || tc.lower != 4 {
        return Err(format!("zcl_2(n=3, m=2) = {:?}, TC_2 {:?}", r.exact, tc.exact));
    }
    let p = Presentation::orbit(2, 2, q()).unwrap();
    let r = zcl(&p, 2, ZclMode::ExactSmall, &budget).map_err(|e| e.to_string())?;
    let bounds = cat_tc_bounds(2, 2, 2, r.exact).map_err(|e| e.to_string())?;
    match r.exact {
        Some(v) if (3..=4).contains(&v) && bounds.lower >= 3 => {
            println!("    zcl_2(n=2, m=2) = {v}; TC_2 in [{}, {}]", bounds.lower, bounds.upper);
            Ok(())
        }
        other => Err(format!("zcl_2(n=2, m=2) = {other:?}")),
    }
}

#[test]
fn acceptance() {
    type Check = fn() -> Result<(), String>;
    let criteria: [(u32, &str, Check, Option<Duration>); 10] = [
        (1, "poincare polynomials", criterion_1, Some(LIMIT_POINCARE)),
        (2, "relation tables, m <= 6", criterion_2, Some(LIMIT_RELATIONS)),
        (3, "associativity and graded commutativity", criterion_3, None),
        (4, "action suite, m <= 4", criterion_4, None),
        (5, "invariants vs predicted bases", criterion_5, Some(LIMIT_INVARIANTS)),
        (6, "invariants of odd n vs Arnold ring", criterion_6, None),
        (7, "integral tables for even n", criterion_7, None),
        (8, "Q vs F3, F5, F7 ranks", criterion_8, None),
        (9, "non-equivalence witness", criterion_9, None),
        (10, "cup length and zero-divisor cup length", criterion_10, Some(LIMIT_TC)),
    ];
    let mut failed = Vec::new();
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = match (result, limit) {
            (Ok(()), Some(l)) if took > l => Err(format!("took {took:.1?}, limit {l:?}")),
            (r, _) => r,
        };
        match &result {
            Ok(()) => println!("criterion {id:>2}: PASS  {name} ({took:.2?})"),
            Err(e) => {
                println!("criterion {id:>2}: FAIL  {name} ({took:.2?}): {e}");
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

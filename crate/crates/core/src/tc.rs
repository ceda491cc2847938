//! Cup-length and zero-divisor cup-length over tensor powers of the orbit
//! ring, and the resulting LS-category and higher TC bounds.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Element, Family, Gen, Monomial, Presentation};
use crate::error::{invalid, Error, Result};
use crate::scalar::{Coeff, Scalar};

/// Size limits for tensor-power searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TcBudget {
    pub max_s: u32,
    pub max_m: u32,
    /// Largest allowed dimension of the `s`-fold tensor power.
    pub max_tensor_dim: usize,
    /// Largest number of search nodes.
    pub max_nodes: usize,
}

impl Default for TcBudget {
    fn default() -> Self {
        TcBudget { max_s: 3, max_m: 3, max_tensor_dim: 20_000, max_nodes: 2_000_000 }
    }
}

/// Search strategy for [`zcl`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZclMode {
    /// Stop as soon as a product reaches the dimension bound.
    WitnessSearch,
    /// Always exhaust the search, certifying the maximum.
    ExactSmall,
}

/// Bounds for cat (`s = 1`) or `TC_s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TcReport {
    pub space: String,
    pub s: u32,
    pub lower: u32,
    pub upper: u32,
    pub exact: Option<u32>,
    pub witness: Vec<String>,
}

/// Element of the `s`-fold tensor power, keyed by the slot monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    terms: BTreeMap<Vec<Monomial>, Scalar>,
}

impl TensorElement {
    pub fn unit(p: &Presentation, s: usize) -> TensorElement {
        TensorElement { terms: BTreeMap::from([(vec![Monomial::one(); s], p.scalar(1))]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, k: Vec<Monomial>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn fmt_with(&self, family: Family) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (slots, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { c.neg_ref() } else { c.clone() };
            out.push_str(match (k, neg) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            });
            if !abs.is_one() {
                out.push_str(&format!("{abs}*"));
            }
            let parts: Vec<String> = slots.iter().map(|m| m.fmt_with(family)).collect();
            out.push_str(&format!("[{}]", parts.join(" | ")));
        }
        out
    }
}

/// The basic zero-divisor `g` in slot `t` minus `g` in slot `t+1` (0-based `t`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasicZeroDivisor {
    pub gen: Gen,
    pub slot: usize,
}

impl BasicZeroDivisor {
    pub fn element(&self, p: &Presentation, s: usize) -> TensorElement {
        let mut e = TensorElement { terms: BTreeMap::new() };
        for (t, sign) in [(self.slot, 1), (self.slot + 1, -1)] {
            let mut k = vec![Monomial::one(); s];
            k[t] = Monomial::from_sorted(vec![self.gen]).expect("single factor");
            e.add_term(k, p.scalar(sign));
        }
        e
    }
}

fn slot_parity(p: &Presentation, m: &Monomial) -> usize {
    if p.n_even() {
        m.grade() % 2
    } else {
        0
    }
}

/// `x * (g in slot t)`.
fn mul_slot_gen(p: &Presentation, x: &TensorElement, g: Gen, t: usize) -> TensorElement {
    let mut out = TensorElement { terms: BTreeMap::new() };
    for (slots, c) in &x.terms {
        // g passes the factors in later slots.
        let later: usize = slots[t + 1..].iter().map(|m| slot_parity(p, m)).sum();
        let sign = if p.n_even() && later % 2 == 1 { -1 } else { 1 };
        for (z, d) in p.mul_gen(&slots[t], g).iter() {
            let mut k = slots.clone();
            k[t] = z.clone();
            out.add_term(k, c.scale_i64(sign * *d));
        }
    }
    out
}

fn mul_basic(p: &Presentation, x: &TensorElement, z: BasicZeroDivisor) -> TensorElement {
    let a = mul_slot_gen(p, x, z.gen, z.slot);
    let b = mul_slot_gen(p, x, z.gen, z.slot + 1);
    let mut out = a;
    for (k, c) in b.terms {
        out.add_term(k, c.neg_ref());
    }
    out
}

/// General product in the tensor power, with Koszul signs.
pub fn tensor_multiply(p: &Presentation, x: &TensorElement, y: &TensorElement) -> TensorElement {
    let mut out = TensorElement { terms: BTreeMap::new() };
    for (a, ca) in &x.terms {
        for (b, cb) in &y.terms {
            let mut sign = 1i64;
            if p.n_even() {
                let mut acc = 0;
                for t in 0..a.len() {
                    for u in t + 1..a.len() {
                        acc += slot_parity(p, &a[u]) * slot_parity(p, &b[t]);
                    }
                }
                if acc % 2 == 1 {
                    sign = -1;
                }
            }
            let mut partial: Vec<(Vec<Monomial>, i64)> = vec![(Vec::new(), sign)];
            for t in 0..a.len() {
                let prod = p.mul_monomials(&a[t], &b[t]);
                let mut next = Vec::new();
                for (k, c) in &partial {
                    for (z, d) in prod.iter() {
                        let mut k2 = k.clone();
                        k2.push(z.clone());
                        next.push((k2, c * *d));
                    }
                }
                partial = next;
            }
            let c = ca.mul_ref(cb);
            for (k, d) in partial {
                out.add_term(k, c.scale_i64(d));
            }
        }
    }
    out
}

/// The `s`-fold multiplication map into the ring.
pub fn multiply_out(p: &Presentation, x: &TensorElement) -> Element {
    let mut out = p.zero();
    for (slots, c) in &x.terms {
        let mut acc = p.one();
        for m in slots {
            acc = p.multiply(&acc, &Element::monomial(p.family(), m.clone(), p.scalar(1)));
        }
        out = out.add(&acc.scale(c));
    }
    out
}

fn space_name(p: &Presentation) -> String {
    match p.family() {
        Family::Orbit => format!("orbit(n={}, m={})", p.n(), p.points()),
        Family::Arnold => format!("arnold(n={}, k={})", p.n(), p.points()),
    }
}

/// Longest nonzero product of positive-degree classes, with a witness.
pub fn cup_length(p: &Presentation) -> (u32, Element, Vec<Gen>) {
    fn go(p: &Presentation, gens: &[Gen], start: usize, cur: &Element, seq: &mut Vec<Gen>, best: &mut (Vec<Gen>, Element)) {
        if seq.len() > best.0.len() {
            *best = (seq.clone(), cur.clone());
        }
        for k in start..gens.len() {
            let g = p.generator(gens[k].i, gens[k].j).expect("generator");
            let next = p.multiply(cur, &g);
            if !next.is_zero() {
                seq.push(gens[k]);
                go(p, gens, k, &next, seq, best);
                seq.pop();
            }
        }
    }
    let gens = p.generators();
    let mut best = (Vec::new(), p.one());
    go(p, &gens, 0, &p.one(), &mut Vec::new(), &mut best);
    (best.0.len() as u32, best.1, best.0)
}

fn basic_zero_divisors(p: &Presentation, s: usize) -> Vec<BasicZeroDivisor> {
    let mut v = Vec::new();
    for t in 0..s - 1 {
        for g in p.generators() {
            v.push(BasicZeroDivisor { gen: g, slot: t });
        }
    }
    v
}

fn tensor_dim(p: &Presentation, s: u32) -> Option<usize> {
    let d: usize = p.poincare_polynomial().iter().sum();
    d.checked_pow(s)
}

struct Search<'a> {
    p: &'a Presentation,
    zs: &'a [BasicZeroDivisor],
    cap: usize,
    stop_at_cap: bool,
    nodes: usize,
    max_nodes: usize,
}

impl Search<'_> {
    fn run(&mut self, start: usize, cur: &TensorElement, seq: &mut Vec<usize>, best: &mut Vec<usize>) -> Result<()> {
        if seq.len() > best.len() {
            *best = seq.clone();
        }
        if seq.len() >= self.cap {
            return Ok(());
        }
        for k in start..self.zs.len() {
            if self.stop_at_cap && best.len() >= self.cap {
                return Ok(());
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::BudgetExceeded(format!("search exceeded {} nodes", self.max_nodes)));
            }
            let next = mul_basic(self.p, cur, self.zs[k]);
            if !next.is_zero() {
                seq.push(k);
                self.run(k, &next, seq, best)?;
                seq.pop();
            }
        }
        Ok(())
    }
}

/// `s`-th zero-divisor cup-length of an orbit or Arnold ring. Products of the
/// basic zero-divisors span every power of the zero-divisor ideal, so the
/// exhaustive search is exact; `exact` is set once the maximum is certified.
pub fn zcl(p: &Presentation, s: u32, mode: ZclMode, budget: &TcBudget) -> Result<TcReport> {
    if s < 2 {
        return Err(invalid("zcl needs s >= 2"));
    }
    if s > budget.max_s || p.points() > budget.max_m {
        return Err(Error::BudgetExceeded(format!(
            "s={s}, m={} exceeds limits s<={}, m<={}",
            p.points(),
            budget.max_s,
            budget.max_m
        )));
    }
    match tensor_dim(p, s) {
        Some(d) if d <= budget.max_tensor_dim => {}
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "tensor power of dimension {} exceeds {}",
                tensor_dim(p, s).map_or("overflow".to_string(), |d| d.to_string()),
                budget.max_tensor_dim
            )))
        }
    }
    let su = s as usize;
    let zs = basic_zero_divisors(p, su);
    let cap = su * p.top_grade();
    let unit = TensorElement::unit(p, su);
    let per_branch = budget.max_nodes / zs.len().max(1) + 1;
    let results: Vec<Result<Vec<usize>>> = (0..zs.len())
        .into_par_iter()
        .map(|k| {
            let first = mul_basic(p, &unit, zs[k]);
            let mut best = Vec::new();
            if first.is_zero() {
                return Ok(best);
            }
            let mut search = Search {
                p,
                zs: &zs,
                cap,
                stop_at_cap: mode == ZclMode::WitnessSearch,
                nodes: 0,
                max_nodes: per_branch,
            };
            let mut seq = vec![k];
            search.run(k, &first, &mut seq, &mut best)?;
            Ok(best)
        })
        .collect();
    let mut best: Vec<usize> = Vec::new();
    for r in results {
        let seq = r?;
        if seq.len() > best.len() || (seq.len() == best.len() && seq < best) {
            best = seq;
        }
    }
    let witness_z: Vec<BasicZeroDivisor> = best.iter().map(|&k| zs[k]).collect();
    let (value, witness) = verify_witness(p, su, &witness_z)?;
    let upper = cap as u32;
    Ok(TcReport { space: space_name(p), s, lower: value, upper, exact: Some(value), witness })
}

/// Checks that each factor is a zero-divisor and the product is nonzero;
/// returns the length and the factor strings.
fn verify_witness(p: &Presentation, s: usize, zs: &[BasicZeroDivisor]) -> Result<(u32, Vec<String>)> {
    let mut prod = TensorElement::unit(p, s);
    let mut strings = Vec::new();
    for z in zs {
        let e = z.element(p, s);
        if !multiply_out(p, &e).is_zero() {
            return Err(invalid("witness factor is not a zero-divisor"));
        }
        prod = tensor_multiply(p, &prod, &e);
        strings.push(e.fmt_with(p.family()));
    }
    if prod.is_zero() {
        return Err(invalid("witness product vanishes"));
    }
    Ok((zs.len() as u32, strings))
}

/// Bounds for `cat` (`s = 1`) or `TC_s` of the orbit configuration space of
/// `k` points in `R^n - 0`, from the dimension bound `sk`, the known floor
/// `sk - 1 + Odd(n)`, and an optional computed `zcl_s`.
pub fn cat_tc_bounds(n: u32, k: u32, s: u32, zcl_value: Option<u32>) -> Result<TcReport> {
    if n < 2 || k < 1 || s < 1 {
        return Err(invalid("need n >= 2, k >= 1, s >= 1"));
    }
    let space = format!("orbit(n={n}, m={k})");
    let upper = s * k;
    if s == 1 {
        let p = Presentation::orbit(n, k, Coeff::Rational)?;
        let (len, _, gens) = cup_length(&p);
        let witness = gens.iter().map(|g| format!("A[{},{}]", g.i, g.j)).collect();
        return Ok(TcReport { space, s, lower: len, upper, exact: (len == upper).then_some(len), witness });
    }
    let floor = s * k - 1 + n % 2;
    let lower = floor.max(zcl_value.unwrap_or(0));
    let exact = if (n % 2 == 1 && n > 2) || lower == upper { Some(upper) } else { None };
    Ok(TcReport { space, s, lower, upper, exact, witness: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: u32, m: u32) -> Presentation {
        Presentation::orbit(n, m, Coeff::Rational).unwrap()
    }

    #[test]
    fn cup_length_examples() {
        for m in 1..=3 {
            let (l, w, _) = cup_length(&ring(3, m));
            assert_eq!(l, m);
            let names: Vec<String> = (1..=m).map(|i| format!("A[{i},0]")).collect();
            assert_eq!(w.to_string(), names.join("*"));
        }
        let (l, _, _) = cup_length(&Presentation::arnold(3, 4, Coeff::Rational).unwrap());
        assert_eq!(l, 3);
        let (l, w, _) = cup_length(&Presentation::arnold(3, 1, Coeff::Rational).unwrap());
        assert_eq!((l, w.to_string()), (0, "1".to_string()));
    }

    #[test]
    fn zcl_examples() {
        let b = TcBudget::default();
        let r = zcl(&ring(3, 1), 2, ZclMode::ExactSmall, &b).unwrap();
        assert_eq!(r.exact, Some(2));
        let r = zcl(&ring(3, 2), 2, ZclMode::WitnessSearch, &b).unwrap();
        assert_eq!(r.lower, 4);
        assert_eq!(r.witness.len(), 4);
        let r = zcl(&ring(2, 2), 2, ZclMode::ExactSmall, &b).unwrap();
        assert!(r.lower >= 3 && r.exact.is_some_and(|e| e == 3 || e == 4), "{r:?}");
    }

    #[test]
    fn square_of_basic_zero_divisor() {
        let p = ring(3, 1);
        let z = BasicZeroDivisor { gen: Gen { i: 1, j: 0 }, slot: 0 }.element(&p, 2);
        assert_eq!(z.fmt_with(Family::Orbit), "[A[1,0] | 1] - [1 | A[1,0]]");
        assert_eq!(tensor_multiply(&p, &z, &z).fmt_with(Family::Orbit), "-2*[A[1,0] | A[1,0]]");
    }

    #[test]
    fn zcl_monotone_and_scaling() {
        let b = TcBudget::default();
        for m in 1..=2 {
            let z2 = zcl(&ring(2, m), 2, ZclMode::ExactSmall, &b).unwrap().lower;
            let z3 = zcl(&ring(2, m), 3, ZclMode::ExactSmall, &b).unwrap().lower;
            assert!(z3 >= z2);
            assert_eq!(zcl(&ring(4, m), 2, ZclMode::ExactSmall, &b).unwrap().lower, z2);
            assert!(z3 <= 3 * m);
        }
    }

    #[test]
    fn budget_enforced() {
        let tiny = TcBudget { max_tensor_dim: 10, ..TcBudget::default() };
        assert!(matches!(zcl(&ring(3, 2), 2, ZclMode::ExactSmall, &tiny), Err(Error::BudgetExceeded(_))));
        assert!(matches!(zcl(&ring(3, 4), 2, ZclMode::ExactSmall, &TcBudget::default()), Err(Error::BudgetExceeded(_))));
        assert!(zcl(&ring(3, 2), 1, ZclMode::ExactSmall, &TcBudget::default()).is_err());
    }

    #[test]
    fn bounds_examples() {
        let r = cat_tc_bounds(5, 3, 1, None).unwrap();
        assert_eq!(r.exact, Some(3));
        assert_eq!(r.witness, vec!["A[1,0]", "A[2,0]", "A[3,0]"]);
        assert_eq!(cat_tc_bounds(3, 2, 3, None).unwrap().exact, Some(6));
        let r = cat_tc_bounds(4, 2, 2, None).unwrap();
        assert_eq!((r.lower, r.upper, r.exact), (3, 4, None));
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["exact"].is_null());
    }

    #[test]
    fn multiplication_map_is_multiplicative() {
        let p = ring(4, 2);
        let zs = basic_zero_divisors(&p, 2);
        let x = tensor_multiply(&p, &zs[0].element(&p, 2), &zs[3].element(&p, 2));
        let y = zs[1].element(&p, 2);
        let lhs = multiply_out(&p, &tensor_multiply(&p, &x, &y));
        let rhs = p.multiply(&multiply_out(&p, &x), &multiply_out(&p, &y));
        assert_eq!(lhs, rhs);
    }
}

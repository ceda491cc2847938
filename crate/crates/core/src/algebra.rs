//! Graded-commutative rings presented by degree-`(n-1)` generators and a
//! pair-reduction table, with normal forms over ordered square-free monomials.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{Coeff, Scalar};

/// Which generator family a presentation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `A'[i,j]`, `1 <= j < i <= k`: the ordinary configuration space of `R^n`.
    Arnold,
    /// `A[i,j]`, `|j| < i <= m`: the antipodal orbit configuration space of `R^n - 0`.
    Orbit,
}

/// A ring generator `A[i,j]` (or `A'[i,j]`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gen {
    pub i: u32,
    pub j: i32,
}

/// Position of `j` in the order `0, 1, -1, 2, -2, ...`.
pub fn j_rank(j: i32) -> u32 {
    match j.cmp(&0) {
        Ordering::Equal => 0,
        Ordering::Greater => 2 * j as u32 - 1,
        Ordering::Less => 2 * j.unsigned_abs(),
    }
}

impl Gen {
    pub const fn new(i: u32, j: i32) -> Gen {
        Gen { i, j }
    }

    fn key(&self) -> (u32, u32) {
        (self.i, j_rank(self.j))
    }
}

impl Ord for Gen {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Gen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered square-free monomial: factors with strictly increasing `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<Gen>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    /// Wraps factors that are already in normal order.
    pub fn from_sorted(factors: Vec<Gen>) -> Result<Monomial> {
        if factors.windows(2).any(|w| w[0].i >= w[1].i) {
            return Err(invalid("monomial factors must have strictly increasing first index"));
        }
        Ok(Monomial(factors))
    }

    pub fn factors(&self) -> &[Gen] {
        &self.0
    }

    /// Number of factors; the degree is this times `n - 1`.
    pub fn grade(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn fmt_with(&self, family: Family) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let tag = match family {
            Family::Arnold => "A'",
            Family::Orbit => "A",
        };
        self.0.iter().map(|g| format!("{tag}[{},{}]", g.i, g.j)).collect::<Vec<_>>().join("*")
    }
}

/// Integer combination of normal monomials.
pub type IntComb = Vec<(Monomial, i64)>;

/// Finite scalar combination of normal monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    family: Family,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Element {
    pub fn zero(family: Family) -> Element {
        Element { family, terms: BTreeMap::new() }
    }

    pub fn monomial(family: Family, m: Monomial, c: Scalar) -> Element {
        let mut e = Element::zero(family);
        e.add_term(m, c);
        e
    }

    pub fn one(family: Family, coeff: Coeff) -> Element {
        Element::monomial(family, Monomial::one(), Scalar::one(coeff))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&Scalar> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                *old = old.add_ref(&c);
                if old.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        Element {
            family: self.family,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg_ref())).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        let mut out = Element::zero(self.family);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul_ref(s));
        }
        out
    }

    /// Grades (factor counts) of the monomials present.
    pub fn grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.terms.keys().map(Monomial::grade).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// `Some(q)` when every term has `q` factors.
    pub fn homogeneous_grade(&self) -> Option<usize> {
        match self.grades().as_slice() {
            [q] => Some(*q),
            _ => None,
        }
    }

    /// Coordinates with respect to an ordered monomial list, or `None` if
    /// some term lies outside it.
    pub fn coordinates(&self, basis: &[Monomial], index: &HashMap<Monomial, usize>, coeff: Coeff) -> Option<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(coeff); basis.len()];
        for (m, c) in &self.terms {
            v[*index.get(m)?] = c.clone();
        }
        Some(v)
    }

    pub fn from_coordinates(family: Family, basis: &[Monomial], v: &[Scalar]) -> Element {
        let mut e = Element::zero(family);
        for (m, c) in basis.iter().zip(v) {
            e.add_term(m.clone(), c.clone());
        }
        e
    }
}

impl fmt::Display for Element {
    /// Terms by increasing grade and, within a grade, decreasing monomial order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &Scalar)> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.0.grade().cmp(&b.0.grade()).then_with(|| b.0.cmp(a.0)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { c.neg_ref() } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = m.fmt_with(self.family);
            if abs.is_one() {
                write!(f, "{mono}")?;
            } else if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

type GenKey = (Monomial, Gen);
type MonoKey = (Monomial, Monomial);

#[derive(Default)]
struct ProductCache {
    by_gen: RwLock<HashMap<GenKey, Arc<IntComb>>>,
    by_mono: RwLock<HashMap<MonoKey, Arc<IntComb>>>,
}

/// A concrete ring: family, sphere dimension `n`, point count, coefficients.
#[derive(Clone)]
pub struct Presentation {
    family: Family,
    n: u32,
    points: u32,
    coeff: Coeff,
    cache: Arc<ProductCache>,
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presentation")
            .field("family", &self.family)
            .field("n", &self.n)
            .field("points", &self.points)
            .field("coeff", &self.coeff)
            .finish()
    }
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        (self.family, self.n, self.points, self.coeff) == (other.family, other.n, other.points, other.coeff)
    }
}

impl Presentation {
    /// The orbit ring on `m` points: generators `A[i,j]`, `|j| < i <= m`.
    pub fn orbit(n: u32, m: u32, coeff: Coeff) -> Result<Presentation> {
        if n < 2 {
            return Err(invalid(format!("sphere dimension n={n} must be at least 2")));
        }
        if m < 1 {
            return Err(invalid("orbit ring needs at least one point"));
        }
        Ok(Presentation { family: Family::Orbit, n, points: m, coeff, cache: Arc::default() })
    }

    /// The Arnold ring on `k` points: generators `A'[i,j]`, `1 <= j < i <= k`.
    pub fn arnold(n: u32, k: u32, coeff: Coeff) -> Result<Presentation> {
        if n < 2 {
            return Err(invalid(format!("sphere dimension n={n} must be at least 2")));
        }
        if k < 1 {
            return Err(invalid("Arnold ring needs at least one point"));
        }
        Ok(Presentation { family: Family::Arnold, n, points: k, coeff, cache: Arc::default() })
    }

    /// Same ring with different coefficients (fresh cache).
    pub fn with_coeff(&self, coeff: Coeff) -> Presentation {
        Presentation { coeff, cache: Arc::default(), ..self.clone() }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `m` for the orbit family, `k` for the Arnold family.
    pub fn points(&self) -> u32 {
        self.points
    }

    pub fn coeff(&self) -> Coeff {
        self.coeff
    }

    pub fn n_even(&self) -> bool {
        self.n.is_multiple_of(2)
    }

    /// Degree of a generator.
    pub fn gen_degree(&self) -> u32 {
        self.n - 1
    }

    /// Sign picked up when two generators are swapped: `(-1)^{(n-1)^2}`.
    pub fn swap_sign(&self) -> i64 {
        if self.n_even() {
            -1
        } else {
            1
        }
    }

    /// `(-1)^n`.
    pub fn sign_n(&self) -> i64 {
        -self.swap_sign()
    }

    /// Largest possible number of factors in a nonzero monomial.
    pub fn top_grade(&self) -> usize {
        match self.family {
            Family::Orbit => self.points as usize,
            Family::Arnold => self.points as usize - 1,
        }
    }

    pub fn is_generator(&self, g: Gen) -> bool {
        match self.family {
            Family::Orbit => g.i >= 1 && g.i <= self.points && (g.j.unsigned_abs()) < g.i,
            Family::Arnold => g.j >= 1 && (g.j as u32) < g.i && g.i <= self.points,
        }
    }

    pub fn check_generator(&self, g: Gen) -> Result<()> {
        if self.is_generator(g) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(format!(
                "{} is not a generator of {:?} ring on {} points",
                Monomial(vec![g]).fmt_with(self.family),
                self.family,
                self.points
            )))
        }
    }

    /// Generators with first index `i`, in canonical `j` order.
    pub fn generators_at(&self, i: u32) -> Vec<Gen> {
        match self.family {
            Family::Orbit => {
                let mut v = vec![Gen::new(i, 0)];
                for j in 1..i as i32 {
                    v.push(Gen::new(i, j));
                    v.push(Gen::new(i, -j));
                }
                v
            }
            Family::Arnold => (1..i as i32).map(|j| Gen::new(i, j)).collect(),
        }
    }

    pub fn generators(&self) -> Vec<Gen> {
        (1..=self.points).flat_map(|i| self.generators_at(i)).collect()
    }

    pub fn generator(&self, i: u32, j: i32) -> Result<Element> {
        let g = Gen::new(i, j);
        self.check_generator(g)?;
        Ok(Element::monomial(self.family, Monomial(vec![g]), Scalar::one(self.coeff)))
    }

    pub fn one(&self) -> Element {
        Element::one(self.family, self.coeff)
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.family)
    }

    pub fn scalar(&self, x: i64) -> Scalar {
        Scalar::from_i64(self.coeff, x)
    }

    /// Normal monomials with `q` factors, in increasing monomial order.
    pub fn basis_in_grade(&self, q: usize) -> Vec<Monomial> {
        fn go(p: &Presentation, start: u32, left: usize, acc: &mut Vec<Gen>, out: &mut Vec<Monomial>) {
            if left == 0 {
                out.push(Monomial(acc.clone()));
                return;
            }
            for i in start..=p.points {
                for g in p.generators_at(i) {
                    acc.push(g);
                    go(p, i + 1, left - 1, acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, 1, q, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// Normal monomials of total degree `d`; empty unless `(n-1) | d`.
    pub fn basis_of_degree(&self, d: usize) -> Vec<Monomial> {
        let g = self.gen_degree() as usize;
        if !d.is_multiple_of(g) || d / g > self.top_grade() {
            return Vec::new();
        }
        self.basis_in_grade(d / g)
    }

    /// Counts of normal monomials by grade, from the product formula.
    pub fn poincare_polynomial(&self) -> Vec<usize> {
        let factors: Vec<usize> = match self.family {
            Family::Orbit => (1..=self.points as usize).map(|i| 2 * i - 1).collect(),
            Family::Arnold => (1..self.points as usize).collect(),
        };
        let mut poly = vec![1usize];
        for a in factors {
            let mut next = vec![0; poly.len() + 1];
            for (d, c) in poly.iter().enumerate() {
                next[d] += c;
                next[d + 1] += c * a;
            }
            poly = next;
        }
        poly
    }

    /// Ordered listed left-hand sides of the pair table, as `c * g1 * g2`.
    fn listed_pair(&self, r: u32, a: i32, b: i32) -> Option<Vec<(i64, Gen, Gen)>> {
        let e = self.sign_n();
        let g = Gen::new;
        let prod = |sign: i64, left: &[(i64, Gen)], right: &[(i64, Gen)]| {
            let mut v = Vec::new();
            for &(c1, g1) in left {
                for &(c2, g2) in right {
                    v.push((sign * c1 * c2, g1, g2));
                }
            }
            v
        };
        match self.family {
            Family::Arnold => {
                if 1 <= a && a < b {
                    let (j, i) = (a, b);
                    let ij = g(i as u32, j);
                    Some(vec![(1, ij, g(r, i)), (-1, ij, g(r, j))])
                } else {
                    None
                }
            }
            Family::Orbit => {
                if a == 0 && b > 0 {
                    let i = b;
                    Some(prod(1, &[(1, g(i as u32, 0))], &[(1, g(r, i)), (-1, g(r, 0))]))
                } else if a == 0 && b < 0 {
                    let i = -b;
                    Some(prod(e, &[(1, g(i as u32, 0))], &[(1, g(r, -i)), (-1, g(r, 0))]))
                } else if a > 0 && b == -a {
                    let i = a;
                    Some(prod(e, &[(1, g(i as u32, 0))], &[(1, g(r, -i)), (-1, g(r, i))]))
                } else if a > 0 && b > a {
                    let (j, i) = (a, b);
                    Some(prod(1, &[(1, g(i as u32, j))], &[(1, g(r, i)), (-1, g(r, j))]))
                } else if a > 0 && b < 0 && -b > a {
                    let (j, i) = (a, -b);
                    Some(prod(
                        e,
                        &[(1, g(j as u32, 0)), (1, g(i as u32, 0)), (-1, g(i as u32, -j))],
                        &[(1, g(r, -i)), (-1, g(r, j))],
                    ))
                } else if a > 0 && b < 0 && -b < a {
                    let (i, j) = (a, -b);
                    Some(prod(e, &[(1, g(i as u32, -j))], &[(1, g(r, -j)), (-1, g(r, i))]))
                } else if a < 0 && b < 0 && -a < -b {
                    let (j, i) = (-a, -b);
                    Some(prod(
                        e,
                        &[(1, g(i as u32, 0)), (-1, g(i as u32, j)), (e, g(j as u32, 0))],
                        &[(1, g(r, -i)), (-1, g(r, -j))],
                    ))
                } else {
                    None
                }
            }
        }
    }

    /// `A[r,a] * A[r,b]` as `sum c * g1 * g2` with `g1.i < r = g2.i`.
    fn collision(&self, r: u32, a: i32, b: i32) -> Vec<(i64, Gen, Gen)> {
        if a == b {
            return Vec::new();
        }
        if let Some(v) = self.listed_pair(r, a, b) {
            return v;
        }
        let s = self.swap_sign();
        self.listed_pair(r, b, a)
            .expect("every unordered pair has a listed representative")
            .into_iter()
            .map(|(c, g1, g2)| (s * c, g1, g2))
            .collect()
    }

    /// Normal form of `A[r,a] * A[r,b]`.
    pub fn reduce_collision(&self, r: u32, a: i32, b: i32) -> Result<Element> {
        self.check_generator(Gen::new(r, a))?;
        self.check_generator(Gen::new(r, b))?;
        if r < 2 && a != b {
            return Err(invalid("collisions need r >= 2"));
        }
        let mut out = self.zero();
        for (c, g1, g2) in self.collision(r, a, b) {
            out.add_term(Monomial(vec![g1, g2]), self.scalar(c));
        }
        Ok(out)
    }

    /// Normal form of `x * g` for a normal monomial `x` and generator `g`.
    pub fn mul_gen(&self, x: &Monomial, g: Gen) -> Arc<IntComb> {
        let key = (x.clone(), g);
        if let Some(hit) = self.cache.by_gen.read().unwrap().get(&key) {
            return hit.clone();
        }
        let r = g.i;
        let f = x.factors();
        let lo = f.partition_point(|h| h.i < r);
        let same = f.get(lo).filter(|h| h.i == r).copied();
        let hi = if same.is_some() { lo + 1 } else { lo };
        let upper = &f[hi..];
        let sign = if upper.len() % 2 == 1 { self.swap_sign() } else { 1 };
        let mut acc: HashMap<Monomial, i64> = HashMap::new();
        match same {
            None => {
                let mut v = f[..lo].to_vec();
                v.push(g);
                v.extend_from_slice(upper);
                acc.insert(Monomial(v), sign);
            }
            Some(h) => {
                let lower = Monomial(f[..lo].to_vec());
                for (c, s_gen, r_gen) in self.collision(r, h.j, g.j) {
                    for (y, d) in self.mul_gen(&lower, s_gen).iter() {
                        let mut v = y.0.clone();
                        v.push(r_gen);
                        v.extend_from_slice(upper);
                        *acc.entry(Monomial(v)).or_insert(0) += sign * c * d;
                    }
                }
            }
        }
        let out: Arc<IntComb> = Arc::new(acc.into_iter().filter(|(_, c)| *c != 0).collect());
        self.cache.by_gen.write().unwrap().insert(key, out.clone());
        out
    }

    /// Normal form of the product of two normal monomials, with integer coefficients.
    pub fn mul_monomials(&self, x: &Monomial, y: &Monomial) -> Arc<IntComb> {
        if y.is_one() {
            return Arc::new(vec![(x.clone(), 1)]);
        }
        if x.is_one() {
            return Arc::new(vec![(y.clone(), 1)]);
        }
        let key = (x.clone(), y.clone());
        if let Some(hit) = self.cache.by_mono.read().unwrap().get(&key) {
            return hit.clone();
        }
        let mut acc: HashMap<Monomial, i64> = HashMap::from([(x.clone(), 1)]);
        for &g in y.factors() {
            let mut next: HashMap<Monomial, i64> = HashMap::new();
            for (m, c) in &acc {
                for (z, d) in self.mul_gen(m, g).iter() {
                    *next.entry(z.clone()).or_insert(0) += c * d;
                }
            }
            next.retain(|_, c| *c != 0);
            acc = next;
        }
        let out: Arc<IntComb> = Arc::new(acc.into_iter().collect());
        self.cache.by_mono.write().unwrap().insert(key, out.clone());
        out
    }

    /// Normal form of `x * y`.
    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        let mut out = self.zero();
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                let c = cx.mul_ref(cy);
                for (z, d) in self.mul_monomials(mx, my).iter() {
                    out.add_term(z.clone(), c.scale_i64(*d));
                }
            }
        }
        out
    }

    /// Checked variant of [`Presentation::multiply`] that rejects foreign elements.
    pub fn try_multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(self.multiply(x, y))
    }

    pub fn product(&self, factors: &[Element]) -> Element {
        factors.iter().fold(self.one(), |acc, f| self.multiply(&acc, f))
    }

    /// Verifies that `x` is a normal-form element of this presentation.
    pub fn check_element(&self, x: &Element) -> Result<()> {
        if x.family != self.family {
            return Err(invalid("element belongs to a different ring family"));
        }
        for (m, c) in x.terms() {
            if c.coeff() != self.coeff {
                return Err(Error::ModeMismatch(format!("{} coefficient in a {} ring", c.coeff(), self.coeff)));
            }
            if m.factors().windows(2).any(|w| w[0].i >= w[1].i) {
                return Err(invalid("monomial not in normal order"));
            }
            for g in m.factors() {
                self.check_generator(*g)?;
            }
        }
        Ok(())
    }

    /// Normal form of an arbitrary word of generators.
    pub fn word(&self, gens: &[Gen]) -> Result<Element> {
        let mut acc = self.one();
        for &g in gens {
            self.check_generator(g)?;
            let ge = Element::monomial(self.family, Monomial(vec![g]), Scalar::one(self.coeff));
            acc = self.multiply(&acc, &ge);
        }
        Ok(acc)
    }

    /// Draws a homogeneous element of grade `q` with small integer coefficients.
    pub fn random_element<R: rand::Rng>(&self, q: usize, terms: usize, rng: &mut R) -> Element {
        let basis = self.basis_in_grade(q);
        let mut e = self.zero();
        if basis.is_empty() {
            return e;
        }
        for _ in 0..terms {
            let m = basis[rng.gen_range(0..basis.len())].clone();
            let c = rng.gen_range(-3i64..=3);
            e.add_term(m, self.scalar(c));
        }
        e
    }
}

/// Outcome of [`verify_associativity`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssociativityReport {
    pub trials: usize,
    pub passed: bool,
    /// `(x, y, z)` of the first failing triple.
    pub counterexample: Option<(String, String, String)>,
}

/// Checks `(xy)z = x(yz)` on random triples of small-coefficient elements.
pub fn verify_associativity(p: &Presentation, trials: usize, seed: u64) -> Result<AssociativityReport> {
    use rand::{Rng, SeedableRng};
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let top = p.top_grade();
    for _ in 0..trials {
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
            let q = rng.gen_range(0..=top);
            let t = rng.gen_range(1..=3);
            p.random_element(q, t, rng)
        };
        let (x, y, z) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let left = p.multiply(&p.multiply(&x, &y), &z);
        let right = p.multiply(&x, &p.multiply(&y, &z));
        if left != right {
            return Ok(AssociativityReport {
                trials,
                passed: false,
                counterexample: Some((x.to_string(), y.to_string(), z.to_string())),
            });
        }
    }
    Ok(AssociativityReport { trials, passed: true, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> Coeff {
        Coeff::Rational
    }

    #[test]
    fn j_order() {
        let order: Vec<i32> = {
            let mut v = vec![0, -2, 2, -1, 1];
            v.sort_by_key(|&j| j_rank(j));
            v
        };
        assert_eq!(order, vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn collision_b_relation() {
        let p = Presentation::orbit(3, 2, q()).unwrap();
        assert_eq!(p.reduce_collision(2, 0, 1).unwrap().to_string(), "A[1,0]*A[2,1] - A[1,0]*A[2,0]");
        assert!(p.reduce_collision(2, 1, 1).unwrap().is_zero());
    }

    #[test]
    fn collision_c_relation_even() {
        let p = Presentation::orbit(4, 3, q()).unwrap();
        let got = p.reduce_collision(3, 1, -2).unwrap();
        // (A10 + A20 - A2-1)(A3-2 - A31) with (-1)^n = 1
        let mut want = p.zero();
        for (c1, g1) in [(1, Gen::new(1, 0)), (1, Gen::new(2, 0)), (-1, Gen::new(2, -1))] {
            for (c2, g2) in [(1, Gen::new(3, -2)), (-1, Gen::new(3, 1))] {
                want.add_term(Monomial(vec![g1, g2]), p.scalar(c1 * c2));
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn arnold_relation() {
        let p = Presentation::arnold(3, 3, q()).unwrap();
        let x = p.word(&[Gen::new(3, 1), Gen::new(3, 2)]).unwrap();
        assert_eq!(x.to_string(), "A'[2,1]*A'[3,2] - A'[2,1]*A'[3,1]");
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(Presentation::orbit(3, 2, q()).unwrap().poincare_polynomial(), vec![1, 4, 3]);
        assert_eq!(Presentation::orbit(3, 3, q()).unwrap().poincare_polynomial(), vec![1, 9, 23, 15]);
        assert_eq!(Presentation::arnold(3, 3, q()).unwrap().poincare_polynomial(), vec![1, 3, 2]);
        assert_eq!(Presentation::orbit(2, 1, q()).unwrap().poincare_polynomial(), vec![1, 1]);
    }

    #[test]
    fn basis_examples() {
        let p = Presentation::orbit(3, 2, q()).unwrap();
        assert_eq!(p.basis_of_degree(0), vec![Monomial::one()]);
        let b1: Vec<String> = p.basis_of_degree(2).iter().map(|m| m.fmt_with(Family::Orbit)).collect();
        assert_eq!(b1, vec!["A[1,0]", "A[2,0]", "A[2,1]", "A[2,-1]"]);
        assert_eq!(p.basis_of_degree(4).len(), 3);
        assert!(p.basis_of_degree(3).is_empty());
        assert!(p.basis_of_degree(6).is_empty());
    }

    #[test]
    fn square_of_a10_vanishes() {
        let p = Presentation::orbit(5, 2, q()).unwrap();
        let a = p.generator(1, 0).unwrap();
        assert!(p.multiply(&a, &a).is_zero());
    }

    #[test]
    fn unit_law() {
        let p = Presentation::orbit(4, 2, q()).unwrap();
        let x = p.generator(2, -1).unwrap();
        assert_eq!(p.multiply(&p.one(), &x), x);
        assert_eq!(p.multiply(&x, &p.one()), x);
    }

    #[test]
    fn associativity_harness() {
        for n in [3, 4] {
            let p = Presentation::orbit(n, 3, q()).unwrap();
            assert!(verify_associativity(&p, 200, 7).unwrap().passed);
        }
        let p = Presentation::orbit(3, 3, q()).unwrap();
        assert!(verify_associativity(&p, 0, 0).is_err());
    }

    #[test]
    fn top_vanishing() {
        for n in [2, 3] {
            let p = Presentation::orbit(n, 3, q()).unwrap();
            let gens = p.generators();
            for a in &gens {
                for b in &gens {
                    for c in &gens {
                        for d in [Gen::new(1, 0), Gen::new(3, -2), Gen::new(2, 1)] {
                            assert!(p.word(&[*a, *b, *c, d]).unwrap().is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn foreign_element_rejected() {
        let p = Presentation::orbit(3, 2, q()).unwrap();
        let a = Presentation::arnold(3, 2, q()).unwrap().generator(2, 1).unwrap();
        assert!(p.try_multiply(&a, &a).is_err());
    }

    proptest! {
        #[test]
        fn graded_commutativity(n in 2u32..6, m in 1u32..4, seed in any::<u64>()) {
            use rand::SeedableRng;
            let p = Presentation::orbit(n, m, q()).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let qx = (seed % (m as u64 + 1)) as usize;
            let qy = ((seed / 7) % (m as u64 + 1)) as usize;
            let x = p.random_element(qx, 3, &mut rng);
            let y = p.random_element(qy, 3, &mut rng);
            let sign = if n % 2 == 0 && qx % 2 == 1 && qy % 2 == 1 { -1 } else { 1 };
            prop_assert_eq!(p.multiply(&x, &y), p.multiply(&y, &x).scale(&p.scalar(sign)));
        }

        #[test]
        fn normal_form_idempotent(n in 2u32..6, m in 1u32..4, seed in any::<u64>()) {
            use rand::SeedableRng;
            let p = Presentation::orbit(n, m, q()).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x = p.random_element((seed % (m as u64 + 1)) as usize, 4, &mut rng);
            prop_assert_eq!(p.multiply(&p.one(), &x), x.clone());
            prop_assert!(p.check_element(&x).is_ok());
        }

        #[test]
        fn associativity_arnold(n in 2u32..5, k in 2u32..5, seed in any::<u64>()) {
            let p = Presentation::arnold(n, k, q()).unwrap();
            prop_assert!(verify_associativity(&p, 20, seed).unwrap().passed);
        }
    }
}

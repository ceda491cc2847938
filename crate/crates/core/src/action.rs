//! The `(Z_2)^{m+1}` action on the orbit ring on `m` points, generated by
//! the involutions `eps_1, ..., eps_{m+1}` acting by ring automorphisms.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use rand::SeedableRng;
use serde::Serialize;

use crate::algebra::{Element, Family, Gen, Monomial, Presentation};
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::presentations::{b_monomial_element, b_monomials, derived_class_element, DerivedClass};

/// A group element: the product of the `eps_l` with `l` in the set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct GroupElement {
    bits: u64,
}

impl GroupElement {
    pub fn identity() -> GroupElement {
        GroupElement::default()
    }

    pub fn from_indices(ls: &[u32]) -> Result<GroupElement> {
        let mut bits = 0u64;
        for &l in ls {
            if l == 0 || l > 63 {
                return Err(Error::IndexOutOfRange(format!("eps_{l} is not a group generator")));
            }
            bits ^= 1 << l;
        }
        Ok(GroupElement { bits })
    }

    pub fn contains(&self, l: u32) -> bool {
        l < 64 && self.bits >> l & 1 == 1
    }

    pub fn indices(&self) -> Vec<u32> {
        (1..64).filter(|&l| self.contains(l)).collect()
    }

    /// Group product.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement { bits: self.bits ^ other.bits }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.indices();
        if v.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = v.iter().map(|l| format!("eps{l}")).collect();
        write!(f, "{}", s.join("*"))
    }
}

/// Action of the group on one orbit ring, with per-`(l, monomial)` memoization.
pub struct Action {
    p: Presentation,
    memo: RwLock<HashMap<(u32, Monomial), Element>>,
}

impl Action {
    pub fn new(p: &Presentation) -> Result<Action> {
        if p.family() != Family::Orbit {
            return Err(invalid("the group acts on the orbit ring"));
        }
        Ok(Action { p: p.clone(), memo: RwLock::default() })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.p
    }

    /// Number of group generators, `m + 1`.
    pub fn rank(&self) -> u32 {
        self.p.points() + 1
    }

    fn check_l(&self, l: u32) -> Result<()> {
        if l == 0 || l > self.rank() {
            return Err(Error::IndexOutOfRange(format!("eps_{l} with m={}", self.p.points())));
        }
        Ok(())
    }

    /// `eps_l(A[i,j])`.
    pub fn on_generator(&self, l: u32, i: u32, j: i32) -> Result<Element> {
        self.check_l(l)?;
        let p = &self.p;
        p.check_generator(Gen::new(i, j))?;
        let sn = p.sign_n();
        let a = |i: u32, j: i32| p.generator(i, j).expect("valid generator");
        let s = |c: i64| p.scalar(c);
        let abs = j.unsigned_abs();
        let x = if l == 1 {
            match j.signum() {
                0 => a(i, 0).neg(),
                1 => a(abs, 0).scale(&s(-sn)).sub(&a(i, 0)).add(&a(i, j)),
                _ => a(abs, 0).neg().sub(&a(i, 0)).add(&a(i, j)),
            }
        } else if j != 0 && abs == l - 1 {
            a(i, -j)
        } else if i == l - 1 {
            match j.signum() {
                0 => a(i, 0).scale(&s(sn)),
                1 => a(abs, 0).scale(&s(sn)).add(&a(i, 0).scale(&s(sn))).add(&a(i, -j).scale(&s(-sn))),
                _ => a(abs, 0).add(&a(i, 0).scale(&s(sn))).add(&a(i, abs as i32).scale(&s(-sn))),
            }
        } else {
            a(i, j)
        };
        Ok(x)
    }

    /// `eps_l` on a normal monomial, as the product of the generator images.
    pub fn on_monomial(&self, l: u32, m: &Monomial) -> Result<Element> {
        self.check_l(l)?;
        if m.is_one() {
            return Ok(self.p.one());
        }
        if let Some(hit) = self.memo.read().unwrap().get(&(l, m.clone())) {
            return Ok(hit.clone());
        }
        let f = m.factors();
        let (last, prefix) = f.split_last().unwrap();
        let head = self.on_monomial(l, &Monomial::from_sorted(prefix.to_vec())?)?;
        let out = self.p.multiply(&head, &self.on_generator(l, last.i, last.j)?);
        self.memo.write().unwrap().insert((l, m.clone()), out.clone());
        Ok(out)
    }

    /// `eps_l(x)`.
    pub fn apply_one(&self, l: u32, x: &Element) -> Result<Element> {
        let mut out = self.p.zero();
        for (m, c) in x.terms() {
            out = out.add(&self.on_monomial(l, m)?.scale(c));
        }
        Ok(out)
    }

    /// `g(x)`; the factors commute so their order is immaterial.
    pub fn apply(&self, g: &GroupElement, x: &Element) -> Result<Element> {
        let mut out = x.clone();
        for l in g.indices() {
            out = self.apply_one(l, &out)?;
        }
        Ok(out)
    }

    /// Matrix of `eps_l` on the basis of grade `q`; column `c` holds the image of basis element `c`.
    pub fn matrix(&self, l: u32, q: usize) -> Result<Matrix> {
        let basis = self.p.basis_in_grade(q);
        let index: HashMap<_, _> = basis.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
        let mut mat = Matrix::zeros(self.p.coeff(), basis.len(), basis.len());
        for (c, m) in basis.iter().enumerate() {
            for (t, s) in self.on_monomial(l, m)?.terms() {
                mat.set(index[t], c, s.clone());
            }
        }
        Ok(mat)
    }
}

/// `eps_l(A[i,j])` in `p`.
pub fn epsilon_on_generator(p: &Presentation, l: u32, i: u32, j: i32) -> Result<Element> {
    Action::new(p)?.on_generator(l, i, j)
}

/// `g(x)` in `p`.
pub fn epsilon_apply(p: &Presentation, g: &GroupElement, x: &Element) -> Result<Element> {
    p.check_element(x)?;
    Action::new(p)?.apply(g, x)
}

/// Matrix of `eps_l` on the basis of total degree `d`.
pub fn action_matrix(p: &Presentation, l: u32, d: usize) -> Result<Matrix> {
    let g = p.gen_degree() as usize;
    if !d.is_multiple_of(g) || d / g > p.top_grade() {
        return Ok(Matrix::zeros(p.coeff(), 0, 0));
    }
    Action::new(p)?.matrix(l, d / g)
}

/// Outcome of [`verify_action_properties`]. Checks that do not apply to the
/// parity of `n` are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionReport {
    pub n: u32,
    pub m: u32,
    pub involutive: bool,
    pub commuting: bool,
    pub homomorphism: bool,
    /// Odd `n`: `eps_1 = eps_2 ... eps_{m+1}` on every basis class.
    pub product_identity: Option<bool>,
    /// Even `n`: `eps_1 = (-1)^q eps_2 ... eps_{m+1}` on the permanent cycles `K^q`.
    pub product_identity_on_k: Option<bool>,
    /// Even `n`: images of the `B` classes.
    pub b_formula: Option<bool>,
    /// Sign flips of the `C` (odd `n`) or `D` (even `n`) classes.
    pub sparse_signs: bool,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Expected image of `B[i,j]` under `eps_l`, `i >= 2`.
fn b_image(p: &Presentation, l: u32, i: u32, j: i32) -> Result<Element> {
    let b = |i: u32, j: i32| derived_class_element(p, &DerivedClass::B(i, j));
    let abs = j.unsigned_abs();
    Ok(if l == 1 {
        if j == 0 {
            b(i, 0)?.neg()
        } else {
            b(abs, 0)?.neg().sub(&b(i, 0)?).add(&b(i, j)?)
        }
    } else if j != 0 && abs == l - 1 {
        b(i, -j)?
    } else if i == l - 1 && j != 0 {
        b(abs, 0)?.add(&b(i, 0)?).sub(&b(i, -j)?)
    } else {
        b(i, j)?
    })
}

/// Expected sign of `eps_l` on a `C` or `D` class.
fn sparse_sign(c: &DerivedClass, l: u32) -> i64 {
    use DerivedClass::*;
    let flip = match *c {
        CPlus(..) => false,
        CMinus(i, j) => i == l - 1 || j == l - 1,
        CZero(i) => i == l - 1 || l == 1,
        DPlus(i, _) => i == l - 1,
        DMinus(_, j) => j == l - 1,
        DZero(_) => l == 1,
        _ => unreachable!("not a degree-one derived class"),
    };
    if flip {
        -1
    } else {
        1
    }
}

/// Runs the structural checks on the action, grade by grade, using
/// `samples` random product pairs per pair of grades for the homomorphism check.
pub fn verify_action_properties(p: &Presentation, samples: usize, seed: u64) -> Result<ActionReport> {
    let act = Action::new(p)?;
    let m = p.points();
    let ls: Vec<u32> = (1..=act.rank()).collect();
    let mut failures = Vec::new();
    let (mut involutive, mut commuting, mut homomorphism) = (true, true, true);
    let mut product_identity = (!p.n_even()).then_some(true);
    let tail = GroupElement::from_indices(&ls[1..])?;

    for q in 0..=p.top_grade() {
        for b in p.basis_in_grade(q) {
            let x = Element::monomial(Family::Orbit, b.clone(), p.scalar(1));
            let images: Vec<Element> = ls.iter().map(|&l| act.on_monomial(l, &b)).collect::<Result<_>>()?;
            for (k, &l) in ls.iter().enumerate() {
                if involutive && act.apply_one(l, &images[k])? != x {
                    involutive = false;
                    failures.push(format!("eps_{l} is not an involution on {x}"));
                }
                for (k2, &l2) in ls.iter().enumerate().skip(k + 1) {
                    if commuting && act.apply_one(l, &images[k2])? != act.apply_one(l2, &images[k])? {
                        commuting = false;
                        failures.push(format!("eps_{l} and eps_{l2} do not commute on {x}"));
                    }
                }
            }
            if product_identity == Some(true) && act.apply(&tail, &x)? != images[0] {
                product_identity = Some(false);
                failures.push(format!("eps_1 differs from eps_2...eps_{} on {x}", m + 1));
            }
        }
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    'outer: for q1 in 0..=p.top_grade() {
        for q2 in 0..=p.top_grade() - q1 {
            for _ in 0..samples {
                let x = p.random_element(q1, 3, &mut rng);
                let y = p.random_element(q2, 3, &mut rng);
                let xy = p.multiply(&x, &y);
                for &l in &ls {
                    let lhs = act.apply_one(l, &xy)?;
                    let rhs = p.multiply(&act.apply_one(l, &x)?, &act.apply_one(l, &y)?);
                    if lhs != rhs {
                        homomorphism = false;
                        failures.push(format!("eps_{l} is not multiplicative on ({x}, {y})"));
                        break 'outer;
                    }
                }
            }
        }
    }

    let mut product_identity_on_k = None;
    let mut b_formula = None;
    if p.n_even() {
        let mut ok = true;
        for q in 0..m as usize {
            let sign = p.scalar(if q % 2 == 0 { 1 } else { -1 });
            for f in b_monomials(p, q) {
                let x = b_monomial_element(p, &f)?;
                if act.apply_one(1, &x)? != act.apply(&tail, &x)?.scale(&sign) {
                    ok = false;
                    failures.push(format!("eps_1 differs from (-1)^{q} eps_2...eps_{} on K^{q} element {x}", m + 1));
                    break;
                }
            }
        }
        product_identity_on_k = Some(ok);
        let mut ok = true;
        for g in p.generators().into_iter().filter(|g| g.i >= 2) {
            for &l in &ls {
                let x = derived_class_element(p, &DerivedClass::B(g.i, g.j))?;
                if act.apply_one(l, &x)? != b_image(p, l, g.i, g.j)? {
                    ok = false;
                    failures.push(format!("eps_{l} on B[{},{}] disagrees with the B formula", g.i, g.j));
                }
            }
        }
        b_formula = Some(ok);
    }

    let layer = if p.n_even() { crate::presentations::Layer::D } else { crate::presentations::Layer::C };
    let mut sparse_signs = true;
    for c in crate::presentations::layer_classes(p, layer) {
        if c == DerivedClass::A10 {
            continue;
        }
        let x = derived_class_element(p, &c)?;
        for &l in &ls {
            if act.apply_one(l, &x)? != x.scale(&p.scalar(sparse_sign(&c, l))) {
                sparse_signs = false;
                failures.push(format!("eps_{l} on {c} does not match its sign rule"));
            }
        }
    }

    let passed = involutive
        && commuting
        && homomorphism
        && sparse_signs
        && product_identity != Some(false)
        && product_identity_on_k != Some(false)
        && b_formula != Some(false);
    Ok(ActionReport {
        n: p.n(),
        m,
        involutive,
        commuting,
        homomorphism,
        product_identity,
        product_identity_on_k,
        b_formula,
        sparse_signs,
        failures,
        passed,
    })
}

//! Derived generator layers (`C`, `B`/`D`, `I`) over the orbit ring, their
//! changes of basis, and verifiers for the multiplication tables they satisfy.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{Element, Family, Presentation};
use crate::error::{invalid, Error, Result};
use crate::expr::{self, AtomKind};
use crate::scalar::Scalar;

/// A class of the derived layers, or the shift class `A[1,0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DerivedClass {
    CPlus(u32, u32),
    CMinus(u32, u32),
    CZero(u32),
    B(u32, i32),
    DPlus(u32, u32),
    DMinus(u32, u32),
    DZero(u32),
    IPlus(u32, u32, u32),
    IMinus(u32, u32, u32),
    IZero(u32, u32),
    A10,
}

impl DerivedClass {
    fn needs_even(&self) -> bool {
        !matches!(self, DerivedClass::CPlus(..) | DerivedClass::CMinus(..) | DerivedClass::CZero(_) | DerivedClass::A10)
    }

    /// Checks index ranges against a ring on `m` points. `D0[1]`, `B[1,0]`
    /// and `I0[i,1]` are accepted and evaluate to zero.
    pub fn validate(&self, m: u32) -> Result<()> {
        use DerivedClass::*;
        let ok = match *self {
            CPlus(i, j) | CMinus(i, j) | DPlus(i, j) | DMinus(i, j) => 0 < j && j < i && i <= m,
            CZero(i) | DZero(i) => 0 < i && i <= m,
            B(i, j) => j.unsigned_abs() < i && i <= m,
            IPlus(r, i, j) | IMinus(r, i, j) => 0 < j && j < i && i < r && r <= m,
            IZero(i, j) => 0 < j && j < i && i <= m,
            A10 => m >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(format!("{self} is not defined on {m} points")))
        }
    }
}

impl fmt::Display for DerivedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DerivedClass::*;
        match *self {
            CPlus(i, j) => write!(f, "C+[{i},{j}]"),
            CMinus(i, j) => write!(f, "C-[{i},{j}]"),
            CZero(i) => write!(f, "C0[{i}]"),
            B(i, j) => write!(f, "B[{i},{j}]"),
            DPlus(i, j) => write!(f, "D+[{i},{j}]"),
            DMinus(i, j) => write!(f, "D-[{i},{j}]"),
            DZero(i) => write!(f, "D0[{i}]"),
            IPlus(r, i, j) => write!(f, "I+[{r},{i},{j}]"),
            IMinus(r, i, j) => write!(f, "I-[{r},{i},{j}]"),
            IZero(i, j) => write!(f, "I0[{i},{j}]"),
            A10 => write!(f, "A[1,0]"),
        }
    }
}

impl FromStr for DerivedClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<DerivedClass> {
        match expr::parse(s)? {
            expr::Expr::Atom { kind: AtomKind::A, idx, .. } if idx == [expr::Idx::Lit(1), expr::Idx::Lit(0)] => {
                Ok(DerivedClass::A10)
            }
            expr::Expr::Atom { kind, idx, pos } => {
                let v = idx
                    .iter()
                    .map(|i| match i {
                        expr::Idx::Lit(v) => Ok(*v),
                        _ => Err(Error::Parse { pos, msg: "derived class indices must be literals".into() }),
                    })
                    .collect::<Result<Vec<_>>>()?;
                expr::atom_class(kind, &v, pos)?.ok_or(Error::Parse { pos, msg: "not a derived class".into() })
            }
            _ => Err(Error::Parse { pos: 0, msg: "expected a single derived class".into() }),
        }
    }
}

fn gen(p: &Presentation, i: u32, j: i32) -> Element {
    p.generator(i, j).expect("index validated")
}

fn b_class(p: &Presentation, i: u32, j: i32) -> Element {
    if i == 1 {
        return p.zero();
    }
    gen(p, i, j).sub(&gen(p, 1, 0))
}

/// A-basis normal form of a derived class. `I` classes are expanded as their
/// defining products.
pub fn derived_class_element(p: &Presentation, c: &DerivedClass) -> Result<Element> {
    use DerivedClass::*;
    if p.family() != Family::Orbit {
        return Err(invalid("derived classes live in the orbit ring"));
    }
    c.validate(p.points())?;
    if c.needs_even() && !p.n_even() {
        return Err(Error::ParityMismatch(format!("{c} is defined only for even n (n={})", p.n())));
    }
    let i32_ = |x: u32| x as i32;
    Ok(match *c {
        CPlus(i, j) => gen(p, i, i32_(j)).add(&gen(p, i, -i32_(j))).sub(&gen(p, i, 0)),
        CMinus(i, j) => gen(p, i, -i32_(j)).sub(&gen(p, i, i32_(j))).sub(&gen(p, j, 0)),
        CZero(i) => gen(p, i, 0),
        A10 => gen(p, 1, 0),
        B(i, j) => b_class(p, i, j),
        DPlus(i, j) => b_class(p, i, i32_(j))
            .add(&b_class(p, i, -i32_(j)))
            .sub(&b_class(p, i, 0))
            .sub(&b_class(p, j, 0)),
        DMinus(i, j) => b_class(p, i, i32_(j)).sub(&b_class(p, i, -i32_(j))),
        DZero(i) => b_class(p, i, 0),
        IPlus(r, i, j) => p.multiply(&derived_class_element(p, &DPlus(i, j))?, &derived_class_element(p, &DMinus(r, i))?),
        IMinus(r, i, j) => {
            p.multiply(&derived_class_element(p, &DMinus(i, j))?, &derived_class_element(p, &DMinus(r, j))?)
        }
        IZero(i, j) => p.multiply(&b_class(p, j, 0), &b_class(p, i, 0)),
    })
}

/// Which derived layer to express generators in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Layer {
    C,
    D,
}

/// Formal linear combination of derived classes.
pub type Combination = Vec<(Scalar, DerivedClass)>;

/// Writes `A[i,j]` in the chosen derived layer. Requires 2 invertible; the
/// `D` layer also requires even `n`.
pub fn a_in_derived_basis(p: &Presentation, i: u32, j: i32, layer: Layer) -> Result<Combination> {
    use DerivedClass::*;
    if p.family() != Family::Orbit {
        return Err(invalid("derived classes live in the orbit ring"));
    }
    p.check_generator(crate::algebra::Gen::new(i, j))?;
    p.coeff().require_two_invertible()?;
    if layer == Layer::D && !p.n_even() {
        return Err(Error::ParityMismatch(format!("the D layer needs even n (n={})", p.n())));
    }
    let c = p.coeff();
    let half = Scalar::from_ratio(c, 1, 2)?;
    let one = Scalar::one(c);
    let a = j.unsigned_abs();
    let mut out: Combination = Vec::new();
    match layer {
        Layer::C => {
            if j == 0 {
                out.push((one, CZero(i)));
            } else if j > 0 {
                out.push((half.clone(), CPlus(i, a)));
                out.push((half.neg_ref(), CMinus(i, a)));
                out.push((half.clone(), CZero(i)));
                out.push((half.neg_ref(), CZero(a)));
            } else {
                out.push((half.clone(), CPlus(i, a)));
                out.push((half.clone(), CMinus(i, a)));
                out.push((half.clone(), CZero(i)));
                out.push((half, CZero(a)));
            }
        }
        Layer::D => {
            let dz = |x: u32| if x > 1 { Some(DZero(x)) } else { None };
            if j == 0 {
                out.extend(dz(i).map(|d| (one.clone(), d)));
            } else {
                let sign = if j > 0 { half.clone() } else { half.neg_ref() };
                out.push((half.clone(), DPlus(i, a)));
                out.push((sign, DMinus(i, a)));
                out.extend(dz(i).map(|d| (half.clone(), d)));
                out.extend(dz(a).map(|d| (half.clone(), d)));
            }
            out.push((one, A10));
        }
    }
    Ok(out)
}

/// Evaluates a formal combination in the A basis.
pub fn evaluate_combination(p: &Presentation, comb: &Combination) -> Result<Element> {
    let mut acc = p.zero();
    for (s, c) in comb {
        acc = acc.add(&derived_class_element(p, c)?.scale(s));
    }
    Ok(acc)
}

/// Multiplication tables that can be verified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RelationTable {
    /// Pair relations among the `A` generators.
    Orbit,
    /// Products of `C` classes, odd `n`.
    C,
    /// Products of `D` classes, even `n`.
    D,
    /// Products of two `I` classes, even `n`.
    I,
    /// `I` times `D0`, even `n`.
    ID0,
}

impl FromStr for RelationTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<RelationTable> {
        match s.to_ascii_lowercase().as_str() {
            "orbit" | "a" | "a-table" => Ok(RelationTable::Orbit),
            "c" | "c-table" => Ok(RelationTable::C),
            "d" | "d-table" => Ok(RelationTable::D),
            "i" | "i-table" => Ok(RelationTable::I),
            "id0" | "id0-table" => Ok(RelationTable::ID0),
            _ => Err(invalid(format!("unknown relation table `{s}`"))),
        }
    }
}

/// One table entry: label, index chain, identity, and whether the right side
/// must be a reduced `I` combination.
struct Entry {
    label: &'static str,
    chain: &'static str,
    identity: &'static str,
    reduction: bool,
}

const fn e(label: &'static str, chain: &'static str, identity: &'static str) -> Entry {
    Entry { label, chain, identity, reduction: false }
}

const fn red(label: &'static str, chain: &'static str, identity: &'static str) -> Entry {
    Entry { label, chain, identity, reduction: true }
}

const ORBIT_TABLE: &[Entry] = &[
    e("a.0", "0<i", "A[i,0]*A[i,0] = 0"),
    e("a.+", "0<j<i", "A[i,j]*A[i,j] = 0"),
    e("a.-", "0<j<i", "A[i,-j]*A[i,-j] = 0"),
    e("b.1", "0<i<r", "A[r,0]*A[r,i] = A[i,0]*(A[r,i]-A[r,0])"),
    e("b.2", "0<i<r", "A[r,0]*A[r,-i] = (-1)^n*A[i,0]*(A[r,-i]-A[r,0])"),
    e("b.3", "0<i<r", "A[r,i]*A[r,-i] = (-1)^n*A[i,0]*(A[r,-i]-A[r,i])"),
    e("c.1", "0<j<i<r", "A[r,j]*A[r,i] = A[i,j]*(A[r,i]-A[r,j])"),
    e("c.2", "0<j<i<r", "A[r,j]*A[r,-i] = (-1)^n*(A[j,0]+A[i,0]-A[i,-j])*(A[r,-i]-A[r,j])"),
    e("c.3", "0<j<i<r", "A[r,i]*A[r,-j] = (-1)^n*A[i,-j]*(A[r,-j]-A[r,i])"),
    e("c.4", "0<j<i<r", "A[r,-j]*A[r,-i] = (-1)^n*(A[i,0]-A[i,j]+(-1)^n*A[j,0])*(A[r,-i]-A[r,-j])"),
];

const C_TABLE: &[Entry] = &[
    e("pp", "0<j<i<r", "C+[r,i]*C+[r,j] = -C+[i,j]*C+[r,j] + C+[i,j]*C+[r,i]"),
    e("pm", "0<j<i<r", "C+[r,i]*C-[r,j] = -C-[i,j]*C-[r,i] - C+[i,j]*C-[r,j] - C0[j]*C0[r]"),
    e("mp", "0<j<i<r", "C-[r,i]*C+[r,j] = C-[i,j]*C-[r,j] + C+[i,j]*C-[r,i] - C0[i]*C0[r]"),
    e("mm", "0<j<i<r", "C-[r,i]*C-[r,j] = C-[i,j]*C+[r,j] - C-[i,j]*C+[r,i] + C0[j]*C0[i]"),
    e("p0", "0<i<r", "C+[r,i]*C0[r] = -C0[i]*C-[r,i]"),
    e("m0", "0<i<r", "C-[r,i]*C0[r] = -C0[i]*C+[r,i]"),
    e("sq+", "0<j<i", "C+[i,j]*C+[i,j] = 0"),
    e("sq-", "0<j<i", "C-[i,j]*C-[i,j] = 0"),
    e("sq0", "0<i", "C0[i]*C0[i] = 0"),
    e("pm-same", "0<j<i", "C+[i,j]*C-[i,j] = -C0[j]*C0[i]"),
];

const D_TABLE: &[Entry] = &[
    e(
        "pp",
        "0<j<i<r",
        "D+[r,i]*D+[r,j] = D-[i,j]*D-[r,j] - D+[i,j]*D-[r,i] - D0[j]*D0[i] + D0[j]*D0[r] - D0[i]*D0[r]",
    ),
    e("pm", "0<j<i<r", "D+[r,i]*D-[r,j] = D-[i,j]*(D+[r,j]-D+[r,i])"),
    e("mp", "0<j<i<r", "D-[r,i]*D+[r,j] = D+[i,j]*(D+[r,j]-D+[r,i])"),
    e("mm", "0<j<i<r", "D-[r,i]*D-[r,j] = -D-[i,j]*D-[r,i] + D+[i,j]*D-[r,j]"),
    e("p0", "0<i<r", "D+[r,i]*D0[r] = -D0[i]*D+[r,i]"),
    e("m0", "0<i<r", "D-[r,i]*D0[r] = -D0[i]*D-[r,i]"),
    e("sq+", "0<j<i", "D+[i,j]*D+[i,j] = 0"),
    e("sq-", "0<j<i", "D-[i,j]*D-[i,j] = 0"),
    e("sq0", "1<i", "D0[i]*D0[i] = 0"),
    e("pm-same", "0<j<i", "D+[i,j]*D-[i,j] = 0"),
];

const ID0_TABLE: &[Entry] = &[
    e("+i", "0<j<i<r", "I+[r,i,j]*D0[i] = I+[r,i,j]*D0[j]"),
    e("+r", "0<j<i<r", "I+[r,i,j]*D0[r] = I+[r,i,j]*D0[j]"),
    e("-i", "0<j<i<r", "I-[r,i,j]*D0[i] = I-[r,i,j]*D0[j]"),
    e("-r", "0<j<i<r", "I-[r,i,j]*D0[r] = I-[r,i,j]*D0[j]"),
];

// `I?` stands for both signs independently at each occurrence.
const I_TABLE: &[Entry] = &[
    // Same outer index, four distinct inner indices.
    red("1a1.pp", "0<b<a<j<i<r", "I+[r,i,j]*I+[r,a,b] = I+[j,a,b]*(I-[r,i,a]-I+[r,i,a]+I+[r,i,j]) + (I0[i,b]-I+[i,j,a]-I0[i,j]-I0[j,b])*I+[r,a,b]"),
    red("1a1.mm", "0<b<a<j<i<r", "I-[r,i,j]*I-[r,a,b] = I-[j,a,b]*I-[r,i,j] - I+[i,j,b]*I-[r,a,b]"),
    red("1a1.pm", "0<b<a<j<i<r", "I+[r,i,j]*I-[r,a,b] = I-[j,a,b]*(I+[r,i,j]-I+[r,i,b]) + (I-[i,j,b]-I+[i,j,b]-I0[j,b]+I0[i,b]-I0[i,j])*I-[r,a,b]"),
    red("1a1.mp", "0<b<a<j<i<r", "I-[r,i,j]*I+[r,a,b] = I+[j,a,b]*I-[r,i,j] - I+[i,j,a]*I+[r,a,b]"),
    red("1a2.pp", "0<b<j<a<i<r", "I+[r,i,j]*I+[r,a,b] = (I-[a,j,b]-I+[a,j,b]+I0[a,b]-I0[a,j]-I0[j,b])*(I+[r,i,a]-I-[r,i,a]-I+[r,i,j]) + I+[i,j,b]*(I+[r,a,j]-I+[r,a,b]) + (I0[i,b]-I0[i,j]-I0[j,b])*I+[r,a,b]"),
    red("1a2.mm", "0<b<j<a<i<r", "I-[r,i,j]*I-[r,a,b] = -I-[a,j,b]*I-[r,i,j] - I+[i,j,b]*I-[r,a,b]"),
    red("1a2.pm", "0<b<j<a<i<r", "I+[r,i,j]*I-[r,a,b] = I-[a,j,b]*(I+[r,i,b]-I+[r,i,j]-I-[r,i,b]) + (I0[i,b]-I+[i,j,b]-I0[j,b]-I0[i,j])*I-[r,a,b]"),
    red("1a2.mp", "0<b<j<a<i<r", "I-[r,i,j]*I+[r,a,b] = I+[i,j,b]*(I+[r,a,j]-I+[r,a,b]) + (I0[j,b]-I0[a,b]+I0[a,j]-I-[a,j,b]+I+[a,j,b])*I-[r,i,j]"),
    red("1a3.pp", "0<j<b<a<i<r", "I+[r,i,j]*I+[r,a,b] = (I+[a,b,j]-I-[a,b,j]-I0[a,j]+I0[a,b]+I0[b,j])*(I+[r,i,a]-I-[r,i,a]-I+[r,i,j]) + I-[i,b,j]*(I+[r,a,j]-I+[r,a,b]) + (I0[i,b]-I0[i,j]+I0[b,j])*I+[r,a,b]"),
    red("1a3.mm", "0<j<b<a<i<r", "I-[r,i,j]*I-[r,a,b] = -I-[i,b,j]*I-[r,a,b] - I+[a,b,j]*I-[r,i,j]"),
    red("1a3.pm", "0<j<b<a<i<r", "I+[r,i,j]*I-[r,a,b] = I+[a,b,j]*(I+[r,i,b]-I-[r,i,b]-I+[r,i,j]) + (I0[b,j]-I0[i,j]+I0[i,b]-I-[i,b,j])*I-[r,a,b]"),
    red("1a3.mp", "0<j<b<a<i<r", "I-[r,i,j]*I+[r,a,b] = I-[i,b,j]*(I+[r,a,j]-I+[r,a,b]) + (I-[a,b,j]-I+[a,b,j]-I0[b,j]+I0[a,j]-I0[a,b])*I-[r,i,j]"),
    red("1b.a=i", "0<b<j<i<r", "I?[r,i,j]*I?[r,i,b] = 0"),
    red("1b.a=j", "0<b<j<i<r", "I?[r,i,j]*I?[r,j,b] = 0"),
    red("1b.b=j", "0<j<a<i<r", "I?[r,i,j]*I?[r,a,j] = 0"),
    red("1c", "0<j<i<r", "I?[r,i,j]*I?[r,i,j] = 0"),
    red("1.0a", "1<i<b<a<r", "I0[r,i]*I+[r,a,b] = I0[b,i]*I+[r,a,b]"),
    red("1.0a", "1<i<b<a<r", "I0[r,i]*I-[r,a,b] = I0[b,i]*I-[r,a,b]"),
    red("1.0b", "0<b<i<a<r", "I0[r,i]*I+[r,a,b] = -I0[i,b]*I+[r,a,b]"),
    red("1.0b", "0<b<i<a<r", "I0[r,i]*I-[r,a,b] = -I0[i,b]*I-[r,a,b]"),
    red("1.0c", "0<b<a<i<r", "I0[r,i]*I+[r,a,b] = -I0[i,b]*I+[r,a,b]"),
    red("1.0c", "0<b<a<i<r", "I0[r,i]*I-[r,a,b] = -I0[i,b]*I-[r,a,b]"),
    red("1.0d", "0<b<i<r", "I0[r,i]*I?[r,i,b] = 0"),
    red("1.0e", "1<i<a<r", "I0[r,i]*I?[r,a,i] = 0"),
    red("1.00", "2<=a<=i<r", "I0[r,i]*I0[r,a] = 0"),
    // Outer index of the first factor is the middle index of the second.
    red("2a1.pp", "0<j<i<b<r<s", "I+[r,i,j]*I+[s,r,b] = I+[b,i,j]*(I+[s,r,b]-I+[s,r,i])"),
    red("2a1.mm", "0<j<i<b<r<s", "I-[r,i,j]*I-[s,r,b] = I-[b,i,j]*I-[s,r,b] + I-[r,i,j]*I+[s,b,j]"),
    red("2a1.pm", "0<j<i<b<r<s", "I+[r,i,j]*I-[s,r,b] = I+[b,i,j]*I-[s,r,b] + I+[r,i,j]*I+[s,b,i]"),
    red("2a1.mp", "0<j<i<b<r<s", "I-[r,i,j]*I+[s,r,b] = I-[b,i,j]*(I+[s,r,b]-I+[s,r,j])"),
    red("2a2.pp", "0<j<b<i<r<s", "I+[r,i,j]*I+[s,r,b] = (I-[i,b,j]-I+[i,b,j]-I0[b,j]+I0[i,j]-I0[i,b])*(I+[s,r,i]-I+[s,r,b])"),
    red("2a2.mm", "0<j<b<i<r<s", "I-[r,i,j]*I-[s,r,b] = I-[r,i,j]*I+[s,b,j] - I-[i,b,j]*I-[s,r,b]"),
    red("2a2.pm", "0<j<b<i<r<s", "I+[r,i,j]*I-[s,r,b] = (I+[r,i,j]-I+[r,i,b])*I+[s,b,j] + (-I-[i,b,j]+I+[i,b,j]+I0[b,j]-I0[i,j]+I0[i,b])*I-[s,r,b]"),
    red("2a2.mp", "0<j<b<i<r<s", "I-[r,i,j]*I+[s,r,b] = I-[i,b,j]*(I+[s,r,j]-I+[s,r,b])"),
    red("2a3.pp", "0<b<j<i<r<s", "I+[r,i,j]*I+[s,r,b] = (I-[i,j,b]-I+[i,j,b]-I0[j,b]+I0[i,b]-I0[i,j])*(I+[s,r,b]-I+[s,r,i])"),
    red("2a3.mm", "0<b<j<i<r<s", "I-[r,i,j]*I-[s,r,b] = I-[r,i,j]*I-[s,j,b] - I+[i,j,b]*I-[s,r,b]"),
    red("2a3.pm", "0<b<j<i<r<s", "I+[r,i,j]*I-[s,r,b] = (I+[r,i,j]-I+[r,i,b])*I-[s,j,b] + (I-[i,j,b]-I+[i,j,b]-I0[j,b]+I0[i,b]-I0[i,j])*I-[s,r,b]"),
    red("2a3.mp", "0<b<j<i<r<s", "I-[r,i,j]*I+[s,r,b] = I+[i,j,b]*(I+[s,r,j]-I+[s,r,b])"),
    red("2a.b=i", "0<j<i<r<s", "I?[r,i,j]*I?[s,r,i] = 0"),
    red("2a.b=j", "0<j<i<r<s", "I?[r,i,j]*I?[s,r,j] = 0"),
    red("2b.i<b", "1<i<b<r<s", "I0[r,i]*I+[s,r,b] = I0[b,i]*I+[s,r,b]"),
    red("2b.i<b", "1<i<b<r<s", "I0[r,i]*I-[s,r,b] = I0[b,i]*I-[s,r,b]"),
    red("2b.b<i", "0<b<i<r<s", "I0[r,i]*I+[s,r,b] = -I0[i,b]*I+[s,r,b]"),
    red("2b.b<i", "0<b<i<r<s", "I0[r,i]*I-[s,r,b] = -I0[i,b]*I-[s,r,b]"),
    red("2b.b=i", "1<i<r<s", "I0[r,i]*I?[s,r,i] = 0"),
    red("2c", "0<j<i<r<s", "I+[r,i,j]*I0[s,r] = I+[r,i,j]*I0[s,j]"),
    red("2c", "0<j<i<r<s", "I-[r,i,j]*I0[s,r] = I-[r,i,j]*I0[s,j]"),
    red("2d", "1<i<r<s", "I0[r,i]*I0[s,r] = 0"),
    // Shared middle index.
    red("3a.j<b.pp", "0<j<b<i<r<s", "I+[r,i,j]*I+[s,i,b] = (I-[i,b,j]-I0[b,j]+I0[i,j]-I0[i,b]-I+[i,b,j])*I-[s,r,i]"),
    red("3a.j<b.mm", "0<j<b<i<r<s", "I-[r,i,j]*I-[s,i,b] = I-[r,b,j]*I-[s,i,b] + I-[r,i,j]*I+[s,b,j]"),
    red("3a.j<b.pm", "0<j<b<i<r<s", "I+[r,i,j]*I-[s,i,b] = (I+[r,i,j]-I+[r,i,b])*I+[s,b,j]"),
    red("3a.j<b.mp", "0<j<b<i<r<s", "I-[r,i,j]*I+[s,i,b] = I-[r,b,j]*(I+[s,i,b]-I+[s,i,j])"),
    red("3a.b<j.pp", "0<b<j<i<r<s", "I+[r,i,j]*I+[s,i,b] = (-I-[i,j,b]+I+[i,j,b]+I0[j,b]-I0[i,b]+I0[i,j])*I-[s,r,i]"),
    red("3a.b<j.mm", "0<b<j<i<r<s", "I-[r,i,j]*I-[s,i,b] = I-[r,i,j]*I-[s,j,b] + I+[r,j,b]*I-[s,i,b]"),
    red("3a.b<j.pm", "0<b<j<i<r<s", "I+[r,i,j]*I-[s,i,b] = (I+[r,i,j]-I+[r,i,b])*I-[s,j,b]"),
    red("3a.b<j.mp", "0<b<j<i<r<s", "I-[r,i,j]*I+[s,i,b] = I+[r,j,b]*(I+[s,i,b]-I+[s,i,j])"),
    red("3a.b=j", "0<j<i<r<s", "I?[r,i,j]*I?[s,i,j] = 0"),
    red("3b", "0<b<i<r<s", "I0[r,i]*I+[s,i,b] = I0[r,b]*I+[s,i,b]"),
    red("3b", "0<b<i<r<s", "I0[r,i]*I-[s,i,b] = I0[r,b]*I-[s,i,b]"),
    red("3c", "0<j<i<r<s", "I+[r,i,j]*I0[s,i] = I+[r,i,j]*I0[s,j]"),
    red("3c", "0<j<i<r<s", "I-[r,i,j]*I0[s,i] = I-[r,i,j]*I0[s,j]"),
    red("3d", "1<i<r<s", "I0[r,i]*I0[s,i] = 0"),
    // Exchange identities among already reduced products.
    e("d.1", "0<j<t<s<i<r", "I-[i,s,j]*I-[r,t,j] = I-[s,t,j]*I-[r,i,j]"),
    e("d.2", "0<j<t<s<i<r", "I-[i,t,j]*I-[r,s,j] = -I-[s,t,j]*I-[r,i,j]"),
    e("d.1", "0<t<s<i<r", "I0[i,s]*I0[r,t] = I0[s,t]*I0[r,i]"),
    e("d.2", "0<t<s<i<r", "I0[i,t]*I0[r,s] = -I0[s,t]*I0[r,i]"),
    e("e.1", "0<j<i<t<s<r", "I-[s,t,i]*I+[r,i,j] = I+[t,i,j]*I-[r,s,i]"),
    e("e.2", "0<j<i<t<s<r", "I+[s,i,j]*I-[r,t,i] = -I+[t,i,j]*I-[r,s,i]"),
];

fn entries(t: RelationTable) -> &'static [Entry] {
    match t {
        RelationTable::Orbit => ORBIT_TABLE,
        RelationTable::C => C_TABLE,
        RelationTable::D => D_TABLE,
        RelationTable::I => I_TABLE,
        RelationTable::ID0 => ID0_TABLE,
    }
}

/// Printable identities of a table, with their index chains.
pub fn table_identities(t: RelationTable) -> Vec<(String, String, String)> {
    entries(t).iter().map(|e| (e.label.to_string(), e.chain.to_string(), e.identity.to_string())).collect()
}

/// Parsed chain `c0 < v1 < v2 <= v3 ...`: a literal lower bound, then
/// variables each tagged with whether the preceding relation is strict.
fn parse_chain(chain: &str) -> Result<(i64, Vec<(String, bool)>)> {
    let mut operands = Vec::new();
    let mut strict = Vec::new();
    let mut rest = chain;
    loop {
        match rest.find('<') {
            Some(k) => {
                operands.push(rest[..k].trim());
                let tail = &rest[k + 1..];
                match tail.strip_prefix('=') {
                    Some(t) => {
                        strict.push(false);
                        rest = t;
                    }
                    None => {
                        strict.push(true);
                        rest = tail;
                    }
                }
            }
            None => {
                operands.push(rest.trim());
                break;
            }
        }
    }
    let lower = operands[0].parse::<i64>().map_err(|_| invalid(format!("chain `{chain}` must start with a literal")))?;
    Ok((lower, operands[1..].iter().map(|v| v.to_string()).zip(strict).collect()))
}

fn enumerate_chain(chain: &str, m: u32) -> Result<Vec<HashMap<String, i64>>> {
    let (lower, vars) = parse_chain(chain)?;
    let mut out = Vec::new();
    fn go(
        vars: &[(String, bool)],
        k: usize,
        prev: i64,
        m: i64,
        env: &mut HashMap<String, i64>,
        out: &mut Vec<HashMap<String, i64>>,
    ) {
        if k == vars.len() {
            out.push(env.clone());
            return;
        }
        let (name, strict) = &vars[k];
        let start = if *strict { prev + 1 } else { prev };
        for v in start..=m {
            env.insert(name.clone(), v);
            go(vars, k + 1, v, m, env, out);
        }
        env.remove(name);
    }
    go(&vars, 0, lower, m as i64, &mut HashMap::new(), &mut out);
    Ok(out)
}

fn expand_placeholders(identity: &str) -> Vec<String> {
    let slots = identity.matches("I?").count();
    (0..1usize << slots)
        .map(|mask| {
            let mut s = String::with_capacity(identity.len());
            let mut k = 0;
            let mut rest = identity;
            while let Some(pos) = rest.find("I?") {
                s.push_str(&rest[..pos]);
                s.push_str(if mask >> k & 1 == 0 { "I+" } else { "I-" });
                k += 1;
                rest = &rest[pos + 2..];
            }
            s.push_str(rest);
            s
        })
        .collect()
}

/// `(r, i)` of an `I` atom.
fn i_outer(kind: AtomKind, v: &[i64]) -> (i64, i64) {
    debug_assert!(kind.is_i());
    (v[0], v[1])
}

/// Whether a formal two-factor `I` word satisfies the reduced-form
/// conditions: outer indices increase and the middle index of the later
/// factor avoids both indices of the earlier one.
fn reduced_pair(w: &[expr::FormalAtom]) -> bool {
    let is: Vec<_> = w.iter().filter(|(k, _)| k.is_i()).map(|(k, v)| i_outer(*k, v)).collect();
    if is.len() != 2 {
        return true;
    }
    let (mut x, mut y) = (is[0], is[1]);
    if y.0 < x.0 {
        std::mem::swap(&mut x, &mut y);
    }
    x.0 < y.0 && y.1 != x.0 && y.1 != x.1
}

/// Outcome of one table entry across every admissible tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityOutcome {
    pub label: String,
    pub identity: String,
    pub tuples: usize,
    pub passed: bool,
    pub first_failure: Option<String>,
}

/// Outcome of [`verify_relation_tables`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub table: RelationTable,
    pub n: u32,
    pub m: u32,
    pub identities: Vec<IdentityOutcome>,
    pub passed: bool,
}

fn describe(env: &HashMap<String, i64>) -> String {
    let mut v: Vec<_> = env.iter().filter(|(k, _)| k.as_str() != "n").collect();
    v.sort();
    v.into_iter().map(|(k, x)| format!("{k}={x}")).collect::<Vec<_>>().join(",")
}

/// Expands both sides of every identity of `table` in normal form, over all
/// admissible index tuples on `p.points()` points.
pub fn verify_relation_tables(p: &Presentation, table: RelationTable) -> Result<RelationReport> {
    if p.family() != Family::Orbit {
        return Err(invalid("relation tables are stated for the orbit ring"));
    }
    match table {
        RelationTable::C if p.n_even() => return Err(Error::ParityMismatch("the C table needs odd n".into())),
        RelationTable::D | RelationTable::I | RelationTable::ID0 if !p.n_even() => {
            return Err(Error::ParityMismatch(format!("the {table:?} table needs even n")))
        }
        _ => {}
    }
    let mut identities = Vec::new();
    for entry in entries(table) {
        for text in expand_placeholders(entry.identity) {
            let (lhs, rhs) = text.split_once('=').ok_or_else(|| invalid("identity without `=`"))?;
            let (lhs, rhs) = (expr::parse(lhs)?, expr::parse(rhs)?);
            let mut outcome = IdentityOutcome {
                label: entry.label.to_string(),
                identity: text.clone(),
                tuples: 0,
                passed: true,
                first_failure: None,
            };
            for mut env in enumerate_chain(entry.chain, p.points())? {
                env.insert("n".into(), p.n() as i64);
                outcome.tuples += 1;
                let l = expr::eval(&lhs, p, &env)?;
                let r = expr::eval(&rhs, p, &env)?;
                let mut failure = None;
                if l != r {
                    failure = Some(format!("{}: lhs {} != rhs {}", describe(&env), l, r));
                } else if entry.reduction {
                    let formal = expr::expand_formal(&rhs, &env)?;
                    if let Some((_, w)) = formal.iter().find(|(_, w)| !reduced_pair(w)) {
                        failure = Some(format!("{}: unreduced term {:?}", describe(&env), w));
                    }
                }
                if failure.is_some() {
                    outcome.passed = false;
                    outcome.first_failure = failure;
                    break;
                }
            }
            identities.push(outcome);
        }
    }
    let passed = identities.iter().all(|o| o.passed);
    Ok(RelationReport { table, n: p.n(), m: p.points(), identities, passed })
}

/// Ordered `B` monomials with `q` factors: first indices distinct, increasing, and at least 2.
pub fn b_monomials(p: &Presentation, q: usize) -> Vec<Vec<crate::algebra::Gen>> {
    fn go(p: &Presentation, start: u32, left: usize, acc: &mut Vec<crate::algebra::Gen>, out: &mut Vec<Vec<crate::algebra::Gen>>) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        for i in start..=p.points() {
            for g in p.generators_at(i) {
                acc.push(g);
                go(p, i + 1, left - 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(p, 2, q, &mut Vec::new(), &mut out);
    out
}

/// A-basis normal form of `B[i1,j1]*...*B[iq,jq]`. Needs even `n`.
pub fn b_monomial_element(p: &Presentation, factors: &[crate::algebra::Gen]) -> Result<Element> {
    let mut acc = p.one();
    for g in factors {
        acc = p.multiply(&acc, &derived_class_element(p, &DerivedClass::B(g.i, g.j))?);
    }
    Ok(acc)
}

/// Coefficient vectors of the generators of grade one in the A basis.
fn degree_one_matrix(p: &Presentation, classes: &[DerivedClass]) -> Result<crate::linalg::Matrix> {
    let basis = p.basis_in_grade(1);
    let index: HashMap<_, _> = basis.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect();
    let rows = classes
        .iter()
        .map(|c| {
            derived_class_element(p, c)?
                .coordinates(&basis, &index, p.coeff())
                .ok_or_else(|| invalid("derived class left grade one"))
        })
        .collect::<Result<Vec<_>>>()?;
    crate::linalg::Matrix::from_rows(p.coeff(), basis.len(), rows)
}

/// The degree-one classes of a layer: `C+, C-, C0` or `D+, D-, D0` and `A[1,0]`.
pub fn layer_classes(p: &Presentation, layer: Layer) -> Vec<DerivedClass> {
    let m = p.points();
    let mut out = Vec::new();
    for i in 1..=m {
        match layer {
            Layer::C => out.push(DerivedClass::CZero(i)),
            Layer::D if i == 1 => out.push(DerivedClass::A10),
            Layer::D => out.push(DerivedClass::DZero(i)),
        }
        for j in 1..i {
            match layer {
                Layer::C => out.extend([DerivedClass::CPlus(i, j), DerivedClass::CMinus(i, j)]),
                Layer::D => out.extend([DerivedClass::DPlus(i, j), DerivedClass::DMinus(i, j)]),
            }
        }
    }
    out
}

/// Rank of the change of basis from the A generators to a derived layer.
pub fn layer_rank(p: &Presentation, layer: Layer) -> Result<usize> {
    crate::linalg::rank(&degree_one_matrix(p, &layer_classes(p, layer))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_element;
    use crate::scalar::Coeff;

    fn ring(n: u32, m: u32) -> Presentation {
        Presentation::orbit(n, m, Coeff::Rational).unwrap()
    }

    #[test]
    fn class_examples() {
        let p = ring(4, 3);
        assert_eq!(derived_class_element(&p, &DerivedClass::CZero(2)).unwrap(), gen(&p, 2, 0));
        assert_eq!(
            derived_class_element(&p, &DerivedClass::DMinus(2, 1)).unwrap(),
            parse_element(&p, "A[2,1] - A[2,-1]").unwrap()
        );
        assert!(derived_class_element(&p, &DerivedClass::B(1, 0)).unwrap().is_zero());
        assert!(matches!(
            derived_class_element(&ring(3, 2), &DerivedClass::DZero(2)),
            Err(Error::ParityMismatch(_))
        ));
        assert!(derived_class_element(&p, &DerivedClass::IPlus(3, 3, 1)).is_err());
    }

    #[test]
    fn inverse_examples() {
        let p = ring(4, 2);
        let half = Scalar::from_ratio(Coeff::Rational, 1, 2).unwrap();
        let one = Scalar::one(Coeff::Rational);
        assert_eq!(a_in_derived_basis(&p, 2, 0, Layer::C).unwrap(), vec![(one.clone(), DerivedClass::CZero(2))]);
        assert_eq!(
            a_in_derived_basis(&p, 2, 1, Layer::C).unwrap(),
            vec![
                (half.clone(), DerivedClass::CPlus(2, 1)),
                (half.neg_ref(), DerivedClass::CMinus(2, 1)),
                (half.clone(), DerivedClass::CZero(2)),
                (half.neg_ref(), DerivedClass::CZero(1)),
            ]
        );
        assert_eq!(
            a_in_derived_basis(&p, 2, -1, Layer::D).unwrap(),
            vec![
                (half.clone(), DerivedClass::DPlus(2, 1)),
                (half.neg_ref(), DerivedClass::DMinus(2, 1)),
                (half, DerivedClass::DZero(2)),
                (one, DerivedClass::A10),
            ]
        );
        let f2 = Presentation::orbit(4, 2, Coeff::prime(2).unwrap()).unwrap();
        assert!(matches!(a_in_derived_basis(&f2, 2, 1, Layer::C), Err(Error::TwoNotInvertible(_))));
    }

    #[test]
    fn round_trip_all_generators() {
        for (n, layers) in [(3, vec![Layer::C]), (4, vec![Layer::C, Layer::D])] {
            for c in [Coeff::Rational, Coeff::prime(3).unwrap()] {
                let p = Presentation::orbit(n, 4, c).unwrap();
                for &layer in &layers {
                    for g in p.generators() {
                        let comb = a_in_derived_basis(&p, g.i, g.j, layer).unwrap();
                        assert_eq!(evaluate_combination(&p, &comb).unwrap(), gen(&p, g.i, g.j), "{g:?} {layer:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn layers_are_bases() {
        for m in 1..=4 {
            let p = ring(4, m);
            let dim = p.basis_in_grade(1).len();
            assert_eq!(layer_classes(&p, Layer::C).len(), dim);
            assert_eq!(layer_rank(&p, Layer::C).unwrap(), dim);
            assert_eq!(layer_rank(&p, Layer::D).unwrap(), dim);
            let f3 = p.with_coeff(Coeff::prime(3).unwrap());
            assert_eq!(layer_rank(&f3, Layer::D).unwrap(), dim);
        }
    }

    #[test]
    fn class_text_round_trip() {
        for s in ["C+[3,1]", "C-[2,1]", "C0[4]", "B[3,-2]", "D+[2,1]", "D0[3]", "I+[4,3,1]", "I-[3,2,1]", "I0[3,2]", "A[1,0]"] {
            assert_eq!(s.parse::<DerivedClass>().unwrap().to_string(), s);
        }
        assert!("A[2,0]".parse::<DerivedClass>().is_err());
    }

    #[test]
    fn chain_enumeration() {
        assert_eq!(enumerate_chain("0<j<i<r", 3).unwrap().len(), 1);
        assert_eq!(enumerate_chain("0<j<i<r", 4).unwrap().len(), 4);
        // 2 <= a <= i < r <= 4: (2,2,3),(2,2,4),(2,3,4),(3,3,4).
        assert_eq!(enumerate_chain("2<=a<=i<r", 4).unwrap().len(), 4);
        assert_eq!(enumerate_chain("0<j<t<s<i<r", 4).unwrap().len(), 0);
    }

    #[test]
    fn placeholder_expansion() {
        let v = expand_placeholders("I?[r,i,j]*I?[r,i,b] = 0");
        assert_eq!(v.len(), 4);
        assert!(v.contains(&"I-[r,i,j]*I+[r,i,b] = 0".to_string()));
    }

    #[test]
    fn orbit_table_holds() {
        for n in 2..=5 {
            let r = verify_relation_tables(&ring(n, 4), RelationTable::Orbit).unwrap();
            assert!(r.passed, "{:?}", r.identities.iter().find(|o| !o.passed));
        }
    }

    #[test]
    fn c_table_example() {
        let p = ring(3, 3);
        let lhs = parse_element(&p, "C+[3,2]*C+[3,1]").unwrap();
        let rhs = parse_element(&p, "-C+[2,1]*C+[3,1] + C+[2,1]*C+[3,2]").unwrap();
        assert_eq!(lhs, rhs);
        let r = verify_relation_tables(&p, RelationTable::C).unwrap();
        assert!(r.passed, "{:?}", r.identities.iter().find(|o| !o.passed));
    }

    #[test]
    fn d_and_id0_tables_hold() {
        let p = ring(4, 4);
        for t in [RelationTable::D, RelationTable::ID0] {
            let r = verify_relation_tables(&p, t).unwrap();
            assert!(r.passed, "{:?}", r.identities.iter().find(|o| !o.passed));
        }
    }

    #[test]
    fn parity_is_enforced() {
        assert!(matches!(verify_relation_tables(&ring(4, 3), RelationTable::C), Err(Error::ParityMismatch(_))));
        assert!(matches!(verify_relation_tables(&ring(3, 3), RelationTable::I), Err(Error::ParityMismatch(_))));
    }

    #[test]
    fn i_table_holds_on_five_points() {
        let r = verify_relation_tables(&ring(2, 5), RelationTable::I).unwrap();
        assert!(r.passed, "{:?}", r.identities.iter().find(|o| !o.passed));
    }

    #[test]
    fn reduced_pair_detection() {
        let w = |a: Vec<i64>, b: Vec<i64>| vec![(AtomKind::IPlus, a), (AtomKind::IMinus, b)];
        assert!(reduced_pair(&w(vec![3, 2, 1], vec![5, 4, 1])));
        assert!(!reduced_pair(&w(vec![4, 2, 1], vec![4, 3, 1])));
        assert!(!reduced_pair(&w(vec![3, 2, 1], vec![5, 3, 1])));
    }
}

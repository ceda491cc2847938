//! Additive cohomology tables of the sphere orbit configuration space, the
//! projective configuration space, and its punctured variant, plus the
//! even-`n` differential and its permanent cycles.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::algebra::{Monomial, Presentation};
use crate::error::{invalid, Error, Result};
use crate::invariants::{invariant_poincare, SpaceKind};
use crate::linalg::{rank, smith_diagonal, Matrix};
use crate::presentations::b_monomials;
use crate::scalar::Coeff;

/// Coefficients for additive tables: a field, or the integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableCoeff {
    Field(Coeff),
    Integers,
}

impl TableCoeff {
    /// Field used for rank computations; the integers use `Q` for free ranks.
    fn field(self) -> Coeff {
        match self {
            TableCoeff::Field(c) => c,
            TableCoeff::Integers => Coeff::Rational,
        }
    }

    fn require_two_invertible(self) -> Result<()> {
        match self {
            TableCoeff::Field(c) => c.require_two_invertible(),
            TableCoeff::Integers => Err(Error::TwoNotInvertible("Z".into())),
        }
    }
}

impl fmt::Display for TableCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableCoeff::Field(c) => write!(f, "{c}"),
            TableCoeff::Integers => write!(f, "Z"),
        }
    }
}

impl FromStr for TableCoeff {
    type Err = Error;

    fn from_str(s: &str) -> Result<TableCoeff> {
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "q" => Ok(TableCoeff::Field(Coeff::Rational)),
            "z" => Ok(TableCoeff::Integers),
            _ => {
                let p = s
                    .strip_prefix('f')
                    .and_then(|d| d.parse::<u64>().ok())
                    .ok_or_else(|| invalid(format!("unknown coefficient mode `{s}`")))?;
                Ok(TableCoeff::Field(Coeff::prime(p)?))
            }
        }
    }
}

/// Exterior classes adjoined to the invariant rings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjunctName {
    Iota,
    Lambda,
    Omega,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExteriorAdjunct {
    pub name: AdjunctName,
    pub degree: u32,
    /// `None` for infinite order.
    pub torsion_order: Option<u32>,
}

impl ExteriorAdjunct {
    pub fn iota(n: u32) -> ExteriorAdjunct {
        ExteriorAdjunct { name: AdjunctName::Iota, degree: n, torsion_order: None }
    }

    pub fn lambda(n: u32) -> ExteriorAdjunct {
        ExteriorAdjunct { name: AdjunctName::Lambda, degree: n, torsion_order: Some(2) }
    }

    pub fn omega(n: u32) -> ExteriorAdjunct {
        ExteriorAdjunct { name: AdjunctName::Omega, degree: 2 * n - 1, torsion_order: None }
    }
}

/// One degree of a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupEntry {
    pub degree: usize,
    pub rank: usize,
    pub torsion: Vec<String>,
}

/// Cohomology groups by degree; degrees with a zero group are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedGroupTable {
    pub space: String,
    pub n: u32,
    pub k: u32,
    pub coeff: String,
    pub groups: Vec<GroupEntry>,
}

impl GradedGroupTable {
    fn build(space: &str, n: u32, k: u32, coeff: TableCoeff, cells: BTreeMap<usize, (usize, usize)>) -> Self {
        let groups = cells
            .into_iter()
            .filter(|(_, (r, t))| *r > 0 || *t > 0)
            .map(|(degree, (rank, t))| GroupEntry { degree, rank, torsion: vec!["Z/2".to_string(); t] })
            .collect();
        GradedGroupTable { space: space.into(), n, k, coeff: coeff.to_string(), groups }
    }

    pub fn rank(&self, degree: usize) -> usize {
        self.groups.iter().find(|g| g.degree == degree).map_or(0, |g| g.rank)
    }

    pub fn torsion(&self, degree: usize) -> usize {
        self.groups.iter().find(|g| g.degree == degree).map_or(0, |g| g.torsion.len())
    }

    /// `(degree, rank)` pairs of the free part.
    pub fn ranks(&self) -> Vec<(usize, usize)> {
        self.groups.iter().filter(|g| g.rank > 0).map(|g| (g.degree, g.rank)).collect()
    }
}

impl fmt::Display for GradedGroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} n={} k={} over {}", self.space, self.n, self.k, self.coeff)?;
        for g in &self.groups {
            let mut parts = Vec::new();
            if g.rank > 0 {
                parts.push(if g.rank == 1 { "Z".to_string() } else { format!("Z^{}", g.rank) });
            }
            if !g.torsion.is_empty() {
                parts.push(if g.torsion.len() == 1 { "Z/2".to_string() } else { format!("(Z/2)^{}", g.torsion.len()) });
            }
            if self.coeff != "Z" {
                writeln!(f, "  H^{:<3} rank {}", g.degree, g.rank)?;
            } else {
                writeln!(f, "  H^{:<3} {}", g.degree, parts.join(" + "))?;
            }
        }
        Ok(())
    }
}

fn add_cell(cells: &mut BTreeMap<usize, (usize, usize)>, degree: usize, rank: usize, torsion: usize) {
    let e = cells.entry(degree).or_insert((0, 0));
    e.0 += rank;
    e.1 += torsion;
}

/// Elementary symmetric polynomial `e_j` of `values`.
pub fn elementary_symmetric(values: &[usize], j: usize) -> usize {
    let mut e = vec![0usize; values.len() + 1];
    e[0] = 1;
    for &v in values {
        for d in (1..e.len()).rev() {
            e[d] += e[d - 1] * v;
        }
    }
    e.get(j).copied().unwrap_or(0)
}

/// Permanent cycles of the orbit ring on `k-1` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermanentCycles {
    pub k: u32,
    /// `dims[j] = dim K^j`.
    pub dims: Vec<usize>,
    /// Basis of each `K^j` as ordered `B` monomials.
    pub bases: Vec<Vec<String>>,
}

pub fn permanent_cycles(n: u32, k: u32) -> Result<PermanentCycles> {
    if n % 2 == 1 {
        return Err(Error::ParityMismatch("permanent cycles are defined for even n".into()));
    }
    if k < 2 {
        return Err(invalid("need k >= 2"));
    }
    let p = Presentation::orbit(n, k - 1, Coeff::Rational)?;
    let mut dims = Vec::new();
    let mut bases = Vec::new();
    for j in 0..k as usize {
        let b: Vec<String> = b_monomials(&p, j)
            .into_iter()
            .map(|f| {
                if f.is_empty() {
                    "1".to_string()
                } else {
                    f.iter().map(|g| format!("B[{},{}]", g.i, g.j)).collect::<Vec<_>>().join("*")
                }
            })
            .collect();
        dims.push(b.len());
        bases.push(b);
    }
    Ok(PermanentCycles { k, dims, bases })
}

/// Integer matrix of `d_n` from fiber grade `g` (monomials with `g` factors
/// on `k-1` points) to `iota_n` times grade `g-1`. Columns follow the source basis.
pub fn d_n_integer_matrix(n: u32, k: u32, g: usize) -> Result<Vec<Vec<i64>>> {
    if n % 2 == 1 {
        return Err(Error::ParityMismatch("d_n is nonzero only for even n".into()));
    }
    if k < 2 {
        return Err(invalid("need k >= 2"));
    }
    let p = Presentation::orbit(n, k - 1, Coeff::Rational)?;
    let src = p.basis_in_grade(g);
    if g == 0 {
        return Ok(Vec::new());
    }
    let dst = p.basis_in_grade(g - 1);
    let index: HashMap<&Monomial, usize> = dst.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let mut rows = vec![vec![0i64; src.len()]; dst.len()];
    for (c, m) in src.iter().enumerate() {
        let f = m.factors();
        for t in 0..f.len() {
            let mut rest = f.to_vec();
            rest.remove(t);
            let r = index[&Monomial::from_sorted(rest)?];
            rows[r][c] += if t % 2 == 0 { 2 } else { -2 };
        }
    }
    Ok(rows)
}

/// `d_n` from fiber degree `q` (a multiple of `n-1`) over the given field.
pub fn d_n_matrix(n: u32, k: u32, q: usize, coeff: Coeff) -> Result<Matrix> {
    if n % 2 == 1 {
        return Err(Error::ParityMismatch("d_n is nonzero only for even n".into()));
    }
    let g = (n - 1) as usize;
    if !q.is_multiple_of(g) {
        return Err(invalid(format!("fiber degree {q} is not a multiple of {g}")));
    }
    let rows = d_n_integer_matrix(n, k, q / g)?;
    let cols = if k >= 2 { Presentation::orbit(n, k - 1, coeff)?.basis_in_grade(q / g).len() } else { 0 };
    if rows.is_empty() {
        return Ok(Matrix::zeros(coeff, 0, cols));
    }
    Ok(Matrix::from_i64(coeff, &rows))
}

fn d_rank(n: u32, k: u32, g: usize, coeff: Coeff) -> Result<usize> {
    let m = d_n_matrix(n, k, g * (n - 1) as usize, coeff)?;
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0);
    }
    rank(&m)
}

/// Cohomology of the orbit configuration space of `k` points on `S^n`.
pub fn sphere_orbit_cohomology(n: u32, k: u32, coeff: TableCoeff) -> Result<GradedGroupTable> {
    if k < 2 {
        return Err(invalid("need k >= 2"));
    }
    let m = k - 1;
    let g = (n - 1) as usize;
    let n_us = n as usize;
    let mut cells = BTreeMap::new();
    let fiber = Presentation::orbit(n, m, coeff.field())?.poincare_polynomial();
    if n % 2 == 1 {
        for (j, &b) in fiber.iter().enumerate() {
            add_cell(&mut cells, j * g, b, 0);
            add_cell(&mut cells, j * g + n_us, b, 0);
        }
    } else {
        if coeff == TableCoeff::Field(Coeff::Prime(2)) {
            return Err(Error::TwoNotInvertible("F2 (even n needs characteristic 0 or odd)".into()));
        }
        let f = coeff.field();
        for j in 0..=m as usize {
            let out_rank = d_rank(n, k, j, f)?;
            add_cell(&mut cells, j * g, fiber[j] - out_rank, 0);
            let in_rank = if j < m as usize { d_rank(n, k, j + 1, f)? } else { 0 };
            let mut torsion = 0;
            if coeff == TableCoeff::Integers && j < m as usize {
                let rows = d_n_integer_matrix(n, k, j + 1)?;
                torsion = smith_diagonal(&rows).iter().filter(|d| !d.is_one() && **d != -BigInt::one()).count();
            }
            add_cell(&mut cells, j * g + n_us, fiber[j] - in_rank, torsion);
        }
    }
    Ok(GradedGroupTable::build("sphere-orbit", n, k, coeff, cells))
}

/// Table predicted from the dimensions of the permanent cycles (even `n`).
pub fn sphere_table_from_k(n: u32, k: u32, coeff: TableCoeff) -> Result<GradedGroupTable> {
    let pc = permanent_cycles(n, k)?;
    let g = (n - 1) as usize;
    let mut cells = BTreeMap::new();
    for (j, &d) in pc.dims.iter().enumerate() {
        add_cell(&mut cells, j * g, d, 0);
        add_cell(&mut cells, j * g + 2 * n as usize - 1, d, 0);
        if coeff == TableCoeff::Integers {
            add_cell(&mut cells, j * g + n as usize, 0, d);
        }
    }
    Ok(GradedGroupTable::build("sphere-orbit", n, k, coeff, cells))
}

/// An invariant-ring table together with the ring it was computed in.
#[derive(Clone, Debug)]
pub struct InvariantCohomology {
    pub table: GradedGroupTable,
    pub ring: Presentation,
    pub kind: SpaceKind,
    pub adjunct: Option<ExteriorAdjunct>,
    /// Invariant dimension by grade.
    pub poincare: Vec<usize>,
}

/// Cohomology of the configuration space of `k` points in `RP^n`.
pub fn projective_cohomology(n: u32, k: u32, coeff: TableCoeff) -> Result<InvariantCohomology> {
    coeff.require_two_invertible()?;
    if k < 2 {
        return Err(invalid("need k >= 2"));
    }
    let ring = Presentation::orbit(n, k - 1, coeff.field())?;
    let kind = SpaceKind::for_parity(n, false);
    let poincare = invariant_poincare(&ring, kind)?;
    let adjunct = if n % 2 == 1 { ExteriorAdjunct::iota(n) } else { ExteriorAdjunct::omega(n) };
    let g = (n - 1) as usize;
    let mut cells = BTreeMap::new();
    for (j, &d) in poincare.iter().enumerate() {
        add_cell(&mut cells, j * g, d, 0);
        add_cell(&mut cells, j * g + adjunct.degree as usize, d, 0);
    }
    let table = GradedGroupTable::build("rpn", n, k, coeff, cells);
    Ok(InvariantCohomology { table, ring, kind, adjunct: Some(adjunct), poincare })
}

/// Cohomology of the configuration space of `k` points in `RP^n` minus a point.
pub fn punctured_projective_cohomology(n: u32, k: u32, coeff: TableCoeff) -> Result<InvariantCohomology> {
    coeff.require_two_invertible()?;
    if k < 1 {
        return Err(invalid("need k >= 1"));
    }
    let ring = Presentation::orbit(n, k, coeff.field())?;
    let kind = SpaceKind::for_parity(n, true);
    let poincare = invariant_poincare(&ring, kind)?;
    let g = (n - 1) as usize;
    let mut cells = BTreeMap::new();
    for (j, &d) in poincare.iter().enumerate() {
        add_cell(&mut cells, j * g, d, 0);
    }
    let table = GradedGroupTable::build("rpn-punctured", n, k, coeff, cells);
    Ok(InvariantCohomology { table, ring, kind, adjunct: None, poincare })
}

/// Rational Betti numbers of the ordinary configuration space of `k` points
/// on `S^n`, `n` odd: `(1 + t^n) prod_{i=1}^{k-2} (1 + i t^{n-1})`.
pub fn sphere_configuration_fixture(n: u32, k: u32) -> Result<BTreeMap<usize, usize>> {
    if n.is_multiple_of(2) || k < 2 {
        return Err(invalid("fixture covers odd n and k >= 2"));
    }
    let arnold = Presentation::arnold(n, k - 1, Coeff::Rational)?.poincare_polynomial();
    let g = (n - 1) as usize;
    let mut out = BTreeMap::new();
    for (j, &b) in arnold.iter().enumerate() {
        *out.entry(j * g).or_insert(0) += b;
        *out.entry(j * g + n as usize).or_insert(0) += b;
    }
    out.retain(|_, v| *v > 0);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubReport {
    pub status: String,
    pub detail: String,
}

impl SubReport {
    fn of(ok: bool, detail: String) -> SubReport {
        SubReport { status: if ok { "pass" } else { "fail" }.into(), detail }
    }

    fn skipped(reason: &str) -> SubReport {
        SubReport { status: "skipped".into(), detail: reason.into() }
    }

    pub fn passed(&self) -> bool {
        self.status != "fail"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub n: u32,
    pub k: u32,
    pub sphere_vs_projective: SubReport,
    pub witness: SubReport,
    /// Rank agreement of `Q` and `F_p` for every projective and punctured table.
    pub odd_primes: SubReport,
}

/// Runs the three comparisons for `(n, k)`.
pub fn comparison_reports(n: u32, k: u32) -> Result<ComparisonReport> {
    if n < 2 || k < 2 {
        return Err(invalid("need n >= 2 and k >= 2"));
    }
    let q = TableCoeff::Field(Coeff::Rational);
    let proj = projective_cohomology(n, k, q)?;
    let sphere_vs_projective = if n % 2 == 1 {
        let fixture = sphere_configuration_fixture(n, k)?;
        let ours: BTreeMap<usize, usize> = proj.table.ranks().into_iter().collect();
        SubReport::of(fixture == ours, format!("sphere {fixture:?} vs projective {ours:?}"))
    } else {
        SubReport::skipped("n even")
    };
    let d = (n - 1) as usize;
    let a = proj.table.rank(d);
    let b = punctured_projective_cohomology(n + 1, k, q)?.table.rank(d);
    let witness = SubReport::of(a != b, format!("rank H^{d}(RP^{n}, k={k}) = {a}, rank H^{d}(RP^{} minus a point, k={k}) = {b}", n + 1));
    let mut agree = true;
    let mut notes = Vec::new();
    for p in [3, 5, 7] {
        let fp = TableCoeff::Field(Coeff::prime(p)?);
        let pairs = [
            (proj.table.ranks(), projective_cohomology(n, k, fp)?.table.ranks(), "rpn"),
            (
                punctured_projective_cohomology(n, k, q)?.table.ranks(),
                punctured_projective_cohomology(n, k, fp)?.table.ranks(),
                "rpn-punctured",
            ),
        ];
        for (x, y, name) in pairs {
            if x != y {
                agree = false;
                notes.push(format!("{name} over F{p} differs"));
            }
        }
    }
    let odd_primes = SubReport::of(agree, if agree { "ranks over Q, F3, F5, F7 agree".into() } else { notes.join("; ") });
    Ok(ComparisonReport { n, k, sphere_vs_projective, witness, odd_primes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> TableCoeff {
        TableCoeff::Integers
    }

    fn q() -> TableCoeff {
        TableCoeff::Field(Coeff::Rational)
    }

    #[test]
    fn permanent_cycle_dims() {
        for k in 2..=6u32 {
            let pc = permanent_cycles(4, k).unwrap();
            let odds: Vec<usize> = (2..k as usize).map(|i| 2 * i - 1).collect();
            for (j, &d) in pc.dims.iter().enumerate() {
                assert_eq!(d, elementary_symmetric(&odds, j), "k={k} j={j}");
            }
            assert_eq!(*pc.dims.last().unwrap(), 0, "K^(k-1) vanishes for k={k}");
        }
        assert!(permanent_cycles(3, 3).is_err());
    }

    #[test]
    fn d_n_kernel_is_k() {
        for k in 2..=5u32 {
            for g in 0..k as usize {
                let m = d_n_matrix(2, k, g, Coeff::Rational).unwrap();
                let r = if m.rows() == 0 { 0 } else { rank(&m).unwrap() };
                let odds: Vec<usize> = (2..k as usize).map(|i| 2 * i - 1).collect();
                assert_eq!(m.cols() - r, elementary_symmetric(&odds, g), "k={k} g={g}");
            }
        }
        let m = d_n_matrix(4, 3, 3, Coeff::Rational).unwrap();
        assert_eq!(rank(&m).unwrap(), 1);
        assert_eq!(m.cols(), 4);
        assert!(d_n_matrix(4, 3, 0, Coeff::Rational).unwrap().is_zero());
        assert!(d_n_matrix(3, 3, 2, Coeff::Rational).is_err());
    }

    #[test]
    fn sphere_examples() {
        let t = sphere_orbit_cohomology(3, 2, q()).unwrap();
        assert_eq!(t.ranks(), vec![(0, 1), (2, 1), (3, 1), (5, 1)]);
        for n in [2, 4, 6] {
            let t = sphere_orbit_cohomology(n, 3, z()).unwrap();
            let d = 2 * n as usize - 1;
            assert_eq!((t.rank(d), t.torsion(d)), (1, 3), "n={n}");
            let t = sphere_orbit_cohomology(n, 2, q()).unwrap();
            assert_eq!(t.ranks(), vec![(0, 1), (d, 1)]);
        }
        assert!(sphere_orbit_cohomology(4, 3, TableCoeff::Field(Coeff::Prime(2))).is_err());
    }

    #[test]
    fn integral_tables_match_k_combinatorics() {
        for n in [2, 4] {
            for k in 2..=4 {
                assert_eq!(sphere_orbit_cohomology(n, k, z()).unwrap(), sphere_table_from_k(n, k, z()).unwrap());
                let f3 = TableCoeff::Field(Coeff::prime(3).unwrap());
                assert_eq!(sphere_orbit_cohomology(n, k, f3).unwrap(), sphere_table_from_k(n, k, f3).unwrap());
            }
        }
    }

    #[test]
    fn projective_examples() {
        let t = projective_cohomology(3, 3, q()).unwrap().table;
        assert_eq!(t.ranks(), vec![(0, 1), (2, 1), (3, 1), (5, 1)]);
        for n in [2, 4] {
            let t = projective_cohomology(n, 2, q()).unwrap().table;
            assert_eq!(t.ranks(), vec![(0, 1), (2 * n as usize - 1, 1)]);
        }
        assert_eq!(projective_cohomology(4, 4, q()).unwrap().table.rank(6), 3);
        assert!(matches!(projective_cohomology(3, 3, TableCoeff::Field(Coeff::Prime(2))), Err(Error::TwoNotInvertible(_))));
        assert!(projective_cohomology(3, 3, z()).is_err());
    }

    #[test]
    fn punctured_examples() {
        assert_eq!(punctured_projective_cohomology(3, 2, q()).unwrap().poincare, vec![1, 1, 0]);
        assert_eq!(punctured_projective_cohomology(2, 2, q()).unwrap().table.ranks(), vec![(0, 1), (1, 2), (2, 1)]);
        assert_eq!(punctured_projective_cohomology(4, 2, q()).unwrap().table.ranks(), vec![(0, 1), (3, 2), (6, 1)]);
        let arnold = Presentation::arnold(3, 3, Coeff::Rational).unwrap().poincare_polynomial();
        assert_eq!(&punctured_projective_cohomology(3, 3, q()).unwrap().poincare[..3], &arnold[..]);
    }

    #[test]
    fn comparison_examples() {
        let r = comparison_reports(3, 3).unwrap();
        assert!(r.witness.passed() && r.sphere_vs_projective.passed() && r.odd_primes.passed(), "{r:?}");
        assert!(r.witness.detail.contains("= 1") && r.witness.detail.contains("= 0"));
        let r = comparison_reports(2, 2).unwrap();
        assert_eq!(r.sphere_vs_projective.status, "skipped");
    }

    #[test]
    fn table_json_schema() {
        let t = sphere_orbit_cohomology(2, 3, z()).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["space"], "sphere-orbit");
        assert_eq!(v["coeff"], "Z");
        assert!(v["groups"][0]["torsion"].is_array());
        assert_eq!("f5".parse::<TableCoeff>().unwrap(), TableCoeff::Field(Coeff::Prime(5)));
        assert!("f4".parse::<TableCoeff>().is_err());
    }
}

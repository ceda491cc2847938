//! Dense exact linear algebra over `Q` and `F_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Scalar};

/// Dense matrix whose entries all live in one coefficient field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    coeff: Coeff,
    rows: usize,
    cols: usize,
    data: Vec<Vec<Scalar>>,
}

/// Output of [`rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl Matrix {
    pub fn zeros(coeff: Coeff, rows: usize, cols: usize) -> Matrix {
        Matrix { coeff, rows, cols, data: vec![vec![Scalar::zero(coeff); cols]; rows] }
    }

    pub fn identity(coeff: Coeff, n: usize) -> Matrix {
        let mut m = Matrix::zeros(coeff, n, n);
        for i in 0..n {
            m.data[i][i] = Scalar::one(coeff);
        }
        m
    }

    /// Builds a matrix from rows; all rows must have `cols` entries in mode `coeff`.
    pub fn from_rows(coeff: Coeff, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidParameter(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|s| s.coeff() != coeff) {
                return Err(Error::ModeMismatch(format!("entry in {} inside a {coeff} matrix", bad.coeff())));
            }
        }
        Ok(Matrix { coeff, rows: rows.len(), cols, data: rows })
    }

    pub fn from_i64(coeff: Coeff, rows: &[Vec<i64>]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| r.iter().map(|&x| Scalar::from_i64(coeff, x)).collect())
            .collect();
        Matrix::from_rows(coeff, cols, data).expect("uniform integer matrix")
    }

    pub fn coeff(&self) -> Coeff {
        self.coeff
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, s: Scalar) {
        assert_eq!(s.coeff(), self.coeff, "entry mode differs from matrix mode");
        self.data[r][c] = s;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r]
    }

    pub fn into_rows(self) -> Vec<Vec<Scalar>> {
        self.data
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        self.data.iter().map(|r| r[c].clone()).collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(mut self, other: &Matrix) -> Result<Matrix> {
        if self.coeff != other.coeff {
            return Err(Error::ModeMismatch(format!("{} vs {}", self.coeff, other.coeff)));
        }
        if self.cols != other.cols {
            return Err(Error::InvalidParameter("column counts differ".into()));
        }
        self.data.extend(other.data.iter().cloned());
        self.rows += other.rows;
        Ok(self)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                let mut acc = Scalar::zero(self.coeff);
                for (a, b) in row.iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &a.mul_ref(b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.coeff, self.rows, other.cols);
        for c in 0..other.cols {
            let col = other.column(c);
            for (r, x) in self.mul_vec(&col).into_iter().enumerate() {
                out.data[r][c] = x;
            }
        }
        out
    }

    /// `self - other`.
    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[r][c] = self.data[r][c].sub_ref(&other.data[r][c]);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Scalar::is_zero))
    }

    fn check_uniform(&self) -> Result<()> {
        for row in &self.data {
            if let Some(bad) = row.iter().find(|s| s.coeff() != self.coeff) {
                return Err(Error::ModeMismatch(format!("{} entry in {} matrix", bad.coeff(), self.coeff)));
            }
        }
        Ok(())
    }
}

/// Reduced row-echelon form with exact arithmetic.
pub fn rref(m: &Matrix) -> Result<Rref> {
    m.check_uniform()?;
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(p) = (rank..a.rows).find(|&r| !a.data[r][col].is_zero()) else {
            continue;
        };
        a.data.swap(rank, p);
        let inv = a.data[rank][col].inv();
        let support: Vec<usize> = (col..a.cols).filter(|&c| !a.data[rank][c].is_zero()).collect();
        for &c in &support {
            a.data[rank][c] = a.data[rank][c].mul_ref(&inv);
        }
        let pivot_row = a.data[rank].clone();
        for r in 0..a.rows {
            if r == rank || a.data[r][col].is_zero() {
                continue;
            }
            let f = a.data[r][col].clone();
            for &c in &support {
                let delta = f.mul_ref(&pivot_row[c]);
                a.data[r][c] = a.data[r][c].sub_ref(&delta);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    Ok(Rref { matrix: a, pivots, rank })
}

pub fn rank(m: &Matrix) -> Result<usize> {
    Ok(rref(m)?.rank)
}

/// Basis of the right null space `{v : m v = 0}`.
pub fn kernel_basis(m: &Matrix) -> Result<Vec<Vec<Scalar>>> {
    let Rref { matrix, pivots, .. } = rref(m)?;
    let c = m.coeff;
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&j| !is_pivot[j]) {
        let mut v = vec![Scalar::zero(c); m.cols];
        v[free] = Scalar::one(c);
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = matrix.data[r][free].neg_ref();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Reduced basis of the span of `vectors`, each of length `dim`.
pub fn span_basis(coeff: Coeff, dim: usize, vectors: Vec<Vec<Scalar>>) -> Result<Vec<Vec<Scalar>>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let r = rref(&Matrix::from_rows(coeff, dim, vectors)?)?;
    Ok(r.matrix.data.into_iter().take(r.rank).collect())
}

/// Diagonal of the Smith normal form of an integer matrix (nonzero entries only).
pub fn smith_diagonal(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let nr = a.len();
    let nc = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // Smallest nonzero entry in the remaining block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for r in t..nr {
            for c in t..nc {
                if !a[r][c].is_zero() && best.is_none_or(|(br, bc)| a[r][c].abs() < a[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        let mut clean = true;
        for r in t + 1..nr {
            if !a[r][t].is_zero() {
                let q = a[r][t].div_floor(&a[t][t]);
                for c in t..nc {
                    let d = &q * &a[t][c];
                    a[r][c] -= d;
                }
                clean &= a[r][t].is_zero();
            }
        }
        for c in t + 1..nc {
            if !a[t][c].is_zero() {
                let q = a[t][c].div_floor(&a[t][t]);
                for r in t..nr {
                    let d = &q * &a[r][t];
                    a[r][c] -= d;
                }
                clean &= a[t][c].is_zero();
            }
        }
        if !clean {
            continue;
        }
        // Enforce divisibility of the rest of the block by the pivot.
        let p = a[t][t].clone();
        if let Some(r) = (t + 1..nr).find(|&r| (t + 1..nc).any(|c| !(&a[r][c] % &p).is_zero())) {
            for c in t..nc {
                let x = a[r][c].clone();
                a[t][c] += x;
            }
            continue;
        }
        diag.push(p.abs());
        t += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_is_its_own_rref() {
        let id = Matrix::identity(Coeff::Rational, 3);
        let r = rref(&id).unwrap();
        assert_eq!(r.matrix, id);
        assert_eq!(r.pivots, vec![0, 1, 2]);
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn zero_matrix() {
        let z = Matrix::zeros(Coeff::Rational, 2, 4);
        let r = rref(&z).unwrap();
        assert_eq!(r.matrix, z);
        assert!(r.pivots.is_empty());
        assert_eq!(kernel_basis(&Matrix::zeros(Coeff::Rational, 1, 3)).unwrap().len(), 3);
    }

    #[test]
    fn rank_one_example() {
        let m = Matrix::from_i64(Coeff::Rational, &[vec![1, 2], vec![2, 4]]);
        let r = rref(&m).unwrap();
        assert_eq!(r.matrix, Matrix::from_i64(Coeff::Rational, &[vec![1, 2], vec![0, 0]]));
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn kernel_of_row_sum() {
        let m = Matrix::from_i64(Coeff::Rational, &[vec![1, 1]]);
        let k = kernel_basis(&m).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0].add_ref(&k[0][1]), Scalar::zero(Coeff::Rational));
        assert!(kernel_basis(&Matrix::identity(Coeff::Rational, 2)).unwrap().is_empty());
    }

    #[test]
    fn mixed_modes_rejected() {
        let row = vec![Scalar::one(Coeff::Rational), Scalar::one(Coeff::Prime(3))];
        assert!(matches!(Matrix::from_rows(Coeff::Rational, 2, vec![row]), Err(Error::ModeMismatch(_))));
    }

    #[test]
    fn smith_form_small() {
        assert_eq!(smith_diagonal(&[vec![2, 4], vec![6, 8]]), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(smith_diagonal(&[vec![2, 2], vec![2, 2]]), vec![BigInt::from(2)]);
        assert_eq!(smith_diagonal(&[vec![2, 3]]), vec![BigInt::from(1)]);
        assert!(smith_diagonal(&[vec![0, 0]]).is_empty());
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-3i64..4, c), r))
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(rows in small_matrix(), p in prop_oneof![Just(0u64), Just(3), Just(5)]) {
            let c = if p == 0 { Coeff::Rational } else { Coeff::Prime(p) };
            let m = Matrix::from_i64(c, &rows);
            let k = kernel_basis(&m).unwrap();
            prop_assert_eq!(rank(&m).unwrap() + k.len(), m.cols());
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(Scalar::is_zero));
            }
        }

        #[test]
        fn rank_ignores_row_order(mut rows in small_matrix()) {
            let m = Matrix::from_i64(Coeff::Rational, &rows);
            let r1 = rank(&m).unwrap();
            rows.reverse();
            let m2 = Matrix::from_i64(Coeff::Rational, &rows);
            prop_assert_eq!(r1, rank(&m2).unwrap());
            let s1 = span_basis(Coeff::Rational, m.cols(), m.clone().into_rows()).unwrap();
            let s2 = span_basis(Coeff::Rational, m.cols(), m2.into_rows()).unwrap();
            prop_assert_eq!(s1, s2);
        }

        #[test]
        fn smith_rank_matches_rational_rank(rows in small_matrix()) {
            let m = Matrix::from_i64(Coeff::Rational, &rows);
            prop_assert_eq!(smith_diagonal(&rows).len(), rank(&m).unwrap());
        }
    }
}

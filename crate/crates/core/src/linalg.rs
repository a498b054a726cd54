//! Dense exact linear algebra over `Q`: reduced row echelon form, nullspaces
//! and particular solutions. Used to solve for polynomial coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::arith::{Monomial, Poly, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![vec![Rational::zero(); cols]; rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r][c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r]
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(p) = (lead..self.rows).find(|&r| !self.data[r][c].is_zero()) else {
                continue;
            };
            self.data.swap(lead, p);
            let inv = self.data[lead][c].recip();
            if !inv.is_one() {
                for v in self.data[lead][c..].iter_mut() {
                    if !v.is_zero() {
                        *v *= &inv;
                    }
                }
            }
            let pivot_row = self.data[lead].clone();
            let nz: Vec<usize> = (c..self.cols).filter(|&k| !pivot_row[k].is_zero()).collect();
            for r in 0..self.rows {
                if r == lead || self.data[r][c].is_zero() {
                    continue;
                }
                let factor = self.data[r][c].clone();
                for &k in &nz {
                    let delta = &factor * &pivot_row[k];
                    self.data[r][k] -= delta;
                }
            }
            pivots.push(c);
            lead += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{v : A v = 0}`; one vector per free column, with that column
    /// set to 1 and the other free columns 0.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m.data[r][f].clone();
                }
                v
            })
            .collect()
    }

    /// A solution of `A v = b` with every free variable zero, if one exists.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for ((row, src), rhs) in aug.data.iter_mut().zip(&self.data).zip(b) {
            row[..self.cols].clone_from_slice(src);
            row[self.cols] = rhs.clone();
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut v = vec![Rational::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = aug.data[r][self.cols].clone();
        }
        Some(v)
    }
}

/// Coefficient matrix of a family of polynomials: column `j` holds the
/// coefficients of `cols[j]`, rows indexed by the union of their monomials.
pub struct CoefficientSystem {
    pub matrix: Matrix,
    pub monomials: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
}

impl CoefficientSystem {
    pub fn new(cols: &[Poly], extra_rows: &[&Poly]) -> Self {
        let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
        for p in cols.iter().chain(extra_rows.iter().copied()) {
            for (m, _) in p.terms() {
                let n = index.len();
                index.entry(m.clone()).or_insert(n);
            }
        }
        let monomials = {
            let mut v = vec![None; index.len()];
            for (m, &i) in &index {
                v[i] = Some(m.clone());
            }
            v.into_iter().map(Option::unwrap).collect()
        };
        let mut matrix = Matrix::zeros(index.len(), cols.len());
        for (j, p) in cols.iter().enumerate() {
            for (m, c) in p.terms() {
                matrix.set(index[m], j, c.clone());
            }
        }
        CoefficientSystem {
            matrix,
            monomials,
            index,
        }
    }

    /// Right-hand side vector for a polynomial whose monomials are all known.
    pub fn rhs(&self, p: &Poly) -> Option<Vec<Rational>> {
        let mut b = vec![Rational::zero(); self.monomials.len()];
        for (m, c) in p.terms() {
            b[*self.index.get(m)?] = c.clone();
        }
        Some(b)
    }
}

/// `Σ coeffs[j] · polys[j]`.
pub fn combine(polys: &[Poly], coeffs: &[Rational], zero: &Poly) -> Poly {
    polys
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .fold(zero.clone(), |acc, (p, c)| &acc + &p.scale(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn m(rows: &[&[i64]]) -> Matrix {
        let mut a = Matrix::zeros(rows.len(), rows[0].len());
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                a.set(r, c, int(v));
            }
        }
        a
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        for r in 0..3 {
            let dot: Rational = (0..3).map(|c| a.get(r, c) * &ns[0][c]).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(a.solve(&[int(3), int(1)]), Some(vec![int(2), int(1)]));
        let b = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(b.solve(&[int(1), int(3)]), None);
        assert_eq!(b.solve(&[int(1), int(2)]), Some(vec![int(1), int(0)]));
    }
}

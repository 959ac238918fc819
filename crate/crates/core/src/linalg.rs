//! Exact nullspace of sparse rational matrices by fraction-free elimination.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::expr::Rational;

/// Sparse integer row, entries keyed by column.
type Row = BTreeMap<usize, BigInt>;

/// Scale a rational row to a primitive integer row with positive lead.
fn primitive(row: &[(usize, Rational)]) -> Row {
    let mut lcm = BigInt::one();
    for (_, c) in row {
        lcm = lcm.lcm(c.denom());
    }
    let mut out: Row = BTreeMap::new();
    for (j, c) in row {
        if c.is_zero() {
            continue;
        }
        let v = c.numer() * (&lcm / c.denom());
        let e = out.entry(*j).or_insert_with(BigInt::zero);
        *e += v;
    }
    out.retain(|_, v| !v.is_zero());
    normalize(out)
}

fn normalize(mut row: Row) -> Row {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
    }
    if g.is_zero() {
        return row;
    }
    if row.values().next().unwrap().is_negative() {
        g = -g;
    }
    for v in row.values_mut() {
        *v /= &g;
    }
    row
}

/// `a*row - b*pivot`, where `a` is the pivot lead and `b` the row entry.
fn eliminate(row: &Row, pivot: &Row, col: usize) -> Row {
    let a = &pivot[&col];
    let b = &row[&col];
    let g = a.gcd(b);
    let (a, b) = (a / &g, b / &g);
    let mut out: Row = row.iter().map(|(j, v)| (*j, v * &a)).collect();
    for (j, v) in pivot {
        let e = out.entry(*j).or_insert_with(BigInt::zero);
        *e -= v * &b;
    }
    out.retain(|_, v| !v.is_zero());
    normalize(out)
}

/// Row-echelon form keyed by leading column.
#[derive(Debug, Default)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, Row>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    /// Add a row; columns must be `< ncols`.
    pub fn push(&mut self, row: &[(usize, Rational)]) {
        let mut row = primitive(row);
        while let Some((&lead, _)) = row.iter().next() {
            debug_assert!(lead < self.ncols);
            match self.pivots.get(&lead) {
                Some(p) => row = eliminate(&row, p, lead),
                None => {
                    self.pivots.insert(lead, row);
                    return;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Nullspace basis: one vector per free column (ascending), with that
    /// column set to 1 and the other free columns 0.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains_key(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.ncols];
                x[f] = Rational::one();
                for (&c, row) in self.pivots.iter().rev() {
                    let mut acc = Rational::zero();
                    for (j, v) in row.range(c + 1..) {
                        if !x[*j].is_zero() {
                            acc += &x[*j] * Rational::from_integer(v.clone());
                        }
                    }
                    x[c] = -acc / Rational::from_integer(row[&c].clone());
                }
                x
            })
            .collect()
    }
}

/// Nullspace of the matrix with the given sparse rows.
pub fn nullspace(ncols: usize, rows: &[Vec<(usize, Rational)>]) -> Vec<Vec<Rational>> {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.push(r);
    }
    e.nullspace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, rat};
    use proptest::prelude::*;

    fn apply(rows: &[Vec<(usize, Rational)>], x: &[Rational]) -> Vec<Rational> {
        rows.iter()
            .map(|r| r.iter().map(|(j, c)| c * &x[*j]).sum())
            .collect()
    }

    #[test]
    fn small_systems() {
        // x0 + x1 = 0, x1 - 2 x2 = 0
        let rows = vec![
            vec![(0, int(1)), (1, int(1))],
            vec![(1, int(1)), (2, int(-2))],
        ];
        let n = nullspace(3, &rows);
        assert_eq!(n, vec![vec![int(-2), int(2), int(1)]]);

        assert_eq!(nullspace(2, &[]), vec![vec![int(1), int(0)], vec![int(0), int(1)]]);

        let rows = vec![vec![(0, rat(1, 2)), (1, rat(1, 3))], vec![(0, int(3)), (1, int(2))]];
        let n = nullspace(2, &rows);
        assert_eq!(n, vec![vec![rat(-2, 3), int(1)]]);

        let rows = vec![vec![(0, int(1))], vec![(1, int(5))]];
        assert!(nullspace(2, &rows).is_empty());
    }

    proptest! {
        #[test]
        fn nullspace_is_exact(
            entries in prop::collection::vec(prop::collection::vec((0usize..6, -4i64..5), 0..5), 0..7)
        ) {
            let rows: Vec<Vec<(usize, Rational)>> = entries
                .iter()
                .map(|r| r.iter().map(|(j, c)| (*j, int(*c))).collect())
                .collect();
            let mut e = Echelon::new(6);
            for r in &rows {
                e.push(r);
            }
            let basis = e.nullspace();
            prop_assert_eq!(basis.len() + e.rank(), 6);
            for v in &basis {
                prop_assert!(apply(&rows, v).iter().all(|c| c.is_zero()));
            }
        }
    }
}

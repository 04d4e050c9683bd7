use std::collections::{BTreeMap, BTreeSet};

use crate::arith::inv_mod;
use crate::error::{Error, Result};
use crate::presentation::mulq;

pub(crate) type SparseRow = BTreeMap<usize, u64>;

/// `(Z/q)^ncols / <rows>` for relations that always admit a unit pivot,
/// kept in fully reduced form: each pivot row has pivot coefficient 1 and
/// no other pivot column.
pub(crate) struct SparseReducer {
    p: u64,
    q: u64,
    pivot_row: Vec<Option<usize>>,
    rows: Vec<SparseRow>,
    pivots: Vec<usize>,
    occurs: Vec<BTreeSet<usize>>,
}

/// The quotient as a free module: `basis` lists the free columns and
/// `expr[c]` writes column `c` in that basis.
#[derive(Clone, Debug)]
pub(crate) struct FreeQuotient {
    pub basis: Vec<usize>,
    pub expr: Vec<Vec<(usize, u64)>>,
}

impl SparseReducer {
    pub fn new(ncols: usize, p: u64, q: u64) -> Self {
        SparseReducer {
            p,
            q,
            pivot_row: vec![None; ncols],
            rows: Vec::new(),
            pivots: Vec::new(),
            occurs: vec![BTreeSet::new(); ncols],
        }
    }

    fn axpy(&self, dst: &mut SparseRow, f: u64, src: &SparseRow) {
        let q = self.q;
        for (&c, &x) in src {
            let e = dst.entry(c).or_insert(0);
            *e = (*e + q - mulq(f, x, q)) % q;
            if *e == 0 {
                dst.remove(&c);
            }
        }
    }

    /// Add a relation; fails if it is nonzero but has no unit entry, which
    /// would make the quotient non-free.
    pub fn insert(&mut self, row: impl IntoIterator<Item = (usize, u64)>) -> Result<()> {
        let q = self.q;
        let mut r = SparseRow::new();
        for (c, x) in row {
            let e = r.entry(c).or_insert(0);
            *e = (*e + x % q) % q;
            if *e == 0 {
                r.remove(&c);
            }
        }
        let hits: Vec<(usize, u64)> = r
            .iter()
            .filter(|(c, _)| self.pivot_row[**c].is_some())
            .map(|(&c, &x)| (c, x))
            .collect();
        for (c, f) in hits {
            let pr = &self.rows[self.pivot_row[c].unwrap()];
            let mut tmp = std::mem::take(&mut r);
            self.axpy(&mut tmp, f, pr);
            r = tmp;
        }
        if r.is_empty() {
            return Ok(());
        }
        let Some((&c, &x)) = r.iter().rev().find(|(_, &x)| x % self.p != 0) else {
            return Err(Error::Indeterminate(
                "a relation has no unit entry; the symbol module has p-torsion".into(),
            ));
        };
        let w = inv_mod(x, q).expect("unit");
        for v in r.values_mut() {
            *v = mulq(*v, w, q);
        }
        let idx = self.rows.len();
        for &i in &std::mem::take(&mut self.occurs[c]) {
            let f = self.rows[i][&c];
            let mut target = std::mem::take(&mut self.rows[i]);
            let before: BTreeSet<usize> = target.keys().copied().collect();
            self.axpy(&mut target, f, &r);
            for k in before.difference(&target.keys().copied().collect()) {
                self.occurs[*k].remove(&i);
            }
            for &k in target.keys() {
                if k != self.pivots[i] {
                    self.occurs[k].insert(i);
                }
            }
            self.rows[i] = target;
        }
        for &k in r.keys() {
            if k != c {
                self.occurs[k].insert(idx);
            }
        }
        self.pivot_row[c] = Some(idx);
        self.pivots.push(c);
        self.rows.push(r);
        Ok(())
    }

    pub fn finish(self) -> FreeQuotient {
        let q = self.q;
        let ncols = self.pivot_row.len();
        let basis: Vec<usize> = (0..ncols)
            .filter(|&c| self.pivot_row[c].is_none())
            .collect();
        let mut pos = vec![usize::MAX; ncols];
        for (i, &c) in basis.iter().enumerate() {
            pos[c] = i;
        }
        let expr = (0..ncols)
            .map(|c| match self.pivot_row[c] {
                None => vec![(pos[c], 1)],
                Some(i) => self.rows[i]
                    .iter()
                    .filter(|(&k, _)| k != c)
                    .map(|(&k, &x)| (pos[k], (q - x) % q))
                    .collect(),
            })
            .collect();
        FreeQuotient { basis, expr }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_free_columns() {
        // x0 + x1 = 0, x1 - x2 = 0 over Z/25: x0 = -x2, x1 = x2
        let mut r = SparseReducer::new(3, 5, 25);
        r.insert([(0, 1), (1, 1)]).unwrap();
        r.insert([(1, 1), (2, 24)]).unwrap();
        r.insert([(0, 1), (2, 1)]).unwrap();
        let fq = r.finish();
        assert_eq!(fq.basis.len(), 1);
        let b = fq.basis[0];
        let coef = |c: usize| fq.expr[c].iter().map(|&(_, x)| x).sum::<u64>() % 25;
        assert_eq!(coef(b), 1);
        assert_eq!((coef(0) + coef(1)) % 25, 0);
        assert_eq!(coef(1), coef(2));
    }

    #[test]
    fn torsion_is_reported() {
        let mut r = SparseReducer::new(2, 5, 25);
        assert!(r.insert([(0, 5), (1, 10)]).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, val};

pub(crate) fn mulq(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// `U A V = diag(p^{e_0}, ..., p^{e_{r-1}}, 0, ...)` over `Z/p^k`; the
/// transforms are only kept when asked for.
pub(crate) struct Reduction {
    pub exps: Vec<u32>,
    pub u: Vec<Vec<u64>>,
    pub v: Vec<Vec<u64>>,
    pub v_inv: Vec<Vec<u64>>,
}

#[derive(Clone, Copy, Default)]
pub(crate) struct Track {
    pub u: bool,
    pub v: bool,
    pub v_inv: bool,
}

fn identity(n: usize, keep: bool) -> Vec<Vec<u64>> {
    if !keep {
        return Vec::new();
    }
    (0..n)
        .map(|i| (0..n).map(|j| (i == j) as u64).collect())
        .collect()
}

fn reduce(a: &[Vec<u64>], ncols: usize, p: u64, k: u32) -> Reduction {
    reduce_tracked(
        a,
        ncols,
        p,
        k,
        Track {
            u: true,
            v: true,
            v_inv: false,
        },
    )
}

/// Unit-pivot reduction over the local ring `Z/p^k`: the pivot is always an
/// entry of least valuation, so every elimination step is exact.
pub(crate) fn reduce_tracked(
    a: &[Vec<u64>],
    ncols: usize,
    p: u64,
    k: u32,
    track: Track,
) -> Reduction {
    let q = p.pow(k);
    let nrows = a.len();
    let mut a: Vec<Vec<u64>> = a
        .iter()
        .map(|r| r.iter().map(|x| x % q).collect())
        .collect();
    let mut u = identity(nrows, track.u);
    let mut v = identity(ncols, track.v);
    let mut v_inv = identity(ncols, track.v_inv);
    let mut exps = Vec::new();
    for t in 0..nrows.min(ncols) {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let e = val(x, p);
                    if best.is_none_or(|b| e < b.0) {
                        best = Some((e, i, j));
                        if e == 0 {
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((e, i, j)) = best else { break };
        a.swap(t, i);
        if track.u {
            u.swap(t, i);
        }
        for row in a.iter_mut() {
            row.swap(t, j);
        }
        for row in v.iter_mut() {
            row.swap(t, j);
        }
        if track.v_inv {
            v_inv.swap(t, j);
        }
        let pe = p.pow(e);
        let w = inv_mod(a[t][t] / pe % q, q).expect("unit part of the pivot");
        for x in a[t].iter_mut() {
            *x = mulq(*x, w, q);
        }
        if track.u {
            for x in u[t].iter_mut() {
                *x = mulq(*x, w, q);
            }
        }
        for i in 0..nrows {
            if i == t || a[i][t] == 0 {
                continue;
            }
            let f = a[i][t] / pe;
            let (top, rest) = if i < t {
                let (x, y) = a.split_at_mut(t);
                (&y[0], &mut x[i])
            } else {
                let (x, y) = a.split_at_mut(i);
                (&x[t], &mut y[0])
            };
            for (c, x) in rest.iter_mut().enumerate() {
                if top[c] != 0 {
                    *x = (*x + q - mulq(f, top[c], q)) % q;
                }
            }
            if track.u {
                for c in 0..nrows {
                    u[i][c] = (u[i][c] + q - mulq(f, u[t][c], q)) % q;
                }
            }
        }
        for j in 0..ncols {
            if j == t || a[t][j] == 0 {
                continue;
            }
            let f = a[t][j] / pe;
            for row in a.iter_mut() {
                row[j] = (row[j] + q - mulq(f, row[t], q)) % q;
            }
            for row in v.iter_mut() {
                row[j] = (row[j] + q - mulq(f, row[t], q)) % q;
            }
            // column j -= f column t on V means row t += f row j on V^-1
            if track.v_inv {
                for c in 0..ncols {
                    v_inv[t][c] = (v_inv[t][c] + mulq(f, v_inv[j][c], q)) % q;
                }
            }
        }
        exps.push(e);
    }
    Reduction { exps, u, v, v_inv }
}

fn transpose(a: &[Vec<u64>], ncols: usize) -> Vec<Vec<u64>> {
    (0..ncols)
        .map(|j| a.iter().map(|r| r[j]).collect())
        .collect()
}

/// Generators of `{x : sum_j x_j rows[j] = 0}` in `(Z/p^k)^rows.len()`.
pub fn kernel(rows: &[Vec<u64>], width: usize, p: u64, k: u32) -> Vec<Vec<u64>> {
    let n = rows.len();
    if n == 0 {
        return Vec::new();
    }
    let q = p.pow(k);
    // columns of A = rows^T are the images of the basis vectors
    let red = reduce(&transpose(rows, width), n, p, k);
    let mut out = Vec::new();
    for t in 0..n {
        let scale = red.exps.get(t).map_or(1, |&e| p.pow(k - e));
        if scale == q {
            continue;
        }
        out.push((0..n).map(|i| mulq(red.v[i][t], scale, q)).collect());
    }
    out
}

/// Some `x` with `sum_j x_j rows[j] = target`, if one exists.
pub fn solve(rows: &[Vec<u64>], target: &[u64], p: u64, k: u32) -> Option<Vec<u64>> {
    let q = p.pow(k);
    let n = rows.len();
    let width = target.len();
    if n == 0 {
        return target.iter().all(|&x| x % q == 0).then(Vec::new);
    }
    let red = reduce(&transpose(rows, width), n, p, k);
    let ub: Vec<u64> = red
        .u
        .iter()
        .map(|r| {
            r.iter()
                .zip(target)
                .fold(0, |acc, (&a, &b)| (acc + mulq(a, b, q)) % q)
        })
        .collect();
    let mut y = vec![0u64; n];
    for (t, &c) in ub.iter().enumerate() {
        match red.exps.get(t) {
            Some(&e) => {
                if c % p.pow(e) != 0 {
                    return None;
                }
                y[t] = c / p.pow(e);
            }
            None if c != 0 => return None,
            None => {}
        }
    }
    Some(
        (0..n)
            .map(|i| (0..n).fold(0, |acc, t| (acc + mulq(red.v[i][t], y[t], q)) % q))
            .collect(),
    )
}

/// The finite module `(Z/p^k)^gens / <relations>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulePresentation {
    pub p: u64,
    pub k: u32,
    pub gens: usize,
    pub relations: Vec<Vec<u64>>,
}

impl ModulePresentation {
    pub fn new(p: u64, k: u32, gens: usize, relations: Vec<Vec<u64>>) -> Self {
        let q = p.pow(k);
        let relations = relations
            .into_iter()
            .map(|r| {
                assert_eq!(r.len(), gens, "relation length");
                r.into_iter().map(|x| x % q).collect::<Vec<u64>>()
            })
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        ModulePresentation {
            p,
            k,
            gens,
            relations,
        }
    }

    pub fn free(p: u64, k: u32, gens: usize) -> Self {
        Self::new(p, k, gens, Vec::new())
    }

    pub fn zero(p: u64, k: u32) -> Self {
        Self::new(p, k, 0, Vec::new())
    }

    /// The subgroup of `(Z/p^k)^width` generated by `vectors`.
    pub fn span(p: u64, k: u32, vectors: &[Vec<u64>], width: usize) -> Self {
        Self::new(p, k, vectors.len(), kernel(vectors, width, p, k))
    }

    pub fn quotient(&self, extra: &[Vec<u64>]) -> Self {
        let mut rel = self.relations.clone();
        rel.extend(extra.iter().cloned());
        Self::new(self.p, self.k, self.gens, rel)
    }

    pub fn direct_sum(&self, o: &Self) -> Self {
        assert_eq!((self.p, self.k), (o.p, o.k));
        let mut rel: Vec<Vec<u64>> = self
            .relations
            .iter()
            .map(|r| [r.clone(), vec![0; o.gens]].concat())
            .collect();
        rel.extend(
            o.relations
                .iter()
                .map(|r| [vec![0; self.gens], r.clone()].concat()),
        );
        Self::new(self.p, self.k, self.gens + o.gens, rel)
    }

    /// Exponents `e_i` with the module isomorphic to `sum_i Z/p^{e_i}`, ascending, zeros dropped.
    pub fn fitting_diagonal(&self) -> Vec<u32> {
        let red = reduce_tracked(&self.relations, self.gens, self.p, self.k, Track::default());
        let mut d: Vec<u32> = red.exps.clone();
        d.extend(std::iter::repeat_n(self.k, self.gens - red.exps.len()));
        d.retain(|&e| e > 0);
        d.sort_unstable();
        d
    }

    /// `log_p` of the order.
    pub fn order_exp(&self) -> u32 {
        self.fitting_diagonal().iter().sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.order_exp() == 0
    }

    /// Whether `v` (in generator coordinates) is zero in the module.
    pub fn is_zero_element(&self, v: &[u64]) -> bool {
        let q = self.p.pow(self.k);
        v.iter().all(|&x| x % q == 0)
            || self.quotient(&[v.to_vec()]).order_exp() == self.order_exp()
    }
}

/// A homomorphism given by the images of the source generators.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    pub src: ModulePresentation,
    pub dst: ModulePresentation,
    pub images: Vec<Vec<u64>>,
}

impl ModuleMap {
    pub fn new(src: &ModulePresentation, dst: &ModulePresentation, images: Vec<Vec<u64>>) -> Self {
        assert_eq!(images.len(), src.gens);
        let q = dst.p.pow(dst.k);
        let images = images
            .into_iter()
            .map(|r| {
                assert_eq!(r.len(), dst.gens);
                r.into_iter().map(|x| x % q).collect()
            })
            .collect();
        ModuleMap {
            src: src.clone(),
            dst: dst.clone(),
            images,
        }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let q = self.dst.p.pow(self.dst.k);
        let mut out = vec![0u64; self.dst.gens];
        for (c, img) in v.iter().zip(&self.images) {
            for (o, &x) in out.iter_mut().zip(img) {
                *o = (*o + mulq(*c, x, q)) % q;
            }
        }
        out
    }

    /// Relations of the source go to zero.
    pub fn is_well_defined(&self) -> bool {
        self.src
            .relations
            .iter()
            .all(|r| self.dst.is_zero_element(&self.apply(r)))
    }

    pub fn then(&self, g: &ModuleMap) -> ModuleMap {
        ModuleMap::new(
            &self.src,
            &g.dst,
            self.images.iter().map(|r| g.apply(r)).collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|r| self.dst.is_zero_element(r))
    }

    /// Same map on generators, modulo the target relations.
    pub fn equals(&self, o: &ModuleMap) -> bool {
        let q = self.dst.p.pow(self.dst.k);
        self.images.iter().zip(&o.images).all(|(a, b)| {
            let d: Vec<u64> = a.iter().zip(b).map(|(x, y)| (x + q - y) % q).collect();
            self.dst.is_zero_element(&d)
        })
    }

    pub fn image_exp(&self) -> u32 {
        self.dst.order_exp() - self.dst.quotient(&self.images).order_exp()
    }

    pub fn kernel_exp(&self) -> u32 {
        self.src.order_exp() - self.image_exp()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_exp() == 0
    }

    pub fn is_surjective(&self) -> bool {
        self.image_exp() == self.dst.order_exp()
    }
}

/// `0 -> A -f-> B -g-> C -> 0` is exact: both maps are well defined,
/// `g f = 0`, `f` is injective, `g` surjective and `|B| = |A| |C|`.
pub fn is_short_exact(f: &ModuleMap, g: &ModuleMap) -> bool {
    f.is_well_defined()
        && g.is_well_defined()
        && f.then(g).is_zero()
        && f.is_injective()
        && g.is_surjective()
        && f.dst.order_exp() == f.src.order_exp() + g.dst.order_exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracked_transforms_are_inverse() {
        let a = vec![
            vec![10, 3, 7, 25],
            vec![5, 15, 0, 1],
            vec![20, 6, 14, 50],
            vec![0, 0, 5, 10],
        ];
        let (p, k) = (5, 3);
        let q = 125;
        let red = reduce_tracked(
            &a,
            4,
            p,
            k,
            Track {
                u: true,
                v: true,
                v_inv: true,
            },
        );
        for i in 0..4 {
            for j in 0..4 {
                let x = (0..4).fold(0, |acc, t| {
                    (acc + mulq(red.v[i][t], red.v_inv[t][j], q)) % q
                });
                assert_eq!(x, (i == j) as u64);
            }
        }
        // U A V is diagonal with the reported exponents
        for i in 0..4 {
            for j in 0..4 {
                let x = (0..4)
                    .flat_map(|s| (0..4).map(move |t| (s, t)))
                    .fold(0, |acc, (s, t)| {
                        (acc + mulq(mulq(red.u[i][s], a[s][t], q), red.v[t][j], q)) % q
                    });
                let want = if i == j && i < red.exps.len() {
                    p.pow(red.exps[i])
                } else {
                    0
                };
                assert_eq!(x, want, "{i} {j}");
            }
        }
    }

    #[test]
    fn diagonal_of_a_small_group() {
        // Z/125 + Z/125 modulo (5, 0), (0, 25), (5, 25)
        let m = ModulePresentation::new(5, 3, 2, vec![vec![5, 0], vec![0, 25], vec![5, 25]]);
        assert_eq!(m.fitting_diagonal(), vec![1, 2]);
        assert_eq!(m.order_exp(), 3);
        assert!(m.is_zero_element(&[10, 50]));
        assert!(!m.is_zero_element(&[1, 0]));
        let f = ModulePresentation::free(5, 3, 2);
        assert_eq!(f.order_exp(), 6);
    }

    #[test]
    fn kernel_and_solve() {
        // x -> 25 x on Z/125 has kernel 5 Z/125
        let k = kernel(&[vec![25]], 1, 5, 3);
        let span = ModulePresentation::span(5, 3, &k, 1);
        assert_eq!(span.order_exp(), 2);
        let rows = vec![vec![1, 2], vec![0, 5]];
        let x = solve(&rows, &[3, 16], 5, 3).unwrap();
        assert_eq!(x[0] % 125, 3);
        assert_eq!((2 * x[0] + 5 * x[1]) % 125, 16);
        assert!(solve(&[vec![5]], &[1], 5, 3).is_none());
    }

    #[test]
    fn multiplication_by_p_sequence() {
        // 0 -> Z/25 -5-> Z/125 -> Z/5 -> 0
        let a = ModulePresentation::new(5, 3, 1, vec![vec![25]]);
        let b = ModulePresentation::free(5, 3, 1);
        let c = ModulePresentation::new(5, 3, 1, vec![vec![5]]);
        let f = ModuleMap::new(&a, &b, vec![vec![5]]);
        let g = ModuleMap::new(&b, &c, vec![vec![1]]);
        assert!(is_short_exact(&f, &g));
        let bad = ModuleMap::new(&a, &b, vec![vec![1]]);
        assert!(!bad.is_well_defined());
    }
}

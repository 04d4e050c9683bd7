use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type RationalBig = BigRational;

/// Default largest index served by [`bernoulli_number`].
pub const DEFAULT_BOUND: usize = 200;

static TABLE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// `B_k` with `B_1 = -1/2`, from `sum_{j<=k} C(k+1, j) B_j = 0`.
pub fn bernoulli_number(k: usize) -> Result<BigRational> {
    bernoulli_number_bounded(k, DEFAULT_BOUND)
}

pub fn bernoulli_number_bounded(k: usize, bound: usize) -> Result<BigRational> {
    if k > bound {
        return Err(Error::BoundExceeded(format!(
            "B_{k} requested, bound is {bound}"
        )));
    }
    let table = TABLE.get_or_init(|| Mutex::new(vec![BigRational::one()]));
    let mut t = table.lock().expect("bernoulli table lock");
    while t.len() <= k {
        let n = t.len();
        // B_n = -1/(n+1) sum_{j<n} C(n+1, j) B_j
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, b) in t.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * b;
            binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        let v = -acc / BigRational::from_integer(BigInt::from(n + 1));
        t.push(v);
    }
    Ok(t[k].clone())
}

/// `B_k(x) = sum_j C(k, j) B_j x^(k-j)`.
pub fn bernoulli_poly(k: usize, x: &BigRational) -> Result<BigRational> {
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one();
    for j in 0..=k {
        let term = BigRational::from_integer(binom.clone())
            * bernoulli_number(j)?
            * pow_rat(x, (k - j) as u32);
        acc += term;
        binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
    }
    Ok(acc)
}

fn pow_rat(x: &BigRational, e: u32) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    schema: u32,
    bernoulli: BTreeMap<String, [String; 2]>,
}

/// On-disk store `{dir}/bernoulli.json` of exact Bernoulli numbers.
///
/// Keys are written once and never rewritten; new keys are merged into a
/// temporary file that is renamed over the old one.
#[derive(Debug, Clone)]
pub struct BernoulliCache {
    path: PathBuf,
}

impl BernoulliCache {
    pub fn new(dir: &Path) -> Self {
        BernoulliCache {
            path: dir.join("bernoulli.json"),
        }
    }

    fn read(&self) -> Result<BTreeMap<String, [String; 2]>> {
        match fs::read_to_string(&self.path) {
            Ok(s) => {
                let f: CacheFile =
                    serde_json::from_str(&s).map_err(|e| Error::Cache(e.to_string()))?;
                if f.schema != 1 {
                    return Err(Error::Cache(format!("unsupported schema {}", f.schema)));
                }
                Ok(f.bernoulli)
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(BTreeMap::new()),
            Err(e) => Err(Error::Cache(e.to_string())),
        }
    }

    /// Look `B_k` up, computing and persisting it on a miss. A stored value
    /// that disagrees with the recurrence is reported, never overwritten.
    pub fn get(&self, k: usize) -> Result<BigRational> {
        let stored = self.read()?;
        let value = bernoulli_number(k)?;
        if let Some([n, d]) = stored.get(&k.to_string()) {
            let n: BigInt = n
                .parse()
                .map_err(|_| Error::Cache(format!("bad numerator for B_{k}")))?;
            let d: BigInt = d
                .parse()
                .map_err(|_| Error::Cache(format!("bad denominator for B_{k}")))?;
            let cached = BigRational::new(n, d);
            if cached != value {
                return Err(Error::Cache(format!(
                    "cached B_{k} disagrees with the recurrence"
                )));
            }
            return Ok(cached);
        }
        self.store_all(&[k])?;
        Ok(value)
    }

    /// Make sure `B_0..=B_k` are on disk.
    pub fn ensure(&self, k: usize) -> Result<()> {
        let keys: Vec<usize> = (0..=k).collect();
        self.store_all(&keys)
    }

    fn store_all(&self, keys: &[usize]) -> Result<()> {
        let mut stored = self.read()?;
        let mut changed = false;
        for &k in keys {
            let key = k.to_string();
            if stored.contains_key(&key) {
                continue;
            }
            let v = bernoulli_number(k)?;
            stored.insert(key, [v.numer().to_string(), v.denom().to_string()]);
            changed = true;
        }
        if !changed {
            return Ok(());
        }
        if let Some(dir) = self.path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
        }
        let body = serde_json::to_string_pretty(&CacheFile {
            schema: 1,
            bernoulli: stored,
        })
        .map_err(|e| Error::Cache(e.to_string()))?;
        let tmp = self
            .path
            .with_extension(format!("json.tmp{}", std::process::id()));
        fs::write(&tmp, body).map_err(|e| Error::Cache(e.to_string()))?;
        fs::rename(&tmp, &self.path).map_err(|e| Error::Cache(e.to_string()))?;
        Ok(())
    }
}

/// `r` as an element of `Z/p^m`; `r` must be `p`-integral.
pub fn rational_mod_pm(r: &BigRational, p: u64, m: u32) -> Result<u64> {
    let q = BigInt::from(crate::arith::checked_pow(p, m).expect("modulus fits"));
    let den = r.denom();
    if (den % BigInt::from(p)).is_zero() {
        return Err(Error::NonDivisible(format!("{r} has p in the denominator")));
    }
    let n = ((r.numer() % &q) + &q) % &q;
    let d = ((den % &q) + &q) % &q;
    let d = u64::try_from(d).unwrap();
    let q64 = crate::arith::checked_pow(p, m).unwrap();
    let di = crate::arith::inv_mod(d, q64).expect("unit denominator");
    Ok(crate::arith::mul_mod(u64::try_from(n).unwrap(), di, q64))
}

/// `v_p(r)` for nonzero `r`.
pub fn rational_valuation(r: &BigRational, p: u64) -> i64 {
    assert!(!r.is_zero());
    let pb = BigInt::from(p);
    let count = |x: &BigInt| {
        let mut x = x.abs();
        let mut v = 0i64;
        while (&x % &pb).is_zero() {
            x /= &pb;
            v += 1;
        }
        v
    };
    count(r.numer()) - count(r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Akiyama-Tanigawa algorithm; produces B_1 = +1/2.
    fn akiyama_tanigawa(n: usize) -> BigRational {
        let mut a: Vec<BigRational> = Vec::new();
        for m in 0..=n {
            a.push(rat(1, m as i64 + 1));
            for j in (1..=m).rev() {
                a[j - 1] = BigRational::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
            }
        }
        a[0].clone()
    }

    #[test]
    fn table_values() {
        assert_eq!(bernoulli_number(0).unwrap(), rat(1, 1));
        assert_eq!(bernoulli_number(1).unwrap(), rat(-1, 2));
        assert_eq!(bernoulli_number(2).unwrap(), rat(1, 6));
        assert_eq!(bernoulli_number(3).unwrap(), rat(0, 1));
        assert_eq!(bernoulli_number(12).unwrap(), rat(-691, 2730));
        for k in 2..40 {
            assert_eq!(bernoulli_number(k).unwrap(), akiyama_tanigawa(k), "B_{k}");
        }
        assert!(matches!(
            bernoulli_number(201),
            Err(Error::BoundExceeded(_))
        ));
    }

    #[test]
    fn polynomials() {
        assert_eq!(bernoulli_poly(2, &rat(0, 1)).unwrap(), rat(1, 6));
        assert_eq!(bernoulli_poly(1, &rat(1, 1)).unwrap(), rat(1, 2));
        // B_k(1 - x) = (-1)^k B_k(x)
        let x = rat(2, 7);
        for k in 0..8 {
            let l = bernoulli_poly(k, &(rat(1, 1) - &x)).unwrap();
            let r = bernoulli_poly(k, &x).unwrap();
            assert_eq!(l, if k % 2 == 0 { r } else { -r });
        }
    }

    #[test]
    fn disk_cache_is_write_once() {
        let dir = std::env::temp_dir().join(format!("bern-cache-{}", std::process::id()));
        let cache = BernoulliCache::new(&dir);
        assert_eq!(cache.get(12).unwrap(), rat(-691, 2730));
        cache.ensure(20).unwrap();
        let body = fs::read_to_string(dir.join("bernoulli.json")).unwrap();
        assert!(body.contains("\"schema\": 1"));
        assert!(body.contains("\"-691\""));
        // a corrupted entry is detected rather than trusted
        let tampered = body.replace("\"-691\"", "\"-692\"");
        fs::write(dir.join("bernoulli.json"), tampered).unwrap();
        assert!(matches!(cache.get(12), Err(Error::Cache(_))));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn reductions() {
        assert_eq!(rational_mod_pm(&rat(1, 12), 5, 1).unwrap(), 3);
        assert!(rational_mod_pm(&rat(1, 30), 5, 3).is_err());
        assert_eq!(rational_valuation(&rat(50, 3), 5), 2);
    }
}

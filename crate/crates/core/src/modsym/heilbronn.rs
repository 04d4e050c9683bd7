use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Merel's set `X_n` of matrices `[a b; c d]` with `ad - bc = n`,
/// `a > b >= 0` and `d > c >= 0`, sorted. Summing the right action
/// `(u, v) -> (au + cv, bu + dv)` over `X_n` gives `T_n` on weight-2 Manin
/// symbols of level `M`, dropping terms that leave `P^1(Z/M)`.
pub fn merel(n: u64) -> Vec<[i64; 4]> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        for d in 1..=(n + 1 - a) {
            let k = a * d - n;
            if k < 0 {
                continue;
            }
            if k == 0 {
                for c in 0..d {
                    out.push([a, 0, c, d]);
                }
                for b in 1..a {
                    out.push([a, b, 0, d]);
                }
                continue;
            }
            for b in 1..a {
                if k % b == 0 && k / b < d {
                    out.push([a, b, k / b, d]);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

fn is_merel(n: u64, h: &[i64; 4]) -> bool {
    let [a, b, c, d] = *h;
    a * d - b * c == n as i64 && a > b && b >= 0 && d > c && c >= 0
}

#[derive(Serialize, Deserialize)]
struct HeilbronnFile {
    schema: u32,
    family: String,
    n: u64,
    matrices: Vec<[i64; 4]>,
}

/// On-disk store `{dir}/heilbronn/{n}.json`, written once per `n` through
/// an atomic rename. Loaded files are checked against the defining
/// property before use.
#[derive(Clone, Debug)]
pub struct HeilbronnCache {
    dir: PathBuf,
}

impl HeilbronnCache {
    pub fn new(dir: &Path) -> Self {
        HeilbronnCache {
            dir: dir.join("heilbronn"),
        }
    }

    fn path(&self, n: u64) -> PathBuf {
        self.dir.join(format!("{n}.json"))
    }

    pub fn get(&self, n: u64) -> Result<Vec<[i64; 4]>> {
        let path = self.path(n);
        match fs::read_to_string(&path) {
            Ok(s) => {
                let f: HeilbronnFile =
                    serde_json::from_str(&s).map_err(|e| Error::Cache(e.to_string()))?;
                let sorted = f.matrices.windows(2).all(|w| w[0] < w[1]);
                if f.schema != 1
                    || f.family != "merel"
                    || f.n != n
                    || !sorted
                    || !f.matrices.iter().all(|h| is_merel(n, h))
                {
                    return Err(Error::Cache(format!(
                        "{} is not a valid Heilbronn family",
                        path.display()
                    )));
                }
                Ok(f.matrices)
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                let matrices = merel(n);
                fs::create_dir_all(&self.dir).map_err(|e| Error::Cache(e.to_string()))?;
                let body = serde_json::to_string(&HeilbronnFile {
                    schema: 1,
                    family: "merel".into(),
                    n,
                    matrices,
                })
                .map_err(|e| Error::Cache(e.to_string()))?;
                let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
                fs::write(&tmp, body).map_err(|e| Error::Cache(e.to_string()))?;
                if !path.exists() {
                    fs::rename(&tmp, &path).map_err(|e| Error::Cache(e.to_string()))?;
                } else {
                    let _ = fs::remove_file(&tmp);
                }
                self.get(n)
            }
            Err(e) => Err(Error::Cache(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_families() {
        // X_2 = {[1 0; 0 2], [2 0; 0 1], [2 1; 0 1], [1 0; 1 2]}
        assert_eq!(
            merel(2),
            vec![[1, 0, 0, 2], [1, 0, 1, 2], [2, 0, 0, 1], [2, 1, 0, 1]]
        );
        for n in 1..40 {
            let x = merel(n);
            assert!(x.iter().all(|h| is_merel(n, h)));
            // brute force over the bounded box
            let n = n as i64;
            let mut count = 0;
            for a in 1..=n {
                for b in 0..a {
                    for d in 1..=n {
                        for c in 0..d {
                            count += (a * d - b * c == n) as usize;
                        }
                    }
                }
            }
            assert_eq!(x.len(), count);
        }
    }

    #[test]
    fn cache_round_trip_and_tamper() {
        let dir = std::env::temp_dir().join(format!("heilbronn-test-{}", std::process::id()));
        let cache = HeilbronnCache::new(&dir);
        assert_eq!(cache.get(7).unwrap(), merel(7));
        assert_eq!(cache.get(7).unwrap(), merel(7));
        let path = dir.join("heilbronn").join("7.json");
        let body = fs::read_to_string(&path)
            .unwrap()
            .replacen("[1,0,0,7]", "[1,0,0,8]", 1);
        fs::write(&path, body).unwrap();
        assert!(matches!(cache.get(7), Err(Error::Cache(_))));
        fs::remove_dir_all(&dir).unwrap();
    }
}

use anyhow::{anyhow, bail, Context};
use iwasawa_core::arith::max_precision;
use iwasawa_core::characters::{
    format_fractions, parse_fractions, unit_group_generators, DirichletCharacter,
};
use iwasawa_core::lfun::Convention;
use iwasawa_core::series::{Generator, GeneratorMode};
use serde::Serialize;

/// Parameters shared by every subcommand, echoed into the report.
#[derive(Clone, Debug, Serialize)]
pub struct JobConfig {
    pub command: String,
    pub p: Option<u64>,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub theta: Option<String>,
    /// `(m, n)`: coefficients mod `p^m`, series mod `X^n`
    pub prec: (u32, usize),
    pub generator: GeneratorMode,
    pub convention: Convention,
    pub threads: Option<usize>,
}

impl JobConfig {
    pub fn prime(&self) -> anyhow::Result<u64> {
        self.p.ok_or_else(|| anyhow!("--p is required"))
    }

    /// `theta` mod `N`, or mod `Np` when the images cover the generators of
    /// `(Z/Np)^*`; the two counts differ by one when `p` does not divide `N`.
    pub fn character(&self) -> anyhow::Result<DirichletCharacter> {
        let n = self.n.ok_or_else(|| anyhow!("--N is required"))?;
        let t = self
            .theta
            .as_deref()
            .ok_or_else(|| anyhow!("--theta is required"))?;
        let images = parse_fractions(t)
            .with_context(|| format!("bad character images {t:?}"))?
            .len();
        match self.p {
            Some(p) if n % p != 0 && images == unit_group_generators(n * p).len() => {
                character(n * p, t)
            }
            _ => character(n, t),
        }
    }

    /// The topological generator, known to the full working precision.
    pub fn generator(&self) -> anyhow::Result<Generator> {
        let p = self.prime()?;
        Ok(Generator::new(self.generator, p, max_precision(p))?)
    }
}

/// `theta` mod `n` from images `k/o` of the unit group generators.
pub fn character(n: u64, fractions: &str) -> anyhow::Result<DirichletCharacter> {
    let f = parse_fractions(fractions)
        .with_context(|| format!("bad character images {fractions:?}"))?;
    Ok(DirichletCharacter::from_fractions(n, &f)?)
}

pub fn canonical_theta(theta: &DirichletCharacter) -> String {
    format_fractions(&theta.fractions())
}

/// `"m,n"`.
pub fn parse_prec(s: &str) -> anyhow::Result<(u32, usize)> {
    let (m, n) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("precision must be m,n"))?;
    let m: u32 = m.trim().parse().context("bad m")?;
    let n: usize = n.trim().parse().context("bad n")?;
    if m == 0 || n == 0 {
        bail!("precision m,n must be positive");
    }
    Ok((m, n))
}

/// `"u:v"`.
pub fn parse_pair(s: &str) -> anyhow::Result<(u64, u64)> {
    let (u, v) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("symbol must be u:v"))?;
    Ok((u.trim().parse()?, v.trim().parse()?))
}

/// `"p,k/o,..."` for an Eisenstein quotient request.
pub fn parse_eisenstein(s: &str) -> anyhow::Result<(u64, String)> {
    let (p, t) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("expected p,theta"))?;
    Ok((p.trim().parse()?, t.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        assert_eq!(parse_prec("6, 8").unwrap(), (6, 8));
        assert!(parse_prec("6").is_err());
        assert!(parse_prec("0,3").is_err());
        assert_eq!(parse_pair("3:7").unwrap(), (3, 7));
        assert_eq!(
            parse_eisenstein("5,1/2,1/3").unwrap(),
            (5, "1/2,1/3".into())
        );
    }

    #[test]
    fn theta_modulus_follows_the_image_count() {
        let cfg = |t: &str| JobConfig {
            command: "lfun".into(),
            p: Some(7),
            n: Some(9),
            theta: Some(t.into()),
            prec: (6, 6),
            generator: GeneratorMode::Simple,
            convention: Convention::Main,
            threads: None,
        };
        assert_eq!(cfg("2/3,1/3").character().unwrap().modulus(), 63);
        assert_eq!(cfg("1/3").character().unwrap().modulus(), 9);
        assert!(cfg("1/3,1/3,1/3").character().is_err());
    }
}

use crate::arith::{divisors, euler_phi, factor};
use crate::characters::DirichletCharacter;

/// `[SL_2(Z) : Gamma_0(M)]`.
pub fn gamma0_index(m: u64) -> u64 {
    factor(m).iter().fold(m, |acc, &(l, _)| acc / l * (l + 1))
}

/// Number of cusps of `X_1(M)`.
pub fn gamma1_cusps(m: u64) -> u64 {
    match m {
        1 => 1,
        2 => 2,
        3 => 2,
        4 => 3,
        _ => {
            divisors(m)
                .iter()
                .map(|&d| euler_phi(d) * euler_phi(m / d))
                .sum::<u64>()
                / 2
        }
    }
}

/// Genus of `X_1(M)`.
pub fn gamma1_genus(m: u64) -> u64 {
    if m <= 4 {
        return 0;
    }
    // index of the image of Gamma_1(M) in PSL_2(Z), times 2
    let mu2 = factor(m)
        .iter()
        .fold(m * m, |acc, &(l, _)| acc / (l * l) * (l * l - 1));
    // g = 1 + mu/12 - c/2
    let twelve_g = 12 + mu2 / 2 - 6 * gamma1_cusps(m);
    assert_eq!(twelve_g % 12, 0);
    twelve_g / 12
}

fn character_sum(eps: &DirichletCharacter, f: impl Fn(u64) -> bool) -> f64 {
    let m = eps.modulus();
    let ro = eps.root_order() as f64;
    (0..m)
        .filter(|&x| f(x))
        .filter_map(|x| eps.exponent(x as i64))
        .map(|e| (2.0 * std::f64::consts::PI * e as f64 / ro).cos())
        .sum()
}

/// `dim S_2(Gamma_0(M), eps)` by the Cohen-Oesterle formula.
pub fn cusp_form_dimension(eps: &DirichletCharacter) -> u64 {
    if !eps.is_even() {
        return 0;
    }
    let m = eps.modulus();
    let f = eps.conductor();
    let mut lambda = 1.0;
    for (l, r) in factor(m) {
        let s = factor(f).iter().find(|x| x.0 == l).map_or(0, |x| x.1);
        let l = l as f64;
        lambda *= if 2 * s <= r {
            let h = (r / 2) as i32;
            if r % 2 == 0 {
                l.powi(h) + l.powi(h - 1)
            } else {
                2.0 * l.powi(h)
            }
        } else {
            2.0 * l.powi((r - s) as i32)
        };
    }
    let nu2 = character_sum(eps, |x| (x * x + 1) % m == 0);
    let nu3 = character_sum(eps, |x| (x * x + x + 1) % m == 0);
    let trivial = eps.is_trivial() as u64 as f64;
    let d = gamma0_index(m) as f64 / 12.0 - lambda / 2.0 - nu2 / 4.0 - nu3 / 3.0 + trivial;
    let r = d.round();
    assert!(
        (d - r).abs() < 1e-6 && r >= 0.0,
        "dimension formula gave {d}"
    );
    r as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_genera() {
        for m in 1..=12 {
            assert_eq!(gamma1_genus(m) == 0, m <= 10 || m == 12, "{m}");
        }
        assert_eq!(gamma1_genus(11), 1);
        assert_eq!(gamma1_genus(13), 2);
        assert_eq!(gamma1_genus(16), 2);
        assert_eq!(gamma1_genus(23), 12);
        assert_eq!(gamma1_cusps(11), 10);
    }

    #[test]
    fn gamma0_dimensions() {
        for (m, g) in [
            (11, 1),
            (23, 2),
            (37, 2),
            (24, 1),
            (25, 0),
            (36, 1),
            (50, 2),
        ] {
            assert_eq!(
                cusp_form_dimension(&DirichletCharacter::trivial(m)),
                g,
                "{m}"
            );
        }
        // the two sextic characters mod 13 share the two dimensions of S_2(Gamma_1(13))
        let eps = DirichletCharacter::from_fractions(13, &[(1, 6)]).unwrap();
        assert!(eps.is_even());
        assert_eq!(cusp_form_dimension(&eps), 1);
        let quad = DirichletCharacter::from_fractions(13, &[(1, 2)]).unwrap();
        assert_eq!(cusp_form_dimension(&quad), 0);
    }

    #[test]
    fn character_decomposition_of_the_genus() {
        use crate::characters::unit_group_generators;
        for m in 3..=40u64 {
            let gens = unit_group_generators(m);
            let k = gens.iter().fold(1u64, |acc, g| num_integer::lcm(acc, g.1));
            let mut idx = vec![0u64; gens.len()];
            let mut total = 0;
            'all: loop {
                let images: Vec<u64> = idx.iter().zip(&gens).map(|(&i, g)| i * (k / g.1)).collect();
                total +=
                    cusp_form_dimension(&DirichletCharacter::from_images(m, k, &images).unwrap());
                for i in 0..=gens.len() {
                    if i == gens.len() {
                        break 'all;
                    }
                    idx[i] += 1;
                    if idx[i] < gens[i].1 {
                        break;
                    }
                    idx[i] = 0;
                }
            }
            assert_eq!(total, gamma1_genus(m), "{m}");
        }
    }
}

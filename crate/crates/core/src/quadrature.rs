//! Gauss–Legendre rules with exactly mirror-symmetric nodes.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Nodes and weights on [−1, 1], ascending.
///
/// The raw rule is symmetrized so that node `k` is bit-for-bit the negative of
/// node `n − 1 − k`. Antipodal POVM elements built on these nodes then carry
/// identical weights, which the random-ODOP pairing relies on.
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    let count = NonZeroUsize::new(n)
        .filter(|n| n.get() >= 2)
        .ok_or_else(|| Error::InvalidParameter(format!("need at least 2 quadrature nodes, got {n}")))?;
    let mut raw = GaussLegendre::new(count).as_node_weight_pairs().to_vec();
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let sym = (0..n)
        .map(|k| {
            let (a, wa) = raw[k];
            let (b, wb) = raw[n - 1 - k];
            let x = if 2 * k + 1 == n { 0.0 } else { 0.5 * (a - b) };
            (x, 0.5 * (wa + wb))
        })
        .collect();
    Ok(sym)
}

/// Gauss–Legendre rule mapped onto [−half_width, half_width].
pub fn symmetric_rule(n: usize, half_width: f64) -> Result<Vec<(f64, f64)>> {
    Ok(gauss_legendre(n)?
        .into_iter()
        .map(|(x, w)| (x * half_width, w * half_width))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_low_degree_polynomials() {
        let rule = gauss_legendre(10).unwrap();
        for k in 0..20 {
            let q: f64 = rule.iter().map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-13, "degree {k}: {q} vs {exact}");
        }
    }

    #[test]
    fn nodes_are_mirror_images() {
        for n in [2, 7, 41, 64] {
            let rule = gauss_legendre(n).unwrap();
            for k in 0..n {
                assert_eq!(rule[k].0, -rule[n - 1 - k].0);
                assert_eq!(rule[k].1, rule[n - 1 - k].1);
            }
            assert!(rule.windows(2).all(|p| p[0].0 < p[1].0));
        }
    }

    #[test]
    fn rejects_degenerate_rules() {
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(1).is_err());
    }

    #[test]
    fn gaussian_integral_on_scaled_rule() {
        let rule = symmetric_rule(41, 8.0).unwrap();
        let total: f64 = rule
            .iter()
            .map(|(x, w)| w * (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

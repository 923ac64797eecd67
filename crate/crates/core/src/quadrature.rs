//! One-dimensional rules and a deterministic reduction shared by the
//! surface, tube and volume integrators.

use std::num::NonZeroUsize;
use std::ops::Add;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Midpoint,
    #[default]
    Gauss,
}

/// `(node, weight)` pairs of an `n`-point rule on `[a, b]`.
pub fn nodes(rule: Rule, n: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let n = NonZeroUsize::new(n)
        .ok_or_else(|| Error::QuadratureUnderflow("rule needs at least one node".into()))?;
    if !(b - a).is_finite() || b <= a {
        return Err(Error::QuadratureUnderflow(format!(
            "degenerate interval [{a}, {b}]"
        )));
    }
    Ok(match rule {
        Rule::Midpoint => {
            let h = (b - a) / n.get() as f64;
            (0..n.get())
                .map(|i| (a + (i as f64 + 0.5) * h, h))
                .collect()
        }
        Rule::Gauss => {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (b + a);
            let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(n)
                .as_node_weight_pairs()
                .iter()
                .map(|&(x, w)| (mid + half * x, half * w))
                .collect();
            pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
            pairs
        }
    })
}

/// Pairwise (cascade) summation in slice order. The result depends only on
/// the order of `values`, never on how they were produced.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Add<Output = T> + Default,
{
    match values.len() {
        0 => T::default(),
        1 => values[0],
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

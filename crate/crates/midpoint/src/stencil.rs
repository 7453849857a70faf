//! Exact rational stencils of M_n on a regular quad grid, built as tensor
//! products of the univariate Lane-Riesenfeld stencils of degree n.

use std::collections::BTreeMap;

use num::rational::BigRational;
use num::{BigInt, Zero};

use crate::scalar::{rational_string, Avg, LinForm};

/// Map from output-vertex role to its stencil: coarse-grid offsets with
/// exact rational weights.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilTable {
    pub n: usize,
    pub roles: BTreeMap<String, Vec<((i64, i64), BigRational)>>,
}

/// Univariate degree-n stencils: weights over coarse offsets for an output
/// at a coarse vertex (`vertex`), at an edge midpoint (`edge`) for odd n,
/// or at the quarter position 1/2 between coarse 0 and 1 for even n.
fn univariate_classes(n: usize) -> (Vec<(i64, BigRational)>, Vec<(i64, BigRational)>) {
    assert!(n >= 1);
    let w = n as i64 + 2;
    // refine the coarse units to the fine grid (spacing 1/2)
    let mut fine: Vec<LinForm<i64>> = Vec::new();
    let base = -2 * w; // fine index of fine[0]
    for t in -2 * w..=2 * w - 1 {
        let form = if t.rem_euclid(2) == 0 {
            LinForm::unit(t.div_euclid(2))
        } else {
            let i = (t - 1).div_euclid(2);
            LinForm::mean(&[&LinForm::unit(i), &LinForm::unit(i + 1)])
        };
        fine.push(form);
    }
    // n-1 midpoint averaging passes; pass k leaves slot s at position
    // base + s + k/2 in fine units
    for _ in 0..n - 1 {
        fine = fine.windows(2).map(|p| LinForm::mean(&[&p[0], &p[1]])).collect();
    }
    let steps = (n - 1) as i64;
    // slot of fine position `pos_twice/2`: base + s + steps/2 = pos_twice/2
    let slot = |pos_twice: i64| -> usize {
        let num = pos_twice - steps - 2 * base;
        assert!(num % 2 == 0);
        (num / 2) as usize
    };
    let collect = |form: &LinForm<i64>| -> Vec<(i64, BigRational)> {
        form.terms.iter().map(|(k, v)| (*k, v.clone())).collect()
    };
    if n % 2 == 1 {
        // outputs sit at fine integers: coarse vertices and edge midpoints
        let vertex = collect(&fine[slot(0)]);
        let edge = collect(&fine[slot(2)]); // fine position 1
        (vertex, edge)
    } else {
        // outputs sit at fine half-integers; position 1/2 is the class whose
        // nearest coarse vertex offsets are 0 and 1
        let face = collect(&fine[slot(1)]);
        (face.clone(), face)
    }
}

/// Regular-grid stencils of M_n: roles `vertex`/`edge`/`face` for odd n
/// (the transposed edge stencil is omitted), role `face` for even n.
pub fn regular_mask(n: usize) -> StencilTable {
    assert!(n >= 1, "degree must be at least 1");
    let tensor = |a: &[(i64, BigRational)], b: &[(i64, BigRational)]| {
        let mut out = Vec::new();
        for (i, wi) in a {
            for (j, wj) in b {
                out.push(((*i, *j), wi * wj));
            }
        }
        out.sort_by_key(|(o, _)| *o);
        out
    };
    let mut roles = BTreeMap::new();
    if n % 2 == 1 {
        let (vertex, edge) = univariate_classes(n);
        roles.insert("vertex".to_string(), tensor(&vertex, &vertex));
        roles.insert("edge".to_string(), tensor(&edge, &vertex));
        roles.insert("face".to_string(), tensor(&edge, &edge));
    } else {
        let (face, _) = univariate_classes(n);
        roles.insert("face".to_string(), tensor(&face, &face));
    }
    let table = StencilTable { n, roles };
    table.assert_convex();
    table
}

impl StencilTable {
    /// Weights are non-negative and sum to exactly 1 per role.
    pub fn assert_convex(&self) {
        for (role, entries) in &self.roles {
            let zero: BigRational = Zero::zero();
            let mut sum = zero.clone();
            for (_, w) in entries {
                assert!(w >= &zero, "negative weight in role {role}");
                sum += w;
            }
            assert_eq!(sum, BigRational::from_integer(BigInt::from(1)), "role {role}");
        }
    }

    /// Sorted weights of one role as exact rationals.
    pub fn weights(&self, role: &str) -> Option<Vec<BigRational>> {
        self.roles.get(role).map(|entries| {
            let mut w: Vec<BigRational> = entries.iter().map(|(_, r)| r.clone()).collect();
            w.sort();
            w.reverse();
            w
        })
    }

    /// JSON dump: one object per role with offsets and `p/q` weight strings.
    pub fn to_json(&self) -> serde_json::Value {
        let roles: Vec<serde_json::Value> = self
            .roles
            .iter()
            .map(|(role, entries)| {
                serde_json::json!({
                    "role": role,
                    "offsets": entries.iter().map(|((i, j), _)| vec![*i, *j]).collect::<Vec<_>>(),
                    "weights": entries.iter().map(|(_, w)| rational_string(w)).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({ "n": self.n, "stencils": roles })
    }
}

/// Convenience: rational from a small fraction.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights_of(n: usize, role: &str) -> Vec<BigRational> {
        regular_mask(n).weights(role).unwrap()
    }

    #[test]
    fn degree_one_is_refine_only() {
        assert_eq!(weights_of(1, "vertex"), vec![ratio(1, 1)]);
        assert_eq!(weights_of(1, "edge"), vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(weights_of(1, "face"), vec![ratio(1, 4); 4]);
    }

    #[test]
    fn degree_two_is_regular_doo_sabin() {
        assert_eq!(
            weights_of(2, "face"),
            vec![ratio(9, 16), ratio(3, 16), ratio(3, 16), ratio(1, 16)]
        );
    }

    #[test]
    fn degree_three_is_regular_catmull_clark() {
        let v = weights_of(3, "vertex");
        let expect: Vec<BigRational> = [36, 6, 6, 6, 6, 1, 1, 1, 1]
            .iter()
            .map(|&p| ratio(p, 64))
            .collect();
        assert_eq!(v, expect);
        let e = weights_of(3, "edge");
        let expect: Vec<BigRational> =
            [6, 6, 1, 1, 1, 1].iter().map(|&p| ratio(p, 16)).collect();
        assert_eq!(e, expect);
        assert_eq!(weights_of(3, "face"), vec![ratio(1, 4); 4]);
    }

    #[test]
    fn all_masks_are_convex_combinations() {
        for n in 1..=9 {
            regular_mask(n).assert_convex();
        }
    }

    #[test]
    fn json_dump_shape() {
        let j = regular_mask(2).to_json();
        let s = j["stencils"].as_array().unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0]["role"], "face");
        assert!(s[0]["weights"].as_array().unwrap().contains(&serde_json::json!("9/16")));
    }
}

//! Structural nonnegativity certificates.
//!
//! A density `g_w` is nonnegative on `[0, 1]` when it is built as a product
//! `2 U_p g_p` or `2 (1 - U_p) g_p` from a nonnegative parent `g_p` whose
//! cumulative `U_p` runs from 0 to 1 (so `0 <= U_p <= 1` on `[0, 1]`). The
//! root `g = 1` is nonnegative by inspection. `F_t - F_s` for binary `s < t`
//! is then certified by writing it as a sum of `2^-n g_w` over the maximal
//! dyadic intervals that tile `[s, t]`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::curve::interval_word;
use crate::dyadic::Dyadic;
use crate::error::Result;
use crate::exact::rational::{int, pow2};
use crate::exact::{Polynomial, Rational};
use crate::model::{CurveModel, ShapeNode, Side, Word};

/// Checks one parent/child link and the child's own invariants.
fn check_link(
    parent: &ShapeNode,
    child: &ShapeNode,
    side: Side,
) -> std::result::Result<(), String> {
    let two_u = parent.u.scale(&int(2));
    let expected = match side {
        Side::L => &(&Polynomial::constant(int(2)) - &two_u) * &parent.g,
        Side::R => &two_u * &parent.g,
    };
    if child.g != expected {
        return Err(format!(
            "density of `{}` is not the split product of its parent",
            child.word
        ));
    }
    check_cumulative(child)
}

fn check_cumulative(node: &ShapeNode) -> std::result::Result<(), String> {
    if node.u != node.g.antiderivative() {
        return Err(format!("`{}`: U is not the antiderivative of g", node.word));
    }
    if !node.u.eval(&Rational::one()).is_one() {
        return Err(format!("`{}`: U(1) != 1", node.word));
    }
    Ok(())
}

/// Certifies every node on the path from the root to `word`.
pub fn certify_path(model: &CurveModel, word: &Word) -> std::result::Result<(), String> {
    let root = &model.root;
    if root.g != Polynomial::one() {
        return Err("root density is not 1".into());
    }
    check_cumulative(root)?;
    let mut node = root;
    for &side in word.sides() {
        let child = node
            .child(side)
            .ok_or_else(|| format!("word `{word}` leaves the built tree"))?;
        check_link(node, child, side)?;
        node = child;
    }
    Ok(())
}

/// Maximal dyadic intervals tiling `[s, t]`, as `(generation, index)` pairs
/// meaning `[index / 2^gen, (index + 1) / 2^gen]`.
pub fn dyadic_tiling(s: &Dyadic, t: &Dyadic) -> Vec<(u32, BigUint)> {
    let n = s.generation().max(t.generation());
    let mut a = s.index_at(n);
    let b = t.index_at(n);
    let mut out = Vec::new();
    while a < b {
        let mut k = a.trailing_zeros().map_or(n, |z| z.min(n as u64) as u32);
        while &a + (BigUint::one() << k) > b {
            k -= 1;
        }
        out.push((n - k, &a >> k));
        a += BigUint::one() << k;
    }
    out
}

/// `F_t - F_s` written as `Σ scale · g_word` with every scale positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub pieces: Vec<(Rational, Word)>,
}

impl Certificate {
    pub fn build(model: &CurveModel, s: &Dyadic, t: &Dyadic) -> Result<Self> {
        let pieces = dyadic_tiling(s, t)
            .into_iter()
            .map(|(n, j)| Ok((pow2(-(n as i64)), interval_word(model, n, &j)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { pieces })
    }

    /// Verifies that the certificate sums to `diff` and that every density
    /// it uses is structurally nonnegative.
    pub fn verify(&self, model: &CurveModel, diff: &Polynomial) -> std::result::Result<(), String> {
        let mut certified = BTreeSet::new();
        let mut sum = Polynomial::zero();
        for (scale, word) in &self.pieces {
            if scale <= &Rational::zero() {
                return Err("non-positive scale in certificate".into());
            }
            if certified.insert(word.clone()) {
                certify_path(model, word)?;
            }
            let node = model
                .node(word)
                .ok_or("certificate word outside the tree")?;
            sum = &sum + &node.g.scale(scale);
        }
        if sum != *diff {
            return Err("certificate does not sum to the difference".into());
        }
        Ok(())
    }
}

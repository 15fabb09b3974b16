//! Binary formulas over AND/OR with literal leaves, plus the recursive
//! constructions for the ternary-majority families.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::bool_fn::BooleanFunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    And,
    Or,
}

/// A formula is a binary tree; its size is the number of leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Leaf { var: u32, neg: bool },
    Node { op: Gate, left: Box<Formula>, right: Box<Formula> },
}

impl Formula {
    pub fn var(var: u32) -> Self {
        Formula::Leaf { var, neg: false }
    }

    pub fn not_var(var: u32) -> Self {
        Formula::Leaf { var, neg: true }
    }

    pub fn and(left: Formula, right: Formula) -> Self {
        Formula::Node { op: Gate::And, left: Box::new(left), right: Box::new(right) }
    }

    pub fn or(left: Formula, right: Formula) -> Self {
        Formula::Node { op: Gate::Or, left: Box::new(left), right: Box::new(right) }
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        match self {
            Formula::Leaf { .. } => 1,
            Formula::Node { left, right, .. } => left.size() + right.size(),
        }
    }

    pub fn is_monotone(&self) -> bool {
        match self {
            Formula::Leaf { neg, .. } => !neg,
            Formula::Node { left, right, .. } => left.is_monotone() && right.is_monotone(),
        }
    }

    pub fn max_var(&self) -> u32 {
        match self {
            Formula::Leaf { var, .. } => *var,
            Formula::Node { left, right, .. } => left.max_var().max(right.max_var()),
        }
    }

    /// Evaluate on a raw little-endian assignment word.
    pub fn evaluate_bits(&self, a: u32) -> bool {
        match self {
            Formula::Leaf { var, neg } => (a >> (var - 1) & 1 == 1) != *neg,
            Formula::Node { op, left, right } => {
                let (l, r) = (left.evaluate_bits(a), right.evaluate_bits(a));
                match op {
                    Gate::And => l && r,
                    Gate::Or => l || r,
                }
            }
        }
    }

    /// Pointwise evaluation over all assignments of `n` variables.
    pub fn to_function(&self, n: u32) -> Result<BooleanFunction> {
        if self.max_var() > n {
            return Err(Error::OutOfRange("formula variable index", self.max_var().to_string()));
        }
        Ok(BooleanFunction::from_fn(n, |a| self.evaluate_bits(a)))
    }

    pub fn to_json(&self) -> FormulaJson {
        match self {
            Formula::Leaf { var, neg } => FormulaJson::Leaf { var: *var, neg: *neg },
            Formula::Node { op, left, right } => FormulaJson::Node {
                op: *op,
                left: Box::new(left.to_json()),
                right: Box::new(right.to_json()),
            },
        }
    }

    pub fn from_json(j: &FormulaJson) -> Self {
        match j {
            FormulaJson::Leaf { var, neg } => Formula::Leaf { var: *var, neg: *neg },
            FormulaJson::Node { op, left, right } => Formula::Node {
                op: *op,
                left: Box::new(Formula::from_json(left)),
                right: Box::new(Formula::from_json(right)),
            },
        }
    }
}

/// JSON form: nested `{"op": "and"|"or", "left": .., "right": ..}` with
/// `{"var": i, "neg": bool}` leaves.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormulaJson {
    Node { op: Gate, left: Box<FormulaJson>, right: Box<FormulaJson> },
    Leaf { var: u32, neg: bool },
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Leaf { var, neg } => {
                if *neg {
                    write!(f, "!x{var}")
                } else {
                    write!(f, "x{var}")
                }
            }
            Formula::Node { op, left, right } => {
                let sym = match op {
                    Gate::And => "&",
                    Gate::Or => "|",
                };
                write!(f, "({left} {sym} {right})")
            }
        }
    }
}

/// The size-5 monotone majority-of-three formula over the given variables:
/// `(a & b) | ((a | b) & c)`.
pub fn maj3_formula(a: u32, b: u32, c: u32) -> Formula {
    Formula::or(
        Formula::and(Formula::var(a), Formula::var(b)),
        Formula::and(Formula::or(Formula::var(a), Formula::var(b)), Formula::var(c)),
    )
}

/// Size `4h + 1` monotone formula for the unbalanced recursive family:
/// `(x_{2h} & x_{2h+1}) | ((x_{2h} | x_{2h+1}) & <lower levels>)`, with the
/// lower-level function substituted where the base formula uses its third
/// variable exactly once.
pub fn urec_formula(h: u32) -> Formula {
    assert!(h >= 1);
    let mut acc = maj3_formula(1, 2, 3);
    for level in 2..=h {
        let (a, b) = (2 * level, 2 * level + 1);
        acc = Formula::or(
            Formula::and(Formula::var(a), Formula::var(b)),
            Formula::and(Formula::or(Formula::var(a), Formula::var(b)), acc),
        );
    }
    acc
}

/// Size `5^h` monotone formula for the balanced recursive family, obtained by
/// substituting the base formula into each leaf.
pub fn brec_formula(h: u32) -> Formula {
    assert!(h >= 1);
    fn go(h: u32, offset: u32) -> Formula {
        if h == 1 {
            return maj3_formula(offset + 1, offset + 2, offset + 3);
        }
        let block = 3u32.pow(h - 1);
        let sub = |j: u32| go(h - 1, offset + j * block);
        // (B1 & B2) | ((B1 | B2) & B3), so the third block appears once
        Formula::or(
            Formula::and(sub(0), sub(1)),
            Formula::and(Formula::or(sub(0), sub(1)), sub(2)),
        )
    }
    go(h, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bool_fn::{brec_eval, brec_maj, maj, urec_maj};

    #[test]
    fn maj3_formula_matches_function() {
        let phi = maj3_formula(1, 2, 3);
        assert_eq!(phi.size(), 5);
        assert_eq!(phi.to_function(3).unwrap(), maj(3).unwrap());
    }

    #[test]
    fn single_leaf_identity() {
        let phi = Formula::var(1);
        assert_eq!(phi.size(), 1);
        let f = phi.to_function(1).unwrap();
        assert!(!f.evaluate_bits(0));
        assert!(f.evaluate_bits(1));
    }

    #[test]
    fn urec_formula_sizes_and_functions() {
        for h in 1..=4 {
            let phi = urec_formula(h);
            assert_eq!(phi.size(), (4 * h + 1) as usize);
            assert!(phi.is_monotone());
            assert_eq!(phi.to_function(2 * h + 1).unwrap(), urec_maj(h).unwrap());
        }
    }

    #[test]
    fn brec_formula_sizes_and_functions() {
        for h in 1..=2 {
            let phi = brec_formula(h);
            assert_eq!(phi.size(), 5usize.pow(h));
            assert!(phi.is_monotone());
            assert_eq!(phi.to_function(3u32.pow(h)).unwrap(), brec_maj(h).unwrap());
        }
    }

    #[test]
    fn brec_formula_height_three_sampled() {
        let phi = brec_formula(3);
        assert_eq!(phi.size(), 125);
        // deterministic LCG sample over the 2^27 assignments
        let mut state = 0x2545f4914f6cdd1du64;
        for _ in 0..100_000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (state >> 16) as u32 & ((1 << 27) - 1);
            assert_eq!(phi.evaluate_bits(a), brec_eval(3, a));
        }
    }

    #[test]
    fn formula_json_round_trip() {
        let phi = urec_formula(2);
        let js = serde_json::to_string(&phi.to_json()).unwrap();
        let back: FormulaJson = serde_json::from_str(&js).unwrap();
        assert_eq!(Formula::from_json(&back), phi);
    }

    #[test]
    fn variable_out_of_range_detected() {
        let phi = maj3_formula(1, 2, 5);
        assert!(phi.to_function(3).is_err());
    }
}

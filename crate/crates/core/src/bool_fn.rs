//! Boolean functions as explicit truth tables, their minterms/maxterms, and
//! the three generated families: majority, unbalanced recursive ternary
//! majority, and balanced recursive ternary majority.
//!
//! Conventions, used everywhere in this crate and in the JSON formats:
//! variable `i` (1-based) is stored in bit `i - 1` of an assignment word, so
//! the assignment index into a truth table is the little-endian encoding of
//! the input. A bitstring such as `"110"` prints variable 1 leftmost.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Largest arity for which truth tables are materialized.
pub const MAX_TABLE_BITS: u32 = 24;

/// Largest assignment width; the height-3 balanced family needs 27 bits even
/// though its truth table is never materialized.
pub const MAX_VECTOR_BITS: u32 = 27;

/// An assignment to `n` input variables, `1 <= n <= 27`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitVector {
    n: u32,
    bits: u32,
}

impl BitVector {
    pub fn new(n: u32, bits: u32) -> Self {
        assert!(
            (1..=MAX_VECTOR_BITS).contains(&n),
            "bit-count {n} outside 1..={MAX_VECTOR_BITS}"
        );
        assert!(bits < (1u32 << n), "bits above position {n} must be zero");
        BitVector { n, bits }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Little-endian encoding; also the truth-table index.
    pub fn encoding(&self) -> u32 {
        self.bits
    }

    /// Value of variable `var` (1-based).
    pub fn get(&self, var: u32) -> bool {
        debug_assert!((1..=self.n).contains(&var));
        self.bits >> (var - 1) & 1 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Parse a bitstring with variable 1 leftmost, e.g. `"110"`.
    pub fn parse(s: &str) -> Result<Self> {
        let n = s.len() as u32;
        if !(1..=MAX_VECTOR_BITS).contains(&n) {
            return Err(Error::OutOfRange("bitstring length", s.to_string()));
        }
        let mut bits = 0u32;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => return Err(Error::Parse(format!("bad bitstring {s:?}"))),
            }
        }
        Ok(BitVector { n, bits })
    }

    /// `self <= other` in the bitwise partial order.
    pub fn le(&self, other: &BitVector) -> bool {
        self.bits & !other.bits == 0
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A Boolean function over `n <= 24` bits as a packed truth table.
#[derive(Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    n: u32,
    table: Vec<u64>,
}

impl BooleanFunction {
    /// Build from a per-assignment predicate.
    pub fn from_fn(n: u32, mut f: impl FnMut(u32) -> bool) -> Self {
        assert!((1..=MAX_TABLE_BITS).contains(&n));
        let len = 1usize << n;
        let mut table = vec![0u64; len.div_ceil(64)];
        for a in 0..len as u32 {
            if f(a) {
                table[(a / 64) as usize] |= 1 << (a % 64);
            }
        }
        BooleanFunction { n, table }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    fn bit(&self, a: u32) -> bool {
        self.table[(a / 64) as usize] >> (a % 64) & 1 == 1
    }

    /// Table entry at the assignment's encoding.
    pub fn evaluate(&self, x: &BitVector) -> Result<bool> {
        if x.n() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                got: x.n(),
            });
        }
        Ok(self.bit(x.encoding()))
    }

    /// Evaluate at a raw little-endian assignment word.
    pub fn evaluate_bits(&self, a: u32) -> bool {
        debug_assert!(self.n == 32 || a < (1 << self.n));
        self.bit(a)
    }

    /// Exhaustive check of monotonicity via the single-bit-flip reduction.
    pub fn is_monotone(&self) -> bool {
        for a in 0..(1u32 << self.n) {
            if !self.bit(a) {
                continue;
            }
            // every assignment above a one-point must be a one-point;
            // checking direct successors suffices
            for i in 0..self.n {
                if a >> i & 1 == 0 && !self.bit(a | 1 << i) {
                    return false;
                }
            }
        }
        true
    }

    /// f(x) == !f(!x) for every assignment.
    pub fn is_self_dual(&self) -> bool {
        let mask = if self.n == 32 { u32::MAX } else { (1u32 << self.n) - 1 };
        (0..(1u32 << self.n)).all(|a| self.bit(a) != self.bit(!a & mask))
    }

    /// All minterms (minimal one-points), sorted by encoding.
    pub fn minterms(&self) -> Result<TermList> {
        self.terms(TermKind::Minterm)
    }

    /// All maxterms (maximal zero-points), sorted by encoding.
    pub fn maxterms(&self) -> Result<TermList> {
        self.terms(TermKind::Maxterm)
    }

    fn terms(&self, kind: TermKind) -> Result<TermList> {
        if !self.is_monotone() {
            return Err(Error::NotMonotone);
        }
        let mut terms = Vec::new();
        for a in 0..(1u32 << self.n) {
            let keep = match kind {
                TermKind::Minterm => {
                    self.bit(a) && (0..self.n).all(|i| a >> i & 1 == 0 || !self.bit(a & !(1 << i)))
                }
                TermKind::Maxterm => {
                    !self.bit(a) && (0..self.n).all(|i| a >> i & 1 == 1 || self.bit(a | 1 << i))
                }
            };
            if keep {
                terms.push(BitVector::new(self.n, a));
            }
        }
        Ok(TermList { kind, terms })
    }

    /// Hex dump of the truth table, little-endian by assignment index.
    pub fn table_hex(&self) -> String {
        let nbytes = (1usize << self.n).div_ceil(8);
        let mut s = String::with_capacity(nbytes * 2);
        for byte_idx in 0..nbytes {
            let word = self.table[byte_idx / 8];
            let byte = (word >> (8 * (byte_idx % 8))) & 0xff;
            s.push_str(&format!("{byte:02x}"));
        }
        s
    }

    pub fn from_table_hex(n: u32, hex: &str) -> Result<Self> {
        if !(1..=MAX_TABLE_BITS).contains(&n) {
            return Err(Error::OutOfRange("arity", n.to_string()));
        }
        let nbytes = (1usize << n).div_ceil(8);
        if hex.len() != nbytes * 2 {
            return Err(Error::Parse(format!(
                "table_hex length {} does not match arity {n}",
                hex.len()
            )));
        }
        let mut table = vec![0u64; (1usize << n).div_ceil(64)];
        for byte_idx in 0..nbytes {
            let byte = u8::from_str_radix(&hex[byte_idx * 2..byte_idx * 2 + 2], 16)
                .map_err(|_| Error::Parse(format!("bad hex in table_hex at byte {byte_idx}")))?;
            table[byte_idx / 8] |= (byte as u64) << (8 * (byte_idx % 8));
        }
        Ok(BooleanFunction { n, table })
    }

    pub fn to_json(&self) -> FunctionJson {
        FunctionJson {
            n: self.n,
            table_hex: self.table_hex(),
        }
    }

    pub fn from_json(j: &FunctionJson) -> Result<Self> {
        Self::from_table_hex(j.n, &j.table_hex)
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(n={}, table={})", self.n, self.table_hex())
    }
}

/// JSON form of a function: `{"n": 3, "table_hex": "e8"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionJson {
    pub n: u32,
    pub table_hex: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Minterm,
    Maxterm,
}

/// Minterms or maxterms of a monotone function, sorted by encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermList {
    pub kind: TermKind,
    pub terms: Vec<BitVector>,
}

impl TermList {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Majority on an odd number of bits: 1 iff at least `l + 1` of `2l + 1` bits are set.
pub fn maj(n: u32) -> Result<BooleanFunction> {
    if n % 2 == 0 || !(1..=23).contains(&n) {
        return Err(Error::OutOfRange("majority arity", n.to_string()));
    }
    let threshold = n / 2 + 1;
    Ok(BooleanFunction::from_fn(n, |a| a.count_ones() >= threshold))
}

fn maj3(a: bool, b: bool, c: bool) -> bool {
    (a & b) | (a & c) | (b & c)
}

/// Unbalanced recursive ternary majority on `2h + 1` bits:
/// level `h` applies MAJ3 to (level `h-1` on bits `1..2h-1`, bit `2h`, bit `2h+1`).
pub fn urec_maj(h: u32) -> Result<BooleanFunction> {
    let n = 2 * h + 1;
    if h < 1 || n > 23 {
        return Err(Error::OutOfRange("unbalanced recursion height", h.to_string()));
    }
    Ok(BooleanFunction::from_fn(n, |a| urec_eval(h, a)))
}

fn urec_eval(h: u32, a: u32) -> bool {
    let mut acc = maj3(a & 1 == 1, a >> 1 & 1 == 1, a >> 2 & 1 == 1);
    for level in 2..=h {
        acc = maj3(acc, a >> (2 * level - 1) & 1 == 1, a >> (2 * level) & 1 == 1);
    }
    acc
}

/// Balanced recursive ternary majority on `3^h` bits, materialized.
/// Only `h <= 2` fits in a table; use [`brec_eval`] for `h = 3`.
pub fn brec_maj(h: u32) -> Result<BooleanFunction> {
    if !(1..=2).contains(&h) {
        return Err(Error::OutOfRange(
            "balanced recursion height (materialized)",
            h.to_string(),
        ));
    }
    let n = 3u32.pow(h);
    Ok(BooleanFunction::from_fn(n, |a| brec_eval(h, a)))
}

/// Evaluate the balanced recursive ternary majority of height `h <= 3` on a
/// raw little-endian assignment over `3^h` bits, without materializing a table.
pub fn brec_eval(h: u32, a: u32) -> bool {
    assert!((1..=3).contains(&h), "balanced recursion height {h} outside 1..=3");
    fn go(h: u32, a: u32, offset: u32) -> bool {
        if h == 1 {
            return maj3(
                a >> offset & 1 == 1,
                a >> (offset + 1) & 1 == 1,
                a >> (offset + 2) & 1 == 1,
            );
        }
        let block = 3u32.pow(h - 1);
        maj3(
            go(h - 1, a, offset),
            go(h - 1, a, offset + block),
            go(h - 1, a, offset + 2 * block),
        )
    }
    go(h, a, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_conventions() {
        let x = BitVector::parse("110").unwrap();
        assert_eq!(x.encoding(), 0b011);
        assert!(x.get(1) && x.get(2) && !x.get(3));
        assert_eq!(x.to_string(), "110");
    }

    #[test]
    fn maj3_truth_table() {
        let f = maj(3).unwrap();
        // inputs 000..111 -> outputs (0,0,0,1,0,1,1,1)
        let expected = [false, false, false, true, false, true, true, true];
        for (a, want) in expected.iter().enumerate() {
            assert_eq!(f.evaluate_bits(a as u32), *want);
        }
        assert_eq!(f.table_hex(), "e8");
        assert!(f.evaluate(&BitVector::parse("110").unwrap()).unwrap());
        assert!(!f.evaluate(&BitVector::parse("000").unwrap()).unwrap());
    }

    #[test]
    fn maj5_basics() {
        let f = maj(5).unwrap();
        assert!(f.evaluate(&BitVector::parse("11100").unwrap()).unwrap());
        assert!(f.is_monotone());
        assert!(f.is_self_dual());
        assert_eq!(f.minterms().unwrap().len(), 10);
        assert_eq!(f.maxterms().unwrap().len(), 10);
    }

    #[test]
    fn maj_rejects_even_arity() {
        assert!(maj(4).is_err());
        assert!(maj(25).is_err());
        assert!(maj(1).is_ok());
    }

    #[test]
    fn maj1_is_identity() {
        let f = maj(1).unwrap();
        assert!(!f.evaluate_bits(0));
        assert!(f.evaluate_bits(1));
    }

    #[test]
    fn maj3_terms_match_known_sets() {
        let f = maj(3).unwrap();
        let mins = f.minterms().unwrap();
        let maxs = f.maxterms().unwrap();
        let names = |tl: &TermList| tl.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>();
        assert_eq!(names(&mins), ["110", "101", "011"]);
        assert_eq!(names(&maxs), ["100", "010", "001"]);
    }

    #[test]
    fn not_monotone_rejected() {
        // x1 xor x2
        let f = BooleanFunction::from_fn(2, |a| (a & 1 == 1) != (a >> 1 & 1 == 1));
        assert!(!f.is_monotone());
        assert!(matches!(f.minterms(), Err(Error::NotMonotone)));
    }

    #[test]
    fn and2_not_self_dual() {
        let f = BooleanFunction::from_fn(2, |a| a & 1 == 1 && a >> 1 & 1 == 1);
        assert!(f.is_monotone());
        assert!(!f.is_self_dual());
    }

    #[test]
    fn urec_base_case_and_step() {
        assert_eq!(urec_maj(1).unwrap(), maj(3).unwrap());
        let f = urec_maj(2).unwrap();
        // 11011: MAJ3(MAJ3(1,1,0),1,1) = 1
        assert!(f.evaluate(&BitVector::parse("11011").unwrap()).unwrap());
        assert_eq!(f.minterms().unwrap().len(), 7);
        assert!(f.is_monotone() && f.is_self_dual());
    }

    #[test]
    fn urec_minterm_count_recurrence() {
        // u_h = 2 u_{h-1} + 1
        let mut prev = 3;
        for h in 2..=4 {
            let count = urec_maj(h).unwrap().minterms().unwrap().len();
            assert_eq!(count, 2 * prev + 1);
            prev = count;
        }
    }

    #[test]
    fn brec_base_and_height_two() {
        assert_eq!(brec_maj(1).unwrap(), maj(3).unwrap());
        let f = brec_maj(2).unwrap();
        // listed minterm and maxterm patterns
        assert!(f.evaluate(&BitVector::parse("110110000").unwrap()).unwrap());
        assert!(!f.evaluate(&BitVector::parse("111100100").unwrap()).unwrap());
        assert_eq!(f.minterms().unwrap().len(), 27);
        assert_eq!(f.maxterms().unwrap().len(), 27);
        assert!(f.is_monotone() && f.is_self_dual());
        assert!(brec_maj(3).is_err());
    }

    #[test]
    fn brec_eval_agrees_with_table() {
        let f = brec_maj(2).unwrap();
        for a in 0..512 {
            assert_eq!(f.evaluate_bits(a), brec_eval(2, a));
        }
    }

    #[test]
    fn families_monotone_self_dual() {
        for h in 1..=3 {
            let f = urec_maj(h).unwrap();
            assert!(f.is_monotone() && f.is_self_dual(), "urec h={h}");
        }
        for h in 1..=2 {
            let f = brec_maj(h).unwrap();
            assert!(f.is_monotone() && f.is_self_dual(), "brec h={h}");
        }
        for l in 1..=3 {
            let f = maj(2 * l + 1).unwrap();
            assert!(f.is_monotone() && f.is_self_dual(), "maj l={l}");
        }
    }

    #[test]
    fn self_dual_terms_balance() {
        for f in [maj(5).unwrap(), urec_maj(2).unwrap(), brec_maj(2).unwrap()] {
            assert_eq!(f.minterms().unwrap().len(), f.maxterms().unwrap().len());
        }
    }

    #[test]
    fn evaluate_arity_mismatch() {
        let f = maj(3).unwrap();
        let x = BitVector::parse("11011").unwrap();
        assert!(matches!(
            f.evaluate(&x),
            Err(Error::ArityMismatch { expected: 3, got: 5 })
        ));
    }

    #[test]
    fn hex_round_trip() {
        let f = urec_maj(2).unwrap();
        let j = f.to_json();
        let back = BooleanFunction::from_json(&j).unwrap();
        assert_eq!(back, f);
    }
}

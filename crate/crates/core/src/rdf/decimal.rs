//! Exact comparison of xsd:decimal / xsd:integer lexical forms. No binary
//! floating point anywhere: `2.0` and `2.00` compare equal, `0.1` stays
//! `0.1`.

use std::cmp::Ordering;

/// A normalized decimal: sign, integer digits without leading zeros, and
/// fraction digits without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    negative: bool,
    int: String,
    frac: String,
}

impl Decimal {
    pub fn parse(lexical: &str) -> Option<Decimal> {
        let s = lexical.trim();
        let (negative, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if rest.is_empty() {
            return None;
        }
        let (int_raw, frac_raw) = match rest.split_once('.') {
            Some((i, f)) => (i, f),
            None => (rest, ""),
        };
        if int_raw.is_empty() && frac_raw.is_empty() {
            return None;
        }
        if !int_raw.bytes().all(|b| b.is_ascii_digit())
            || !frac_raw.bytes().all(|b| b.is_ascii_digit())
        {
            return None;
        }
        let int = int_raw.trim_start_matches('0');
        let frac = frac_raw.trim_end_matches('0');
        let int = if int.is_empty() { "0" } else { int };
        let is_zero = int == "0" && frac.is_empty();
        Some(Decimal {
            negative: negative && !is_zero,
            int: int.to_string(),
            frac: frac.to_string(),
        })
    }

    fn cmp_magnitude(&self, other: &Decimal) -> Ordering {
        self.int
            .len()
            .cmp(&other.int.len())
            .then_with(|| self.int.cmp(&other.int))
            .then_with(|| cmp_fraction(&self.frac, &other.frac))
    }
}

fn cmp_fraction(a: &str, b: &str) -> Ordering {
    let max = a.len().max(b.len());
    for i in 0..max {
        let da = a.as_bytes().get(i).copied().unwrap_or(b'0');
        let db = b.as_bytes().get(i).copied().unwrap_or(b'0');
        match da.cmp(&db) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.negative, other.negative) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_magnitude(other),
            (true, true) => other.cmp_magnitude(self),
        }
    }
}

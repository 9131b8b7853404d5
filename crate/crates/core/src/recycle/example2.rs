//! Three messages with P_U = (1/2, 1/4, 1/4) and an n-bit key. Message 0 is
//! sent as (0, B) with a fresh fair bit B, so one key bit is used and one
//! new secret bit reaches the receiver; messages 1 and 2 use two key bits.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::ciphers::{digits_label, CipherSpec, Decoder, EncoderRow};
use crate::error::{EpsError, Result};
use crate::prob::{int, ratio, FiniteDist, Prob};

pub const MAX_KEY_BITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Example2 {
    pub n: usize,
    pub spec: CipherSpec,
}

fn expand(u: usize, fresh: u8) -> [u8; 2] {
    match u {
        0 => [0, fresh],
        1 => [1, 0],
        _ => [1, 1],
    }
}

fn key_bits(r: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((r >> (n - 1 - i)) & 1) as u8).collect()
}

fn x_index(bits: [u8; 2]) -> usize {
    (bits[0] as usize) << 1 | bits[1] as usize
}

pub fn build_example2(n: usize) -> Result<Example2> {
    if !(2..=MAX_KEY_BITS).contains(&n) {
        return Err(EpsError::InvalidParameter {
            name: "n",
            value: n.to_string(),
            reason: "need 2 <= n <= 12 key bits",
        });
    }
    let source = FiniteDist::from_fractions(&[(1, 2), (1, 4), (1, 4)])?;
    let size = 1usize << n;
    let labels: Vec<String> = (0..size).map(|r| digits_label(&key_bits(r, n))).collect();
    let key = FiniteDist::uniform_labeled(labels)?;
    let x_labels: Vec<String> = (0..4).map(|i| digits_label(&key_bits(i, 2))).collect();

    let mut encoder = Vec::with_capacity(3);
    let mut table = BTreeMap::new();
    for u in 0..3 {
        let mut rows = Vec::with_capacity(size);
        for r in 0..size {
            let k = key_bits(r, n);
            let fresh: &[u8] = if u == 0 { &[0, 1] } else { &[0] };
            let weight = ratio(1, fresh.len() as i64);
            let row: EncoderRow = fresh
                .iter()
                .map(|&b| {
                    let e = expand(u, b);
                    let x = x_index([e[0] ^ k[0], e[1] ^ k[1]]);
                    table.insert((r, x), u);
                    (weight.clone(), x)
                })
                .collect();
            rows.push(row);
        }
        encoder.push(rows);
    }
    let spec = CipherSpec::from_parts(
        format!("example2 (n={n})"),
        source,
        key,
        x_labels,
        encoder,
        Decoder::Table(table),
    )?;
    Ok(Example2 { n, spec })
}

impl Example2 {
    /// Key bits used up by message `u`: 1 for message 0, else 2.
    pub fn bits_consumed(&self, u: usize) -> u32 {
        if u == 0 {
            1
        } else {
            2
        }
    }

    /// Σ P_U(u)·bits_consumed(u), exactly.
    pub fn expected_consumption(&self) -> Prob {
        let mut total = Prob::zero();
        for (u, p) in self.spec.source().masses().iter().enumerate() {
            total += p * int(self.bits_consumed(u) as i64);
        }
        total
    }

    /// The fresh bit is readable exactly when the message is 0.
    pub fn recover_fresh_bit(&self, x: usize, r: usize) -> Result<Option<u8>> {
        let u = crate::ciphers::decrypt(&self.spec, x, r)?;
        if u != 0 {
            return Ok(None);
        }
        let k = key_bits(r, self.n);
        Ok(Some((x as u8 & 1) ^ k[1]))
    }

    /// Residual secret shared after one use: key bits 3..n, plus the fresh
    /// bit when u = 0. Rendered as a bit string.
    pub fn residual(&self, u: usize, r: usize, aux: usize) -> String {
        let k = key_bits(r, self.n);
        let mut bits = k[2..].to_vec();
        if u == 0 {
            bits.push(aux as u8);
        }
        digits_label(&bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ciphers::{encrypt, induced_joint};
    use crate::prob::info_report;
    use crate::verify::{check_eps, key_metrics};

    #[test]
    fn consumption_is_one_and_a_half() {
        for n in 2..=4 {
            let ex = build_example2(n).unwrap();
            assert_eq!(ex.expected_consumption(), ratio(3, 2));
            let j = induced_joint(&ex.spec);
            assert!(check_eps(&j).is_eps());
            let rep = info_report(&j);
            assert!((rep.i_r_uxjoint - 1.5).abs() < 1e-9);
            assert!((rep.h_u - 1.5).abs() < 1e-12);
            let m = key_metrics(&j).unwrap();
            assert!((m.residual - (n as f64 - 1.5)).abs() < 1e-9);
        }
    }

    #[test]
    fn fresh_bit_is_recovered() {
        let ex = build_example2(2).unwrap();
        for r in 0..4 {
            for aux in 0..2 {
                let x = encrypt(&ex.spec, 0, r, aux).unwrap();
                assert_eq!(ex.recover_fresh_bit(x, r).unwrap(), Some(aux as u8));
            }
            let x = encrypt(&ex.spec, 2, r, 0).unwrap();
            assert_eq!(ex.recover_fresh_bit(x, r).unwrap(), None);
        }
        assert_eq!(ex.residual(0, 3, 1), "1");
        assert_eq!(ex.residual(1, 3, 0), "-");
        assert_eq!(ex.bits_consumed(0), 1);
        assert_eq!(ex.bits_consumed(2), 2);
    }

    #[test]
    fn rejects_short_keys() {
        assert!(build_example2(1).is_err());
        assert!(build_example2(13).is_err());
    }
}

//! Compress, encrypt, pad: a prefix codeword masked digit-wise by the key,
//! followed by uniform pad digits up to the longest codeword.

use std::collections::BTreeMap;

use super::prefix::PrefixCode;
use super::spec::{digits_label, digits_of, index_of_digits, CipherSpec, Decoder, EncoderRow};
use crate::error::{EpsError, Result};
use crate::prob::{ratio, FiniteDist};

/// Largest key (and ciphertext) alphabet `d^γ` that is materialized.
pub const MAX_KEY_ALPHABET: usize = 4096;

/// Largest total number of encoder entries `Σ_u d^γ · d^(γ-σ(u))`.
pub const MAX_ENCODER_CELLS: usize = 1 << 22;

pub fn build_compress_encrypt_pad(source: &FiniteDist, code: &PrefixCode) -> Result<CipherSpec> {
    let d = code.arity();
    let mut words = Vec::with_capacity(source.len());
    for label in source.labels() {
        let cw = code
            .codeword_of(label)
            .ok_or_else(|| EpsError::CodeMismatch(label.clone()))?;
        words.push(cw.to_vec());
    }
    let gamma = words.iter().map(Vec::len).max().unwrap_or(0);
    let size = (d as usize)
        .checked_pow(gamma as u32)
        .filter(|&s| s <= MAX_KEY_ALPHABET)
        .ok_or(EpsError::BudgetExceeded {
            what: "key alphabet d^gamma",
            value: (d as f64).powi(gamma as i32) as usize,
            cap: MAX_KEY_ALPHABET,
        })?;
    let cells: usize = words
        .iter()
        .map(|w| size * (d as usize).pow((gamma - w.len()) as u32))
        .sum();
    if cells > MAX_ENCODER_CELLS {
        return Err(EpsError::BudgetExceeded {
            what: "encoder cells",
            value: cells,
            cap: MAX_ENCODER_CELLS,
        });
    }

    let labels: Vec<String> = (0..size).map(|i| digits_label(&digits_of(i, d, gamma))).collect();
    let key = FiniteDist::uniform_labeled(labels.clone())?;

    let mut encoder = Vec::with_capacity(words.len());
    for w in &words {
        let pad_len = gamma - w.len();
        let pads = (d as usize).pow(pad_len as u32);
        let mass = ratio(1, pads as i64);
        let mut rows = Vec::with_capacity(size);
        for r in 0..size {
            let rd = digits_of(r, d, gamma);
            let row: EncoderRow = (0..pads)
                .map(|a| {
                    let mut plain = w.clone();
                    plain.extend(digits_of(a, d, pad_len));
                    let xd: Vec<u8> = plain
                        .iter()
                        .zip(&rd)
                        .map(|(&p, &k)| ((p as u32 + k as u32) % d) as u8)
                        .collect();
                    (mass.clone(), index_of_digits(&xd, d))
                })
                .collect();
            rows.push(row);
        }
        encoder.push(rows);
    }

    let codebook: BTreeMap<Vec<u8>, usize> =
        words.into_iter().enumerate().map(|(u, w)| (w, u)).collect();
    CipherSpec::from_parts(
        format!("compress-encrypt-pad (d={d}, gamma={gamma})"),
        source.clone(),
        key,
        labels,
        encoder,
        Decoder::PrefixStrip {
            arity: d,
            gamma,
            codebook,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ciphers::{decrypt, encrypt, huffman_code, induced_joint, shannon_code};
    use crate::prob::{info_report, is_independent, to_f64, Variable};

    fn check(source: &FiniteDist, code: &PrefixCode, h_x: f64, i_r: f64) {
        let spec = build_compress_encrypt_pad(source, code).unwrap();
        spec.check_round_trip().unwrap();
        let joint = induced_joint(&spec);
        assert!(is_independent(&joint, &[Variable::U], &[Variable::X]).unwrap());
        assert!(is_independent(&joint, &[Variable::U], &[Variable::R]).unwrap());
        let rep = info_report(&joint);
        assert!((rep.h_x - h_x).abs() < 1e-9, "{} vs {h_x}", rep.h_x);
        assert!((rep.i_r_uxjoint - i_r).abs() < 1e-9, "{} vs {i_r}", rep.i_r_uxjoint);
        let e = to_f64(&code.expected_length(source).unwrap()) * (code.arity() as f64).log2();
        assert!((rep.i_r_uxjoint - e).abs() < 1e-9);
    }

    #[test]
    fn shannon_on_skewed_bit() {
        let src = FiniteDist::from_fractions(&[(9, 10), (1, 10)]).unwrap();
        check(&src, &shannon_code(&src, 2).unwrap(), 4.0, 1.3);
    }

    #[test]
    fn huffman_on_table_source() {
        let src = FiniteDist::from_weights(&[1, 1, 1, 3, 4, 7, 11]).unwrap();
        check(&src, &huffman_code(&src, 2).unwrap(), 6.0, 66.0 / 28.0);
    }

    #[test]
    fn dyadic_reaches_source_entropy() {
        let src = FiniteDist::from_fractions(&[(1, 2), (1, 4), (1, 4)]).unwrap();
        check(&src, &huffman_code(&src, 2).unwrap(), 2.0, 1.5);
        let tern = FiniteDist::from_fractions(&[(1, 3), (1, 3), (1, 9), (1, 9), (1, 9)]).unwrap();
        let l3 = 3f64.log2();
        check(&tern, &huffman_code(&tern, 3).unwrap(), 2.0 * l3, 4.0 / 3.0 * l3);
    }

    #[test]
    fn pad_digits_are_ignored_by_the_receiver() {
        let src = FiniteDist::from_fractions(&[(9, 10), (1, 10)]).unwrap();
        let spec = build_compress_encrypt_pad(&src, &shannon_code(&src, 2).unwrap()).unwrap();
        // u=0 has a 1-digit codeword, so 8 pad values; each must decode back to u=0.
        assert_eq!(spec.aux_size(0, 5).unwrap(), 8);
        for aux in 0..8 {
            let x = encrypt(&spec, 0, 5, aux).unwrap();
            assert_eq!(decrypt(&spec, x, 5).unwrap(), 0);
        }
    }

    #[test]
    fn mismatched_code_is_rejected() {
        let src = FiniteDist::from_fractions(&[(9, 10), (1, 10)]).unwrap();
        let other = FiniteDist::uniform_labeled(vec!["a".into(), "b".into()]).unwrap();
        let code = huffman_code(&other, 2).unwrap();
        assert!(matches!(
            build_compress_encrypt_pad(&src, &code),
            Err(EpsError::CodeMismatch(_))
        ));
    }

    #[test]
    fn single_symbol_needs_no_key() {
        let src = FiniteDist::point("only");
        let spec = build_compress_encrypt_pad(&src, &huffman_code(&src, 2).unwrap()).unwrap();
        assert_eq!(spec.key().len(), 1);
        spec.check_round_trip().unwrap();
    }
}

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{EpsError, Result};
use crate::prob::{FiniteDist, JointSystem, Prob};

/// One encoder row: the outcome for each auxiliary-randomness value, as
/// `(probability of that aux value, ciphertext index)`.
pub type EncoderRow = Vec<(Prob, usize)>;

/// How the receiver maps `(r, x)` back to a message index.
#[derive(Debug, Clone, PartialEq)]
pub enum Decoder {
    /// `A = (x − r) mod θ`; the message is the cell of `cumulative` holding `A`.
    /// Cells past the last message are slack and never decode.
    Modular { theta: u64, cumulative: Vec<u64> },
    /// Key and ciphertext are `gamma` base-`arity` digits. Strip the key
    /// digit by digit until the result is a codeword; trailing pad is ignored.
    PrefixStrip {
        arity: u32,
        gamma: usize,
        codebook: BTreeMap<Vec<u8>, usize>,
    },
    /// Key index is `inner_key * extra + e`; the `e` part is ignored.
    ExtendedKey { inner: Box<Decoder>, extra: usize },
    /// Explicit table over positive-probability pairs.
    Table(BTreeMap<(usize, usize), usize>),
}

/// A complete cipher: source law, key law, probabilistic encoder kernel and
/// deterministic decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct CipherSpec {
    pub(crate) scheme: String,
    pub(crate) source: FiniteDist,
    pub(crate) key: FiniteDist,
    pub(crate) x_labels: Vec<String>,
    /// Indexed `[u][r]`.
    pub(crate) encoder: Vec<Vec<EncoderRow>>,
    pub(crate) decoder: Decoder,
}

impl CipherSpec {
    /// Assembles a cipher from parts, checking shapes and that every encoder
    /// row is a distribution. Use [`CipherSpec::check_round_trip`] to check
    /// the decoder.
    pub fn from_parts(
        scheme: impl Into<String>,
        source: FiniteDist,
        key: FiniteDist,
        x_labels: Vec<String>,
        encoder: Vec<Vec<EncoderRow>>,
        decoder: Decoder,
    ) -> Result<Self> {
        if encoder.len() != source.len() {
            return Err(EpsError::LengthMismatch {
                what: "encoder rows vs source support",
                left: encoder.len(),
                right: source.len(),
            });
        }
        for row in &encoder {
            if row.len() != key.len() {
                return Err(EpsError::LengthMismatch {
                    what: "encoder columns vs key support",
                    left: row.len(),
                    right: key.len(),
                });
            }
            for cell in row {
                let mut total = Prob::zero();
                for (p, x) in cell {
                    if !p.is_positive() {
                        return Err(EpsError::NegativeMass {
                            label: "encoder aux".into(),
                            mass: p.to_string(),
                        });
                    }
                    if *x >= x_labels.len() {
                        return Err(EpsError::OutOfAlphabet {
                            alphabet: "ciphertext",
                            index: *x,
                            size: x_labels.len(),
                        });
                    }
                    total += p;
                }
                if !total.is_one() {
                    return Err(EpsError::NotNormalized(total.to_string()));
                }
            }
        }
        Ok(Self {
            scheme: scheme.into(),
            source,
            key,
            x_labels,
            encoder,
            decoder,
        })
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn source(&self) -> &FiniteDist {
        &self.source
    }

    pub fn key(&self) -> &FiniteDist {
        &self.key
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    /// The encoder row for `(u, r)`.
    pub fn encoder_row(&self, u: usize, r: usize) -> Result<&EncoderRow> {
        self.check_u(u)?;
        self.check_r(r)?;
        Ok(&self.encoder[u][r])
    }

    pub fn aux_size(&self, u: usize, r: usize) -> Result<usize> {
        self.encoder_row(u, r).map(Vec::len)
    }

    fn check_u(&self, u: usize) -> Result<()> {
        if u >= self.source.len() {
            return Err(EpsError::OutOfAlphabet {
                alphabet: "message",
                index: u,
                size: self.source.len(),
            });
        }
        Ok(())
    }

    fn check_r(&self, r: usize) -> Result<()> {
        if r >= self.key.len() {
            return Err(EpsError::OutOfAlphabet {
                alphabet: "key",
                index: r,
                size: self.key.len(),
            });
        }
        Ok(())
    }

    fn check_x(&self, x: usize) -> Result<()> {
        if x >= self.x_labels.len() {
            return Err(EpsError::OutOfAlphabet {
                alphabet: "ciphertext",
                index: x,
                size: self.x_labels.len(),
            });
        }
        Ok(())
    }

    /// Appends independent key randomness `extra` that the cipher never
    /// touches. The new key is `(r, e)`, indexed `r * |extra| + e`.
    pub fn extend_key(&self, extra: &FiniteDist) -> CipherSpec {
        let k = extra.len();
        let encoder = self
            .encoder
            .iter()
            .map(|row| {
                row.iter()
                    .flat_map(|cell| std::iter::repeat_n(cell.clone(), k))
                    .collect()
            })
            .collect();
        CipherSpec {
            scheme: format!("{} + unused key {}", self.scheme, extra.len()),
            source: self.source.clone(),
            key: self.key.product(extra),
            x_labels: self.x_labels.clone(),
            encoder,
            decoder: Decoder::ExtendedKey {
                inner: Box::new(self.decoder.clone()),
                extra: k,
            },
        }
    }

    /// Checks `decrypt(encrypt(u, r, aux), r) = u` for every positive-probability triple.
    pub fn check_round_trip(&self) -> Result<()> {
        for u in 0..self.source.len() {
            for r in 0..self.key.len() {
                for (aux, _) in self.encoder[u][r].iter().enumerate() {
                    let x = encrypt(self, u, r, aux)?;
                    let back = decrypt(self, x, r)?;
                    if back != u {
                        return Err(EpsError::NotEps(format!(
                            "zero-error decoding: (u={}, r={}, aux={aux}) decodes to {}",
                            self.source.labels()[u],
                            self.key.labels()[r],
                            self.source.labels()[back]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn digits_of(mut index: usize, base: u32, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % base as usize) as u8;
        index /= base as usize;
    }
    out
}

pub(crate) fn index_of_digits(digits: &[u8], base: u32) -> usize {
    digits
        .iter()
        .fold(0usize, |acc, &d| acc * base as usize + d as usize)
}

/// Renders a digit string with `0-9a-z`; the empty string is `-`.
pub fn digits_label(digits: &[u8]) -> String {
    if digits.is_empty() {
        return "-".into();
    }
    digits
        .iter()
        .map(|&d| std::char::from_digit(d as u32, 36).expect("digit below 36"))
        .collect()
}

fn decode_with(decoder: &Decoder, r: usize, x: usize) -> Option<usize> {
    match decoder {
        Decoder::Modular { theta, cumulative } => {
            let theta = *theta as usize;
            let a = (x + theta - r % theta) % theta;
            // cumulative[i] is the first slot of cell i; cumulative has ℓ+1 entries.
            let cell = cumulative.partition_point(|&c| c as usize <= a) - 1;
            (cell + 1 < cumulative.len()).then_some(cell)
        }
        Decoder::PrefixStrip {
            arity,
            gamma,
            codebook,
        } => {
            let xd = digits_of(x, *arity, *gamma);
            let rd = digits_of(r, *arity, *gamma);
            let mut stripped = Vec::with_capacity(*gamma);
            if let Some(&u) = codebook.get(&stripped) {
                return Some(u);
            }
            for k in 0..*gamma {
                stripped.push(((xd[k] as u32 + arity - rd[k] as u32) % arity) as u8);
                if let Some(&u) = codebook.get(&stripped) {
                    return Some(u);
                }
            }
            None
        }
        Decoder::ExtendedKey { inner, extra } => decode_with(inner, r / extra, x),
        Decoder::Table(t) => t.get(&(r, x)).copied(),
    }
}

/// Deterministic encryption given the message, key and auxiliary randomness index.
pub fn encrypt(spec: &CipherSpec, u: usize, r: usize, aux: usize) -> Result<usize> {
    let row = spec.encoder_row(u, r)?;
    row.get(aux).map(|&(_, x)| x).ok_or(EpsError::OutOfAlphabet {
        alphabet: "auxiliary",
        index: aux,
        size: row.len(),
    })
}

pub fn decrypt(spec: &CipherSpec, x: usize, r: usize) -> Result<usize> {
    spec.check_x(x)?;
    spec.check_r(r)?;
    let invalid = || EpsError::InvalidPair {
        r: spec.key.labels()[r].clone(),
        x: spec.x_labels[x].clone(),
    };
    let u = decode_with(&spec.decoder, r, x).ok_or_else(invalid)?;
    if u >= spec.source.len() {
        return Err(invalid());
    }
    // Guard against decoders that accept pairs the encoder never produces.
    let produced = spec.encoder[u][r].iter().any(|&(_, xx)| xx == x);
    if !produced {
        return Err(invalid());
    }
    Ok(u)
}

/// The exact joint P(u, r, x) = P_U(u) P_R(r) Σ_aux P(aux) 1{enc(u,r,aux) = x}.
pub fn induced_joint(spec: &CipherSpec) -> JointSystem {
    let mut cells: BTreeMap<(usize, usize, usize), Prob> = BTreeMap::new();
    for (u, pu) in spec.source.masses().iter().enumerate() {
        for (r, pr) in spec.key.masses().iter().enumerate() {
            let base = pu * pr;
            for (pa, x) in &spec.encoder[u][r] {
                *cells.entry((u, r, *x)).or_insert_with(Prob::zero) += &base * pa;
            }
        }
    }
    JointSystem::new(
        spec.source.labels().to_vec(),
        spec.key.labels().to_vec(),
        spec.x_labels.clone(),
        cells,
    )
    .expect("cipher spec induces a normalized joint")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_roundtrip() {
        for base in [2u32, 3, 10] {
            for i in 0..50usize {
                let d = digits_of(i, base, 6);
                assert_eq!(index_of_digits(&d, base), i);
            }
        }
        assert_eq!(digits_label(&[1, 0, 11]), "10b");
        assert_eq!(digits_label(&[]), "-");
    }
}

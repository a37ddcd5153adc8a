//! Replayable descriptions of streams: a rule name plus its parameters.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relations::translate_mod;
use crate::substitution::Substitution;
use crate::witnesses::{self, BlockPair, ParameterStream};
use crate::words::{Alphabet, SymbolStream};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum StreamRecipe {
    Constant { alphabet: Alphabet, symbol: char },
    Periodic { alphabet: Alphabet, word: String },
    EventuallyConstant { alphabet: Alphabet, prefix: String, tail: char },
    /// Binary stream drawn from ChaCha8 seeded with `seed`; random access.
    RandomBinary { seed: u64 },
    /// `inner` with the listed positions overwritten.
    Override { inner: Box<StreamRecipe>, positions: Vec<(u64, char)> },
    FixedPoint { rules: String, letter: char },
    BaseScrambled { eta: Box<StreamRecipe> },
    SpreadEmbed { inner: Box<StreamRecipe> },
    GeometricBlocks { inner: Box<StreamRecipe> },
    QuarticSpread { inner: Box<StreamRecipe> },
    BlockConcat { alphabet: Alphabet, b: String, c: String, xi: Box<StreamRecipe> },
    Translate { x: Box<StreamRecipe>, z: Box<StreamRecipe> },
    Shift { inner: Box<StreamRecipe>, offset: u64 },
    Custom { name: String },
}

impl StreamRecipe {
    pub fn build(&self) -> Result<SymbolStream> {
        use StreamRecipe::*;
        match self {
            Constant { alphabet, symbol } => SymbolStream::constant(alphabet, *symbol),
            Periodic { alphabet, word } => SymbolStream::periodic(&alphabet.word(word)?),
            EventuallyConstant { alphabet, prefix, tail } => {
                SymbolStream::eventually_constant(&alphabet.word(prefix)?, *tail)
            }
            RandomBinary { seed } => Ok(random_binary(*seed)),
            Override { inner, positions } => override_positions(&inner.build()?, positions),
            FixedPoint { rules, letter } => {
                Substitution::parse(rules)?.fixed_point_stream(*letter)
            }
            BaseScrambled { eta } => Ok(witnesses::base_scrambled(&ParameterStream::new(eta.build()?)?)),
            SpreadEmbed { inner } => witnesses::spread_embed(&inner.build()?),
            GeometricBlocks { inner } => witnesses::geometric_blocks(&inner.build()?),
            QuarticSpread { inner } => witnesses::quartic_spread(&inner.build()?),
            BlockConcat { alphabet, b, c, xi } => {
                let bp = BlockPair::unchecked(alphabet.word(b)?, alphabet.word(c)?)?;
                witnesses::block_concat(&bp, &xi.build()?)
            }
            Translate { x, z } => translate_mod(&x.build()?, &z.build()?),
            Shift { inner, offset } => Ok(inner.build()?.shift(*offset)),
            Custom { name } => Err(Error::NotReplayable(name.clone())),
        }
    }
}

/// Uniform random binary stream; `x_n` is bit `n mod 32` of keystream word `n / 32`.
pub fn random_binary(seed: u64) -> SymbolStream {
    SymbolStream::new(Alphabet::binary(), StreamRecipe::RandomBinary { seed }, move |n| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(u128::from(n / 32));
        ((rng.next_u32() >> (n % 32)) & 1) as u8
    })
}

pub fn override_positions(x: &SymbolStream, positions: &[(u64, char)]) -> Result<SymbolStream> {
    let alphabet = x.alphabet().clone();
    let table = positions
        .iter()
        .map(|&(n, c)| Ok((n, alphabet.index_of_checked(c)?)))
        .collect::<Result<std::collections::BTreeMap<_, _>>>()?;
    let inner = x.clone();
    Ok(SymbolStream::new(
        alphabet,
        StreamRecipe::Override { inner: Box::new(x.recipe().clone()), positions: positions.to_vec() },
        move |n| table.get(&n).copied().unwrap_or_else(|| inner.at(n)),
    ))
}

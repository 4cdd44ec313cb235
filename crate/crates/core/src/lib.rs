//! Simulation and analysis toolkit for the shotgun sequencing channel with
//! erasures: trit strings, the channel, read assembly into islands,
//! concentration statistics, closed-form achievable rates and an exhaustive
//! toy decoder.

pub mod assembly;
pub mod channel;
pub mod decoder;
pub mod error;
pub mod par;
pub mod rates;
pub mod seed;
pub mod stats;
pub mod tritstring;

pub use assembly::{
    build_islands, true_islands, true_ordering, IslandSet, OrderedMerge, TrueOrdering,
};
pub use channel::{
    transmit, transmit_codeword, ChannelOutput, ChannelParams, Codebook, DecoderView, Read, Truth,
};
pub use decoder::{
    algorithm1_decode, oracle_decode, DecodeResult, DecoderConfig, OmegaMode, OracleOutcome,
    Outcome,
};
pub use error::{ChannelError, DecodeError, MergeFailure, RateError, TritError};
pub use par::Execution;
pub use seed::{Seeder, Stage};
pub use tritstring::{
    compatible, is_compatible_substring, is_l_compatible, merge, Trit, TritString,
};

use alloc::string::String;

use crate::domain::AgentId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty population")]
    EmptyPopulation,
    #[error("cannot normalize an empty list of values")]
    EmptyValues,
    #[error("all effective weights zero")]
    ZeroWeights,
    #[error("all social matrix weights zero")]
    ZeroSocialWeights,
    #[error("at least two sellers are required to build a social network, got {0}")]
    TooFewSellers(usize),
    #[error("total sales must be positive, got {0}")]
    NonPositiveSales(f64),
    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("seller {0} has no buyer to trade with")]
    NoBuyers(AgentId),
    #[error("no distance between {0} and {1}")]
    MissingDistance(AgentId, AgentId),
    #[error("no active trading links")]
    EmptyNetwork,
    #[error("unknown scenario id {0:?}")]
    UnknownScenario(String),
    #[error("unknown null model {0:?}")]
    UnknownNullModel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
}

pub mod frontend;
pub mod encoding;
pub mod matching;
pub mod normalize;
pub mod repair;
pub mod judge;
pub mod corpus;
pub mod engine;

//! Action selection through a Bayes net that grows with the vocabulary.
//!
//! Observed nodes are the RGB features `F(s)` and the shape `S`. Each known
//! colour is a Boolean node under `F(s)`; each adverb that heads a stored
//! rule is a Boolean manner node whose parents are the atoms of those rules'
//! bodies; each behaviour dimension hangs off its manner nodes.
//!
//! Colour evidence enters as virtual evidence (the colour node's prior is the
//! grounding posterior for the observed RGB) and the shape is folded into the
//! manner CPDs, so a query only has to sum over the latent colour nodes.

pub mod factor;
mod net;

pub use net::{
    enumerate_options, select_point, sync_structure, CompiledNet, InferenceError, MannerModel, MannerNode,
    MannerOption, NetSnapshot, NetStructure, NodeInfo, DEFAULT_LEAK,
};

//! Hybrid news text generation and evaluation.
//!
//! Structured event records are realized into news sentences by a template
//! engine, restyled sentence-by-sentence by a pluggable paraphraser, and
//! grammar-checked. Any generator's output can then be scored on two axes:
//! contextual-logic similarity against reference articles and
//! machine-writing-style similarity within a system's own output, combined
//! into a quadrant label on the human/machine x controllable/uncontrollable
//! plane.

pub mod baseline;
pub mod corpus;
pub mod event;
pub mod grammar;
pub mod metrics;
pub mod paraphrase;
pub mod pipeline;
pub mod realize;
pub mod report;
pub mod template;

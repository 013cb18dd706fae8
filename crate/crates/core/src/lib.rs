//! Covert communication over binary-input discrete memoryless two-way
//! channels.
//!
//! - [`channel`]: channel files, alarm symbols, structural checks.
//! - [`metrics`]: divergences and tail bounds.
//! - [`design`], [`quantities`]: covert input designs and their exact and
//!   leading-order information quantities.
//! - [`regions`], [`budget`]: throughput regions, the outer bound, and the
//!   covertness budget split.
//! - [`sim`]: random codebooks, threshold decoding and exact resolvability.
//! - [`output`], [`cli`]: CSV and key-value outputs and the command line.

pub mod budget;
pub mod channel;
pub mod cli;
pub mod design;
pub mod distribution;
pub mod error;
pub mod metrics;
pub mod output;
pub mod quantities;
pub mod regions;
pub mod sim;

pub use channel::{check_assumptions, parse_channel, ChannelReport, TwoWayChannel};
pub use design::{CovertInputDesign, DesignFamily, Scheme};
pub use distribution::Distribution;
pub use error::{Error, Result};
pub use quantities::{
    exact_finite_n_quantities, leading_order_quantities, InfoQuantities, Quantity,
};

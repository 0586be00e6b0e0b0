//! Default numerical tolerances.
//!
//! Two regimes are distinguished throughout the crate:
//!
//! * algebraic residuals (products of exact operations, factorizations,
//!   eigen-residuals) are held to [`ALGEBRAIC`];
//! * quantities that come out of nonconvex optimization (norm ascent,
//!   brute-force minimizations) are only comparable up to [`OPTIMIZATION`].
//!
//! Every operation that checks a residual accepts an explicit tolerance, so
//! these are defaults, not hard-wired constants.

/// Residual tolerance for exact linear-algebra identities in f64.
pub const ALGEBRAIC: f64 = 1e-9;

/// Comparison tolerance for optimization-based estimates.
pub const OPTIMIZATION: f64 = 1e-6;

/// Relative threshold on the smallest singular value below which an element
/// is treated as singular: `sigma_min <= INVERTIBILITY * sigma_max`.
pub const INVERTIBILITY: f64 = 1e-10;

/// Relative singular-value cutoff for pseudo-inverses.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Condition-number ceiling for transport steps in the correction iteration.
pub const MAX_STEP_CONDITION: f64 = 1e12;

/// Stall tolerance for the norm-ascent loop: an iteration that improves the
/// certified value by less than this terminates the restart.
pub const ASCENT_STALL: f64 = 1e-10;

/// Relative companion to [`ASCENT_STALL`]: on flat landscapes (degenerate
/// singular spectra) absolute stalling alone lets the ascent crawl for
/// hundreds of steps chasing digits far below any reported tolerance.
pub const ASCENT_RELATIVE_STALL: f64 = 1e-7;

/// Default associativity residual allowed for a `Multiplication`, measured
/// over the fixed seeded triple set.
pub const ASSOCIATIVITY: f64 = 1e-8;

/// Number of seeded triples used for associativity checks.
pub const ASSOCIATIVITY_TRIPLES: usize = 50;

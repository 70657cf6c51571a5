use thiserror::Error;

/// Errors surfaced by game construction, solvers, and belief updates.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid demand grid: {0}")]
    InvalidGrid(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("best-response iteration did not converge within {max_iter} iterations")]
    NoConvergence { max_iter: usize },

    #[error(
        "fractile oracle disagrees with best response: best_response={best_response}, \
         fractile={fractile}, tolerance={tolerance}"
    )]
    OracleMismatch {
        best_response: f64,
        fractile: f64,
        tolerance: f64,
    },

    #[error("Nash point ({y1}, {y2}) lies outside the supplied belief interval")]
    NashOutsideInterval { y1: f64, y2: f64 },

    #[error("sale {sale} exceeds stock level {stock}")]
    SaleExceedsStock { sale: f64, stock: f64 },

    #[error("likelihood row is zero on every cell; update rejected, prior retained")]
    DegenerateLikelihood,
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("invalid setup: {0}")]
    Setup(String),
    #[error(
        "characteristic length of {} element(s) reaches the bound 2 E G_f / sigma_y^2 = {bound} mm \
         (largest {largest} mm); offending elements: {}",
        elements.len(),
        list_elements(elements)
    )]
    LengthBound { elements: Vec<usize>, bound: f64, largest: f64 },
    #[error("material update failed in element {element}, point {point}: {source}")]
    Material {
        element: usize,
        point: usize,
        #[source]
        source: dsm_core::Error,
    },
    #[error("Newton iteration stopped after {iterations} iteration(s) at relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("linear solve failed: {0}")]
    Linear(String),
    #[error(
        "increment from time {time} abandoned after {attempts} failed attempt(s) \
         (minimum size {min_increment}); last failure: {last}"
    )]
    IncrementTooSmall { time: f64, min_increment: f64, attempts: usize, last: String },
}

fn list_elements(elements: &[usize]) -> String {
    const SHOWN: usize = 20;
    let mut s = elements.iter().take(SHOWN).map(|e| e.to_string()).collect::<Vec<_>>().join(", ");
    if elements.len() > SHOWN {
        s.push_str(&format!(", ... ({} more)", elements.len() - SHOWN));
    }
    s
}

pub type Result<T, E = FemError> = std::result::Result<T, E>;

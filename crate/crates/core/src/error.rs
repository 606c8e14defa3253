use std::fmt;

/// Which half of the state a numerical-instability error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Potential,
    Adopting,
    /// The implicit dormant share `1 - P - A`.
    Dormant,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Potential => "P",
            Component::Adopting => "A",
            Component::Dormant => "D",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(
        "numerical instability at t = {time}: {component}[{node}] = {value} left the simplex \
         (try a smaller step size)"
    )]
    Instability {
        time: f64,
        node: usize,
        component: Component,
        value: f64,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

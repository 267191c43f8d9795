use thiserror::Error;

/// Errors raised by the simulation, oracle and protocol layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (bad register, out-of-range
    /// parameter, malformed table, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// An oracle was queried more often than the budget declared by the
    /// inverter driving it.
    #[error("query budget exceeded: budget {budget}, attempted query #{attempted}")]
    BudgetExceeded { budget: u64, attempted: u64 },

    /// An inverter produced more advice than it declared.
    #[error("advice too large: declared {declared} qubits, produced {produced}")]
    AdviceExceeded { declared: u64, produced: u64 },

    #[error("unknown magnitude probe {0}")]
    UnknownProbe(usize),

    #[error("decode error: {0}")]
    Decode(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Shorthand for returning a [`Error::Contract`].
macro_rules! contract {
    ($($arg:tt)*) => {
        return Err($crate::error::Error::Contract(format!($($arg)*)))
    };
}
pub(crate) use contract;

/// Bails with a contract violation unless the condition holds.
macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        {
            let holds: bool = $cond;
            if !holds {
                $crate::error::contract!($($arg)*);
            }
        }
    };
}
pub(crate) use ensure;

use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}` for this bracket specification")]
    UnknownVariable(String),

    #[error("expected an odd element for `{0}`")]
    ParityMismatch(String),

    #[error("unknown builtin algebra `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid parameters for builtin `{name}`: {reason}")]
    InvalidParams { name: String, reason: String },

    #[error("unknown basis element `{0}`")]
    UnknownBasisElement(String),

    #[error("z-window overflow at z^{power} (window [{min}, {max}])")]
    WindowOverflow { power: i64, min: i64, max: i64 },

    #[error("right-hand side is not in the image of ad \u{39b}\u{b2}: kernel residue at {0}")]
    NotInImage(String),

    #[error("ad \u{39b}\u{b2} is not semisimple: {0}")]
    NotSemisimple(String),

    #[error("the element is not supported on a single z-power: {0}")]
    MixedZPowers(String),

    #[error("element does not lie in the computed center")]
    NotInCenter,

    #[error("linear solve failed: {0}")]
    SolveFailure(String),

    #[error("input is not gauge invariant; residual {0}")]
    NotGaugeInvariant(String),

    #[error("bi-Hamiltonian ladder mismatch on `{generator}`: first-bracket flow {lhs} differs from second-bracket flow {rhs}")]
    LadderMismatch {
        generator: String,
        lhs: String,
        rhs: String,
    },

    #[error("dressing produced a component outside ker ad \u{39b}\u{b2} at grade {0}")]
    KernelEscape(i64),

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown state label `{0}`")]
    UnknownStateLabel(String),

    #[error("turn {turn}: gold extraction requested but the turn carries no annotations")]
    MissingGold { turn: u32 },

    #[error("rule extraction requested with an empty rule pack")]
    EmptyRulePack,

    #[error("belief degenerated: all posterior mass underflowed (max log-mass {max_log_mass})")]
    DegenerateBelief { max_log_mass: f64 },

    #[error("belief is empty")]
    EmptyBelief,

    #[error("no outcome model for action `{0}`")]
    MissingOutcomeModel(String),

    #[error("cannot embed an empty token bag")]
    EmptyInput,

    #[error("cosine similarity of a zero vector")]
    ZeroVector,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("no candidate actions")]
    NoCandidates,

    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),

    #[error("slot `{0}` is not mapped to any record section")]
    UnmappedSlot(String),

    #[error("gold audit has an empty denominator for {0}")]
    EmptyGold(&'static str),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown session `{0}`")]
    UnknownSession(String),

    #[error("session `{0}` has ended")]
    SessionEnded(String),

    #[error("session `{0}` already has a turn in flight")]
    SessionBusy(String),

    #[error("invalid scenario pack: {0}")]
    PackInvalid(String),

    #[error("invalid knowledge base: {0}")]
    KbInvalid(String),

    #[error("turn {turn}: {source}")]
    Turn {
        turn: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {source}")]
    Json {
        path: String,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn at_turn(self, turn: u32) -> Self {
        match self {
            e @ Error::Turn { .. } => e,
            e => Error::Turn {
                turn,
                source: Box::new(e),
            },
        }
    }

    /// Stable machine-readable code, used by the HTTP layer and the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownStateLabel(_) => "unknown_state_label",
            Error::MissingGold { .. } => "missing_gold",
            Error::EmptyRulePack => "empty_rule_pack",
            Error::DegenerateBelief { .. } => "degenerate_belief",
            Error::EmptyBelief => "empty_belief",
            Error::MissingOutcomeModel(_) => "missing_outcome_model",
            Error::EmptyInput => "empty_input",
            Error::ZeroVector => "zero_vector",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NoCandidates => "no_candidates",
            Error::UnknownPolicy(_) => "unknown_policy",
            Error::UnmappedSlot(_) => "unmapped_slot",
            Error::EmptyGold(_) => "empty_gold",
            Error::UnknownScenario(_) => "unknown_scenario",
            Error::UnknownSession(_) => "unknown_session",
            Error::SessionEnded(_) => "session_ended",
            Error::SessionBusy(_) => "session_busy",
            Error::PackInvalid(_) => "pack_invalid",
            Error::KbInvalid(_) => "kb_invalid",
            Error::Turn { source, .. } => source.code(),
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
        }
    }
}

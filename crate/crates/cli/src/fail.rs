//! Exit codes: 0 ok, 2 parse, 3 domain, 4 no convergence, 5 certificate.

use std::fmt;

use tropwave::Error;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn parse(m: impl Into<String>) -> Self {
        Failure { code: 2, message: m.into() }
    }

    pub fn nonconvergence(m: impl Into<String>) -> Self {
        Failure { code: 4, message: m.into() }
    }

    pub fn certificate(m: impl Into<String>) -> Self {
        Failure { code: 5, message: m.into() }
    }

    pub fn io(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 2,
            Error::CertificationFailed { .. }
            | Error::HypothesisViolated(_)
            | Error::NotNice
            | Error::NotUnimodular
            | Error::EpsilonTooLarge(_)
            | Error::UnclassifiableSide(_) => 5,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

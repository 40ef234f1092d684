//! Library half of the `geodesy` command-line tool: configuration files,
//! surface-description parsing, the experiment harness, and SVG plotting.

pub mod config;
pub mod experiments;
pub mod parse;
pub mod plot;

use geodesy::error::GeodesyError;

/// Process exit code for an error: 2 invalid input, 3 reconstruction
/// failure, 4 disconnected graph or unreachable target.
pub fn exit_code(err: &GeodesyError) -> i32 {
    match err {
        GeodesyError::InvalidInput(_) | GeodesyError::Parse(_) | GeodesyError::Io(_) => 2,
        GeodesyError::Reconstruction(_)
        | GeodesyError::NonManifold(_)
        | GeodesyError::Convergence { .. } => 3,
        GeodesyError::Disconnected { .. } | GeodesyError::NoPath { .. } => 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_group_the_error_kinds() {
        assert_eq!(exit_code(&GeodesyError::invalid("x")), 2);
        assert_eq!(exit_code(&GeodesyError::Parse("x".into())), 2);
        assert_eq!(exit_code(&GeodesyError::Reconstruction("x".into())), 3);
        assert_eq!(exit_code(&GeodesyError::NonManifold("x".into())), 3);
        assert_eq!(
            exit_code(&GeodesyError::Disconnected { count: 2, sizes: vec![3, 2] }),
            4
        );
        assert_eq!(exit_code(&GeodesyError::NoPath { from: 0, to: 1 }), 4);
    }
}

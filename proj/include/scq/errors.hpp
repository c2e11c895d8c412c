#pragma once

#include <stdexcept>
#include <string>

namespace scq {

/// Input outside the mathematical domain of an operation (non-positive
/// temperature, ratio above one, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A model was asked to run outside the regime it implements.
class UnsupportedRegimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data does not support the requested analysis (no transition, missing
/// range, no resonance dip).
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The data cannot constrain all free parameters.
class RankDeficiencyError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

/// A model returned a non-finite value during fitting.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Junction geometry collapses after the dimension bias is applied.
class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Trace file does not match the schema of its declared kind.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A figure or analysis needs results that are not present in the report.
class UnmetDependencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed pipeline configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace scq

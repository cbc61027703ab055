#pragma once

#include <stdexcept>
#include <string>

namespace lfs {

// Base error carrying a stable machine-parseable category string. The CLI
// prints "error: <category>: <message>" and exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error("invalid-argument", msg) {}
};

class SingularSystem : public Error {
public:
    explicit SingularSystem(const std::string& msg) : Error("singular-system", msg) {}
};

class DegenerateInput : public Error {
public:
    explicit DegenerateInput(const std::string& msg) : Error("degenerate-input", msg) {}
};

class DegenerateAxis : public Error {
public:
    explicit DegenerateAxis(const std::string& msg) : Error("degenerate-axis", msg) {}
};

class NoGroundTruthAxis : public Error {
public:
    explicit NoGroundTruthAxis(const std::string& msg) : Error("no-ground-truth-axis", msg) {}
};

class EmptyDataset : public Error {
public:
    explicit EmptyDataset(const std::string& msg) : Error("empty-dataset", msg) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error("format-error", msg) {}
};

class ScorerTimeout : public Error {
public:
    explicit ScorerTimeout(const std::string& msg) : Error("scorer-timeout", msg) {}
};

class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& msg) : Error("protocol-error", msg) {}
};

class TrainingDiverged : public Error {
public:
    explicit TrainingDiverged(const std::string& msg) : Error("training-diverged", msg) {}
};

class MissingArtifact : public Error {
public:
    explicit MissingArtifact(const std::string& msg) : Error("missing-artifact", msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("io-error", msg) {}
};

} // namespace lfs

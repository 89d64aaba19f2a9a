#pragma once

#include <stdexcept>
#include <string>

namespace curveflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateEdge : Error {
    explicit DegenerateEdge(const std::string& msg) : Error("degenerate edge: " + msg) {}
};

struct CoincidentEndpoints : Error {
    CoincidentEndpoints() : Error("curve endpoints coincide; f_minus must differ from f_plus") {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& msg) : Error("field/curve length mismatch: " + msg) {}
};

struct DimMismatch : Error {
    explicit DimMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct StencilExhausted : Error {
    explicit StencilExhausted(const std::string& msg) : Error("stencil exhausted: " + msg) {}
};

struct MeshCollapse : Error {
    explicit MeshCollapse(const std::string& msg) : Error("mesh collapse: " + msg) {}
};

struct NonFinite : Error {
    explicit NonFinite(const std::string& msg) : Error("non-finite value: " + msg) {}
};

struct SolverSingular : Error {
    explicit SolverSingular(const std::string& msg) : Error("singular system: " + msg) {}
};

struct ModeMismatch : Error {
    explicit ModeMismatch(const std::string& msg) : Error("velocity mode mismatch: " + msg) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& msg) : Error("insufficient data: " + msg) {}
};

struct ZeroCurvature : Error {
    explicit ZeroCurvature(const std::string& msg) : Error("zero curvature: " + msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error("invalid configuration: " + msg) {}
};

struct FileError : Error {
    explicit FileError(const std::string& msg) : Error("file error: " + msg) {}
};

struct MissingData : Error {
    explicit MissingData(const std::string& msg) : Error("missing data: " + msg) {}
};

} // namespace curveflow

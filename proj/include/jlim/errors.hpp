#pragma once

#include <stdexcept>
#include <string>

namespace jlim {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidInput : Error {
    explicit InvalidInput(const std::string& what) : Error(what) {}
};

struct DimensionMismatch : InvalidInput {
    explicit DimensionMismatch(const std::string& what = "dimensions do not match") : InvalidInput(what) {}
};

struct ZeroToNegativePower : Error {
    explicit ZeroToNegativePower(const std::string& what = "zero raised to a negative power") : Error(what) {}
};

struct NotUnitModulus : Error {
    explicit NotUnitModulus(const std::string& what = "eigenvalue does not have unit modulus") : Error(what) {}
};

struct NilpotentEigenvalue : Error {
    explicit NilpotentEigenvalue(const std::string& what = "zero eigenvalue cannot be inverted") : Error(what) {}
};

struct NotRepresentable : Error {
    explicit NotRepresentable(const std::string& what) : Error(what) {}
};

struct NotInSet : Error {
    explicit NotInSet(const std::string& what = "target point is not in the classified set") : Error(what) {}
};

struct SingularSystem : Error {
    explicit SingularSystem(const std::string& what = "binomial system is singular at this index") : Error(what) {}
};

struct SearchExhausted : Error {
    explicit SearchExhausted(const std::string& what = "circle search exceeded its index budget") : Error(what) {}
};

struct ScheduleConflict : Error {
    explicit ScheduleConflict(const std::string& what = "rotation constraints admit no common schedule") : Error(what) {}
};

struct NonzeroTarget : Error {
    explicit NonzeroTarget(const std::string& what = "contracting blocks only reach the zero target") : Error(what) {}
};

struct UnsupportedJmixNonzero : Error {
    explicit UnsupportedJmixNonzero(const std::string& what = "Jmix is only computed at the zero vector") : Error(what) {}
};

struct PrecisionExhausted : Error {
    explicit PrecisionExhausted(const std::string& what = "precision ceiling reached") : Error(what) {}
};

} // namespace jlim

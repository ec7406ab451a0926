#pragma once

#include <stdexcept>
#include <string>

namespace epibundle {

// Error taxonomy shared by the library and the CLI exit-code mapping:
// argument/capability/lookup errors -> exit 2, numeric/unbounded -> exit 3.

class toolkit_error : public std::runtime_error {
public:
    explicit toolkit_error(const std::string& what) : std::runtime_error(what) {}
};

// Caller passed values outside an operation's contract.
class argument_error : public toolkit_error {
public:
    explicit argument_error(const std::string& what) : toolkit_error(what) {}
};

// The oracle lacks a capability the operation needs (no subgradient graph,
// no gradient, ...).
class capability_error : public toolkit_error {
public:
    explicit capability_error(const std::string& what) : toolkit_error(what) {}
};

// A numerical assumption failed at run time (singular system, asymmetric
// graph, non-convergent refinement where convergence is required).
class numeric_error : public toolkit_error {
public:
    explicit numeric_error(const std::string& what) : toolkit_error(what) {}
};

// An infimum diverged below the detection cap.
class unbounded_error : public numeric_error {
public:
    explicit unbounded_error(const std::string& what) : numeric_error(what) {}
};

// A derivative was requested where the object is not differentiable
// (multi-valued proximal mapping, kinked gradient inside a stencil).
class nondifferentiable_error : public numeric_error {
public:
    explicit nondifferentiable_error(const std::string& what) : numeric_error(what) {}
};

// Unknown registry name.
class lookup_error : public toolkit_error {
public:
    explicit lookup_error(const std::string& what) : toolkit_error(what) {}
};

}  // namespace epibundle

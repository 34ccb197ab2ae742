#pragma once

#include <stdexcept>
#include <string>

namespace trial_order {

// Base of everything the library throws.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A candidate or candidate set breaks a model invariant.
class invalid_input : public error {
public:
    using error::error;
};

// Position, prefix length, or distance outside the candidate range.
class range_error : public error {
public:
    using error::error;
};

// An ordering that is not a permutation of the candidate set.
class structural_error : public error {
public:
    using error::error;
};

// Closed form divides by (1 - p_k) with p_k == 1.
class singularity_error : public error {
public:
    using error::error;
};

// A formula was called outside the premises it is stated for.
class assumption_error : public error {
public:
    using error::error;
};

// Argument outside the mathematical domain of a lemma.
class domain_error : public error {
public:
    using error::error;
};

// Exhaustive search requested on too many candidates.
class size_error : public error {
public:
    using error::error;
};

} // namespace trial_order

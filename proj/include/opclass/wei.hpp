#pragma once

#include <cstdint>
#include <string>

#include "opclass/errors.hpp"

namespace opclass {

// Wei amounts are kept as exact 128-bit integers until feature-vector
// assembly, where they widen to double. 2^128 wei is ~3.4e20 ETH, far above
// anything on chain; overflow is still checked on parse and addition.
class Wei {
public:
    Wei() : value_(0) {}
    explicit Wei(std::uint64_t v) : value_(v) {}

    static Wei from_string(const std::string& text);

    std::string to_string() const;

    double to_double() const { return static_cast<double>(value_); }

    Wei& operator+=(const Wei& other);

    friend Wei operator+(Wei a, const Wei& b) {
        a += b;
        return a;
    }

    friend bool operator==(const Wei& a, const Wei& b) { return a.value_ == b.value_; }
    friend bool operator!=(const Wei& a, const Wei& b) { return a.value_ != b.value_; }
    friend bool operator<(const Wei& a, const Wei& b) { return a.value_ < b.value_; }

private:
    unsigned __int128 value_;
};

}  // namespace opclass

// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace corrigid {

// Every quantity in this library (values, probabilities, prices, fees, LP
// pivots) is an exact rational. Rat is GMP-backed so long derivation chains
// never lose precision; there is deliberately no floating-point mode in the
// core types.
using Rat = mpq_class;
using Int = mpz_class;

// Parses "p/q", a plain integer "k", or a decimal literal such as "0.1"
// (which becomes exactly 1/10). Throws std::invalid_argument on anything
// else. Exponent notation is not accepted.
Rat parse_rational(const std::string& text);

// Canonical form: "p/q" with q >= 1 and gcd(|p|, q) = 1. Integers are
// emitted as "k/1" so the wire format stays uniform.
std::string format_rational(const Rat& r);

Int floor_rat(const Rat& r);
Int ceil_rat(const Rat& r);

// n^k for big integers, k >= 0.
Int int_pow(const Int& base, unsigned long k);

// Binomial coefficient C(n, k) via the multiplicative formula; 0 when k > n.
Int binomial(const Int& n, const Int& k);

// A rational extended with +infinity, used for posted-price thresholds
// ("never sell" is an infinite threshold). Ordering: every finite value is
// below infinity; two infinities compare equal.
struct ExtRat {
    bool is_inf = true;
    Rat value;  // meaningful only when !is_inf

    ExtRat() = default;
    explicit ExtRat(Rat v) : is_inf(false), value(std::move(v)) {}
    static ExtRat inf() { return ExtRat{}; }

    bool operator==(const ExtRat& o) const {
        if (is_inf || o.is_inf) return is_inf == o.is_inf;
        return value == o.value;
    }
    bool operator<(const ExtRat& o) const {
        if (is_inf) return false;
        if (o.is_inf) return true;
        return value < o.value;
    }
};

// "p/q" or "inf".
std::string format_ext(const ExtRat& t);
ExtRat parse_ext(const std::string& text);

}  // namespace corrigid

// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#include "corrigid/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace corrigid {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rat parse_rational(const std::string& text) {
    // Strict on purpose: this is a wire format, so no whitespace, no
    // exponents, no trailing dot. all_digits() rejects stray characters.
    std::string s = text;
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = (s[0] == '-');
        s.erase(s.begin());
    }
    if (s.empty()) throw std::invalid_argument("sign without digits in rational literal");

    Rat out;
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("malformed fraction: " + text);
        Int n(num), d(den);
        if (d == 0) throw std::invalid_argument("zero denominator: " + text);
        out = Rat(n, d);
        out.canonicalize();
    } else if (dot != std::string::npos) {
        std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
        if (whole.empty()) whole = "0";
        if (!all_digits(whole) || !all_digits(frac))
            throw std::invalid_argument("malformed decimal: " + text);
        Int d = int_pow(Int(10), static_cast<unsigned long>(frac.size()));
        Int n = Int(whole) * d + Int(frac);
        out = Rat(n, d);
        out.canonicalize();
    } else {
        if (!all_digits(s)) throw std::invalid_argument("malformed integer: " + text);
        out = Rat(Int(s));
    }
    if (neg) out = -out;
    return out;
}

std::string format_rational(const Rat& r) {
    // Callers may hand over a value built straight from a numerator and
    // denominator pair, which gmp does not reduce on its own.
    Rat c(r);
    c.canonicalize();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Int floor_rat(const Rat& r) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

Int ceil_rat(const Rat& r) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

Int int_pow(const Int& base, unsigned long k) {
    Int out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), k);
    return out;
}

Int binomial(const Int& n, const Int& k) {
    if (k < 0 || k > n) return Int(0);
    Int out = 1;
    // multiplicative form keeps intermediates integral: out *= (n-i)/(i+1)
    Int i = 0, kk = k;
    if (kk > n - kk) kk = n - kk;
    while (i < kk) {
        out = out * (n - i);
        i = i + 1;
        out = out / i;  // exact at every step
    }
    return out;
}

std::string format_ext(const ExtRat& t) {
    return t.is_inf ? "inf" : format_rational(t.value);
}

ExtRat parse_ext(const std::string& text) {
    if (text == "inf" || text == "+inf" || text == "infinity") return ExtRat::inf();
    return ExtRat(parse_rational(text));
}

}  // namespace corrigid

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "qtx/errors.hpp"

namespace qtx {

using Rational = mpq_class;

/// Which exact coefficient backend a computation runs over.
struct FieldSpec {
    enum class Kind { Cyclotomic, Prime };
    Kind kind = Kind::Cyclotomic;
    int ell = 3;          // multiplicative order of the distinguished root q (odd)
    std::uint64_t p = 0;  // prime backend only

    // Accepts "cyclotomic" or "fp:<p>". Throws ConfigError on anything else.
    static FieldSpec parse(const std::string& text, int ell);
    std::string str() const;
};

// The ell-th cyclotomic polynomial, monic, ascending coefficients.
std::vector<Rational> cyclotomic_polynomial(int ell);

// Q(zeta_ell): residues modulo the ell-th cyclotomic polynomial with exact
// rational coefficients. Elements are coefficient vectors of fixed length
// phi(ell); the distinguished root q is the residue class of x.
class CycloField {
  public:
    using Elem = std::vector<Rational>;

    CycloField() : CycloField(3) {}
    explicit CycloField(int ell);

    int ell() const { return ell_; }
    int degree() const { return phi_; }
    FieldSpec spec() const { return FieldSpec{FieldSpec::Kind::Cyclotomic, ell_, 0}; }

    Elem zero() const { return Elem(phi_, Rational(0)); }
    Elem one() const { return from_int(1); }
    Elem q() const { return qpow_[1 % ell_]; }
    Elem from_int(long v) const;
    Elem from_rational(const Rational& v) const;

    Elem add(const Elem& a, const Elem& b) const;
    Elem sub(const Elem& a, const Elem& b) const;
    Elem neg(const Elem& a) const;
    Elem mul(const Elem& a, const Elem& b) const;
    Elem inv(const Elem& a) const;  // throws DomainError on zero
    bool is_zero(const Elem& a) const;
    bool eq(const Elem& a, const Elem& b) const { return a == b; }

    // q^e for any integer e (reduced mod ell).
    Elem qpow(long e) const;

    std::string str(const Elem& a) const;

  private:
    int ell_;
    int phi_;
    std::vector<Rational> modulus_;  // monic, degree phi_
    std::vector<Elem> xpow_;         // x^k mod modulus, k = 0 .. 2*phi_-2
    std::vector<Elem> qpow_;         // q^0 .. q^{ell-1}
};

// F_p with a distinguished element q of exact multiplicative order ell.
// Requires ell | p-1; q is the smallest residue of order exactly ell.
class PrimeField {
  public:
    using Elem = std::uint64_t;

    PrimeField() : PrimeField(7, 3) {}
    PrimeField(std::uint64_t p, int ell);

    int ell() const { return ell_; }
    std::uint64_t p() const { return p_; }
    FieldSpec spec() const { return FieldSpec{FieldSpec::Kind::Prime, ell_, p_}; }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem q() const { return q_; }
    Elem from_int(long v) const;

    Elem add(Elem a, Elem b) const { return (a + b) % p_; }
    Elem sub(Elem a, Elem b) const { return (a + p_ - b) % p_; }
    Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
    Elem mul(Elem a, Elem b) const {
        return static_cast<Elem>((static_cast<unsigned __int128>(a) * b) % p_);
    }
    Elem inv(Elem a) const;  // throws DomainError on zero
    bool is_zero(Elem a) const { return a == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }

    Elem qpow(long e) const;

    std::string str(Elem a) const { return std::to_string(a); }

  private:
    std::uint64_t p_;
    int ell_;
    Elem q_;
    std::vector<Elem> qpow_;
};

// Evaluation map q |-> chosen residue, for cross-checking the two backends.
// Throws DomainError if a coefficient denominator vanishes mod p.
PrimeField::Elem evaluate_mod_p(const CycloField::Elem& a, const PrimeField& fp);

bool is_prime_u64(std::uint64_t n);

}  // namespace qtx

#include "qtx/field.hpp"

#include <algorithm>
#include <sstream>

namespace qtx {

namespace {

using Poly = std::vector<Rational>;  // dense, ascending degree

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// Exact division; remainder must come out zero for the uses below.
Poly poly_divexact(Poly num, const Poly& den) {
    Poly quot(num.size() >= den.size() ? num.size() - den.size() + 1 : 0, Rational(0));
    while (num.size() >= den.size() && !num.empty()) {
        Rational c = num.back() / den.back();
        std::size_t shift = num.size() - den.size();
        quot[shift] = c;
        for (std::size_t i = 0; i < den.size(); ++i) num[shift + i] -= c * den[i];
        trim(num);
    }
    return quot;
}

Poly poly_mod(Poly num, const Poly& den) {
    while (num.size() >= den.size() && !num.empty()) {
        Rational c = num.back() / den.back();
        std::size_t shift = num.size() - den.size();
        for (std::size_t i = 0; i < den.size(); ++i) num[shift + i] -= c * den[i];
        trim(num);
    }
    return num;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly poly_sub(Poly a, const Poly& b) {
    if (a.size() < b.size()) a.resize(b.size(), Rational(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    trim(a);
    return a;
}

}  // namespace

std::vector<Rational> cyclotomic_polynomial(int ell) {
    if (ell < 1) throw DomainError("cyclotomic_polynomial: order must be positive");
    // Phi_ell = (x^ell - 1) / prod_{d | ell, d < ell} Phi_d
    Poly f(ell + 1, Rational(0));
    f[0] = -1;
    f[ell] = 1;
    for (int d = 1; d < ell; ++d) {
        if (ell % d != 0) continue;
        f = poly_divexact(std::move(f), cyclotomic_polynomial(d));
    }
    return f;
}

FieldSpec FieldSpec::parse(const std::string& text, int ell) {
    FieldSpec spec;
    spec.ell = ell;
    if (text == "cyclotomic") {
        spec.kind = Kind::Cyclotomic;
        return spec;
    }
    if (text.rfind("fp:", 0) == 0) {
        const std::string digits = text.substr(3);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw ConfigError("field spec: expected fp:<prime>, got '" + text + "'");
        spec.kind = Kind::Prime;
        spec.p = std::stoull(digits);
        return spec;
    }
    throw ConfigError("field spec: expected 'cyclotomic' or 'fp:<p>', got '" + text + "'");
}

std::string FieldSpec::str() const {
    if (kind == Kind::Cyclotomic) return "cyclotomic";
    return "fp:" + std::to_string(p);
}

CycloField::CycloField(int ell) : ell_(ell) {
    if (ell < 3 || ell % 2 == 0) throw DomainError("CycloField: order must be odd and >= 3");
    modulus_ = cyclotomic_polynomial(ell);
    phi_ = static_cast<int>(modulus_.size()) - 1;

    xpow_.assign(2 * phi_ - 1, Elem(phi_, Rational(0)));
    for (int k = 0; k < 2 * phi_ - 1; ++k) {
        Poly xk(k + 1, Rational(0));
        xk[k] = 1;
        Poly red = poly_mod(std::move(xk), modulus_);
        for (std::size_t i = 0; i < red.size(); ++i) xpow_[k][i] = red[i];
    }

    qpow_.assign(ell_, zero());
    qpow_[0] = Elem(phi_, Rational(0));
    qpow_[0][0] = 1;
    for (int e = 1; e < ell_; ++e) {
        Poly xk(e + 1, Rational(0));
        xk[e] = 1;
        Poly red = poly_mod(std::move(xk), modulus_);
        Elem v(phi_, Rational(0));
        for (std::size_t i = 0; i < red.size(); ++i) v[i] = red[i];
        qpow_[e] = v;
    }
}

CycloField::Elem CycloField::from_int(long v) const {
    Elem r(phi_, Rational(0));
    r[0] = v;
    return r;
}

CycloField::Elem CycloField::from_rational(const Rational& v) const {
    Elem r(phi_, Rational(0));
    r[0] = v;
    return r;
}

CycloField::Elem CycloField::add(const Elem& a, const Elem& b) const {
    Elem r(a);
    for (int i = 0; i < phi_; ++i) r[i] += b[i];
    return r;
}

CycloField::Elem CycloField::sub(const Elem& a, const Elem& b) const {
    Elem r(a);
    for (int i = 0; i < phi_; ++i) r[i] -= b[i];
    return r;
}

CycloField::Elem CycloField::neg(const Elem& a) const {
    Elem r(a);
    for (int i = 0; i < phi_; ++i) r[i] = -r[i];
    return r;
}

CycloField::Elem CycloField::mul(const Elem& a, const Elem& b) const {
    std::vector<Rational> conv(2 * phi_ - 1, Rational(0));
    for (int i = 0; i < phi_; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < phi_; ++j) {
            if (b[j] == 0) continue;
            conv[i + j] += a[i] * b[j];
        }
    }
    Elem r(phi_, Rational(0));
    for (int k = 0; k < 2 * phi_ - 1; ++k) {
        if (conv[k] == 0) continue;
        for (int i = 0; i < phi_; ++i) r[i] += conv[k] * xpow_[k][i];
    }
    return r;
}

bool CycloField::is_zero(const Elem& a) const {
    for (const auto& c : a)
        if (c != 0) return false;
    return true;
}

CycloField::Elem CycloField::inv(const Elem& a) const {
    if (is_zero(a)) throw DomainError("CycloField::inv: division by zero");
    // Extended Euclid in Q[x] against the modulus.
    Poly r0 = modulus_, r1(a.begin(), a.end());
    trim(r1);
    Poly s0 = {}, s1 = {Rational(1)};  // coefficients of the input polynomial
    while (!r1.empty()) {
        Poly quot = poly_divexact(poly_sub(r0, poly_mod(r0, r1)), r1);
        Poly r2 = poly_mod(r0, r1);
        Poly s2 = poly_sub(s0, poly_mul(quot, s1));
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    // r0 is a nonzero constant: gcd(a, Phi_ell) = 1 since Phi_ell is irreducible.
    if (r0.size() != 1) throw InvariantError("CycloField::inv: modulus not coprime to element");
    Rational scale = Rational(1) / r0[0];
    Poly s = poly_mod(std::move(s0), modulus_);
    Elem out(phi_, Rational(0));
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] * scale;
    return out;
}

CycloField::Elem CycloField::qpow(long e) const {
    long r = e % ell_;
    if (r < 0) r += ell_;
    return qpow_[r];
}

std::string CycloField::str(const Elem& a) const {
    std::ostringstream os;
    bool any = false;
    for (int i = 0; i < phi_; ++i) {
        if (a[i] == 0) continue;
        if (any) os << " + ";
        os << a[i].get_str();
        if (i == 1) os << "*q";
        if (i > 1) os << "*q^" << i;
        any = true;
    }
    if (!any) os << "0";
    return os.str();
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

PrimeField::PrimeField(std::uint64_t p, int ell) : p_(p), ell_(ell) {
    if (ell < 3 || ell % 2 == 0) throw DomainError("PrimeField: order must be odd and >= 3");
    if (!is_prime_u64(p)) throw DomainError("PrimeField: " + std::to_string(p) + " is not prime");
    if ((p - 1) % static_cast<std::uint64_t>(ell) != 0)
        throw NoRootError("PrimeField: no element of order " + std::to_string(ell) + " in F_" +
                          std::to_string(p));
    // Smallest residue of exact multiplicative order ell, for reproducibility.
    q_ = 0;
    for (Elem r = 2; r < p_; ++r) {
        Elem x = r;
        int order = 1;
        while (x != 1) {
            x = mul(x, r);
            ++order;
            if (order > ell_) break;
        }
        if (order == ell_) {
            q_ = r;
            break;
        }
    }
    if (q_ == 0) throw NoRootError("PrimeField: root search failed");  // unreachable when ell | p-1
    qpow_.assign(ell_, 1);
    for (int e = 1; e < ell_; ++e) qpow_[e] = mul(qpow_[e - 1], q_);
}

PrimeField::Elem PrimeField::from_int(long v) const {
    long r = v % static_cast<long>(p_);
    if (r < 0) r += static_cast<long>(p_);
    return static_cast<Elem>(r);
}

PrimeField::Elem PrimeField::inv(Elem a) const {
    if (a == 0) throw DomainError("PrimeField::inv: division by zero");
    // Fermat.
    Elem result = 1, base = a;
    std::uint64_t e = p_ - 2;
    while (e) {
        if (e & 1) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

PrimeField::Elem PrimeField::qpow(long e) const {
    long r = e % ell_;
    if (r < 0) r += ell_;
    return qpow_[r];
}

PrimeField::Elem evaluate_mod_p(const CycloField::Elem& a, const PrimeField& fp) {
    PrimeField::Elem acc = 0;
    PrimeField::Elem qk = 1;
    for (const auto& coeff : a) {
        const mpz_class num = coeff.get_num();
        const mpz_class den = coeff.get_den();
        const std::uint64_t p = fp.p();
        std::uint64_t n = mpz_class(((num % p) + p) % p).get_ui();
        std::uint64_t d = mpz_class(((den % p) + p) % p).get_ui();
        if (d == 0) throw DomainError("evaluate_mod_p: denominator vanishes mod p");
        acc = fp.add(acc, fp.mul(fp.mul(n, fp.inv(d)), qk));
        qk = fp.mul(qk, fp.q());
    }
    return acc;
}

}  // namespace qtx

#include "iet/rational.hpp"
#include "iet/errors.hpp"

#include <cctype>

namespace iet {

static bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

mpq_class parse_rational(std::string_view s) {
    std::string_view body = s;
    bool neg = false;
    if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
        neg = body[0] == '-';
        body.remove_prefix(1);
    }
    auto slash = body.find('/');
    std::string_view num = body.substr(0, slash);
    if (!all_digits(num))
        throw config_error("bad rational: '" + std::string(s) + "'");
    mpq_class q;
    if (slash == std::string_view::npos) {
        q = mpq_class(mpz_class(std::string(num), 10));
    } else {
        std::string_view den = body.substr(slash + 1);
        if (!den.empty() && (den[0] == '-' || den[0] == '+')) {
            neg ^= den[0] == '-';
            den.remove_prefix(1);
        }
        if (!all_digits(den))
            throw config_error("bad rational: '" + std::string(s) + "'");
        mpz_class d{std::string(den), 10};
        if (d == 0)
            throw config_error("zero denominator: '" + std::string(s) + "'");
        q = mpq_class(mpz_class(std::string(num), 10), d);
        q.canonicalize();
    }
    return neg ? mpq_class(-q) : q;
}

std::string rational_str(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

DecimalReal parse_decimal(std::string_view s) {
    std::string_view body = s;
    bool neg = false;
    if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
        neg = body[0] == '-';
        body.remove_prefix(1);
    }
    auto dot = body.find('.');
    std::string_view ip = body.substr(0, dot);
    std::string_view fp = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if (!all_digits(ip) || (dot != std::string_view::npos && !all_digits(fp)))
        throw config_error("bad decimal: '" + std::string(s) + "'");
    mpz_class digits{std::string(ip) + std::string(fp), 10};
    mpz_class den = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
    mpq_class v(digits, den);
    v.canonicalize();
    if (neg) v = -v;
    return DecimalReal{v, static_cast<long>(fp.size())};
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

} // namespace iet

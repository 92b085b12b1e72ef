#include "amapf/auction.hpp"

#include <cctype>
#include <charconv>

namespace amapf::auction {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto den = parse_int(text.substr(slash + 1), text);
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return {parse_int(text.substr(0, slash), text), den};
    }
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) return Rational(parse_int(text, text));
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 12) throw std::invalid_argument("too many decimals in '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const bool negative = !text.empty() && text.front() == '-';
    const auto whole_part = text.substr(0, dot);
    const std::int64_t whole = whole_part.empty() || whole_part == "-" ? 0 : parse_int(whole_part, text);
    const std::int64_t fraction = frac.empty() ? 0 : parse_int(frac, text);
    const std::int64_t magnitude = (whole < 0 ? -whole : whole) * scale + fraction;
    return {negative ? -magnitude : magnitude, scale};
}

}  // namespace amapf::auction

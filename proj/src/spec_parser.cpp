#include "wpdiag/spec_parser.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "wpdiag/errors.hpp"

namespace wpdiag {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad(std::string_view text, const char* why) {
    throw Error(ErrorCode::InvalidSpec, std::string(why) + ": '" + std::string(text) + "'");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

// number, "pi", or a number immediately followed by "pi".
double parse_factor(std::string_view f, std::string_view whole) {
    if (f.empty()) bad(whole, "empty factor");
    if (f.front() == '-' || f.front() == '+') bad(whole, "sign inside a factor");
    double scale = 1.0;
    if (f.size() >= 2 && f.substr(f.size() - 2) == "pi") {
        scale = kPi;
        f.remove_suffix(2);
        if (f.empty()) return scale;
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || end != f.data() + f.size()) bad(whole, "not a number");
    return v * scale;
}

}  // namespace

double parse_real(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) bad(text, "empty number");
    double sign = 1.0;
    if (s.front() == '-' || s.front() == '+') {
        if (s.front() == '-') sign = -1.0;
        s.remove_prefix(1);
    }
    // Products and quotients, left to right; exponent signs never reach here since '*' and '/' split first.
    double value = 1.0;
    char op = '*';
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '*' || s[i] == '/') {
            const double f = parse_factor(trim(s.substr(start, i - start)), text);
            value = op == '*' ? value * f : value / f;
            if (i < s.size()) op = s[i];
            start = i + 1;
        }
    }
    if (!std::isfinite(value)) bad(text, "not finite");
    return sign * value;
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    for (std::string_view part : split(text, ',')) out.push_back(parse_real(part));
    return out;
}

CircleHomeo parse_homeo(std::string_view spec) {
    spec = trim(spec);
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos) bad(spec, "missing ':'");
    const std::string_view kind = trim(spec.substr(0, colon));
    const std::string_view body = trim(spec.substr(colon + 1));

    if (kind == "compose") {
        const std::vector<std::string_view> parts = split(body, '|');
        if (parts.size() < 2) bad(spec, "compose needs at least two maps");
        CircleHomeo out = parse_homeo(parts.back());
        for (std::size_t i = parts.size() - 1; i-- > 0;) out = CircleHomeo::compose(parse_homeo(parts[i]), out);
        return out;
    }
    if (kind == "rot") return CircleHomeo::rotation(parse_real(body));
    if (kind == "trig") return CircleHomeo::trig(parse_real(body));
    if (kind == "mobius") {
        if (body.find('=') != std::string_view::npos) {
            double p = 0.0, q = 0.0, r = 0.0;
            int seen = 0;
            for (std::string_view item : split(body, ',')) {
                const std::size_t eq = item.find('=');
                if (eq == std::string_view::npos) bad(spec, "expected NAME=value");
                const std::string_view name = trim(item.substr(0, eq));
                const double v = parse_real(item.substr(eq + 1));
                if (name == "P") {
                    p = v;
                    seen |= 1;
                } else if (name == "Q") {
                    q = v;
                    seen |= 2;
                } else if (name == "R") {
                    r = v;
                    seen |= 4;
                } else {
                    bad(spec, "unknown hyperbola parameter");
                }
            }
            if (seen != 7) bad(spec, "hyperbola needs P, Q and R");
            return CircleHomeo::from_mobius(MobiusMap::hyperbola(p, q, r));
        }
        const std::vector<double> c = parse_real_list(body);
        if (c.size() != 4) bad(spec, "mobius needs four coefficients");
        return CircleHomeo::from_mobius(MobiusMap::from_coefficients(c[0], c[1], c[2], c[3]));
    }
    if (kind == "pwl" || kind == "samples") {
        const std::size_t semi = body.find(';');
        if (semi == std::string_view::npos) bad(spec, "missing ';'");
        const std::string_view head = trim(body.substr(0, semi));
        const std::vector<double> tail = parse_real_list(body.substr(semi + 1));
        if (kind == "samples") return CircleHomeo::from_samples(parse_real_list(head), tail);
        if (head.empty()) return CircleHomeo::piecewise_equal(CircleHomeo::default_kink_base(), tail);
        const std::vector<double> breaks = parse_real_list(head);
        if (breaks.size() == 1) return CircleHomeo::piecewise_equal(breaks[0], tail);
        return CircleHomeo::piecewise_linear(breaks, tail);
    }
    bad(spec, "unknown homeomorphism kind");
}

}  // namespace wpdiag

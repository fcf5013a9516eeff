#pragma once

// Wire formats: complex literals "re[+im i]", slopes "s/r", and the JSON
// shapes emitted by the CLI (BQ reports, series results).

#include <cctype>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "markoff/bowditch.hpp"
#include "markoff/markoff_map.hpp"
#include "markoff/series.hpp"
#include "markoff/slope.hpp"

namespace markoff {

using json = nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "re+imi" / "re-imi"; always both parts, e.g. "2+0i", "1.5-0.75i".
inline std::string format_complex(cplx z) {
    std::string out = format_double(z.real());
    out += z.imag() < 0.0 ? "-" : "+";
    out += format_double(std::abs(z.imag()));
    out += "i";
    return out;
}

// Accepts "R", "Ii", "R+Ii", "R-Ii" with optional exponents ("1e-3+2.5e-4i");
// a bare trailing "i" (as in "3+i") means an imaginary part of 1.
inline cplx parse_complex(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty complex literal");

    auto to_double = [](const std::string& part) {
        if (part.empty() || part == "+") return 1.0;
        if (part == "-") return -1.0;
        std::size_t used = 0;
        double v = std::stod(part, &used);
        if (used != part.size()) throw std::invalid_argument("bad numeric literal: " + part);
        return v;
    };

    if (s.back() != 'i') return {to_double(s), 0.0};

    std::string body = s.substr(0, s.size() - 1);
    // split at the last sign that is not leading and not part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) return {0.0, to_double(body)};
    return {to_double(body.substr(0, split)), to_double(body.substr(split))};
}

// Comma-separated complex literals.
inline std::vector<cplx> parse_complex_list(std::string_view text) {
    std::vector<cplx> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string_view piece =
            comma == std::string_view::npos ? text.substr(start) : text.substr(start, comma - start);
        out.push_back(parse_complex(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json witness_list_to_json(const std::vector<std::pair<Slope, cplx>>& list) {
    json arr = json::array();
    for (const auto& [slope, trace] : list)
        arr.push_back(to_string(slope) + ": " + format_complex(trace));
    return arr;
}

inline json to_json(const BQReport& r) {
    json sinks = json::array();
    for (const TreeVertex& v : r.sink_vertices)
        sinks.push_back(json::array(
            {to_string(v.regions[0]), to_string(v.regions[1]), to_string(v.regions[2])}));
    return json{{"status", to_string(r.status)},
                {"violating_regions", witness_list_to_json(r.violating_regions)},
                {"small_trace_regions", witness_list_to_json(r.small_trace_regions)},
                {"sink_vertices", sinks},
                {"max_depth_explored", r.max_depth_explored}};
}

inline json to_json(const SeriesResult& r) {
    return json{{"value", complex_to_json(r.value)},
                {"terms", r.terms_used},
                {"depth", r.depth},
                {"residual", r.residual_estimate},
                {"reliable", r.reliable && r.converged}};
}

inline json triple_to_json(const MarkoffTriple& t) {
    return json{{"x", complex_to_json(t.x)},
                {"y", complex_to_json(t.y)},
                {"z", complex_to_json(t.z)},
                {"mu", complex_to_json(t.mu)}};
}

// {seed, mu, root} serialization of a map.
inline json to_json(const MarkoffMap& m) {
    MarkoffTriple t = m.seed();
    json root = json::array();
    for (const Slope& x : m.root().regions) root.push_back(to_string(x));
    return json{{"seed", json::array({complex_to_json(t.x), complex_to_json(t.y),
                                      complex_to_json(t.z)})},
                {"mu", complex_to_json(t.mu)},
                {"root", root}};
}

}  // namespace markoff

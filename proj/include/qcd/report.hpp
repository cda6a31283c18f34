#pragma once

// Locale-independent CSV and JSON rendering of density rows.

#include "qcd/density.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace qcd {

inline constexpr std::string_view density_csv_header = "x,k,D,constraint,count,reference,empirical,predicted,asymptotic";

/// Six significant digits, "%g" style, independent of the global locale.
inline std::string format_real(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    if (ec != std::errc{})
        throw std::runtime_error("format_real: conversion failed");
    return std::string(buf, end);
}

inline std::string format_real(const std::optional<double>& v)
{
    return v ? format_real(*v) : std::string("nan");
}

/// Quotes a field when it contains a comma, quote or newline.
inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string to_csv_line(const DensityRow& r)
{
    std::string s;
    s += std::to_string(r.x) + ',';
    s += std::to_string(r.k) + ',';
    s += std::to_string(r.d) + ',';
    s += csv_field(r.constraint) + ',';
    s += std::to_string(r.count) + ',';
    s += std::to_string(r.reference) + ',';
    s += format_real(r.empirical) + ',';
    s += format_real(r.predicted) + ',';
    s += format_real(r.asymptotic);
    return s;
}

inline void write_csv(std::ostream& os, const std::vector<DensityRow>& rows)
{
    os << density_csv_header << '\n';
    for (const auto& r : rows)
        os << to_csv_line(r) << '\n';
}

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const DensityRow& r)
{
    ordered_json j;
    j["x"] = r.x;
    j["k"] = r.k;
    j["D"] = r.d;
    j["constraint"] = r.constraint;
    j["count"] = r.count;
    j["reference"] = r.reference;
    j["empirical"] = r.empirical ? ordered_json(*r.empirical) : ordered_json(nullptr);
    j["predicted"] = r.predicted;
    j["asymptotic"] = r.asymptotic ? ordered_json(*r.asymptotic) : ordered_json(nullptr);
    return j;
}

inline ordered_json to_json(const std::vector<DensityRow>& rows)
{
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows)
        arr.push_back(to_json(r));
    return arr;
}

} // namespace qcd

#include "results_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace chebpint::cli
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& fixed_columns()
{
    static const std::vector<std::string> cols = {
        "experiment", "n", "m", "workers", "error", "cond2", "residual", "iterations",
        "t_assembly", "t_step_a", "t_step_b", "t_step_c", "t_wall", "speedup", "strong_eff", "weak_eff"};
    return cols;
}

std::vector<double*> real_fields(ResultRow& r)
{
    return {&r.error, &r.cond2, &r.residual, &r.t_assembly, &r.t_step_a, &r.t_step_b,
            &r.t_step_c, &r.t_wall, &r.speedup, &r.strong_eff, &r.weak_eff};
}

std::vector<const double*> real_fields(const ResultRow& r)
{
    return {&r.error, &r.cond2, &r.residual, &r.t_assembly, &r.t_step_a, &r.t_step_b,
            &r.t_step_c, &r.t_wall, &r.speedup, &r.strong_eff, &r.weak_eff};
}

bool same_double(double a, double b)
{
    if (std::isnan(a) || std::isnan(b))
        return std::isnan(a) && std::isnan(b);
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

template <typename Int>
Int parse_int(const std::string& text)
{
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::invalid_argument("not an integer: '" + text + "'");
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

nlohmann::ordered_json json_number(double value)
{
    if (std::isnan(value))
        return nullptr;
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    return value;
}

double json_to_double(const nlohmann::ordered_json& j)
{
    if (j.is_null())
        return kNaN;
    if (j.is_string())
        return parse_double(j.get<std::string>());
    return j.get<double>();
}

} // namespace

ResultRow::ResultRow()
    : error(kNaN), cond2(kNaN), residual(kNaN), t_assembly(kNaN), t_step_a(kNaN), t_step_b(kNaN),
      t_step_c(kNaN), t_wall(kNaN), speedup(kNaN), strong_eff(kNaN), weak_eff(kNaN)
{
}

void ResultRow::set_extra(const std::string& key, double value)
{
    for (auto& [k, v] : extras)
        if (k == key) {
            v = value;
            return;
        }
    extras.emplace_back(key, value);
}

double ResultRow::extra(const std::string& key) const
{
    for (const auto& [k, v] : extras)
        if (k == key)
            return v;
    return kNaN;
}

bool same_values(const ResultRow& a, const ResultRow& b)
{
    if (a.experiment != b.experiment || a.n != b.n || a.m != b.m || a.workers != b.workers
        || a.iterations != b.iterations || a.extras.size() != b.extras.size())
        return false;
    const auto fa = real_fields(a);
    const auto fb = real_fields(b);
    for (std::size_t i = 0; i < fa.size(); ++i)
        if (!same_double(*fa[i], *fb[i]))
            return false;
    for (std::size_t i = 0; i < a.extras.size(); ++i)
        if (a.extras[i].first != b.extras[i].first || !same_double(a.extras[i].second, b.extras[i].second))
            return false;
    return true;
}

std::string format_double(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& text)
{
    if (text == "nan" || text.empty())
        return kNaN;
    if (text == "inf")
        return std::numeric_limits<double>::infinity();
    if (text == "-inf")
        return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::invalid_argument("not a number: '" + text + "'");
    return value;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows)
{
    std::vector<std::string> header = fixed_columns();
    if (!rows.empty())
        for (const auto& [key, value] : rows.front().extras)
            header.push_back(key);
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        if (r.experiment.find_first_of(",\n") != std::string::npos)
            throw std::invalid_argument("write_csv: experiment id contains a separator");
        os << r.experiment << ',' << r.n << ',' << r.m << ',' << r.workers;
        const auto fields = real_fields(r);
        for (std::size_t i = 0; i < 3; ++i)
            os << ',' << format_double(*fields[i]);
        os << ',' << r.iterations;
        for (std::size_t i = 3; i < fields.size(); ++i)
            os << ',' << format_double(*fields[i]);
        if (r.extras.size() + fixed_columns().size() != header.size())
            throw std::invalid_argument("write_csv: rows carry different extra columns");
        for (const auto& [key, value] : r.extras)
            os << ',' << format_double(value);
        os << '\n';
    }
}

std::vector<ResultRow> read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("read_csv: missing header");
    const auto header = split_csv_line(line);
    const auto& fixed = fixed_columns();
    if (header.size() < fixed.size())
        throw std::invalid_argument("read_csv: header too short");
    for (std::size_t i = 0; i < fixed.size(); ++i)
        if (header[i] != fixed[i])
            throw std::invalid_argument("read_csv: unexpected column '" + header[i] + "'");

    std::vector<ResultRow> rows;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("read_csv: row has " + std::to_string(cells.size()) + " cells, expected "
                                        + std::to_string(header.size()));
        ResultRow r;
        r.experiment = cells[0];
        r.n = parse_int<int>(cells[1]);
        r.m = parse_int<long long>(cells[2]);
        r.workers = parse_int<int>(cells[3]);
        auto fields = real_fields(r);
        for (std::size_t i = 0; i < 3; ++i)
            *fields[i] = parse_double(cells[4 + i]);
        r.iterations = parse_int<int>(cells[7]);
        for (std::size_t i = 3; i < fields.size(); ++i)
            *fields[i] = parse_double(cells[5 + i]);
        for (std::size_t c = fixed.size(); c < header.size(); ++c)
            r.extras.emplace_back(header[c], parse_double(cells[c]));
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_json(std::ostream& os, const ResultSet& set)
{
    nlohmann::ordered_json doc;
    doc["command"] = set.command;
    doc["config"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : set.config)
        doc["config"][key] = value;
    doc["rows"] = nlohmann::ordered_json::array();
    const auto& cols = fixed_columns();
    for (const auto& r : set.rows) {
        nlohmann::ordered_json row;
        row["experiment"] = r.experiment;
        row["n"] = r.n;
        row["m"] = r.m;
        row["workers"] = r.workers;
        const auto fields = real_fields(r);
        row["error"] = json_number(*fields[0]);
        row["cond2"] = json_number(*fields[1]);
        row["residual"] = json_number(*fields[2]);
        row["iterations"] = r.iterations;
        for (std::size_t i = 3; i < fields.size(); ++i)
            row[cols[5 + i]] = json_number(*fields[i]);
        nlohmann::ordered_json extras = nlohmann::ordered_json::object();
        for (const auto& [key, value] : r.extras)
            extras[key] = json_number(value);
        row["extras"] = std::move(extras);
        doc["rows"].push_back(std::move(row));
    }
    // nlohmann prints doubles with 17 significant digits, enough to round-trip.
    os << doc.dump(2) << '\n';
}

ResultSet read_json(std::istream& is)
{
    const auto doc = nlohmann::ordered_json::parse(is);
    ResultSet set;
    set.command = doc.at("command").get<std::string>();
    for (const auto& [key, value] : doc.at("config").items())
        set.config.emplace_back(key, value.get<std::string>());
    const auto& cols = fixed_columns();
    for (const auto& row : doc.at("rows")) {
        ResultRow r;
        r.experiment = row.at("experiment").get<std::string>();
        r.n = row.at("n").get<int>();
        r.m = row.at("m").get<long long>();
        r.workers = row.at("workers").get<int>();
        r.iterations = row.at("iterations").get<int>();
        auto fields = real_fields(r);
        *fields[0] = json_to_double(row.at("error"));
        *fields[1] = json_to_double(row.at("cond2"));
        *fields[2] = json_to_double(row.at("residual"));
        for (std::size_t i = 3; i < fields.size(); ++i)
            *fields[i] = json_to_double(row.at(cols[5 + i]));
        for (const auto& [key, value] : row.at("extras").items())
            r.extras.emplace_back(key, json_to_double(value));
        set.rows.push_back(std::move(r));
    }
    return set;
}

} // namespace chebpint::cli

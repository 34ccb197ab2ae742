#pragma once

// Candidate file ingestion (JSON, CSV) and report serialization
// (JSON, CSV, text).
//
// JSON input:  {"candidates":[{"id":"a","p":0.5,"times":[1.0,2.0]}], "unit":"s"}
// CSV input:   id,p,t1[,t2...]   one candidate per line; an optional header
//              line, blank lines and lines starting with '#' are skipped.

#include <trial_order/error.hpp>
#include <trial_order/model.hpp>

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace trial_order::io {

using json = nlohmann::json;

class parse_error : public error {
public:
    using error::error;
};

enum class InputFormat { json, csv };
enum class OutputFormat { json, csv, text };

inline std::optional<InputFormat> parse_input_format(std::string_view s) {
    if (s == "json") return InputFormat::json;
    if (s == "csv") return InputFormat::csv;
    return std::nullopt;
}

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
    if (s == "json") return OutputFormat::json;
    if (s == "csv") return OutputFormat::csv;
    if (s == "text") return OutputFormat::text;
    return std::nullopt;
}

// Format from the file extension; JSON when there is none (e.g. stdin).
inline InputFormat infer_input_format(std::string_view path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return InputFormat::csv;
    return InputFormat::json;
}

struct InputDocument {
    CandidateSet candidates;
    std::string unit;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::optional<double> to_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline InputDocument finish(std::vector<CandidateSpec> specs, const std::vector<std::string>& where,
                            std::string unit) {
    auto report = validate(specs);
    if (!report.clean()) {
        std::string msg;
        for (const auto& v : report.violations) {
            if (!msg.empty()) msg += "\n";
            if (v.kind != ViolationKind::empty_set && v.index < where.size())
                msg += where[v.index] + ": ";
            msg += v.message;
        }
        throw invalid_input(msg);
    }
    return {CandidateSet::from_specs(specs), std::move(unit)};
}

} // namespace detail

inline InputDocument parse_csv(std::string_view text) {
    std::vector<CandidateSpec> specs;
    std::vector<std::string> where;
    std::size_t line_no = 0;
    bool first_data_line = true;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = detail::trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        const auto fields = detail::split(line, ',');
        const bool header = first_data_line && fields.size() >= 2 && !detail::to_number(fields[1]);
        first_data_line = false;
        if (header) continue;

        const std::string row = "row " + std::to_string(line_no);
        if (fields.size() < 3)
            throw parse_error(row + ": expected id, p and at least one time column");
        CandidateSpec spec;
        spec.id = std::string(fields[0]);
        if (spec.id.empty()) throw parse_error(row + ", field id: empty");
        const auto p = detail::to_number(fields[1]);
        if (!p) throw parse_error(row + ", field p: not a number '" + std::string(fields[1]) + "'");
        spec.p = *p;
        for (std::size_t j = 2; j < fields.size(); ++j) {
            const auto t = detail::to_number(fields[j]);
            if (!t)
                throw parse_error(row + ", field time " + std::to_string(j - 1) + ": not a number '" +
                                  std::string(fields[j]) + "'");
            spec.times.push_back(*t);
        }
        specs.push_back(std::move(spec));
        where.push_back(row);
    }
    return detail::finish(std::move(specs), where, {});
}

inline InputDocument parse_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("candidates") || !doc["candidates"].is_array())
        throw parse_error("expected an object with a \"candidates\" array");

    std::string unit;
    if (doc.contains("unit")) {
        if (!doc["unit"].is_string()) throw parse_error("field unit: expected a string");
        unit = doc["unit"].get<std::string>();
    }

    std::vector<CandidateSpec> specs;
    std::vector<std::string> where;
    const auto& arr = doc["candidates"];
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& c = arr[i];
        const std::string at = "candidates[" + std::to_string(i) + "]";
        if (!c.is_object()) throw parse_error(at + ": expected an object");
        if (!c.contains("id") || !c["id"].is_string())
            throw parse_error(at + ", field id: expected a string");
        if (!c.contains("p") || !c["p"].is_number())
            throw parse_error(at + ", field p: expected a number");
        if (!c.contains("times") || !c["times"].is_array())
            throw parse_error(at + ", field times: expected an array of numbers");
        CandidateSpec spec{c["id"].get<std::string>(), c["p"].get<double>(), {}};
        for (const auto& t : c["times"]) {
            if (!t.is_number()) throw parse_error(at + ", field times: expected numbers");
            spec.times.push_back(t.get<double>());
        }
        specs.push_back(std::move(spec));
        where.push_back(at);
    }
    return detail::finish(std::move(specs), where, std::move(unit));
}

inline InputDocument parse_input(std::string_view text, InputFormat fmt) {
    return fmt == InputFormat::csv ? parse_csv(text) : parse_json(text);
}

// Reads the whole source; "-" is standard input.
inline std::string read_source(const std::string& path) {
    if (path == "-")
        return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// --- reports -------------------------------------------------------------------

struct Report {
    std::string command;
    std::string input_digest;
    json results = json::object();
    std::string tool_version;
    std::optional<std::uint64_t> seed;

    friend bool operator==(const Report&, const Report&) = default;
};

inline json to_json(const Report& r) {
    json j;
    j["command"] = r.command;
    j["input_digest"] = r.input_digest;
    j["results"] = r.results;
    j["tool_version"] = r.tool_version;
    if (r.seed) j["seed"] = *r.seed;
    return j;
}

inline Report report_from_json(const json& j) {
    Report r;
    r.command = j.at("command").get<std::string>();
    r.input_digest = j.at("input_digest").get<std::string>();
    r.results = j.at("results");
    r.tool_version = j.at("tool_version").get<std::string>();
    if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

inline std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_null()) return "";
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) {
            if (!out.empty()) out += ";";
            out += scalar_text(e);
        }
        return out;
    }
    return v.dump();
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// Scalar leaves of an object under dotted keys; arrays of scalars stay whole.
inline void flatten(const json& obj, const std::string& prefix,
                    std::vector<std::pair<std::string, json>>& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object())
            flatten(value, name, out);
        else if (value.is_array() && !value.empty() && value.front().is_object())
            continue; // tables are emitted separately
        else
            out.emplace_back(name, value);
    }
}

inline std::vector<std::string> table_columns(const json& table) {
    std::vector<std::string> cols;
    for (const auto& [key, value] : table.front().items()) cols.push_back(key);
    return cols;
}

inline std::string emit_csv(const Report& r) {
    std::ostringstream out;
    auto write_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_field(cells[i]);
        out << '\n';
    };
    if (r.results.contains("table") && r.results["table"].is_array() && !r.results["table"].empty()) {
        const auto& table = r.results["table"];
        const auto cols = table_columns(table);
        write_row(cols);
        for (const auto& row : table) {
            std::vector<std::string> cells;
            for (const auto& c : cols) cells.push_back(row.contains(c) ? scalar_text(row[c]) : "");
            write_row(cells);
        }
        return out.str();
    }
    std::vector<std::pair<std::string, json>> flat;
    flatten(r.results, "", flat);
    std::vector<std::string> head, cells;
    for (const auto& [k, v] : flat) {
        head.push_back(k);
        cells.push_back(scalar_text(v));
    }
    write_row(head);
    write_row(cells);
    return out.str();
}

inline std::string emit_text(const Report& r) {
    std::ostringstream out;
    out << "command:      " << r.command << '\n';
    out << "input digest: " << r.input_digest << '\n';
    out << "tool version: " << r.tool_version << '\n';
    if (r.seed) out << "seed:         " << *r.seed << '\n';

    std::vector<std::pair<std::string, json>> flat;
    flatten(r.results, "", flat);
    std::size_t width = 0;
    for (const auto& [k, v] : flat) width = std::max(width, k.size());
    if (!flat.empty()) out << '\n';
    for (const auto& [k, v] : flat)
        out << k << std::string(width - k.size() + 2, ' ') << scalar_text(v) << '\n';

    for (const auto& [key, value] : r.results.items()) {
        if (!value.is_array() || value.empty() || !value.front().is_object()) continue;
        const auto cols = table_columns(value);
        std::vector<std::vector<std::string>> rows;
        std::vector<std::size_t> w;
        for (const auto& c : cols) w.push_back(c.size());
        for (const auto& row : value) {
            std::vector<std::string> cells;
            for (std::size_t i = 0; i < cols.size(); ++i) {
                cells.push_back(row.contains(cols[i]) ? scalar_text(row[cols[i]]) : "");
                w[i] = std::max(w[i], cells.back().size());
            }
            rows.push_back(std::move(cells));
        }
        out << '\n' << key << ":\n";
        auto line = [&](const std::vector<std::string>& cells) {
            std::string text;
            for (std::size_t i = 0; i < cells.size(); ++i)
                text += "  " + cells[i] + std::string(w[i] - cells[i].size(), ' ');
            out << text.substr(0, text.find_last_not_of(' ') + 1) << '\n';
        };
        line(cols);
        for (const auto& row : rows) line(row);
    }
    return out.str();
}

} // namespace detail

// JSON output has sorted keys, so equal reports serialize to identical bytes.
inline std::string emit(const Report& r, OutputFormat fmt) {
    switch (fmt) {
    case OutputFormat::json: return to_json(r).dump(2) + "\n";
    case OutputFormat::csv: return detail::emit_csv(r);
    case OutputFormat::text: return detail::emit_text(r);
    }
    return {};
}

} // namespace trial_order::io

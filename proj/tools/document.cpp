#include "document.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <stdexcept>

namespace fzcli {
namespace {

std::string number(double v, bool exact) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // no negative zero in output
    char buf[64];
    std::snprintf(buf, sizeof buf, exact ? "%.17g" : "%.10g", v);
    return buf;
}

std::string text_cell(const Cell& c, bool exact) {
    return std::visit(
        [&](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) return v;
            else if constexpr (std::is_same_v<T, double>) return number(v, exact);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else return std::to_string(v);
        },
        c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                // JSON has no representation for non-finite numbers.
                if (!std::isfinite(v)) return number(v, true);
                return v == 0.0 ? 0.0 : v;
            } else {
                return v;
            }
        },
        c);
}

bool numeric(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return *end == '\0';
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string render_text(const Document& doc) {
    std::string out;
    for (const auto& sec : doc.sections) {
        out += "== " + sec.name + " ==\n";
        std::size_t key_width = 0;
        for (const auto& [k, v] : sec.fields) key_width = std::max(key_width, k.size());
        for (const auto& [k, v] : sec.fields) {
            out += k + std::string(key_width - k.size(), ' ') + "  " + text_cell(v, false) + "\n";
        }
        if (!sec.table.columns.empty()) {
            std::vector<std::size_t> w(sec.table.columns.size());
            std::vector<std::vector<std::string>> cells;
            for (std::size_t j = 0; j < w.size(); ++j) w[j] = sec.table.columns[j].size();
            for (const auto& row : sec.table.rows) {
                std::vector<std::string> r;
                for (std::size_t j = 0; j < row.size(); ++j) {
                    r.push_back(text_cell(row[j], false));
                    w[j] = std::max(w[j], r.back().size());
                }
                cells.push_back(std::move(r));
            }
            auto line = [&](const std::vector<std::string>& r, bool header) {
                std::string l;
                for (std::size_t j = 0; j < r.size(); ++j) {
                    const std::string pad(w[j] - r[j].size(), ' ');
                    l += (j ? "  " : "") + (!header && numeric(r[j]) ? pad + r[j] : r[j] + pad);
                }
                while (!l.empty() && l.back() == ' ') l.pop_back();
                return l + "\n";
            };
            out += line(sec.table.columns, true);
            for (const auto& r : cells) out += line(r, false);
        }
        for (const auto& n : sec.notes) out += "note: " + n + "\n";
        out += "\n";
    }
    return out;
}

std::string render_csv(const Document& doc) {
    // One RFC 4180 block per section; blocks are separated by an empty line.
    std::string out;
    bool first = true;
    auto record = [&](const std::vector<std::string>& fields) {
        for (std::size_t j = 0; j < fields.size(); ++j) out += (j ? "," : "") + csv_field(fields[j]);
        out += "\r\n";
    };
    for (const auto& sec : doc.sections) {
        if (!first) out += "\r\n";
        first = false;
        if (!sec.table.columns.empty()) {
            record(sec.table.columns);
            for (const auto& row : sec.table.rows) {
                std::vector<std::string> f;
                for (const auto& c : row) f.push_back(text_cell(c, true));
                record(f);
            }
        } else {
            record({"key", "value"});
            for (const auto& [k, v] : sec.fields) record({k, text_cell(v, true)});
            for (const auto& n : sec.notes) record({"note", n});
        }
    }
    return out;
}

std::string render_json(const Document& doc) {
    nlohmann::ordered_json j;
    j["schema"] = "fractal-zeta/1";
    j["command"] = doc.command;
    nlohmann::ordered_json sections = nlohmann::ordered_json::array();
    for (const auto& sec : doc.sections) {
        nlohmann::ordered_json s;
        s["name"] = sec.name;
        nlohmann::ordered_json fields = nlohmann::ordered_json::object();
        for (const auto& [k, v] : sec.fields) fields[k] = json_cell(v);
        s["fields"] = fields;
        if (!sec.table.columns.empty()) {
            s["columns"] = sec.table.columns;
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (const auto& row : sec.table.rows) {
                nlohmann::ordered_json r = nlohmann::ordered_json::array();
                for (const auto& c : row) r.push_back(json_cell(c));
                rows.push_back(r);
            }
            s["rows"] = rows;
        }
        if (!sec.notes.empty()) s["notes"] = sec.notes;
        sections.push_back(s);
    }
    j["sections"] = sections;
    return j.dump(2) + "\n";
}

}  // namespace

Section& Document::add(std::string name) {
    sections.push_back(Section{std::move(name), {}, {}, {}});
    return sections.back();
}

Format parse_format(const std::string& s) {
    if (s == "text") return Format::Text;
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw std::invalid_argument("unknown format '" + s + "' (expected text, csv or json)");
}

std::string render(const Document& doc, Format format) {
    switch (format) {
        case Format::Text: return render_text(doc);
        case Format::Csv: return render_csv(doc);
        case Format::Json: return render_json(doc);
    }
    return {};
}

}  // namespace fzcli

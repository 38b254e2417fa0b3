#include "counterfact/report.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "counterfact/errors.hpp"

namespace counterfact {

OutputFormat parse_output_format(const std::string& name) {
    if (name == "table") return OutputFormat::table;
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ValidationError("unknown output format '" + name +
                          "' (expected table, csv, or json)");
}

std::string format_significant(double x, int digits) {
    if (digits < 1) digits = 1;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

ReportValue text_value(std::string s) {
    ReportValue v;
    v.text = std::move(s);
    return v;
}

ReportValue number_value(double x, int digits) {
    ReportValue v;
    v.text = format_significant(x, digits);
    v.numeric = true;
    // Store the printed value, not the exact one: every format then
    // round-trips to the same double.
    v.value = std::strtod(v.text.c_str(), nullptr);
    return v;
}

ReportValue integer_value(std::int64_t x) {
    ReportValue v;
    v.text = std::to_string(x);
    v.numeric = true;
    v.integral = true;
    v.value = static_cast<double>(x);
    return v;
}

namespace {

void render_table(const ReportDocument& doc, std::ostream& out) {
    bool first = true;
    for (const ReportSection& s : doc.sections) {
        if (!first) out << "\n";
        first = false;
        out << "# " << s.name << "\n";
        std::vector<std::size_t> width(s.columns.size());
        for (std::size_t c = 0; c < s.columns.size(); ++c)
            width[c] = s.columns[c].size();
        for (const auto& row : s.rows)
            for (std::size_t c = 0; c < row.size() && c < width.size(); ++c)
                width[c] = std::max(width[c], row[c].text.size());
        for (std::size_t c = 0; c < s.columns.size(); ++c) {
            out << (c ? "  " : "");
            out << s.columns[c]
                << std::string(width[c] - s.columns[c].size(), ' ');
        }
        out << "\n";
        for (const auto& row : s.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                out << (c ? "  " : "");
                const std::size_t pad = width[c] - row[c].text.size();
                if (row[c].numeric)  // right-align numbers
                    out << std::string(pad, ' ') << row[c].text;
                else
                    out << row[c].text << std::string(pad, ' ');
            }
            out << "\n";
        }
    }
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

void render_csv(const ReportDocument& doc, std::ostream& out) {
    bool first = true;
    for (const ReportSection& s : doc.sections) {
        if (!first) out << "\n";
        first = false;
        out << "section," << csv_escape(s.name) << "\n";
        for (std::size_t c = 0; c < s.columns.size(); ++c)
            out << (c ? "," : "") << csv_escape(s.columns[c]);
        out << "\n";
        for (const auto& row : s.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << csv_escape(row[c].text);
            out << "\n";
        }
    }
}

void render_json(const ReportDocument& doc, std::ostream& out) {
    nlohmann::json root = nlohmann::json::object();
    for (const ReportSection& s : doc.sections) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : s.rows) {
            nlohmann::json obj = nlohmann::json::object();
            for (std::size_t c = 0; c < row.size() && c < s.columns.size(); ++c) {
                const ReportValue& v = row[c];
                if (!v.numeric)
                    obj[s.columns[c]] = v.text;
                else if (v.integral)
                    obj[s.columns[c]] = static_cast<std::int64_t>(v.value);
                else
                    obj[s.columns[c]] = v.value;
            }
            rows.push_back(std::move(obj));
        }
        root[s.name] = std::move(rows);
    }
    out << root.dump(2) << "\n";
}

}  // namespace

void render(const ReportDocument& doc, OutputFormat format, std::ostream& out) {
    switch (format) {
        case OutputFormat::table: render_table(doc, out); break;
        case OutputFormat::csv: render_csv(doc, out); break;
        case OutputFormat::json: render_json(doc, out); break;
    }
}

}  // namespace counterfact

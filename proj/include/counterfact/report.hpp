#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace counterfact {

// ---------------------------------------------------------------------------
// Output layer: the CLI's sections rendered as aligned text tables, CSV,
// or JSON. Numbers are formatted once to a significant-digit budget; the
// value stored beside the text is the formatted value reparsed, so a
// consumer reading any format back recovers exactly what was printed.
// ---------------------------------------------------------------------------

enum class OutputFormat { table, csv, json };

OutputFormat parse_output_format(const std::string& name);

// %.{digits}g formatting.
std::string format_significant(double x, int digits);

struct ReportValue {
    std::string text;
    bool numeric = false;
    double value = 0.0;   // meaningful only when numeric
    bool integral = false;
};

ReportValue text_value(std::string s);
ReportValue number_value(double x, int digits);
ReportValue integer_value(std::int64_t x);

struct ReportSection {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<ReportValue>> rows;
};

struct ReportDocument {
    std::vector<ReportSection> sections;
};

// table: aligned columns, one block per section, blank line between.
// csv:   per section, a header row then data rows; blank line between.
// json:  one object, section name -> array of row objects.
void render(const ReportDocument& doc, OutputFormat format, std::ostream& out);

}  // namespace counterfact

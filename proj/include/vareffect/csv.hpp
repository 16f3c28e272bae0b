#pragma once

#include <string>
#include <vector>

namespace vareffect {

struct CsvRow {
    std::vector<std::string> fields;
    int line;  // 1-based physical line the record starts on
};

// Minimal RFC-4180-style reader: comma separated, double quotes with ""
// escapes, newlines allowed inside quoted fields. Blank records are
// skipped. The header row, if any, is the caller's business.
std::vector<CsvRow> parseCsv(const std::string& text);

// Reads the whole file; throws ConfigError when it cannot be opened.
std::string readFileText(const std::string& path);

// Writes the file, creating parent directories; throws ConfigError on
// failure.
void writeFileText(const std::string& path, const std::string& text);

// Quotes a value for CSV output when it contains separators or quotes.
std::string csvField(const std::string& s);

}  // namespace vareffect

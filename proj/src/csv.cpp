#include "vareffect/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vareffect/error.hpp"

namespace vareffect {

std::vector<CsvRow> parseCsv(const std::string& text) {
    std::vector<CsvRow> rows;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool fieldStarted = false;  // something (even empty quotes) seen in this record
    int line = 1;
    int recordLine = 1;

    auto endField = [&] {
        fields.push_back(field);
        field.clear();
    };
    auto endRecord = [&] {
        if (fieldStarted || !fields.empty()) {
            endField();
            rows.push_back({std::move(fields), recordLine});
            fields = {};
        }
        fieldStarted = false;
    };

    for (std::size_t i = 0; i < text.size(); i++) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i++;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') line++;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!fieldStarted) recordLine = line;
                quoted = true;
                fieldStarted = true;
                break;
            case ',':
                if (!fieldStarted) recordLine = line;
                endField();
                fieldStarted = true;
                break;
            case '\r':
                break;
            case '\n':
                endRecord();
                line++;
                recordLine = line;
                break;
            default:
                if (!fieldStarted) recordLine = line;
                fieldStarted = true;
                field += c;
                break;
        }
    }
    endRecord();
    return rows;
}

std::string readFileText(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeFileText(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) throw ConfigError("cannot create directory: " + p.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << text;
    if (!out) throw ConfigError("write failed: " + path);
}

std::string csvField(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace vareffect

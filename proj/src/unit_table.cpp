#include "exmap/unit_table.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "exmap/errors.hpp"

namespace exmap {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.pop_back();
        size_t start = field.find_first_not_of(' ');
        out.push_back(start == std::string::npos ? "" : field.substr(start));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

[[noreturn]] void fail(const std::string& path, int line_no, const std::string& what) {
    throw ValidationError(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

UnitTable load_unit_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open unit table: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    const std::vector<std::string> header = split_csv(line);
    int col_id = -1, col_y = -1, col_z = -1, col_d = -1, col_stratum = -1;
    for (int c = 0; c < static_cast<int>(header.size()); ++c) {
        if (header[c] == "id") col_id = c;
        else if (header[c] == "y") col_y = c;
        else if (header[c] == "z") col_z = c;
        else if (header[c] == "d") col_d = c;
        else if (header[c] == "stratum") col_stratum = c;
        else fail(path, 1, "unknown column '" + header[c] + "'");
    }
    if (col_id < 0 || col_y < 0 || col_z < 0)
        fail(path, 1, "unit table needs columns id, y and z");

    struct Row {
        double y;
        std::uint8_t z, d;
        int stratum;
    };
    std::vector<std::optional<Row>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != header.size()) fail(path, line_no, "wrong number of fields");
        auto parse_int = [&](int col, const char* what) {
            char* end = nullptr;
            const long v = std::strtol(fields[col].c_str(), &end, 10);
            if (end == fields[col].c_str() || *end != '\0')
                fail(path, line_no, std::string("bad ") + what + ": " + fields[col]);
            return v;
        };
        auto parse_bit = [&](int col, const char* what) {
            const long v = parse_int(col, what);
            if (v != 0 && v != 1) fail(path, line_no, std::string(what) + " must be 0 or 1");
            return static_cast<std::uint8_t>(v);
        };
        const long id = parse_int(col_id, "id");
        if (id < 1) fail(path, line_no, "ids are 1-based");
        char* end = nullptr;
        const double y = std::strtod(fields[col_y].c_str(), &end);
        if (end == fields[col_y].c_str() || *end != '\0')
            fail(path, line_no, "bad y: " + fields[col_y]);
        Row row;
        row.y = y;
        row.z = parse_bit(col_z, "z");
        row.d = col_d >= 0 ? parse_bit(col_d, "d") : 0;
        row.stratum = col_stratum >= 0 ? static_cast<int>(parse_int(col_stratum, "stratum")) : 0;
        if (static_cast<size_t>(id) > rows.size()) rows.resize(id);
        if (rows[id - 1].has_value()) fail(path, line_no, "duplicate id " + std::to_string(id));
        rows[id - 1] = row;
    }
    if (rows.empty()) throw ValidationError(path + ": no units");

    UnitTable table;
    table.n = static_cast<int>(rows.size());
    if (col_d >= 0) table.d = AssignmentVector();
    if (col_stratum >= 0) table.stratum = std::vector<int>();
    for (int i = 0; i < table.n; ++i) {
        if (!rows[i].has_value())
            throw ValidationError(path + ": ids are not contiguous, missing id " +
                                  std::to_string(i + 1));
        table.y.push_back(rows[i]->y);
        table.z.push_back(rows[i]->z);
        if (table.d) table.d->push_back(rows[i]->d);
        if (table.stratum) table.stratum->push_back(rows[i]->stratum);
    }
    return table;
}

}  // namespace exmap

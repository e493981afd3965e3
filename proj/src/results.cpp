#include "desclab/results.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace desclab {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string opt_double(double v) { return std::isnan(v) ? "" : fmt_double(v); }

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string provenance_field(const ResultRow& row) {
    if (std::isnan(row.tolerance) || row.tolerance == 0.0) return row.provenance;
    return row.provenance + "|tol=" + fmt_double(row.tolerance);
}

void split_provenance(const std::string& field, ResultRow& row) {
    const auto pos = field.rfind("|tol=");
    if (pos == std::string::npos) {
        row.provenance = field;
        row.tolerance = 0.0;
    } else {
        row.provenance = field.substr(0, pos);
        row.tolerance = std::strtod(field.c_str() + pos + 5, nullptr);
    }
}

} // namespace

bool ResultRow::operator==(const ResultRow& other) const {
    const auto deq = [](double a, double b) {
        return (std::isnan(a) && std::isnan(b)) || a == b;
    };
    return name == other.name && variant == other.variant && m == other.m &&
           deq(rho, other.rho) && n == other.n && replicates == other.replicates &&
           deq(estimate, other.estimate) && deq(std_error, other.std_error) &&
           deq(reference, other.reference) && provenance == other.provenance &&
           deq(tolerance, other.tolerance) && pass == other.pass;
}

bool VerificationReport::all_pass() const {
    for (const auto& row : table.rows)
        if (row.pass == 0) return false;
    return true;
}

OutputFormat format_from_name(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown format: " + name);
}

std::string to_csv(const ResultTable& table) {
    std::string out =
        "name,variant,m,rho,n,replicates,estimate,stderr,reference,provenance,pass\n";
    for (const auto& row : table.rows) {
        out += csv_escape(row.name);
        out += ',';
        out += csv_escape(row.variant);
        out += ',';
        out += std::to_string(row.m);
        out += ',';
        out += fmt_double(row.rho);
        out += ',';
        out += std::to_string(row.n);
        out += ',';
        out += std::to_string(row.replicates);
        out += ',';
        out += opt_double(row.estimate);
        out += ',';
        out += opt_double(row.std_error);
        out += ',';
        out += opt_double(row.reference);
        out += ',';
        out += csv_escape(provenance_field(row));
        out += ',';
        if (row.pass >= 0) out += row.pass ? "true" : "false";
        out += '\n';
    }
    return out;
}

std::string to_json(const ResultTable& table) {
    std::string out = "[";
    bool first = true;
    const auto jstr = [](const std::string& s) {
        return nlohmann::json(s).dump();
    };
    const auto jnum = [](double v) -> std::string {
        return std::isnan(v) ? "null" : fmt_double(v);
    };
    for (const auto& row : table.rows) {
        out += first ? "\n" : ",\n";
        first = false;
        out += "  {\"name\": " + jstr(row.name);
        out += ", \"variant\": " + jstr(row.variant);
        out += ", \"m\": " + std::to_string(row.m);
        out += ", \"rho\": " + jnum(row.rho);
        out += ", \"n\": " + std::to_string(row.n);
        out += ", \"replicates\": " + std::to_string(row.replicates);
        out += ", \"estimate\": " + jnum(row.estimate);
        out += ", \"stderr\": " + jnum(row.std_error);
        out += ", \"reference\": " + jnum(row.reference);
        out += ", \"provenance\": " + jstr(provenance_field(row));
        out += ", \"pass\": ";
        out += row.pass < 0 ? "null" : (row.pass ? "true" : "false");
        out += "}";
    }
    out += "\n]\n";
    return out;
}

std::string serialize(const ResultTable& table, OutputFormat format) {
    return format == OutputFormat::csv ? to_csv(table) : to_json(table);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_opt_double(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::strtod(s.c_str(), nullptr);
}

} // namespace

ResultTable parse_csv(const std::string& text) {
    ResultTable table;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 11)
            throw std::runtime_error("parse_csv: expected 11 fields, got " +
                                     std::to_string(f.size()));
        ResultRow row;
        row.name = f[0];
        row.variant = f[1];
        row.m = int(std::strtol(f[2].c_str(), nullptr, 10));
        row.rho = parse_opt_double(f[3]);
        row.n = std::strtoll(f[4].c_str(), nullptr, 10);
        row.replicates = std::strtoll(f[5].c_str(), nullptr, 10);
        row.estimate = parse_opt_double(f[6]);
        row.std_error = parse_opt_double(f[7]);
        row.reference = parse_opt_double(f[8]);
        split_provenance(f[9], row);
        row.pass = f[10].empty() ? -1 : (f[10] == "true" ? 1 : 0);
        table.rows.push_back(std::move(row));
    }
    return table;
}

ResultTable parse_json(const std::string& text) {
    ResultTable table;
    const auto doc = nlohmann::json::parse(text);
    for (const auto& obj : doc) {
        ResultRow row;
        row.name = obj.at("name").get<std::string>();
        row.variant = obj.at("variant").get<std::string>();
        row.m = obj.at("m").get<int>();
        row.rho = obj.at("rho").is_null()
                      ? std::numeric_limits<double>::quiet_NaN()
                      : obj.at("rho").get<double>();
        row.n = obj.at("n").get<int64_t>();
        row.replicates = obj.at("replicates").get<int64_t>();
        const auto num = [&obj](const char* key) {
            const auto& v = obj.at(key);
            return v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                               : v.get<double>();
        };
        row.estimate = num("estimate");
        row.std_error = num("stderr");
        row.reference = num("reference");
        split_provenance(obj.at("provenance").get<std::string>(), row);
        const auto& p = obj.at("pass");
        row.pass = p.is_null() ? -1 : (p.get<bool>() ? 1 : 0);
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_results(const ResultTable& table, const std::string& path,
                   OutputFormat format) {
    // reference values must always say where they come from
    for (const auto& row : table.rows)
        if (!std::isnan(row.reference) && row.provenance.empty())
            throw std::logic_error("write_results: row '" + row.name +
                                   "' has a reference but no provenance");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_results: cannot open " + path);
    const std::string text = serialize(table, format);
    out.write(text.data(), std::streamsize(text.size()));
    if (!out) throw std::runtime_error("write_results: write failed for " + path);
}

ResultTable read_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_results: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto start = text.find_first_not_of(" \t\r\n");
    if (start != std::string::npos && text[start] == '[') return parse_json(text);
    return parse_csv(text);
}

void pretty_print(const ResultTable& table, std::ostream& out) {
    const auto num = [](double v) {
        if (std::isnan(v)) return std::string("-");
        char buf[48];
        snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    out << std::left << std::setw(44) << "name" << std::setw(12) << "estimate"
        << std::setw(12) << "stderr" << std::setw(12) << "reference"
        << std::setw(22) << "provenance" << "pass\n";
    for (const auto& row : table.rows) {
        out << std::left << std::setw(44) << row.name << std::setw(12)
            << num(row.estimate) << std::setw(12) << num(row.std_error)
            << std::setw(12) << num(row.reference) << std::setw(22)
            << row.provenance
            << (row.pass < 0 ? "-" : (row.pass ? "PASS" : "FAIL")) << "\n";
    }
}

} // namespace desclab

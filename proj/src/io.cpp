#include "yamabe/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace yamabe::io {

std::string format_float(double v, int precision) {
    if (precision < 1) precision = 1;
    if (precision > 17) precision = 17;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    nlohmann::json j;
    in >> j;
    return j;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

void write_solution_csv(const std::filesystem::path& path, const RadialSolution& sol,
                        int precision) {
    std::ostringstream out;
    out << "r,u,du\n";
    for (const Sample& s : sol.samples)
        out << format_float(s.r, precision) << ',' << format_float(s.u, precision) << ','
            << format_float(s.du, precision) << '\n';
    write_text_file(path, out.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("bad numeric field for ") + what + ": '" + s + "'");
    }
}

} // namespace

RadialSolution read_solution_csv(const std::filesystem::path& path,
                                 const ModelParams& params, std::string warp_name,
                                 Termination termination, double r_stop) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"r", "u", "du"})
        throw std::runtime_error("solution csv: expected header 'r,u,du' in " + path.string());
    std::vector<Sample> samples;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw std::runtime_error("solution csv: expected 3 fields per row");
        samples.push_back({parse_double(fields[0], "r"), parse_double(fields[1], "u"),
                           parse_double(fields[2], "du")});
    }
    if (samples.size() < 2) throw std::runtime_error("solution csv: too few rows");
    const double u0 = samples.front().u;
    return solution_from_samples(params, std::move(warp_name), u0, std::move(samples),
                                 termination, r_stop);
}

nlohmann::json solution_metadata(const RadialSolution& sol) {
    nlohmann::json j;
    j["n"] = sol.params.n;
    j["warp"] = sol.warp_name;
    j["u0"] = sol.u0;
    j["termination"] = std::string(to_string(sol.termination));
    j["r_stop"] = sol.r_stop;
    j["tolerances"] = {{"rel_tol", sol.rel_tol}, {"abs_tol", sol.abs_tol}};
    j["samples"] = sol.samples.size();
    j["steps"] = sol.n_steps;
    j["rejected_steps"] = sol.n_rejected;
    j["accumulated_error_estimate"] = sol.accumulated_error;
    return j;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows,
                     int precision) {
    std::ostringstream out;
    out << "u0,class,witness_r,length_numeric,length_total,verdict,decay_c,decay_C,termination\n";
    for (const SweepRow& row : rows) {
        out << format_float(row.u0, precision) << ',';
        if (!row.error.empty()) {
            out << "error,,,,,,,\n";
            continue;
        }
        out << to_string(row.classification.cls) << ',';
        if (std::isnan(row.classification.witness_r))
            out << ',';
        else
            out << format_float(row.classification.witness_r, precision) << ',';
        out << format_float(row.completeness.length_numeric, precision) << ','
            << format_float(row.completeness.length_total, precision) << ','
            << to_string(row.completeness.verdict) << ',';
        if (row.fit)
            out << format_float(row.fit->c, precision) << ','
                << format_float(row.fit->C_tilde, precision) << ',';
        else
            out << ",,";
        out << to_string(row.termination) << '\n';
    }
    write_text_file(path, out.str());
}

nlohmann::json sweep_report(const std::vector<SweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const SweepRow& row : rows) {
        nlohmann::json r;
        r["u0"] = row.u0;
        if (!row.error.empty()) {
            r["error"] = row.error;
            arr.push_back(r);
            continue;
        }
        r["class"] = std::string(to_string(row.classification.cls));
        if (!std::isnan(row.classification.witness_r))
            r["witness_r"] = row.classification.witness_r;
        r["length_numeric"] = row.completeness.length_numeric;
        if (std::isinf(row.completeness.length_total))
            r["length_total"] = "inf";
        else
            r["length_total"] = row.completeness.length_total;
        r["verdict"] = std::string(to_string(row.completeness.verdict));
        if (row.fit) {
            r["decay_c"] = row.fit->c;
            r["decay_C"] = row.fit->C_tilde;
            r["decay_rms_log_residual"] = row.fit->rms_log_residual;
        }
        r["termination"] = std::string(to_string(row.termination));
        r["r_stop"] = row.r_stop;
        arr.push_back(r);
    }
    return nlohmann::json{{"rows", arr}};
}

WarpingFunction load_warp_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{"r", "f", "df", "d2f"})
        throw std::runtime_error("warp table: expected header 'r,f,df,d2f' in " + path.string());
    std::vector<WarpTableRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw std::runtime_error("warp table: expected 4 fields per row");
        rows.push_back({parse_double(fields[0], "r"), parse_double(fields[1], "f"),
                        parse_double(fields[2], "df"), parse_double(fields[3], "d2f")});
    }
    return WarpingFunction::tabulated(std::move(rows), "table:" + path.filename().string());
}

} // namespace yamabe::io

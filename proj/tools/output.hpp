#pragma once

// Tabular and JSON output for the command-line tool. CSV numbers are written
// with 17 significant digits so that reruns are byte-identical and plots can
// be made without recomputing anything.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace solitonlab::tools {

enum class Format { Csv, Json };

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row) { rows.push_back(std::move(row)); }
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class OutputDir {
public:
    OutputDir(std::filesystem::path dir, Format fmt) : dir_(std::move(dir)), fmt_(fmt) {
        std::filesystem::create_directories(dir_);
    }

    const std::filesystem::path& path() const noexcept { return dir_; }

    // Writes stem.csv, or stem.json as an array of records.
    std::filesystem::path write_table(const std::string& stem, const Table& t) const {
        if (fmt_ == Format::Json) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& row : t.rows) {
                nlohmann::json rec;
                for (std::size_t c = 0; c < t.columns.size(); ++c) rec[t.columns[c]] = row[c];
                arr.push_back(std::move(rec));
            }
            return write_json(stem, arr);
        }
        const auto file = dir_ / (stem + ".csv");
        std::ofstream out(file, std::ios::trunc);
        for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
        out << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
            out << '\n';
        }
        if (!out) throw std::runtime_error("could not write " + file.string());
        return file;
    }

    std::filesystem::path write_json(const std::string& stem, const nlohmann::json& j) const {
        const auto file = dir_ / (stem + ".json");
        std::ofstream out(file, std::ios::trunc);
        out << j.dump(2) << '\n';
        if (!out) throw std::runtime_error("could not write " + file.string());
        return file;
    }

private:
    std::filesystem::path dir_;
    Format fmt_;
};

}  // namespace solitonlab::tools

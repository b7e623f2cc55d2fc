#include "swe1d/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace swe {

std::string format_double17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Csv::Csv(const std::vector<std::string>& header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) body_ += ',';
        body_ += header[i];
    }
    body_ += '\n';
}

Csv& Csv::add(double v) { return add(format_double17(v)); }
Csv& Csv::add(long v) { return add(std::to_string(v)); }
Csv& Csv::add(std::uint64_t v) { return add(std::to_string(v)); }

Csv& Csv::add(const std::string& v) {
    if (in_row_) body_ += ',';
    body_ += v;
    ++in_row_;
    return *this;
}

void Csv::end_row() {
    if (in_row_ != columns_)
        throw std::logic_error("Csv: row has " + std::to_string(in_row_) + " of " +
                               std::to_string(columns_) + " columns");
    body_ += '\n';
    in_row_ = 0;
}

void Csv::write(const std::string& path) const { write_text_atomic(path, body_); }

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_text_atomic: cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write_text_atomic: short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace swe

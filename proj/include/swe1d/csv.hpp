#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace swe {

/// CSV accumulator: comma-separated, header row, 17-significant-digit floats.
/// write() is atomic (temp file + rename), so partial failures never leave a
/// torn file behind.
class Csv {
  public:
    explicit Csv(const std::vector<std::string>& header);

    Csv& add(double v);
    Csv& add(long v);
    Csv& add(std::uint64_t v);
    Csv& add(const std::string& v);
    void end_row();

    const std::string& body() const { return body_; }
    void write(const std::string& path) const;

  private:
    std::string body_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

std::string format_double17(double v);

/// Atomic text write (temp + rename), creating parent directories.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace swe

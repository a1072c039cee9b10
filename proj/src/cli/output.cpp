#include "output.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "bincat/errors.hpp"

namespace bincat {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

namespace cli {

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::string line;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) line.push_back(',');
    line += header[i];
  }
  line.push_back('\n');
  out_ << line;
}

std::string CsvWriter::checked(double value) const {
  if (!std::isfinite(value)) {
    throw NumericalFault("non-finite value in " + path_.filename().string());
  }
  return format_double(value);
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for " + path_.string());
  out_.close();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace cli
}  // namespace bincat
